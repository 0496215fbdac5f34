//! m-values of a sequence, exponential generating functions, and the m-value
//! continuity criterion.
//!
//! For `f` with `f(0) = 1` the m-values are defined by
//! `Σ f(n) X^n / n! = exp(Σ m_k X^k / k)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, rat_int, Rational};
use crate::mahler::{ExtValue, SequencePrefix};

/// `m_1, ..., m_K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MSeries {
    #[serde(with = "exact::serde_rational_vec")]
    values: Vec<Rational>,
}

impl MSeries {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::PrefixTooShort { needed: 1, got: 0 });
        }
        Ok(Self { values })
    }

    /// `m_k` for `k = 1..=last`.
    pub fn from_fn(last: usize, mut m: impl FnMut(usize) -> Rational) -> Self {
        assert!(last >= 1);
        Self {
            values: (1..=last).map(&mut m).collect(),
        }
    }

    /// `m_k`, 1-based.
    pub fn get(&self, k: usize) -> Option<&Rational> {
        k.checked_sub(1).and_then(|i| self.values.get(i))
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Largest available index `K`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// EGF-coefficients `c_0, ..., c_K` of `Σ c_n X^n / n!`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EGFPrefix {
    #[serde(with = "exact::serde_rational_vec")]
    coeffs: Vec<Rational>,
}

impl EGFPrefix {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        Self { coeffs }
    }

    pub fn from_fn(last: usize, f: impl FnMut(usize) -> Rational) -> Self {
        Self {
            coeffs: (0..=last).map(f).collect(),
        }
    }

    /// `e^{aX}`.
    pub fn exp_linear(a: &Rational, last: usize) -> Self {
        let mut c = Vec::with_capacity(last + 1);
        let mut t = Rational::one();
        for _ in 0..=last {
            c.push(t.clone());
            t *= a;
        }
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_prefix(&self) -> Result<SequencePrefix> {
        SequencePrefix::new(self.coeffs.clone())
    }
}

impl From<&SequencePrefix> for EGFPrefix {
    fn from(f: &SequencePrefix) -> Self {
        Self::new(f.values().to_vec())
    }
}

fn check_normalized(f: &SequencePrefix) -> Result<()> {
    if !f.values()[0].is_one() {
        return Err(Error::Normalization(f.values()[0].to_string()));
    }
    Ok(())
}

fn factorials(last: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(last + 1);
    let mut acc = BigInt::one();
    for k in 0..=last {
        if k > 0 {
            acc *= k;
        }
        out.push(rat_int(acc.clone()));
    }
    out
}

/// m-values by the recursion
/// `m_k = f(k)/(k-1)! - Σ_{j<k} f(k-j)/(k-j)! m_j`.
pub fn m_from_f(f: &SequencePrefix) -> Result<MSeries> {
    check_normalized(f)?;
    let last = f.last_index();
    if last == 0 {
        return Err(Error::PrefixTooShort { needed: 2, got: 1 });
    }
    let fact = factorials(last);
    let scaled: Vec<Rational> = f.values().iter().zip(&fact).map(|(v, d)| v / d).collect();
    let mut m: Vec<Rational> = Vec::with_capacity(last);
    for k in 1..=last {
        let mut mk = &f.values()[k] / &fact[k - 1];
        for j in 1..k {
            mk -= &scaled[k - j] * &m[j - 1];
        }
        m.push(mk);
    }
    Ok(MSeries { values: m })
}

/// Partitions of `k` as multiplicity vectors (`mult[j]` = parts equal to `j`).
fn partitions(k: usize) -> Vec<Vec<usize>> {
    fn go(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(rem)).rev() {
            cur[part] += 1;
            go(rem - part, part, cur, out);
            cur[part] -= 1;
        }
    }
    let mut out = Vec::new();
    go(k, k, &mut vec![0; k + 1], &mut out);
    out
}

/// `m_k` from the explicit sum over partitions `λ` of `k`:
/// `m_k / k = Σ_λ (-1)^{ℓ+1}/ℓ · (ℓ; λ_1, ..., λ_k) · Π (f(j)/j!)^{λ_j}`.
pub fn m_from_f_partition(f: &SequencePrefix, k: usize) -> Result<Rational> {
    check_normalized(f)?;
    if k == 0 {
        return Err(Error::InvalidArgument("m-values start at k = 1".into()));
    }
    if k > f.last_index() {
        return Err(Error::Index {
            index: k,
            len: f.len(),
        });
    }
    let fact = factorials(k);
    let scaled: Vec<Rational> = (0..=k).map(|j| &f.values()[j] / &fact[j]).collect();
    let mut sum = Rational::zero();
    for mult in partitions(k) {
        let parts: usize = mult.iter().sum();
        let mut multinomial = exact::factorial(parts as u64);
        let mut prod = Rational::one();
        for (j, &e) in mult.iter().enumerate().skip(1) {
            if e > 0 {
                multinomial /= exact::factorial(e as u64);
                prod *= num_traits::pow(scaled[j].clone(), e);
            }
        }
        let mut term = prod * rat_int(multinomial) / rat_int(parts as u64);
        if parts % 2 == 0 {
            term = -term;
        }
        sum += term;
    }
    Ok(sum * rat_int(k as u64))
}

/// EGF-coefficients `c_0..=c_K` of `exp(Σ m_k X^k / k)`.
pub fn zeta_egf(m: &MSeries, last: usize) -> Result<EGFPrefix> {
    if last > m.len() {
        return Err(Error::Index {
            index: last,
            len: m.len(),
        });
    }
    // n h_n = Σ_{j=1}^n m_j h_{n-j} for the ordinary coefficients h_n.
    let mut h = vec![Rational::one()];
    for n in 1..=last {
        let mut s = Rational::zero();
        for j in 1..=n {
            s += &m.values[j - 1] * &h[n - j];
        }
        h.push(s / rat_int(n as u64));
    }
    let fact = factorials(last);
    Ok(EGFPrefix {
        coeffs: h.iter().zip(&fact).map(|(a, b)| a * b).collect(),
    })
}

/// `min_n v_p(c_n)` over the prefix; `inf` when every coefficient is zero.
pub fn egf_norm(c: &EGFPrefix, p: u64) -> ExtValue {
    c.coeffs
        .iter()
        .filter(|q| !q.is_zero())
        .map(|q| ExtValue::int(exact::vp_rational(q, p).expect("nonzero")))
        .min()
        .unwrap_or(ExtValue::PosInfinity)
}

/// Binomial convolution `c_n = Σ C(n,k) a_{n-k} b_k`, truncated to the
/// shorter input.
pub fn egf_product(a: &EGFPrefix, b: &EGFPrefix) -> EGFPrefix {
    let len = a.len().min(b.len());
    let mut coeffs = Vec::with_capacity(len);
    for n in 0..len {
        let mut s = Rational::zero();
        let mut binom = BigInt::one();
        for k in 0..=n {
            s += &a.coeffs[n - k] * &b.coeffs[k] * rat_int(binom.clone());
            binom = binom * (n - k) / (k + 1);
        }
        coeffs.push(s);
    }
    EGFPrefix { coeffs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Continuity {
    Continuous,
    NotContinuous,
    /// Some `m_k` with `k >= 2` is not p-integral, so the criterion says nothing.
    CriterionInapplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub k: usize,
    #[serde(with = "exact::serde_rational")]
    pub m: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionVerdict {
    pub p: u64,
    pub verdict: Continuity,
    #[serde(with = "exact::serde_rational")]
    pub m1: Rational,
    #[serde(with = "exact::serde_rational")]
    pub mp: Rational,
    /// `(m_p - m_1 + 1) mod p`, when both are p-integral.
    pub residue: Option<u64>,
    pub violations: Vec<Violation>,
}

/// Number of m-values checked for p-integrality by default.
pub fn default_window(p: u64) -> usize {
    (2 * p as usize).max(20)
}

pub fn continuity_criterion(f: &SequencePrefix, p: u64) -> Result<CriterionVerdict> {
    continuity_criterion_window(f, p, default_window(p))
}

/// The criterion with `m_2..=m_min(K, window)` checked for p-integrality.
pub fn continuity_criterion_window(
    f: &SequencePrefix,
    p: u64,
    window: usize,
) -> Result<CriterionVerdict> {
    exact::require_prime(p)?;
    check_normalized(f)?;
    let pu = p as usize;
    if f.last_index() < pu {
        return Err(Error::PrefixTooShort {
            needed: pu + 1,
            got: f.len(),
        });
    }
    let m = m_from_f(f)?;
    let upto = m.len().min(window.max(pu));
    let violations: Vec<Violation> = (2..=upto)
        .filter_map(|k| {
            let mk = m.get(k).expect("in range");
            (!exact::is_p_integral(mk, p)).then(|| Violation { k, m: mk.clone() })
        })
        .collect();
    let m1 = m.get(1).expect("K >= 1").clone();
    let mp = m.get(pu).expect("K >= p").clone();
    let modulus = BigInt::from(p);
    let residue = match (exact::reduce_mod(&m1, &modulus), exact::reduce_mod(&mp, &modulus)) {
        (Some(a), Some(b)) => Some((b - a + 1i32).mod_floor(&modulus).to_u64().expect("small")),
        _ => None,
    };
    let verdict = if !violations.is_empty() {
        Continuity::CriterionInapplicable
    } else if residue == Some(0) {
        Continuity::Continuous
    } else {
        Continuity::NotContinuous
    };
    Ok(CriterionVerdict {
        p,
        verdict,
        m1,
        mp,
        residue,
        violations,
    })
}

/// `f(n) = (-1)^n Π_{k<=n, p∤k} k`, the sequence `-Γ_{p,M}(n+1)` attached to
/// Morita's p-adic gamma function.
pub fn morita_f(last: usize, p: u64) -> Result<SequencePrefix> {
    exact::require_prime(p)?;
    let mut acc = BigInt::one();
    let mut values = Vec::with_capacity(last + 1);
    for n in 0..=last as u64 {
        if n > 0 && n % p != 0 {
            acc *= n;
        }
        let v = if n % 2 == 0 { acc.clone() } else { -acc.clone() };
        values.push(rat_int(v));
    }
    SequencePrefix::new(values)
}

/// `m_k = 1` when `k` is a power of `ℓ` (including `ℓ^0 = 1`), else 0.
pub fn power_indicator(ell: u64, last: usize) -> MSeries {
    MSeries::from_fn(last.max(1), |k| {
        let mut k = k as u64;
        while k % ell == 0 {
            k /= ell;
        }
        if k == 1 {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// EGF-coefficients of the Artin–Hasse exponential
/// `E_ℓ(X) = exp(X + X^ℓ/ℓ + X^{ℓ²}/ℓ² + ...)`, degrees `0..=last`.
pub fn artin_hasse_f(ell: u64, last: usize) -> Result<SequencePrefix> {
    exact::require_prime(ell)?;
    let m = power_indicator(ell, last);
    zeta_egf(&m, last)?.to_prefix()
}
