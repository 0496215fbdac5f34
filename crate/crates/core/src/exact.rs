//! Exact integer and rational arithmetic, p-adic valuations of rationals,
//! base-p digit sums, and rigorous rational enclosures of `e^{1/r}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Renders `num/den`, dropping the denominator when it is 1.
pub fn rational_to_string(q: &Rational) -> String {
    q.to_string()
}

/// Parses `num`, `num/den` or `-num/den` (surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Serde adapter storing a [`Rational`] as its `num/den` string.
pub mod serde_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as an array of strings.
pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&rational_to_string(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `x (x-1) ... (x-k+1)`.
pub fn falling_factorial(x: &Rational, k: u64) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| acc * (x - rat_int(i)))
}

/// Generalised binomial coefficient `x (x-1) ... (x-k+1) / k!`.
pub fn binomial(x: &Rational, k: u64) -> Rational {
    falling_factorial(x, k) / rat_int(factorial(k))
}

/// Binomial coefficient for integer tops, including negative ones.
pub fn binomial_int(n: &BigInt, k: u64) -> BigInt {
    let q = binomial(&Rational::from_integer(n.clone()), k);
    debug_assert!(q.is_integer());
    q.to_integer()
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{p} is not prime")))
    }
}

/// Largest `e` with `p^e | n`. Zero has no valuation.
pub fn vp(n: &BigInt, p: u64) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Ok(e);
        }
        n = q;
        e += 1;
    }
}

/// `v_p(num) - v_p(den)`.
pub fn vp_rational(q: &Rational, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    Ok(vp(q.numer(), p)? as i64 - vp(q.denom(), p)? as i64)
}

/// True when `p` does not divide the reduced denominator.
pub fn is_p_integral(q: &Rational, p: u64) -> bool {
    !(q.denom() % BigInt::from(p)).is_zero()
}

pub fn digit_sum(n: u64, p: u64) -> u64 {
    let mut n = n;
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// Legendre: `v_p(n!) = (n - s_p(n)) / (p - 1)`.
pub fn vp_factorial(n: u64, p: u64) -> u64 {
    (n - digit_sum(n, p)) / (p - 1)
}

/// `floor(log n / log p)` computed in integers, for `n >= 1`.
pub fn floor_log(n: u64, p: u64) -> u64 {
    assert!(n >= 1 && p >= 2);
    let mut e = 0;
    let mut pow = p;
    while pow <= n {
        e += 1;
        match pow.checked_mul(p) {
            Some(next) => pow = next,
            None => break,
        }
    }
    e
}

/// Mathematical floor (toward negative infinity).
pub fn floor(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

/// Reduces a p-integral rational to a residue in `[0, modulus)`.
pub fn reduce_mod(q: &Rational, modulus: &BigInt) -> Option<BigInt> {
    let den = q.denom().mod_floor(modulus);
    let inv = mod_inverse(&den, modulus)?;
    Some((q.numer() * inv).mod_floor(modulus))
}

pub fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    if modulus.is_one() {
        return Some(BigInt::zero());
    }
    let egcd = a.mod_floor(modulus).extended_gcd(modulus);
    if !egcd.gcd.is_one() {
        return None;
    }
    Some(egcd.x.mod_floor(modulus))
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalInterval {
    #[serde(with = "serde_rational")]
    lo: Rational,
    #[serde(with = "serde_rational")]
    hi: Rational,
}

impl RationalInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(q: Rational) -> Self {
        Self { lo: q.clone(), hi: q }
    }

    /// `[center - radius, center + radius]`; `radius` must be nonnegative.
    pub fn centered(center: Rational, radius: Rational) -> Self {
        assert!(!radius.is_negative());
        Self {
            lo: &center - &radius,
            hi: center + radius,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_interval(&self, other: &RationalInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            Self { lo: b, hi: a }
        } else {
            Self { lo: a, hi: b }
        }
    }

    pub fn shift(&self, c: &Rational) -> Self {
        Self {
            lo: &self.lo + c,
            hi: &self.hi + c,
        }
    }

    /// The common floor of every point, if the interval does not straddle an integer.
    pub fn floor(&self) -> Option<BigInt> {
        let a = floor(&self.lo);
        let b = floor(&self.hi);
        (a == b).then_some(a)
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Encloses `e^{1/r}` by the partial sum over `k < terms` plus the geometric
/// majorant `|x|^{K+1}/(K+1)! / (1 - |x|/(K+2))` of the tail, `K = terms - 1`.
pub fn exp_reciprocal_interval(r: i64, terms: usize) -> Result<RationalInterval> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be nonzero".into()));
    }
    let x = rat(1, r);
    let ax = x.abs();
    // terms >= 2|x| keeps the majorant's ratio below 1
    if rat_int(terms as i64) < &ax * rat_int(2) || terms == 0 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2|1/r| terms, got {terms}"
        )));
    }
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    for k in 0..terms {
        if k > 0 {
            term = term * &x / rat_int(k as i64);
        }
        sum += &term;
    }
    let k_last = terms as i64 - 1;
    let next = ax.pow(terms as i32) / rat_int(factorial(terms as u64));
    let ratio = &ax / rat_int(k_last + 2);
    let tail = next / (Rational::one() - ratio);
    Ok(RationalInterval::centered(sum, tail))
}

/// Best-effort conversion for diagnostics and tests only.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
