//! The p-adic incomplete gamma function
//! `Γ_p(s, r) = r^{s-1} exp_p(p r) ã(s-1, 1/r)` on `Z_p × (1 + pZ_p)`,
//! and the two-variable interpolation
//! `ã(y, s) = Σ_k s^k y(y-1)...(y-k+1)` of `a(n, s) = Σ_k C(n,k) k! s^k`.
//!
//! Everything is computed modulo `p^N`. `exp_p(p r)` needs `v_p(p r) >= 2`
//! when `p = 2`, so only odd primes are supported.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinat::{self, FloorCertificate};
use crate::error::{Error, Result};
use crate::exact::{self, rat_int, Rational};
use crate::padic::{exp_p, log_p, PadicContext, PadicInt};

/// Arguments `(s, r)` of `Γ_p` with `r ≡ 1 mod p`, at a common precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaPInput {
    s: PadicInt,
    r: PadicInt,
}

impl GammaPInput {
    pub fn new(s: PadicInt, r: PadicInt) -> Result<Self> {
        if s.p() != r.p() {
            return Err(Error::InvalidArgument(format!(
                "s and r live over different primes {} and {}",
                s.p(),
                r.p()
            )));
        }
        let p = s.p();
        if p == 2 {
            return Err(Error::Domain("exp_2(2r) diverges for odd r; p must be odd".into()));
        }
        let n = s.precision().min(r.precision());
        let (s, r) = (s.reduce(n), r.reduce(n));
        if !((r.residue() - 1u32) % p).is_zero() {
            return Err(Error::Domain(format!("r = {r} is not 1 mod {p}")));
        }
        Ok(Self { s, r })
    }

    /// Builds the input from rationals (`s`, `r` must be p-integral).
    pub fn from_rationals(s: &Rational, r: &Rational, p: u64, precision: u32) -> Result<Self> {
        let ctx = PadicContext::new(p, precision)?;
        let to_padic = |q: &Rational, name: &str| {
            ctx.from_rational(q).map_err(|_| Error::Domain(format!("{name} = {q} is not in Z_{p}")))
        };
        Self::new(to_padic(s, "s")?, to_padic(r, "r")?)
    }

    pub fn s(&self) -> &PadicInt {
        &self.s
    }

    pub fn r(&self) -> &PadicInt {
        &self.r
    }

    pub fn p(&self) -> u64 {
        self.s.p()
    }

    pub fn precision(&self) -> u32 {
        self.s.precision()
    }
}

/// `f_n(X) = Σ_{k<=n} X^k / k!`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncatedExponential {
    n: u64,
    #[serde(with = "exact::serde_rational_vec")]
    coeffs: Vec<Rational>,
}

impl TruncatedExponential {
    pub fn new(n: u64) -> Self {
        let coeffs = (0..=n)
            .map(|k| Rational::new(BigInt::one(), exact::factorial(k)))
            .collect();
        Self { n, coeffs }
    }

    pub fn degree(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// The integer coefficients `n!/k!` of `n! f_n(X)`.
    pub fn scaled_coeffs(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::one(); self.coeffs.len()];
        for k in (0..self.n as usize).rev() {
            out[k] = &out[k + 1] * (k as u64 + 1);
        }
        out
    }

    /// `n! f_n(x)` in `Z/p^N`.
    pub fn eval_scaled(&self, x: &PadicInt) -> PadicInt {
        let ctx = x.context();
        self.scaled_coeffs()
            .into_iter()
            .rev()
            .fold(ctx.zero(), |acc, c| acc * x + ctx.int(c))
    }
}

/// Least `K` with `v_p(K!) >= N`; every term of `ã` with `k >= K` vanishes
/// modulo `p^N`, because `y^{k̲}` is divisible by `k!`.
pub fn a_tilde_truncation(p: u64, precision: u32) -> u64 {
    let mut k = 0;
    while exact::vp_factorial(k, p) < precision as u64 {
        k += 1;
    }
    k
}

/// `ã(y, s) = Σ_{k>=0} s^k y^{k̲}` modulo `p^N`, `N` the smaller precision.
pub fn a_tilde(y: &PadicInt, s: &PadicInt) -> PadicInt {
    assert_eq!(y.p(), s.p(), "p-adic operands with different primes");
    let n = y.precision().min(s.precision());
    let (y, s) = (y.reduce(n), s.reduce(n));
    let ctx = y.context();
    let last = a_tilde_truncation(y.p(), n);
    let mut sum = ctx.zero();
    let mut term = ctx.one();
    for k in 0..last {
        if k > 0 {
            term = term * &s * (&y - &ctx.int(k - 1));
        }
        if term.is_zero() {
            break;
        }
        sum = sum + &term;
    }
    sum
}

/// [`a_tilde`] with a rational second argument, which must lie in `Z_p`.
pub fn a_tilde_rational(y: &PadicInt, s: &Rational) -> Result<PadicInt> {
    if !exact::is_p_integral(s, y.p()) {
        return Err(Error::Domain(format!(
            "s = {s} has negative {}-adic valuation",
            y.p()
        )));
    }
    Ok(a_tilde(y, &y.context().from_rational(s)?))
}

/// `r^y` for a fixed base, reusing `log_p r`.
struct PowerOf {
    log_r: PadicInt,
}

impl PowerOf {
    fn new(r: &PadicInt) -> Result<Self> {
        Ok(Self { log_r: log_p(r)? })
    }

    fn pow(&self, y: &PadicInt) -> PadicInt {
        exp_p(&(y * &self.log_r)).expect("y log r lies in pZ_p")
    }
}

fn exp_pr(r: &PadicInt) -> Result<PadicInt> {
    let p = r.context().int(r.p());
    exp_p(&(&p * r))
}

/// `Γ_p(s, r) = r^{s-1} exp_p(p r) ã(s-1, r^{-1})`.
pub fn gamma_p(input: &GammaPInput) -> Result<PadicInt> {
    let (s, r) = (&input.s, &input.r);
    let ctx = s.context();
    let y = s - &ctx.one();
    let rinv = r.inverse()?;
    let power = PowerOf::new(r)?.pow(&y);
    Ok(power * exp_pr(r)? * a_tilde(&y, &rinv))
}

/// `Γ_p(s, r) = exp_p(p r) Σ_k r^{s-1-k} (s-1)^{k̲}`, term by term.
pub fn gamma_p_series(input: &GammaPInput) -> Result<PadicInt> {
    let (s, r) = (&input.s, &input.r);
    let ctx = s.context();
    let y = s - &ctx.one();
    let power = PowerOf::new(r)?;
    let last = a_tilde_truncation(ctx.p(), ctx.precision());
    let mut sum = ctx.zero();
    for k in 0..last {
        let exponent = &y - &ctx.int(k);
        sum = sum + power.pow(&exponent) * y.falling_factorial(k);
    }
    Ok(exp_pr(r)? * sum)
}

/// `Γ_p(n+1, r) = exp_p(p r) n! f_n(r)`.
pub fn gamma_p_truncexp(n: u64, r: &PadicInt) -> Result<PadicInt> {
    let s = r.context().int(n + 1);
    let input = GammaPInput::new(s, r.clone())?;
    Ok(exp_pr(&input.r)? * TruncatedExponential::new(n).eval_scaled(&input.r))
}

/// Largest degree for which [`gamma_p_all_routes`] also runs the
/// truncated-exponential route.
pub const TRUNCEXP_MAX_DEGREE: u64 = 5000;

/// Outcome of evaluating `Γ_p` by more than one route.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RouteComparison {
    pub factored: PadicInt,
    pub series: PadicInt,
    /// Present when the residue of `s` is a positive integer up to
    /// [`TRUNCEXP_MAX_DEGREE`] + 1.
    pub truncexp: Option<PadicInt>,
    pub agree: bool,
}

pub fn gamma_p_all_routes(input: &GammaPInput) -> Result<RouteComparison> {
    let factored = gamma_p(input)?;
    let series = gamma_p_series(input)?;
    let s = input.s.residue();
    let truncexp = if !s.is_zero() && *s <= BigInt::from(TRUNCEXP_MAX_DEGREE + 1) {
        let n: u64 = (s - 1u32).try_into().expect("small");
        Some(gamma_p_truncexp(n, &input.r)?)
    } else {
        None
    };
    let agree = factored == series && truncexp.as_ref().is_none_or(|t| *t == factored);
    Ok(RouteComparison {
        factored,
        series,
        truncexp,
        agree,
    })
}

/// Compares `Γ_p(n, r)` with the rational-integer route
/// `a(n-1, 1/r) r^{n-1} exp_p(p r)` for an integer `r ≡ 1 mod p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassicalCheck {
    pub n: u64,
    pub r: i64,
    /// `a(n-1, 1/r) r^{n-1} = Σ_k (n-1)!/k! r^k`.
    #[serde(serialize_with = "ser_display")]
    pub integer_part: BigInt,
    pub classical: PadicInt,
    pub gamma_p: PadicInt,
    pub agree: bool,
}

fn ser_display<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn classical_consistency(n: u64, r: i64, p: u64, precision: u32) -> Result<ClassicalCheck> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if r == 0 {
        return Err(Error::InvalidArgument("r must be nonzero".into()));
    }
    let ctx = PadicContext::new(p, precision)?;
    let rq = rat_int(r);
    let integer_part =
        (combinat::a_closed(n - 1, &(Rational::one() / &rq)) * rq.pow((n - 1) as i32)).to_integer();
    let input = GammaPInput::new(ctx.int(n), ctx.int(r))?;
    let classical = ctx.int(integer_part.clone()) * exp_pr(&input.r)?;
    let gamma_p = gamma_p(&input)?;
    Ok(ClassicalCheck {
        n,
        r,
        integer_part,
        agree: classical == gamma_p,
        classical,
        gamma_p,
    })
}

/// `Γ_p(n+1, 1/r)` against `r^{-n} exp_p(p/r)` times the floor-certified
/// value of `a(n, r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FloorPadicCheck {
    pub lhs: PadicInt,
    pub rhs: PadicInt,
    pub certificate: FloorCertificate,
    pub agree: bool,
}

pub fn verify_floor_padic(n: u64, r: i64, p: u64, precision: u32) -> Result<FloorPadicCheck> {
    let ctx = PadicContext::new(p, precision)?;
    if r == 0 {
        return Err(Error::InvalidArgument("r must be nonzero".into()));
    }
    let r_p = ctx.int(r);
    let input = GammaPInput::new(ctx.int(n + 1), r_p.inverse()?)?;
    let lhs = gamma_p(&input)?;
    let certificate = combinat::verify_floor_formula(n, r)?;
    let power = PowerOf::new(&r_p)?.pow(&-ctx.int(n));
    let rhs = ctx.int(certificate.floor.clone()) * power * exp_pr(&input.r)?;
    Ok(FloorPadicCheck {
        agree: lhs == rhs,
        lhs,
        rhs,
        certificate,
    })
}

/// Largest `p^k` a [`zero_scan`] may visit.
pub const ZERO_SCAN_BUDGET: u64 = 1_000_000;

/// Residues `y mod p^k` with `ã(y, r) ≡ 0 mod p^k`. A residue in the list is
/// necessary, not sufficient, for a zero of `ã(·, r)` in that class.
pub fn zero_scan(r: &PadicInt, k: u32) -> Result<Vec<BigInt>> {
    if k == 0 {
        return Err(Error::InvalidArgument("scan level must be at least 1".into()));
    }
    if k > r.precision() {
        return Err(Error::InvalidArgument(format!(
            "scan level {k} exceeds the precision {} of r",
            r.precision()
        )));
    }
    let size = BigInt::from(r.p()).pow(k);
    if size > BigInt::from(ZERO_SCAN_BUDGET) {
        return Err(Error::BudgetExceeded {
            needed: size.to_string(),
            budget: ZERO_SCAN_BUDGET,
        });
    }
    let r = r.reduce(k);
    let ctx = r.context();
    let size: u64 = size.try_into().expect("within budget");
    Ok((0..size)
        .filter(|&y| a_tilde(&ctx.int(y), &r).is_zero())
        .map(BigInt::from)
        .collect())
}
