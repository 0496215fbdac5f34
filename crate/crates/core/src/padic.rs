//! p-adic integers at fixed absolute precision: an element is known modulo
//! `p^N` and stored as its residue in `[0, p^N)`.
//!
//! Mixed-precision arithmetic returns a result at the smaller precision.
//! Mixing primes is a programming error and panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicContext {
    p: u64,
    precision: u32,
}

impl PadicContext {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        exact::require_prime(p)?;
        if precision == 0 {
            return Err(Error::InvalidArgument("precision must be at least 1".into()));
        }
        Ok(Self { p, precision })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> BigInt {
        BigInt::from(self.p).pow(self.precision)
    }

    pub fn int(&self, n: impl Into<BigInt>) -> PadicInt {
        PadicInt::new(self.p, self.precision, n.into())
    }

    pub fn zero(&self) -> PadicInt {
        self.int(0)
    }

    pub fn one(&self) -> PadicInt {
        self.int(1)
    }

    pub fn from_rational(&self, q: &Rational) -> Result<PadicInt> {
        PadicInt::from_rational(q, *self)
    }
}

/// `v_p` of an element known modulo `p^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Exact(u32),
    /// The residue is zero: the valuation is only known to be at least `N`.
    AtLeast(u32),
}

impl Valuation {
    /// The valuation, capped at the precision for zero residues.
    pub fn value(self) -> u32 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_at_least(self) -> bool {
        matches!(self, Valuation::AtLeast(_))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PadicIntRepr", into = "PadicIntRepr")]
pub struct PadicInt {
    p: u64,
    precision: u32,
    residue: BigInt,
}

#[derive(Serialize, Deserialize)]
struct PadicIntRepr {
    p: u64,
    precision: u32,
    residue: String,
}

impl From<PadicInt> for PadicIntRepr {
    fn from(x: PadicInt) -> Self {
        Self {
            p: x.p,
            precision: x.precision,
            residue: x.residue.to_string(),
        }
    }
}

impl TryFrom<PadicIntRepr> for PadicInt {
    type Error = Error;

    fn try_from(r: PadicIntRepr) -> Result<Self> {
        let ctx = PadicContext::new(r.p, r.precision)?;
        let residue: BigInt = r
            .residue
            .parse()
            .map_err(|_| Error::Parse(format!("bad residue {:?}", r.residue)))?;
        if residue.is_negative() || residue >= ctx.modulus() {
            return Err(Error::Parse(format!(
                "residue {residue} outside [0, {}^{})",
                r.p, r.precision
            )));
        }
        Ok(ctx.int(residue))
    }
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.p, self.precision)
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

fn pow_u(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

impl PadicInt {
    /// Reduces any integer into `[0, p^N)`.
    pub fn new(p: u64, precision: u32, n: BigInt) -> Self {
        let residue = n.mod_floor(&pow_u(p, precision));
        Self { p, precision, residue }
    }

    /// Embeds a p-integral rational by inverting its denominator modulo `p^N`.
    pub fn from_rational(q: &Rational, ctx: PadicContext) -> Result<Self> {
        let residue = exact::reduce_mod(q, &ctx.modulus()).ok_or_else(|| Error::NotPIntegral {
            value: q.to_string(),
            p: ctx.p,
        })?;
        Ok(Self {
            p: ctx.p,
            precision: ctx.precision,
            residue,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn context(&self) -> PadicContext {
        PadicContext {
            p: self.p,
            precision: self.precision,
        }
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn modulus(&self) -> BigInt {
        pow_u(self.p, self.precision)
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        !(&self.residue % self.p).is_zero()
    }

    pub fn valuation(&self) -> Valuation {
        if self.residue.is_zero() {
            return Valuation::AtLeast(self.precision);
        }
        Valuation::Exact(exact::vp(&self.residue, self.p).expect("nonzero") as u32)
    }

    /// Same element viewed modulo `p^precision`, `precision <= N`.
    pub fn reduce(&self, precision: u32) -> Self {
        assert!(precision <= self.precision && precision > 0);
        Self::new(self.p, precision, self.residue.clone())
    }

    /// Residue lifted to a higher precision (the representative in `[0, p^N)`).
    pub fn lift(&self, precision: u32) -> Self {
        assert!(precision >= self.precision);
        Self::new(self.p, precision, self.residue.clone())
    }

    /// Symmetric representative in `(-p^N/2, p^N/2]`.
    pub fn signed_residue(&self) -> BigInt {
        let m = self.modulus();
        if &self.residue * 2 > m {
            &self.residue - m
        } else {
            self.residue.clone()
        }
    }

    fn join(&self, other: &Self) -> (u64, u32) {
        assert_eq!(self.p, other.p, "p-adic operands with different primes");
        (self.p, self.precision.min(other.precision))
    }

    pub fn pow(&self, e: u64) -> Self {
        let m = self.modulus();
        let residue = self.residue.modpow(&BigInt::from(e), &m);
        Self { residue, ..self.clone() }
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = self.modulus();
        let residue = exact::mod_inverse(&self.residue, &m)
            .ok_or_else(|| Error::NotAUnit(format!("{self:?}")))?;
        Ok(Self { residue, ..self.clone() })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if !other.is_unit() {
            let (p, precision) = self.join(other);
            return Err(Error::NonUnitDivision {
                divisor: other.residue.to_string(),
                p,
                precision,
            });
        }
        Ok(self * &other.inverse()?)
    }

    /// `x (x-1) ... (x-k+1)`.
    pub fn falling_factorial(&self, k: u64) -> Self {
        let m = self.modulus();
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = (acc * (&self.residue - i)).mod_floor(&m);
            if acc.is_zero() {
                break;
            }
        }
        Self { residue: acc, ..self.clone() }
    }

    /// `binom(x, k)`, available only when `k!` is a unit.
    pub fn binomial(&self, k: u64) -> Result<Self> {
        let kf = self.context().int(exact::factorial(k));
        self.falling_factorial(k).div(&kf)
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.residue.to_i64()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&PadicInt> for &PadicInt {
            type Output = PadicInt;
            fn $method(self, rhs: &PadicInt) -> PadicInt {
                let (p, precision) = self.join(rhs);
                PadicInt::new(p, precision, &self.residue $op &rhs.residue)
            }
        }
        impl $trait<PadicInt> for PadicInt {
            type Output = PadicInt;
            fn $method(self, rhs: PadicInt) -> PadicInt {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&PadicInt> for PadicInt {
            type Output = PadicInt;
            fn $method(self, rhs: &PadicInt) -> PadicInt {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        PadicInt::new(self.p, self.precision, -&self.residue)
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        -&self
    }
}

/// Valuation an argument of `exp_p` must reach: 1 for odd `p`, 2 for `p = 2`.
fn exp_disk_valuation(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// `exp_p(x) = sum x^k / k!` on `v_p(x) >= 1` (`>= 2` when `p = 2`).
///
/// Terms with `k > K` are dropped, where `K` is the last index at which the
/// Legendre lower bound `k v - (k-1)/(p-1) <= v_p(x^k/k!)` is still below `N`.
pub fn exp_p(x: &PadicInt) -> Result<PadicInt> {
    let ctx = x.context();
    let v = match x.valuation() {
        Valuation::AtLeast(_) => return Ok(ctx.one()),
        Valuation::Exact(v) => v,
    };
    let need = exp_disk_valuation(x.p);
    if v < need {
        return Err(Error::Domain(format!(
            "exp_{} needs valuation >= {need}, got {v}",
            x.p
        )));
    }
    let (p, n) = (x.p, x.precision);
    let last = exp_truncation(p, v, n);
    let guard = exact::vp_factorial(last, p) as u32;
    let working = pow_u(p, n + guard);
    let target = x.modulus();

    // x^k / p^{v_p(k!)} for each k, then Σ num_k / u_k with u_k the unit part
    // of k!, using u_K / u_k = Π_{k<j<=K} unit(j) and a single inverse of u_K.
    let unit = |mut j: u64| {
        while j % p == 0 {
            j /= p;
        }
        j
    };
    let mut nums = Vec::with_capacity(last as usize + 1);
    let mut power = BigInt::one();
    for k in 0..=last {
        if k > 0 {
            power = (power * &x.residue).mod_floor(&working);
        }
        nums.push(&power / pow_u(p, exact::vp_factorial(k, p) as u32));
    }
    let mut sum = BigInt::zero();
    let mut suffix = BigInt::one();
    for k in (0..=last).rev() {
        sum += &nums[k as usize] * &suffix;
        if k > 0 {
            suffix = (suffix * unit(k)).mod_floor(&target);
        }
    }
    let inv = exact::mod_inverse(&suffix, &target).expect("unit");
    Ok(PadicInt::new(p, n, sum * inv))
}

/// Largest index still needed by `exp_p` at valuation `v` and precision `n`.
pub fn exp_truncation(p: u64, v: u32, n: u32) -> u64 {
    // k v - (k-1)/(p-1) >= n  <=>  k (v (p-1) - 1) >= n (p-1) - 1
    let slope = v as u64 * (p - 1) - 1;
    let rhs = n as u64 * (p - 1);
    let mut k = 1u64;
    while k * slope + 1 < rhs {
        k += 1;
    }
    k - 1
}

/// `log_p(u) = sum (-1)^{k+1} (u-1)^k / k` on `u = 1 mod p` (`mod 4` for `p = 2`).
///
/// Terms are dropped once `k v - floor(log_p k)`, a nondecreasing lower bound
/// on their valuation, reaches `N`.
pub fn log_p(u: &PadicInt) -> Result<PadicInt> {
    let ctx = u.context();
    let w = u - &ctx.one();
    let v = match w.valuation() {
        Valuation::AtLeast(_) => return Ok(ctx.zero()),
        Valuation::Exact(v) => v,
    };
    let need = exp_disk_valuation(u.p);
    if v < need {
        return Err(Error::Domain(format!(
            "log_{} needs u = 1 mod {}, got u = {}",
            u.p,
            pow_u(u.p, need),
            u.residue
        )));
    }
    let (p, n) = (u.p, u.precision);
    let last = log_truncation(p, v, n);
    let guard = exact::floor_log(last.max(1), p) as u32;
    let working = pow_u(p, n + guard);
    let target = u.modulus();

    let mut sum = BigInt::zero();
    let mut power = BigInt::one();
    for k in 1..=last {
        power = (power * &w.residue).mod_floor(&working);
        let mut unit = k;
        let mut shift = 0;
        while unit % p == 0 {
            unit /= p;
            shift += 1;
        }
        let num = &power / pow_u(p, shift);
        let inv = exact::mod_inverse(&BigInt::from(unit), &target).expect("unit");
        let term = num * inv;
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(PadicInt::new(p, n, sum))
}

/// Largest index still needed by `log_p` at valuation `v` and precision `n`.
pub fn log_truncation(p: u64, v: u32, n: u32) -> u64 {
    let mut k = 1u64;
    while (k * v as u64) < n as u64 + exact::floor_log(k, p) {
        k += 1;
    }
    k - 1
}

/// `r^y = exp_p(y log_p r)` for `r = 1 mod p` and any `y` in `Z_p`.
pub fn pow_interpolated(r: &PadicInt, y: &PadicInt) -> Result<PadicInt> {
    let log_r = log_p(r)?;
    exp_p(&(y * &log_r))
}
