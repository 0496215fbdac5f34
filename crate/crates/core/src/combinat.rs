//! Brute-force counts that serve as ground truth: colored permutations in the
//! wreath products `C_r ≀ S_n`, permutations with restricted cycle lengths, and
//! a certified check of the floor formula for `a(n, r)`.
//!
//! `a(n, r) = Σ_k C(n,k) k! r^k`. For a positive integer `r` it counts the
//! `r`-cyclic arrangements of degree `n`, and `(-1)^n a(n, -r)` counts the
//! `r`-cyclic derangements.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{self, rat, rat_int, Rational, RationalInterval};
use crate::mvalues::EGFPrefix;

/// Largest number of group elements a brute-force count may visit.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// `a(n, r) = Σ_{k<=n} C(n,k) k! r^k`.
pub fn a_closed(n: u64, r: &Rational) -> Rational {
    let mut sum = Rational::zero();
    // C(n,k) k! = n!/(n-k)!
    let mut coeff = BigInt::one();
    let mut rk = Rational::one();
    for k in 0..=n {
        if k > 0 {
            coeff *= n - k + 1;
            rk *= r;
        }
        sum += &rk * rat_int(coeff.clone());
    }
    sum
}

/// Integer version of [`a_closed`].
pub fn a_closed_int(n: u64, r: i64) -> BigInt {
    a_closed(n, &rat(r, 1)).to_integer()
}

/// Permutations of `{0, ..., n-1}` in lexicographic order; the position in
/// the stream is the lexicographic rank.
#[derive(Debug, Clone)]
pub struct Permutations {
    next: Option<Vec<usize>>,
}

pub fn permutations(n: usize) -> Permutations {
    Permutations {
        next: Some((0..n).collect()),
    }
}

impl Iterator for Permutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let n = succ.len();
        if n > 1 {
            if let Some(i) = (0..n - 1).rev().find(|&i| succ[i] < succ[i + 1]) {
                let j = (i + 1..n).rev().find(|&j| succ[j] > succ[i]).expect("exists");
                succ.swap(i, j);
                succ[i + 1..].reverse();
                self.next = Some(succ);
            }
        }
        Some(cur)
    }
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &x in perm {
        if x >= perm.len() || seen[x] {
            return Err(Error::MalformedPermutation(format!("{perm:?}")));
        }
        seen[x] = true;
    }
    Ok(())
}

/// Cycle lengths of a permutation of `{0, ..., n-1}`, sorted ascending.
pub fn cycle_type(perm: &[usize]) -> Result<Vec<usize>> {
    check_permutation(perm)?;
    Ok(cycle_type_unchecked(perm))
}

fn cycle_type_unchecked(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable();
    out
}

/// An element `(f, σ)` of `C_r ≀ S_n`: a coloring `f: [n] -> Z/r` and a
/// permutation `σ`, both indexed from 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WreathElement {
    r: u32,
    colors: Vec<u32>,
    perm: Vec<usize>,
}

impl WreathElement {
    pub fn new(r: u32, colors: Vec<u32>, perm: Vec<usize>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("r must be positive".into()));
        }
        if colors.len() != perm.len() {
            return Err(Error::InvalidArgument("colors and permutation differ in length".into()));
        }
        if let Some(c) = colors.iter().find(|&&c| c >= r) {
            return Err(Error::InvalidArgument(format!("color {c} is not below r = {r}")));
        }
        check_permutation(&perm)?;
        Ok(Self { r, colors, perm })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn degree(&self) -> usize {
        self.perm.len()
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// `(f, σ)(s, m) = (s + f(σ(m)), σ(m))`.
    pub fn act(&self, s: u32, m: usize) -> (u32, usize) {
        let target = self.perm[m];
        ((s + self.colors[target]) % self.r, target)
    }

    /// Whether the action on `C_r × [n]` fixes some point, checked point by point.
    pub fn has_fixed_point(&self) -> bool {
        (0..self.degree()).any(|m| (0..self.r).any(|s| self.act(s, m) == (s, m)))
    }

    /// Same answer as [`has_fixed_point`](Self::has_fixed_point): some `m` has
    /// `σ(m) = m` and `f(m) = 0`.
    pub fn has_fixed_point_fast(&self) -> bool {
        fixed_point_fast(&self.colors, &self.perm)
    }
}

fn fixed_point_fast(colors: &[u32], perm: &[usize]) -> bool {
    perm.iter().enumerate().any(|(m, &t)| t == m && colors[m] == 0)
}

impl Serialize for WreathElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("WreathElement", 2)?;
        st.serialize_field("colors", &self.colors)?;
        let one_based: Vec<usize> = self.perm.iter().map(|x| x + 1).collect();
        st.serialize_field("perm", &one_based)?;
        st.end()
    }
}

/// `|C_r ≀ S_n| = r^n n!`.
pub fn wreath_order(n: u64, r: u64) -> BigInt {
    BigInt::from(r).pow(n as u32) * exact::factorial(n)
}

fn check_budget(needed: &BigInt, budget: u64) -> Result<()> {
    if *needed > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: needed.to_string(),
            budget,
        });
    }
    Ok(())
}

/// Decodes the `idx`-th coloring in lexicographic order.
fn coloring(idx: u64, n: usize, r: u32) -> Vec<u32> {
    let mut c = vec![0; n];
    let mut x = idx;
    for slot in c.iter_mut().rev() {
        *slot = (x % r as u64) as u32;
        x /= r as u64;
    }
    c
}

/// All of `C_r ≀ S_n`, ordered lexicographically by coloring, then by
/// permutation rank.
pub struct WreathElements {
    n: usize,
    r: u32,
    color_idx: u64,
    color_count: u64,
    colors: Vec<u32>,
    perms: Permutations,
}

pub fn wreath_elements(n: usize, r: u32, budget: u64) -> Result<WreathElements> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    check_budget(&wreath_order(n as u64, r as u64), budget)?;
    Ok(WreathElements {
        n,
        r,
        color_idx: 0,
        color_count: (r as u64).pow(n as u32),
        colors: coloring(0, n, r),
        perms: permutations(n),
    })
}

impl Iterator for WreathElements {
    type Item = WreathElement;

    fn next(&mut self) -> Option<WreathElement> {
        loop {
            if self.color_idx >= self.color_count {
                return None;
            }
            if let Some(perm) = self.perms.next() {
                return Some(WreathElement {
                    r: self.r,
                    colors: self.colors.clone(),
                    perm,
                });
            }
            self.color_idx += 1;
            self.colors = coloring(self.color_idx, self.n, self.r);
            self.perms = permutations(self.n);
        }
    }
}

/// Fixed-point-free elements of `C_r ≀ S_n`, in the order of [`wreath_elements`].
pub fn wreath_derangements(n: usize, r: u32, budget: u64) -> Result<impl Iterator<Item = WreathElement>> {
    Ok(wreath_elements(n, r, budget)?.filter(|g| !g.has_fixed_point()))
}

/// Number of `r`-cyclic derangements of degree `n`, by enumerating
/// `C_r ≀ S_n`.
pub fn count_wreath_derangements(n: usize, r: u32) -> Result<u64> {
    count_wreath_derangements_with_budget(n, r, DEFAULT_BUDGET)
}

pub fn count_wreath_derangements_with_budget(n: usize, r: u32, budget: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    check_budget(&wreath_order(n as u64, r as u64), budget)?;
    let perms: Vec<Vec<usize>> = permutations(n).collect();
    let colorings = (r as u64).pow(n as u32);
    Ok((0..colorings)
        .into_par_iter()
        .map(|idx| {
            let colors = coloring(idx, n, r);
            perms.iter().filter(|p| !fixed_point_fast(&colors, p)).count() as u64
        })
        .sum())
}

/// An `r`-cyclic arrangement: a subset `A ⊂ [n]` (ascending, 0-based) with an
/// element of `C_r ≀ S_{|A|}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrangement {
    pub subset: Vec<usize>,
    pub element: WreathElement,
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

/// All `r`-cyclic arrangements of degree `n`, subsets in bitmask order.
pub fn wreath_arrangements(n: usize, r: u32, budget: u64) -> Result<impl Iterator<Item = Arrangement>> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    check_budget(&a_closed(n as u64, &rat(r as i64, 1)).to_integer(), budget)?;
    Ok(subsets(n).flat_map(move |subset| {
        let k = subset.len();
        wreath_elements(k, r, u64::MAX)
            .expect("checked")
            .map(move |element| Arrangement {
                subset: subset.clone(),
                element,
            })
    }))
}

/// Number of `r`-cyclic arrangements of degree `n`, by enumerating each
/// subset and each element of the wreath product on it.
pub fn count_wreath_arrangements(n: usize, r: u32) -> Result<u64> {
    count_wreath_arrangements_with_budget(n, r, DEFAULT_BUDGET)
}

pub fn count_wreath_arrangements_with_budget(n: usize, r: u32, budget: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    if n >= 64 {
        return Err(Error::BudgetExceeded {
            needed: format!("2^{n} subsets"),
            budget,
        });
    }
    check_budget(&a_closed(n as u64, &rat(r as i64, 1)).to_integer(), budget)?;
    let masks: Vec<u64> = (0u64..1 << n).collect();
    Ok(masks
        .par_iter()
        .map(|mask| {
            let k = mask.count_ones() as usize;
            wreath_elements(k, r, u64::MAX).expect("checked").count() as u64
        })
        .sum())
}

/// Membership test shape of a [`CycleLengthSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetKind {
    Explicit(BTreeSet<u64>),
    Squares,
    Primes,
    /// `{1, ℓ, ℓ², ...}`
    Powers(u64),
    /// `{ℓ, ℓ², ...}`
    ProperPowers(u64),
    All,
    Empty,
    Complement(Box<SetKind>),
}

impl SetKind {
    fn contains(&self, k: u64) -> bool {
        match self {
            SetKind::Explicit(s) => s.contains(&k),
            SetKind::Squares => {
                let r = k.isqrt();
                r * r == k
            }
            SetKind::Primes => exact::is_prime(k),
            SetKind::Powers(l) | SetKind::ProperPowers(l) => {
                if matches!(self, SetKind::ProperPowers(_)) && k == 1 {
                    return false;
                }
                let mut k = k;
                while k % l == 0 {
                    k /= l;
                }
                k == 1
            }
            SetKind::All => true,
            SetKind::Empty => false,
            SetKind::Complement(inner) => !inner.contains(k),
        }
    }

    fn label(&self) -> String {
        let list = |s: &BTreeSet<u64>| s.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self {
            SetKind::Explicit(s) => format!("explicit:{}", list(s)),
            SetKind::Squares => "squares".into(),
            SetKind::Primes => "primes".into(),
            SetKind::Powers(l) => format!("powers:{l}"),
            SetKind::ProperPowers(l) => format!("proper-powers:{l}"),
            SetKind::All => "all".into(),
            SetKind::Empty => "none".into(),
            SetKind::Complement(inner) => match inner.as_ref() {
                SetKind::Squares => "non-squares".into(),
                SetKind::Primes => "non-primes".into(),
                SetKind::Powers(l) => format!("complement-powers:{l}"),
                SetKind::ProperPowers(l) => format!("complement-proper-powers:{l}"),
                SetKind::Explicit(s) => format!("complement-explicit:{}", list(s)),
                other => format!("complement({})", other.label()),
            },
        }
    }
}

/// A set `L` of allowed cycle lengths. Membership may be asked only for
/// `1 <= k <= bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleLengthSet {
    kind: SetKind,
    bound: u64,
}

impl fmt::Display for CycleLengthSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.kind.label())
    }
}

impl CycleLengthSet {
    pub fn new(kind: SetKind, bound: u64) -> Self {
        Self { kind, bound }
    }

    pub fn squares(bound: u64) -> Self {
        Self::new(SetKind::Squares, bound)
    }

    pub fn primes(bound: u64) -> Self {
        Self::new(SetKind::Primes, bound)
    }

    pub fn powers(ell: u64, bound: u64) -> Self {
        Self::new(SetKind::Powers(ell), bound)
    }

    pub fn all(bound: u64) -> Self {
        Self::new(SetKind::All, bound)
    }

    pub fn empty(bound: u64) -> Self {
        Self::new(SetKind::Empty, bound)
    }

    pub fn explicit(elems: impl IntoIterator<Item = u64>, bound: u64) -> Self {
        Self::new(SetKind::Explicit(elems.into_iter().collect()), bound)
    }

    pub fn complement(self) -> Self {
        Self {
            kind: SetKind::Complement(Box::new(self.kind)),
            bound: self.bound,
        }
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn label(&self) -> String {
        self.kind.label()
    }

    pub fn with_bound(mut self, bound: u64) -> Self {
        self.bound = bound;
        self
    }

    pub fn contains(&self, k: u64) -> Result<bool> {
        if k == 0 {
            return Err(Error::InvalidArgument("cycle lengths are positive".into()));
        }
        if k > self.bound {
            return Err(Error::MembershipBound {
                k,
                bound: self.bound,
                label: self.label(),
            });
        }
        Ok(self.kind.contains(k))
    }

    /// Membership of `1..=last` as a table indexed by length (index 0 unused).
    pub fn table(&self, last: usize) -> Result<Vec<bool>> {
        let mut t = vec![false; last + 1];
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            *slot = self.contains(k as u64)?;
        }
        Ok(t)
    }

    /// Parses a preset: `squares`, `non-squares`, `primes`, `non-primes`,
    /// `powers:ℓ`, `proper-powers:ℓ`, `complement-powers:ℓ`, `all`, `none`,
    /// `explicit:a,b,...`, `complement-explicit:a,b,...`.
    pub fn parse(spec: &str, bound: u64) -> Result<Self> {
        let spec = spec.trim();
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        let prime_arg = || -> Result<u64> {
            let a = arg.ok_or_else(|| Error::Parse(format!("{head} needs a prime, as in {head}:3")))?;
            let l: u64 = a
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime {a:?}")))?;
            exact::require_prime(l)?;
            Ok(l)
        };
        let list_arg = || -> Result<BTreeSet<u64>> {
            let a = arg.unwrap_or("");
            a.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    let k: u64 = t
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad cycle length {t:?}")))?;
                    if k == 0 {
                        return Err(Error::Parse("cycle lengths are positive".into()));
                    }
                    Ok(k)
                })
                .collect()
        };
        let no_arg = |kind: SetKind| -> Result<SetKind> {
            match arg {
                None => Ok(kind),
                Some(_) => Err(Error::Parse(format!("{head} takes no argument"))),
            }
        };
        let kind = match head {
            "squares" => no_arg(SetKind::Squares)?,
            "non-squares" => no_arg(SetKind::Complement(Box::new(SetKind::Squares)))?,
            "primes" => no_arg(SetKind::Primes)?,
            "non-primes" => no_arg(SetKind::Complement(Box::new(SetKind::Primes)))?,
            "powers" => SetKind::Powers(prime_arg()?),
            "proper-powers" => SetKind::ProperPowers(prime_arg()?),
            "complement-powers" => SetKind::Complement(Box::new(SetKind::Powers(prime_arg()?))),
            "complement-proper-powers" => {
                SetKind::Complement(Box::new(SetKind::ProperPowers(prime_arg()?)))
            }
            "all" => no_arg(SetKind::All)?,
            "none" => no_arg(SetKind::Empty)?,
            "explicit" => SetKind::Explicit(list_arg()?),
            "complement-explicit" => SetKind::Complement(Box::new(SetKind::Explicit(list_arg()?))),
            _ => return Err(Error::Parse(format!("unknown cycle-length set {spec:?}"))),
        };
        Ok(Self::new(kind, bound))
    }
}

/// `d_n^L`: permutations of `[n]` whose cycle lengths all lie in `L`, by
/// iterating over `S_n`.
pub fn count_cycle_restricted(set: &CycleLengthSet, n: usize) -> Result<BigInt> {
    count_cycle_restricted_with_budget(set, n, DEFAULT_BUDGET)
}

pub fn count_cycle_restricted_with_budget(set: &CycleLengthSet, n: usize, budget: u64) -> Result<BigInt> {
    check_budget(&exact::factorial(n as u64), budget)?;
    let allowed = set.table(n)?;
    let count = permutations(n)
        .filter(|p| cycle_type_unchecked(p).iter().all(|&c| allowed[c]))
        .count();
    Ok(BigInt::from(count))
}

/// `d_0^L, ..., d_K^L` from the product of `exp(X^r / r)` over `r ∈ L`.
pub fn egf_cycle_restricted(set: &CycleLengthSet, last: usize) -> Result<EGFPrefix> {
    let allowed = set.table(last)?;
    let mut series = vec![Rational::zero(); last + 1];
    series[0] = Rational::one();
    for r in (1..=last).filter(|&r| allowed[r]) {
        // exp(X^r / r) = Σ_j X^{rj} / (r^j j!)
        let factor: Vec<(usize, Rational)> = (0..=last / r)
            .map(|j| {
                let denom = BigInt::from(r).pow(j as u32) * exact::factorial(j as u64);
                (r * j, Rational::new(BigInt::one(), denom))
            })
            .collect();
        let mut next = vec![Rational::zero(); last + 1];
        for (i, a) in series.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (d, c) in factor.iter().take_while(|(d, _)| i + d <= last) {
                next[i + d] += a * c;
            }
        }
        series = next;
    }
    Ok(EGFPrefix::new(
        series
            .into_iter()
            .enumerate()
            .map(|(n, c)| c * rat_int(exact::factorial(n as u64)))
            .collect(),
    ))
}

/// Evidence for one instance of the floor formula
/// `a(n,r) = floor(e^{1/r} r^n n! + 1/2)` for `r < 0`,
/// `a(n,r) = floor(e^{1/r} r^n n!)` for `r > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FloorCertificate {
    pub n: u64,
    pub r: i64,
    /// Encloses `e^{1/r} r^n n!`, plus `1/2` when `r < 0`.
    pub interval: RationalInterval,
    /// Terms of the exponential series used for the enclosure.
    pub terms: usize,
    #[serde(serialize_with = "ser_display")]
    pub floor: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub a: BigInt,
    pub holds: bool,
}

fn ser_display<S: Serializer, T: fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub const FLOOR_MAX_REFINEMENTS: u32 = 12;

/// Certifies the floor of `e^{1/r} r^n n!` (shifted by `1/2` when `r < 0`)
/// with a rational enclosure, doubling the number of series terms until the
/// enclosure has a single floor, and compares it with `a(n, r)`.
pub fn verify_floor_formula(n: u64, r: i64) -> Result<FloorCertificate> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be nonzero".into()));
    }
    let scale = rat_int(BigInt::from(r).pow(n as u32) * exact::factorial(n));
    let shift = if r < 0 { rat(1, 2) } else { Rational::zero() };
    let a = a_closed_int(n, r);
    let mut terms = 8usize;
    for _ in 0..=FLOOR_MAX_REFINEMENTS {
        let interval = exact::exp_reciprocal_interval(r, terms)?.scale(&scale).shift(&shift);
        if let Some(floor) = interval.floor() {
            let holds = floor == a;
            return Ok(FloorCertificate {
                n,
                r,
                interval,
                terms,
                floor,
                a,
                holds,
            });
        }
        terms *= 2;
    }
    Err(Error::EnclosureFailure {
        n,
        r,
        attempts: FLOOR_MAX_REFINEMENTS + 1,
    })
}

/// Signed count `(-1)^n` times `x`.
pub fn signed(n: usize, x: BigInt) -> BigInt {
    if n % 2 == 0 {
        x
    } else {
        -x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::mvalues::m_from_f;
    use crate::mahler::SequencePrefix;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    #[test]
    fn closed_form_examples() {
        assert_eq!(a_closed(2, &rat(-2, 1)), rat(5, 1));
        assert_eq!(a_closed(1, &rat(2, 1)), rat(3, 1));
        assert_eq!(a_closed(3, &rat(-1, 1)), rat(-2, 1));
        assert_eq!(a_closed(0, &rat(7, 3)), rat(1, 1));
        assert_eq!(a_closed(2, &rat(1, 2)), rat(5, 2));
    }

    #[test]
    fn permutations_are_lexicographic() {
        let all: Vec<Vec<usize>> = permutations(3).collect();
        assert_eq!(all, vec![
            vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2],
            vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0],
        ]);
        assert_eq!(permutations(0).count(), 1);
        assert_eq!(permutations(6).count(), 720);
    }

    #[test]
    fn cycle_type_examples() {
        assert_eq!(cycle_type(&[0, 1, 2, 3]).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(cycle_type(&[1, 2, 3, 0]).unwrap(), vec![4]);
        assert_eq!(cycle_type(&[1, 0, 3, 4, 2]).unwrap(), vec![2, 3]);
        assert!(matches!(cycle_type(&[0, 0]), Err(Error::MalformedPermutation(_))));
        assert!(matches!(cycle_type(&[2, 0]), Err(Error::MalformedPermutation(_))));
    }

    #[test]
    fn literal_action_matches_fixed_point_rule() {
        for n in 0..=4 {
            for r in 1..=3 {
                for g in wreath_elements(n, r, DEFAULT_BUDGET).unwrap() {
                    assert_eq!(g.has_fixed_point(), g.has_fixed_point_fast(), "{g:?}");
                }
            }
        }
    }

    #[test]
    fn wreath_element_validation() {
        assert!(WreathElement::new(2, vec![0, 2], vec![1, 0]).is_err());
        assert!(WreathElement::new(2, vec![0], vec![1, 0]).is_err());
        assert!(WreathElement::new(2, vec![0, 1], vec![1, 1]).is_err());
        let g = WreathElement::new(3, vec![2, 1], vec![1, 0]).unwrap();
        assert_eq!(g.act(2, 0), (0, 1));
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"colors":[2,1],"perm":[2,1]}"#);
    }

    #[test]
    fn derangement_examples() {
        assert_eq!(count_wreath_derangements(2, 2).unwrap(), 5);
        assert_eq!(count_wreath_derangements(3, 2).unwrap(), 29);
        let classical: Vec<u64> = (1..=5).map(|n| count_wreath_derangements(n, 1).unwrap()).collect();
        assert_eq!(classical, [0, 1, 2, 9, 44]);
        assert_eq!(wreath_derangements(3, 2, DEFAULT_BUDGET).unwrap().count(), 29);
    }

    #[test]
    fn arrangement_examples() {
        assert_eq!(count_wreath_arrangements(1, 2).unwrap(), 3);
        assert_eq!(count_wreath_arrangements(3, 1).unwrap(), 16);
        assert_eq!(count_wreath_arrangements(0, 5).unwrap(), 1);
        assert_eq!(wreath_arrangements(2, 2, DEFAULT_BUDGET).unwrap().count(), 1 + 2 * 2 + 8);
    }

    #[test]
    fn counts_match_closed_form() {
        for n in 0..=5usize {
            for r in 1..=3u32 {
                let d = count_wreath_derangements(n, r).unwrap();
                assert_eq!(int(d as i64), signed(n, a_closed_int(n as u64, -(r as i64))));
                let a = count_wreath_arrangements(n, r).unwrap();
                assert_eq!(int(a as i64), a_closed_int(n as u64, r as i64));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            count_wreath_derangements_with_budget(5, 3, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            count_cycle_restricted_with_budget(&CycleLengthSet::all(20), 9, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn stream_order() {
        let first: Vec<WreathElement> = wreath_elements(2, 2, DEFAULT_BUDGET).unwrap().take(3).collect();
        assert_eq!(first[0].colors(), &[0, 0]);
        assert_eq!(first[1].perm(), &[1, 0]);
        assert_eq!(first[2].colors(), &[0, 1]);
    }

    #[test]
    fn set_membership_and_bounds() {
        let sq = CycleLengthSet::squares(50);
        assert!(sq.contains(49).unwrap());
        assert!(!sq.contains(48).unwrap());
        assert!(matches!(sq.contains(51), Err(Error::MembershipBound { .. })));
        assert!(sq.contains(0).is_err());
        let p3 = CycleLengthSet::powers(3, 100);
        assert_eq!((1..=27).filter(|&k| p3.contains(k).unwrap()).collect::<Vec<_>>(), [1, 3, 9, 27]);
        let pp = CycleLengthSet::parse("proper-powers:3", 100).unwrap();
        assert!(!pp.contains(1).unwrap());
        assert!(pp.contains(9).unwrap());
    }

    #[test]
    fn set_parsing() {
        for s in [
            "squares", "non-squares", "primes", "non-primes", "powers:3",
            "proper-powers:2", "complement-powers:3", "all", "none", "explicit:1,4",
            "complement-explicit:1",
        ] {
            assert_eq!(CycleLengthSet::parse(s, 10).unwrap().label(), s);
        }
        assert!(CycleLengthSet::parse("powers:4", 10).is_err());
        assert!(CycleLengthSet::parse("powers", 10).is_err());
        assert!(CycleLengthSet::parse("squares:2", 10).is_err());
        assert!(CycleLengthSet::parse("explicit:0", 10).is_err());
        assert!(CycleLengthSet::parse("cubes", 10).is_err());
        assert!(!CycleLengthSet::parse("explicit:", 10).unwrap().contains(1).unwrap());
    }

    #[test]
    fn cycle_restricted_examples() {
        assert_eq!(count_cycle_restricted(&CycleLengthSet::squares(10), 4).unwrap(), int(7));
        assert_eq!(count_cycle_restricted(&CycleLengthSet::powers(3, 10), 5).unwrap(), int(21));
        assert_eq!(count_cycle_restricted(&CycleLengthSet::empty(10), 0).unwrap(), int(1));
        for n in 1..=5 {
            assert_eq!(count_cycle_restricted(&CycleLengthSet::empty(10), n).unwrap(), int(0));
        }
        assert!(count_cycle_restricted(&CycleLengthSet::squares(3), 4).is_err());
    }

    #[test]
    fn egf_examples() {
        let all = egf_cycle_restricted(&CycleLengthSet::all(5), 5).unwrap();
        assert_eq!(all.coeffs(), [1, 1, 2, 6, 24, 120].map(|x| rat(x, 1)).as_slice());
        let primes = egf_cycle_restricted(&CycleLengthSet::primes(9), 9).unwrap();
        let signed_primes: Vec<BigInt> = primes
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| signed(n, c.to_integer()))
            .collect();
        assert_eq!(signed_primes, [1, 0, 1, -2, 3, -44, 55, -1434, 3913, -39752].map(int));
        let der = egf_cycle_restricted(&CycleLengthSet::explicit([1], 9).complement(), 9).unwrap();
        let d: Vec<BigInt> = der.coeffs().iter().map(|c| c.to_integer()).collect();
        assert_eq!(d, [1, 0, 1, 2, 9, 44, 265, 1854, 14833, 133496].map(int));
    }

    #[test]
    fn egf_matches_brute_force() {
        let sets = [
            CycleLengthSet::squares(8),
            CycleLengthSet::primes(8),
            CycleLengthSet::powers(3, 8),
            CycleLengthSet::explicit([1], 8).complement(),
            CycleLengthSet::empty(8),
            CycleLengthSet::all(8),
        ];
        for set in &sets {
            let egf = egf_cycle_restricted(set, 8).unwrap();
            for n in 0..=7 {
                assert_eq!(rat_int(count_cycle_restricted(set, n).unwrap()), egf.coeffs()[n], "{set} n={n}");
            }
        }
    }

    #[test]
    fn m_values_of_twisted_counts() {
        let sets = [
            CycleLengthSet::squares(10),
            CycleLengthSet::primes(10),
            CycleLengthSet::powers(2, 10).complement(),
        ];
        for set in &sets {
            for alpha in [-2i64, -1, 1, 3] {
                let egf = egf_cycle_restricted(set, 10).unwrap();
                let f = SequencePrefix::from_fn(10, |n| {
                    &egf.coeffs()[n] * rat_int(int(alpha).pow(n as u32))
                });
                let m = m_from_f(&f).unwrap();
                for k in 1..=10usize {
                    let expected = if set.contains(k as u64).unwrap() {
                        rat_int(int(alpha).pow(k as u32))
                    } else {
                        Rational::zero()
                    };
                    assert_eq!(m.get(k).unwrap(), &expected, "{set} alpha={alpha} k={k}");
                }
            }
        }
    }

    #[test]
    fn floor_examples() {
        let c = verify_floor_formula(3, 1).unwrap();
        assert!(c.holds);
        assert_eq!(c.floor, int(16));
        let c = verify_floor_formula(3, -1).unwrap();
        assert!(c.holds);
        assert_eq!(c.floor, int(-2));
        assert!(c.interval.contains(&rat(-1707, 1000)));
        assert_eq!(verify_floor_formula(1, 1).unwrap().floor, int(2));
        assert!(verify_floor_formula(3, 0).is_err());
    }

    #[test]
    fn floor_formula_at_degree_zero() {
        // floor(e) = 2 and floor(1/e + 1/2) = 0, while a(0, r) = 1.
        assert!(!verify_floor_formula(0, 1).unwrap().holds);
        assert!(!verify_floor_formula(0, -1).unwrap().holds);
        for r in [-5i64, -2, 2, 7] {
            assert!(verify_floor_formula(0, r).unwrap().holds, "r={r}");
        }
    }

    #[test]
    fn floor_formula_grid() {
        for n in 1..=12u64 {
            for r in (-6i64..=6).filter(|&r| r != 0) {
                let c = verify_floor_formula(n, r).unwrap();
                assert!(c.holds, "n={n} r={r}");
                assert!(c.interval.width() < rat(1, 1));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn arrangements_sum_over_subsets(n in 0usize..5, r in 1u32..4) {
            let by_size: u64 = (0..=n)
                .map(|k| {
                    let c = exact::binomial_int(&int(n as i64), k as u64);
                    (c * wreath_order(k as u64, r as u64)).to_u64().unwrap()
                })
                .sum();
            prop_assert_eq!(count_wreath_arrangements(n, r).unwrap(), by_size);
        }

        #[test]
        fn closed_form_recurrence(n in 1u64..30, num in -20i64..20, den in 1i64..9) {
            // a(n, r) = 1 + n r a(n-1, r)
            let r = rat(num, den);
            prop_assert_eq!(a_closed(n, &r), rat(1, 1) + rat_int(n) * &r * a_closed(n - 1, &r));
        }
    }
}
