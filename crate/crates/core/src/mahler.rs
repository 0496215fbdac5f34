//! Finite differences at zero, Mahler series, and prefix diagnostics for the
//! regularity of `f: N -> Q_p`.
//!
//! A prefix `f(0..=K)` cannot decide a limit, so every regularity verdict here
//! is a diagnostic. Reports always carry the exact statistic that produced it.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{self, rat_int, Rational};
use crate::padic::PadicInt;

/// Values `f(0), ..., f(K)` of a function on the natural numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequencePrefix {
    #[serde(with = "exact::serde_rational_vec")]
    values: Vec<Rational>,
}

impl SequencePrefix {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::PrefixTooShort { needed: 1, got: 0 });
        }
        Ok(Self { values })
    }

    pub fn from_integers<I, T>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::new(values.into_iter().map(rat_int).collect())
    }

    /// `f(0..=last)`.
    pub fn from_fn(last: usize, f: impl FnMut(usize) -> Rational) -> Self {
        Self {
            values: (0..=last).map(f).collect(),
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest index in the prefix.
    pub fn last_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> Result<&Rational> {
        self.values.get(n).ok_or(Error::Index {
            index: n,
            len: self.values.len(),
        })
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }
}

/// `Δ_n = Σ_k (-1)^{n-k} C(n,k) f(k)` for every `n` in the prefix.
pub fn finite_differences(f: &SequencePrefix) -> Vec<Rational> {
    let mut row = f.values.clone();
    let mut out = Vec::with_capacity(row.len());
    while let Some(first) = row.first() {
        out.push(first.clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

/// `f(n) = Σ_{k<=n} C(n,k) Δ_k`.
pub fn mahler_reconstruct(deltas: &[Rational], n: usize) -> Result<Rational> {
    if n >= deltas.len() {
        return Err(Error::Index {
            index: n,
            len: deltas.len(),
        });
    }
    let mut sum = Rational::zero();
    let mut binom = BigInt::one();
    for (k, d) in deltas.iter().enumerate().take(n + 1) {
        sum += d * rat_int(binom.clone());
        binom = binom * (n - k) / (k + 1);
    }
    Ok(sum)
}

/// A valuation-like quantity, possibly infinite.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtValue {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl ExtValue {
    pub fn int(n: i64) -> Self {
        ExtValue::Finite(rat_int(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtValue::Finite(q) => Some(q),
            _ => None,
        }
    }

    fn valuation(q: &Rational, p: u64) -> Self {
        match exact::vp_rational(q, p) {
            Ok(v) => ExtValue::int(v),
            Err(_) => ExtValue::PosInfinity,
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::NegInfinity => f.write_str("-inf"),
            ExtValue::PosInfinity => f.write_str("inf"),
            ExtValue::Finite(q) => write!(f, "{q}"),
        }
    }
}

impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// One regularity criterion evaluated on a prefix.
///
/// `values[i]` belongs to index `n = start + i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    pub start: usize,
    pub values: Vec<ExtValue>,
    pub summary: ExtValue,
    pub verdict: Verdict,
}

/// Prefix diagnostics for continuity, the metric-map inequality, analyticity
/// on the closed disk, and local analyticity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub p: u64,
    pub prefix_len: usize,
    /// `v_p(Δ_n)`; should tend to infinity.
    pub continuous: CriterionReport,
    /// `floor(log_p n) - v_p(Δ_n)`; summary is the max, must be `<= 0`.
    pub metric_map: CriterionReport,
    /// `v_p(Δ_n / n!)`; should tend to infinity.
    pub analytic: CriterionReport,
    /// `v_p(Δ_n) / n`; summary is the min over the last third, must be `> 0`.
    pub locally_analytic: CriterionReport,
}

pub const MIN_REGULARITY_PREFIX: usize = 8;

fn thirds(len: usize) -> usize {
    (len / 3).max(1)
}

/// Verdict for a sequence that should tend to `+inf`: compares the minimum
/// over the last third with the minimum over the first third.
fn trend_report(start: usize, values: Vec<ExtValue>) -> CriterionReport {
    let t = thirds(values.len());
    let early = values[..t].iter().min().cloned().expect("nonempty");
    let late = values[values.len() - t..].iter().min().cloned().expect("nonempty");
    let verdict = if late == ExtValue::PosInfinity {
        Verdict::Pass
    } else if early == ExtValue::PosInfinity {
        Verdict::Inconclusive
    } else if late > early {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    CriterionReport {
        start,
        values,
        summary: late,
        verdict,
    }
}

pub fn classify_regularity(f: &SequencePrefix, p: u64) -> Result<RegularityReport> {
    exact::require_prime(p)?;
    if f.len() < MIN_REGULARITY_PREFIX {
        return Err(Error::PrefixTooShort {
            needed: MIN_REGULARITY_PREFIX,
            got: f.len(),
        });
    }
    let deltas = finite_differences(f);
    let vals: Vec<ExtValue> = deltas[1..].iter().map(|d| ExtValue::valuation(d, p)).collect();

    let continuous = trend_report(1, vals.clone());

    let analytic_vals = deltas[1..]
        .iter()
        .enumerate()
        .map(|(i, d)| ExtValue::valuation(&(d / rat_int(exact::factorial(i as u64 + 1))), p))
        .collect();
    let analytic = trend_report(1, analytic_vals);

    let metric_vals: Vec<ExtValue> = vals
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            ExtValue::Finite(v) => {
                ExtValue::Finite(rat_int(exact::floor_log(i as u64 + 1, p)) - v)
            }
            _ => ExtValue::NegInfinity,
        })
        .collect();
    let sup = metric_vals.iter().max().cloned().expect("nonempty");
    let metric_map = CriterionReport {
        start: 1,
        verdict: if sup <= ExtValue::int(0) {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        summary: sup,
        values: metric_vals,
    };

    let ratio_vals: Vec<ExtValue> = vals
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            ExtValue::Finite(v) => ExtValue::Finite(v / rat_int(i as u64 + 1)),
            other => other.clone(),
        })
        .collect();
    let t = thirds(ratio_vals.len());
    let tail_min = ratio_vals[ratio_vals.len() - t..].iter().min().cloned().expect("nonempty");
    let locally_analytic = CriterionReport {
        start: 1,
        verdict: if tail_min.cmp(&ExtValue::int(0)) == Ordering::Greater {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        summary: tail_min,
        values: ratio_vals,
    };

    Ok(RegularityReport {
        p,
        prefix_len: f.len(),
        continuous,
        metric_map,
        analytic,
        locally_analytic,
    })
}

/// `Σ_k Δ_k C(y, k)` modulo `p^N`, where `N` is the precision of `y`.
///
/// `tail_bound(k)` must be a nondecreasing lower bound on the valuation of the
/// `k`th term. The sum stops at the least `K` with `tail_bound(K+1) >= N`.
///
/// A term with `Δ_k / k!` p-integral is computed as `(Δ_k / k!) y^{k̲}`, which
/// depends only on `y mod p^N`. Otherwise `C(y, k)` is evaluated exactly at
/// the representative of `y` in `[0, p^N)`.
pub fn mahler_eval(
    deltas: &[Rational],
    y: &PadicInt,
    tail_bound: impl Fn(usize) -> Rational,
) -> Result<PadicInt> {
    let ctx = y.context();
    let n = rat_int(y.precision());
    let last = (0..deltas.len())
        .find(|&k| tail_bound(k + 1) >= n)
        .ok_or(Error::UnsoundTruncation {
            precision: y.precision(),
            len: deltas.len(),
        })?;
    let p = y.p();
    let mut sum = ctx.zero();
    for (k, d) in deltas.iter().enumerate().take(last + 1) {
        if d.is_zero() {
            continue;
        }
        let k = k as u64;
        let scaled = d / rat_int(exact::factorial(k));
        let term = if exact::is_p_integral(&scaled, p) {
            ctx.from_rational(&scaled)? * y.falling_factorial(k)
        } else {
            let b = exact::binomial_int(y.residue(), k);
            ctx.from_rational(&(d * rat_int(b)))?
        };
        sum = sum + term;
    }
    Ok(sum)
}

/// Mahler coefficients of `n -> a(n, r) = Σ C(n,k) k! r^k`, i.e. `r^k k!`.
pub fn gs_deltas(r: &Rational, last: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(last + 1);
    let mut term = Rational::one();
    for k in 0..=last {
        if k > 0 {
            term = term * r * rat_int(k as u64);
        }
        out.push(term.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::padic::PadicContext;
    use proptest::prelude::*;

    fn a_direct(n: u64, r: i64) -> BigInt {
        (0..=n)
            .map(|k| exact::binomial_int(&int(n as i64), k) * exact::factorial(k) * int(r).pow(k as u32))
            .sum()
    }

    #[test]
    fn differences_of_simple_sequences() {
        let ones = SequencePrefix::from_integers(vec![1; 6]).unwrap();
        assert_eq!(finite_differences(&ones), [1, 0, 0, 0, 0, 0].map(|x| rat(x, 1)));
        let id = SequencePrefix::from_integers(0..6).unwrap();
        assert_eq!(finite_differences(&id), [0, 1, 0, 0, 0, 0].map(|x| rat(x, 1)));
    }

    #[test]
    fn differences_of_gs_sequences() {
        for r in -3i64..=3 {
            let f = SequencePrefix::from_fn(15, |n| rat_int(a_direct(n as u64, r)));
            assert_eq!(finite_differences(&f), gs_deltas(&rat(r, 1), 15), "r = {r}");
        }
    }

    #[test]
    fn reconstruct_examples() {
        let signed = SequencePrefix::from_integers([1, 0, 1, -2, 9, -44]).unwrap();
        let d = finite_differences(&signed);
        assert_eq!(mahler_reconstruct(&d, 4).unwrap(), rat(9, 1));
        let unit = [1, 0, 0, 0].map(|x| rat(x, 1));
        for n in 0..4 {
            assert_eq!(mahler_reconstruct(&unit, n).unwrap(), rat(1, 1));
        }
        assert!(matches!(mahler_reconstruct(&unit, 4), Err(Error::Index { .. })));
    }

    #[test]
    fn regularity_of_gs_at_p() {
        for p in [2u64, 3, 5] {
            let f = SequencePrefix::from_fn(24, |n| rat_int(a_direct(n as u64, p as i64)));
            let rep = classify_regularity(&f, p).unwrap();
            let expected: Vec<ExtValue> = (1..=24).map(ExtValue::int).collect();
            assert_eq!(rep.analytic.values, expected);
            assert_eq!(rep.analytic.verdict, Verdict::Pass);
            assert_eq!(rep.continuous.verdict, Verdict::Pass);
            assert_eq!(rep.metric_map.verdict, Verdict::Pass);
            assert_eq!(rep.locally_analytic.verdict, Verdict::Pass);
        }
    }

    #[test]
    fn regularity_of_gs_at_one() {
        for p in [2u64, 3, 5, 7] {
            let f = SequencePrefix::from_fn(30, |n| rat_int(a_direct(n as u64, 1)));
            let rep = classify_regularity(&f, p).unwrap();
            assert_eq!(rep.metric_map.verdict, Verdict::Pass);
            assert!(rep.analytic.values.iter().all(|v| *v == ExtValue::int(0)));
            assert_eq!(rep.analytic.verdict, Verdict::Fail);
            for (i, v) in rep.continuous.values.iter().enumerate() {
                assert_eq!(*v, ExtValue::int(exact::vp_factorial(i as u64 + 1, p) as i64));
            }
        }
    }

    #[test]
    fn regularity_of_divergent_sequence() {
        let p = 3u64;
        let f = SequencePrefix::from_fn(15, |n| {
            rat_int(exact::factorial(n as u64)) / rat_int(int(p as i64).pow(n as u32))
        });
        let rep = classify_regularity(&f, p).unwrap();
        for (i, v) in rep.continuous.values.iter().enumerate() {
            let d = &finite_differences(&f)[i + 1];
            assert_eq!(*v, ExtValue::int(exact::vp_rational(d, p).unwrap()));
        }
        assert_eq!(rep.continuous.verdict, Verdict::Fail);
        assert_eq!(rep.metric_map.verdict, Verdict::Fail);
    }

    #[test]
    fn regularity_needs_eight_values() {
        let f = SequencePrefix::from_integers(vec![1; 7]).unwrap();
        assert!(matches!(classify_regularity(&f, 3), Err(Error::PrefixTooShort { .. })));
    }

    #[test]
    fn regularity_json_uses_strings() {
        let f = SequencePrefix::from_integers(vec![1; 9]).unwrap();
        let json = serde_json::to_value(classify_regularity(&f, 2).unwrap()).unwrap();
        assert_eq!(json["continuous"]["values"][0], "inf");
        assert_eq!(json["continuous"]["verdict"], "pass");
    }

    #[test]
    fn eval_examples() {
        let ctx = PadicContext::new(5, 6).unwrap();
        let r = rat(2, 1);
        let d = gs_deltas(&r, 10);
        let bound = |k: usize| if k > 10 { rat(100, 1) } else { rat(0, 1) };
        assert_eq!(mahler_eval(&d, &ctx.int(3), bound).unwrap(), ctx.int(a_direct(3, 2)));
        assert_eq!(mahler_eval(&d, &ctx.zero(), bound).unwrap(), ctx.int(1));

        // a(-1, -1) = Σ k!
        let d = gs_deltas(&rat(-1, 1), 40);
        let legendre = |k: usize| rat_int(exact::vp_factorial(k as u64, 5));
        let got = mahler_eval(&d, &ctx.int(-1), legendre).unwrap();
        let partial: BigInt = (0..60u64).map(exact::factorial).sum();
        assert_eq!(got, ctx.int(partial));

        let short = gs_deltas(&rat(-1, 1), 10);
        assert!(matches!(
            mahler_eval(&short, &ctx.int(-1), legendre),
            Err(Error::UnsoundTruncation { .. })
        ));
    }

    #[test]
    fn eval_with_non_integral_quotients() {
        // Δ_k = 1 for all k: f(n) = 2^n, Δ_k / k! is not 3-integral for k >= 3.
        let ctx = PadicContext::new(3, 5).unwrap();
        let d = vec![rat(1, 1); 12];
        let bound = |k: usize| if k > 11 { rat(99, 1) } else { rat(0, 1) };
        for y in 0..12 {
            assert_eq!(mahler_eval(&d, &ctx.int(y), bound).unwrap(), ctx.int(1i64 << y));
        }
    }

    fn prefix_strategy() -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::vec((-50i64..50, 1i64..20), 1..16)
            .prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
    }

    proptest! {
        #[test]
        fn reconstruct_inverts_differences(values in prefix_strategy()) {
            let f = SequencePrefix::new(values.clone()).unwrap();
            let d = finite_differences(&f);
            for (n, v) in values.iter().enumerate() {
                prop_assert_eq!(&mahler_reconstruct(&d, n).unwrap(), v);
            }
        }

        #[test]
        fn eval_matches_exact_values(values in prop::collection::vec(-1000i64..1000, 1..14), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let f = SequencePrefix::from_integers(values.clone()).unwrap();
            let d = finite_differences(&f);
            let k = d.len();
            let ctx = PadicContext::new(p, 8).unwrap();
            let bound = move |j: usize| if j >= k { rat(1000, 1) } else { rat(0, 1) };
            for (y, v) in values.iter().enumerate() {
                prop_assert_eq!(mahler_eval(&d, &ctx.int(y as i64), bound).unwrap(), ctx.int(*v));
            }
        }
    }
}
