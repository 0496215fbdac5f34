//! `padic-gamma`: m-values, continuity verdicts, p-adic incomplete gamma
//! values, brute-force enumeration and verification suites. Every line
//! written to stdout is a JSON object.
//!
//! Exit codes: 0 success, 1 domain error or failed verification, 2 usage error.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use padic_gamma::combinat::{self, CycleLengthSet};
use padic_gamma::exact::{self, Rational};
use padic_gamma::gammap::{self, GammaPInput};
use padic_gamma::mahler::SequencePrefix;
use padic_gamma::mvalues;
use padic_gamma::Error;

#[derive(Parser)]
#[command(name = "padic-gamma", version, about = "Exact p-adic analysis of integer sequences and the p-adic incomplete gamma function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// m-values m_1..m_K of a sequence with f(0) = 1.
    Mvalues {
        /// Comma-separated rationals, or a file holding them or a JSON array.
        #[arg(long)]
        seq: String,
        /// Number of m-values to print (default: all available).
        #[arg(long)]
        k: Option<usize>,
        /// Multiply f(n) by (-1)^n first.
        #[arg(long)]
        alternate: bool,
    },
    /// The m-value continuity criterion at a prime.
    Continuity {
        #[arg(long, conflicts_with = "set", required_unless_present = "set")]
        seq: Option<String>,
        /// Cycle-length preset; the sequence is then the count of permutations
        /// whose cycle lengths all lie in the set.
        #[arg(long = "L", id = "set")]
        set: Option<String>,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        alternate: bool,
        /// Number of m-values checked for p-integrality (default max(2p, 20)).
        #[arg(long)]
        window: Option<usize>,
        /// Largest index generated for --L (default: the window).
        #[arg(long)]
        len: Option<usize>,
    },
    /// Gamma_p(s, r) modulo p^N.
    Gammap {
        #[arg(long)]
        p: u64,
        #[arg(long = "N", default_value_t = 10)]
        precision: u32,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, value_enum, default_value_t = Route::All)]
        route: Route,
    },
    /// Brute-force counts, optionally listing every element.
    Enumerate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long = "L", id = "set")]
        set: Option<String>,
        /// Stream the enumerated objects before the count.
        #[arg(long)]
        list: bool,
    },
    /// Verification suites; exits 1 if any case fails.
    Verify {
        #[arg(long, value_enum)]
        identity: Identity,
        #[arg(long, default_value_t = 1)]
        n_min: u64,
        /// Largest n (default 20 for floor, 30 for gamma-consistency, 8 for egf-oracle).
        #[arg(long)]
        n_max: Option<u64>,
        /// Largest |r| for the floor suite.
        #[arg(long, default_value_t = 10)]
        r_max: i64,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long = "N", default_value_t = 12)]
        precision: u32,
        #[arg(long = "L", id = "set", default_value = "primes")]
        set: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    All,
    Factored,
    Series,
    Truncexp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    WreathDerangements,
    WreathArrangements,
    CycleRestricted,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Identity {
    Floor,
    GammaConsistency,
    EgfOracle,
}

enum Failure {
    Usage(String),
    Domain(Error),
    /// A verification suite ran to completion with failing cases.
    Verification(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => Failure::Usage(msg),
            other => Failure::Domain(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Out<'a> = BufWriter<io::StdoutLock<'a>>;

fn emit(out: &mut Out, v: &Value) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, v).map_err(|e| Failure::Usage(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::UndefinedValuation => "undefined-valuation",
        Error::InvalidArgument(_) => "invalid-argument",
        Error::NotPIntegral { .. } => "not-p-integral",
        Error::NotAUnit(_) => "not-a-unit",
        Error::NonUnitDivision { .. } => "non-unit-division",
        Error::Domain(_) => "domain",
        Error::PrefixTooShort { .. } => "prefix-too-short",
        Error::Normalization(_) => "normalization",
        Error::Index { .. } => "index",
        Error::UnsoundTruncation { .. } => "unsound-truncation",
        Error::BudgetExceeded { .. } => "budget-exceeded",
        Error::EnclosureFailure { .. } => "enclosure-failure",
        Error::MalformedPermutation(_) => "malformed-permutation",
        Error::MembershipBound { .. } => "membership-bound",
        Error::Parse(_) => "parse",
    }
}

fn budget() -> Result<u64, Failure> {
    match std::env::var("PADIC_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("PADIC_BUDGET must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(combinat::DEFAULT_BUDGET),
    }
}

/// Reads `--seq`: a path to a file, or the inline list itself.
fn read_sequence(arg: &str) -> Result<Vec<Rational>, Failure> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg)?
    } else {
        arg.to_string()
    };
    let text = text.trim();
    if text.starts_with('[') {
        let items: Vec<Value> =
            serde_json::from_str(text).map_err(|e| Failure::Usage(format!("bad JSON array: {e}")))?;
        return items
            .iter()
            .map(|v| match v {
                Value::String(s) => Ok(exact::parse_rational(s)?),
                Value::Number(n) => Ok(exact::parse_rational(&n.to_string())?),
                other => Err(Failure::Usage(format!("not a rational: {other}"))),
            })
            .collect();
    }
    let values: Vec<Rational> = text
        .split(',')
        .map(|t| exact::parse_rational(t).map_err(Failure::from))
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(Failure::Usage("empty sequence".into()));
    }
    Ok(values)
}

fn alternate(values: &mut [Rational]) {
    for (n, v) in values.iter_mut().enumerate() {
        if n % 2 == 1 {
            *v = -v.clone();
        }
    }
}

fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|q| Value::String(q.to_string())).collect())
}

fn cmd_mvalues(out: &mut Out, seq: &str, k: Option<usize>, alt: bool) -> Result<(), Failure> {
    let mut values = read_sequence(seq)?;
    if alt {
        alternate(&mut values);
    }
    let f = SequencePrefix::new(values)?;
    let m = mvalues::m_from_f(&f)?;
    let k = k.unwrap_or(m.len());
    if k == 0 || k > m.len() {
        return Err(Failure::Domain(Error::Index { index: k, len: m.len() }));
    }
    emit(out, &json!({ "k": k, "m": rationals(&m.values()[..k]) }))
}

struct ContinuityArgs {
    seq: Option<String>,
    set: Option<String>,
    p: u64,
    alternate: bool,
    window: Option<usize>,
    len: Option<usize>,
}

fn cmd_continuity(out: &mut Out, a: ContinuityArgs) -> Result<(), Failure> {
    exact::is_prime(a.p)
        .then_some(())
        .ok_or_else(|| Failure::Usage(format!("--p must be prime, got {}", a.p)))?;
    let window = a.window.unwrap_or_else(|| mvalues::default_window(a.p));
    let mut values = match (&a.seq, &a.set) {
        (Some(seq), None) => read_sequence(seq)?,
        (None, Some(preset)) => {
            let last = a.len.unwrap_or(window).max(a.p as usize);
            let set = CycleLengthSet::parse(preset, last as u64)?;
            combinat::egf_cycle_restricted(&set, last)?.coeffs().to_vec()
        }
        _ => return Err(Failure::Usage("give exactly one of --seq and --L".into())),
    };
    if a.alternate {
        alternate(&mut values);
    }
    let f = SequencePrefix::new(values)?;
    let verdict = mvalues::continuity_criterion_window(&f, a.p, window)?;
    emit(out, &serde_json::to_value(&verdict).expect("serializable"))
}

fn cmd_gammap(out: &mut Out, p: u64, precision: u32, s: &str, r: &str, route: Route) -> Result<(), Failure> {
    if precision == 0 {
        return Err(Failure::Usage("--N must be at least 1".into()));
    }
    exact::is_prime(p)
        .then_some(())
        .ok_or_else(|| Failure::Usage(format!("--p must be prime, got {p}")))?;
    let sq = exact::parse_rational(s)?;
    let rq = exact::parse_rational(r)?;
    let input = GammaPInput::from_rationals(&sq, &rq, p, precision)?;
    let (value, agree) = match route {
        Route::All => {
            let c = gammap::gamma_p_all_routes(&input)?;
            (c.factored, Some(c.agree))
        }
        Route::Factored => (gammap::gamma_p(&input)?, None),
        Route::Series => (gammap::gamma_p_series(&input)?, None),
        Route::Truncexp => {
            if !sq.is_integer() || sq < Rational::one() {
                return Err(Failure::Domain(Error::Domain(
                    "the truncated-exponential route needs a positive integer s".into(),
                )));
            }
            let n: u64 = (sq.to_integer() - 1u32)
                .try_into()
                .map_err(|_| Failure::Domain(Error::Domain("s is too large".into())))?;
            (gammap::gamma_p_truncexp(n, input.r())?, None)
        }
    };
    emit(
        out,
        &json!({
            "p": p,
            "N": precision,
            "s": sq.to_string(),
            "r": rq.to_string(),
            "gamma_p": value.residue().to_string(),
            "routes_agree": agree,
        }),
    )
}

fn require_r(r: Option<u32>) -> Result<u32, Failure> {
    match r {
        Some(0) => Err(Failure::Usage("--r must be positive".into())),
        Some(r) => Ok(r),
        None => Err(Failure::Usage("this kind needs --r".into())),
    }
}

fn cmd_enumerate(out: &mut Out, kind: Kind, n: usize, r: Option<u32>, set: Option<String>, list: bool) -> Result<(), Failure> {
    let budget = budget()?;
    match kind {
        Kind::WreathDerangements => {
            let r = require_r(r)?;
            let count = if list {
                let mut count = 0u64;
                for g in combinat::wreath_derangements(n, r, budget)? {
                    emit(out, &serde_json::to_value(&g).expect("serializable"))?;
                    count += 1;
                }
                count
            } else {
                combinat::count_wreath_derangements_with_budget(n, r, budget)?
            };
            emit(out, &json!({ "n": n, "r": r, "derangements": count }))
        }
        Kind::WreathArrangements => {
            let r = require_r(r)?;
            let count = if list {
                let mut count = 0u64;
                for a in combinat::wreath_arrangements(n, r, budget)? {
                    emit(out, &serde_json::to_value(&a).expect("serializable"))?;
                    count += 1;
                }
                count
            } else {
                combinat::count_wreath_arrangements_with_budget(n, r, budget)?
            };
            emit(out, &json!({ "n": n, "r": r, "arrangements": count }))
        }
        Kind::CycleRestricted => {
            let preset = set.ok_or_else(|| Failure::Usage("cycle-restricted needs --L".into()))?;
            let set = CycleLengthSet::parse(&preset, n.max(1) as u64)?;
            let count = if list {
                let needed = exact::factorial(n as u64);
                if needed > BigInt::from(budget) {
                    return Err(Failure::Domain(Error::BudgetExceeded { needed: needed.to_string(), budget }));
                }
                let allowed = set.table(n)?;
                let mut count = BigInt::zero();
                for perm in combinat::permutations(n) {
                    let cycles = combinat::cycle_type(&perm)?;
                    if cycles.iter().all(|&c| allowed[c]) {
                        let one_based: Vec<usize> = perm.iter().map(|x| x + 1).collect();
                        emit(out, &json!({ "perm": one_based, "cycle_type": cycles }))?;
                        count += 1u32;
                    }
                }
                count
            } else {
                combinat::count_cycle_restricted_with_budget(&set, n, budget)?
            };
            emit(out, &json!({ "n": n, "L": set.label(), "count": count.to_string() }))
        }
    }
}

fn verify_floor(out: &mut Out, n_min: u64, n_max: u64, r_max: i64) -> Result<usize, Failure> {
    if r_max < 1 {
        return Err(Failure::Usage("--r-max must be at least 1".into()));
    }
    let mut failures = 0;
    let mut cases = 0;
    for n in n_min..=n_max {
        for m in 1..=r_max {
            for r in [m, -m] {
                cases += 1;
                let line = match combinat::verify_floor_formula(n, r) {
                    Ok(c) => {
                        failures += usize::from(!c.holds);
                        json!({
                            "identity": "floor", "n": n, "r": r, "pass": c.holds,
                            "floor": c.floor.to_string(), "a": c.a.to_string(),
                            "interval": { "lo": c.interval.lo().to_string(), "hi": c.interval.hi().to_string() },
                            "terms": c.terms,
                        })
                    }
                    Err(e) => {
                        failures += 1;
                        json!({ "identity": "floor", "n": n, "r": r, "pass": false, "error": e.to_string() })
                    }
                };
                emit(out, &line)?;
            }
        }
    }
    emit(out, &json!({ "identity": "floor", "cases": cases, "failures": failures }))?;
    Ok(failures)
}

fn verify_gamma(out: &mut Out, p: u64, precision: u32, n_min: u64, n_max: u64) -> Result<usize, Failure> {
    if p == 2 || !exact::is_prime(p) {
        return Err(Failure::Usage(format!("--p must be an odd prime, got {p}")));
    }
    let pi = p as i64;
    let mut failures = 0;
    let mut cases = 0;
    for r in [1, 1 + pi, 1 - pi, 1 + 2 * pi, 1 - 2 * pi] {
        for n in n_min.max(1)..=n_max {
            cases += 1;
            let c = gammap::classical_consistency(n, r, p, precision)?;
            failures += usize::from(!c.agree);
            emit(
                out,
                &json!({
                    "identity": "gamma-consistency", "p": p, "N": precision, "n": n, "r": r,
                    "pass": c.agree, "gamma_p": c.gamma_p.residue().to_string(),
                    "classical": c.classical.residue().to_string(),
                }),
            )?;
        }
    }
    emit(out, &json!({ "identity": "gamma-consistency", "cases": cases, "failures": failures }))?;
    Ok(failures)
}

fn verify_egf(out: &mut Out, preset: &str, n_min: u64, n_max: u64) -> Result<usize, Failure> {
    let budget = budget()?;
    let set = CycleLengthSet::parse(preset, n_max.max(1))?;
    let egf = combinat::egf_cycle_restricted(&set, n_max as usize)?;
    let mut failures = 0;
    let mut cases = 0;
    for n in n_min.min(n_max)..=n_max {
        cases += 1;
        let brute = combinat::count_cycle_restricted_with_budget(&set, n as usize, budget)?;
        let product = &egf.coeffs()[n as usize];
        let pass = exact::rat_int(brute.clone()) == *product;
        failures += usize::from(!pass);
        emit(
            out,
            &json!({
                "identity": "egf-oracle", "L": set.label(), "n": n, "pass": pass,
                "brute_force": brute.to_string(), "product": product.to_string(),
            }),
        )?;
    }
    emit(out, &json!({ "identity": "egf-oracle", "cases": cases, "failures": failures }))?;
    Ok(failures)
}

fn run(cli: Cli, out: &mut Out) -> Result<(), Failure> {
    match cli.command {
        Command::Mvalues { seq, k, alternate } => cmd_mvalues(out, &seq, k, alternate),
        Command::Continuity { seq, set, p, alternate, window, len } => {
            cmd_continuity(out, ContinuityArgs { seq, set, p, alternate, window, len })
        }
        Command::Gammap { p, precision, s, r, route } => cmd_gammap(out, p, precision, &s, &r, route),
        Command::Enumerate { kind, n, r, set, list } => cmd_enumerate(out, kind, n, r, set, list),
        Command::Verify { identity, n_min, n_max, r_max, p, precision, set } => {
            let failures = match identity {
                Identity::Floor => verify_floor(out, n_min, n_max.unwrap_or(20), r_max)?,
                Identity::GammaConsistency => verify_gamma(out, p, precision, n_min, n_max.unwrap_or(30))?,
                Identity::EgfOracle => verify_egf(out, &set, n_min, n_max.unwrap_or(8))?,
            };
            if failures > 0 {
                return Err(Failure::Verification(failures));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(n)) => {
            eprintln!("{}", json!({ "error": "verification-failed", "failures": n }));
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("{}", json!({ "error": error_kind(&e), "message": e.to_string() }));
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{}", json!({ "error": "usage", "message": msg }));
            ExitCode::from(2)
        }
    }
}
