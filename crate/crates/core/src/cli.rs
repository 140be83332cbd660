//! Command-line front end. Every subcommand prints one report on stdout:
//! JSON by default, CSV for tabular results, or plain text.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 a verification found a
//! counterexample (the report carries the witness).

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bound::{composition_bound_sweep, format_sig, recurrence_bound, BoundTable, Tau};
use crate::cache::{load_cache, save_cache, stamp_now, CACHE_DIR_ENV};
use crate::catalogue::{
    bootstrap_iterate, check_d_condition, check_delta, check_phi_composition, check_psi_family,
    exponent_compare, log_over_x_crossover, BootstrapState, FunctionSpec, Smooth,
};
use crate::eertree::Eertree;
use crate::enumerate::{
    count_rich, count_rich_symmetric, max_luf_table, EnumOptions, RichCountTable,
    DEFAULT_NODE_BUDGET, DEFAULT_SHARD_DEPTH,
};
use crate::error::{Error, Result};
use crate::omega::{check_jensen, check_p_monotonicity, check_product_bound, OmegaParams};
use crate::ups::{compare_luf_bound, ups_factorize};
use crate::word::{naive_palindromic_factor_count, Alphabet, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "richlab",
    version,
    about = "Rich words, UPS-factorizations and bounds on their number"
)]
pub struct RunConfig {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Leave the wall-clock duration out of the report.
    #[arg(long, global = true)]
    pub omit_timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Richness of one word.
    Check(WordArgs),
    /// Exact R(n) table.
    Count(CountArgs),
    /// UPS-factorization of one word.
    Ups(WordArgs),
    /// Maximum LUF over rich words of each length.
    Maxluf(MaxLufArgs),
    /// Recurrence upper bound seeded with exact counts.
    BoundRecurrence(RecurrenceArgs),
    /// Numeric verification suites.
    #[command(subcommand)]
    Verify(Verify),
    /// Iterate the bootstrap map on (c1, c2).
    Bootstrap(BootstrapArgs),
    /// Old versus improved bound exponent at one n.
    CompareExponents(CompareArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct WordArgs {
    /// Word in lowercase letters ('a' is letter 0).
    pub word: String,
    /// Alphabet size; inferred from the word when absent.
    #[arg(long)]
    pub q: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct EnumArgs {
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = DEFAULT_SHARD_DEPTH)]
    pub shard_depth: usize,
    /// Enumerate canonical words only and expand by letter permutations.
    #[arg(long)]
    pub symmetric: bool,
}

impl EnumArgs {
    fn options(&self) -> EnumOptions {
        EnumOptions {
            workers: self.workers,
            node_budget: self.budget,
            shard_depth: self.shard_depth,
            record_max_luf: true,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub enumeration: EnumArgs,
    /// Cache file; reused when it covers n, rewritten otherwise. Defaults to
    /// `rich_q<q>.jsonl` inside $RICHLAB_CACHE_DIR when that is set.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MaxLufArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub enumeration: EnumArgs,
    /// Compare against the candidate bound n/phi(n).
    #[arg(long)]
    pub phi: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct RecurrenceArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n_max: usize,
    /// Exact seeds R(1..=seed_n) are enumerated on the fly.
    #[arg(long, default_value_t = 10)]
    pub seed_n: usize,
    /// Take exact seeds from this cache instead of enumerating.
    #[arg(long)]
    pub seeds_cache: Option<PathBuf>,
    /// `identity`, `const:K`, or `phi:a,b,c,u,v`.
    #[arg(long, default_value = "identity")]
    pub tau: String,
    #[command(flatten)]
    pub enumeration: EnumArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct OmegaArgs {
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long, default_value = "identity")]
    pub phi: String,
    #[arg(long, default_value = "identity")]
    pub psi: String,
}

impl OmegaArgs {
    fn params(&self) -> Result<OmegaParams> {
        OmegaParams::new(
            self.q,
            self.c1,
            self.c2,
            self.phi.parse()?,
            self.psi.parse()?,
        )
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RangeArgs {
    #[arg(long)]
    pub lo: f64,
    #[arg(long)]
    pub hi: f64,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "suite")]
pub enum Verify {
    /// sum_{p<=L} C(n-1,p-1) <= (e n/L)^L for all 1 <= L <= n <= n_max.
    CompositionBound {
        #[arg(long, default_value_t = 300)]
        n_max: u64,
    },
    /// sum f(x_i) <= k f(mean) on random samples.
    Jensen {
        /// Function tuple; when absent the Omega exponent built from
        /// --phi/--psi/--c1/--c2 is used.
        #[arg(long)]
        f: Option<String>,
        #[command(flatten)]
        omega: OmegaArgs,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// prod Omega(ceil(n_i/2)) <= Omega(n/(2p)+1)^p on random compositions.
    ProductBound {
        #[command(flatten)]
        omega: OmegaArgs,
        #[arg(long, default_value_t = 200)]
        n_max: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Omega(n/(2p)+1)^p <= Omega(n/(2(p+1))+1)^(p+1) on a grid of n and p.
    PMonotonicity {
        #[command(flatten)]
        omega: OmegaArgs,
        #[arg(long, default_value_t = 10)]
        n_lo: u64,
        #[arg(long, default_value_t = 10_000)]
        n_hi: u64,
        /// Largest p; defaults to tau(n) = ceil(n/phi(n)).
        #[arg(long)]
        p_max: Option<u64>,
    },
    /// f' > 0 and f'' < 0 on a log grid.
    Delta {
        #[arg(long)]
        f: String,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// psi(x) <= x and x/psi(x) + x ln(phi(x))/phi(x) increasing concave.
    PsiFamily {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// 2 psi(phi(n)/2) >= d psi(n) from some n0 on.
    DCondition {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        #[arg(long)]
        d: f64,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// tau(phi(n)) ln(phi(phi(n))) <= ln(phi(n)) from some n0 on.
    PhiComposition {
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// ln x / x peaks at e and decreases after it.
    Crossover,
}

#[derive(Debug, Args, Serialize)]
pub struct BootstrapArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub c1: f64,
    #[arg(long)]
    pub c2: f64,
    #[arg(long)]
    pub c3: f64,
    #[arg(long, default_value_t = 1)]
    pub iters: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub c1: f64,
    #[arg(long)]
    pub c2: f64,
    #[arg(long)]
    pub c3: f64,
    #[arg(long)]
    pub phi: String,
    #[arg(long)]
    pub psi: String,
    #[arg(long)]
    pub n: f64,
}

/// Exit code plus the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Result body, whether it is a counterexample, and an optional CSV/text
/// rendering for tabular output.
struct Report {
    body: Value,
    counterexample: bool,
    csv: Option<String>,
}

impl Report {
    fn ok(body: Value) -> Self {
        Report {
            body,
            counterexample: false,
            csv: None,
        }
    }

    fn verdict(body: Value, passed: bool) -> Self {
        Report {
            body,
            counterexample: !passed,
            csv: None,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let started = Instant::now();
    match dispatch(&config.command) {
        Ok(report) => {
            let code = if report.counterexample { 2 } else { 0 };
            let stdout = render(&config, report, started);
            match stdout {
                Ok(stdout) => Outcome {
                    code,
                    stdout,
                    stderr: String::new(),
                },
                Err(e) => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: format!("error: {e}\n"),
                },
            }
        }
        Err(e) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn render(config: &RunConfig, report: Report, started: Instant) -> Result<String> {
    match config.format {
        Format::Csv => report.csv.ok_or_else(|| {
            Error::Input("csv output is only available for tabular subcommands".into())
        }),
        Format::Json | Format::Text => {
            let mut body = match report.body {
                Value::Object(m) => m,
                other => {
                    let mut m = Map::new();
                    m.insert("result".into(), other);
                    m
                }
            };
            let mut meta = Map::new();
            meta.insert("tool".into(), json!("richlab"));
            meta.insert("version".into(), json!(crate::TOOL_VERSION));
            meta.insert("config".into(), to_value(config));
            if !config.omit_timing {
                meta.insert(
                    "elapsed_ms".into(),
                    json!(started.elapsed().as_secs_f64() * 1e3),
                );
            }
            body.insert("meta".into(), Value::Object(meta));
            let body = Value::Object(body);
            let mut out = if config.format == Format::Json {
                serde_json::to_string(&body)
            } else {
                serde_json::to_string_pretty(&body)
            }
            .expect("json renders");
            out.push('\n');
            Ok(out)
        }
    }
}

fn dispatch(command: &Command) -> Result<Report> {
    match command {
        Command::Check(args) => check(args),
        Command::Count(args) => count(args),
        Command::Ups(args) => {
            let word = parse_word(args)?;
            let f = ups_factorize(&word)?;
            Ok(Report::ok(f.to_json()))
        }
        Command::Maxluf(args) => maxluf(args),
        Command::BoundRecurrence(args) => bound_recurrence(args),
        Command::Verify(v) => verify(v),
        Command::Bootstrap(args) => {
            let s = BootstrapState::new(args.q, args.d, args.c1, args.c2, args.c3)?;
            let t = bootstrap_iterate(&s, args.iters)?;
            let (c1, c2) = *t.points.last().expect("nonempty");
            Ok(Report::ok(json!({
                "c1": c1,
                "c2": c2,
                "trajectory": t.points.iter().map(|(a, b)| json!({"c1": a, "c2": b})).collect::<Vec<_>>(),
                "c1_fixed_point": t.c1_fixed_point,
                "c2_strictly_increasing": t.c2_strictly_increasing,
                "note": t.note,
            })))
        }
        Command::CompareExponents(args) => {
            let s = BootstrapState::new(args.q, args.d, args.c1, args.c2, args.c3)?
                .with_functions(args.phi.parse()?, args.psi.parse()?);
            Ok(Report::ok(to_value(&exponent_compare(&s, args.n)?)))
        }
    }
}

fn parse_word(args: &WordArgs) -> Result<Word> {
    match args.q {
        Some(q) => Word::parse(&args.word, Alphabet::new(q)?),
        None => Word::parse_infer(&args.word),
    }
}

fn check(args: &WordArgs) -> Result<Report> {
    let word = parse_word(args)?;
    let tree = Eertree::from_letters(word.alphabet(), word.letters())?;
    let palindromes = tree.distinct_palindrome_count();
    debug_assert_eq!(palindromes, naive_palindromic_factor_count(word.letters()));
    Ok(Report::ok(json!({
        "word": word.to_string(),
        "rich": tree.is_rich_prefix(),
        "palindromes": palindromes,
    })))
}

fn table_json(table: &RichCountTable) -> Value {
    json!({
        "q": table.q,
        "symmetric": table.provenance.symmetric,
        "table": table.entries.iter().map(|e| json!({
            "n": e.n,
            "count": e.count.to_str_radix(10),
            "max_luf": e.max_luf,
        })).collect::<Vec<_>>(),
    })
}

fn enumerate(q: u32, n: usize, args: &EnumArgs) -> Result<RichCountTable> {
    if args.symmetric {
        count_rich_symmetric(q, n, &args.options())
    } else {
        count_rich(q, n, &args.options())
    }
}

fn default_cache(q: u32) -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV).map(|dir| PathBuf::from(dir).join(format!("rich_q{q}.jsonl")))
}

fn count(args: &CountArgs) -> Result<Report> {
    let cache = args.cache.clone().or_else(|| default_cache(args.q));
    let cached = match &cache {
        Some(path) if path.exists() => {
            let t = load_cache(path, Some(args.q))?;
            (t.n_max() >= args.n).then(|| t.truncated(args.n))
        }
        _ => None,
    };
    let table = match cached {
        Some(t) => t,
        None => {
            let mut t = enumerate(args.q, args.n, &args.enumeration)?;
            if let Some(path) = &cache {
                stamp_now(&mut t);
                save_cache(&t, path)?;
                t.provenance.created_unix = None;
            }
            t
        }
    };
    let mut body = table_json(&table);
    // provenance of a cache hit is not part of the deterministic result
    body["symmetric"] = json!(table.provenance.symmetric);
    Ok(Report::ok(body).with_csv(table.to_csv()))
}

fn maxluf(args: &MaxLufArgs) -> Result<Report> {
    let table = max_luf_table(args.q, args.n, &args.enumeration.options())?;
    let rows: Vec<Value> = table
        .iter()
        .map(|(n, m)| json!({"n": n, "max_luf": m}))
        .collect();
    let mut body = json!({ "q": args.q, "table": rows });
    let mut csv = String::from("n,max_luf,bound,holds\n");
    match &args.phi {
        Some(phi) => {
            let phi: FunctionSpec = phi.parse()?;
            let report = compare_luf_bound(&table, &phi)?;
            for r in &report.rows {
                let bound = r.bound.map(|b| format_sig(b, 15)).unwrap_or_default();
                let holds = r.holds.map(|h| h.to_string()).unwrap_or_default();
                csv.push_str(&format!("{},{},{bound},{holds}\n", r.n, r.max_luf));
            }
            body["comparison"] = to_value(&report);
        }
        None => {
            for (n, m) in &table {
                csv.push_str(&format!("{n},{m},,\n"));
            }
        }
    }
    Ok(Report::ok(body).with_csv(csv))
}

fn parse_tau(text: &str) -> Result<Tau> {
    if text == "identity" || text == "n" {
        return Ok(Tau::Identity);
    }
    if let Some(k) = text.strip_prefix("const:") {
        let k = k
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| Error::Input(format!("bad constant tau {text:?}")))?;
        return Ok(Tau::Constant { k });
    }
    if let Some(spec) = text.strip_prefix("phi:") {
        return Ok(Tau::Phi { phi: spec.parse()? });
    }
    Err(Error::Input(format!(
        "tau must be identity, const:K or phi:a,b,c,u,v; got {text:?}"
    )))
}

fn bound_recurrence(args: &RecurrenceArgs) -> Result<Report> {
    let tau = parse_tau(&args.tau)?;
    let counts = match &args.seeds_cache {
        Some(path) => load_cache(path, Some(args.q))?.counts(),
        None => enumerate(args.q, args.seed_n, &args.enumeration)?.counts(),
    };
    let seeds = BoundTable::exact_seeds(args.q, &counts)?;
    let table = recurrence_bound(&seeds, &tau, args.n_max)?;
    let rows: Vec<Value> = table
        .entries
        .iter()
        .map(|e| {
            json!({
                "n": e.n,
                "exponent_log_q": e.value.log_q(),
                "provenance": e.provenance.as_str(),
            })
        })
        .collect();
    let body = json!({ "q": table.q, "tau": tau.describe(), "rounding": "up", "table": rows });
    Ok(Report::ok(body).with_csv(table.to_csv()))
}

fn random_composition(rng: &mut ChaCha8Rng, n_max: u64) -> Vec<u64> {
    let n = rng.gen_range(1..=n_max);
    let p = rng.gen_range(1..=n);
    // choose p-1 distinct cut points in 1..n
    let mut cuts = rand::seq::index::sample(rng, (n - 1) as usize, (p - 1) as usize).into_vec();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(p as usize);
    let mut prev = 0u64;
    for c in cuts {
        let c = c as u64 + 1;
        parts.push(c - prev);
        prev = c;
    }
    parts.push(n - prev);
    parts
}

fn verify(v: &Verify) -> Result<Report> {
    match v {
        Verify::CompositionBound { n_max } => {
            let violations = composition_bound_sweep(*n_max);
            let pairs = n_max * (n_max + 1) / 2;
            Ok(Report::verdict(
                json!({
                    "suite": "composition-bound",
                    "pairs_checked": pairs,
                    "violations": violations.iter().map(|(n, l)| json!({"n": n, "L": l})).collect::<Vec<_>>(),
                    "passed": violations.is_empty(),
                }),
                violations.is_empty(),
            ))
        }
        Verify::Jensen {
            f,
            omega,
            lo,
            hi,
            trials,
            seed,
        } => {
            if !(lo > &0.0 && lo <= hi) {
                return Err(Error::Input(format!("bad range [{lo}, {hi}]")));
            }
            let func: Box<dyn Smooth> = match f {
                Some(spec) => Box::new(spec.parse::<FunctionSpec>()?),
                None => Box::new(omega.params()?.exponent_fn()),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut witness = None;
            for trial in 0..*trials {
                let k = rng.gen_range(2..=8);
                let xs: Vec<f64> = (0..k).map(|_| rng.gen_range(*lo..=*hi)).collect();
                let r = check_jensen(func.as_ref(), &xs)?;
                if !r.holds {
                    witness = Some(json!({"trial": trial, "xs": xs, "lhs": r.lhs, "rhs": r.rhs}));
                    break;
                }
            }
            let passed = witness.is_none();
            Ok(Report::verdict(
                json!({"suite": "jensen", "function": func.describe(), "trials": trials, "passed": passed, "witness": witness}),
                passed,
            ))
        }
        Verify::ProductBound {
            omega,
            n_max,
            trials,
            seed,
        } => {
            let params = omega.params()?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut witness = None;
            for trial in 0..*trials {
                let parts = random_composition(&mut rng, *n_max);
                let r = check_product_bound(&parts, &params)?;
                if !r.holds {
                    witness =
                        Some(json!({"trial": trial, "parts": parts, "lhs": r.lhs, "rhs": r.rhs}));
                    break;
                }
            }
            let passed = witness.is_none();
            Ok(Report::verdict(
                json!({"suite": "product-bound", "trials": trials, "passed": passed, "witness": witness}),
                passed,
            ))
        }
        Verify::PMonotonicity {
            omega,
            n_lo,
            n_hi,
            p_max,
        } => {
            let params = omega.params()?;
            let tau = Tau::Phi { phi: params.phi };
            let mut checked = 0u64;
            let mut witness = None;
            'outer: for n in (*n_lo).max(1)..=*n_hi {
                let top = p_max.unwrap_or_else(|| tau.at(n as usize) as u64);
                for p in 1..=top {
                    let r = check_p_monotonicity(n, p, &params)?;
                    checked += 1;
                    if !r.holds {
                        witness = Some(json!({"n": n, "p": p, "lhs": r.lhs, "rhs": r.rhs}));
                        break 'outer;
                    }
                }
            }
            let passed = witness.is_none();
            Ok(Report::verdict(
                json!({"suite": "p-monotonicity", "points_checked": checked, "passed": passed, "witness": witness}),
                passed,
            ))
        }
        Verify::Delta { f, range } => {
            let f: FunctionSpec = f.parse()?;
            let r = check_delta(&f, range.lo, range.hi, range.grid)?;
            let ok = r.ok;
            Ok(Report::verdict(to_value(&r), ok))
        }
        Verify::PsiFamily { phi, psi, range } => {
            let r = check_psi_family(&phi.parse()?, &psi.parse()?, range.lo, range.hi, range.grid)?;
            let ok = r.ok;
            Ok(Report::verdict(to_value(&r), ok))
        }
        Verify::DCondition { phi, psi, d, range } => {
            let r = check_d_condition(
                &phi.parse()?,
                &psi.parse()?,
                *d,
                range.lo,
                range.hi,
                range.grid,
            )?;
            let ok = r.scan.holds_at_end;
            Ok(Report::verdict(to_value(&r), ok))
        }
        Verify::PhiComposition { phi, range } => {
            let r = check_phi_composition(&phi.parse()?, range.lo, range.hi, range.grid)?;
            let ok = r.real_tau.holds_at_end;
            Ok(Report::verdict(to_value(&r), ok))
        }
        Verify::Crossover => {
            let r = log_over_x_crossover();
            let ok = r.strictly_decreasing;
            Ok(Report::verdict(to_value(&r), ok))
        }
    }
}
