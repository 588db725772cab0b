//! The `verify`, `sweep` and `estimate` subcommands.
//!
//! Every command first computes its results, then renders them into a
//! string that is written in one piece. Rendering only depends on the
//! results and the configuration, so identical invocations give
//! byte-identical output (the optional timing column excepted).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rumdlab_core::operators::summation_operator;
use rumdlab_core::rumd::{
    growth_exponent, rumd1_scalar_probe, rumd_lower, witness_label, Candidate, GrowthFit, Method,
    RatioMode, RumdEstimate, Strategy, DEFAULT_BUDGET, DEFAULT_SAMPLES, DEFAULT_STARTS,
    EXACT_PAIR_CAP,
};
use rumdlab_core::suites::{run_suite, Suite, SuiteReport};
use rumdlab_core::{DenseOperator, NormedSpace};
use serde::{Deserialize, Serialize};

use crate::config::{DepthRange, Format, OperatorSpec, RunConfig};
use crate::io;
use crate::UsageError;

/// Version tag of the sweep CSV/JSON schema.
pub const SWEEP_SCHEMA: &str = "rumdlab sweep v1";
/// Version tag of the estimate JSON schema.
pub const ESTIMATE_SCHEMA: &str = "rumdlab estimate v1";

#[derive(Debug, Parser)]
#[command(
    name = "rumdlab",
    version,
    about = "Random unconditional constants of Walsh-Paley martingale differences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite; exit status 0 iff every check passes.
    Verify(VerifyArgs),
    /// Lower and upper bounds over a range of depths, with a fitted growth exponent.
    Sweep(SweepArgs),
    /// Bounds for one operator at one depth, with the witness.
    Estimate(EstimateArgs),
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::from_id(s).ok_or_else(|| {
        let ids: Vec<&str> = Suite::ALL.iter().map(|s| s.id()).collect();
        format!("unknown suite '{s}'; known suites: {}", ids.join(", "))
    })
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite id, e.g. lemma4.1.
    #[arg(value_parser = parse_suite)]
    pub suite: Suite,
    /// Size parameter; defaults to the suite's own default.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report printed on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the JSON report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Target {
    /// Identity on `l_1^{2^n}`.
    #[value(name = "l1")]
    #[serde(rename = "l1")]
    L1,
    /// Summation operator `σ_{2^n}: l_1^{2^n} -> l_inf^{2^n}`.
    #[value(name = "sigma_n")]
    #[serde(rename = "sigma_n")]
    SigmaN,
    /// Identity on `l_2^4`.
    #[value(name = "l2")]
    #[serde(rename = "l2")]
    L2,
    /// Scalar `q = 1` translation-martingale probe.
    #[value(name = "scalar_q1")]
    #[serde(rename = "scalar_q1")]
    ScalarQ1,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::L1 => "l1",
            Target::SigmaN => "sigma_n",
            Target::L2 => "l2",
            Target::ScalarQ1 => "scalar_q1",
        }
    }

    pub fn default_range(self) -> DepthRange {
        match self {
            Target::L1 => DepthRange { start: 2, end: 10 },
            Target::SigmaN => DepthRange { start: 4, end: 12 },
            Target::L2 | Target::ScalarQ1 => DepthRange { start: 2, end: 12 },
        }
    }

    /// Largest depth the target accepts.
    pub fn max_n(self) -> usize {
        match self {
            Target::L1 | Target::SigmaN => 16,
            Target::L2 => 20,
            Target::ScalarQ1 => EXACT_PAIR_CAP,
        }
    }

    pub fn operator(self, n: usize) -> anyhow::Result<DenseOperator> {
        Ok(match self {
            Target::L1 | Target::ScalarQ1 => DenseOperator::identity(NormedSpace::l1(1 << n)?),
            Target::SigmaN => summation_operator(1 << n)?,
            Target::L2 => DenseOperator::identity(NormedSpace::l2(4)?),
        })
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Depths, `a..b` (inclusive) or a single `n`.
    #[arg(long = "n", visible_alias = "n-range")]
    pub n: Option<DepthRange>,
    /// Moment exponent; defaults to 2 (1 for scalar_q1).
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Norm evaluations for the random search at each depth.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Largest depth evaluated by full sign enumeration.
    #[arg(long, default_value_t = EXACT_PAIR_CAP)]
    pub exact_cap: usize,
    /// Sampled sign vectors beyond the exact cap.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fill the wall_time_ms column (makes the output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Identity on a space, `l<p>:<m>`.
    #[arg(long, conflicts_with = "op", required_unless_present = "op")]
    pub space: Option<String>,
    /// `sigma:<N>` or `file:<path>` (operator CSV).
    #[arg(long)]
    pub op: Option<String>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = EXACT_PAIR_CAP)]
    pub exact_cap: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Where to write the witness martingale (CSV). Defaults to
    /// `<out>.witness.csv` when `--out` is given.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line and returns the exit status.
pub fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Verify(a) => cmd_verify(&a),
        Command::Sweep(a) => {
            let cfg = sweep_config(&a)?;
            let sweep = sweep(a.target, &cfg)?;
            let text = match cfg.format {
                Format::Csv => render_sweep_csv(&sweep, &cfg)?,
                Format::Json => render_sweep_json(&sweep, &cfg)?,
                Format::Text => unreachable!("rejected by sweep_config"),
            };
            io::emit(cfg.out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Estimate(a) => {
            let cfg = estimate_config(&a)?;
            let report = estimate(&cfg, a.witness.clone())?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            io::emit(cfg.out.as_deref(), &text)?;
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------- verify

pub fn verify(suite: Suite, n: Option<usize>, seed: u64) -> anyhow::Result<SuiteReport> {
    let n = n.unwrap_or_else(|| suite.default_n());
    if n == 0 || n > suite.max_n() {
        return Err(UsageError(format!(
            "--n {n} is outside the range 1..={} supported by suite {}",
            suite.max_n(),
            suite.id()
        ))
        .into());
    }
    Ok(run_suite(suite, n, seed)?)
}

pub fn render_report_text(report: &SuiteReport) -> String {
    let mut s = String::new();
    let verdict = if report.passed { "PASS" } else { "FAIL" };
    let _ = writeln!(
        s,
        "suite {} n={} seed={}: {verdict}",
        report.suite, report.n, report.seed
    );
    let width = report
        .checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(0);
    for c in &report.checks {
        let mark = if c.passed { "ok" } else { "FAILED" };
        let _ = writeln!(
            s,
            "  {:<width$}  {:>24} {} {:<24} {mark}",
            c.name,
            format!("{}", c.value),
            c.relation,
            format!("{}", c.bound),
        );
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(s, "{} checks, {failed} failed", report.checks.len());
    s
}

fn cmd_verify(a: &VerifyArgs) -> anyhow::Result<i32> {
    let report = verify(a.suite, a.n, a.seed)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    if let Some(path) = &a.out {
        io::emit(Some(path), &json)?;
    }
    match a.format {
        Format::Text => io::emit(None, &render_report_text(&report))?,
        Format::Json => io::emit(None, &json)?,
        Format::Csv => return Err(UsageError("verify supports --format text|json".into()).into()),
    }
    Ok(if report.passed { 0 } else { 1 })
}

// ----------------------------------------------------------------- sweep

fn check_q(q: f64) -> anyhow::Result<()> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(UsageError(format!("--q must be a finite number >= 1, got {q}")).into());
    }
    Ok(())
}

fn sweep_config(a: &SweepArgs) -> anyhow::Result<RunConfig> {
    if a.format == Format::Text {
        return Err(UsageError("sweep supports --format csv|json".into()).into());
    }
    let range = a.n.unwrap_or_else(|| a.target.default_range());
    if range.end > a.target.max_n() {
        return Err(UsageError(format!(
            "--n {range}: target {} supports depths up to {}",
            a.target.name(),
            a.target.max_n()
        ))
        .into());
    }
    let q = match (a.target, a.q) {
        (Target::ScalarQ1, None | Some(1.0)) => 1.0,
        (Target::ScalarQ1, Some(q)) => {
            return Err(UsageError(format!(
                "target scalar_q1 is defined for q = 1, got --q {q}"
            ))
            .into())
        }
        (_, q) => q.unwrap_or(2.0),
    };
    check_q(q)?;
    let mut cfg = RunConfig::new("sweep", range);
    cfg.q = q;
    cfg.seed = a.seed;
    cfg.budget = a.budget;
    cfg.exact_cap = a.exact_cap;
    cfg.samples = a.samples;
    cfg.out = a.out.clone();
    cfg.format = a.format;
    cfg.timing = a.timing;
    Ok(cfg)
}

/// One depth of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub q: f64,
    pub lower: f64,
    pub lower_method: String,
    /// Standard error of `lower`; `0` when it was computed exactly.
    pub lower_stderr: f64,
    pub upper: f64,
    pub upper_method: String,
    pub seed: u64,
    pub wall_time_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub target: Target,
    pub rows: Vec<SweepRow>,
    /// Fit of `log lower` against `log n`; absent with fewer than 3 depths.
    pub growth: Option<GrowthFit>,
}

fn strategy(cfg: &RunConfig) -> Strategy {
    Strategy {
        budget: cfg.budget,
        starts: DEFAULT_STARTS,
        seed: cfg.seed,
        mode: RatioMode {
            exact_cap: cfg.exact_cap,
            samples: cfg.samples,
            seed: cfg.seed,
        },
    }
}

pub fn sweep_row(target: Target, n: usize, cfg: &RunConfig) -> anyhow::Result<SweepRow> {
    let start = Instant::now();
    let mut row = match target {
        Target::ScalarQ1 => {
            let probe = rumd1_scalar_probe(n)?;
            let method = if n >= 2 && probe.antipodal > probe.point_mass {
                Method::CanonicalM1Balanced
            } else {
                Method::CanonicalM1
            };
            SweepRow {
                n,
                q: 1.0,
                lower: probe.value,
                lower_method: method.tag().into(),
                lower_stderr: 0.0,
                upper: 2.0 * n as f64,
                upper_method: Method::Trivial2n.tag().into(),
                seed: cfg.seed,
                wall_time_ms: None,
            }
        }
        _ => {
            let t = target.operator(n)?;
            let e = rumd_lower(&t, n, cfg.q, strategy(cfg))
                .with_context(|| format!("{} at n = {n}", target.name()))?;
            SweepRow {
                n,
                q: cfg.q,
                lower: e.lower,
                lower_method: e.lower_method.tag().into(),
                lower_stderr: e.lower_stderr,
                upper: e.upper.value,
                upper_method: e.upper.method.tag().into(),
                seed: cfg.seed,
                wall_time_ms: None,
            }
        }
    };
    if cfg.timing {
        row.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(row)
}

pub fn sweep(target: Target, cfg: &RunConfig) -> anyhow::Result<Sweep> {
    let rows = cfg
        .n_range
        .iter()
        .map(|n| sweep_row(target, n, cfg))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let series: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.lower)).collect();
    let growth = if series.len() >= 3 {
        Some(growth_exponent(&series)?)
    } else {
        None
    };
    Ok(Sweep {
        target,
        rows,
        growth,
    })
}

fn header_comment(target: Target, cfg: &RunConfig) -> String {
    format!(
        "# {SWEEP_SCHEMA} target={} n={} q={} seed={} budget={} exact_cap={} samples={}\n",
        target.name(),
        cfg.n_range,
        cfg.q,
        cfg.seed,
        cfg.budget,
        cfg.exact_cap,
        cfg.samples
    )
}

pub fn render_sweep_csv(sweep: &Sweep, cfg: &RunConfig) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &sweep.rows {
        w.serialize(row)?;
    }
    if sweep.rows.is_empty() {
        w.write_record([
            "n",
            "q",
            "lower",
            "lower_method",
            "lower_stderr",
            "upper",
            "upper_method",
            "seed",
            "wall_time_ms",
        ])?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?;
    let mut out = header_comment(sweep.target, cfg);
    out.push_str(&body);
    match &sweep.growth {
        Some(g) => {
            let _ = writeln!(
                out,
                "# growth_exponent series=lower method=loglog_least_squares slope={:?} intercept={:?} r2={:?}",
                g.slope, g.intercept, g.r2
            );
        }
        None => out.push_str("# growth_exponent series=lower unavailable (fewer than 3 depths)\n"),
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepJson {
    pub schema: String,
    pub target: Target,
    pub config: RunConfig,
    pub rows: Vec<SweepRow>,
    pub growth_exponent: Option<GrowthJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GrowthJson {
    pub series: String,
    pub method: String,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn render_sweep_json(sweep: &Sweep, cfg: &RunConfig) -> anyhow::Result<String> {
    let doc = SweepJson {
        schema: SWEEP_SCHEMA.into(),
        target: sweep.target,
        config: cfg.clone(),
        rows: sweep.rows.clone(),
        growth_exponent: sweep.growth.map(|g| GrowthJson {
            series: "lower".into(),
            method: "loglog_least_squares".into(),
            slope: g.slope,
            intercept: g.intercept,
            r2: g.r2,
        }),
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// Reads back the data rows of a sweep CSV, skipping comment lines.
pub fn parse_sweep_csv(text: &str) -> anyhow::Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

// -------------------------------------------------------------- estimate

fn estimate_config(a: &EstimateArgs) -> anyhow::Result<RunConfig> {
    let operator = match (&a.space, &a.op) {
        (Some(s), None) => OperatorSpec::from_space(s),
        (None, Some(o)) => OperatorSpec::from_op(o),
        _ => return Err(UsageError("give exactly one of --space and --op".into()).into()),
    }
    .map_err(|e| UsageError(e.to_string()))?;
    if a.n == 0 || a.n > rumdlab_core::MAX_DEPTH {
        return Err(UsageError(format!(
            "--n {} is outside the supported range 1..={}",
            a.n,
            rumdlab_core::MAX_DEPTH
        ))
        .into());
    }
    check_q(a.q)?;
    let mut cfg = RunConfig::new("estimate", DepthRange::single(a.n));
    cfg.q = a.q;
    cfg.operator = Some(operator);
    cfg.seed = a.seed;
    cfg.budget = a.budget;
    cfg.exact_cap = a.exact_cap;
    cfg.samples = a.samples;
    cfg.out = a.out.clone();
    cfg.format = Format::Json;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessInfo {
    pub label: String,
    pub method: String,
    /// Martingale CSV holding the witness, when one was written.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundJson {
    pub value: f64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateJson {
    pub method: String,
    pub ratio: f64,
    pub exact: bool,
    pub stderr: f64,
}

impl From<&Candidate> for CandidateJson {
    fn from(c: &Candidate) -> Self {
        Self {
            method: c.method.tag().into(),
            ratio: c.ratio.value,
            exact: c.ratio.exact,
            stderr: c.ratio.stderr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub schema: String,
    pub config: RunConfig,
    pub operator: String,
    pub n: usize,
    pub q: f64,
    pub lower: BoundJson,
    pub lower_stderr: f64,
    pub upper: BoundJson,
    pub candidates: Vec<CandidateJson>,
    pub witness: WitnessInfo,
    pub seed: u64,
    pub search_evaluations: u64,
}

fn witness_path(explicit: Option<PathBuf>, out: Option<&Path>) -> Option<PathBuf> {
    explicit.or_else(|| out.map(|o| o.with_extension("witness.csv")))
}

/// Computes the estimate for `cfg` and writes the witness when a path is
/// known.
pub fn estimate(cfg: &RunConfig, witness: Option<PathBuf>) -> anyhow::Result<EstimateReport> {
    let spec = cfg
        .operator
        .as_ref()
        .ok_or_else(|| UsageError("estimate needs --space or --op".into()))?;
    let t = spec.build()?;
    let n = cfg.n_range.start;
    let e: RumdEstimate = rumd_lower(&t, n, cfg.q, strategy(cfg))?;
    let path = witness_path(witness, cfg.out.as_deref());
    if let Some(p) = &path {
        io::write_martingale(p, &e.witness.materialize()?)?;
    }
    Ok(EstimateReport {
        schema: ESTIMATE_SCHEMA.into(),
        config: cfg.clone(),
        operator: spec.to_string(),
        n,
        q: cfg.q,
        lower: BoundJson {
            value: e.lower,
            method: e.lower_method.tag().into(),
        },
        lower_stderr: e.lower_stderr,
        upper: BoundJson {
            value: e.upper.value,
            method: e.upper.method.tag().into(),
        },
        candidates: e.candidates.iter().map(CandidateJson::from).collect(),
        witness: WitnessInfo {
            label: witness_label(&e.witness),
            method: e.lower_method.tag().into(),
            path,
        },
        seed: e.seed,
        search_evaluations: e.search_evaluations,
    })
}
