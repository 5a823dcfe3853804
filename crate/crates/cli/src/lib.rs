//! Subcommands of the `rootsep` binary, usable in-process.
//!
//! Exit codes: 0 ok, 2 input error, 3 infeasible potentials, 4 numeric
//! failure (including an unsound bound or a failed reduction check).

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rootsep_core::bounds::{compare_all, compare_with_potentials, BoundReport, StrategyOutcome};
use rootsep_core::instance::{
    parse_instance, summarize_reduction, Instance, InstanceDocument, ReportDocument,
};
use rootsep_core::roots::roots_from_coefficients;
use rootsep_core::sampling::{instances, InstanceFamily};
use rootsep_core::spectral::Strategy;
use rootsep_core::{Complex64, Error, PotentialVector, WeightedRootGraph};

pub const ROOTS_SCHEMA: &str = "dmm-roots/1";
pub const BENCH_SCHEMA: &str = "dmm-bench/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

pub const MAX_BENCH_R: usize = 6;
pub const MAX_BENCH_TRIALS: usize = 10_000;
pub const MAX_BENCH_W: u32 = 64;
/// Bench instances whose exhaustive search box `w_max^r` exceeds this skip that strategy.
pub const BENCH_EXHAUSTIVE_BOX: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Infeasible(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InfeasibleEdge { .. } | Error::InfeasibleInEdge { .. } => {
                CliError::Infeasible(msg)
            }
            Error::NoConvergence(_)
            | Error::Degenerate(_)
            | Error::RootsNotConverged { .. }
            | Error::NotSymmetric
            | Error::ColumnVanishes { .. } => CliError::Numeric(msg),
            _ => CliError::Input(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Where the potentials come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Potentials {
    Strategies(Vec<Strategy>),
    Explicit(PotentialVector),
}

/// `all`, one strategy name, or a comma-separated list of names.
pub fn parse_strategies(s: &str) -> CliResult<Vec<Strategy>> {
    if s.trim() == "all" {
        return Ok(Strategy::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in s.split(',') {
        let st: Strategy = name.trim().parse().map_err(CliError::from)?;
        if !out.contains(&st) {
            out.push(st);
        }
    }
    Ok(out)
}

/// `"a,b,c"` with positive integers.
pub fn parse_mu(s: &str) -> CliResult<PotentialVector> {
    let mus = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| CliError::Input(format!("bad potential {t:?}: {e}")))
        })
        .collect::<CliResult<Vec<u32>>>()?;
    Ok(PotentialVector::new(mus)?)
}

fn check_tolerance(tolerance: f64) -> CliResult<()> {
    if tolerance.is_finite() && tolerance >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Input(format!("tolerance must be finite and non-negative, got {tolerance}")))
    }
}

/// Length and edge feasibility of an explicit vector.
fn check_explicit(mu: &PotentialVector, g: &WeightedRootGraph) -> CliResult<()> {
    if mu.mus().len() != g.r() {
        return Err(Error::PotentialLength {
            got: mu.mus().len(),
            expected: g.r(),
        }
        .into());
    }
    Ok(mu.check_feasible(g)?)
}

fn outcomes(potentials: &Potentials, g: &WeightedRootGraph) -> CliResult<Vec<StrategyOutcome>> {
    match potentials {
        Potentials::Strategies(list) => Ok(list
            .iter()
            .map(|&s| StrategyOutcome::from_strategy(s, g))
            .collect()),
        Potentials::Explicit(mu) => {
            check_explicit(mu, g)?;
            Ok(vec![StrategyOutcome::explicit(mu, g)])
        }
    }
}

/// Every bound at the requested potentials.
pub fn cmd_bounds(
    instance: &Instance,
    potentials: &Potentials,
    tolerance: f64,
) -> CliResult<ReportDocument> {
    check_tolerance(tolerance)?;
    let outcomes = outcomes(potentials, &instance.graph)?;
    let report = compare_with_potentials(&instance.roots, &instance.graph, outcomes)?;
    Ok(ReportDocument::new(instance, tolerance, Some(report), Vec::new()))
}

/// Reduction replay and Hadamard checks for every feasible potential vector.
pub fn cmd_verify(
    instance: &Instance,
    potentials: &Potentials,
    tolerance: f64,
) -> CliResult<ReportDocument> {
    check_tolerance(tolerance)?;
    let outcomes = outcomes(potentials, &instance.graph)?;
    let mut reductions = Vec::new();
    for o in outcomes.iter().filter(|o| o.feasible) {
        let mu = PotentialVector::new(o.mu.clone().expect("feasible outcomes carry μ"))?;
        reductions.push(summarize_reduction(instance, &o.label, &mu, tolerance));
    }
    if reductions.is_empty() {
        let reasons: Vec<String> = outcomes
            .iter()
            .map(|o| format!("{}: {}", o.label, o.error.as_deref().unwrap_or("refused")))
            .collect();
        return Err(CliError::Infeasible(format!(
            "no feasible potential vector ({})",
            reasons.join("; ")
        )));
    }
    let mut doc = ReportDocument::new(instance, tolerance, None, reductions);
    doc.potentials = outcomes;
    Ok(doc)
}

/// Exit code of a completed report.
pub fn report_exit_code(doc: &ReportDocument) -> i32 {
    if doc.ok {
        EXIT_OK
    } else {
        EXIT_NUMERIC
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootsDocument {
    pub schema: String,
    pub approximate: bool,
    pub degree: usize,
    /// Distinct roots after clustering.
    pub roots: Vec<[f64; 2]>,
    pub multiplicities: Vec<u32>,
    /// All `degree` approximations before clustering.
    pub approximations: Vec<[f64; 2]>,
    pub iterations: usize,
    pub max_relative_residual: f64,
}

fn pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().map(|z| [z.re, z.im]).collect()
}

/// Roots of a coefficient list (lowest degree first).
pub fn cmd_roots(json: &str) -> CliResult<RootsDocument> {
    let doc: InstanceDocument = serde_json::from_str(json)
        .map_err(|e| CliError::Input(format!("malformed JSON: {e}")))?;
    let Some(coefficients) = doc.coefficients else {
        return Err(CliError::Input("`coefficients` is required".into()));
    };
    if doc.roots.is_some() {
        return Err(CliError::Input("give coefficients only".into()));
    }
    let coefficients: Vec<Complex64> =
        coefficients.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    let approx = roots_from_coefficients(&coefficients)?;
    Ok(RootsDocument {
        schema: ROOTS_SCHEMA.into(),
        approximate: true,
        degree: approx.approximations.len(),
        roots: pairs(approx.multiset.roots()),
        multiplicities: approx.multiset.multiplicities().to_vec(),
        approximations: pairs(&approx.approximations),
        iterations: approx.iterations,
        max_relative_residual: approx.max_relative_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchParams {
    pub seed: u64,
    pub trials: usize,
    pub r_min: usize,
    pub r_max: usize,
    pub w_max: u32,
    pub tolerance: f64,
}

impl Default for BenchParams {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 500,
            r_min: 2,
            r_max: MAX_BENCH_R,
            w_max: 6,
            tolerance: rootsep_core::bounds::DEFAULT_TOLERANCE,
        }
    }
}

impl BenchParams {
    pub fn family(&self) -> InstanceFamily {
        InstanceFamily {
            r_min: self.r_min,
            r_max: self.r_max,
            w_max: self.w_max,
            ..InstanceFamily::default()
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        check_tolerance(self.tolerance)?;
        if self.r_max > MAX_BENCH_R {
            return Err(CliError::Input(format!("r_max must be at most {MAX_BENCH_R}")));
        }
        if self.trials > MAX_BENCH_TRIALS {
            return Err(CliError::Input(format!("trials must be at most {MAX_BENCH_TRIALS}")));
        }
        if self.w_max > MAX_BENCH_W {
            return Err(CliError::Input(format!("w_max must be at most {MAX_BENCH_W}")));
        }
        self.family().validate().map_err(CliError::from)
    }
}

/// Bound columns of the bench CSV, in order.
pub const BENCH_BOUNDS: [&str; 11] = [
    "classic_sep",
    "dmm_unweighted",
    "dmm_sdisc_eigenwillig",
    "dmm_sdisc_amgm",
    "naive_weighted",
    "weighted_main[ones]",
    "weighted_main[uniform]",
    "weighted_main[nuclear]",
    "weighted_main[exhaustive]",
    "weighted_nuclear",
    "weighted_nuclear_with_det",
];

pub fn bench_columns() -> Vec<String> {
    let mut cols: Vec<String> = ["trial", "r", "edges", "w_max", "actual_log2", "edge_product_log2"]
        .map(String::from)
        .to_vec();
    cols.extend(BENCH_BOUNDS.iter().map(|s| s.to_string()));
    cols.extend(
        [
            "emt",
            "tightest",
            "tightest_log2",
            "m_exponent_main",
            "m_exponent_naive",
            "m_exponent_gap",
            "sqrt3_gap",
            "nn_gap",
            "main_m_exponent_smaller",
            "violations",
        ]
        .map(String::from),
    );
    cols
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn bench_strategies(g: &WeightedRootGraph) -> Vec<Strategy> {
    let search_box = (g.w_max().max(1) as u64).saturating_pow(g.r() as u32);
    Strategy::ALL
        .into_iter()
        .filter(|&s| s != Strategy::Exhaustive || search_box <= BENCH_EXHAUSTIVE_BOX)
        .collect()
}

fn bench_row(trial: usize, g: &WeightedRootGraph, report: &BoundReport, tolerance: f64) -> String {
    let entry = |name: &str| report.entry(name);
    let mut fields = vec![
        trial.to_string(),
        g.r().to_string(),
        g.edges().len().to_string(),
        g.w_max().to_string(),
        report.actual_log2.to_string(),
        num(entry("dmm_unweighted").map(|e| e.target_log2)),
    ];
    for name in BENCH_BOUNDS {
        fields.push(num(entry(name).and_then(|e| e.log2_value)));
    }
    fields.push(num(entry("emt").and_then(|e| e.log2_value)));
    let tightest = report.tightest.clone().unwrap_or_default();
    fields.push(tightest.clone());
    fields.push(num(entry(&tightest).and_then(|e| e.log2_value)));
    match &report.terms {
        Some(t) => fields.extend([
            t.main_m_exponent.to_string(),
            t.naive_m_exponent.to_string(),
            t.m_exponent_gap().to_string(),
            t.sqrt3_gap().to_string(),
            t.nn_gap().to_string(),
            t.main_m_exponent_smaller.to_string(),
        ]),
        None => fields.extend(std::iter::repeat_n(String::new(), 6)),
    }
    fields.push(report.unsound_entries(tolerance).len().to_string());
    // bound names contain no commas or quotes, so no escaping is needed
    fields.join(",")
}

/// Seeded sweep over random instances; rows come out in trial order.
pub fn cmd_bench(params: &BenchParams) -> CliResult<String> {
    params.validate()?;
    let family = params.family();
    let drawn = instances(params.seed, params.trials, &family)?;
    let rows = drawn
        .par_iter()
        .enumerate()
        .map(|(trial, (rm, g))| {
            let report = compare_all(rm, g, &bench_strategies(g))?;
            Ok(bench_row(trial, g, &report, params.tolerance))
        })
        .collect::<CliResult<Vec<String>>>()?;
    let mut out = format!(
        "# {BENCH_SCHEMA} seed={} trials={} r={}..{} w_max={} tolerance={}\n",
        params.seed, params.trials, params.r_min, params.r_max, params.w_max, params.tolerance
    );
    out.push_str(&bench_columns().join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Parser)]
#[command(name = "rootsep", version, about = "Weighted root-distance products and their lower bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every bound on an instance.
    Bounds(PotentialArgs),
    /// Replay the column reduction and check the Hadamard chain.
    Verify(PotentialArgs),
    /// Seeded sweep over random instances, written as CSV.
    Bench(BenchArgs),
    /// Approximate roots of a coefficient list.
    Roots(InputArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Instance JSON file; standard input when omitted or `-`.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// ones, uniform, nuclear, exhaustive, all, or a comma-separated list.
    #[arg(long, default_value = "all")]
    pub strategy: String,
    /// Explicit potentials "a,b,c", one per distinct root; overrides --strategy.
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long, default_value_t = rootsep_core::bounds::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 2)]
    pub r_min: usize,
    #[arg(long, default_value_t = MAX_BENCH_R)]
    pub r_max: usize,
    #[arg(long, default_value_t = 6)]
    pub w_max: u32,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = rootsep_core::bounds::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

impl InputArgs {
    fn read(&self, stdin: &mut dyn Read) -> CliResult<String> {
        let mut text = String::new();
        match &self.input {
            Some(p) if p.as_os_str() != "-" => {
                text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            }
            _ => {
                stdin
                    .read_to_string(&mut text)
                    .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
            }
        }
        Ok(text)
    }
}

impl PotentialArgs {
    fn potentials(&self) -> CliResult<Potentials> {
        match &self.mu {
            Some(mu) => Ok(Potentials::Explicit(parse_mu(mu)?)),
            None => Ok(Potentials::Strategies(parse_strategies(&self.strategy)?)),
        }
    }

    fn load(&self, stdin: &mut dyn Read) -> CliResult<(Instance, Potentials)> {
        let text = self.input.read(stdin)?;
        let instance = parse_instance(&text)?;
        Ok((instance, self.potentials()?))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Runs one parsed command; output is written only when the command succeeds.
pub fn execute(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> CliResult<i32> {
    let (text, code) = match &cli.command {
        Command::Bounds(args) => {
            let (instance, potentials) = args.load(stdin)?;
            let doc = cmd_bounds(&instance, &potentials, args.tolerance)?;
            (to_json(&doc), report_exit_code(&doc))
        }
        Command::Verify(args) => {
            let (instance, potentials) = args.load(stdin)?;
            let doc = cmd_verify(&instance, &potentials, args.tolerance)?;
            (to_json(&doc), report_exit_code(&doc))
        }
        Command::Roots(args) => (to_json(&cmd_roots(&args.read(stdin)?)?), EXIT_OK),
        Command::Bench(args) => {
            let csv = cmd_bench(&BenchParams {
                seed: args.seed,
                trials: args.trials,
                r_min: args.r_min,
                r_max: args.r_max,
                w_max: args.w_max,
                tolerance: args.tolerance,
            })?;
            if let Some(path) = &args.csv {
                std::fs::write(path, &csv)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                return Ok(EXIT_OK);
            }
            (csv, EXIT_OK)
        }
    };
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Input(format!("stdout: {e}")))?;
    Ok(code)
}

/// Parses arguments, runs, and reports errors on `stderr`. Returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli, stdin, stdout) {
        Ok(code) => {
            if code == EXIT_NUMERIC {
                let _ = writeln!(stderr, "rootsep: some checks failed; see the `ok` fields of the report");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "rootsep: {e}");
            e.exit_code()
        }
    }
}
