//! `slm` command line: argument parsing, dispatch and exit codes.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or I/O error, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Debug;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use slm_core::sim::{
    self, bayes_risk_counting, bayes_risk_mc, benchmark_with, concentration_probe, illustration_example,
    regret_curve_with, BenchConfig, Method, ModelId, SimulationSpec,
};
use slm_core::solver::SolverOptions;
use slm_core::tuning::{fit_tuned, tune_beta, tune_eta, CvScheme, TuneGrid, TuneOptions};
use slm_core::{MixedDataset, SlmModel};

use crate::error::DataError;
use crate::ingest::{header_names, load_dataset_with, Ingested, LoadOptions};
use crate::lab;
use crate::model_file::{load_model, save_model};
use crate::schema::{auto_schema, parse_schema};
use crate::table::{emit_table, fmt_f64, read_text, write_atomic, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Core(#[from] slm_core::Error),
}

fn core_exit_code(e: &slm_core::Error) -> i32 {
    match e {
        slm_core::Error::NoConvergence { .. } | slm_core::Error::NonFinite(_) => EXIT_NUMERICAL,
        _ => EXIT_DATA,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) | CliError::Data(DataError::Core(e)) => core_exit_code(e),
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Parser)]
#[command(
    name = "slm",
    version,
    about = "Location-model linear discriminant for mixed binary and continuous data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a train (and optionally test) set from a simulation model.
    Simulate(SimulateArgs),
    /// Fit a classifier from a CSV file and save it as a model file.
    Fit(FitArgs),
    /// Classify the rows of a CSV file with a saved model.
    Predict(PredictArgs),
    /// Report the leave-one-out error of every (theta, lambda_beta) grid point.
    Tune(TuneArgs),
    /// Mean and sd of test errors over replicated simulations.
    Benchmark(BenchmarkArgs),
    /// Test error minus Bayes risk across training sizes.
    Regret(RegretArgs),
    /// Monte-Carlo Bayes risk of a simulation model.
    BayesRisk(BayesRiskArgs),
    /// Bayes and best linear risks of the one-binary, one-continuous example.
    Illustrate(IllustrateArgs),
    /// Uniform error of the class-1 kernel mean on a Hamming ball as n grows.
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Simulation model, 1 to 4.
    #[arg(long, default_value_t = 1)]
    pub model: u8,
    /// Number of binary location variables.
    #[arg(long = "d", default_value_t = 10)]
    pub d: usize,
    /// Number of continuous features.
    #[arg(long = "p", default_value_t = 20)]
    pub p: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl ModelArgs {
    fn spec(&self, n1: usize, n2: usize) -> CliResult<SimulationSpec> {
        let model = match ModelId::from_number(self.model) {
            Ok(m) => m,
            Err(_) => return usage(format!("--model must be 1, 2, 3 or 4, got {}", self.model)),
        };
        if self.d == 0 || self.p == 0 {
            return usage("--d and --p must be positive");
        }
        Ok(SimulationSpec::new(model, self.d, self.p, n1, n2, self.seed)?)
    }

    fn dp(&self) -> String {
        format!("({},{})", self.d, self.p)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: ModelArgs,
    #[arg(long, default_value_t = 200)]
    pub n1: usize,
    #[arg(long, default_value_t = 200)]
    pub n2: usize,
    /// Training CSV (columns u1..ud, z1..zp, label).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the 100 + 100 test draw here.
    #[arg(long)]
    pub test_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Training CSV.
    #[arg(long)]
    pub train: PathBuf,
    /// Schema file, one `name,kind` line per column.
    #[arg(long, required_unless_present = "auto_schema", conflicts_with = "auto_schema")]
    pub schema: Option<PathBuf>,
    /// Infer the schema from u1..ud, z1..zp, label column names.
    #[arg(long)]
    pub auto_schema: bool,
    /// Label value treated as class 1 (default: the lexicographically smaller one).
    #[arg(long)]
    pub class1_label: Option<String>,
}

impl DataArgs {
    fn load(&self) -> CliResult<Ingested> {
        let text = read_text(&self.train)?;
        let schema = match &self.schema {
            Some(path) => parse_schema(&read_text(path)?)?,
            None => {
                let names = header_names(&text)?;
                auto_schema(&names.iter().map(String::as_str).collect::<Vec<_>>())?
            }
        };
        let opts = LoadOptions {
            class1_label: self.class1_label.clone(),
        };
        Ok(load_dataset_with(&text, &schema, &opts)?)
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Kernel parameter grid (comma separated, in (0, 0.5]).
    #[arg(long, value_delimiter = ',')]
    pub theta: Vec<f64>,
    /// Direction penalty grid (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub lambda_beta: Vec<f64>,
    /// Intercept penalty grid (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub lambda_eta: Vec<f64>,
    /// Use K-fold held-out scores instead of exact leave-one-out.
    #[arg(long)]
    pub kfold: Option<usize>,
    /// Leave samples whose direction solve fails out of the error counts.
    #[arg(long)]
    pub skip_solver_failures: bool,
    /// Coordinate-descent tolerance for direction solves [default: 1e-7].
    #[arg(long)]
    pub solver_tol: Option<f64>,
    /// Coordinate-descent sweep limit for direction solves [default: 10000].
    #[arg(long)]
    pub solver_max_iter: Option<usize>,
}

fn sorted(mut v: Vec<f64>, descending: bool) -> Vec<f64> {
    v.sort_by(|a, b| if descending { b.total_cmp(a) } else { a.total_cmp(b) });
    v.dedup();
    v
}

impl GridArgs {
    fn options(&self) -> CliResult<TuneOptions> {
        let cv = match self.kfold {
            None => CvScheme::LeaveOneOut,
            Some(k) if k >= 2 => CvScheme::KFold(k),
            Some(k) => return usage(format!("--kfold must be at least 2, got {k}")),
        };
        let mut solver = SolverOptions::default();
        if let Some(tol) = self.solver_tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return usage("--solver-tol must be positive");
            }
            solver.tol = tol;
        }
        if let Some(max_iter) = self.solver_max_iter {
            if max_iter == 0 {
                return usage("--solver-max-iter must be at least 1");
            }
            solver.max_iter = max_iter;
        }
        Ok(TuneOptions {
            cv,
            solver,
            skip_solver_failures: self.skip_solver_failures,
            ..TuneOptions::default()
        })
    }

    fn grid(&self, data: &MixedDataset) -> CliResult<TuneGrid> {
        if self.theta.iter().any(|t| !(*t > 0.0 && *t <= 0.5)) {
            return usage("--theta values must lie in (0, 0.5]");
        }
        if self
            .lambda_beta
            .iter()
            .chain(&self.lambda_eta)
            .any(|l| !(*l >= 0.0 && l.is_finite()))
        {
            return usage("penalty values must be finite and nonnegative");
        }
        let mut grid = TuneGrid::default_for(data)?;
        if !self.theta.is_empty() {
            grid.thetas = sorted(self.theta.clone(), false);
        }
        if !self.lambda_beta.is_empty() {
            grid.lambdas_beta = sorted(self.lambda_beta.clone(), true);
        }
        if !self.lambda_eta.is_empty() {
            grid.lambdas_eta = sorted(self.lambda_eta.clone(), true);
        }
        Ok(grid)
    }

    /// All three hyperparameters pinned to a single value.
    fn fixed(&self) -> Option<(f64, f64, f64)> {
        match (&self.theta[..], &self.lambda_beta[..], &self.lambda_eta[..]) {
            ([t], [b], [e]) => Some((*t, *b, *e)),
            _ => None,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the (theta, lambda_beta, r0) tuning table here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Table destination (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `fit`.
    #[arg(long)]
    pub model: PathBuf,
    /// CSV with the training columns; the label column is optional.
    #[arg(long)]
    pub test: PathBuf,
    /// Predictions destination (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Precompute directions on the Hamming ball of this radius before predicting.
    #[arg(long)]
    pub eager_radius: Option<usize>,
    /// Ball center as a 0/1 string of length d (default: all zeros).
    #[arg(long, requires = "eager_radius")]
    pub eager_center: Option<String>,
}

fn parse_methods(list: &[String]) -> CliResult<Vec<Method>> {
    let mut methods = Vec::new();
    for name in list {
        match Method::parse(name.trim()) {
            Some(m) if !methods.contains(&m) => methods.push(m),
            Some(_) => {}
            None => return usage(format!("unknown method `{name}` (expected slm, plg, dsda or bayes)")),
        }
    }
    if methods.is_empty() {
        return usage("--methods must name at least one method");
    }
    Ok(methods)
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub sim: ModelArgs,
    #[arg(long, default_value_t = 200)]
    pub n1: usize,
    #[arg(long, default_value_t = 200)]
    pub n2: usize,
    /// Replications [default: 20].
    #[arg(long, conflicts_with = "long")]
    pub reps: Option<u64>,
    /// Full-length run with 100 replications.
    #[arg(long)]
    pub long: bool,
    /// Comma separated subset of slm, plg, dsda, bayes.
    #[arg(long, value_delimiter = ',', default_value = "slm,plg,dsda")]
    pub methods: Vec<String>,
    /// Tune with K folds instead of leave-one-out.
    #[arg(long)]
    pub kfold: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegretArgs {
    #[command(flatten)]
    pub sim: ModelArgs,
    /// Total training sizes, split evenly between the classes.
    #[arg(long = "n", value_delimiter = ',', default_value = "200,500")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "slm,plg,dsda,bayes")]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = 20)]
    pub reps: u64,
    /// Monte-Carlo draws for the Bayes risk.
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
    #[arg(long)]
    pub kfold: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BayesRiskArgs {
    #[command(flatten)]
    pub sim: ModelArgs,
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
    /// Count errors of the Bayes rule on full draws instead of averaging conditional risks.
    #[arg(long)]
    pub counting: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IllustrateArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub sim: ModelArgs,
    /// Class-1 sample sizes.
    #[arg(long = "n", value_delimiter = ',', default_value = "250,500,1000,2000")]
    pub n: Vec<usize>,
    /// Hamming-ball radius around the all-zeros location.
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    #[arg(long, default_value_t = 0.2)]
    pub theta: f64,
    /// Seeds averaged per sample size.
    #[arg(long, default_value_t = 10)]
    pub probes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn cv_from(kfold: Option<usize>) -> CliResult<BenchConfig> {
    match kfold {
        None => Ok(BenchConfig::default()),
        Some(k) if k >= 2 => Ok(BenchConfig::default().with_cv(CvScheme::KFold(k))),
        Some(k) => usage(format!("--kfold must be at least 2, got {k}")),
    }
}

/// Prints the resolved configuration to standard error.
fn echo(name: &str, seed: Option<u64>, args: &impl Debug) {
    match seed {
        Some(s) => eprintln!("slm {name}: seed {s}"),
        None => eprintln!("slm {name}: no randomness"),
    }
    eprintln!("slm {name}: {args:?}");
}

fn header_comments(table: Table, name: &str, seed: Option<u64>, args: &impl Debug) -> Table {
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    table
        .with_comment(format!("slm {name} seed {seed}"))
        .with_comment(format!("{args:?}"))
}

/// Writes to `out` atomically, or to standard output.
fn deliver(table: &Table, out: Option<&Path>) -> CliResult {
    match out {
        Some(path) => emit_table(table, path)?,
        None => {
            let text = table.to_csv()?;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| DataError::io("<stdout>", e))?;
        }
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> CliResult {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit(a),
        Command::Predict(a) => predict(a),
        Command::Tune(a) => tune(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Regret(a) => regret(a),
        Command::BayesRisk(a) => bayes_risk(a),
        Command::Illustrate(a) => illustrate(a),
        Command::Probe(a) => probe(a),
    }
}

/// Columns `u1..ud, z1..zp, label` with labels `1` and `2`.
pub fn dataset_table(data: &MixedDataset) -> Table {
    let header = (1..=data.d())
        .map(|j| format!("u{j}"))
        .chain((1..=data.p()).map(|j| format!("z{j}")))
        .chain(["label".to_string()]);
    let mut table = Table::new(header);
    for (class, obs) in data.iter_labelled() {
        let row = obs
            .u
            .iter()
            .map(|b| b.to_string())
            .chain(obs.z.iter().map(|&v| fmt_f64(v)))
            .chain([class.index().to_string()]);
        table.push(row);
    }
    table
}

fn simulate(a: &SimulateArgs) -> CliResult {
    echo("simulate", Some(a.sim.seed), a);
    if a.n1 == 0 || a.n2 == 0 {
        return usage("--n1 and --n2 must be positive");
    }
    let spec = a.sim.spec(a.n1, a.n2)?;
    let (train, test) = sim::sample_dataset(&spec)?;
    emit_table(
        &header_comments(dataset_table(&train), "simulate", Some(a.sim.seed), a),
        &a.out,
    )?;
    if let Some(path) = &a.test_out {
        emit_table(
            &header_comments(dataset_table(&test), "simulate", Some(a.sim.seed), a),
            path,
        )?;
    }
    Ok(())
}

fn r0_table(entries: &[slm_core::tuning::R0Entry]) -> Table {
    let mut table = Table::new(["theta", "lambda_beta", "r0"]);
    for e in entries {
        table.push([fmt_f64(e.theta), fmt_f64(e.lambda_beta), e.r0.to_string()]);
    }
    table
}

fn fit(a: &FitArgs) -> CliResult {
    echo("fit", None, a);
    let Ingested { dataset, encoding } = a.data.load()?;
    let opts = a.grid.options()?;
    let model = match a.grid.fixed() {
        Some((theta, lambda_beta, lambda_eta)) if a.report.is_none() => {
            if !(theta > 0.0 && theta <= 0.5) || !(lambda_beta >= 0.0) || !(lambda_eta >= 0.0) {
                return usage("--theta must lie in (0, 0.5] and penalties must be nonnegative");
            }
            SlmModel::fit(dataset, theta, lambda_beta, lambda_eta)?.with_solver_options(opts.solver.clone())
        }
        _ => {
            let grid = a.grid.grid(&dataset)?;
            let tuned = fit_tuned(&dataset, &grid, &opts)?;
            let failures: usize = tuned.beta.table.iter().map(|e| e.solver_failures).sum();
            eprintln!(
                "slm fit: theta {} lambda_beta {} lambda_eta {} (r0 {}, full-rule errors {}, solver failures {})",
                tuned.beta.theta,
                tuned.beta.lambda_beta,
                tuned.eta.lambda_eta,
                tuned.beta.r0,
                tuned.eta.errors,
                failures
            );
            if let Some(path) = &a.report {
                emit_table(&header_comments(r0_table(&tuned.beta.table), "fit", None, a), path)?;
            }
            tuned.model
        }
    };
    write_atomic(&a.out, save_model(&model, Some(&encoding)).as_bytes())?;
    Ok(())
}

fn tune(a: &TuneArgs) -> CliResult {
    echo("tune", None, a);
    let Ingested { dataset, .. } = a.data.load()?;
    let opts = a.grid.options()?;
    let grid = a.grid.grid(&dataset)?;
    let beta = tune_beta(&dataset, &grid, &opts)?;
    let eta = tune_eta(&dataset, &beta.zeta, &grid, &opts)?;
    let summary = format!(
        "selected theta {} lambda_beta {} lambda_eta {}",
        beta.theta, beta.lambda_beta, eta.lambda_eta
    );
    eprintln!("slm tune: {summary}");
    let table = header_comments(r0_table(&beta.table), "tune", None, a).with_comment(summary);
    deliver(&table, a.out.as_deref())
}

fn parse_center(text: &str, d: usize) -> CliResult<Vec<u8>> {
    let bits: Option<Vec<u8>> = text
        .chars()
        .map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .collect();
    match bits {
        Some(b) if b.len() == d => Ok(b),
        _ => usage(format!("--eager-center must be a 0/1 string of length {d}")),
    }
}

fn predict(a: &PredictArgs) -> CliResult {
    echo("predict", None, a);
    let (model, encoding) = load_model(&read_text(&a.model)?)?;
    let encoding = encoding.ok_or_else(|| DataError::ModelFile("model has no column encoding".into()))?;
    let rows = encoding.encode_csv(&read_text(&a.test)?)?;
    if let Some(radius) = a.eager_radius {
        let d = model.train().d();
        let center = match &a.eager_center {
            Some(text) => parse_center(text, d)?,
            None => vec![0; d],
        };
        let visited = model.warm_ball(&center, radius)?;
        eprintln!("slm predict: precomputed {visited} locations");
    }
    let labelled = !rows.is_empty() && rows.iter().all(|r| r.label.is_some());
    let mut table = if labelled {
        Table::new(["row", "predicted", "actual"])
    } else {
        Table::new(["row", "predicted"])
    };
    let mut wrong = 0usize;
    for (i, row) in rows.iter().enumerate() {
        let class = model.classify(&row.observation.z, &row.observation.u)?;
        let mut fields = vec![(i + 1).to_string(), encoding.label_of(class).to_string()];
        if let (true, Some(truth)) = (labelled, row.label) {
            if truth != class {
                wrong += 1;
            }
            fields.push(encoding.label_of(truth).to_string());
        }
        table.push(fields);
    }
    if labelled {
        let rate = wrong as f64 / rows.len() as f64;
        let summary = format!("test error {rate} ({wrong} of {} rows)", rows.len());
        eprintln!("slm predict: {summary}");
        table = table.with_comment(summary);
    }
    deliver(&table, a.out.as_deref())
}

fn benchmark(a: &BenchmarkArgs) -> CliResult {
    let reps = if a.long { 100 } else { a.reps.unwrap_or(20) };
    echo("benchmark", Some(a.sim.seed), a);
    if reps == 0 {
        return usage("--reps must be at least 1");
    }
    let methods = parse_methods(&a.methods)?;
    let spec = a.sim.spec(a.n1, a.n2)?;
    let config = cv_from(a.kfold)?;
    let rows = benchmark_with(&spec, &methods, reps, &config, &lab::parallel)?;
    let mut table = Table::new(["model", "dp", "method", "mean", "sd"]);
    for r in &rows {
        if r.failures > 0 {
            eprintln!(
                "slm benchmark: {} failed in {} of {} replications: {}",
                r.method.name(),
                r.failures,
                reps,
                r.first_failure.as_deref().unwrap_or("")
            );
        }
        table.push([
            a.sim.model.to_string(),
            a.sim.dp(),
            r.method.name().to_string(),
            fmt_f64(r.mean),
            fmt_f64(r.sd),
        ]);
    }
    let table = header_comments(table, "benchmark", Some(a.sim.seed), a).with_comment(format!("replications {reps}"));
    deliver(&table, a.out.as_deref())
}

fn regret(a: &RegretArgs) -> CliResult {
    echo("regret", Some(a.sim.seed), a);
    if a.reps == 0 || a.draws == 0 {
        return usage("--reps and --draws must be at least 1");
    }
    if a.n.is_empty() || a.n.iter().any(|n| n % 2 != 0 || *n < 4) {
        return usage("--n values must be even and at least 4");
    }
    let methods = parse_methods(&a.methods)?;
    let spec = a.sim.spec(2, 2)?;
    let config = cv_from(a.kfold)?;
    let rows = regret_curve_with(&spec, &a.n, &methods, a.reps, a.draws, &config, &lab::parallel)?;
    let mut table = Table::new(["n", "method", "regret"]);
    for r in &rows {
        table.push([r.n.to_string(), r.method.name().to_string(), fmt_f64(r.regret)]);
    }
    if let Some(r) = rows.first() {
        table = table.with_comment(format!("bayes risk {}", r.bayes_risk));
    }
    deliver(&header_comments(table, "regret", Some(a.sim.seed), a), a.out.as_deref())
}

fn bayes_risk(a: &BayesRiskArgs) -> CliResult {
    echo("bayes-risk", Some(a.sim.seed), a);
    if a.draws == 0 {
        return usage("--draws must be at least 1");
    }
    let spec = a.sim.spec(1, 1)?;
    let (estimator, est) = if a.counting {
        ("counting", bayes_risk_counting(&spec, a.draws))
    } else {
        ("conditional", bayes_risk_mc(&spec, a.draws))
    };
    let mut table = Table::new(["model", "dp", "estimator", "estimate", "std_error", "draws"]);
    table.push([
        a.sim.model.to_string(),
        a.sim.dp(),
        estimator.to_string(),
        fmt_f64(est.estimate),
        fmt_f64(est.std_error),
        est.draws.to_string(),
    ]);
    deliver(
        &header_comments(table, "bayes-risk", Some(a.sim.seed), a),
        a.out.as_deref(),
    )
}

fn illustrate(a: &IllustrateArgs) -> CliResult {
    echo("illustrate", Some(a.seed), a);
    if a.draws < 10_000 {
        return usage("--draws must be at least 10000");
    }
    let (bayes, best_linear) = illustration_example(a.draws, a.seed);
    let mut table = Table::new(["bayes", "best_linear"]);
    table.push([fmt_f64(bayes), fmt_f64(best_linear)]);
    deliver(&header_comments(table, "illustrate", Some(a.seed), a), a.out.as_deref())
}

fn probe(a: &ProbeArgs) -> CliResult {
    echo("probe", Some(a.sim.seed), a);
    if a.n.is_empty() || a.n.contains(&0) {
        return usage("--n values must be positive");
    }
    if a.radius > a.sim.d {
        return usage("--radius cannot exceed --d");
    }
    if !(0.0..=0.5).contains(&a.theta) {
        return usage("--theta must lie in [0, 0.5]");
    }
    if a.probes == 0 {
        return usage("--probes must be at least 1");
    }
    let spec = a.sim.spec(1, 1)?;
    let rows = concentration_probe(&spec, &a.n, a.radius, a.theta, a.probes)?;
    let mut table = Table::new(["n", "sup_error"]);
    for r in &rows {
        table.push([r.n.to_string(), fmt_f64(r.sup_error_mean)]);
    }
    deliver(&header_comments(table, "probe", Some(a.sim.seed), a), a.out.as_deref())
}
