//! Command-line front end.
//!
//! Every command resolves its parameters as flags over config file over
//! defaults, writes the resolved configuration to `<out>/config.json`, and
//! then its own outputs next to it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::io::{read_assignment, read_matrix, write_assignment, write_json, write_matrix};
use crate::localization::{localize, CoolingKind, CoolingSchedule, EntropyKind, LocalizerConfig};
use crate::synthgen::{generate, Distribution, GeneratorSpec, LayoutSpec};
use crate::tw::{default_table, run_test_with, select_k_report, SelectConfig, TestOptions};
use crate::validation::{growth_check, run_ensemble, summarize, EnsembleConfig, GrowthConfig};

#[derive(Debug, Parser)]
#[command(
    name = "biclust",
    version,
    about = "Select the number of biclusters with a Tracy-Widom test"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Base seed for data generation and annealing.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// JSON or TOML file with parameters; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a synthetic matrix with a staircase bicluster layout.
    Generate(GenerateArgs),
    /// Estimate a K0-bicluster assignment by simulated annealing.
    Localize(LocalizeArgs),
    /// Test a given assignment.
    Test(TestArgs),
    /// Sequentially test K0 = 0, 1, ... and report the first accepted.
    SelectK(SelectKArgs),
    /// Null calibration of T against TW1 over an ensemble of trials.
    Calibrate(CalibrateArgs),
    /// Growth of T under an unrealizable hypothesis K0 < K.
    GrowthCheck(GrowthArgs),
}

#[derive(Debug, Args, Default)]
pub struct DataArgs {
    /// Noise distribution.
    #[arg(long, value_enum)]
    pub dist: Option<EntropyKind>,
    /// Number of biclusters.
    #[arg(long)]
    pub k: Option<usize>,
    /// Group means, background first.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub b: Option<Vec<f64>>,
    /// Gaussian group standard deviations, background first.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub s: Option<Vec<f64>>,
    /// Shrink the means toward the center by t/10.
    #[arg(long)]
    pub t: Option<u32>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct LocalizerArgs {
    #[arg(long, value_enum)]
    pub entropy: Option<EntropyKind>,
    /// Geometric cooling rate.
    #[arg(long)]
    pub cooling_rate: Option<f64>,
    /// Temperature at which annealing stops.
    #[arg(long)]
    pub sa_threshold: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Row clusters of the compressed matrix.
    #[arg(long)]
    pub l1: Option<usize>,
    /// Column clusters of the compressed matrix.
    #[arg(long)]
    pub l2: Option<usize>,
    /// Anneal over individual entries.
    #[arg(long)]
    pub uncompressed: bool,
    /// Zero-temperature annealing for this many steps.
    #[arg(long, value_name = "STEPS")]
    pub greedy: Option<u64>,
    /// Record the objective after every step of the best restart.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    /// Matrix CSV.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub k0: Option<usize>,
    #[command(flatten)]
    pub localizer: LocalizerArgs,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Assignment CSV of the same shape.
    #[arg(long, short)]
    pub assignment: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Floor group standard deviations instead of failing on constant groups.
    #[arg(long)]
    pub std_floor: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SelectKArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub std_floor: Option<f64>,
    #[command(flatten)]
    pub localizer: LocalizerArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Matrix sizes, e.g. `500x375,2000x1500`.
    #[arg(long, value_delimiter = ',', value_parser = parse_size)]
    pub sizes: Option<Vec<(usize, usize)>>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Test against the generating assignment.
    #[arg(long)]
    pub oracle_assignment: bool,
    /// Hypothesis tested in localized mode (defaults to K).
    #[arg(long)]
    pub k0: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long)]
    pub std_floor: Option<f64>,
    #[command(flatten)]
    pub localizer: LocalizerArgs,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_delimiter = ',', value_parser = parse_size)]
    pub sizes: Option<Vec<(usize, usize)>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub k0: Option<usize>,
    #[arg(long)]
    pub std_floor: Option<f64>,
    #[command(flatten)]
    pub localizer: LocalizerArgs,
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, p) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxP, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(n)?, parse(p)?))
}

// ---------------------------------------------------------------------------
// resolved parameter records

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataParams {
    pub dist: EntropyKind,
    pub k: usize,
    pub b: Option<Vec<f64>>,
    pub s: Option<Vec<f64>>,
    pub t: Option<u32>,
}

impl Default for DataParams {
    fn default() -> Self {
        Self {
            dist: EntropyKind::Gaussian,
            k: 3,
            b: None,
            s: None,
            t: None,
        }
    }
}

impl DataParams {
    fn apply(&mut self, args: &DataArgs) {
        set(&mut self.dist, args.dist);
        set(&mut self.k, args.k);
        if args.b.is_some() {
            self.b = args.b.clone();
        }
        if args.s.is_some() {
            self.s = args.s.clone();
        }
        if args.t.is_some() {
            self.t = args.t;
        }
    }

    pub fn distribution(&self) -> Result<Distribution> {
        let base = match Distribution::preset(self.dist, self.k) {
            Distribution::Gaussian { b, s } => Distribution::Gaussian {
                b: self.b.clone().unwrap_or(b),
                s: self.s.clone().unwrap_or(s),
            },
            Distribution::Bernoulli { b } => Distribution::Bernoulli {
                b: self.b.clone().unwrap_or(b),
            },
            Distribution::Poisson { b } => Distribution::Poisson {
                b: self.b.clone().unwrap_or(b),
            },
        };
        if self.s.is_some() && self.dist != EntropyKind::Gaussian {
            return Err(Error::InvalidConfig(
                "standard deviations only apply to Gaussian data".into(),
            ));
        }
        match self.t {
            Some(t) => base.interpolated(t),
            None => Ok(base),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerateParams {
    #[serde(flatten)]
    pub data: DataParams,
    pub n: usize,
    pub p: usize,
}

impl Default for GenerateParams {
    fn default() -> Self {
        Self {
            data: DataParams::default(),
            n: 500,
            p: 375,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct LocalizeParams {
    pub k0: Option<usize>,
    #[serde(flatten)]
    pub localizer: LocalizerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TestParams {
    pub alpha: f64,
    #[serde(flatten)]
    pub test: TestOptions,
}

impl Default for TestParams {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            test: TestOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectParams {
    pub alpha: f64,
    pub k_max: usize,
    pub std_floor: Option<f64>,
    #[serde(flatten)]
    pub localizer: LocalizerConfig,
}

impl Default for SelectParams {
    fn default() -> Self {
        let d = SelectConfig::default();
        Self {
            alpha: d.alpha,
            k_max: d.k_max,
            std_floor: None,
            localizer: d.localizer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrateParams {
    #[serde(flatten)]
    pub data: DataParams,
    pub sizes: Vec<(usize, usize)>,
    pub trials: usize,
    pub oracle_assignment: bool,
    pub k0: Option<usize>,
    pub alphas: Vec<f64>,
    pub std_floor: Option<f64>,
    #[serde(flatten)]
    pub localizer: LocalizerConfig,
}

impl Default for CalibrateParams {
    fn default() -> Self {
        Self {
            data: DataParams::default(),
            sizes: vec![(500, 375)],
            trials: 500,
            oracle_assignment: false,
            k0: None,
            alphas: vec![0.01, 0.05, 0.1],
            std_floor: None,
            localizer: LocalizerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrowthParams {
    #[serde(flatten)]
    pub data: DataParams,
    pub sizes: Vec<(usize, usize)>,
    pub trials: usize,
    pub k0: usize,
    pub std_floor: Option<f64>,
    #[serde(flatten)]
    pub localizer: LocalizerConfig,
}

impl Default for GrowthParams {
    fn default() -> Self {
        Self {
            data: DataParams::default(),
            sizes: (1..=5).map(|i| (200 * i, 150 * i)).collect(),
            trials: 20,
            k0: 0,
            std_floor: None,
            localizer: LocalizerConfig::default(),
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl LocalizerArgs {
    fn apply(&self, cfg: &mut LocalizerConfig) {
        set(&mut cfg.entropy, self.entropy);
        set(&mut cfg.restarts, self.restarts);
        if self.l1.is_some() {
            cfg.l1 = self.l1;
        }
        if self.l2.is_some() {
            cfg.l2 = self.l2;
        }
        cfg.uncompressed |= self.uncompressed;
        cfg.record_trace |= self.trace;
        if let Some(steps) = self.greedy {
            cfg.cooling = CoolingSchedule::greedy(steps);
        }
        if let Some(rate) = self.cooling_rate {
            let initial = match cfg.cooling.kind {
                CoolingKind::Geometric { initial, .. } => initial,
                _ => 1.0,
            };
            cfg.cooling.kind = CoolingKind::Geometric { rate, initial };
        }
        set(&mut cfg.cooling.threshold, self.sa_threshold);
    }
}

/// Entropy must be given explicitly for external data.
fn require_entropy(args: &LocalizerArgs, file: &Value) -> Result<()> {
    if args.entropy.is_none() && file.get("entropy").is_none() {
        return Err(Error::InvalidConfig(
            "--entropy is required (gaussian, bernoulli or poisson)".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// driver

/// Parses `path` as TOML when it ends in `.toml`, JSON otherwise.
pub fn load_config_file(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: Value = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("toml"))
    {
        toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
    } else {
        serde_json::from_str(&text)?
    };
    if !value.is_object() {
        return Err(Error::InvalidConfig(format!(
            "{}: expected a table of parameters",
            path.display()
        )));
    }
    Ok(value)
}

struct Run<'a> {
    global: &'a GlobalArgs,
    file: Value,
    seed: u64,
}

impl<'a> Run<'a> {
    fn new(global: &'a GlobalArgs) -> Result<Self> {
        let file = match &global.config {
            Some(path) => load_config_file(path)?,
            None => Value::Object(Map::new()),
        };
        let seed = match global.seed {
            Some(s) => s,
            None => match file.get("seed") {
                Some(v) => v.as_u64().ok_or_else(|| {
                    Error::InvalidConfig("seed must be a non-negative integer".into())
                })?,
                None => 0,
            },
        };
        fs::create_dir_all(&global.out).map_err(|e| Error::io(&global.out, e))?;
        Ok(Self { global, file, seed })
    }

    fn params<P: DeserializeOwned>(&self) -> Result<P> {
        serde_json::from_value(self.file.clone())
            .map_err(|e| Error::InvalidConfig(format!("config file: {e}")))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.global.out.join(name)
    }

    fn persist<P: Serialize>(&self, command: &str, params: &P) -> Result<()> {
        let mut record = Map::new();
        record.insert("command".into(), json!(command));
        record.insert("seed".into(), json!(self.seed));
        if let Some(jobs) = self.global.jobs {
            record.insert("jobs".into(), json!(jobs));
        }
        if let Value::Object(fields) = serde_json::to_value(params)? {
            record.extend(fields);
        }
        write_json(self.path("config.json"), &Value::Object(record))
    }
}

/// Runs the parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            return Err(Error::InvalidConfig("--jobs must be at least 1".into()));
        }
        // only the first pool configuration in a process takes effect
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let run = Run::new(&cli.global)?;
    match &cli.command {
        Command::Generate(args) => cmd_generate(&run, args),
        Command::Localize(args) => cmd_localize(&run, args),
        Command::Test(args) => cmd_test(&run, args),
        Command::SelectK(args) => cmd_select_k(&run, args),
        Command::Calibrate(args) => cmd_calibrate(&run, args),
        Command::GrowthCheck(args) => cmd_growth_check(&run, args),
    }
}

/// Machine-readable description of a failure.
pub fn error_json(e: &Error) -> Value {
    json!({
        "error": e.kind(),
        "message": e.to_string(),
        "exit_code": e.exit_code(),
    })
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| Error::io("<stdout>", e))
}

fn cmd_generate(run: &Run, args: &GenerateArgs) -> Result<()> {
    let mut params: GenerateParams = run.params()?;
    params.data.apply(&args.data);
    set(&mut params.n, args.n);
    set(&mut params.p, args.p);
    run.persist("generate", &params)?;

    let spec = GeneratorSpec {
        distribution: params.data.distribution()?,
        layout: LayoutSpec::new(params.data.k, params.n, params.p),
        seed: run.seed,
    };
    let (a, g) = generate(&spec)?;
    write_matrix(run.path("matrix.csv"), &a)?;
    write_assignment(run.path("assignment.csv"), &g)?;
    let mut record = serde_json::to_value(&spec)?;
    record["t"] = json!(params.data.t);
    write_json(run.path("spec.json"), &record)
}

#[derive(Serialize)]
struct LocalizeSummary<'a> {
    #[serde(rename = "K0")]
    k0: usize,
    #[serde(rename = "F")]
    objective: f64,
    steps: u64,
    accepted_moves: u64,
    noop_steps: u64,
    best_restart: usize,
    l1: usize,
    l2: usize,
    restarts: &'a [crate::localization::RestartRecord],
}

fn cmd_localize(run: &Run, args: &LocalizeArgs) -> Result<()> {
    require_entropy(&args.localizer, &run.file)?;
    let mut params: LocalizeParams = run.params()?;
    if args.k0.is_some() {
        params.k0 = args.k0;
    }
    args.localizer.apply(&mut params.localizer);
    run.persist("localize", &params)?;
    let k0 = params
        .k0
        .ok_or_else(|| Error::InvalidConfig("--k0 is required".into()))?;

    let a = read_matrix(&args.input)?;
    let loc = localize(&a, k0, &params.localizer, run.seed)?;
    write_assignment(run.path("assignment.csv"), &loc.assignment)?;

    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(run.path("restarts.csv"))?;
    w.write_record([
        "restart",
        "F",
        "steps",
        "accepted_moves",
        "noop_steps",
        "error",
    ])?;
    for r in &loc.restarts {
        w.write_record([
            r.restart.to_string(),
            r.objective.map(|f| f.to_string()).unwrap_or_default(),
            r.steps.to_string(),
            r.accepted_moves.to_string(),
            r.noop_steps.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()
        .map_err(|e| Error::io(run.path("restarts.csv"), e))?;

    if let Some(trace) = &loc.outcome.trace {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(run.path("trace.csv"))?;
        w.write_record(["step", "F"])?;
        for (t, f) in trace.iter().enumerate() {
            w.write_record([t.to_string(), f.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(run.path("trace.csv"), e))?;
    }

    let summary = LocalizeSummary {
        k0,
        objective: loc.objective,
        steps: loc.outcome.steps,
        accepted_moves: loc.outcome.accepted_moves,
        noop_steps: loc.outcome.noop_steps,
        best_restart: loc.best_restart,
        l1: loc.l1,
        l2: loc.l2,
        restarts: &loc.restarts,
    };
    write_json(run.path("localize.json"), &summary)?;
    print_json(&summary)
}

fn cmd_test(run: &Run, args: &TestArgs) -> Result<()> {
    let mut params: TestParams = run.params()?;
    set(&mut params.alpha, args.alpha);
    if args.std_floor.is_some() {
        params.test.std_floor = args.std_floor;
    }
    run.persist("test", &params)?;

    let table = default_table()?;
    table.quantile(params.alpha)?;
    let a = read_matrix(&args.input)?;
    let g = read_assignment(&args.assignment)?;
    let outcome = run_test_with(&a, &g, params.alpha, &params.test, table)?;
    write_json(run.path("test.json"), &outcome)?;
    print_json(&outcome)
}

fn cmd_select_k(run: &Run, args: &SelectKArgs) -> Result<()> {
    require_entropy(&args.localizer, &run.file)?;
    let mut params: SelectParams = run.params()?;
    set(&mut params.alpha, args.alpha);
    set(&mut params.k_max, args.k_max);
    if args.std_floor.is_some() {
        params.std_floor = args.std_floor;
    }
    args.localizer.apply(&mut params.localizer);
    run.persist("select-k", &params)?;

    let a = read_matrix(&args.input)?;
    let config = SelectConfig {
        alpha: params.alpha,
        k_max: params.k_max,
        seed: run.seed,
        localizer: params.localizer,
        test: TestOptions {
            std_floor: params.std_floor,
            ..TestOptions::default()
        },
    };
    let report = select_k_report(&a, &config, default_table()?)?;
    write_json(run.path("select_k.json"), &report)?;
    print_json(&report)?;
    match report.k_hat {
        Some(_) => Ok(()),
        None => Err(Error::NotAccepted {
            trace: report.trace,
        }),
    }
}

fn entropy_for(dist: EntropyKind, args: &LocalizerArgs, file: &Value, cfg: &mut LocalizerConfig) {
    if args.entropy.is_none() && file.get("entropy").is_none() {
        cfg.entropy = dist;
    }
}

fn cmd_calibrate(run: &Run, args: &CalibrateArgs) -> Result<()> {
    let mut params: CalibrateParams = run.params()?;
    params.data.apply(&args.data);
    set(&mut params.sizes, args.sizes.clone());
    set(&mut params.trials, args.trials);
    params.oracle_assignment |= args.oracle_assignment;
    if args.k0.is_some() {
        params.k0 = args.k0;
    }
    set(&mut params.alphas, args.alphas.clone());
    if args.std_floor.is_some() {
        params.std_floor = args.std_floor;
    }
    entropy_for(
        params.data.dist,
        &args.localizer,
        &run.file,
        &mut params.localizer,
    );
    args.localizer.apply(&mut params.localizer);
    run.persist("calibrate", &params)?;

    let table = default_table()?;
    for &alpha in &params.alphas {
        table.quantile(alpha)?;
    }
    let distribution = params.data.distribution()?;
    let mut tails = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(run.path("tails.csv"))?;
    tails.write_record(["n", "p", "alpha", "tail", "r"])?;
    let mut summaries = Vec::new();
    for (idx, &(n, p)) in params.sizes.iter().enumerate() {
        let config = EnsembleConfig {
            distribution: distribution.clone(),
            k: params.data.k,
            n,
            p,
            trials: params.trials,
            seed: crate::seeds::derive_seed(run.seed, idx as u64),
            oracle_assignment: params.oracle_assignment,
            k0: params.k0,
            localizer: params.localizer.clone(),
            test: TestOptions {
                std_floor: params.std_floor,
                ..TestOptions::default()
            },
        };
        log::info!("calibrating {n}x{p} over {} trials", params.trials);
        let ensemble = run_ensemble(&config, table)?;

        let name = format!("t_values_{n}x{p}.csv");
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(run.path(&name))?;
        w.write_record(["trial", "seed", "T", "error"])?;
        for t in &ensemble.trials {
            w.write_record([
                t.trial.to_string(),
                t.seed.to_string(),
                t.statistic.map(|v| v.to_string()).unwrap_or_default(),
                t.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(run.path(&name), e))?;

        let summary = summarize(&ensemble, &params.alphas, table)?;
        for (alpha, tail) in summary.alphas.iter().zip(&summary.tails) {
            tails.write_record([
                n.to_string(),
                p.to_string(),
                alpha.to_string(),
                tail.to_string(),
                summary.r.to_string(),
            ])?;
        }
        write_json(run.path(&format!("summary_{n}x{p}.json")), &summary)?;
        summaries.push(summary);
    }
    tails
        .flush()
        .map_err(|e| Error::io(run.path("tails.csv"), e))?;
    print_json(&summaries)
}

fn cmd_growth_check(run: &Run, args: &GrowthArgs) -> Result<()> {
    let mut params: GrowthParams = run.params()?;
    params.data.apply(&args.data);
    set(&mut params.sizes, args.sizes.clone());
    set(&mut params.trials, args.trials);
    set(&mut params.k0, args.k0);
    if args.std_floor.is_some() {
        params.std_floor = args.std_floor;
    }
    entropy_for(
        params.data.dist,
        &args.localizer,
        &run.file,
        &mut params.localizer,
    );
    args.localizer.apply(&mut params.localizer);
    run.persist("growth-check", &params)?;

    let config = GrowthConfig {
        sizes: params.sizes.clone(),
        k: params.data.k,
        k0: params.k0,
        distribution: params.data.distribution()?,
        trials: params.trials,
        seed: run.seed,
        localizer: params.localizer.clone(),
        test: TestOptions {
            std_floor: params.std_floor,
            ..TestOptions::default()
        },
    };
    let points = growth_check(&config, default_table()?)?;

    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(run.path("growth.csv"))?;
    w.write_record(["n", "p", "K0", "mean_T_over_n53", "mean_T", "r", "failures"])?;
    for pt in &points {
        w.write_record([
            pt.n.to_string(),
            pt.p.to_string(),
            params.k0.to_string(),
            pt.mean_scaled.to_string(),
            pt.mean_t.to_string(),
            pt.t_values.len().to_string(),
            pt.failures.to_string(),
        ])?;
    }
    w.flush()
        .map_err(|e| Error::io(run.path("growth.csv"), e))?;
    write_json(run.path("growth.json"), &points)?;
    print_json(&points)
}
