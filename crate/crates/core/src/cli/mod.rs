//! The `memchan` command line: channel files in, CSV and JSON artifacts out.
//!
//! Exit codes: 0 on success, 1 when the input or configuration is invalid, 2
//! when `verify` finds a violated property. Artifacts are written only when a
//! command succeeds.

pub mod verify;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::capacity::{
    capacity_convergence_experiment, default_memory_candidates, lower_upper_capacity,
    ConvergenceExperiment, ExperimentOptions, OptimizerOptions,
};
use crate::channels::{apply_memory_channel, memory_state_after};
use crate::entropics::{holevo_chi, mutual_information, von_neumann_entropy, CQEnsemble};
use crate::indecomposability::{probe_mixing, MixingProbeConfig, DEFAULT_STEP_BUDGET};
use crate::io::{
    json_error, load_channel_file, matrix_from_doc, matrix_to_doc, state_from_doc, ArtifactSet,
    BasisDoc, Cell, CsvTable, MatrixDoc, StateDoc,
};
use crate::linalg::{hermitian_eigvals, CMatrix, DensityMatrix, SpaceShape};
use crate::random::{haar_state, sub_rng};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "memchan",
    version,
    about = "Quantum channels with memory: simulation, entropies, mixing and capacity estimates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a channel to an input state and dump the output and final memory.
    Simulate(SimulateArgs),
    /// Entropic quantities of a state or an ensemble.
    Entropy(EntropyArgs),
    /// Estimate the memory mixing time and its distance trajectory.
    ProbeMixing(ProbeMixingArgs),
    /// Lower and upper finite-block capacity estimates.
    Capacity(CapacityArgs),
    /// Run the property suite on a channel.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Directory for the result files.
    #[arg(long, default_value = "memchan-out")]
    pub output: PathBuf,
    /// Write only one format; both are written by default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// `random`, `random-mixed`, `maximally-mixed`, `basis:K` or a state file.
    #[arg(long, default_value = "random")]
    pub input: String,
    /// Initial memory in the same syntax; the channel's own by default.
    #[arg(long)]
    pub memory: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    /// State file holding `state` or `ensemble`, with optional `dims`.
    #[arg(long)]
    pub state: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeMixingArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Step budget of the probe.
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    pub n_max: usize,
    /// Random memory pairs besides the basis pairs.
    #[arg(long, default_value_t = 6)]
    pub pairs: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// A single block length; skips the mixing probe and the bound.
    #[arg(long, conflicts_with = "n_max")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long)]
    pub ensemble_size: Option<usize>,
    #[arg(long)]
    pub product_only: bool,
    /// Run the experiment on channels that fail the fixed-point check.
    #[arg(long)]
    pub allow_non_fixed_point: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// Random inputs per block length for the channel under test.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Everything that determines the artifacts; embedded in every JSON file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_only: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memory: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub formats: Vec<Format>,
}

impl RunConfig {
    fn new(subcommand: &str, common: &CommonArgs) -> Self {
        Self {
            subcommand: subcommand.into(),
            channel: None,
            n: None,
            n_max: None,
            epsilon: None,
            seed: common.seed,
            restarts: None,
            ensemble_size: None,
            product_only: None,
            input: None,
            memory: None,
            state: None,
            samples: None,
            formats: match common.format {
                Some(f) => vec![f],
                None => vec![Format::Csv, Format::Json],
            },
        }
    }

    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n", self.n),
            ("n-max", self.n_max),
            ("restarts", self.restarts),
            ("ensemble-size", self.ensemble_size),
            ("samples", self.samples),
        ] {
            if v == Some(0) {
                return Err(Error::InvalidArgument(format!(
                    "--{name} must be at least 1"
                )));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "--epsilon must lie in (0, 1], got {e}"
                )));
            }
        }
        Ok(())
    }
}

/// What a command produced: files to write, a summary for stdout and the exit code.
struct Outcome {
    artifacts: ArtifactSet,
    summary: Vec<String>,
    code: i32,
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

/// Runs a parsed command and writes its artifacts. Returns the exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let common = match &cli.command {
        Command::Simulate(a) => &a.common,
        Command::Entropy(a) => &a.common,
        Command::ProbeMixing(a) => &a.common,
        Command::Capacity(a) => &a.common,
        Command::Verify(a) => &a.common,
    };
    if common.threads == Some(0) {
        return Err(Error::InvalidArgument(
            "--threads must be at least 1".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start thread pool: {e}")))?;
    let outcome = pool.install(|| match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Entropy(a) => entropy(a),
        Command::ProbeMixing(a) => probe(a),
        Command::Capacity(a) => capacity(a),
        Command::Verify(a) => verify_cmd(a),
    })?;
    if outcome.code == EXIT_OK {
        outcome.artifacts.commit(&common.output)?;
    }
    for line in &outcome.summary {
        println!("{line}");
    }
    Ok(outcome.code)
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Serialize)]
struct JsonArtifact<'a, T: Serialize> {
    config: &'a RunConfig,
    seed: u64,
    result: T,
}

fn add_json<T: Serialize>(
    a: &mut ArtifactSet,
    cfg: &RunConfig,
    name: &str,
    result: T,
) -> Result<()> {
    if cfg.wants(Format::Json) {
        a.add_json(
            name,
            &JsonArtifact {
                config: cfg,
                seed: cfg.seed,
                result,
            },
        )?;
    }
    Ok(())
}

fn add_csv(a: &mut ArtifactSet, cfg: &RunConfig, name: &str, table: &CsvTable) -> Result<()> {
    if cfg.wants(Format::Csv) {
        a.add_csv(name, table)?;
    }
    Ok(())
}

/// State file: a `state` (matrix or basis label) or an `ensemble`, with optional factor `dims`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    #[serde(default)]
    pub state: Option<StateDoc>,
    #[serde(default)]
    pub ensemble: Option<EnsembleDoc>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDoc {
    pub probs: Vec<f64>,
    pub states: Vec<MatrixDoc>,
}

fn read_state_file(path: &Path) -> Result<StateFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: cannot read: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| json_error(&path_string(path), &e))
}

fn state_shape(dims: &Option<Vec<usize>>, dim: usize, field: &str) -> Result<SpaceShape> {
    match dims {
        None => Ok(SpaceShape::single(dim)),
        Some(d) => {
            let shape = SpaceShape::new(d.clone()).map_err(|e| crate::io::context(field, e))?;
            if shape.total() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "{field}: dims {d:?} give {} but the state has dimension {dim}",
                    shape.total()
                )));
            }
            Ok(shape)
        }
    }
}

/// Resolves `random`, `random-mixed`, `maximally-mixed`, `basis:K` or a state file.
fn resolve_state(
    arg: &str,
    shape: &SpaceShape,
    seed: u64,
    stream: u64,
    flag: &str,
) -> Result<DensityMatrix> {
    let dim = shape.total();
    let state = match arg {
        "random" => haar_state(&mut sub_rng(seed, stream), shape),
        "random-mixed" => crate::random::hilbert_schmidt_state(&mut sub_rng(seed, stream), shape),
        "maximally-mixed" => DensityMatrix::maximally_mixed(dim),
        _ => {
            if let Some(k) = arg.strip_prefix("basis:") {
                let k: usize = k.parse().map_err(|_| {
                    Error::InvalidArgument(format!("{flag}: cannot parse basis label `{k}`"))
                })?;
                state_from_doc(&StateDoc::Basis(BasisDoc { basis: k }), dim, flag)?
            } else {
                let file = read_state_file(Path::new(arg))?;
                let doc = file
                    .state
                    .ok_or_else(|| Error::Parse(format!("{arg}: expected a `state` field")))?;
                state_from_doc(&doc, dim, &format!("{arg}: state"))?
            }
        }
    };
    state.reshaped(shape.clone())
}

fn matrix_rows(table: &mut CsvTable, label: &str, m: &CMatrix) -> Result<()> {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let z = m[(r, c)];
            table.push(vec![
                label.into(),
                r.into(),
                c.into(),
                z.re.into(),
                z.im.into(),
            ])?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StateSummary {
    matrix: MatrixDoc,
    trace: f64,
    min_eigenvalue: f64,
    entropy: f64,
}

fn summarize(rho: &DensityMatrix) -> Result<StateSummary> {
    Ok(StateSummary {
        matrix: matrix_to_doc(rho.mat()),
        trace: rho.mat().trace().re,
        min_eigenvalue: hermitian_eigvals(rho.mat())?.last().copied().unwrap_or(0.0),
        entropy: von_neumann_entropy(rho)?,
    })
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let mut cfg = RunConfig::new("simulate", &a.common);
    cfg.channel = Some(path_string(&a.channel));
    cfg.n = Some(a.n);
    cfg.input = Some(a.input.clone());
    cfg.memory = a.memory.clone();
    cfg.validate()?;
    let (_, spec) = load_channel_file(&a.channel)?;
    let d = spec.dims();
    let rho = resolve_state(
        &a.input,
        &SpaceShape::uniform(d.q, a.n),
        a.common.seed,
        0,
        "--input",
    )?;
    let memory = match &a.memory {
        Some(m) => resolve_state(m, &SpaceShape::single(d.m), a.common.seed, 1, "--memory")?,
        None => spec.initial_memory().clone(),
    };
    let output = apply_memory_channel(&spec, &rho, &memory, a.n)?;
    let final_memory = memory_state_after(&spec, &rho, &memory, a.n)?;

    #[derive(Serialize)]
    struct SimulateResult {
        input: StateSummary,
        initial_memory: StateSummary,
        output: StateSummary,
        final_memory: StateSummary,
    }
    let result = SimulateResult {
        input: summarize(&rho)?,
        initial_memory: summarize(&memory)?,
        output: summarize(&output)?,
        final_memory: summarize(&final_memory)?,
    };
    let summary = vec![format!(
        "output trace = {:.12}, min eigenvalue = {:.3e}, entropy = {:.12}",
        result.output.trace, result.output.min_eigenvalue, result.output.entropy
    )];
    let mut table = CsvTable::new(&["state", "row", "col", "re", "im"]);
    matrix_rows(&mut table, "output", output.mat())?;
    matrix_rows(&mut table, "final_memory", final_memory.mat())?;
    let mut artifacts = ArtifactSet::new();
    add_csv(&mut artifacts, &cfg, "simulate.csv", &table)?;
    add_json(&mut artifacts, &cfg, "simulate.json", result)?;
    Ok(Outcome {
        artifacts,
        summary,
        code: EXIT_OK,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Quantity {
    quantity: String,
    subsystem: String,
    value: f64,
}

fn entropy(a: &EntropyArgs) -> Result<Outcome> {
    let mut cfg = RunConfig::new("entropy", &a.common);
    cfg.state = Some(path_string(&a.state));
    cfg.validate()?;
    let file = read_state_file(&a.state)?;
    let name = path_string(&a.state);
    let mut quantities = Vec::new();
    let mut push = |q: &str, s: String, v: f64| {
        quantities.push(Quantity {
            quantity: q.into(),
            subsystem: s,
            value: v,
        })
    };
    match (&file.state, &file.ensemble) {
        (Some(doc), None) => {
            let dim = match doc {
                StateDoc::Basis(_) => file
                    .dims
                    .as_ref()
                    .map(|d| d.iter().product())
                    .ok_or_else(|| Error::Parse(format!("{name}: a basis state needs `dims`")))?,
                StateDoc::Matrix(m) => m.len(),
            };
            let shape = state_shape(&file.dims, dim, &format!("{name}: dims"))?;
            let rho =
                state_from_doc(doc, dim, &format!("{name}: state"))?.reshaped(shape.clone())?;
            push("entropy", "all".into(), von_neumann_entropy(&rho)?);
            for (i, v) in hermitian_eigvals(rho.mat())?.into_iter().enumerate() {
                push("eigenvalue", i.to_string(), v);
            }
            let f = shape.num_factors();
            if f > 1 {
                for i in 0..f {
                    push(
                        "entropy",
                        i.to_string(),
                        von_neumann_entropy(&rho.partial_trace(&[i])?)?,
                    );
                }
                for k in 1..f {
                    let side: Vec<usize> = (0..k).collect();
                    let label = format!(
                        "{}|{}",
                        side.iter()
                            .map(|i| i.to_string())
                            .collect::<Vec<_>>()
                            .join("+"),
                        (k..f).map(|i| i.to_string()).collect::<Vec<_>>().join("+")
                    );
                    push(
                        "mutual_information",
                        label,
                        mutual_information(&rho, &side)?,
                    );
                }
            }
        }
        (None, Some(e)) => {
            let states = e
                .states
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let field = format!("{name}: ensemble.states[{i}]");
                    let mat = matrix_from_doc(m, &field)?;
                    let shape = state_shape(&file.dims, mat.rows(), &format!("{name}: dims"))?;
                    DensityMatrix::new(mat, shape).map_err(|err| crate::io::context(&field, err))
                })
                .collect::<Result<Vec<_>>>()?;
            let ens = CQEnsemble::new(e.probs.clone(), states)
                .map_err(|err| crate::io::context(&name, err))?;
            push("holevo_chi", "ensemble".into(), holevo_chi(&ens)?);
            push(
                "entropy",
                "average".into(),
                von_neumann_entropy(&ens.average_state())?,
            );
            for (i, s) in ens.states().iter().enumerate() {
                push("entropy", format!("member_{i}"), von_neumann_entropy(s)?);
            }
        }
        _ => {
            return Err(Error::Parse(format!(
                "{name}: give exactly one of `state` or `ensemble`"
            )))
        }
    }
    let mut table = CsvTable::new(&["quantity", "subsystem", "value"]);
    for q in &quantities {
        table.push(vec![
            q.quantity.clone().into(),
            q.subsystem.clone().into(),
            q.value.into(),
        ])?;
    }
    let summary = quantities
        .iter()
        .filter(|q| q.quantity != "eigenvalue")
        .map(|q| format!("{} [{}] = {:.12}", q.quantity, q.subsystem, q.value))
        .collect();
    let mut artifacts = ArtifactSet::new();
    add_csv(&mut artifacts, &cfg, "entropy.csv", &table)?;
    add_json(&mut artifacts, &cfg, "entropy.json", &quantities)?;
    Ok(Outcome {
        artifacts,
        summary,
        code: EXIT_OK,
    })
}

fn probe(a: &ProbeMixingArgs) -> Result<Outcome> {
    let mut cfg = RunConfig::new("probe-mixing", &a.common);
    cfg.channel = Some(path_string(&a.channel));
    cfg.epsilon = Some(a.epsilon);
    cfg.n_max = Some(a.n_max);
    cfg.samples = Some(a.pairs.max(1));
    cfg.validate()?;
    let (_, spec) = load_channel_file(&a.channel)?;
    let mut mixing = MixingProbeConfig::new(a.epsilon, a.common.seed);
    mixing.step_budget = a.n_max;
    mixing.pairs.random_pairs = a.pairs;
    let result = probe_mixing(&spec, &mixing)?;
    let mut table = CsvTable::new(&["step", "max_distance"]);
    for p in &result.trajectory {
        table.push(vec![p.step.into(), p.max_distance.into()])?;
    }
    let summary = vec![match result.n_epsilon {
        Some(n) => format!("n_epsilon = {n} (epsilon = {})", a.epsilon),
        None => format!(
            "n_epsilon = none within {} steps (epsilon = {})",
            result.trajectory.len(),
            a.epsilon
        ),
    }];
    let mut artifacts = ArtifactSet::new();
    add_csv(&mut artifacts, &cfg, "mixing_trajectory.csv", &table)?;
    add_json(&mut artifacts, &cfg, "mixing.json", &result)?;
    Ok(Outcome {
        artifacts,
        summary,
        code: EXIT_OK,
    })
}

fn capacity(a: &CapacityArgs) -> Result<Outcome> {
    let mut cfg = RunConfig::new("capacity", &a.common);
    cfg.channel = Some(path_string(&a.channel));
    cfg.restarts = Some(a.restarts);
    cfg.ensemble_size = a.ensemble_size;
    cfg.product_only = Some(a.product_only);
    match a.n {
        Some(n) => cfg.n = Some(n),
        None => {
            cfg.n_max = Some(a.n_max);
            cfg.epsilon = Some(a.epsilon);
        }
    }
    cfg.validate()?;
    let (_, spec) = load_channel_file(&a.channel)?;
    let optimizer = OptimizerOptions {
        restarts: a.restarts,
        ensemble_size: a.ensemble_size,
        product_only: a.product_only,
        ..OptimizerOptions::with_seed(a.common.seed)
    };
    optimizer.validate()?;
    let experiment = match a.n {
        Some(n) => {
            let candidates = default_memory_candidates(spec.dims().m)?;
            CapacityRun::Single(lower_upper_capacity(&spec, n, &candidates, &optimizer)?)
        }
        None => {
            let mut opts = ExperimentOptions::new(a.epsilon, optimizer);
            opts.allow_non_fixed_point = a.allow_non_fixed_point;
            CapacityRun::Experiment(capacity_convergence_experiment(&spec, a.n_max, &opts)?)
        }
    };
    let reports = match &experiment {
        CapacityRun::Single(r) => std::slice::from_ref(r),
        CapacityRun::Experiment(e) => e.reports.as_slice(),
    };
    let mut summary_table = CsvTable::new(&[
        "n",
        "lower_c_n",
        "upper_c_n",
        "gap",
        "gap_bound",
        "restarts",
        "seed",
    ]);
    let mut member_table = CsvTable::new(&["n", "memory_id", "chi_per_use", "converged"]);
    let mut summary = Vec::new();
    if let CapacityRun::Experiment(e) = &experiment {
        summary.push(format!(
            "fixed point: {} (deviation {:.3e}); n_epsilon = {}",
            e.fixed_point.is_fixed_point,
            e.fixed_point.max_deviation,
            e.mixing.n_epsilon.map_or("none".into(), |n| n.to_string())
        ));
    }
    for r in reports {
        summary_table.push(vec![
            r.n.into(),
            r.lower_c_n.into(),
            r.upper_c_n.into(),
            r.gap.into(),
            r.gap_bound.into(),
            r.restarts.into(),
            Cell::Text(r.seed.to_string()),
        ])?;
        for v in &r.per_memory {
            member_table.push(vec![
                r.n.into(),
                v.memory_id.clone().into(),
                v.chi_per_use.into(),
                v.converged.into(),
            ])?;
        }
        summary.push(format!(
            "n = {}: lower = {:.6}, upper = {:.6}, gap = {:.6}{}",
            r.n,
            r.lower_c_n,
            r.upper_c_n,
            r.gap,
            r.gap_bound
                .map_or(String::new(), |b| format!(", bound = {b:.6}"))
        ));
    }
    let mut artifacts = ArtifactSet::new();
    add_csv(&mut artifacts, &cfg, "capacity.csv", &summary_table)?;
    add_csv(&mut artifacts, &cfg, "capacity_memories.csv", &member_table)?;
    add_json(&mut artifacts, &cfg, "capacity.json", &experiment)?;
    Ok(Outcome {
        artifacts,
        summary,
        code: EXIT_OK,
    })
}

#[derive(Serialize)]
#[serde(untagged)]
enum CapacityRun {
    Single(crate::capacity::CapacityReport),
    Experiment(ConvergenceExperiment),
}

fn verify_cmd(a: &VerifyArgs) -> Result<Outcome> {
    let mut cfg = RunConfig::new("verify", &a.common);
    cfg.channel = Some(path_string(&a.channel));
    cfg.samples = Some(a.samples);
    cfg.validate()?;
    let (doc, spec) = load_channel_file(&a.channel)?;
    let markov = doc.markov_spec()?;
    let opts = verify::VerifyOptions {
        inputs: a.samples,
        ..verify::VerifyOptions::new(a.common.seed)
    };
    let report = verify::run_suite(&spec, markov.as_ref(), &opts)?;
    let mut table = CsvTable::new(&["check", "passed", "value", "tolerance", "samples"]);
    let mut summary = Vec::new();
    for c in &report.checks {
        table.push(vec![
            c.name.clone().into(),
            c.passed.into(),
            c.value.into(),
            c.tolerance.into(),
            c.samples.into(),
        ])?;
        summary.push(format!(
            "{} {}: {:.3e} (tolerance {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        ));
    }
    let code = if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    };
    let mut artifacts = ArtifactSet::new();
    add_csv(&mut artifacts, &cfg, "verify.csv", &table)?;
    add_json(&mut artifacts, &cfg, "verify.json", &report)?;
    Ok(Outcome {
        artifacts,
        summary,
        code,
    })
}
