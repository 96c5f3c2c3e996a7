//! `qrate`: command-line front end for the rate–distortion, capacity and
//! separation computations.
//!
//! Results go to `--output` (or stdout); errors go to stderr as one JSON
//! object `{"error", "message", "exit_code"}`. Exit codes: 0 success,
//! 1 parse or input error, 2 numerical failure, 3 infeasible verdict,
//! 4 resource cap exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qrate::capacity::{coherent_info_capacity, ea_capacity, holevo_capacity, CapacityEstimate, CapacityOptimizer};
use qrate::distortion::{lemma1_check, BlockChannel};
use qrate::entropic::BipartiteState;
use qrate::eop::{entanglement_of_purification, sandwich_check};
use qrate::optim::SearchConfig;
use qrate::parallel::Execution;
use qrate::protosim::schumacher_fidelity;
use qrate::qcore::io::{matrix_to_json, parse_channel, parse_state, ChannelJson, StateJson};
use qrate::qcore::{DensityMatrix, QuantumChannel};
use qrate::rdsolve::{classical_rd_curve, format_sig, rd_curve, ClassicalSource, CurveMode, Flavor, SolverConfig};
use qrate::sepcheck::{check, SepConfig, Source, Theorem};
use qrate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "qrate", version, about = "Quantum rate-distortion, capacity and separation numerics")]
struct Cli {
    #[command(flatten)]
    config: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every command.
#[derive(Args, Debug, Clone)]
struct Overrides {
    /// Seed for multi-start searches.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Certified gap tolerance, bits (0 < tol < 1).
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Iteration budget per inner solve.
    #[arg(long, global = true, default_value_t = 10_000)]
    max_iter: usize,
    /// Restarts of the non-convex searches (1..=1024).
    #[arg(long, global = true, default_value_t = 32)]
    restarts: usize,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rate–distortion curve on a distortion grid.
    RdCurve {
        #[arg(long, value_enum)]
        flavor: FlavorArg,
        /// State JSON, or `{"pmf", "distortion"}` for the classical flavor.
        #[arg(long)]
        source: PathBuf,
        /// `start:end:points`.
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Include each point's Choi matrix in JSON output.
        #[arg(long)]
        include_choi: bool,
    },
    /// Entanglement of purification of a bipartite state, or the
    /// unassisted upper bound against R_eaq on a grid.
    Eop {
        #[arg(long)]
        source: PathBuf,
        /// `d_A,d_B`; computes E_p of the source as a bipartite state.
        #[arg(long, value_parser = parse_dims, conflicts_with = "grid", required_unless_present = "grid")]
        dims: Option<(usize, usize)>,
        /// `start:end:points`; tabulates the unassisted bound.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<Grid>,
        /// Block length of the unassisted bound.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Single-letter capacities of a channel.
    Capacity {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
    },
    /// Separation verdict; exits 3 when infeasible.
    Sepcheck {
        #[arg(long)]
        theorem: Theorem,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        distortion: Option<f64>,
    },
    /// Exact typical-subspace compression fidelity.
    Schumacher {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rate: f64,
    },
    /// Distortion bound for a block channel simulating `target^{⊗n}`.
    Lemma1 {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// Channel on `n` copies of the source system.
        #[arg(long)]
        block: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlavorArg {
    Eac,
    Eaq,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Which {
    Holevo,
    Coherent,
    Ea,
    All,
}

#[derive(Clone, Debug)]
struct Grid {
    start: f64,
    end: f64,
    points: usize,
}

impl Grid {
    fn values(&self) -> Vec<f64> {
        match CurveMode::linspace(self.start, self.end, self.points) {
            CurveMode::Grid(v) => v,
            CurveMode::LambdaSweep(_) => unreachable!("linspace builds a grid"),
        }
    }
}

const MAX_GRID_POINTS: usize = 10_000;

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected start:end:points, got {s:?}"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let (start, end) = (num(a)?, num(b)?);
    let points = n.trim().parse::<usize>().map_err(|e| format!("{n:?}: {e}"))?;
    if !(start.is_finite() && end.is_finite()) || start > end {
        return Err(format!("grid endpoints must be finite with start <= end, got {s:?}"));
    }
    if points == 0 || points > MAX_GRID_POINTS {
        return Err(format!("grid needs 1..={MAX_GRID_POINTS} points, got {points}"));
    }
    Ok(Grid { start, end, points })
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected d_A,d_B, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

/// A parsed invocation: what to run and with which settings.
struct JobSpec {
    command: Command,
    solver: SolverConfig,
    search: SearchConfig,
    output: Option<PathBuf>,
}

impl JobSpec {
    fn from_cli(cli: Cli) -> Result<Self> {
        let c = cli.config;
        if !(c.tol > 0.0 && c.tol < 1.0) {
            return Err(Error::InvalidParameter(format!("--tol {} outside (0, 1)", c.tol)));
        }
        if c.max_iter == 0 {
            return Err(Error::InvalidParameter("--max-iter must be positive".into()));
        }
        if !(1..=1024).contains(&c.restarts) {
            return Err(Error::InvalidParameter(format!("--restarts {} outside 1..=1024", c.restarts)));
        }
        let execution = if c.sequential { Execution::Sequential } else { Execution::Parallel };
        let solver = SolverConfig { tol: c.tol, max_iter: c.max_iter, execution };
        let search = SearchConfig { restarts: c.restarts, seed: c.seed, tol: c.tol, execution, ..SearchConfig::default() };
        Ok(Self { command: cli.command, solver, search, output: c.output })
    }
}

/// Text to emit and the process exit code.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }

    fn json(v: &Value) -> Self {
        Self::ok(pretty(v))
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<DensityMatrix> {
    parse_state(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_channel(path: &Path) -> Result<QuantumChannel> {
    parse_channel(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_classical(path: &Path) -> Result<ClassicalSource> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn run(job: JobSpec) -> Result<Outcome> {
    let JobSpec { command, solver, search, .. } = job;
    match command {
        Command::RdCurve { flavor, source, grid, format, include_choi } => {
            let curve = match flavor {
                FlavorArg::Classical => classical_rd_curve(&load_classical(&source)?, &grid.values(), &solver)?,
                FlavorArg::Eac | FlavorArg::Eaq => {
                    let f = if matches!(flavor, FlavorArg::Eac) { Flavor::Eac } else { Flavor::Eaq };
                    rd_curve(&load_state(&source)?, &CurveMode::Grid(grid.values()), f, &solver)?
                }
            };
            for f in &curve.failures {
                eprintln!("{}", json!({"warning": "point failed", "index": f.index, "D": f.value, "error": f.error.kind(), "message": f.error.to_string()}));
            }
            Ok(match format {
                Format::Csv => Outcome::ok(curve.to_csv()),
                Format::Json => Outcome::json(&curve.to_json(include_choi)),
            })
        }
        Command::Eop { source, dims, grid, k } => {
            let search = SearchConfig { k, ..search };
            if let Some((da, db)) = dims {
                let w = BipartiteState::new(load_state(&source)?, da, db)?;
                let e = entanglement_of_purification(&w, &search)?;
                return Ok(Outcome::json(&json!({
                    "eop_bits": e.value,
                    "purification_entropy_bits": e.purification_entropy,
                    "restarts": e.restarts,
                    "spread": e.spread,
                    "best_map": ChannelJson::from_channel(&e.best_map),
                })));
            }
            let rho = load_state(&source)?;
            let grid = grid.expect("clap requires --dims or --grid");
            let mut out = String::from("D,eaq_lower_bits,unassisted_upper_bits,coherent_info_min_bits\n");
            let mut best = f64::INFINITY;
            for d in grid.values() {
                let r = sandwich_check(&rho, d, &solver, &search)?;
                // Feasibility is monotone in D, so later bounds inherit earlier ones.
                best = best.min(r.upper);
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    format_sig(d),
                    format_sig(r.lower),
                    format_sig(best),
                    format_sig(r.coherent_information_min)
                ));
            }
            Ok(Outcome::ok(out))
        }
        Command::Capacity { channel, which } => {
            let n = load_channel(&channel)?;
            let mut out = serde_json::Map::new();
            if matches!(which, Which::Holevo | Which::All) {
                out.insert("holevo".into(), capacity_json(&holevo_capacity(&n, &search)?));
            }
            if matches!(which, Which::Coherent | Which::All) {
                out.insert("coherent_information".into(), capacity_json(&coherent_info_capacity(&n, &search)?));
            }
            if matches!(which, Which::Ea | Which::All) {
                out.insert("entanglement_assisted".into(), capacity_json(&ea_capacity(&n, &search)?));
            }
            Ok(Outcome::json(&Value::Object(out)))
        }
        Command::Sepcheck { theorem, source, channel, distortion } => {
            let src = if theorem.classical_source() {
                Source::Classical(load_classical(&source)?)
            } else {
                Source::Quantum(load_state(&source)?)
            };
            let v = check(theorem, &src, &load_channel(&channel)?, distortion, &SepConfig { solver, search })?;
            let code = if v.feasible { 0 } else { Error::InfeasiblePlan { margin: v.margin }.exit_code() as u8 };
            Ok(Outcome { text: pretty(&to_value(&v)), code })
        }
        Command::Schumacher { source, n, rate } => {
            Ok(Outcome::json(&to_value(&schumacher_fidelity(&load_state(&source)?, n, rate)?)))
        }
        Command::Lemma1 { source, target, block, n, eps } => {
            let f = BlockChannel::new(load_channel(&block)?, n)?;
            Ok(Outcome::json(&to_value(&lemma1_check(&load_state(&source)?, &load_channel(&target)?, &f, eps)?)))
        }
    }
}

fn capacity_json(c: &CapacityEstimate) -> Value {
    let optimizer = match &c.optimizer {
        CapacityOptimizer::Ensemble { probabilities, states } => json!({
            "probabilities": probabilities,
            "states": states.iter().map(|s| matrix_to_json(s.matrix())).collect::<Vec<_>>(),
        }),
        CapacityOptimizer::Input(rho) => json!({"input": StateJson::from_state(rho)}),
    };
    json!({
        "value_bits": c.value,
        "raw_bits": c.raw,
        "certified": c.certified,
        "gap": c.gap,
        "restarts": c.restarts,
        "spread": c.spread,
        "optimizer": optimizer,
    })
}

fn report(e: &Error) -> ExitCode {
    eprintln!("{}", json!({"error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()}));
    ExitCode::from(e.exit_code() as u8)
}

/// Sizes the global pool from `QRATE_THREADS` (unset or 0: one per core).
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("QRATE_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| Error::Parse(format!("QRATE_THREADS={raw:?} is not a count")))?;
    #[cfg(feature = "parallel")]
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(&Error::Parse(e.render().to_string().trim_end().to_string())),
    };
    if let Err(e) = configure_threads() {
        return report(&e);
    }
    let job = match JobSpec::from_cli(cli) {
        Ok(job) => job,
        Err(e) => return report(&e),
    };
    let output = job.output.clone();
    let outcome = match run(job) {
        Ok(o) => o,
        Err(e) => return report(&e),
    };
    let written = match &output {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| Error::Parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{}", outcome.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        return report(&e);
    }
    ExitCode::from(outcome.code)
}
