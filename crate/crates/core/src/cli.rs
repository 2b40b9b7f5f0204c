//! Command-line front end behind the `discord-lab` binary.
//!
//! Every command prints one JSON report on stdout. Floats carry 17
//! significant digits so reports parse back bit-for-bit; non-finite values
//! are written as `null`.

use std::ffi::OsString;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::adversary::{
    l1_attack, l2_attack, linf_attack_sdp, linf_brute, linf_round, pd_optimal, sigma, t_sweep,
    ObjectiveKind, ObjectiveSpec, BRUTE_FORCE_MAX_N, DEFAULT_ROUNDING_TRIALS,
};
use crate::defense::{default_defense_options, defend_sigma, verify_defense, BudgetFunction};
use crate::error::Error;
use crate::graph::{load_graph, Graph};
use crate::mixed::{
    bad_approx_bound, cut_bounds_sweep, matbound, mixed_lower_bound, mixed_objective,
    physical_similarity_bracket, similarity_bracket, spectral_similarity, GraphPair, SweepMode,
};
use crate::sdp::SdpOptions;
use crate::spectral::{eig_sym, CLUSTER_TOL};

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "DISCORD_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "discord-lab",
    version,
    about = "Adversarial opinion seeding on Friedkin-Johnsen dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal adversarial seed under an l2, l-infinity or l1 budget.
    Attack(AttackArgs),
    /// Disagreement-style objective t·λ/(1+tλ)² over a log grid of t.
    Sweep(SweepArgs),
    /// Defender's optimal node weights against an l2 adversary.
    Defend(DefendArgs),
    /// Opinion graph g1 versus measurement graph g2.
    Mixed {
        #[command(subcommand)]
        command: MixedCommand,
    },
}

fn parse_objective(s: &str) -> Result<ObjectiveKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Budget {
    L2,
    Linf,
    L1,
}

#[derive(Debug, Args)]
struct AttackArgs {
    #[arg(long)]
    graph: PathBuf,
    /// disagreement | repeated:<T> | repeated:inf | pd-index | displacement
    #[arg(long, value_parser = parse_objective, default_value = "disagreement")]
    objective: ObjectiveKind,
    #[arg(long, value_enum, default_value_t = Budget::L2)]
    budget: Budget,
    /// Budget radius.
    #[arg(long = "R", default_value_t = 1.0)]
    r: f64,
    /// Hyperplane rounding trials (linf only).
    #[arg(long, default_value_t = DEFAULT_ROUNDING_TRIALS, value_parser = clap::value_parser!(usize))]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sweep cap for the SDP solver (linf only).
    #[arg(long, default_value_t = SdpOptions::default().max_sweeps)]
    max_sweeps: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Grid points per decade of t.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(2..))]
    resolution: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BudgetArg {
    L1,
    Sql2,
}

impl From<BudgetArg> for BudgetFunction {
    fn from(b: BudgetArg) -> Self {
        match b {
            BudgetArg::L1 => BudgetFunction::L1,
            BudgetArg::Sql2 => BudgetFunction::SquaredL2,
        }
    }
}

#[derive(Debug, Args)]
struct DefendArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_parser = parse_objective, default_value = "disagreement")]
    objective: ObjectiveKind,
    #[arg(long = "R", default_value_t = 1.0)]
    r: f64,
    /// Budget function on node weights.
    #[arg(long, value_enum, default_value_t = BudgetArg::L1)]
    h: BudgetArg,
    /// Sweep cap for the SDP solver.
    #[arg(long, default_value_t = default_defense_options().max_sweeps)]
    max_sweeps: usize,
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Opinion graph.
    #[arg(long)]
    g1: PathBuf,
    /// Measurement graph.
    #[arg(long)]
    g2: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
    Spectral,
}

#[derive(Debug, Subcommand)]
enum MixedCommand {
    /// λ_max((I+L)^-1 M (I+L)^-1) and the single-graph value of g2.
    Value(PairArgs),
    /// All spectral, similarity and test-vector bounds.
    Bounds {
        #[command(flatten)]
        pair: PairArgs,
        /// Similarity parameter for the bracket; defaults to the measured one.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Spectral and edge-wise similarity of the two graphs.
    Similarity(PairArgs),
    /// Maximize the cut bounds over node subsets.
    Cutsweep {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: Error },
    #[error(transparent)]
    Compute(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Input { .. } => 3,
            CliError::Compute(Error::NotConverged { .. } | Error::IterationLimit { .. }) => 4,
            CliError::Compute(_) => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub tolerances: Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rng_seed: Option<u64>,
}

struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

impl Report {
    /// Compact JSON with every float at 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
        self.serialize(&mut ser)
            .expect("report values are serializable");
        String::from_utf8(out).expect("serde_json writes UTF-8")
    }
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        stdout: text,
                        stderr: String::new(),
                        code: 0,
                    }
                }
                _ => Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: 2,
                },
            };
        }
    };
    match execute(cli.command) {
        Ok(report) => Outcome {
            stdout: report.to_json() + "\n",
            stderr: String::new(),
            code: 0,
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: e.exit_code(),
        },
    }
}

/// Sizes the global rayon pool from `DISCORD_LAB_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got `{raw}`"
        ))
    })?;
    // A pool that already exists (tests, embedding) keeps its size.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    load_graph(&text).map_err(|source| CliError::Input {
        path: path.to_owned(),
        source,
    })
}

fn spec(kind: ObjectiveKind, r: f64) -> Result<ObjectiveSpec, CliError> {
    ObjectiveSpec::new(kind, r).map_err(|e| CliError::Usage(e.to_string()))
}

fn execute(command: Command) -> Result<Report, CliError> {
    match command {
        Command::Attack(a) => cmd_attack(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Defend(a) => cmd_defend(a),
        Command::Mixed { command } => cmd_mixed(command),
    }
}

/// Flips `s` so its first nonzero entry is positive; `sᵀΣs` is unchanged.
fn canonical_sign(mut s: Vec<f64>) -> Vec<f64> {
    if s.iter().find(|v| **v != 0.0).is_some_and(|v| *v < 0.0) {
        s.iter_mut().for_each(|v| *v = -*v);
    }
    s
}

fn cmd_attack(a: AttackArgs) -> Result<Report, CliError> {
    let obj = spec(a.objective, a.r)?;
    let pd = a.objective == ObjectiveKind::PolarizationDisagreement;
    if pd && a.budget != Budget::L2 {
        return Err(CliError::Usage(
            "pd-index is only defined for the l2 budget".into(),
        ));
    }
    let g = read_graph(&a.graph)?;
    let l = g.laplacian();
    let r2 = a.r * a.r;
    let mut inputs = json!({
        "graph": a.graph.display().to_string(),
        "n": g.n(),
        "objective": a.objective.name(),
        "budget": format!("{:?}", a.budget).to_lowercase(),
        "R": a.r,
    });
    let mut rng_seed = None;
    let (results, tolerances) = match a.budget {
        Budget::L2 => {
            let res = if pd {
                pd_optimal(&l, a.r)?
            } else {
                l2_attack(&l, &obj)?
            };
            // `+ 0.0` turns negative zeros into zeros.
            let seeds: Vec<Vec<f64>> = res
                .seeds()
                .map(|s| s.into_iter().map(|x| x + 0.0).collect())
                .collect();
            (
                json!({
                    "optimal_value": res.optimal_value,
                    "argmax_eigenvalue": res.argmax_eigenvalue,
                    "eigen_indices": res.eigen_indices,
                    "unique_eigenspace": res.is_unique_eigenspace,
                    "seed": seeds.first(),
                    "seed_basis": seeds,
                }),
                json!({ "eigen_cluster_rel": CLUSTER_TOL }),
            )
        }
        Budget::Linf => {
            let sig = sigma(&l, &obj)?;
            let opts = SdpOptions {
                seed: a.seed,
                max_sweeps: a.max_sweeps,
                ..SdpOptions::default()
            };
            let relax = linf_attack_sdp(&sig, &opts)?;
            let (s, v) = linf_round(&sig, &relax.gram_vectors, a.trials.max(1), a.seed)?;
            let exact = if g.n() <= BRUTE_FORCE_MAX_N {
                Some(r2 * linf_brute(&sig)?.1)
            } else {
                None
            };
            rng_seed = Some(a.seed);
            inputs["trials"] = json!(a.trials);
            (
                json!({
                    "sdp_value": r2 * relax.sdp_value,
                    "sdp_primal_value": r2 * relax.primal_value,
                    "sdp_sweeps": relax.sweeps,
                    "rounded_seed": canonical_sign(s).iter().map(|x| a.r * x).collect::<Vec<_>>(),
                    "rounding_value": r2 * v,
                    "trials": a.trials,
                    "exact_value": exact,
                }),
                json!({ "sdp_rel_gap": opts.rel_gap, "sdp_max_sweeps": opts.max_sweeps }),
            )
        }
        Budget::L1 => {
            let sig = sigma(&l, &obj)?;
            let att = l1_attack(&sig);
            let mut seed = vec![0.0; g.n()];
            seed[att.index] = a.r;
            (
                json!({
                    "optimal_value": r2 * att.value,
                    "node": att.index,
                    "seed": seed,
                    "lower_bound": r2 * att.lower_bound,
                    "upper_bound": r2 * att.upper_bound,
                }),
                json!({}),
            )
        }
    };
    Ok(Report {
        command: "attack".into(),
        inputs,
        results,
        tolerances,
        rng_seed,
    })
}

fn cmd_sweep(a: SweepArgs) -> Result<Report, CliError> {
    let g = read_graph(&a.graph)?;
    let l = g.laplacian();
    let rows = t_sweep(&l, a.resolution as usize)?;
    let eig = eig_sym(&l);
    Ok(Report {
        command: "sweep".into(),
        inputs: json!({
            "graph": a.graph.display().to_string(),
            "n": g.n(),
            "resolution": a.resolution,
        }),
        results: json!({
            "eigenvalues": eig.values(),
            "rows": rows,
        }),
        tolerances: json!({ "eigen_cluster_rel": CLUSTER_TOL }),
        rng_seed: None,
    })
}

fn cmd_defend(a: DefendArgs) -> Result<Report, CliError> {
    if a.objective == ObjectiveKind::PolarizationDisagreement {
        return Err(CliError::Usage(
            "pd-index has no Σ form; defend needs a Σ-type objective".into(),
        ));
    }
    let obj = spec(a.objective, a.r)?;
    let g = read_graph(&a.graph)?;
    let l = g.laplacian();
    let h: BudgetFunction = a.h.into();
    let sig = sigma(&l, &obj)?;
    let opts = SdpOptions {
        max_sweeps: a.max_sweeps,
        ..default_defense_options()
    };
    let res = defend_sigma(&sig, h, a.r, &opts)?;
    let check = a.r * a.r * verify_defense(&sig, &res.weights)?;
    Ok(Report {
        command: "defend".into(),
        inputs: json!({
            "graph": a.graph.display().to_string(),
            "n": g.n(),
            "objective": a.objective.name(),
            "R": a.r,
            "h": format!("{:?}", a.h).to_lowercase(),
        }),
        results: json!({
            "weights": res.weights,
            "K": res.defense_value,
            "K_lower": res.defense_value_lower,
            "K_verified": check,
            "undefended_value": res.undefended_value,
            "feasibility_slack": res.feasibility_slack,
            "sdp_weights": res.sdp_weights,
            "rescaling": res.rescaling,
        }),
        tolerances: json!({ "sdp_rel_gap": opts.rel_gap, "sdp_max_sweeps": opts.max_sweeps }),
        rng_seed: None,
    })
}

fn read_pair(p: &PairArgs) -> Result<(GraphPair, Value), CliError> {
    let g1 = read_graph(&p.g1)?;
    let g2 = read_graph(&p.g2)?;
    let inputs = json!({
        "g1": p.g1.display().to_string(),
        "g2": p.g2.display().to_string(),
        "n": g1.n(),
    });
    let pair = GraphPair::new(g1, g2).map_err(|source| CliError::Input {
        path: p.g2.clone(),
        source,
    })?;
    Ok((pair, inputs))
}

fn single_graph_value(pair: &GraphPair) -> f64 {
    eig_sym(pair.measurement_laplacian())
        .values()
        .iter()
        .map(|&x| crate::adversary::disagreement_gain(x.max(0.0)))
        .fold(0.0, f64::max)
}

fn cmd_mixed(command: MixedCommand) -> Result<Report, CliError> {
    let mut rng_seed = None;
    let (name, inputs, results) = match command {
        MixedCommand::Value(p) => {
            let (pair, inputs) = read_pair(&p)?;
            (
                "mixed value",
                inputs,
                json!({
                    "mixed_objective": mixed_objective(&pair),
                    "single_graph_value_g2": single_graph_value(&pair),
                }),
            )
        }
        MixedCommand::Similarity(p) => {
            let (pair, inputs) = read_pair(&p)?;
            (
                "mixed similarity",
                inputs,
                json!(spectral_similarity(&pair)),
            )
        }
        MixedCommand::Bounds { pair: p, eps } => {
            let (pair, mut inputs) = read_pair(&p)?;
            if let Some(e) = eps {
                if !(e >= 0.0) {
                    return Err(CliError::Usage(format!(
                        "--eps must be nonnegative, got {e}"
                    )));
                }
                inputs["eps"] = json!(e);
            }
            let sim = spectral_similarity(&pair);
            let eps_used = eps.unwrap_or(sim.epsilon_spectral);
            let bracket = if eps_used.is_finite() {
                let (lo, hi) = similarity_bracket(&pair, eps_used)?;
                json!({ "eps": eps_used, "lower": lo, "upper": hi })
            } else {
                Value::Null
            };
            let resolvent = eig_sym(pair.opinion_laplacian()).matrix_function(|y| 1.0 / (1.0 + y));
            let (mb_lo, mb_hi) = matbound(pair.measurement_laplacian(), &resolvent)?;
            let m_eig = eig_sym(pair.measurement_laplacian());
            let n = pair.n();
            let x: Vec<f64> = m_eig
                .vector(n - 1)
                .iter()
                .map(|v| v * (n as f64).sqrt())
                .collect();
            let physical = physical_similarity_bracket(&pair);
            (
                "mixed bounds",
                inputs,
                json!({
                    "mixed_objective": mixed_objective(&pair),
                    "spectral_lower_bound": mixed_lower_bound(&pair),
                    "matbound": { "lower": mb_lo, "upper": mb_hi },
                    "similarity": sim,
                    "similarity_bracket": bracket,
                    "physical_bracket": physical,
                    "bad_approx_bound_top_m": bad_approx_bound(&pair, &x)?,
                }),
            )
        }
        MixedCommand::Cutsweep {
            pair: p,
            mode,
            samples,
            seed,
        } => {
            let (pair, mut inputs) = read_pair(&p)?;
            inputs["mode"] = json!(format!("{mode:?}").to_lowercase());
            let mode = match mode {
                ModeArg::Exhaustive => SweepMode::Exhaustive,
                ModeArg::Random => {
                    rng_seed = Some(seed);
                    inputs["samples"] = json!(samples);
                    SweepMode::Random { samples }
                }
                ModeArg::Spectral => SweepMode::Spectral,
            };
            let sweep = cut_bounds_sweep(&pair, mode, seed).map_err(|e| match e {
                Error::InvalidArgument(msg) => CliError::Usage(msg),
                other => other.into(),
            })?;
            let mut results = json!(sweep);
            results["mixed_objective"] = json!(mixed_objective(&pair));
            ("mixed cutsweep", inputs, results)
        }
    };
    Ok(Report {
        command: name.into(),
        inputs,
        results,
        tolerances: json!({ "eigen_cluster_rel": CLUSTER_TOL }),
        rng_seed,
    })
}
