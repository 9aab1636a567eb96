//! Command-line surface: every subcommand loads a JSON model config,
//! dispatches into the owning module, and emits deterministic CSV artifacts
//! plus a run manifest. Identical config and seed produce byte-identical
//! artifacts.
//!
//! Exit codes: 0 success, 2 config or validation error, 3 numeric
//! non-convergence, 4 model outside the scope of the requested analysis.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::{HawkesModel, ModelError};
use crate::moments::{self, MomentKind, MomentOptions};
use crate::simulate::{self, SimError};
use crate::tails::{self, TailsError};
use crate::transform::{self, FixedPointOptions, TransformError};
use crate::ProcessKind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0}")]
    OutOfScope(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::OutOfScope(_) => 4,
        }
    }
}

fn model_err(e: ModelError) -> CliError {
    match e {
        ModelError::Unstable { .. } => CliError::OutOfScope(e.to_string()),
        ModelError::Numeric(_) => CliError::NonConvergence(e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

fn sim_err(e: SimError) -> CliError {
    match e {
        SimError::Model(m) => model_err(m),
        SimError::EventCap { .. } => CliError::NonConvergence(e.to_string()),
        SimError::OutsideHorizon { .. } => CliError::Config(e.to_string()),
    }
}

fn transform_err(e: TransformError) -> CliError {
    match e {
        TransformError::Domain(_) => CliError::Config(e.to_string()),
        TransformError::NonConvergence { .. } | TransformError::Numeric(_) => {
            CliError::NonConvergence(e.to_string())
        }
        TransformError::Model(m) => model_err(m),
    }
}

fn tails_err(e: TailsError) -> CliError {
    match e {
        TailsError::Model(m) => model_err(m),
        TailsError::UnsupportedJump { .. }
        | TailsError::TailIndexOutOfRange { .. }
        | TailsError::NoHeavyTailInfluence { .. }
        | TailsError::NotIrreducible => CliError::OutOfScope(e.to_string()),
        TailsError::GridTooCoarse | TailsError::Numeric(_) => {
            CliError::NonConvergence(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
struct Common {
    /// Model config file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Output CSV path; stdout when omitted. The run manifest lands next to
    /// it as `<out>.manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed for every stochastic step.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Age-grid steps for transform and renewal solves.
    #[arg(long, default_value_t = transform::DEFAULT_GRID_STEPS)]
    grid_steps: usize,
    /// Fixed-point tolerance override; defaults to 1e-10 for transforms and
    /// 1e-12 for moment stencils.
    #[arg(long, env = "HAWKES_TOL")]
    tol: Option<f64>,
    /// Monte Carlo replications.
    #[arg(long, default_value_t = 10_000)]
    runs: usize,
    /// Worker cap for parallel sections; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Parser)]
#[command(
    name = "hawkes",
    version,
    about = "Multivariate Hawkes population processes: simulation, transforms, moments, tails"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
enum Command {
    /// Check a model file against its constraints and report stability.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Sample one path (CSV of events), or emit a Monte Carlo estimator
    /// table when a time grid is given.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Path horizon for single-path mode.
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        /// Time grid `start:stop:count` (or comma list) switching to the
        /// estimator table.
        #[arg(long)]
        t_grid: Option<String>,
        /// Sample with the cluster representation instead of thinning.
        #[arg(long, default_value_t = false)]
        cluster: bool,
    },
    /// Evaluate the joint transform at one query point.
    Transform {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
        /// Comma list of non-negative LST arguments (defaults to zeros).
        #[arg(long)]
        s: Option<String>,
        /// Comma list of pgf arguments in the unit disc; entries are real or
        /// polar `modulus@angle`.
        #[arg(long)]
        z: Option<String>,
    },
    /// Recover the distribution of one population coordinate.
    Pmf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
        /// Component, 1-based.
        #[arg(long, default_value_t = 1)]
        component: usize,
        #[arg(long, default_value_t = 100)]
        max_k: usize,
    },
    /// Transform-route moment curves over a time grid.
    Moments {
        #[command(flatten)]
        common: Common,
        /// Time grid `start:stop:count` or comma list.
        #[arg(long)]
        t_grid: String,
        /// Comma list of statistics, e.g.
        /// `mean_q_1,var_q_1,cross_qq_1_2,cross_qlambda_1_1`.
        #[arg(long)]
        stats: String,
        /// Stencil step override.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Class table of the excitation graph with tail indices.
    Graph {
        #[command(flatten)]
        common: Common,
    },
    /// Tail asymptotes against Monte Carlo tail estimates.
    Tails {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
        /// Comma list of thresholds.
        #[arg(long)]
        thresholds: String,
        /// Process to analyze: `n`, `q`, or `lambda`.
        #[arg(long, default_value = "n")]
        process: String,
    },
}

/// Fully resolved invocation, echoed verbatim into the run manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    tool: &'static str,
    version: &'static str,
    #[serde(flatten)]
    command: Command,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Validate { common }
            | Command::Simulate { common, .. }
            | Command::Transform { common, .. }
            | Command::Pmf { common, .. }
            | Command::Moments { common, .. }
            | Command::Graph { common }
            | Command::Tails { common, .. } => common,
        }
    }
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("cannot parse {what} entry `{tok}`")))
        })
        .collect()
}

fn parse_complex_list(text: &str) -> Result<Vec<Complex64>, CliError> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            if let Some((modulus, angle)) = tok.split_once('@') {
                let r: f64 = modulus
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad polar modulus `{modulus}`")))?;
                let th: f64 = angle
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad polar angle `{angle}`")))?;
                Ok(Complex64::from_polar(r, th))
            } else {
                tok.parse::<f64>()
                    .map(|v| Complex64::new(v, 0.0))
                    .map_err(|_| CliError::Config(format!("cannot parse z entry `{tok}`")))
            }
        })
        .collect()
}

/// `start:stop:count` linspace, or a plain comma list.
fn parse_time_grid(text: &str) -> Result<Vec<f64>, CliError> {
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!(
                "time grid `{text}` must be start:stop:count"
            )));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| CliError::Config(format!("bad grid start `{}`", parts[0])))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| CliError::Config(format!("bad grid stop `{}`", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| CliError::Config(format!("bad grid count `{}`", parts[2])))?;
        if count < 1 || stop < start {
            return Err(CliError::Config(format!("degenerate time grid `{text}`")));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        Ok((0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect())
    } else {
        parse_f64_list(text, "time grid")
    }
}

// `mean_q_1`, `cross_qq_1_2`, `two_time_qq_1_2@0.5`, flagging 1-based
// component indices.
fn parse_stat(token: &str) -> Result<MomentKind, CliError> {
    let bad = || CliError::Config(format!("unknown statistic `{token}`"));
    let (name, tau) = match token.split_once('@') {
        Some((n, tau_text)) => {
            let tau: f64 = tau_text.parse().map_err(|_| bad())?;
            (n, Some(tau))
        }
        None => (token, None),
    };
    let index = |txt: &str| -> Result<usize, CliError> {
        let v: usize = txt.parse().map_err(|_| bad())?;
        if v == 0 {
            return Err(CliError::Config(format!(
                "component indices are 1-based in `{token}`"
            )));
        }
        Ok(v - 1)
    };
    let kind = if let Some(rest) = name.strip_prefix("mean_q_") {
        MomentKind::MeanQ(index(rest)?)
    } else if let Some(rest) = name.strip_prefix("mean_lambda_") {
        MomentKind::MeanLambda(index(rest)?)
    } else if let Some(rest) = name.strip_prefix("var_q_") {
        MomentKind::VarQ(index(rest)?)
    } else if let Some(rest) = name.strip_prefix("var_lambda_") {
        MomentKind::VarLambda(index(rest)?)
    } else if let Some(rest) = name.strip_prefix("cross_qq_") {
        let (a, b) = rest.split_once('_').ok_or_else(bad)?;
        MomentKind::CrossQQ(index(a)?, index(b)?)
    } else if let Some(rest) = name.strip_prefix("cross_qlambda_") {
        let (a, b) = rest.split_once('_').ok_or_else(bad)?;
        MomentKind::CrossQLambda(index(a)?, index(b)?)
    } else if let Some(rest) = name.strip_prefix("two_time_qq_") {
        let (a, b) = rest.split_once('_').ok_or_else(bad)?;
        let tau = tau.ok_or_else(|| {
            CliError::Config(format!("two-time statistic `{token}` needs `@tau`"))
        })?;
        MomentKind::TwoTimeQQ(index(a)?, index(b)?, tau)
    } else {
        return Err(bad());
    };
    Ok(kind)
}

fn parse_process(text: &str) -> Result<ProcessKind, CliError> {
    match text.to_ascii_lowercase().as_str() {
        "n" => Ok(ProcessKind::N),
        "q" => Ok(ProcessKind::Q),
        "lambda" | "l" => Ok(ProcessKind::Lambda),
        other => Err(CliError::Config(format!("unknown process `{other}`"))),
    }
}

fn load_model(path: &Path) -> Result<HawkesModel, CliError> {
    HawkesModel::from_path(path).map_err(model_err)
}

fn emit(common: &Common, csv: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => {
            std::fs::write(path, csv)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
            Ok(())
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn write_manifest(config: &RunConfig) -> Result<(), CliError> {
    let common = config.command.common();
    if let Some(out) = &common.out {
        let mut path = out.clone().into_os_string();
        path.push(".manifest.json");
        let body = serde_json::to_string_pretty(config).expect("config serializes");
        std::fs::write(&path, body)
            .map_err(|e| CliError::Config(format!("cannot write manifest: {e}")))?;
    }
    Ok(())
}

fn fp_options(common: &Common) -> FixedPointOptions {
    FixedPointOptions {
        tol: common.tol.unwrap_or(transform::DEFAULT_FP_TOL),
        max_iter: 400,
    }
}

/// Executes one resolved invocation, writing its artifacts.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    match &config.command {
        Command::Validate { common } => {
            let model = load_model(&common.model)?;
            let report = model.validate();
            println!("{report}");
            if !report.is_admissible() {
                return Err(CliError::Config("model is not admissible".into()));
            }
            let bm = model.branching_matrix().map_err(model_err)?;
            if bm.spectral_radius < 1.0 {
                let lam = model.stationary_intensity().map_err(model_err)?;
                let lam_text: Vec<String> = lam.iter().map(|v| format!("{v:.4}")).collect();
                println!(
                    "stable, rho = {:.4}; stationary intensity = [{}]",
                    bm.spectral_radius,
                    lam_text.join(", ")
                );
            } else {
                println!("unstable, rho = {:.4}", bm.spectral_radius);
            }
            write_manifest(config)
        }
        Command::Simulate {
            common,
            horizon,
            t_grid,
            cluster,
        } => {
            let model = load_model(&common.model)?;
            let csv = match t_grid {
                Some(grid_text) => {
                    let grid = parse_time_grid(grid_text)?;
                    let table =
                        simulate::mc_moments(&model, &grid, common.runs, common.seed, common.threads)
                            .map_err(sim_err)?;
                    table.to_csv()
                }
                None => {
                    let path = if *cluster {
                        simulate::simulate_cluster(&model, *horizon, common.seed)
                    } else {
                        simulate::simulate_thinning(&model, *horizon, common.seed)
                    }
                    .map_err(sim_err)?;
                    path.to_csv()
                }
            };
            emit(common, &csv)?;
            write_manifest(config)
        }
        Command::Transform { common, t, s, z } => {
            let model = load_model(&common.model)?;
            let d = model.dimension();
            let s = match s {
                Some(text) => parse_f64_list(text, "s")?,
                None => vec![0.0; d],
            };
            let z = match z {
                Some(text) => parse_complex_list(text)?,
                None => vec![Complex64::new(1.0, 0.0); d],
            };
            let query = transform::TransformQuery { t: *t, s, z };
            let grid = transform::Grid::new(*t, common.grid_steps);
            let field = transform::fixed_point(&model, query, grid, &fp_options(common))
                .map_err(transform_err)?;
            let value = field.joint_value(&model, *t);
            println!("value = {} + {}i", value.re, value.im);
            println!("iterations = {}", field.iterations);
            println!("residual = {:e}", field.residual);
            write_manifest(config)
        }
        Command::Pmf {
            common,
            t,
            component,
            max_k,
        } => {
            let model = load_model(&common.model)?;
            if *component == 0 || *component > model.dimension() {
                return Err(CliError::Config(format!(
                    "component {component} out of range (1-based)"
                )));
            }
            let pmf = transform::pmf_q(
                &model,
                *t,
                component - 1,
                *max_k,
                common.grid_steps,
                &fp_options(common),
                common.threads,
            )
            .map_err(transform_err)?;
            if pmf.aliasing_warning {
                eprintln!(
                    "warning: {:.3e} of the inverted mass lies beyond max_k; increase --max-k",
                    pmf.tail_estimate
                );
            }
            let mut csv = String::from("k,probability\n");
            for (k, p) in pmf.probs.iter().enumerate() {
                csv.push_str(&format!("{k},{p}\n"));
            }
            emit(common, &csv)?;
            write_manifest(config)
        }
        Command::Moments {
            common,
            t_grid,
            stats,
            step,
        } => {
            let model = load_model(&common.model)?;
            let grid = parse_time_grid(t_grid)?;
            let kinds: Vec<MomentKind> = stats
                .split(',')
                .map(|tok| parse_stat(tok.trim()))
                .collect::<Result<_, _>>()?;
            let opts = MomentOptions {
                grid_steps: common.grid_steps,
                tol: common.tol.unwrap_or(moments::MOMENT_FP_TOL),
                max_iter: 400,
                threads: common.threads,
            };
            let mut csv = String::from("t,statistic,value,error_estimate\n");
            for kind in kinds {
                let curve = moments::moment_curve(&model, kind, *step, &grid, &opts)
                    .map_err(transform_err)?;
                for (t, est) in grid.iter().zip(curve) {
                    csv.push_str(&format!(
                        "{t},{},{},{}\n",
                        kind.label(),
                        est.value,
                        est.error_estimate
                    ));
                }
            }
            emit(common, &csv)?;
            write_manifest(config)
        }
        Command::Graph { common } => {
            let model = load_model(&common.model)?;
            let graph = tails::build_graph(&model);
            let classes = tails::classify(&graph);
            let gamma_bar: Vec<Option<f64>> = match tails::tail_indices(&model) {
                Ok(report) => report.gamma_bar,
                Err(TailsError::UnsupportedJump { .. }) => vec![None; model.dimension()],
                Err(e) => return Err(tails_err(e)),
            };
            let mut csv = String::from("class_id,members,recurrent,gamma_bar\n");
            for (cid, class) in classes.classes.iter().enumerate() {
                let members: Vec<String> =
                    class.iter().map(|&v| (v + 1).to_string()).collect();
                let gamma = gamma_bar[class[0]]
                    .map(|g| g.to_string())
                    .unwrap_or_default();
                csv.push_str(&format!(
                    "{cid},{},{},{gamma}\n",
                    members.join("|"),
                    classes.recurrent[cid]
                ));
            }
            emit(common, &csv)?;
            write_manifest(config)
        }
        Command::Tails {
            common,
            t,
            thresholds,
            process,
        } => {
            let model = load_model(&common.model)?;
            let process = parse_process(process)?;
            let thresholds = parse_f64_list(thresholds, "thresholds")?;
            let d = model.dimension();
            let mut asymptotes = Vec::new();
            for i in 0..d {
                match tails::tail_asymptote(&model, *t, i, process, common.grid_steps) {
                    Ok(a) => asymptotes.push(Some(a)),
                    Err(TailsError::NoHeavyTailInfluence { .. }) => asymptotes.push(None),
                    Err(e) => return Err(tails_err(e)),
                }
            }
            if asymptotes.iter().all(|a| a.is_none()) {
                return Err(CliError::OutOfScope(
                    "no component carries a power-law tail".into(),
                ));
            }
            let mc = simulate::mc_tail(&model, *t, &thresholds, common.runs, common.seed, common.threads)
                .map_err(sim_err)?;
            let mut csv = String::from("x,component,asymptote,mc_estimate,mc_ci_lo,mc_ci_hi\n");
            for &x in &thresholds {
                for (i, asym) in asymptotes.iter().enumerate() {
                    let Some(asym) = asym else { continue };
                    let row = mc
                        .probability(process, i, x)
                        .expect("mc table covers the threshold grid");
                    csv.push_str(&format!(
                        "{x},{},{},{},{},{}\n",
                        i + 1,
                        asym.eval(x),
                        row.probability,
                        row.ci_lo,
                        row.ci_hi
                    ));
                }
            }
            emit(common, &csv)?;
            write_manifest(config)
        }
    }
}

/// Parses `std::env::args` and executes; returns the process exit code.
pub fn run_main() -> i32 {
    let cli = Cli::parse();
    let config = RunConfig {
        tool: "hawkes",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command,
    };
    match run(&config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
