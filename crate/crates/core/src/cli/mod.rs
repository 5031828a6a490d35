//! Command-line interface.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::codec;
use crate::lm::{
    check_lm_conditions, coefficient_matrices, construct_lm_2xd, heuristic_lm_search, BipartiteCoeffs, LmThresholds, SearchConfig,
};
use crate::linalg::StateVector;
use crate::locc::{synthesize_for_family, verify_tree, write_bloch_csv, MeasurementTree};
use crate::estimation::{run_trials, SimConfig, Strategy};
use crate::metrology::{build_saturation_matrices, psi_perp, Thresholds, RANK_TOL};
use crate::scenarios::{builtin, Scenario, BUILTIN_NAMES};

#[derive(Debug, Parser)]
#[command(name = "qcrb-locc", version, about = "Fisher information, saturating LOCC measurements and local-measurement analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct At {
    /// Built-in scenario name or path to a scenario JSON file.
    scenario: String,
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantum Fisher information of a scenario at theta.
    Qfi(At),
    /// Synthesize a saturating one-way LOCC tree.
    Synthesize {
        #[command(flatten)]
        at: At,
        /// Measurement order, comma separated 0-based subsystems.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a tree against a scenario.
    Verify {
        #[arg(long)]
        tree: PathBuf,
        #[command(flatten)]
        at: At,
    },
    /// Monte-Carlo estimation with a synthesized tree.
    Simulate {
        #[command(flatten)]
        at: At,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        two_step: bool,
        /// Prior interval `lo,hi`; defaults to theta +- 0.5 within the domain.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        prior: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Local-measurement feasibility of a bipartite pure family.
    LmCheck {
        /// Scenario; omit when giving --a-mat and --b-mat.
        scenario: Option<String>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        /// JSON matrix file, rows of [re, im] pairs.
        #[arg(long, requires = "b_mat")]
        a_mat: Option<PathBuf>,
        #[arg(long, requires = "a_mat")]
        b_mat: Option<PathBuf>,
        /// Only square unitaries U, V.
        #[arg(long)]
        projective_only: bool,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bloch vectors of qubit node bases as CSV.
    ExportBloch {
        scenario: String,
        /// Existing tree; otherwise one tree is synthesized per theta.
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Use the scenario grid.
        #[arg(long)]
        grid: bool,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in scenarios.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Debug, Subcommand)]
enum ScenarioCommand {
    List,
    /// Print a scenario as JSON.
    Show { name: String },
}

pub fn load_scenario(name: &str) -> Result<Scenario> {
    let path = Path::new(name);
    if name.ends_with(".json") || path.is_file() {
        return Scenario::from_json(&fs::read_to_string(path)?);
    }
    builtin(name)
}

fn default_order(s: &Scenario, order: Option<Vec<usize>>) -> Vec<usize> {
    order.unwrap_or_else(|| (0..s.family().layout().len()).collect())
}

fn emit<T: Serialize, W: Write>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn read_matrix(path: &Path) -> Result<crate::linalg::CMatrix> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&fs::read_to_string(path)?)?;
    codec::matrix_from_rows(&rows).map_err(Error::Invalid)
}

fn scenario_coeffs(s: &Scenario, theta: f64) -> Result<BipartiteCoeffs> {
    let layout = s.family().layout().clone();
    let (psi, dpsi) = s
        .family()
        .pure_state(theta)?
        .ok_or_else(|| Error::invalid(format!("scenario {} is not a pure family", s.name())))?;
    let perp = psi_perp(&psi, &dpsi)?;
    coefficient_matrices(&StateVector::new(layout.clone(), psi)?, &StateVector::new(layout, perp)?)
}

fn lm_check<W: Write>(coeffs: &BipartiteCoeffs, projective_only: bool, restarts: usize, seed: u64, out: &mut W) -> Result<()> {
    let th = LmThresholds::default();
    let (d1, _) = coeffs.dims();
    let mut constructed = None;
    if d1 == 2 {
        let pair = construct_lm_2xd(coeffs)?;
        let report = check_lm_conditions(&pair, &th);
        if report.feasible {
            constructed = Some((pair, report));
        }
    }
    let (pair, report, method, evidence_only) = match constructed {
        Some((p, r)) => (p, r, "construct-2xd", false),
        None => {
            let cfg = SearchConfig { restarts, allow_isometry_padding: !projective_only, seed, thresholds: th, ..SearchConfig::default() };
            let o = heuristic_lm_search(coeffs, &cfg)?;
            let evidence = !o.report.feasible;
            (o.best, o.report, "search", evidence)
        }
    };
    emit(
        out,
        &json!({
            "residuals": { "phase": report.phase_residual, "support": report.support_residual },
            "feasible": report.feasible,
            "projective": report.projective,
            "method": method,
            "evidence_only": evidence_only,
            "U": codec::matrix_to_rows(&pair.u_mat),
            "V": codec::matrix_to_rows(&pair.v_mat),
        }),
    )
}

fn default_prior(s: &Scenario, theta: f64, prior: Option<Vec<f64>>) -> Result<(f64, f64)> {
    match prior {
        Some(p) if p.len() == 2 => Ok((p[0], p[1])),
        Some(p) => Err(Error::invalid(format!("--prior needs two values, got {}", p.len()))),
        None => {
            let (lo, hi) = s.family().domain().unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            Ok(((theta - 0.5).max(lo), (theta + 0.5).min(hi)))
        }
    }
}

fn run_command<W: Write>(cmd: Command, out: &mut W) -> Result<()> {
    match cmd {
        Command::Qfi(at) => {
            let s = load_scenario(&at.scenario)?;
            let sat = build_saturation_matrices(s.family(), at.theta, RANK_TOL)?;
            emit(out, &json!({ "scenario": s.name(), "theta": at.theta, "qfi": sat.sld.qfi, "state_type": sat.state_type }))
        }
        Command::Synthesize { at, order, out: path } => {
            let s = load_scenario(&at.scenario)?;
            let tree = synthesize_for_family(s.family(), at.theta, &default_order(&s, order))?;
            let text = tree.to_json()?;
            match path {
                Some(p) => fs::write(p, text + "\n")?,
                None => writeln!(out, "{text}")?,
            }
            Ok(())
        }
        Command::Verify { tree, at } => {
            let s = load_scenario(&at.scenario)?;
            let tree = MeasurementTree::from_json(&fs::read_to_string(tree)?)?;
            let report = verify_tree(&tree, s.family(), at.theta, &Thresholds::default())?;
            emit(out, &report)
        }
        Command::Simulate { at, shots, trials, seed, two_step, prior, order } => {
            let s = load_scenario(&at.scenario)?;
            let order = default_order(&s, order);
            let prior = default_prior(&s, at.theta, prior)?;
            let strategy = if two_step {
                Strategy::TwoStep { order }
            } else {
                Strategy::Fixed(synthesize_for_family(s.family(), at.theta, &order)?)
            };
            let cfg = SimConfig { family: s.family().clone(), theta_true: at.theta, strategy, shots, trials, seed, prior };
            emit(out, &run_trials(&cfg)?)
        }
        Command::LmCheck { scenario, theta, a_mat, b_mat, projective_only, restarts, seed } => {
            let coeffs = match (scenario, a_mat, b_mat) {
                (None, Some(a), Some(b)) => BipartiteCoeffs::new(read_matrix(&a)?, read_matrix(&b)?)?,
                (Some(name), None, None) => scenario_coeffs(&load_scenario(&name)?, theta)?,
                _ => return Err(Error::invalid("give either a scenario or both --a-mat and --b-mat")),
            };
            lm_check(&coeffs, projective_only, restarts, seed, out)
        }
        Command::ExportBloch { scenario, tree, grid, theta, order, out: path } => {
            let s = load_scenario(&scenario)?;
            let rows = match tree {
                Some(t) => {
                    let tree = MeasurementTree::from_json(&fs::read_to_string(t)?)?;
                    tree.bloch_rows(theta.unwrap_or(0.0))
                }
                None => {
                    let thetas = match (grid, theta) {
                        (true, _) | (false, None) => s.theta_grid(),
                        (false, Some(t)) => vec![t],
                    };
                    let order = default_order(&s, order);
                    let mut rows = Vec::new();
                    for t in thetas {
                        rows.extend(synthesize_for_family(s.family(), t, &order)?.bloch_rows(t));
                    }
                    rows
                }
            };
            match path {
                Some(p) => write_bloch_csv(&rows, fs::File::create(p)?),
                None => write_bloch_csv(&rows, &mut *out),
            }
        }
        Command::Scenario(ScenarioCommand::List) => {
            let list = BUILTIN_NAMES
                .iter()
                .map(|n| builtin(n).map(|s| json!({ "name": n, "notes": s.spec().notes })))
                .collect::<Result<Vec<_>>>()?;
            emit(out, &list)
        }
        Command::Scenario(ScenarioCommand::Show { name }) => {
            let s = load_scenario(&name)?;
            writeln!(out, "{}", s.to_json()?)?;
            Ok(())
        }
    }
}

/// Exit code of an error: 2 for numerical non-convergence, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

/// Runs the CLI with explicit arguments and output; returns the exit code.
pub fn run<I, T, W, E>(argv: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match run_command(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn cli_main() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
