//! Monte-Carlo estimation with synthesized measurements.

mod mle;
mod sampling;
mod sim;

pub use mle::{mle, mle_with, MleResult, OutcomeModel, BOUNDARY_TOL, FLAT_REL, GOLDEN_WIDTH, GRID_POINTS, PROB_FLOOR};
pub use sampling::{sample_counts, sample_path, NEG_PROB_TOL};
pub use sim::{run_trials, split_shots, two_step, SimConfig, SimReport, Strategy, TrialOutcome, BOOTSTRAP_RESAMPLES};
