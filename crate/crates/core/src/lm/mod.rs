//! Product measurements on bipartite pure states.

mod check;
mod pair;
mod search;

pub use check::{check_lm_conditions, construct_lm_2xd, v_target_traces, LmFeasibilityReport, LmThresholds};
pub use pair::{
    coefficient_matrices, lm_povm_from_pair, pair_family, pair_layout, BipartiteCoeffs, IsometryPair, ISOMETRY_TOL, NORM_TOL, ORTHO_TOL,
};
pub use search::{heuristic_lm_search, SearchConfig, SearchOutcome};
