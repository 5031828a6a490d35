//! State families, SLD and Fisher information, and the saturation conditions.

mod family;
mod hamiltonian;
mod povm;
mod saturation;
mod scalar;
mod sld;

pub use family::{eval_state, EvaluatedState, FamilyKind, MixedFn, ProbFn, PureFn, StateFamily, StateType, TRACE_TOL};
pub use hamiltonian::{pauli_sum, PauliStringTerm};
pub use povm::{fisher_info, Povm, PovmElement, COMPLETENESS_TOL, PSD_TOL, P_TOL};
pub use saturation::{
    build_saturation_matrices, check_saturating, check_saturating_state, m_set, psi_perp, pure_m, pure_target,
    SaturationMatrices, SaturationReport, Thresholds, DRIFT_TOL,
};
pub use scalar::ScalarFn;
pub use sld::{qfi, qfi_double_sum, sld, sld_equation_residual, SldResult, NULL_BLOCK_TOL};

/// Eigenvalues of rho below this are treated as zero.
pub const RANK_TOL: f64 = 1e-9;
