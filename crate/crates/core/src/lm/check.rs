use serde::{Deserialize, Serialize};

use super::pair::{BipartiteCoeffs, IsometryPair};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, I};
use crate::zerodiag::{simultaneous_zero_diag, zero_diag_basis};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmThresholds {
    pub phase_tol: f64,
    pub support_tol: f64,
    /// `C_ij` counts as zero below `c_tol_rel * max |C|`.
    pub c_tol_rel: f64,
}

impl Default for LmThresholds {
    fn default() -> Self {
        Self { phase_tol: 1e-8, support_tol: 1e-8, c_tol_rel: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmFeasibilityReport {
    /// `max |C_ij conj(D_ij) - conj(C_ij) D_ij|`
    pub phase_residual: f64,
    /// `max |D_ij|` over entries with `C_ij` counted as zero.
    pub support_residual: f64,
    pub feasible: bool,
    pub projective: bool,
}

pub fn check_lm_conditions(pair: &IsometryPair, thresholds: &LmThresholds) -> LmFeasibilityReport {
    let c = &pair.c_mat;
    let d = &pair.d_small;
    let c_max = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let c_tol = thresholds.c_tol_rel * c_max;
    let mut phase: f64 = 0.0;
    let mut support: f64 = 0.0;
    for (cij, dij) in c.iter().zip(d.iter()) {
        phase = phase.max((cij * dij.conj() - cij.conj() * dij).norm());
        if cij.norm() < c_tol {
            support = support.max(dij.norm());
        }
    }
    LmFeasibilityReport {
        phase_residual: phase,
        support_residual: support,
        feasible: phase < thresholds.phase_tol && support < thresholds.support_tol,
        projective: pair.is_projective(),
    }
}

/// Projective pair for a `2 x d` system satisfying the phase condition.
///
/// `U` zero-diagonalizes `AB† - BA†`; then `V` zero-diagonalizes both
/// `B†P_iA - A†P_iB` with `P_i` the projectors onto the columns of `U`.
/// The support condition is not guaranteed and must be read off the report.
pub fn construct_lm_2xd(coeffs: &BipartiteCoeffs) -> Result<IsometryPair> {
    let (d1, d2) = coeffs.dims();
    if d1 != 2 {
        return Err(Error::invalid(format!("construct_lm_2xd needs a 2 x d system, got {d1} x {d2}")));
    }
    let a = &coeffs.a_mat;
    let b = &coeffs.b_mat;
    let k = a * b.adjoint() - b * a.adjoint();
    let u = zero_diag_basis(&k)?;
    let targets: Vec<CMatrix> = u
        .column_iter()
        .map(|col| {
            let p = col * col.adjoint();
            (b.adjoint() * &p * a - a.adjoint() * &p * b) * (-I)
        })
        .collect();
    let v = simultaneous_zero_diag(&targets[0], &targets[1])?;
    IsometryPair::new(u, v, coeffs)
}

/// `Tr` of the two `V`-targets; both vanish when `U` zero-diagonalizes
/// `AB† - BA†`.
pub fn v_target_traces(coeffs: &BipartiteCoeffs, u: &CMatrix) -> Vec<C64> {
    let a = &coeffs.a_mat;
    let b = &coeffs.b_mat;
    u.column_iter()
        .map(|col| {
            let p = col * col.adjoint();
            (b.adjoint() * &p * a - a.adjoint() * &p * b).trace()
        })
        .collect()
}
