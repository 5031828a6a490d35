use serde::{Deserialize, Serialize};

use super::povm::{fisher_info, Povm, PovmElement, P_TOL};
use super::sld::{sld, SldResult};
use super::{FamilyKind, StateFamily, StateType, RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, herm_eig, identity, inner, max_abs, outer, CMatrix, CVector, C64};

/// Largest change of a rank-two eigenprojector across `theta ± h` still
/// treated as a fixed eigenbasis.
pub const DRIFT_TOL: f64 = 1e-8;
const DRIFT_STEP: f64 = 1e-4;

/// `(1 - |psi><psi|) |dpsi>`
pub fn psi_perp(psi: &CVector, dpsi: &CVector) -> Result<CVector> {
    if psi.len() != dpsi.len() {
        return Err(Error::dim("psi and dpsi have different lengths"));
    }
    Ok(dpsi - psi * inner(psi, dpsi))
}

/// `|psi><perp| - |perp><psi|`
pub fn pure_m(psi: &CVector, perp: &CVector) -> CMatrix {
    outer(psi, perp) - outer(perp, psi)
}

/// Zero-diagonal target for a pure state: `M + (|psi><psi| - I/D)`.
///
/// The added term is Hermitian while `M` is anti-Hermitian, so a vanishing
/// diagonal entry forces both `<E|M|E> = 0` and `|<E|psi>|^2 = 1/D`.
pub fn pure_target(psi: &CVector, perp: &CVector) -> CMatrix {
    let d = psi.len();
    pure_m(psi, perp) + outer(psi, psi) - identity(d).unscale(d as f64)
}

/// `M_ij = |psi_i><psi_j| L - L |psi_i><psi_j|` over the support of rho,
/// stored row-major in `(i, j)`.
pub fn m_set(result: &SldResult) -> Vec<CMatrix> {
    let support = result.support();
    let r = support.ncols();
    let mut out = Vec::with_capacity(r * r);
    for i in 0..r {
        for j in 0..r {
            let pij = outer(&support.column(i).into_owned(), &support.column(j).into_owned());
            out.push(&pij * &result.l - &result.l * &pij);
        }
    }
    out
}

/// Matrices entering the saturation conditions at one theta.
#[derive(Debug, Clone)]
pub struct SaturationMatrices {
    pub state_type: StateType,
    pub m_set: Vec<CMatrix>,
    /// Single zero-diagonalization target; absent for general mixed states.
    pub m_tilde: Option<CMatrix>,
    /// `(psi, psi_perp)` for pure states.
    pub pure: Option<(CVector, CVector)>,
    pub sld: SldResult,
}

fn projector_drift(a: &CMatrix, b: &CMatrix, k: usize) -> f64 {
    let pa = outer(&a.column(k).into_owned(), &a.column(k).into_owned());
    let pb = outer(&b.column(k).into_owned(), &b.column(k).into_owned());
    max_abs(&(pa - pb))
}

pub fn build_saturation_matrices(family: &StateFamily, theta: f64, rank_tol: f64) -> Result<SaturationMatrices> {
    let state = family.eval(theta)?;
    let result = sld(&state.rho, &state.drho, rank_tol)?;
    let ms = m_set(&result);
    if let Some((psi, dpsi)) = &state.pure {
        let perp = psi_perp(psi, dpsi)?;
        return Ok(SaturationMatrices {
            state_type: StateType::Pure,
            m_set: ms,
            m_tilde: Some(pure_target(psi, &perp)),
            pure: Some((psi.clone(), perp)),
            sld: result,
        });
    }
    match family.kind() {
        FamilyKind::RankTwoFixedBasis { psi0, psi1, .. } => Ok(SaturationMatrices {
            state_type: StateType::RankTwo,
            m_set: ms,
            m_tilde: Some(outer(psi0, psi1)),
            pure: None,
            sld: result,
        }),
        _ => match result.rank() {
            1 => {
                let psi = result.eigvecs.column(0).into_owned();
                let perp = psi_perp(&psi, &(&state.drho * &psi))?;
                Ok(SaturationMatrices {
                    state_type: StateType::Pure,
                    m_set: ms,
                    m_tilde: Some(pure_target(&psi, &perp)),
                    pure: Some((psi, perp)),
                    sld: result,
                })
            }
            2 => {
                let h = DRIFT_STEP;
                let plus = herm_eig(&family.eval(theta + h)?.rho)?;
                let minus = herm_eig(&family.eval(theta - h)?.rho)?;
                let drift = (0..2)
                    .map(|k| projector_drift(&plus.vectors, &minus.vectors, k))
                    .fold(0.0, f64::max);
                if drift > DRIFT_TOL {
                    return Err(Error::EigenbasisDrift { drift });
                }
                let psi0 = result.eigvecs.column(0).into_owned();
                let psi1 = result.eigvecs.column(1).into_owned();
                Ok(SaturationMatrices {
                    state_type: StateType::RankTwo,
                    m_set: ms,
                    m_tilde: Some(outer(&psi0, &psi1)),
                    pure: None,
                    sld: result,
                })
            }
            _ => Ok(SaturationMatrices {
                state_type: StateType::General,
                m_set: ms,
                m_tilde: None,
                pure: None,
                sld: result,
            }),
        },
    }
}

/// Relative thresholds for [`check_saturating`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Condition residual bound relative to `max ||M_ij||_F`.
    pub condition_rel: f64,
    /// Regularity residual bound relative to `||L||_F`.
    pub regularity_rel: f64,
    /// Bound on `QFI - FI` relative to the QFI.
    pub fi_gap_rel: f64,
    pub p_tol: f64,
    pub rank_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { condition_rel: 1e-7, regularity_rel: 1e-7, fi_gap_rel: 1e-6, p_tol: P_TOL, rank_tol: RANK_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub fi: f64,
    pub qfi: f64,
    pub condition_residual: f64,
    pub regularity_residual: f64,
    pub condition_threshold: f64,
    pub regularity_threshold: f64,
    pub saturating: bool,
}

/// Slack added to relative FI comparisons so that `QFI = 0` is not fragile.
const FI_ABS_SLACK: f64 = 1e-12;

pub fn check_saturating(povm: &Povm, family: &StateFamily, theta: f64, thresholds: &Thresholds) -> Result<SaturationReport> {
    let (rho, drho) = super::eval_state(family, theta)?;
    check_saturating_state(povm, &rho, &drho, thresholds)
}

/// [`check_saturating`] on an explicit `(rho, drho)`.
pub fn check_saturating_state(
    povm: &Povm,
    rho: &CMatrix,
    drho: &CMatrix,
    thresholds: &Thresholds,
) -> Result<SaturationReport> {
    if povm.dim() != rho.nrows() {
        return Err(Error::dim("POVM and state dimensions differ"));
    }
    let result = sld(rho, drho, thresholds.rank_tol)?;
    let support = result.support();
    let l = &result.l;
    let ms = m_set(&result);
    let m_scale = ms.iter().map(frobenius).fold(0.0, f64::max);
    let l_scale = frobenius(l);

    let mut condition: f64 = 0.0;
    let mut regularity: f64 = 0.0;
    for e in povm.elements() {
        let p = e.trace_with(rho);
        match e {
            PovmElement::Rank1(v) => {
                let a: Vec<C64> = support.column_iter().map(|s| v.dotc(&s)).collect();
                let lv = l * v;
                let b: Vec<C64> = support.column_iter().map(|s| s.dotc(&lv)).collect();
                for i in 0..a.len() {
                    for j in 0..a.len() {
                        let val = a[i] * b[j] - b[i].conj() * a[j].conj();
                        condition = condition.max(val.norm());
                    }
                }
                if p < thresholds.p_tol {
                    regularity = b.iter().map(|x| x.norm()).fold(regularity, f64::max);
                }
            }
            PovmElement::Operator(_) => {
                let s = e.sqrt()?;
                for m in &ms {
                    condition = condition.max(frobenius(&(&s * m * &s)));
                }
                if p < thresholds.p_tol {
                    let sl = &s * l;
                    for col in support.column_iter() {
                        regularity = regularity.max((&sl * col).norm());
                    }
                }
            }
        }
    }

    let fi = fisher_info(povm, rho, drho, thresholds.p_tol)?;
    let qfi = result.qfi;
    let condition_threshold = thresholds.condition_rel * m_scale;
    let regularity_threshold = thresholds.regularity_rel * l_scale;
    let saturating = condition <= condition_threshold
        && regularity <= regularity_threshold
        && qfi - fi <= thresholds.fi_gap_rel * qfi + FI_ABS_SLACK;
    Ok(SaturationReport {
        fi,
        qfi,
        condition_residual: condition,
        regularity_residual: regularity,
        condition_threshold,
        regularity_threshold,
        saturating,
    })
}
