use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{check_order, path_label, MeasurementTree, TreeNode};
use crate::error::{Error, Result};
use crate::linalg::{expectation, frobenius, inner, partial_trace_keep, recenter, sandwich, CMatrix, CVector, HilbertLayout, C64};
use crate::metrology::{build_saturation_matrices, check_saturating, StateFamily, SaturationReport, Thresholds};
use crate::zerodiag::zero_diag_basis;

/// Trace of a conditioned node matrix allowed before re-centering, relative
/// to `||M||` of the full target.
pub const NODE_TRACE_TOL: f64 = 1e-9;
/// Node matrices below this, relative to `||M||`, are rounding noise.
pub const NODE_NOISE_TOL: f64 = 1e-12;
/// Leaf condition `|<E|M|E>| < LEAF_TOL * ||M||`.
pub const LEAF_TOL: f64 = 1e-7;
/// Orthogonality tolerance for discrimination inputs.
pub const ORTHO_TOL: f64 = 1e-10;
/// Residual below which two states are perfectly discriminated.
pub const DISCRIMINATION_TOL: f64 = 1e-8;

/// Fourier basis; zero-diagonalizes every traceless diagonal matrix and is
/// the limit of the basis chosen for `a Z` as `a -> 0`.
fn dft_basis(d: usize) -> CMatrix {
    let norm = (d as f64).sqrt().recip();
    CMatrix::from_fn(d, d, |j, k| C64::from_polar(norm, 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64))
}

struct Ctx<'a> {
    order: &'a [usize],
    full_dims: &'a [usize],
    scale: f64,
}

fn build_node(ctx: &Ctx, m: &CMatrix, remaining: &[usize], depth: usize, path: &[usize]) -> Result<TreeNode> {
    let k = ctx.order[depth];
    let pos = remaining.iter().position(|&r| r == k).expect("order is a permutation");
    let layout = HilbertLayout::new(remaining.iter().map(|&r| ctx.full_dims[r]).collect())?;
    let reduced = if remaining.len() == 1 { m.clone() } else { partial_trace_keep(m, &layout, &[pos])? };
    let tr = reduced.trace().norm();
    if tr > NODE_TRACE_TOL * ctx.scale {
        return Err(Error::NotTraceless { trace: tr });
    }
    let basis = if frobenius(&reduced) <= NODE_NOISE_TOL * ctx.scale {
        Ok(dft_basis(reduced.nrows()))
    } else {
        zero_diag_basis(&recenter(&reduced))
    };
    let basis = basis.map_err(|e| match e {
        Error::NonConvergence { context, residual } => {
            Error::NonConvergence { context: format!("{context} at tree path [{}]", path_label(path)), residual }
        }
        other => other,
    })?;
    let basis: Vec<CVector> = basis.column_iter().map(|c| c.into_owned()).collect();
    let children = if remaining.len() == 1 {
        Vec::new()
    } else {
        let rest: Vec<usize> = remaining.iter().copied().filter(|&r| r != k).collect();
        basis
            .par_iter()
            .enumerate()
            .map(|(x, v)| {
                let conditioned = sandwich(m, &layout, pos, v)?;
                let mut child_path = path.to_vec();
                child_path.push(x);
                build_node(ctx, &conditioned, &rest, depth + 1, &child_path)
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(TreeNode { subsystem: k, basis, children })
}

/// Adaptive product basis whose every leaf `E` has `<E|M|E> = 0`.
///
/// Each stage zero-diagonalizes the partial trace of the conditioned target
/// onto the next subsystem in `order`, then conditions on every outcome.
pub fn synthesize_tree(m_tilde: &CMatrix, layout: &HilbertLayout, order: &[usize]) -> Result<MeasurementTree> {
    let d = layout.total();
    if m_tilde.nrows() != d || m_tilde.ncols() != d {
        return Err(Error::dim(format!("target is {}x{}, layout needs {d}x{d}", m_tilde.nrows(), m_tilde.ncols())));
    }
    check_order(layout, order)?;
    let scale = frobenius(m_tilde);
    let tr = m_tilde.trace().norm();
    if tr > NODE_TRACE_TOL * scale {
        return Err(Error::NotTraceless { trace: tr });
    }
    let ctx = Ctx { order, full_dims: layout.dims(), scale };
    let all: Vec<usize> = (0..layout.len()).collect();
    let root = build_node(&ctx, m_tilde, &all, 0, &[])?;
    let tree = MeasurementTree::new(layout.clone(), order.to_vec(), root)?;
    let residual = leaf_residual(&tree, m_tilde);
    if residual > LEAF_TOL * scale {
        return Err(Error::NonConvergence { context: "leaf condition of synthesized tree".into(), residual });
    }
    Ok(tree)
}

/// `max |<E|M|E>|` over the leaves.
pub fn leaf_residual(tree: &MeasurementTree, m: &CMatrix) -> f64 {
    tree.leaves().iter().map(|l| expectation(m, &l.vector).norm()).fold(0.0, f64::max)
}

/// Tree for a family at `theta` from its zero-diagonalization target.
pub fn synthesize_for_family(family: &StateFamily, theta: f64, order: &[usize]) -> Result<MeasurementTree> {
    let sm = build_saturation_matrices(family, theta, crate::metrology::RANK_TOL)?;
    if sm.sld.qfi <= 0.0 {
        return Err(Error::invalid(format!("QFI vanishes at theta={theta}; the family carries no information to saturate")));
    }
    let m = sm
        .m_tilde
        .ok_or_else(|| Error::invalid("family is neither pure nor rank two with a fixed basis; no single target exists"))?;
    synthesize_tree(&m, family.layout(), order)
}

/// Flattens the tree and checks the saturation conditions.
pub fn verify_tree(tree: &MeasurementTree, family: &StateFamily, theta: f64, thresholds: &Thresholds) -> Result<SaturationReport> {
    if tree.layout() != family.layout() {
        return Err(Error::dim("tree and family layouts differ"));
    }
    check_saturating(&tree.flatten()?, family, theta, thresholds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafAssignment {
    pub path: String,
    pub hypothesis: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationReport {
    /// Success probability with equal priors.
    pub success_prob: f64,
    pub leaf_assignment: Vec<LeafAssignment>,
    /// `max |<E|psi0><psi1|E>|` over leaves.
    pub residual: f64,
    pub perfect: bool,
}

/// Leaf assignment by larger overlap, for any tree.
pub fn discrimination_report(tree: &MeasurementTree, psi0: &CVector, psi1: &CVector) -> DiscriminationReport {
    let mut success = 0.0;
    let mut residual: f64 = 0.0;
    let mut leaf_assignment = Vec::new();
    for leaf in tree.leaves() {
        let a = leaf.vector.dotc(psi0);
        let b = leaf.vector.dotc(psi1);
        residual = residual.max((a * b.conj()).norm());
        let hypothesis = if a.norm_sqr() >= b.norm_sqr() { 0 } else { 1 };
        success += 0.5 * if hypothesis == 0 { a.norm_sqr() } else { b.norm_sqr() };
        leaf_assignment.push(LeafAssignment { path: path_label(&leaf.path), hypothesis });
    }
    DiscriminationReport { success_prob: success.min(1.0), leaf_assignment, residual, perfect: residual < DISCRIMINATION_TOL }
}

/// One-way LOCC discrimination of two orthogonal states from the target
/// `|psi0><psi1|`.
pub fn discriminate(
    psi0: &CVector,
    psi1: &CVector,
    layout: &HilbertLayout,
    order: &[usize],
) -> Result<(MeasurementTree, DiscriminationReport)> {
    let overlap = inner(psi0, psi1).norm();
    if overlap > ORTHO_TOL {
        return Err(Error::invalid(format!("states are not orthogonal (overlap {overlap:.3e})")));
    }
    let tree = synthesize_tree(&(psi0 * psi1.adjoint()), layout, order)?;
    let report = discrimination_report(&tree, psi0, psi1);
    Ok((tree, report))
}
