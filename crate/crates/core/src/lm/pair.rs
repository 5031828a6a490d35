use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{codec, identity, kron_vectors, max_abs, outer, CMatrix, CVector, HilbertLayout, StateVector, I};
use crate::metrology::{Povm, PovmElement, StateFamily};

/// Normalization tolerance for `Tr(A†A) = 1`.
pub const NORM_TOL: f64 = 1e-10;
/// Orthogonality tolerance for `Tr(A†B) = 0`.
pub const ORTHO_TOL: f64 = 1e-9;
/// Isometry tolerance for `U U† = I`.
pub const ISOMETRY_TOL: f64 = 1e-9;

/// Coefficient matrices of a bipartite pair: `psi = sum A_ij |i>|j>` and
/// `psi_perp = sum B_ij |i>|j>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteCoeffs {
    #[serde(with = "codec::matrix")]
    pub a_mat: CMatrix,
    #[serde(with = "codec::matrix")]
    pub b_mat: CMatrix,
}

impl BipartiteCoeffs {
    pub fn new(a_mat: CMatrix, b_mat: CMatrix) -> Result<Self> {
        if a_mat.shape() != b_mat.shape() {
            return Err(Error::dim("A and B have different shapes"));
        }
        let norm = (a_mat.adjoint() * &a_mat).trace().re;
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("Tr(A†A) = {norm}, expected 1")));
        }
        let overlap = (a_mat.adjoint() * &b_mat).trace().norm();
        if overlap > ORTHO_TOL {
            return Err(Error::invalid(format!("|Tr(A†B)| = {overlap:.3e}, expected 0")));
        }
        Ok(Self { a_mat, b_mat })
    }

    /// Divides both matrices by `||A||_F` first; the conditions on `(A, B)`
    /// are invariant under a common positive scale.
    pub fn normalized(a_mat: CMatrix, b_mat: CMatrix) -> Result<Self> {
        let n = a_mat.norm();
        if n == 0.0 {
            return Err(Error::invalid("A is zero"));
        }
        Self::new(a_mat.unscale(n), b_mat.unscale(n))
    }

    pub fn dims(&self) -> (usize, usize) {
        self.a_mat.shape()
    }

    /// Amplitude vectors of `psi` and `psi_perp` in big-endian order.
    pub fn vectors(&self) -> (CVector, CVector) {
        let flat = |m: &CMatrix| CVector::from_iterator(m.len(), m.row_iter().flat_map(|r| r.iter().copied().collect::<Vec<_>>()));
        (flat(&self.a_mat), flat(&self.b_mat))
    }
}

fn reshape(v: &CVector, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1, d2, |i, j| v[i * d2 + j])
}

/// Reshapes a pair of bipartite vectors into coefficient matrices.
pub fn coefficient_matrices(psi: &StateVector, psi_perp: &StateVector) -> Result<BipartiteCoeffs> {
    let layout = psi.layout();
    if layout != psi_perp.layout() {
        return Err(Error::dim("psi and psi_perp have different layouts"));
    }
    if layout.len() != 2 {
        return Err(Error::invalid(format!("layout has {} subsystems, expected 2", layout.len())));
    }
    psi.ensure_normalized(NORM_TOL)?;
    let (d1, d2) = (layout.dim(0), layout.dim(1));
    BipartiteCoeffs::new(reshape(psi.amplitudes(), d1, d2), reshape(psi_perp.amplitudes(), d1, d2))
}

/// Isometries `U` (d1 x m1) and `V` (d2 x m2) with `U U† = I`, `V V† = I`,
/// together with `C = U† A V` and `D = U† B V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryPair {
    #[serde(with = "codec::matrix")]
    pub u_mat: CMatrix,
    #[serde(with = "codec::matrix")]
    pub v_mat: CMatrix,
    #[serde(with = "codec::matrix")]
    pub c_mat: CMatrix,
    #[serde(with = "codec::matrix")]
    pub d_small: CMatrix,
}

fn check_isometry(m: &CMatrix, what: &str) -> Result<()> {
    if m.ncols() < m.nrows() {
        return Err(Error::dim(format!("{what} is {}x{}, needs at least as many columns as rows", m.nrows(), m.ncols())));
    }
    let dev = max_abs(&(m * m.adjoint() - identity(m.nrows())));
    if dev > ISOMETRY_TOL {
        return Err(Error::invalid(format!("{what} rows are not orthonormal (deviation {dev:.3e})")));
    }
    Ok(())
}

impl IsometryPair {
    pub fn new(u_mat: CMatrix, v_mat: CMatrix, coeffs: &BipartiteCoeffs) -> Result<Self> {
        let (d1, d2) = coeffs.dims();
        if u_mat.nrows() != d1 || v_mat.nrows() != d2 {
            return Err(Error::dim(format!("U must have {d1} rows and V {d2} rows")));
        }
        check_isometry(&u_mat, "U")?;
        check_isometry(&v_mat, "V")?;
        let c_mat = u_mat.adjoint() * &coeffs.a_mat * &v_mat;
        let d_small = u_mat.adjoint() * &coeffs.b_mat * &v_mat;
        Ok(Self { u_mat, v_mat, c_mat, d_small })
    }

    /// Square `U` and `V`.
    pub fn is_projective(&self) -> bool {
        self.u_mat.is_square() && self.v_mat.is_square()
    }
}

/// Product POVM `|u_i> (x) conj(v_j)` from the columns of `U` and `V`, so that
/// `<E_ij|psi> = C_ij`. Labels are `i.j`.
pub fn lm_povm_from_pair(pair: &IsometryPair) -> Result<Povm> {
    let mut elements = Vec::new();
    let mut labels = Vec::new();
    for (i, u) in pair.u_mat.column_iter().enumerate() {
        for (j, v) in pair.v_mat.column_iter().enumerate() {
            elements.push(PovmElement::Rank1(kron_vectors(&[u.into_owned(), v.map(|z| z.conj())])));
            labels.push(format!("{i}.{j}"));
        }
    }
    Povm::new(elements, labels)
}

/// Layout `[d1, d2]` of a coefficient pair.
pub fn pair_layout(coeffs: &BipartiteCoeffs) -> Result<HilbertLayout> {
    let (d1, d2) = coeffs.dims();
    HilbertLayout::new(vec![d1, d2])
}

/// Pure family `cos(theta) psi + sin(theta) psi_perp` generated by
/// `G = i(|b><a| - |a><b|)`; at `theta = 0` its orthogonal direction is `B`.
pub fn pair_family(coeffs: &BipartiteCoeffs) -> Result<StateFamily> {
    let layout = pair_layout(coeffs)?;
    let (a, b) = coeffs.vectors();
    let bn = b.norm();
    if bn == 0.0 {
        return Err(Error::invalid("B is zero; the family carries no information"));
    }
    let b = b.unscale(bn);
    let g = (outer(&b, &a) - outer(&a, &b)) * I;
    StateFamily::unitary_generator(layout.clone(), StateVector::new(layout, a)?, g)
}
