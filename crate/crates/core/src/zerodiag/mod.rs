//! Orthonormal bases on which traceless matrices have a vanishing diagonal.

mod nullvec;
mod rotation;

pub use nullvec::{find_null_vector, BlockCase, BlockSplit, NULL_TOL};
pub use rotation::{solve_2x2, TwoByTwoRotation};

use crate::error::{Error, Result};
use crate::linalg::{
    antihermitian_part, complete_basis, ensure_hermitian, expectation, frobenius, hermitian_part, recenter, CMatrix,
};

/// Trace tolerance for Hermitian inputs, relative to `max(1, ||H||)`.
pub const TRACE_TOL: f64 = 1e-10;
/// Diagonal residual accepted for a returned basis, relative to `||H||`.
pub const DIAG_TOL: f64 = 1e-8;
/// Diagonal entries below this fraction of `||H1|| + ||H2||` are roundoff.
const ROUNDOFF_REL: f64 = 1e-14;
/// Trace tolerance for [`zero_diag_basis`], relative to `||M||`.
pub const TARGET_TRACE_TOL: f64 = 1e-9;

/// `max_k |<u_k|M|u_k>|` over the columns of `u`.
pub fn diag_residual(u: &CMatrix, m: &CMatrix) -> f64 {
    u.column_iter().map(|col| expectation(m, &col.into_owned()).norm()).fold(0.0, f64::max)
}

fn ensure_traceless(h: &CMatrix) -> Result<()> {
    ensure_hermitian(h)?;
    let tr = h.trace().re;
    if tr.abs() > TRACE_TOL * frobenius(h).max(1.0) {
        return Err(Error::NotTraceless { trace: tr });
    }
    Ok(())
}

fn peel(h1: &CMatrix, h2: &CMatrix) -> Result<CMatrix> {
    let d = h1.nrows();
    match d {
        1 => Ok(CMatrix::identity(1, 1)),
        2 => Ok(solve_2x2(h1, h2)?.unitary),
        _ => {
            let v = find_null_vector(h1, h2)?;
            let q = complete_basis(&CMatrix::from_columns(std::slice::from_ref(&v)));
            let rest = q.columns(1, d - 1).into_owned();
            let r1 = recenter(&(rest.adjoint() * h1 * &rest));
            let r2 = recenter(&(rest.adjoint() * h2 * &rest));
            let inner = peel(&r1, &r2)?;
            let mut out = CMatrix::zeros(d, d);
            out.set_column(0, &v);
            out.columns_mut(1, d - 1).copy_from(&(rest * inner));
            Ok(out)
        }
    }
}

/// Unitary whose columns zero-diagonalize two traceless Hermitian matrices.
///
/// Null vectors are peeled one at a time; the compressed pair on the
/// complement is re-centered before recursing.
pub fn simultaneous_zero_diag(h1: &CMatrix, h2: &CMatrix) -> Result<CMatrix> {
    let d = h1.nrows();
    if !h1.is_square() || h2.nrows() != d || h2.ncols() != d || d == 0 {
        return Err(Error::dim("simultaneous_zero_diag needs two square matrices of equal size"));
    }
    ensure_traceless(h1)?;
    ensure_traceless(h2)?;
    let u = peel(h1, h2)?;
    let floor = ROUNDOFF_REL * (frobenius(h1) + frobenius(h2));
    let residual = [h1, h2]
        .iter()
        .map(|h| {
            let r = diag_residual(&u, h);
            let n = frobenius(h);
            if r <= floor || n == 0.0 { 0.0 } else { r / n }
        })
        .fold(0.0, f64::max);
    if residual > DIAG_TOL {
        return Err(Error::NonConvergence { context: format!("zero-diagonalization in dimension {d}"), residual });
    }
    Ok(u)
}

/// Orthonormal basis (as unitary columns) with `<u|M|u> = 0` for every column.
pub fn zero_diag_basis(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::dim("zero_diag_basis needs a nonempty square matrix"));
    }
    let n = frobenius(m);
    let tr = m.trace();
    if tr.norm() > TARGET_TRACE_TOL * n {
        return Err(Error::NotTraceless { trace: tr.norm() });
    }
    if n == 0.0 {
        return Ok(CMatrix::identity(m.nrows(), m.nrows()));
    }
    simultaneous_zero_diag(&recenter(&hermitian_part(m)), &recenter(&antihermitian_part(m)))
}
