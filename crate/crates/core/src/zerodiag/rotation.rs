use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, C64};

/// Closed-form 2x2 zero-diagonalizing rotation
/// `[[cos b, -sin b e^{ia}], [sin b e^{-ia}, cos b]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoByTwoRotation {
    pub alpha: f64,
    pub beta: f64,
    pub unitary: CMatrix,
}

impl TwoByTwoRotation {
    pub fn new(alpha: f64, beta: f64) -> Self {
        let (s, cb) = beta.sin_cos();
        let e = C64::from_polar(1.0, alpha);
        let unitary = CMatrix::from_row_slice(2, 2, &[c(cb, 0.0), -e * s, e.conj() * s, c(cb, 0.0)]);
        Self { alpha, beta, unitary }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0)
    }
}

/// `(a, b, phi)` with `H = [[a, b e^{i phi}], [b e^{-i phi}, -a]]` after
/// removing the trace.
fn params(h: &CMatrix) -> (f64, f64, f64) {
    let a = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let z = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
    (a, z.norm(), z.arg())
}

/// Rotation whose columns zero-diagonalize both traceless Hermitian 2x2
/// matrices.
///
/// The first column is `(cos b, sin b e^{-ia})`; both diagonal entries of
/// `U† H U` equal `±(a cos 2b + b_k cos(a - phi_k) sin 2b)`.
pub fn solve_2x2(h1: &CMatrix, h2: &CMatrix) -> Result<TwoByTwoRotation> {
    for h in [h1, h2] {
        if h.nrows() != 2 || h.ncols() != 2 {
            return Err(Error::dim("solve_2x2 needs 2x2 matrices"));
        }
    }
    let (a1, b1, p1) = params(h1);
    let (a2, b2, p2) = params(h2);
    let scale = a1.abs().max(b1).max(a2.abs()).max(b2);
    if scale == 0.0 || a1.abs().max(a2.abs()) <= 1e-15 * scale {
        return Ok(TwoByTwoRotation::identity());
    }
    let x = b1 * a2 * p1.cos() - b2 * a1 * p2.cos();
    let y = b1 * a2 * p1.sin() - b2 * a1 * p2.sin();
    let alpha = if x * x + y * y < 1e-26 * scale.powi(4) { 0.0 } else { (-x).atan2(y) };
    let c1 = b1 * (alpha - p1).cos();
    let c2 = b2 * (alpha - p2).cos();
    let (a, ck) = if a1.hypot(c1) >= a2.hypot(c2) { (a1, c1) } else { (a2, c2) };
    let mut two_beta = a.atan2(-ck);
    if two_beta < 0.0 {
        two_beta += PI;
    }
    if two_beta >= PI {
        two_beta -= PI;
    }
    Ok(TwoByTwoRotation::new(alpha, 0.5 * two_beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::zerodiag::diag_residual;

    #[test]
    fn z_and_y_rotate_to_plus_minus() {
        let r = solve_2x2(&pauli::z(), &pauli::y()).unwrap();
        assert!((r.beta - PI / 4.0).abs() < 1e-15);
        assert!(r.alpha.abs() < 1e-15);
        assert!(diag_residual(&r.unitary, &pauli::z()) < 1e-15);
        assert!(diag_residual(&r.unitary, &pauli::y()) < 1e-15);
    }

    #[test]
    fn zero_diagonal_pair_keeps_identity() {
        let r = solve_2x2(&pauli::x(), &pauli::y()).unwrap();
        assert_eq!(r.unitary, CMatrix::identity(2, 2));
    }

    #[test]
    fn sign_of_z_does_not_move_the_basis() {
        let a = solve_2x2(&pauli::z(), &CMatrix::zeros(2, 2)).unwrap();
        let b = solve_2x2(&pauli::z().scale(-3.0), &CMatrix::zeros(2, 2)).unwrap();
        assert!((a.beta - b.beta).abs() < 1e-15);
        assert!((a.beta - PI / 4.0).abs() < 1e-15);
    }
}
