//! Dense complex linear algebra over multipartite Hilbert spaces.
//!
//! Operators are `nalgebra` dense matrices of `Complex64`. Subsystem order is
//! the layout order and product-basis indices are big-endian in that order.

pub mod codec;
mod layout;
mod ops;
mod spectral;
mod state;

pub use layout::HilbertLayout;
pub use ops::{kron, kron_vectors, partial_trace, partial_trace_keep, sandwich};
pub use spectral::{herm_eig, sqrt_psd, HermEig};
pub(crate) use spectral::min_eigenvalue;
pub use state::StateVector;


use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Absolute tolerance on the largest entry of `M - M†`.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `|a><b|`
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// `<a|b>`
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

/// `<v|M|v>`
pub fn expectation(m: &CMatrix, v: &CVector) -> C64 {
    v.dotc(&(m * v))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

/// `(M + M†) / 2`
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `(M - M†) / 2i`, so that `M = H1 + i H2` with both parts Hermitian.
pub fn antihermitian_part(m: &CMatrix) -> CMatrix {
    (m - m.adjoint()) * c(0.0, -0.5)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_square(m: &CMatrix, what: &str) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::dim(format!("{what} is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_hermitian(m: &CMatrix) -> Result<()> {
    let deviation = hermitian_deviation(m);
    if deviation > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Subtract `Tr(M)/d * I` so the result is traceless.
pub fn recenter(m: &CMatrix) -> CMatrix {
    let d = m.nrows();
    let shift = m.trace() / d as f64;
    let mut out = m.clone();
    for i in 0..d {
        out[(i, i)] -= shift;
    }
    out
}

/// Gram-Schmidt completion of the orthonormal columns of `cols` to a full
/// unitary of size `d`. Candidate vectors are the computational basis.
pub fn complete_basis(cols: &CMatrix) -> CMatrix {
    let d = cols.nrows();
    let mut basis: Vec<CVector> = cols.column_iter().map(|c| c.into_owned()).collect();
    let mut k = 0;
    while basis.len() < d && k < d {
        let mut e = CVector::zeros(d);
        e[k] = real(1.0);
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&e);
                e -= b * proj;
            }
        }
        let n = e.norm();
        if n > 1e-6 {
            basis.push(e.unscale(n));
        }
        k += 1;
    }
    CMatrix::from_columns(&basis)
}

/// Pauli matrices in the computational basis.
pub mod pauli {
    use super::{c, real, CMatrix};

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), c(0.0, -1.0), c(0.0, 1.0), real(0.0)])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)])
    }

    pub fn id() -> CMatrix {
        CMatrix::identity(2, 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_recombine() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0), c(-1.0, 0.25)]);
        let h1 = hermitian_part(&m);
        let h2 = antihermitian_part(&m);
        assert!(hermitian_deviation(&h1) < 1e-15);
        assert!(hermitian_deviation(&h2) < 1e-15);
        assert!(max_abs(&(h1 + h2 * I - &m)) < 1e-15);
    }

    #[test]
    fn completes_a_basis() {
        let v = CVector::from_vec(vec![real(0.6), c(0.0, 0.8), real(0.0)]);
        let u = complete_basis(&CMatrix::from_columns(&[v]));
        assert_eq!(u.ncols(), 3);
        assert!(max_abs(&(u.adjoint() * &u - identity(3))) < 1e-12);
    }
}
