use nalgebra::{Dyn, SymmetricEigen};

use super::{ensure_hermitian, ensure_square, hermitian_part, real, CMatrix, C64};
use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.vectors.nrows();
        let mut diag = CMatrix::zeros(d, d);
        for (i, &v) in self.values.iter().enumerate() {
            diag[(i, i)] = real(v);
        }
        &self.vectors * diag * self.vectors.adjoint()
    }
}

/// Eigenvalues below this (after clipping to the window) count as negative.
pub const PSD_CLIP: f64 = 1e-10;

/// Spectral decomposition of a Hermitian matrix. The input is symmetrized
/// before decomposition; each eigenvector's first non-negligible component is
/// made real and positive so results are reproducible.
pub fn herm_eig(m: &CMatrix) -> Result<HermEig> {
    ensure_square(m, "herm_eig input")?;
    ensure_hermitian(m)?;
    let h = hermitian_part(m);
    let eig = finite_eigen(&h)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let columns: Vec<_> = order
        .iter()
        .map(|&i| {
            let mut col = eig.eigenvectors.column(i).into_owned();
            if let Some(lead) = col.iter().find(|z| z.norm() > 1e-6).copied() {
                let phase = lead.conj() / lead.norm();
                col *= phase;
            }
            col
        })
        .collect();
    let vectors = CMatrix::from_columns(&columns);
    Ok(HermEig { values, vectors })
}

fn is_finite(eig: &SymmetricEigen<C64, Dyn>) -> bool {
    eig.eigenvalues.iter().all(|x| x.is_finite()) && eig.eigenvectors.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// The complex QR iteration can produce NaNs on exactly degenerate inputs
/// (e.g. rank-one projectors with entries at both corners); a Fourier
/// rotation breaks the structure without changing the spectrum.
fn finite_eigen(h: &CMatrix) -> Result<SymmetricEigen<C64, Dyn>> {
    let eig = h.clone().symmetric_eigen();
    if is_finite(&eig) {
        return Ok(eig);
    }
    let d = h.nrows();
    let norm = (d as f64).sqrt().recip();
    let f = CMatrix::from_fn(d, d, |j, k| C64::from_polar(norm, 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64));
    let mut rotated = (f.adjoint() * h * &f).symmetric_eigen();
    if !is_finite(&rotated) {
        return Err(Error::NonConvergence { context: "Hermitian eigendecomposition".into(), residual: f64::NAN });
    }
    rotated.eigenvectors = f * rotated.eigenvectors;
    Ok(rotated)
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-1e-10, 0)` are
/// clipped to zero; anything more negative is an error.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let eig = herm_eig(m)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -PSD_CLIP {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let d = m.nrows();
    let mut out = CMatrix::zeros(d, d);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let v = eig.vectors.column(k);
        out += (v * v.adjoint()).scale(lambda.sqrt());
    }
    Ok(out)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub(crate) fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(herm_eig(m)?.values.last().copied().unwrap_or(0.0))
}
