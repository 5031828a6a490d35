use super::{StateFamily, RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ensure_hermitian, ensure_square, herm_eig, real, CMatrix};

/// Symmetric logarithmic derivative together with the spectral data of rho.
#[derive(Debug, Clone)]
pub struct SldResult {
    /// Hermitian `L` with `drho = (L rho + rho L) / 2` on the support-reachable block.
    pub l: CMatrix,
    /// Eigenvalues of rho, descending, with values below `rank_tol` set to zero.
    pub eigvals: Vec<f64>,
    /// Eigenvectors of rho as columns.
    pub eigvecs: CMatrix,
    /// `Tr(rho L^2)`
    pub qfi: f64,
    pub rank_tol: f64,
}

impl SldResult {
    /// Number of eigenvalues above the rank tolerance.
    pub fn rank(&self) -> usize {
        self.eigvals.iter().filter(|&&p| p > 0.0).count()
    }

    /// Eigenvectors of rho with nonzero eigenvalue, as columns.
    pub fn support(&self) -> CMatrix {
        self.eigvecs.columns(0, self.rank()).into_owned()
    }
}

/// Largest admissible magnitude of a derivative component between two null
/// directions of rho.
pub const NULL_BLOCK_TOL: f64 = 1e-8;

/// SLD from the spectral formula `L = sum 2/(p_j+p_k) <j|drho|k> |j><k|`,
/// skipping pairs with `p_j + p_k = 0`.
pub fn sld(rho: &CMatrix, drho: &CMatrix, rank_tol: f64) -> Result<SldResult> {
    let d = ensure_square(rho, "rho")?;
    if drho.nrows() != d || drho.ncols() != d {
        return Err(Error::dim("drho does not match rho"));
    }
    ensure_hermitian(rho)?;
    ensure_hermitian(drho)?;
    let eig = herm_eig(rho)?;
    let eigvals: Vec<f64> = eig.values.iter().map(|&p| if p < rank_tol { 0.0 } else { p }).collect();
    let v = &eig.vectors;
    let drho_eig = v.adjoint() * drho * v;
    let mut l_eig = CMatrix::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            let denom = eigvals[j] + eigvals[k];
            if denom > 0.0 {
                l_eig[(j, k)] = drho_eig[(j, k)] * (2.0 / denom);
            } else if drho_eig[(j, k)].norm() > NULL_BLOCK_TOL {
                return Err(Error::UnrepresentableDerivative { magnitude: drho_eig[(j, k)].norm() });
            }
        }
    }
    let l = v * l_eig * v.adjoint();
    let l = (&l + l.adjoint()).scale(0.5);
    let qfi = (rho * &l * &l).trace().re.max(0.0);
    Ok(SldResult { l, eigvals, eigvecs: eig.vectors, qfi, rank_tol })
}

/// QFI as `sum_{j,k} 2/(p_j+p_k) |<j|drho|k>|^2` over the spectral data of an
/// [`SldResult`]. Independent of the assembled `L`.
pub fn qfi_double_sum(rho_eigvals: &[f64], rho_eigvecs: &CMatrix, drho: &CMatrix) -> f64 {
    let drho_eig = rho_eigvecs.adjoint() * drho * rho_eigvecs;
    let mut total = 0.0;
    for (j, &pj) in rho_eigvals.iter().enumerate() {
        for (k, &pk) in rho_eigvals.iter().enumerate() {
            if pj + pk > 0.0 {
                total += 2.0 / (pj + pk) * drho_eig[(j, k)].norm_sqr();
            }
        }
    }
    total
}

/// Quantum Fisher information `Tr(rho L^2)` of a family at theta.
pub fn qfi(family: &StateFamily, theta: f64) -> Result<f64> {
    let (rho, drho) = super::eval_state(family, theta)?;
    Ok(sld(&rho, &drho, RANK_TOL)?.qfi)
}

/// `|| drho - (L rho + rho L)/2 ||_max`
pub fn sld_equation_residual(rho: &CMatrix, drho: &CMatrix, l: &CMatrix) -> f64 {
    let sym = (l * rho + rho * l) * real(0.5);
    crate::linalg::max_abs(&(drho - sym))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs, outer, CVector};

    #[test]
    fn pure_state_sld_is_twice_drho() {
        let theta: f64 = 0.4;
        let s = 0.5f64.sqrt();
        let psi = CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0) + num_complex::Complex64::from_polar(s, theta)]);
        let dpsi = CVector::from_vec(vec![c(0.0, 0.0), num_complex::Complex64::from_polar(s, theta) * c(0.0, 1.0)]);
        let rho = outer(&psi, &psi);
        let drho = outer(&dpsi, &psi) + outer(&psi, &dpsi);
        let r = sld(&rho, &drho, RANK_TOL).unwrap();
        let expected = (outer(&dpsi, &psi) + outer(&psi, &dpsi)).scale(2.0);
        assert!(max_abs(&(&r.l - expected)) < 1e-12);
        assert!((r.qfi - 1.0).abs() < 1e-12);
        assert!(sld_equation_residual(&rho, &drho, &r.l) < 1e-12);
    }

    #[test]
    fn null_block_derivative_is_flagged() {
        let rho = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
        let mut drho = CMatrix::zeros(3, 3);
        drho[(1, 2)] = c(0.1, 0.0);
        drho[(2, 1)] = c(0.1, 0.0);
        assert!(matches!(sld(&rho, &drho, RANK_TOL), Err(Error::UnrepresentableDerivative { .. })));
    }

    #[test]
    fn rejects_non_hermitian_derivative() {
        let rho = CMatrix::identity(2, 2).scale(0.5);
        let mut drho = CMatrix::zeros(2, 2);
        drho[(0, 1)] = c(1.0, 0.0);
        assert!(sld(&rho, &drho, RANK_TOL).is_err());
    }
}
