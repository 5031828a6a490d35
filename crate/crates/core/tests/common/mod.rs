#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr_free::gaussian;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

mod rand_distr_free {
    use rand::Rng;

    /// Box-Muller standard normal.
    pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    gaussian(rng)
}

pub fn random_matrix<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| Complex64::new(gaussian(rng), gaussian(rng)))
}

pub fn random_vector<R: Rng>(rng: &mut R, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    let n = v.norm();
    v.unscale(n)
}

pub fn random_traceless_hermitian<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let a = random_matrix(rng, d);
    let h = (&a + a.adjoint()).scale(0.5);
    let shift = h.trace() / d as f64;
    h - CMatrix::identity(d, d) * shift
}

/// Full-rank density matrix `A A† / Tr`.
pub fn random_density<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let a = random_matrix(rng, d);
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}


pub fn unitarity_error(u: &CMatrix) -> f64 {
    let d = u.ncols();
    (u.adjoint() * u - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn diag_max(u: &CMatrix, h: &CMatrix) -> f64 {
    (u.adjoint() * h * u).diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Haar-ish unitary from the QR factor of a Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    random_matrix(rng, d).qr().q()
}
