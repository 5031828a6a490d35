use crate::error::{Error, Result};
use crate::linalg::{expectation, frobenius, herm_eig, hermitian_part, recenter, CMatrix, CVector, C64};

use super::solve_2x2;

/// `H1` below this (relative to `H2`) is treated as zero.
const ZERO_REL: f64 = 1e-12;
/// Constructive residual accepted without polishing, relative to `||H1|| + ||H2||`.
const POLISH_TRIGGER: f64 = 1e-13;
/// Residual bound for a returned null vector, relative to `||H1|| + ||H2||`.
pub const NULL_TOL: f64 = 1e-9;
const POLISH_ITERS: usize = 200;

/// Which rescaling of `H2` the block construction uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockCase {
    /// `H2` scaled by `factor` so that `Tr(Sigma1) = Tr(Lambda1)`.
    Rescaled { factor: f64 },
    /// `Tr(Sigma1) = Tr(Sigma2) = 0` already.
    TracelessSigma,
}

/// Split of the space by the sign of the eigenvalues of `H1`, with `H2`
/// written in blocks over that split.
#[derive(Debug, Clone)]
pub struct BlockSplit {
    /// Eigenvectors of `H1` with eigenvalue `>= 0`, as columns.
    pub pos_basis: CMatrix,
    /// Eigenvectors of `H1` with eigenvalue `< 0`, as columns.
    pub neg_basis: CMatrix,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub sigma1: CMatrix,
    pub sigma2: CMatrix,
    pub offdiag: CMatrix,
    pub case: BlockCase,
    /// Unit vector in the positive block with `<v1|Lambda1|v1> = Tr(Lambda1)/p`.
    pub v1: CVector,
    /// Unit vector in the negative block with `<v2|Lambda2|v2> = Tr(Lambda2)/q`.
    pub v2: CVector,
}

fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0))))
}

/// Unit vector annihilating both diagonals, for any dimension.
fn common_null(a: &CMatrix, b: &CMatrix) -> Result<CVector> {
    let a = recenter(&hermitian_part(a));
    let b = recenter(&hermitian_part(b));
    match a.nrows() {
        1 => Ok(CVector::from_element(1, C64::new(1.0, 0.0))),
        2 => Ok(solve_2x2(&a, &b)?.unitary.column(0).into_owned()),
        _ => find_null_vector(&a, &b),
    }
}

impl BlockSplit {
    /// Requires `H1 != 0`.
    pub fn new(h1: &CMatrix, h2: &CMatrix) -> Result<Self> {
        let eig = herm_eig(h1)?;
        let tol = 1e-14 * eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let p = eig.values.iter().filter(|&&x| x >= -tol).count();
        let d = h1.nrows();
        if p == 0 || p == d {
            return Err(Error::invalid("H1 must be traceless and nonzero for a block split"));
        }
        let pos_basis = eig.vectors.columns(0, p).into_owned();
        let neg_basis = eig.vectors.columns(p, d - p).into_owned();
        let lambda1 = eig.values[..p].to_vec();
        let lambda2 = eig.values[p..].to_vec();
        let sigma1 = pos_basis.adjoint() * h2 * &pos_basis;
        let sigma2 = neg_basis.adjoint() * h2 * &neg_basis;
        let offdiag = pos_basis.adjoint() * h2 * &neg_basis;

        let tr_l1: f64 = lambda1.iter().sum();
        let tr_l2: f64 = lambda2.iter().sum();
        let tr_s1 = sigma1.trace().re;
        let l1 = diag(&lambda1);
        let l2 = diag(&lambda2);
        let q = d - p;
        let shift1 = CMatrix::identity(p, p).scale(tr_l1 / p as f64);
        let shift2 = CMatrix::identity(q, q).scale(tr_l2 / q as f64);
        let (case, v1, v2) = if tr_s1.abs() < ZERO_REL * frobenius(h2) || frobenius(h2) == 0.0 {
            let v1 = common_null(&sigma1, &(&l1 - &shift1))?;
            let v2 = common_null(&sigma2, &(&l2 - &shift2))?;
            (BlockCase::TracelessSigma, v1, v2)
        } else {
            let factor = tr_l1 / tr_s1;
            let v1 = common_null(&(&l1 - sigma1.scale(factor)), &(&l1 - &shift1))?;
            let v2 = common_null(&(&l2 - sigma2.scale(factor)), &(&l2 - &shift2))?;
            (BlockCase::Rescaled { factor }, v1, v2)
        };
        Ok(Self { pos_basis, neg_basis, lambda1, lambda2, sigma1, sigma2, offdiag, case, v1, v2 })
    }

    /// `cos b (v1 + 0) + sin b e^{-ia} (0 + v2)` in the original coordinates.
    pub fn combine(&self) -> CVector {
        let a = expectation(&diag(&self.lambda1), &self.v1).re;
        let b = -expectation(&diag(&self.lambda2), &self.v2).re;
        let beta = (a / b).sqrt().atan();
        let w = self.v1.dotc(&(&self.offdiag * &self.v2));
        let alpha = if w.norm() > 0.0 { w.arg() - std::f64::consts::FRAC_PI_2 } else { 0.0 };
        let x = &self.pos_basis * &self.v1 * C64::new(beta.cos(), 0.0);
        let y = &self.neg_basis * &self.v2 * C64::from_polar(beta.sin(), -alpha);
        x + y
    }
}

fn residual(h1: &CMatrix, h2: &CMatrix, v: &CVector) -> f64 {
    let n2 = v.norm_squared();
    (expectation(h1, v).re / n2).abs().max((expectation(h2, v).re / n2).abs())
}

/// Damped Gauss-Newton on the two normalized expectations over `v` in C^d.
fn polish(h1: &CMatrix, h2: &CMatrix, start: CVector) -> CVector {
    let d = start.len();
    let scale = frobenius(h1) + frobenius(h2);
    let mut v = start.unscale(start.norm());
    let mut best = residual(h1, h2, &v);
    let mut mu = 1e-6 * scale * scale;
    for _ in 0..POLISH_ITERS {
        if best <= POLISH_TRIGGER * scale {
            break;
        }
        let f = [expectation(h1, &v).re, expectation(h2, &v).re];
        let grads: Vec<Vec<f64>> = [(h1, f[0]), (h2, f[1])]
            .iter()
            .map(|(h, fk)| {
                let g = (*h * &v) - &v * C64::new(*fk, 0.0);
                g.iter().map(|z| 2.0 * z.re).chain(g.iter().map(|z| 2.0 * z.im)).collect()
            })
            .collect();
        let jjt = |a: usize, b: usize| grads[a].iter().zip(&grads[b]).map(|(x, y)| x * y).sum::<f64>();
        let (g00, g01, g11) = (jjt(0, 0) + mu, jjt(0, 1), jjt(1, 1) + mu);
        let det = g00 * g11 - g01 * g01;
        if det.abs() < f64::MIN_POSITIVE {
            break;
        }
        let y0 = (-f[0] * g11 + f[1] * g01) / det;
        let y1 = (-f[1] * g00 + f[0] * g01) / det;
        let step: Vec<f64> = (0..2 * d).map(|k| grads[0][k] * y0 + grads[1][k] * y1).collect();
        let delta = CVector::from_iterator(d, (0..d).map(|k| C64::new(step[k], step[d + k])));
        let candidate = &v + delta;
        let candidate = candidate.unscale(candidate.norm());
        let r = residual(h1, h2, &candidate);
        if r < best {
            v = candidate;
            best = r;
            mu = (mu * 0.1).max(1e-30 * scale * scale);
        } else {
            mu *= 10.0;
        }
    }
    v
}

/// Unit vector `v` with `<v|H1|v> = <v|H2|v> = 0` for traceless Hermitian
/// `H1`, `H2` of dimension at least 2.
pub fn find_null_vector(h1: &CMatrix, h2: &CMatrix) -> Result<CVector> {
    let d = h1.nrows();
    if d < 2 || h2.nrows() != d {
        return Err(Error::dim("find_null_vector needs two matrices of equal dimension >= 2"));
    }
    let n1 = frobenius(h1);
    let n2 = frobenius(h2);
    let scale = n1 + n2;
    if scale == 0.0 {
        let mut e = CVector::zeros(d);
        e[0] = C64::new(1.0, 0.0);
        return Ok(e);
    }
    if d == 2 {
        return Ok(solve_2x2(h1, h2)?.unitary.column(0).into_owned());
    }
    let zero = CMatrix::zeros(d, d);
    let (a, b) = if n1 <= ZERO_REL * n2 {
        (h2, &zero)
    } else if n2 <= ZERO_REL * n1 {
        (h1, &zero)
    } else {
        (h1, h2)
    };
    let v = BlockSplit::new(a, b)?.combine();
    let v = v.unscale(v.norm());
    let v = if residual(h1, h2, &v) > POLISH_TRIGGER * scale { polish(h1, h2, v) } else { v };
    let r = residual(h1, h2, &v);
    if r > NULL_TOL * scale || !r.is_finite() {
        return Err(Error::NonConvergence { context: format!("null vector search in dimension {d}"), residual: r });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real};

    fn dvec(xs: &[f64]) -> CMatrix {
        diag(xs)
    }

    #[test]
    fn single_matrix_case() {
        let h1 = dvec(&[1.0, -1.0, 0.0]);
        let h2 = CMatrix::zeros(3, 3);
        let v = find_null_vector(&h1, &h2).unwrap();
        assert!(expectation(&h1, &v).norm() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_and_hollow_pair() {
        let h1 = dvec(&[2.0, -1.0, -1.0]);
        let mut h2 = CMatrix::zeros(3, 3);
        h2[(0, 1)] = c(0.3, 0.4);
        h2[(1, 0)] = c(0.3, -0.4);
        h2[(1, 2)] = real(-0.7);
        h2[(2, 1)] = real(-0.7);
        h2[(0, 2)] = c(0.0, 0.2);
        h2[(2, 0)] = c(0.0, -0.2);
        let v = find_null_vector(&h1, &h2).unwrap();
        assert!(expectation(&h1, &v).norm() < 1e-10);
        assert!(expectation(&h2, &v).norm() < 1e-10);
    }

    #[test]
    fn equal_pair() {
        let h = dvec(&[1.0, 0.5, -1.5]);
        let v = find_null_vector(&h, &h).unwrap();
        assert!(expectation(&h, &v).norm() < 1e-12);
    }

    #[test]
    fn block_split_case_a_balances_traces() {
        let h1 = dvec(&[1.0, 1.0, -2.0]);
        let h2 = dvec(&[1.0, 0.0, -1.0]);
        let split = BlockSplit::new(&h1, &h2).unwrap();
        match split.case {
            BlockCase::Rescaled { factor } => assert!((factor - 2.0).abs() < 1e-12),
            other => panic!("unexpected case {other:?}"),
        }
        assert_eq!(split.pos_basis.ncols(), 2);
        assert!((split.pos_basis.adjoint() * &split.neg_basis).norm() < 1e-12);
    }
}
