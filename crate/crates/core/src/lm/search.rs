use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check::{check_lm_conditions, LmFeasibilityReport, LmThresholds};
use super::pair::{BipartiteCoeffs, IsometryPair};
use crate::error::Result;
use crate::linalg::{CMatrix, C64};

/// Settings of the multi-start isometry search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Levenberg-Marquardt iterations per restart, spread over the
    /// regularization schedule.
    pub iters: usize,
    pub allow_isometry_padding: bool,
    pub seed: u64,
    pub thresholds: LmThresholds,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 100, iters: 240, allow_isometry_padding: true, seed: 0, thresholds: LmThresholds::default() }
    }
}

/// Outcome of [`heuristic_lm_search`]. A failure to find a feasible pair is
/// numerical evidence only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: IsometryPair,
    pub report: LmFeasibilityReport,
    /// Extra columns `(m1 - d1, m2 - d2)` of the best pair.
    pub padding: (usize, usize),
    /// Final regularized objective of the best restart.
    pub objective: f64,
    pub evidence_only: bool,
}

const ETA_SCHEDULE: [f64; 6] = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12];
const FD_STEP: f64 = 1e-7;

/// Anti-Hermitian `m x m` matrix from `m^2` reals.
fn anti_hermitian(params: &[f64], m: usize) -> CMatrix {
    let mut x = CMatrix::zeros(m, m);
    let mut k = 0;
    for i in 0..m {
        x[(i, i)] = C64::new(0.0, params[k]);
        k += 1;
        for j in i + 1..m {
            let z = C64::new(params[k], params[k + 1]);
            k += 2;
            x[(i, j)] = z;
            x[(j, i)] = -z.conj();
        }
    }
    x
}

struct Problem<'a> {
    coeffs: &'a BipartiteCoeffs,
    m1: usize,
    m2: usize,
}

impl Problem<'_> {
    fn n_params(&self) -> usize {
        self.m1 * self.m1 + self.m2 * self.m2
    }

    fn isometries(&self, p: &[f64]) -> (CMatrix, CMatrix) {
        let (d1, d2) = self.coeffs.dims();
        let (p1, p2) = p.split_at(self.m1 * self.m1);
        let u = anti_hermitian(p1, self.m1).exp().rows(0, d1).into_owned();
        let v = anti_hermitian(p2, self.m2).exp().rows(0, d2).into_owned();
        (u, v)
    }

    /// Component of `D_ij` not along a real multiple of `C_ij`, with `eta`
    /// keeping the projection finite where `C_ij` vanishes.
    fn residuals(&self, p: &[f64], eta: f64) -> DVector<f64> {
        let (u, v) = self.isometries(p);
        let c = u.adjoint() * &self.coeffs.a_mat * &v;
        let d = u.adjoint() * &self.coeffs.b_mat * &v;
        let mut r = DVector::zeros(2 * c.len());
        for (k, (cij, dij)) in c.iter().zip(d.iter()).enumerate() {
            let t = (cij.conj() * dij).re / (cij.norm_sqr() + eta);
            let res = dij - cij * t;
            r[2 * k] = res.re;
            r[2 * k + 1] = res.im;
        }
        r
    }

    fn jacobian(&self, p: &[f64], r0: &DVector<f64>, eta: f64) -> DMatrix<f64> {
        let n = p.len();
        let mut j = DMatrix::zeros(r0.len(), n);
        let mut q = p.to_vec();
        for k in 0..n {
            q[k] = p[k] + FD_STEP;
            let rk = self.residuals(&q, eta);
            j.set_column(k, &((rk - r0) / FD_STEP));
            q[k] = p[k];
        }
        j
    }

    fn solve(&self, start: Vec<f64>, iters: usize) -> (Vec<f64>, f64) {
        let mut p = start;
        let per_stage = (iters / ETA_SCHEDULE.len()).max(1);
        let mut cost = f64::INFINITY;
        for &eta in &ETA_SCHEDULE {
            let mut r = self.residuals(&p, eta);
            cost = r.norm_squared();
            let mut mu = 1e-3;
            for _ in 0..per_stage {
                if cost < 1e-30 {
                    break;
                }
                let j = self.jacobian(&p, &r, eta);
                let jt = j.transpose();
                let mut normal = &jt * &j;
                let grad = &jt * &r;
                for k in 0..normal.nrows() {
                    normal[(k, k)] += mu * (1.0 + normal[(k, k)]);
                }
                let step = match normal.cholesky() {
                    Some(ch) => ch.solve(&(-grad)),
                    None => {
                        mu *= 10.0;
                        continue;
                    }
                };
                let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let rt = self.residuals(&trial, eta);
                let ct = rt.norm_squared();
                if ct < cost {
                    p = trial;
                    r = rt;
                    cost = ct;
                    mu = (mu * 0.3).max(1e-12);
                } else {
                    mu *= 10.0;
                    if mu > 1e12 {
                        break;
                    }
                }
            }
        }
        (p, cost)
    }
}

fn rank_key(report: &LmFeasibilityReport) -> f64 {
    report.phase_residual.max(report.support_residual)
}

/// Multi-start local search for isometries meeting both LM conditions.
///
/// Unitaries are `exp(X)` of anti-Hermitian `X`; isometries keep the first
/// `d` rows of an `m x m` unitary. The objective penalizes the part of each
/// `D_ij` that is not a real multiple of `C_ij`. Padding `(0, 1)` then `(1, 1)`
/// is tried after the square case when allowed. Restarts run in parallel
/// with per-restart streams; the result does not depend on scheduling.
pub fn heuristic_lm_search(coeffs: &BipartiteCoeffs, config: &SearchConfig) -> Result<SearchOutcome> {
    let (d1, d2) = coeffs.dims();
    let mut paddings = vec![(0, 0)];
    if config.allow_isometry_padding {
        paddings.extend([(0, 1), (1, 1)]);
    }
    let mut best: Option<(SearchOutcome, f64)> = None;
    for (stage, &(e1, e2)) in paddings.iter().enumerate() {
        let problem = Problem { coeffs, m1: d1 + e1, m2: d2 + e2 };
        let runs: Vec<(f64, Vec<f64>)> = (0..config.restarts)
            .into_par_iter()
            .map(|restart| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream((stage * config.restarts.max(1) + restart) as u64);
                let start: Vec<f64> = (0..problem.n_params()).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
                let (p, cost) = problem.solve(start, config.iters);
                (cost, p)
            })
            .collect();
        for (cost, p) in runs {
            let (u, v) = problem.isometries(&p);
            let pair = IsometryPair::new(u, v, coeffs)?;
            let report = check_lm_conditions(&pair, &config.thresholds);
            let key = rank_key(&report);
            let better = match &best {
                None => true,
                Some((b, bk)) => (report.feasible && !b.report.feasible) || (report.feasible == b.report.feasible && key < *bk),
            };
            if better {
                best = Some((
                    SearchOutcome { best: pair, report, padding: (e1, e2), objective: cost, evidence_only: true },
                    key,
                ));
            }
        }
        if best.as_ref().is_some_and(|(b, _)| b.report.feasible) {
            break;
        }
    }
    Ok(best.expect("at least one padding stage").0)
}
