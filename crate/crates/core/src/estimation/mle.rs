use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CVector, HilbertLayout};
use crate::locc::MeasurementTree;
use crate::metrology::{PovmElement, StateFamily};

pub const GRID_POINTS: usize = 512;
pub const GOLDEN_WIDTH: f64 = 1e-10;
/// Probabilities are floored here before taking logs.
pub const PROB_FLOOR: f64 = 1e-300;
/// A log-likelihood that varies less than this (relative) over the grid is flat.
pub const FLAT_REL: f64 = 1e-12;
/// Estimates this close to an end of the prior are flagged.
pub const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub theta: f64,
    pub log_likelihood: f64,
    /// The likelihood does not depend on theta; `theta` is the prior midpoint.
    pub degenerate: bool,
    /// `theta` sits at an end of the prior interval.
    pub boundary: bool,
}

/// Outcome probabilities of a flattened tree under a family.
#[derive(Debug, Clone)]
pub struct OutcomeModel {
    layout: HilbertLayout,
    paths: Vec<Vec<usize>>,
    vectors: Vec<CVector>,
}

impl OutcomeModel {
    pub fn from_tree(tree: &MeasurementTree) -> Self {
        let (paths, vectors) = tree.leaves().into_iter().map(|l| (l.path, l.vector)).unzip();
        Self { layout: tree.layout().clone(), paths, vectors }
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn probabilities(&self, family: &StateFamily, theta: f64) -> Result<Vec<f64>> {
        if family.layout() != &self.layout {
            return Err(Error::dim("family and tree layouts differ"));
        }
        if let Some((psi, _)) = family.pure_state(theta)? {
            return Ok(self.vectors.iter().map(|v| v.dotc(&psi).norm_sqr()).collect());
        }
        let rho = family.eval(theta)?.rho;
        Ok(self.vectors.iter().map(|v| PovmElement::Rank1(v.clone()).trace_with(&rho)).collect())
    }

    /// Counts by path in leaf order; unknown paths are an error.
    pub fn counts_vector(&self, counts: &BTreeMap<Vec<usize>, u64>) -> Result<Vec<u64>> {
        let mut out = vec![0; self.len()];
        for (path, &n) in counts {
            let k = self
                .paths
                .iter()
                .position(|p| p == path)
                .ok_or_else(|| Error::invalid(format!("outcome path {path:?} is not a leaf of the tree")))?;
            out[k] += n;
        }
        Ok(out)
    }
}

fn log_likelihood(counts: &[u64], probs: &[f64]) -> f64 {
    counts
        .iter()
        .zip(probs)
        .filter(|(&n, _)| n > 0)
        .map(|(&n, &p)| n as f64 * p.max(PROB_FLOOR).ln())
        .sum()
}

fn check_prior(prior: (f64, f64)) -> Result<()> {
    let (lo, hi) = prior;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid(format!("prior interval [{lo}, {hi}] is empty")));
    }
    Ok(())
}

/// Maximum-likelihood estimate over `prior` for an arbitrary outcome model:
/// a uniform grid scan followed by golden-section refinement around the best
/// grid point. Grid ties go to the point nearest the interval midpoint.
pub fn mle_with<F>(counts: &[u64], probs: F, prior: (f64, f64)) -> Result<MleResult>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    check_prior(prior)?;
    if counts.iter().all(|&n| n == 0) {
        return Err(Error::invalid("no counts"));
    }
    let (lo, hi) = prior;
    let mid = 0.5 * (lo + hi);
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let ll = |t: f64| -> Result<f64> {
        let p = probs(t)?;
        if p.len() != counts.len() {
            return Err(Error::dim("probability and count vectors differ in length"));
        }
        Ok(log_likelihood(counts, &p))
    };
    let mut values = Vec::with_capacity(GRID_POINTS);
    for k in 0..GRID_POINTS {
        let t = if k + 1 == GRID_POINTS { hi } else { lo + step * k as f64 };
        values.push((t, ll(t)?));
    }
    let finite: Vec<&(f64, f64)> = values.iter().filter(|(_, v)| v.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::Degenerate("log-likelihood is not finite anywhere on the prior".into()));
    }
    let max = finite.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let min = finite.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    if max - min <= FLAT_REL * max.abs().max(1.0) {
        return Ok(MleResult { theta: mid, log_likelihood: max, degenerate: true, boundary: false });
    }
    let mut best = 0;
    for (k, (t, v)) in values.iter().enumerate() {
        let (bt, bv) = values[best];
        if *v > bv || (*v == bv && (t - mid).abs() < (bt - mid).abs()) {
            best = k;
        }
    }
    let mut a = values[best.saturating_sub(1)].0;
    let mut b = values[(best + 1).min(GRID_POINTS - 1)].0;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (ll(x1)?, ll(x2)?);
    while b - a > GOLDEN_WIDTH {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = ll(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = ll(x2)?;
        }
    }
    let (mut theta, mut value) = (0.5 * (a + b), ll(0.5 * (a + b))?);
    // the refinement must not lose to the grid point it started from
    if values[best].1 > value {
        (theta, value) = values[best];
    }
    let boundary = theta - lo <= BOUNDARY_TOL || hi - theta <= BOUNDARY_TOL;
    Ok(MleResult { theta, log_likelihood: value, degenerate: false, boundary })
}

/// Maximum-likelihood estimate of theta from outcome counts of a tree.
pub fn mle(counts: &BTreeMap<Vec<usize>, u64>, family: &StateFamily, tree: &MeasurementTree, prior: (f64, f64)) -> Result<MleResult> {
    let model = OutcomeModel::from_tree(tree);
    let counts = model.counts_vector(counts)?;
    mle_with(&counts, |t| model.probabilities(family, t), prior)
}
