use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mle::{mle_with, OutcomeModel};
use super::sampling::sample_counts;
use crate::error::{Error, Result};
use crate::locc::{synthesize_for_family, MeasurementTree};
use crate::metrology::{qfi, StateFamily};

pub const BOOTSTRAP_RESAMPLES: usize = 1000;
/// Stream id of the bootstrap generator; trial streams are `0..trials`.
const BOOTSTRAP_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone)]
pub enum Strategy {
    /// Every shot uses the same tree.
    Fixed(MeasurementTree),
    /// `ceil(sqrt(N))` shots with a tree synthesized at the prior midpoint,
    /// the rest with a tree synthesized at the rough estimate.
    TwoStep { order: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub family: StateFamily,
    pub theta_true: f64,
    pub strategy: Strategy,
    pub shots: u64,
    pub trials: usize,
    pub seed: u64,
    pub prior: (f64, f64),
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.prior;
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
            return Err(Error::invalid(format!("prior interval [{lo}, {hi}] is empty")));
        }
        if !(lo..=hi).contains(&self.theta_true) {
            return Err(Error::invalid(format!("theta_true = {} lies outside the prior [{lo}, {hi}]", self.theta_true)));
        }
        if self.shots == 0 || self.trials == 0 {
            return Err(Error::invalid("shots and trials must be positive"));
        }
        if let Strategy::TwoStep { .. } = self.strategy {
            if self.shots < 16 {
                return Err(Error::invalid(format!("two-step needs at least 16 shots, got {}", self.shots)));
            }
        }
        Ok(())
    }

    /// Generator for trial `k`: the seed with stream `k`.
    pub fn trial_rng(&self, k: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        rng
    }
}

/// `(ceil(sqrt(N)), N - ceil(sqrt(N)))`
pub fn split_shots(n: u64) -> (u64, u64) {
    let mut first = (n as f64).sqrt().ceil() as u64;
    while first * first < n {
        first += 1;
    }
    while first > 0 && (first - 1) * (first - 1) >= n {
        first -= 1;
    }
    (first, n - first)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub estimate: f64,
    pub degenerate: bool,
    pub boundary: bool,
    /// First-stage estimate of a two-step trial.
    pub rough: Option<f64>,
}

fn estimate_with_tree<R: Rng + ?Sized>(config: &SimConfig, tree: &MeasurementTree, shots: u64, rng: &mut R) -> Result<TrialOutcome> {
    let model = OutcomeModel::from_tree(tree);
    let probs = model.probabilities(&config.family, config.theta_true)?;
    let counts = sample_counts(&probs, shots, rng);
    let r = mle_with(&counts, |t| model.probabilities(&config.family, t), config.prior)?;
    Ok(TrialOutcome { estimate: r.theta, degenerate: r.degenerate, boundary: r.boundary, rough: None })
}

fn two_step_with<R: Rng + ?Sized>(config: &SimConfig, order: &[usize], reference: &MeasurementTree, rng: &mut R) -> Result<TrialOutcome> {
    let (first, second) = split_shots(config.shots);
    let rough = estimate_with_tree(config, reference, first, rng)?;
    let tree = synthesize_for_family(&config.family, rough.estimate, order)?;
    let mut out = estimate_with_tree(config, &tree, second, rng)?;
    out.rough = Some(rough.estimate);
    Ok(out)
}

/// One two-step estimate. The reference tree is synthesized at the prior
/// midpoint.
pub fn two_step<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<TrialOutcome> {
    config.validate()?;
    let Strategy::TwoStep { order } = &config.strategy else {
        return Err(Error::invalid("configuration does not use the two-step strategy"));
    };
    let reference = synthesize_for_family(&config.family, 0.5 * (config.prior.0 + config.prior.1), order)?;
    two_step_with(config, order, &reference, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub theta_true: f64,
    #[serde(rename = "N")]
    pub shots: u64,
    pub trials: usize,
    #[serde(rename = "J")]
    pub qfi: f64,
    pub mean: f64,
    pub variance: f64,
    /// `N J Var`
    pub ratio: f64,
    pub ci95: [f64; 2],
    pub seed: u64,
    pub degenerate_trials: usize,
    pub boundary_trials: usize,
    pub estimates: Vec<f64>,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Percentile bootstrap interval of `scale * Var`.
fn bootstrap_ci(estimates: &[f64], scale: f64, seed: u64) -> [f64; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(BOOTSTRAP_STREAM);
    let n = estimates.len();
    let mut ratios: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let sample: Vec<f64> = (0..n).map(|_| estimates[rng.random_range(0..n)]).collect();
            scale * mean_var(&sample).1
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    let at = |q: f64| ratios[((q * BOOTSTRAP_RESAMPLES as f64) as usize).min(BOOTSTRAP_RESAMPLES - 1)];
    [at(0.025), at(0.975)]
}

/// Independent trials, each with its own stream of the configured seed.
/// Results do not depend on thread scheduling.
pub fn run_trials(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let j = qfi(&config.family, config.theta_true)?;
    let reference = match &config.strategy {
        Strategy::Fixed(tree) => tree.clone(),
        Strategy::TwoStep { order } => synthesize_for_family(&config.family, 0.5 * (config.prior.0 + config.prior.1), order)?,
    };
    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = config.trial_rng(k);
            match &config.strategy {
                Strategy::Fixed(_) => estimate_with_tree(config, &reference, config.shots, &mut rng),
                Strategy::TwoStep { order } => two_step_with(config, order, &reference, &mut rng),
            }
        })
        .collect::<Result<_>>()?;
    let estimates: Vec<f64> = outcomes.iter().map(|o| o.estimate).collect();
    let (mean, variance) = mean_var(&estimates);
    let scale = config.shots as f64 * j;
    Ok(SimReport {
        theta_true: config.theta_true,
        shots: config.shots,
        trials: config.trials,
        qfi: j,
        mean,
        variance,
        ratio: scale * variance,
        ci95: bootstrap_ci(&estimates, scale, config.seed),
        seed: config.seed,
        degenerate_trials: outcomes.iter().filter(|o| o.degenerate).count(),
        boundary_trials: outcomes.iter().filter(|o| o.boundary).count(),
        estimates,
    })
}
