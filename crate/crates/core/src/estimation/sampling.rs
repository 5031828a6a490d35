use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{sandwich, CMatrix, HilbertLayout};
use crate::locc::MeasurementTree;

/// Conditional probabilities more negative than this are an error; smaller
/// negatives are rounding and clipped to zero.
pub const NEG_PROB_TOL: f64 = 1e-10;

fn draw<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, &w) in weights.iter().enumerate() {
        if u < w {
            return k;
        }
        u -= w;
    }
    // rounding left u just above the last positive weight
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Samples one outcome path by measuring the subsystems in tree order, each
/// outcome drawn from its distribution conditioned on the earlier ones.
pub fn sample_path<R: Rng + ?Sized>(tree: &MeasurementTree, rho: &CMatrix, rng: &mut R) -> Result<Vec<usize>> {
    let layout = tree.layout();
    if rho.nrows() != layout.total() || rho.ncols() != layout.total() {
        return Err(Error::dim("state does not match the tree layout"));
    }
    let mut remaining: Vec<usize> = (0..layout.len()).collect();
    let mut current_layout: HilbertLayout = layout.clone();
    let mut state = rho.clone();
    let mut node = tree.root();
    let mut path = Vec::with_capacity(layout.len());
    loop {
        let pos = remaining.iter().position(|&k| k == node.subsystem).expect("tree order visits each subsystem once");
        let mut posts = Vec::with_capacity(node.basis.len());
        let mut weights = Vec::with_capacity(node.basis.len());
        for e in &node.basis {
            let post = sandwich(&state, &current_layout, pos, e)?;
            let w = post.trace().re;
            if w < -NEG_PROB_TOL {
                return Err(Error::invalid(format!("negative conditional probability {w:.3e}")));
            }
            weights.push(w.max(0.0));
            posts.push(post);
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid("conditional distribution has zero mass"));
        }
        let x = draw(&weights, rng);
        path.push(x);
        if node.children.is_empty() {
            return Ok(path);
        }
        state = posts.swap_remove(x).unscale(weights[x]);
        current_layout = current_layout.without(pos).expect("non-leaf node leaves subsystems to measure");
        remaining.remove(pos);
        node = &node.children[x];
    }
}

/// Multinomial counts of `shots` draws from `probs`, by inverse-CDF lookup.
pub fn sample_counts<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u = rng.random::<f64>() * acc;
        let k = cdf.partition_point(|&c| c <= u).min(last);
        counts[k] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{outer, real, CVector};
    use crate::locc::TreeNode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(k: usize) -> CVector {
        let mut v = CVector::zeros(2);
        v[k] = real(1.0);
        v
    }

    #[test]
    fn deterministic_path_for_basis_state() {
        let layout = HilbertLayout::qubits(2).unwrap();
        let leaf = |s| TreeNode { subsystem: s, basis: vec![e(0), e(1)], children: vec![] };
        let root = TreeNode { subsystem: 0, basis: vec![e(0), e(1)], children: vec![leaf(1), leaf(1)] };
        let tree = MeasurementTree::new(layout, vec![0, 1], root).unwrap();
        let mut psi = CVector::zeros(4);
        psi[2] = real(1.0);
        let rho = outer(&psi, &psi);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(sample_path(&tree, &rho, &mut rng).unwrap(), vec![1, 0]);
        }
    }

    #[test]
    fn counts_skip_zero_probability_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = sample_counts(&[0.0, 0.5, 0.0, 0.5, 0.0], 1000, &mut rng);
        assert_eq!(c[0] + c[2] + c[4], 0);
        assert_eq!(c.iter().sum::<u64>(), 1000);
    }
}
