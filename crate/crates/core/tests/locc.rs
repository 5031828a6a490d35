mod common;

use common::{random_traceless_hermitian, random_vector, rng};
use num_complex::Complex64;
use qcrb_locc::linalg::{outer, CMatrix, CVector, HilbertLayout, StateVector};
use qcrb_locc::locc::{discriminate, leaf_residual, synthesize_for_family, synthesize_tree, verify_tree, MeasurementTree};
use qcrb_locc::metrology::{build_saturation_matrices, pure_m, ScalarFn, StateFamily, Thresholds, RANK_TOL};

fn random_pure_family(seed: u64, dims: &[usize]) -> StateFamily {
    let layout = HilbertLayout::new(dims.to_vec()).unwrap();
    let mut r = rng(seed);
    let d = layout.total();
    let psi = StateVector::new(layout.clone(), random_vector(&mut r, d)).unwrap();
    let g = random_traceless_hermitian(&mut r, d);
    StateFamily::unitary_generator(layout, psi, g).unwrap()
}

fn random_rank_two(seed: u64, dims: &[usize]) -> (StateFamily, CVector, CVector) {
    let layout = HilbertLayout::new(dims.to_vec()).unwrap();
    let mut r = rng(seed);
    let d = layout.total();
    let a = random_vector(&mut r, d);
    let mut b = random_vector(&mut r, d);
    let proj = a.dotc(&b);
    b -= &a * proj;
    let b = b.unscale(b.norm());
    let f = StateFamily::rank_two_with(
        layout.clone(),
        StateVector::new(layout.clone(), a.clone()).unwrap(),
        StateVector::new(layout, b.clone()).unwrap(),
        ScalarFn::CosSquared { freq: 1.3, phase: 0.4 },
    )
    .unwrap();
    (f, a, b)
}

#[test]
fn random_pure_families_saturate() {
    let layouts: [&[usize]; 4] = [&[2, 2], &[2, 3], &[2, 2, 2], &[3, 3]];
    for (li, dims) in layouts.iter().enumerate() {
        for seed in 0..50 {
            let f = random_pure_family(1000 * li as u64 + seed, dims);
            let theta = 0.37;
            let tree = synthesize_for_family(&f, theta, &(0..dims.len()).collect::<Vec<_>>()).unwrap();
            let report = verify_tree(&tree, &f, theta, &Thresholds::default()).unwrap();
            assert!(report.saturating, "{dims:?} seed {seed}: {report:?}");
            assert!((report.qfi - report.fi).abs() <= 1e-6 * report.qfi);
            assert!(tree.flatten().unwrap().completeness_error() < 1e-8);
        }
    }
}

#[test]
fn leaves_have_uniform_overlap_with_pure_state() {
    let f = random_pure_family(3, &[2, 3]);
    let sm = build_saturation_matrices(&f, 0.2, RANK_TOL).unwrap();
    let (psi, _) = sm.pure.clone().unwrap();
    let tree = synthesize_tree(sm.m_tilde.as_ref().unwrap(), f.layout(), &[0, 1]).unwrap();
    for leaf in tree.leaves() {
        assert!((leaf.vector.dotc(&psi).norm_sqr() - 1.0 / 6.0).abs() < 1e-7);
    }
}

#[test]
fn every_order_saturates() {
    let f = random_pure_family(5, &[2, 2, 3]);
    let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for order in orders {
        let tree = synthesize_for_family(&f, 0.9, &order).unwrap();
        let report = verify_tree(&tree, &f, 0.9, &Thresholds::default()).unwrap();
        assert!(report.saturating, "order {order:?}");
    }
}

#[test]
fn rank_two_families_saturate_and_discriminate() {
    for seed in 0..20 {
        let (f, a, b) = random_rank_two(seed, &[2, 3]);
        let theta = 0.3;
        let tree = synthesize_for_family(&f, theta, &[0, 1]).unwrap();
        let report = verify_tree(&tree, &f, theta, &Thresholds::default()).unwrap();
        let p = ScalarFn::CosSquared { freq: 1.3, phase: 0.4 };
        let expected = p.derivative(theta).powi(2) / (p.value(theta) * (1.0 - p.value(theta)));
        assert!(report.saturating);
        assert!((report.fi - expected).abs() < 1e-6 * expected);
        let (_, disc) = discriminate(&a, &b, f.layout(), &[0, 1]).unwrap();
        assert!((disc.success_prob - 1.0).abs() < 1e-8);
    }
}

#[test]
fn corrupted_tree_is_rejected() {
    let f = random_pure_family(9, &[2, 2, 2]);
    let tree = synthesize_for_family(&f, 0.4, &[0, 1, 2]).unwrap();
    let mut root = tree.root().clone();
    let (s, c) = 0.1f64.sin_cos();
    let rot = CMatrix::from_row_slice(2, 2, &[c.into(), (-s).into(), s.into(), c.into()]);
    root.children[1].basis = root.children[1].basis.iter().map(|v| &rot * v).collect();
    let bad = MeasurementTree::new(tree.layout().clone(), tree.order().to_vec(), root).unwrap();
    let report = verify_tree(&bad, &f, 0.4, &Thresholds::default()).unwrap();
    assert!(!report.saturating);
}

/// With the imaginary coefficient on the projector term the single diagonal
/// equation no longer separates the two conditions; a basis satisfying it
/// need not saturate.
#[test]
fn imaginary_projector_term_is_insufficient() {
    let mut failures = 0;
    for seed in 0..20 {
        let f = random_pure_family(200 + seed, &[2, 2]);
        let sm = build_saturation_matrices(&f, 0.5, RANK_TOL).unwrap();
        let (psi, perp) = sm.pure.unwrap();
        let d = psi.len();
        let literal = pure_m(&psi, &perp) + (outer(&psi, &psi) - CMatrix::identity(d, d).unscale(d as f64)) * Complex64::i();
        let tree = synthesize_tree(&literal, f.layout(), &[0, 1]).unwrap();
        assert!(leaf_residual(&tree, &literal) < 1e-9);
        if !verify_tree(&tree, &f, 0.5, &Thresholds::default()).unwrap().saturating {
            failures += 1;
        }
    }
    assert!(failures >= 15, "only {failures} of 20 literal-target trees failed to saturate");
}
