mod common;

use common::{diag_max, random_traceless_hermitian, rng, unitarity_error, CMatrix};
use num_complex::Complex64;
use proptest::prelude::*;
use qcrb_locc::zerodiag::{find_null_vector, simultaneous_zero_diag, solve_2x2, zero_diag_basis};

#[test]
fn random_2x2_pairs() {
    let mut r = rng(7);
    for _ in 0..100 {
        let h1 = random_traceless_hermitian(&mut r, 2);
        let h2 = random_traceless_hermitian(&mut r, 2);
        let u = solve_2x2(&h1, &h2).unwrap().unitary;
        assert!(unitarity_error(&u) < 1e-12);
        assert!(diag_max(&u, &h1) < 1e-10);
        assert!(diag_max(&u, &h2) < 1e-10);
    }
}

#[test]
fn random_pairs_up_to_eight() {
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    for d in 3..=8 {
        for _ in 0..200 {
            let h1 = random_traceless_hermitian(&mut r, d);
            let h2 = random_traceless_hermitian(&mut r, d);
            let u = simultaneous_zero_diag(&h1, &h2).unwrap();
            assert!(unitarity_error(&u) < 1e-10, "d={d}");
            worst = worst.max(diag_max(&u, &h1)).max(diag_max(&u, &h2));
        }
    }
    assert!(worst < 1e-8, "worst residual {worst:e}");
}

#[test]
fn null_vectors_for_random_pairs() {
    let mut r = rng(13);
    for d in 3..=8 {
        for _ in 0..50 {
            let h1 = random_traceless_hermitian(&mut r, d);
            let h2 = random_traceless_hermitian(&mut r, d);
            let v = find_null_vector(&h1, &h2).unwrap();
            let scale = h1.norm() + h2.norm();
            assert!(v.dotc(&(&h1 * &v)).norm() < 1e-9 * scale);
            assert!(v.dotc(&(&h2 * &v)).norm() < 1e-9 * scale);
        }
    }
}

#[test]
fn degenerate_and_rank_deficient_pairs() {
    let mut r = rng(17);
    for d in 3..=6 {
        let h = random_traceless_hermitian(&mut r, d);
        // proportional pair
        let u = simultaneous_zero_diag(&h, &h.scale(-2.5)).unwrap();
        assert!(diag_max(&u, &h) < 1e-8 * h.norm());
        // vanishing first matrix
        let z = CMatrix::zeros(d, d);
        let u = simultaneous_zero_diag(&z, &h).unwrap();
        assert!(diag_max(&u, &h) < 1e-8 * h.norm());
        // rank-two target
        let v = common::random_vector(&mut r, d);
        let mut w = common::random_vector(&mut r, d);
        let proj = v.dotc(&w);
        w -= &v * proj;
        let w = w.unscale(w.norm());
        let m = &v * w.adjoint();
        let u = zero_diag_basis(&m).unwrap();
        assert!(diag_max(&u, &m) < 1e-8 * m.norm());
    }
}

#[test]
fn scale_invariance() {
    let mut r = rng(19);
    let m = random_traceless_hermitian(&mut r, 5) + random_traceless_hermitian(&mut r, 5) * Complex64::i();
    let u = zero_diag_basis(&m).unwrap();
    let base = diag_max(&u, &m);
    for c in [1e-3, 7.0, -40.0] {
        let scaled = diag_max(&u, &m.scale(c));
        assert!((scaled - base * c.abs()).abs() <= 1e-12 * c.abs() * m.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_diag_basis_property(seed in any::<u64>(), d in 2usize..=8) {
        let mut r = rng(seed);
        let m = random_traceless_hermitian(&mut r, d) + random_traceless_hermitian(&mut r, d) * Complex64::i();
        let u = zero_diag_basis(&m).unwrap();
        prop_assert!(unitarity_error(&u) < 1e-10);
        prop_assert!(diag_max(&u, &m) < 1e-8 * m.norm());
    }
}
