use qcrb_locc::linalg::{c, kron_vectors, partial_trace_keep, pauli, real, CMatrix, CVector};
use qcrb_locc::locc::{synthesize_for_family, verify_tree};
use qcrb_locc::metrology::{build_saturation_matrices, fisher_info, qfi, sld, Povm, Thresholds, RANK_TOL};
use qcrb_locc::scenarios::{builtin, scenario_ghz, scenario_ranktwo, Scenario, ThetaGrid, BUILTIN_NAMES};

/// Residual of `r` after removing its component along `sigma_z`.
fn off_z(r: &CMatrix) -> f64 {
    let z = pauli::z();
    let coeff = (r * &z).trace() * 0.5;
    (r - z * coeff).norm()
}

#[test]
fn every_builtin_parses_and_round_trips() {
    for name in BUILTIN_NAMES {
        let s = builtin(name).unwrap();
        assert_eq!(s.name(), name);
        let json = s.to_json().unwrap();
        let back = Scenario::from_json(&json).unwrap();
        assert_eq!(back.spec(), s.spec());
        assert_eq!(back.to_json().unwrap(), json);
    }
    assert!(builtin("ghz9").is_err());
    assert!(builtin("ghz1").is_err());
    assert!(builtin("nope").is_err());
}

#[test]
fn default_grid_is_closed_and_uniform() {
    let g = ThetaGrid::range(0.0, 1.0).points();
    assert_eq!(g.len(), 32);
    assert_eq!(g[0], 0.0);
    assert_eq!(g[31], 1.0);
    let parsed: ThetaGrid = serde_json::from_str(r#"{"start":0.0,"end":2.0,"count":5}"#).unwrap();
    assert_eq!(parsed.points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
}

#[test]
fn ghz_qfi_is_n_squared() {
    for n in 2..=6 {
        let s = scenario_ghz(n).unwrap();
        for &t in &[0.0, 0.3, 1.1] {
            let j = qfi(s.family(), t).unwrap();
            assert!((j - (n * n) as f64).abs() < 1e-8 * (n * n) as f64);
        }
    }
}

#[test]
fn ghz2_plus_minus_product_measurement() {
    let s = scenario_ghz(2).unwrap();
    let r = 0.5f64.sqrt();
    let p = CVector::from_vec(vec![real(r), real(r)]);
    let m = CVector::from_vec(vec![real(r), real(-r)]);
    let mut vs = Vec::new();
    for a in [&p, &m] {
        for b in [&p, &m] {
            vs.push(kron_vectors(&[a.clone(), b.clone()]));
        }
    }
    let povm = Povm::from_vectors(vs).unwrap();
    // generic theta: |+-> outcomes carry all the information
    let theta = 0.4;
    let e = s.family().eval(theta).unwrap();
    let fi = fisher_info(&povm, &e.rho, &e.drho, 1e-12).unwrap();
    assert!((fi - 4.0).abs() < 1e-9, "{fi}");
}

#[test]
fn chain4_invariants() {
    let s = builtin("chain4").unwrap();
    let layout = s.family().layout().clone();
    let mut first: Option<[f64; 3]> = None;
    for t in s.theta_grid() {
        let sat = build_saturation_matrices(s.family(), t, RANK_TOL).unwrap();
        let mt = sat.m_tilde.clone().unwrap();
        let reduced = partial_trace_keep(&mt, &layout, &[0]).unwrap();
        assert!(off_z(&reduced) < 1e-8, "theta {t}");
        let e = s.family().eval(t).unwrap();
        let shifted = &e.rho - CMatrix::identity(16, 16).scale(1.0 / 16.0);
        assert!(off_z(&partial_trace_keep(&shifted, &layout, &[0]).unwrap()) < 1e-8);
        let tree = synthesize_for_family(s.family(), t, &[0, 1, 2, 3]).unwrap();
        let rep = verify_tree(&tree, s.family(), t, &Thresholds::default()).unwrap();
        assert!(rep.saturating, "theta {t}: {rep:?}");
        let root = tree.bloch_rows(t).into_iter().find(|r| r.path.is_empty()).unwrap();
        let point = [root.x, root.y, root.z];
        match first {
            None => first = Some(point),
            Some(f) => {
                for k in 0..3 {
                    assert!((f[k] - point[k]).abs() < 1e-8, "theta {t}: {point:?} vs {f:?}");
                }
            }
        }
    }
}

#[test]
fn bell_mixture_sld_and_m_set() {
    let s = builtin("bell-mixture").unwrap();
    let r = 0.5f64.sqrt();
    let b1 = CVector::from_vec(vec![real(r), real(0.0), real(0.0), real(r)]);
    let b2 = CVector::from_vec(vec![real(r), real(0.0), real(0.0), real(-r)]);
    let b3 = CVector::from_vec(vec![real(0.0), real(r), real(r), real(0.0)]);
    for t in [0.3, 0.5, 0.7] {
        let e = s.family().eval(t).unwrap();
        let res = sld(&e.rho, &e.drho, RANK_TOL).unwrap();
        let coeffs = [1.0 / (1.0 + t), 1.0 / t, -1.0 / (1.0 - t)];
        for (b, want) in [&b1, &b2, &b3].iter().zip(coeffs) {
            let got = b.dotc(&(&res.l * *b));
            assert!((got - c(want, 0.0)).norm() < 1e-9, "theta {t}");
        }
        let sat = build_saturation_matrices(s.family(), t, RANK_TOL).unwrap();
        assert!(sat.m_tilde.is_none());
        for (x, y) in [(&b1, &b2), (&b1, &b3), (&b2, &b3), (&b2, &b1), (&b3, &b1), (&b3, &b2)] {
            let hit = sat.m_set.iter().any(|m| x.dotc(&(m * y)).norm() > 1e-6);
            assert!(hit, "missing direction at theta {t}");
        }
    }
}

#[test]
fn bell_mixture_has_no_saturating_tree() {
    let s = builtin("bell-mixture").unwrap();
    assert!(synthesize_for_family(s.family(), 0.4, &[0, 1]).is_err());
}

#[test]
fn ranktwo_qfi_and_saturation() {
    let s = builtin("ranktwo").unwrap();
    for t in s.theta_grid() {
        let j = qfi(s.family(), t).unwrap();
        assert!((j - 1.0 / (t * (1.0 - t))).abs() < 1e-8 * j);
        let tree = synthesize_for_family(s.family(), t, &[0, 1]).unwrap();
        assert!(verify_tree(&tree, s.family(), t, &Thresholds::default()).unwrap().saturating);
    }
}

#[test]
fn constant_probability_has_no_information() {
    let r = 0.5f64.sqrt();
    let b1 = CVector::from_vec(vec![real(r), real(0.0), real(0.0), real(r)]);
    let b3 = CVector::from_vec(vec![real(0.0), real(r), real(r), real(0.0)]);
    let s = scenario_ranktwo(
        "flat",
        vec![2, 2],
        &b1,
        &b3,
        qcrb_locc::metrology::ScalarFn::Linear { offset: 0.3, slope: 0.0 },
        ThetaGrid::Points(vec![0.5]),
    )
    .unwrap();
    assert!(qfi(s.family(), 0.5).unwrap().abs() < 1e-15);
    assert!(synthesize_for_family(s.family(), 0.5, &[0, 1]).is_err());
    let bad = scenario_ranktwo("bad", vec![2, 2], &b1, &b1, qcrb_locc::metrology::ScalarFn::identity(), ThetaGrid::Points(vec![0.5]));
    assert!(bad.is_err());
}

#[test]
fn scenario_file_ingestion() {
    let json = r#"{
        "name": "custom",
        "type": "unitary-generator",
        "layout": [2, 2],
        "psi_in": [[0.7071067811865476, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7071067811865476, 0.0]],
        "hamiltonian": [{"coeff": 0.5, "string": "ZI"}, {"coeff": 0.5, "string": "IZ"}],
        "theta_grid": [0.1, 0.2]
    }"#;
    let s = Scenario::from_json(json).unwrap();
    assert_eq!(s.theta_grid(), vec![0.1, 0.2]);
    assert!((qfi(s.family(), 0.1).unwrap() - 4.0).abs() < 1e-10);
    let dense = r#"{
        "name": "qutrit",
        "type": "unitary-generator",
        "layout": [3],
        "psi_in": [[0.5773502691896258, 0.0], [0.5773502691896258, 0.0], [0.5773502691896258, 0.0]],
        "hamiltonian": [[[1,0],[0,0],[0,0]], [[0,0],[0,0],[0,0]], [[0,0],[0,0],[-1,0]]],
        "theta_grid": {"start": 0.0, "end": 1.0, "count": 3}
    }"#;
    let q = Scenario::from_json(dense).unwrap();
    assert!((qfi(q.family(), 0.3).unwrap() - 8.0 / 3.0).abs() < 1e-10);
    assert!(Scenario::from_json(r#"{"name":"x","type":"bogus","layout":[2],"theta_grid":[0.0]}"#).is_err());
    let pauli_on_qutrit = dense.replace(r#"[[[1,0],[0,0],[0,0]], [[0,0],[0,0],[0,0]], [[0,0],[0,0],[-1,0]]]"#, r#"[{"coeff":1.0,"string":"Z"}]"#);
    assert!(Scenario::from_json(&pauli_on_qutrit).is_err());
}
