use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::spec::{FamilySpec, HamiltonianSpec, MixtureComponent, Scenario, ScenarioSpec, ThetaGrid};
use crate::error::{Error, Result};
use crate::linalg::{codec, outer, CMatrix, CVector, C64, I};
use crate::lm::BipartiteCoeffs;
use crate::metrology::{PauliStringTerm, ScalarFn};

fn pairs(v: &CVector) -> Vec<[f64; 2]> {
    codec::vector_to_pairs(v)
}

fn real_vec(xs: &[f64]) -> CVector {
    CVector::from_iterator(xs.len(), xs.iter().map(|&x| C64::new(x, 0.0)))
}

fn bell(k: usize) -> CVector {
    let s = FRAC_1_SQRT_2;
    match k {
        0 => real_vec(&[s, 0.0, 0.0, s]),
        1 => real_vec(&[s, 0.0, 0.0, -s]),
        2 => real_vec(&[0.0, s, s, 0.0]),
        _ => real_vec(&[0.0, s, -s, 0.0]),
    }
}

/// n-qubit GHZ input under `G = (1/2) sum_i Z_i`; QFI `n^2`.
pub fn scenario_ghz(n: usize) -> Result<Scenario> {
    if !(2..=8).contains(&n) {
        return Err(Error::invalid(format!("GHZ scenarios need 2 <= n <= 8, got {n}")));
    }
    let d = 1usize << n;
    let mut psi = CVector::zeros(d);
    psi[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    psi[d - 1] = C64::new(FRAC_1_SQRT_2, 0.0);
    let terms = (0..n)
        .map(|i| PauliStringTerm::new(0.5, (0..n).map(|j| if i == j { 'Z' } else { 'I' }).collect::<String>()))
        .collect();
    Scenario::from_spec(ScenarioSpec {
        name: format!("ghz{n}"),
        notes: format!("{n}-qubit GHZ state accumulating phase under a uniform Z field"),
        layout: vec![2; n],
        family: FamilySpec::UnitaryGenerator { psi_in: pairs(&psi), hamiltonian: HamiltonianSpec::Pauli(terms) },
        theta_grid: ThetaGrid::range(0.0, 1.0),
        domain: None,
    })
}

/// Single-qubit phase family `(|0> + e^{-i theta}|1>)/sqrt 2`.
pub fn scenario_phase() -> Result<Scenario> {
    Scenario::from_spec(ScenarioSpec {
        name: "phase".into(),
        notes: "single-qubit phase accumulation".into(),
        layout: vec![2],
        family: FamilySpec::UnitaryGenerator {
            psi_in: pairs(&real_vec(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])),
            hamiltonian: HamiltonianSpec::Pauli(vec![PauliStringTerm::new(0.5, "Z")]),
        },
        theta_grid: ThetaGrid::range(0.0, PI),
        domain: None,
    })
}

/// Four-qubit open XX chain acting on the one-excitation Dicke state.
pub fn scenario_chain4() -> Result<Scenario> {
    let mut psi = CVector::zeros(16);
    for k in [8, 4, 2, 1] {
        psi[k] = C64::new(0.5, 0.0);
    }
    let terms = ["XXII", "IXXI", "IIXX"].iter().map(|s| PauliStringTerm::new(1.0, *s)).collect();
    Scenario::from_spec(ScenarioSpec {
        name: "chain4".into(),
        notes: "open-boundary XX chain on four qubits, Dicke input".into(),
        layout: vec![2; 4],
        family: FamilySpec::UnitaryGenerator { psi_in: pairs(&psi), hamiltonian: HamiltonianSpec::Pauli(terms) },
        theta_grid: ThetaGrid::range(0.0, PI / 4.0),
        domain: Some((0.0, PI / 4.0)),
    })
}

/// `theta rho1 + (1 - theta) rho2` over three Bell states; no LOCC
/// measurement saturates it.
pub fn scenario_bell_mixture() -> Result<Scenario> {
    let proj = |k| outer(&bell(k), &bell(k));
    let rho1 = proj(0).scale(2.0 / 3.0) + proj(1).scale(1.0 / 3.0);
    let rho2 = proj(0).scale(1.0 / 3.0) + proj(2).scale(2.0 / 3.0);
    Scenario::from_spec(ScenarioSpec {
        name: "bell-mixture".into(),
        notes: "mixture of three Bell states with distinct SLD coefficients".into(),
        layout: vec![2, 2],
        family: FamilySpec::Mixed {
            components: vec![
                MixtureComponent { weight: ScalarFn::Linear { offset: 0.0, slope: 1.0 }, rho: codec::matrix_to_rows(&rho1) },
                MixtureComponent { weight: ScalarFn::Linear { offset: 1.0, slope: -1.0 }, rho: codec::matrix_to_rows(&rho2) },
            ],
        },
        theta_grid: ThetaGrid::range(0.1, 0.9),
        domain: Some((0.0, 1.0)),
    })
}

/// Rank-two family over a fixed orthonormal pair.
pub fn scenario_ranktwo(name: &str, layout: Vec<usize>, psi0: &CVector, psi1: &CVector, p: ScalarFn, grid: ThetaGrid) -> Result<Scenario> {
    let overlap = psi0.dotc(psi1).norm();
    if overlap > 1e-10 {
        return Err(Error::invalid(format!("rank-two basis is not orthogonal (|<psi0|psi1>| = {overlap:.3e})")));
    }
    Scenario::from_spec(ScenarioSpec {
        name: name.into(),
        notes: "rank-two mixture over a theta-independent basis".into(),
        layout,
        family: FamilySpec::RankTwo { psi0: pairs(psi0), psi1: pairs(psi1), p },
        theta_grid: grid,
        domain: None,
    })
}

/// `theta |Phi+><Phi+| + (1 - theta) |Psi+><Psi+|`
pub fn scenario_ranktwo_bell() -> Result<Scenario> {
    scenario_ranktwo("ranktwo", vec![2, 2], &bell(0), &bell(2), ScalarFn::identity(), ThetaGrid::range(0.1, 0.9))
}

/// Pure family `cos(theta) a + sin(theta) b` of a coefficient pair, i.e.
/// generator `i(|b><a| - |a><b|)`.
pub fn scenario_from_coeffs(name: &str, notes: &str, coeffs: &BipartiteCoeffs) -> Result<Scenario> {
    let (a, b) = coeffs.vectors();
    let b = b.unscale(b.norm());
    let g: CMatrix = (outer(&b, &a) - outer(&a, &b)) * I;
    let (d1, d2) = coeffs.dims();
    Scenario::from_spec(ScenarioSpec {
        name: name.into(),
        notes: notes.into(),
        layout: vec![d1, d2],
        family: FamilySpec::UnitaryGenerator { psi_in: pairs(&a), hamiltonian: HamiltonianSpec::Dense(codec::matrix_to_rows(&g)) },
        theta_grid: ThetaGrid::range(0.0, PI / 2.0),
        domain: None,
    })
}

/// `(|00> + |1+>)/sqrt 2` with orthogonal direction `(|01> + |1->)/sqrt 2`.
pub fn lm_qubit_coeffs() -> BipartiteCoeffs {
    let s = FRAC_1_SQRT_2;
    let a = CMatrix::from_row_slice(2, 2, &[C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0)]);
    let b = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(0.5, 0.0), C64::new(-0.5, 0.0)]);
    BipartiteCoeffs::new(a, b).expect("valid coefficients")
}

/// Diagonal 3x3 pair with a saturating LM only when isometries are allowed.
pub fn lm_qutrit_coeffs() -> BipartiteCoeffs {
    let s = FRAC_1_SQRT_2;
    let a = CMatrix::from_diagonal(&real_vec(&[s, 0.5, 0.5]));
    let b = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(0.0, s), C64::new(0.0, -0.5), C64::new(0.0, -0.5)]));
    BipartiteCoeffs::new(a, b).expect("valid coefficients")
}

pub const BUILTIN_NAMES: [&str; 13] = [
    "ghz2",
    "ghz3",
    "ghz4",
    "ghz5",
    "ghz6",
    "ghz7",
    "ghz8",
    "phase",
    "chain4",
    "bell-mixture",
    "ranktwo",
    "lm-qubit",
    "lm-qutrit",
];

pub fn builtin(name: &str) -> Result<Scenario> {
    if let Some(n) = name.strip_prefix("ghz").and_then(|n| n.parse().ok()) {
        return scenario_ghz(n);
    }
    match name {
        "phase" => scenario_phase(),
        "chain4" => scenario_chain4(),
        "bell-mixture" => scenario_bell_mixture(),
        "ranktwo" => scenario_ranktwo_bell(),
        "lm-qubit" => scenario_from_coeffs("lm-qubit", "two-qubit pair saturable by LM but not LM-distinguishable", &lm_qubit_coeffs()),
        "lm-qutrit" => scenario_from_coeffs("lm-qutrit", "3x3 pair saturable by a non-projective LM only", &lm_qutrit_coeffs()),
        _ => Err(Error::invalid(format!("unknown scenario {name:?}"))),
    }
}
