//! Built-in families and scenario files.

mod builtin;
mod spec;

pub use builtin::{
    builtin, lm_qubit_coeffs, lm_qutrit_coeffs, scenario_bell_mixture, scenario_chain4, scenario_from_coeffs, scenario_ghz, scenario_phase,
    scenario_ranktwo, scenario_ranktwo_bell, BUILTIN_NAMES,
};
pub use spec::{FamilySpec, HamiltonianSpec, MixtureComponent, Scenario, ScenarioSpec, ThetaGrid, DEFAULT_GRID_POINTS, MIXED_STEP};
