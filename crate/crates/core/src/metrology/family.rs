use std::fmt;
use std::sync::Arc;

use super::ScalarFn;
use crate::error::{Error, Result};
use crate::linalg::{
    ensure_hermitian, herm_eig, outer, CMatrix, CVector, HermEig, HilbertLayout, StateVector, C64, I,
};

pub type PureFn = Arc<dyn Fn(f64) -> Result<CVector> + Send + Sync>;
pub type MixedFn = Arc<dyn Fn(f64) -> Result<CMatrix> + Send + Sync>;
/// Returns `(p(theta), p'(theta))`.
pub type ProbFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Unit-trace tolerance for evaluated density matrices.
pub const TRACE_TOL: f64 = 1e-9;

#[derive(Clone)]
pub enum FamilyKind {
    /// `psi(theta) = exp(-i theta G) psi_in`, derivatives analytic.
    UnitaryGenerator {
        psi_in: CVector,
        generator: CMatrix,
        spectrum: HermEig,
        /// `V† psi_in` in the generator eigenbasis
        coeffs: CVector,
    },
    /// Tabulated pure states; derivatives by central differences.
    PureNumeric { psi: PureFn, step: f64 },
    /// `p |psi0><psi0| + (1-p) |psi1><psi1|` with a theta-independent basis.
    RankTwoFixedBasis { psi0: CVector, psi1: CVector, p: ProbFn },
    /// Arbitrary density matrices; derivatives by central differences.
    MixedGeneric { rho: MixedFn, step: f64 },
}

/// Which saturation construction applies to a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateType {
    /// Type (i): pure states.
    Pure,
    /// Type (ii): rank two with a fixed eigenbasis.
    RankTwo,
    /// Anything else; no single saturation target exists.
    General,
}

/// A one-parameter family of states on a fixed layout.
#[derive(Clone)]
pub struct StateFamily {
    layout: HilbertLayout,
    domain: Option<(f64, f64)>,
    kind: FamilyKind,
}

impl fmt::Debug for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            FamilyKind::UnitaryGenerator { .. } => "UnitaryGenerator",
            FamilyKind::PureNumeric { .. } => "PureNumeric",
            FamilyKind::RankTwoFixedBasis { .. } => "RankTwoFixedBasis",
            FamilyKind::MixedGeneric { .. } => "MixedGeneric",
        };
        f.debug_struct("StateFamily")
            .field("layout", &self.layout.dims())
            .field("domain", &self.domain)
            .field("kind", &kind)
            .finish()
    }
}

/// A family evaluated at one theta.
#[derive(Debug, Clone)]
pub struct EvaluatedState {
    pub rho: CMatrix,
    pub drho: CMatrix,
    /// `(psi, dpsi)` for pure families.
    pub pure: Option<(CVector, CVector)>,
}

fn check_len(v: &CVector, layout: &HilbertLayout, what: &str) -> Result<()> {
    if v.len() != layout.total() {
        return Err(Error::dim(format!("{what} has length {}, layout needs {}", v.len(), layout.total())));
    }
    Ok(())
}

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("finite-difference step {step} must be positive")));
    }
    Ok(())
}

impl StateFamily {
    pub fn unitary_generator(layout: HilbertLayout, psi_in: StateVector, generator: CMatrix) -> Result<Self> {
        if psi_in.layout() != &layout {
            return Err(Error::dim("input state layout differs from the family layout"));
        }
        psi_in.ensure_normalized(1e-10)?;
        if generator.nrows() != layout.total() || generator.ncols() != layout.total() {
            return Err(Error::dim("generator does not match the layout dimension"));
        }
        ensure_hermitian(&generator)?;
        let spectrum = herm_eig(&generator)?;
        let psi_in = psi_in.into_amplitudes();
        let coeffs = spectrum.vectors.adjoint() * &psi_in;
        Ok(Self {
            layout,
            domain: None,
            kind: FamilyKind::UnitaryGenerator { psi_in, generator, spectrum, coeffs },
        })
    }

    pub fn pure_numeric(layout: HilbertLayout, psi: PureFn, step: f64) -> Result<Self> {
        check_step(step)?;
        Ok(Self { layout, domain: None, kind: FamilyKind::PureNumeric { psi, step } })
    }

    pub fn rank_two(layout: HilbertLayout, psi0: StateVector, psi1: StateVector, p: ProbFn) -> Result<Self> {
        psi0.ensure_normalized(1e-10)?;
        psi1.ensure_normalized(1e-10)?;
        if psi0.layout() != &layout || psi1.layout() != &layout {
            return Err(Error::dim("basis state layout differs from the family layout"));
        }
        let overlap = psi0.inner(&psi1).norm();
        if overlap > 1e-10 {
            return Err(Error::invalid(format!("rank-two basis states overlap by {overlap:.3e}")));
        }
        Ok(Self {
            layout,
            domain: None,
            kind: FamilyKind::RankTwoFixedBasis {
                psi0: psi0.into_amplitudes(),
                psi1: psi1.into_amplitudes(),
                p,
            },
        })
    }

    /// Rank-two family with a closed-form mixing probability.
    pub fn rank_two_with(layout: HilbertLayout, psi0: StateVector, psi1: StateVector, p: ScalarFn) -> Result<Self> {
        Self::rank_two(layout, psi0, psi1, Arc::new(move |t| (p.value(t), p.derivative(t))))
    }

    pub fn mixed(layout: HilbertLayout, rho: MixedFn, step: f64) -> Result<Self> {
        check_step(step)?;
        Ok(Self { layout, domain: None, kind: FamilyKind::MixedGeneric { rho, step } })
    }

    /// Restricts the admissible theta values to `[lo, hi]`.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.domain
    }

    /// Structural type. Generic mixed families report `General` here; rank
    /// detection at a given theta happens in the saturation-matrix builder.
    pub fn state_type(&self) -> StateType {
        match self.kind {
            FamilyKind::UnitaryGenerator { .. } | FamilyKind::PureNumeric { .. } => StateType::Pure,
            FamilyKind::RankTwoFixedBasis { .. } => StateType::RankTwo,
            FamilyKind::MixedGeneric { .. } => StateType::General,
        }
    }

    fn check_domain(&self, theta: f64) -> Result<()> {
        if !theta.is_finite() {
            return Err(Error::invalid("theta must be finite"));
        }
        if let Some((lo, hi)) = self.domain {
            if theta < lo || theta > hi {
                return Err(Error::OutOfDomain { theta, lo, hi });
            }
        }
        Ok(())
    }

    fn eval_pure_numeric(&self, psi: &PureFn, theta: f64) -> Result<CVector> {
        let v = psi(theta)?;
        check_len(&v, &self.layout, "evaluated state")?;
        let n = v.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("evaluated state at theta={theta} has norm {n}")));
        }
        Ok(v)
    }

    fn eval_mixed(&self, rho: &MixedFn, theta: f64) -> Result<CMatrix> {
        let m = rho(theta)?;
        let d = self.layout.total();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::dim("evaluated density matrix does not match the layout"));
        }
        ensure_hermitian(&m)?;
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::invalid(format!("density matrix trace {tr} is not 1")));
        }
        let min = herm_eig(&m)?.values.last().copied().unwrap_or(0.0);
        if min < -1e-9 {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(m)
    }

    /// Pure state and its derivative, for pure families.
    pub fn pure_state(&self, theta: f64) -> Result<Option<(CVector, CVector)>> {
        self.check_domain(theta)?;
        match &self.kind {
            FamilyKind::UnitaryGenerator { generator, spectrum, coeffs, .. } => {
                let phased = CVector::from_iterator(
                    coeffs.len(),
                    coeffs.iter().zip(&spectrum.values).map(|(c, &l)| c * C64::from_polar(1.0, -theta * l)),
                );
                let psi = &spectrum.vectors * phased;
                let dpsi = (generator * &psi) * (-I);
                Ok(Some((psi, dpsi)))
            }
            FamilyKind::PureNumeric { psi, step } => {
                let center = self.eval_pure_numeric(psi, theta)?;
                let plus = self.eval_pure_numeric(psi, theta + step)?;
                let minus = self.eval_pure_numeric(psi, theta - step)?;
                Ok(Some((center, (plus - minus).unscale(2.0 * step))))
            }
            _ => Ok(None),
        }
    }

    /// Density matrix and its theta-derivative.
    pub fn eval(&self, theta: f64) -> Result<EvaluatedState> {
        self.check_domain(theta)?;
        match &self.kind {
            FamilyKind::UnitaryGenerator { .. } => {
                let (psi, dpsi) = self.pure_state(theta)?.expect("pure family");
                let rho = outer(&psi, &psi);
                let drho = outer(&dpsi, &psi) + outer(&psi, &dpsi);
                Ok(EvaluatedState { rho, drho, pure: Some((psi, dpsi)) })
            }
            FamilyKind::PureNumeric { psi, step } => {
                let (center, dpsi) = self.pure_state(theta)?.expect("pure family");
                let plus = self.eval_pure_numeric(psi, theta + step)?;
                let minus = self.eval_pure_numeric(psi, theta - step)?;
                let drho = (outer(&plus, &plus) - outer(&minus, &minus)).unscale(2.0 * step);
                Ok(EvaluatedState { rho: outer(&center, &center), drho, pure: Some((center, dpsi)) })
            }
            FamilyKind::RankTwoFixedBasis { psi0, psi1, p } => {
                let (pv, dp) = p(theta);
                if !(pv > 0.0 && pv < 1.0) {
                    return Err(Error::invalid(format!("p(theta={theta}) = {pv} outside (0, 1)")));
                }
                let p0 = outer(psi0, psi0);
                let p1 = outer(psi1, psi1);
                let rho = p0.scale(pv) + p1.scale(1.0 - pv);
                let drho = (p0 - p1).scale(dp);
                Ok(EvaluatedState { rho, drho, pure: None })
            }
            FamilyKind::MixedGeneric { rho, step } => {
                let center = self.eval_mixed(rho, theta)?;
                let plus = self.eval_mixed(rho, theta + step)?;
                let minus = self.eval_mixed(rho, theta - step)?;
                let drho = (plus - minus).unscale(2.0 * step);
                Ok(EvaluatedState { rho: center, drho, pure: None })
            }
        }
    }
}

/// `(rho, drho)` of a family at theta.
pub fn eval_state(family: &StateFamily, theta: f64) -> Result<(CMatrix, CMatrix)> {
    let e = family.eval(theta)?;
    Ok((e.rho, e.drho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, pauli, real};

    fn plus_state() -> StateVector {
        let s = 0.5f64.sqrt();
        StateVector::new(HilbertLayout::qubits(1).unwrap(), CVector::from_vec(vec![real(s), real(s)])).unwrap()
    }

    fn phase_family() -> StateFamily {
        StateFamily::unitary_generator(HilbertLayout::qubits(1).unwrap(), plus_state(), pauli::z().scale(0.5)).unwrap()
    }

    #[test]
    fn unitary_generator_closed_form() {
        let f = phase_family();
        let theta = 0.7;
        let (psi, dpsi) = f.pure_state(theta).unwrap().unwrap();
        let s = 0.5f64.sqrt();
        let expected = CVector::from_vec(vec![
            C64::from_polar(s, -theta / 2.0),
            C64::from_polar(s, theta / 2.0),
        ]);
        assert!((psi - &expected).norm() < 1e-14);
        let expected_d = (pauli::z().scale(0.5) * &expected) * (-I);
        assert!((dpsi - expected_d).norm() < 1e-14);
    }

    #[test]
    fn linear_rank_two_derivative() {
        let l = HilbertLayout::qubits(1).unwrap();
        let zero = StateVector::basis(l.clone(), 0).unwrap();
        let one = StateVector::basis(l.clone(), 1).unwrap();
        let f = StateFamily::rank_two_with(l, zero, one, ScalarFn::identity()).unwrap();
        let (_, drho) = eval_state(&f, 0.3).unwrap();
        assert!(max_abs(&(drho - pauli::z())) < 1e-15);
        assert!(eval_state(&f, 1.2).is_err());
    }

    #[test]
    fn numeric_matches_analytic() {
        let analytic = phase_family();
        let inner = analytic.clone();
        let numeric = StateFamily::pure_numeric(
            HilbertLayout::qubits(1).unwrap(),
            Arc::new(move |t| Ok(inner.pure_state(t)?.unwrap().0)),
            1e-4,
        )
        .unwrap();
        for &t in &[0.0, 0.4, 2.1] {
            let (_, d_a) = eval_state(&analytic, t).unwrap();
            let (_, d_n) = eval_state(&numeric, t).unwrap();
            assert!(max_abs(&(d_a - d_n)) < 1e-7);
        }
    }

    #[test]
    fn domain_is_enforced() {
        let f = phase_family().with_domain(0.0, 1.0);
        assert!(matches!(f.eval(1.5), Err(Error::OutOfDomain { .. })));
        assert!(f.eval(0.5).is_ok());
    }

    #[test]
    fn rejects_overlapping_basis() {
        let l = HilbertLayout::qubits(1).unwrap();
        let zero = StateVector::basis(l.clone(), 0).unwrap();
        assert!(StateFamily::rank_two_with(l, zero, plus_state(), ScalarFn::identity()).is_err());
    }

    #[test]
    fn mixed_checks_trace() {
        let l = HilbertLayout::qubits(1).unwrap();
        let f = StateFamily::mixed(l, Arc::new(|_| Ok(CMatrix::identity(2, 2))), 1e-4).unwrap();
        assert!(f.eval(0.1).is_err());
    }
}
