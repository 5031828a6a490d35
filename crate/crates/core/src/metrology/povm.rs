use crate::error::{Error, Result};
use crate::linalg::{expectation, identity, max_abs, outer, min_eigenvalue, sqrt_psd, CMatrix, CVector};

/// One POVM element: either rank one `|e><e|` (e not necessarily unit) or a
/// general PSD operator.
#[derive(Debug, Clone)]
pub enum PovmElement {
    Rank1(CVector),
    Operator(CMatrix),
}

impl PovmElement {
    pub fn dim(&self) -> usize {
        match self {
            PovmElement::Rank1(v) => v.len(),
            PovmElement::Operator(m) => m.nrows(),
        }
    }

    pub fn operator(&self) -> CMatrix {
        match self {
            PovmElement::Rank1(v) => outer(v, v),
            PovmElement::Operator(m) => m.clone(),
        }
    }

    /// `Tr(E A)`
    pub fn trace_with(&self, a: &CMatrix) -> f64 {
        match self {
            PovmElement::Rank1(v) => expectation(a, v).re,
            PovmElement::Operator(m) => (m * a).trace().re,
        }
    }

    pub fn sqrt(&self) -> Result<CMatrix> {
        match self {
            PovmElement::Rank1(v) => {
                let n = v.norm();
                if n == 0.0 {
                    Ok(CMatrix::zeros(v.len(), v.len()))
                } else {
                    Ok(outer(v, v).unscale(n))
                }
            }
            PovmElement::Operator(m) => sqrt_psd(m),
        }
    }
}

/// Positive operators summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<PovmElement>,
    labels: Vec<String>,
}

/// Completeness tolerance on the largest entry of `sum E - I`.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Lower bound on the smallest eigenvalue of each element.
pub const PSD_TOL: f64 = 1e-9;

impl Povm {
    pub fn new(elements: Vec<PovmElement>, labels: Vec<String>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::invalid("POVM has no elements"));
        }
        if labels.len() != elements.len() {
            return Err(Error::invalid("POVM labels and elements differ in number"));
        }
        let d = elements[0].dim();
        if elements.iter().any(|e| e.dim() != d) {
            return Err(Error::dim("POVM elements have different dimensions"));
        }
        for e in &elements {
            if let PovmElement::Operator(m) = e {
                let min = min_eigenvalue(m)?;
                if min < -PSD_TOL {
                    return Err(Error::NotPsd { min_eigenvalue: min });
                }
            }
        }
        let povm = Self { elements, labels };
        let deviation = povm.completeness_error();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::invalid(format!("POVM elements sum to I only within {deviation:.3e}")));
        }
        Ok(povm)
    }

    /// Rank-one POVM labelled by position.
    pub fn from_vectors(vectors: Vec<CVector>) -> Result<Self> {
        let labels = (0..vectors.len()).map(|i| i.to_string()).collect();
        Self::new(vectors.into_iter().map(PovmElement::Rank1).collect(), labels)
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_basis(u: &CMatrix) -> Result<Self> {
        Self::from_vectors(u.column_iter().map(|c| c.into_owned()).collect())
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn completeness_error(&self) -> f64 {
        let d = self.dim();
        let sum = self.elements.iter().fold(CMatrix::zeros(d, d), |acc, e| acc + e.operator());
        max_abs(&(sum - identity(d)))
    }

    /// Outcome probabilities `Tr(E_x rho)`.
    pub fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        self.elements.iter().map(|e| e.trace_with(rho)).collect()
    }
}

/// Outcomes with probability below this are excluded from the FI sum.
pub const P_TOL: f64 = 1e-12;

/// Classical Fisher information `sum (Tr(E drho))^2 / Tr(E rho)` over outcomes
/// with `Tr(E rho) >= p_tol`.
pub fn fisher_info(povm: &Povm, rho: &CMatrix, drho: &CMatrix, p_tol: f64) -> Result<f64> {
    if rho.nrows() != povm.dim() || drho.nrows() != povm.dim() {
        return Err(Error::dim("state and POVM dimensions differ"));
    }
    Ok(povm
        .elements()
        .iter()
        .filter_map(|e| {
            let p = e.trace_with(rho);
            (p >= p_tol).then(|| e.trace_with(drho).powi(2) / p)
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, real};

    #[test]
    fn rejects_incomplete_and_negative() {
        let e0 = CVector::from_vec(vec![real(1.0), real(0.0)]);
        assert!(Povm::from_vectors(vec![e0.clone()]).is_err());
        let neg = PovmElement::Operator(pauli::z());
        assert!(matches!(
            Povm::new(vec![neg, PovmElement::Operator(CMatrix::identity(2, 2))], vec!["a".into(), "b".into()]),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn computational_basis_probabilities() {
        let povm = Povm::from_basis(&CMatrix::identity(2, 2)).unwrap();
        let rho = CMatrix::from_diagonal(&CVector::from_vec(vec![real(0.25), real(0.75)]));
        assert_eq!(povm.probabilities(&rho), vec![0.25, 0.75]);
    }

    #[test]
    fn rank1_sqrt_is_normalized_projector_scaled() {
        let e = PovmElement::Rank1(CVector::from_vec(vec![real(0.6), real(0.0)]));
        let s = e.sqrt().unwrap();
        assert!(max_abs(&(&s * &s - e.operator())) < 1e-15);
    }
}
