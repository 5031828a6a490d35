use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, CMatrix};

/// One weighted Pauli string, e.g. `{ "coeff": 1.0, "string": "XXII" }`.
/// The first character acts on subsystem 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliStringTerm {
    pub coeff: f64,
    pub string: String,
}

impl PauliStringTerm {
    pub fn new(coeff: f64, string: impl Into<String>) -> Self {
        Self { coeff, string: string.into() }
    }

    pub fn matrix(&self, qubits: usize) -> Result<CMatrix> {
        if self.string.chars().count() != qubits {
            return Err(Error::invalid(format!(
                "Pauli string {:?} has length {}, expected {qubits}",
                self.string,
                self.string.chars().count()
            )));
        }
        let factors = self
            .string
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(pauli::id()),
                'X' => Ok(pauli::x()),
                'Y' => Ok(pauli::y()),
                'Z' => Ok(pauli::z()),
                other => Err(Error::invalid(format!("unknown Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(kron(&factors)?.scale(self.coeff))
    }
}

/// Dense matrix of a sum of Pauli strings on `qubits` qubits.
pub fn pauli_sum(terms: &[PauliStringTerm], qubits: usize) -> Result<CMatrix> {
    if qubits == 0 {
        return Err(Error::invalid("Pauli sum needs at least one qubit"));
    }
    let d = 1usize << qubits;
    terms
        .iter()
        .try_fold(CMatrix::zeros(d, d), |acc, t| Ok(acc + t.matrix(qubits)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_deviation, max_abs};

    #[test]
    fn zz_is_diagonal_parity() {
        let m = pauli_sum(&[PauliStringTerm::new(0.5, "ZZ")], 2).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![0.5, -0.5, -0.5, 0.5]);
    }

    #[test]
    fn first_letter_is_first_subsystem() {
        let m = pauli_sum(&[PauliStringTerm::new(1.0, "XI")], 2).unwrap();
        // X on subsystem 0 maps |00> (index 0) to |10> (index 2)
        assert_eq!(m[(2, 0)].re, 1.0);
        assert_eq!(m[(1, 0)].re, 0.0);
    }

    #[test]
    fn chain_is_hermitian() {
        let terms = ["XXII", "IXXI", "IIXX"].map(|s| PauliStringTerm::new(1.0, s));
        let g = pauli_sum(&terms, 4).unwrap();
        assert!(hermitian_deviation(&g) < 1e-15);
        assert!(max_abs(&g) > 0.0);
    }

    #[test]
    fn rejects_bad_strings() {
        assert!(pauli_sum(&[PauliStringTerm::new(1.0, "XQ")], 2).is_err());
        assert!(pauli_sum(&[PauliStringTerm::new(1.0, "XXX")], 2).is_err());
    }
}
