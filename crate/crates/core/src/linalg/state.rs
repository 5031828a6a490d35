use super::{kron_vectors, CVector, HilbertLayout, C64};
use crate::error::{Error, Result};

/// Amplitudes over a layout. Not necessarily normalized: derivative-like
/// vectors such as the projected tangent are generally unnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: HilbertLayout,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(layout: HilbertLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.total() {
            return Err(Error::dim(format!(
                "state has {} amplitudes, layout needs {}",
                amplitudes.len(),
                layout.total()
            )));
        }
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::invalid("state has non-finite amplitudes"));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Like [`StateVector::new`] but requires unit norm.
    pub fn normalized(layout: HilbertLayout, amplitudes: CVector) -> Result<Self> {
        let s = Self::new(layout, amplitudes)?;
        s.ensure_normalized(1e-10)?;
        Ok(s)
    }

    /// Rescales to unit norm.
    pub fn normalize(layout: HilbertLayout, amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if n == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Self::new(layout, amplitudes.unscale(n))
    }

    pub fn basis(layout: HilbertLayout, index: usize) -> Result<Self> {
        let mut v = CVector::zeros(layout.total());
        if index >= v.len() {
            return Err(Error::dim(format!("basis index {index} out of range")));
        }
        v[index] = C64::new(1.0, 0.0);
        Self::new(layout, v)
    }

    /// Tensor product of local vectors given in layout order.
    pub fn product(layout: HilbertLayout, locals: &[CVector]) -> Result<Self> {
        if locals.len() != layout.len() || locals.iter().zip(layout.dims()).any(|(v, &d)| v.len() != d) {
            return Err(Error::dim("local vectors do not match the layout"));
        }
        let amplitudes = kron_vectors(locals);
        Self::new(layout, amplitudes)
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn ensure_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(Error::invalid(format!("state norm {n} is not 1")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;

    #[test]
    fn product_is_big_endian() {
        let l = HilbertLayout::qubits(2).unwrap();
        let zero = CVector::from_vec(vec![real(1.0), real(0.0)]);
        let one = CVector::from_vec(vec![real(0.0), real(1.0)]);
        let s = StateVector::product(l.clone(), &[zero, one]).unwrap();
        assert_eq!(s, StateVector::basis(l, 1).unwrap());
    }

    #[test]
    fn rejects_wrong_length() {
        let l = HilbertLayout::qubits(2).unwrap();
        assert!(StateVector::new(l, CVector::zeros(3)).is_err());
    }
}
