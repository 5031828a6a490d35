use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered subsystem dimensions of a multipartite Hilbert space.
///
/// Basis indices are big-endian in layout order: for dims `[d0, d1, d2]` the
/// product state `|i0 i1 i2>` has index `(i0 * d1 + i1) * d2 + i2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct HilbertLayout {
    dims: Vec<usize>,
}

impl HilbertLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::invalid("layout needs at least one subsystem"));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::invalid(format!("subsystem dimension {d} < 2")));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::invalid("layout dimension overflows"))?;
        if total > 1 << 12 {
            return Err(Error::invalid(format!("total dimension {total} is too large for dense operators")));
        }
        Ok(Self { dims })
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims[k]
    }

    pub fn is_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    /// Layout with subsystem `k` removed; `None` when nothing would remain.
    pub fn without(&self, k: usize) -> Option<HilbertLayout> {
        if self.dims.len() <= 1 || k >= self.dims.len() {
            return None;
        }
        let mut dims = self.dims.clone();
        dims.remove(k);
        Some(Self { dims })
    }

    pub(crate) fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.dims.len() {
            return Err(Error::invalid(format!(
                "subsystem index {k} out of range for {} subsystems",
                self.dims.len()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for HilbertLayout {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<HilbertLayout> for Vec<usize> {
    fn from(layout: HilbertLayout) -> Self {
        layout.dims
    }
}

/// Big-endian strides for `dims`.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    strides
}

/// Splits every full index into (index over `kept`, index over `rest`) where
/// both sub-indices are big-endian in their own subsystem order.
pub(crate) fn split_indices(dims: &[usize], kept: &[usize]) -> Vec<(usize, usize)> {
    let total: usize = dims.iter().product();
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let full = strides(dims);
    (0..total)
        .map(|idx| {
            let digit = |k: usize| (idx / full[k]) % dims[k];
            let kept_idx = kept.iter().fold(0, |acc, &k| acc * dims[k] + digit(k));
            let rest_idx = rest.iter().fold(0, |acc, &k| acc * dims[k] + digit(k));
            (kept_idx, rest_idx)
        })
        .collect()
}
