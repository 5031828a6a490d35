use super::layout::split_indices;
use super::{all_finite, CMatrix, CVector, HilbertLayout};
use crate::error::{Error, Result};

/// Kronecker product of the factors in the given order.
pub fn kron(factors: &[CMatrix]) -> Result<CMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::invalid("kron needs at least one factor"))?;
    if !factors.iter().all(all_finite) {
        return Err(Error::invalid("kron factor has non-finite entries"));
    }
    Ok(rest.iter().fold(first.clone(), |acc, f| acc.kronecker(f)))
}

pub fn kron_vectors(factors: &[CVector]) -> CVector {
    let mut out = CVector::from_element(1, super::real(1.0));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

fn check_operator(m: &CMatrix, layout: &HilbertLayout) -> Result<()> {
    let d = layout.total();
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::dim(format!(
            "operator is {}x{}, layout {:?} needs {d}x{d}",
            m.nrows(),
            m.ncols(),
            layout.dims()
        )));
    }
    Ok(())
}

/// Traces out the subsystems listed in `discard` (0-based). The result acts on
/// the kept subsystems in layout order.
pub fn partial_trace(m: &CMatrix, layout: &HilbertLayout, discard: &[usize]) -> Result<CMatrix> {
    for &k in discard {
        layout.check_index(k)?;
    }
    let keep: Vec<usize> = (0..layout.len()).filter(|k| !discard.contains(k)).collect();
    partial_trace_keep(m, layout, &keep)
}

/// Partial trace keeping `keep` (0-based, any order). The result's subsystem
/// order follows `keep`.
pub fn partial_trace_keep(m: &CMatrix, layout: &HilbertLayout, keep: &[usize]) -> Result<CMatrix> {
    check_operator(m, layout)?;
    for (i, &k) in keep.iter().enumerate() {
        layout.check_index(k)?;
        if keep[..i].contains(&k) {
            return Err(Error::invalid(format!("subsystem {k} listed twice")));
        }
    }
    let dims = layout.dims();
    let out_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let split = split_indices(dims, keep);
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for (i, &(ki, ri)) in split.iter().enumerate() {
        for (j, &(kj, rj)) in split.iter().enumerate() {
            if ri == rj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// `<v|_k M |v>_k`: contracts subsystem `k` of `M` with the local unit vector
/// `v`, leaving an operator on the remaining subsystems in layout order.
pub fn sandwich(m: &CMatrix, layout: &HilbertLayout, k: usize, v: &CVector) -> Result<CMatrix> {
    check_operator(m, layout)?;
    layout.check_index(k)?;
    if v.len() != layout.dim(k) {
        return Err(Error::dim(format!(
            "local vector has length {}, subsystem {k} has dimension {}",
            v.len(),
            layout.dim(k)
        )));
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("local vector norm {norm} is not 1")));
    }
    let dims = layout.dims();
    let rest: Vec<usize> = (0..dims.len()).filter(|&j| j != k).collect();
    let out_dim: usize = rest.iter().map(|&j| dims[j]).product();
    // split into (digit of k, index over rest)
    let split = split_indices(dims, &[k]);
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for (i, &(si, ri)) in split.iter().enumerate() {
        let left = v[si].conj();
        if left.norm_sqr() == 0.0 {
            continue;
        }
        for (j, &(sj, rj)) in split.iter().enumerate() {
            out[(ri, rj)] += left * m[(i, j)] * v[sj];
        }
    }
    Ok(out)
}
