//! JSON encoding of complex matrices and vectors as nested `[re, im]` pairs.
//!
//! A matrix is an array of rows, each row an array of `[re, im]`. A vector is
//! an array of `[re, im]`. Use with `#[serde(with = "...")]`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CMatrix, CVector, C64};

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, String> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err("matrix has no rows".into());
    }
    let ncols = rows[0].len();
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err("matrix rows are empty or ragged".into());
    }
    if rows.iter().flatten().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err("matrix has non-finite entries".into());
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn vector_to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_pairs(pairs: &[[f64; 2]]) -> Result<CVector, String> {
    if pairs.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err("vector has non-finite entries".into());
    }
    Ok(CVector::from_iterator(pairs.len(), pairs.iter().map(|p| C64::new(p[0], p[1]))))
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        matrix_from_rows(&rows).map_err(D::Error::custom)
    }
}

pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
        vector_to_pairs(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        vector_from_pairs(&pairs).map_err(D::Error::custom)
    }
}

pub mod vectors {
    use super::*;

    pub fn serialize<S: Serializer>(vs: &[CVector], s: S) -> Result<S::Ok, S::Error> {
        vs.iter().map(vector_to_pairs).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CVector>, D::Error> {
        let all = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        all.iter()
            .map(|p| vector_from_pairs(p))
            .collect::<Result<_, _>>()
            .map_err(D::Error::custom)
    }
}

pub mod option_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Option<CMatrix>, s: S) -> Result<S::Ok, S::Error> {
        m.as_ref().map(matrix_to_rows).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CMatrix>, D::Error> {
        match Option::<Vec<Vec<[f64; 2]>>>::deserialize(d)? {
            None => Ok(None),
            Some(rows) => matrix_from_rows(&rows).map(Some).map_err(D::Error::custom),
        }
    }
}
