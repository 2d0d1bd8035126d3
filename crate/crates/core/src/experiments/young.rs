//! JSON export of the Young projectors on `(C^d)^{⊗k}`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::ComplexRows;
use crate::symgroup::{partitions_of, young_projector};

use super::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungEntry {
    pub partition: String,
    /// `tr P_λ`, the dimension of the isotypic component.
    pub rank: f64,
    /// Nested `[re, im]` rows.
    pub matrix: ComplexRows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungDump {
    pub schema_version: u32,
    pub k: usize,
    pub d: usize,
    pub projectors: Vec<YoungEntry>,
}

impl YoungDump {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Every `P_λ` for `λ ⊢ k` in canonical order, including vanishing ones.
pub fn young_dump(k: usize, d: usize) -> Result<YoungDump> {
    let projectors = partitions_of(k)?
        .into_iter()
        .map(|lambda| {
            let p = young_projector(&lambda, d)?;
            Ok(YoungEntry { partition: lambda.to_string(), rank: p.trace().re, matrix: ComplexRows::from_matrix(p.entries()) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(YoungDump { schema_version: SCHEMA_VERSION, k, d, projectors })
}
