//! JSON form of a [`MapSpec`]:
//!
//! ```json
//! {"k": 3, "coeffs": {"[2,1]": 0.5, "[1,1,1]": -1.0}, "filter": "identity"}
//! ```
//!
//! `filter` may also be a dense matrix given as rows of `[re, im]` pairs.
//! An optional `"weighting"` of `"factorial_over_character"`,
//! `"inverse_character"` or `"plain"` overrides the context default.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexRows, MultiOperator};
use crate::maps::{Filter, MapSpec, Weighting};
use crate::symgroup::{ImmanantCoefficients, Partition};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FilterConfig {
    Named(String),
    Matrix(ComplexRows),
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig::Named("identity".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpecConfig {
    pub k: usize,
    pub coeffs: BTreeMap<String, f64>,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighting: Option<Weighting>,
}

impl MapSpecConfig {
    pub fn to_spec(&self) -> Result<MapSpec> {
        let mut pairs = Vec::with_capacity(self.coeffs.len());
        for (key, &a) in &self.coeffs {
            let p: Partition = key.parse()?;
            if p.k() != self.k {
                return Err(Error::Config(format!("partition {key} does not partition k = {}", self.k)));
            }
            if !a.is_finite() {
                return Err(Error::Config(format!("coefficient for {key} is not finite")));
            }
            pairs.push((p, a));
        }
        let coeffs = ImmanantCoefficients::from_pairs(self.k, &pairs)?;
        let filter = match &self.filter {
            FilterConfig::Named(name) if name == "identity" => Filter::Identity,
            FilterConfig::Named(name) => return Err(Error::Config(format!("unknown filter {name:?}"))),
            FilterConfig::Matrix(rows) => {
                let m = rows.to_matrix()?;
                Filter::operator(MultiOperator::from_matrix(m)?)?
            }
        };
        Ok(MapSpec { coeffs, filter, weighting: self.weighting })
    }

    pub fn from_spec(spec: &MapSpec) -> Self {
        let coeffs = spec
            .coeffs
            .terms()
            .into_iter()
            .filter(|(_, a)| *a != 0.0)
            .map(|(p, a)| (p.to_string(), a))
            .collect();
        let filter = match &spec.filter {
            Filter::Identity => FilterConfig::default(),
            Filter::Operator(e) => FilterConfig::Matrix(ComplexRows::from_matrix(e.entries())),
        };
        Self { k: spec.k(), coeffs, filter, weighting: spec.weighting }
    }
}

pub fn parse_map_spec(json: &str) -> Result<MapSpec> {
    serde_json::from_str::<MapSpecConfig>(json)?.to_spec()
}

pub fn load_map_spec(path: impl AsRef<Path>) -> Result<MapSpec> {
    parse_map_spec(&std::fs::read_to_string(path)?)
}

pub fn map_spec_to_json(spec: &MapSpec) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MapSpecConfig::from_spec(spec))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let spec = parse_map_spec(r#"{"k": 3, "coeffs": {"[2,1]": 0.5, "[1,1,1]": -1.0}, "filter": "identity"}"#).unwrap();
        assert_eq!(spec.coeffs.coeffs(), &[0.0, 0.5, -1.0]);
        assert_eq!(spec.filter, Filter::Identity);
        assert_eq!(spec.weighting, None);
    }

    #[test]
    fn matrix_filter_and_weighting_roundtrip() {
        let json = r#"{"k": 2, "coeffs": {"[1,1]": 1.0}, "filter": [[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0]]], "weighting": "plain"}"#;
        let spec = parse_map_spec(json).unwrap();
        assert_eq!(spec.filter.dim(), Some(3));
        assert_eq!(spec.weighting, Some(Weighting::Plain));
        let back = parse_map_spec(&map_spec_to_json(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(parse_map_spec(r#"{"k": 3, "coeffs": {"[2]": 1.0}}"#).is_err());
        assert!(parse_map_spec(r#"{"k": 2, "coeffs": {"[1,1]": 1.0}, "filter": "pa"}"#).is_err());
        assert!(parse_map_spec(r#"{"k": 2, "coeffs": {"[1,1]": 1.0}, "filter": [[[1,0],[0,0]],[[0,0],[-1,0]]]}"#).is_err());
        assert!(parse_map_spec(r#"{"k": 2, "coeffs": {}, "extra": 1}"#).is_err());
        assert!(parse_map_spec(r#"{"k": 9, "coeffs": {}}"#).is_err());
    }
}
