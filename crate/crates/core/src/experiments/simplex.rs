//! Detection rate of `Ψ^E_{(0,1)} ⊗ id` over diagonal qutrit filters
//! `E = diag(a, b, c)` with `a + b + c = 1`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, try_map_indexed};
use crate::linalg::MultiOperator;
use crate::maps::{Filter, FilteredMap, MapSpec};

use super::{negative_output, ExperimentConfig, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexNode {
    /// `(a - b + 1) / 2`.
    pub u: f64,
    /// `c`.
    pub v: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub detected: usize,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexScan {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub nodes: Vec<SimplexNode>,
}

#[derive(Serialize)]
struct Row {
    schema_version: u32,
    u: f64,
    v: f64,
    a: f64,
    b: f64,
    c: f64,
    rate: f64,
}

impl SimplexScan {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for n in &self.nodes {
            w.serialize(Row { schema_version: self.schema_version, u: n.u, v: n.v, a: n.a, b: n.b, c: n.c, rate: n.rate })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Grid nodes `(i, j)` with `i + j ≤ res - 1`, `a = i/(res-1)`, `b = j/(res-1)`, `c = 1 - a - b`.
pub fn simplex_grid(resolution: usize) -> Vec<[f64; 3]> {
    let m = (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * (resolution + 1) / 2);
    for i in 0..resolution {
        for j in 0..resolution - i {
            let (a, b) = (i as f64 / m, j as f64 / m);
            let c = ((resolution - 1 - i - j) as f64 / m).max(0.0);
            out.push([a, b, c]);
        }
    }
    out
}

/// Detection counts of the shared sample at each filter `diag(a, b, c)`.
/// The points need not be normalised.
pub fn simplex_rates(config: &ExperimentConfig, points: &[[f64; 3]]) -> Result<Vec<SimplexNode>> {
    config.validate()?;
    if config.d != 3 {
        return Err(Error::Unsupported(format!("the simplex scan is defined for d = 3, got {}", config.d)));
    }
    let states: Vec<MultiOperator> = map_indexed(config.execution, config.n, |i| config.ensemble.sample(&[3, 3], &mut config.rng(i)));
    let base = FilteredMap::new(&MapSpec::reduction(), 3)?;
    // Nodes run in parallel; within a node the states are visited in order.
    try_map_indexed(config.execution, points.len(), |p| {
        let [a, b, c] = points[p];
        let filter = Filter::diagonal(&[a, b, c])?;
        let map = base.refiltered(&filter)?;
        let e2 = a.max(b).max(c).powi(2);
        let mut detected = 0;
        for rho in &states {
            let out = map.apply_to_subsystems(rho, &[0])?;
            if negative_output(&out, e2 * 3.0 * rho.max_abs())?.0 {
                detected += 1;
            }
        }
        let total = a + b + c;
        Ok(SimplexNode {
            u: (a - b + total) / (2.0 * total),
            v: c / total,
            a,
            b,
            c,
            detected,
            rate: detected as f64 / config.n as f64,
        })
    })
}

pub fn run_simplex_scan(config: &ExperimentConfig) -> Result<SimplexScan> {
    config.validate()?;
    let nodes = simplex_rates(config, &simplex_grid(config.resolution))?;
    Ok(SimplexScan { schema_version: SCHEMA_VERSION, config: config.clone(), nodes })
}
