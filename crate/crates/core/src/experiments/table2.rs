//! Largest `t` such that a three-party witness still detects a state whose
//! partial transposes on the first `t` parties are all PSD.

use std::io::Write;

use serde::Serialize;

use crate::catalog::{table2_witnesses, TValue};
use crate::error::Result;
use crate::exec::{map_indexed, Execution};
use crate::maps::MapSpec;
use crate::optimizer::{max_t_detectable, verify_certificate, Certificate, PptProblem, SolverOptions, SolverStatus};
use crate::witness::build_witness;

use super::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table2Cell {
    pub witness: String,
    pub label: String,
    pub d: usize,
    pub t: Option<TValue>,
    pub expected: TValue,
    /// Optimal values for `t = 0, 1, …` up to the first undetected one.
    pub values: Vec<f64>,
    pub statuses: Vec<SolverStatus>,
    /// Every verdict agrees with a dense re-evaluation of its certificate.
    pub verified: bool,
    pub error: Option<String>,
}

impl Table2Cell {
    pub fn matches(&self) -> bool {
        self.t == Some(self.expected)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table2Report {
    pub schema_version: u32,
    pub cells: Vec<Table2Cell>,
}

#[derive(Serialize)]
struct Row<'a> {
    schema_version: u32,
    witness: &'a str,
    d: usize,
    t: String,
    expected: String,
    matches: bool,
    verified: bool,
    value_t0: Option<f64>,
    value_t1: Option<f64>,
    value_t2: Option<f64>,
    value_t3: Option<f64>,
    error: &'a str,
}

impl Table2Report {
    pub fn mismatches(&self) -> usize {
        self.cells.iter().filter(|c| !c.matches()).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for c in &self.cells {
            let v = |i: usize| c.values.get(i).copied();
            w.serialize(Row {
                schema_version: self.schema_version,
                witness: &c.witness,
                d: c.d,
                t: c.t.map_or_else(|| "error".to_string(), |t| t.to_string()),
                expected: c.expected.to_string(),
                matches: c.matches(),
                verified: c.verified,
                value_t0: v(0),
                value_t1: v(1),
                value_t2: v(2),
                value_t3: v(3),
                error: c.error.as_deref().unwrap_or(""),
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// All catalogue witnesses for `d = 2..=5`, cells solved in parallel.
pub fn run_table2(exec: Execution, opts: &SolverOptions) -> Table2Report {
    let witnesses = table2_witnesses();
    let jobs: Vec<(usize, usize)> = (0..witnesses.len()).flat_map(|w| (2..=5).map(move |d| (w, d))).collect();
    let cells = map_indexed(exec, jobs.len(), |j| {
        let (wi, d) = jobs[j];
        let tw = &witnesses[wi];
        let mut cell = Table2Cell {
            witness: tw.id.to_string(),
            label: tw.label.to_string(),
            d,
            t: None,
            expected: tw.expected[d - 2],
            values: Vec::new(),
            statuses: Vec::new(),
            verified: false,
            error: None,
        };
        match solve_cell(&MapSpec::unfiltered(tw.coeffs.clone()), d, opts) {
            Ok((t, values, statuses, verified)) => {
                cell.t = Some(t);
                cell.values = values;
                cell.statuses = statuses;
                cell.verified = verified;
            }
            Err(e) => cell.error = Some(e.to_string()),
        }
        cell
    });
    Table2Report { schema_version: SCHEMA_VERSION, cells }
}

type CellOutcome = (TValue, Vec<f64>, Vec<SolverStatus>, bool);

fn solve_cell(spec: &MapSpec, d: usize, opts: &SolverOptions) -> Result<CellOutcome> {
    let w = build_witness(spec, 3, d)?;
    let scan = max_t_detectable(&w, opts)?;
    let mut verified = true;
    for (t, res) in scan.results.iter().enumerate() {
        let problem = PptProblem::prefix(w.clone(), t)?;
        let check = verify_certificate(&Certificate::new(&problem, res, None), w.op())?;
        verified &= check.detected == res.detected();
    }
    let statuses = scan.results.iter().map(|r| r.status).collect();
    Ok((scan.t, scan.values, statuses, verified))
}
