//! Seeded Monte Carlo studies and table reproductions.
//!
//! Sample `i` of a run draws everything it needs from
//! `RandomSource::with_stream(seed, i)`, so counts and per-trial records do
//! not depend on the number of threads or on scheduling.

mod multicopy;
mod obs3;
mod simplex;
mod table1;
mod table2;
mod young;

use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{MultiOperator, NEGATIVITY_RTOL};
use crate::random::{ginibre_state, random_separable_state, RandomSource};

pub use multicopy::{run_multicopy, MULTICOPY_ROWS};
pub use obs3::{obs3_witness, run_obs3_certificate, MaximallyMixedCheck, Obs3Report, ProductCheck};
pub use simplex::{run_simplex_scan, simplex_grid, simplex_rates, SimplexNode, SimplexScan};
pub use table1::{run_table1, TABLE1_ROWS};
pub use table2::{run_table2, Table2Cell, Table2Report};
pub use young::{young_dump, YoungDump, YoungEntry};

/// Version tag written into every CSV row and JSON report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Table1,
    Simplex,
    Multicopy,
    Table2,
    Obs3,
    Young,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Which bipartite states are sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Ensemble {
    /// `GG†/tr(GG†)` with a square complex Gaussian `G`.
    Ginibre,
    /// Convex mixtures of random pure product states.
    Separable { terms: usize },
}

impl Ensemble {
    pub fn sample(self, dims: &[usize], rng: &mut RandomSource) -> MultiOperator {
        match self {
            Ensemble::Ginibre => ginibre_state(dims, rng),
            Ensemble::Separable { terms } => random_separable_state(dims, terms, rng),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub ensemble: Ensemble,
    /// Random `U_A ⊗ U_B` per state in the Haar row (the identity is always tried first).
    pub unitaries_per_state: usize,
    /// Draw the Haar-row unitaries per state; otherwise one set is shared by the whole sample.
    pub fresh_unitaries: bool,
    /// Nodes per edge of the simplex grid.
    pub resolution: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Keep per-trial verdicts and minimum eigenvalues in the report.
    pub dump_trials: bool,
    #[serde(skip)]
    pub execution: Execution,
}

impl ExperimentConfig {
    fn base(experiment: ExperimentId, d: usize, n: usize, seed: u64) -> Self {
        Self {
            experiment,
            d,
            n,
            seed,
            ensemble: Ensemble::Ginibre,
            unitaries_per_state: 10 * d,
            fresh_unitaries: true,
            resolution: 40,
            output: None,
            format: OutputFormat::Csv,
            dump_trials: false,
            execution: Execution::default(),
        }
    }

    pub fn table1(d: usize, n: usize, seed: u64) -> Self {
        Self::base(ExperimentId::Table1, d, n, seed)
    }

    /// `10^4` states and `50d` unitaries per state.
    pub fn full_scale(mut self) -> Self {
        self.n = 10_000;
        self.unitaries_per_state = 50 * self.d;
        self
    }

    pub fn simplex(resolution: usize, n: usize, seed: u64) -> Self {
        Self { resolution, ..Self::base(ExperimentId::Simplex, 3, n, seed) }
    }

    pub fn multicopy(n: usize, seed: u64) -> Self {
        Self::base(ExperimentId::Multicopy, 3, n, seed)
    }

    pub fn obs3(seed: u64) -> Self {
        Self { format: OutputFormat::Json, ..Self::base(ExperimentId::Obs3, 3, 1000, seed) }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_ensemble(mut self, ensemble: Ensemble) -> Self {
        self.ensemble = ensemble;
        self
    }

    pub fn with_trials(mut self) -> Self {
        self.dump_trials = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        if self.resolution < 2 {
            return Err(Error::Config(format!("grid resolution must be at least 2, got {}", self.resolution)));
        }
        if let Ensemble::Separable { terms: 0 } = self.ensemble {
            return Err(Error::Config("separable ensemble needs at least one term".into()));
        }
        Ok(())
    }

    pub(crate) fn rng(&self, sample: usize) -> RandomSource {
        RandomSource::with_stream(self.seed, sample as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionCount {
    pub criterion: String,
    pub detected: usize,
    pub rate: f64,
}

/// Per-sample check that everything detected by `subset` is detected by `superset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentCheck {
    pub subset: String,
    pub superset: String,
    pub violations: usize,
    /// Whether the inclusion follows from how the criteria are defined.
    pub structural: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    /// One entry per criterion, in report order.
    pub detected: Vec<bool>,
    /// Smallest eigenvalue seen per criterion. Rows that try several filters
    /// stop at the first negative one.
    pub min_eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub n: usize,
    pub criteria: Vec<CriterionCount>,
    pub containment: Vec<ContainmentCheck>,
    pub trials: Option<Vec<TrialRecord>>,
}

#[derive(Serialize)]
struct CountRow<'a> {
    schema_version: u32,
    experiment: ExperimentId,
    d: usize,
    n: usize,
    seed: u64,
    criterion: &'a str,
    detected: usize,
    rate: f64,
}

#[derive(Serialize)]
struct TrialRow<'a> {
    schema_version: u32,
    index: usize,
    criterion: &'a str,
    detected: bool,
    min_eigenvalue: f64,
}

impl DetectionReport {
    pub(crate) fn from_trials(config: &ExperimentConfig, names: &[&str], trials: Vec<TrialRecord>, containment: &[(&str, &str, bool)]) -> Self {
        let n = trials.len();
        let criteria = names
            .iter()
            .enumerate()
            .map(|(c, name)| {
                let detected = trials.iter().filter(|t| t.detected[c]).count();
                CriterionCount { criterion: name.to_string(), detected, rate: detected as f64 / n as f64 }
            })
            .collect();
        let pos = |name: &str| names.iter().position(|x| *x == name).expect("containment names a known criterion");
        let containment = containment
            .iter()
            .map(|&(sub, sup, structural)| {
                let (a, b) = (pos(sub), pos(sup));
                let violations = trials.iter().filter(|t| t.detected[a] && !t.detected[b]).count();
                ContainmentCheck { subset: sub.into(), superset: sup.into(), violations, structural }
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            n,
            criteria,
            containment,
            trials: config.dump_trials.then_some(trials),
        }
    }

    pub fn count(&self, criterion: &str) -> Option<usize> {
        self.criteria.iter().find(|c| c.criterion == criterion).map(|c| c.detected)
    }

    pub fn rate(&self, criterion: &str) -> Option<f64> {
        self.criteria.iter().find(|c| c.criterion == criterion).map(|c| c.rate)
    }

    /// Violations of inclusions that hold by construction.
    pub fn structural_violations(&self) -> usize {
        self.containment.iter().filter(|c| c.structural).map(|c| c.violations).sum()
    }

    /// One row per criterion.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for c in &self.criteria {
            w.serialize(CountRow {
                schema_version: self.schema_version,
                experiment: self.config.experiment,
                d: self.config.d,
                n: self.n,
                seed: self.config.seed,
                criterion: &c.criterion,
                detected: c.detected,
                rate: c.rate,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// One row per (trial, criterion), ordered by trial index. Empty without a trial dump.
    pub fn write_trials_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for t in self.trials.iter().flatten() {
            for (c, crit) in self.criteria.iter().enumerate() {
                w.serialize(TrialRow {
                    schema_version: self.schema_version,
                    index: t.index,
                    criterion: &crit.criterion,
                    detected: t.detected[c],
                    min_eigenvalue: t.min_eigenvalues[c],
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Negativity verdict for a map output, with the cutoff scaled by the larger of
/// the output's and the inputs' natural size so that vanishing outputs are not
/// judged on rounding noise. Returns the verdict and the minimum eigenvalue.
pub(crate) fn negative_output(out: &MultiOperator, input_scale: f64) -> Result<(bool, f64)> {
    let min = out.min_eigenvalue()?;
    Ok((min < -NEGATIVITY_RTOL * out.max_abs().max(input_scale), min))
}

/// PPT-criterion verdict on factor 0.
pub(crate) fn ppt_violation(rho: &MultiOperator) -> Result<(bool, f64)> {
    let pt = rho.partial_transpose(&[0])?;
    let min = pt.min_eigenvalue()?;
    Ok((min < pt.negativity_threshold(), min))
}
