//! Minimisation of `tr(XW)` over unit-trace PSD `X` whose partial transposes
//! on chosen subsystem sets are PSD.
//!
//! Solvers are one-sided: every reported point is made exactly feasible
//! (mixing in a little of `I/D` if needed) and re-checked with dense
//! eigensolves, so a negative value is always backed by an explicit `X`.
//! Convergence shortfalls can hide a violation but never invent one.

mod admm;
mod cones;
mod dykstra;
pub mod symmetry;

use serde::{Deserialize, Serialize};

use crate::catalog::TValue;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ComplexRows, MultiOperator, C64};
use crate::witness::WitnessOperator;

use cones::Cones;
use symmetry::TorusSymmetry;

/// A value below `-DETECTION_RTOL * ‖W‖_∞` counts as a detection.
pub const DETECTION_RTOL: f64 = 1e-6;
/// Smallest allowed eigenvalue of `X` and of each constrained partial transpose.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Allowed deviation of `tr X` from 1.
pub const TRACE_TOL: f64 = 1e-8;
pub const CERTIFICATE_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct PptProblem {
    pub witness: WitnessOperator,
    pub transpose_sets: Vec<Vec<usize>>,
}

impl PptProblem {
    pub fn new(witness: WitnessOperator, transpose_sets: Vec<Vec<usize>>) -> Result<Self> {
        let n = witness.dims().len();
        for set in &transpose_sets {
            if let Some(&bad) = set.iter().find(|&&f| f >= n) {
                return Err(Error::IndexOutOfRange { index: bad, factors: n });
            }
        }
        Ok(Self { witness, transpose_sets })
    }

    /// Constraints on the first `t` single factors.
    pub fn prefix(witness: WitnessOperator, t: usize) -> Result<Self> {
        let n = witness.dims().len();
        if t > n {
            return Err(Error::IndexOutOfRange { index: t, factors: n });
        }
        Self::new(witness, (0..t).map(|f| vec![f]).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Consensus ADMM with adaptive penalty.
    Admm,
    /// `X ← Π(X - W/√iter)` with `Π` computed by Dykstra's alternating projections.
    ProjectedSubgradient,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub algorithm: Algorithm,
    pub max_iter: usize,
    /// Stopping tolerance on residuals (ADMM) or step length (subgradient), Frobenius norm.
    pub tol: f64,
    /// Exploit detected torus symmetries of `W` (blockwise eigensolves).
    pub use_symmetry: bool,
    /// Iterations between evaluations of the repaired candidate.
    pub check_every: usize,
    /// Initial ADMM penalty, in units of the dimension.
    pub admm_rho: f64,
    pub dykstra_sweeps: usize,
    pub dykstra_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Admm,
            max_iter: 20_000,
            tol: 1e-10,
            use_symmetry: true,
            check_every: 25,
            admm_rho: 1.0,
            dykstra_sweeps: 200,
            dykstra_tol: 1e-9,
        }
    }
}

impl SolverOptions {
    pub fn projected_subgradient() -> Self {
        Self { algorithm: Algorithm::ProjectedSubgradient, max_iter: 5000, tol: 1e-12, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    /// Closed-form answer (no partial-transpose constraints).
    Exact,
    Converged,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    /// `tr(XW)` of the returned, exactly feasible `X`.
    pub value: f64,
    pub x: MultiOperator,
    /// `λ_min(X)`.
    pub psd_residual: f64,
    /// `λ_min(X^{T_S})` per constraint set, in problem order.
    pub residuals: Vec<f64>,
    pub trace_error: f64,
    pub iterations: usize,
    pub status: SolverStatus,
    /// `‖W‖_∞`.
    pub witness_norm: f64,
}

impl SolverResult {
    pub fn threshold(&self) -> f64 {
        -DETECTION_RTOL * self.witness_norm
    }

    pub fn feasible(&self) -> bool {
        self.trace_error <= TRACE_TOL
            && self.psd_residual >= -FEASIBILITY_TOL
            && self.residuals.iter().all(|&r| r >= -FEASIBILITY_TOL)
    }

    /// Feasible and below the detection threshold.
    pub fn detected(&self) -> bool {
        self.feasible() && self.value < self.threshold()
    }
}

/// Repaired, exactly feasible point in normalised units.
#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub x: CMatrix,
    pub value: f64,
}

impl Candidate {
    /// Projects onto the state set, then mixes with `I/D` until every cone is satisfied.
    pub(crate) fn from_iterate(cones: &Cones, w: &CMatrix, y: &CMatrix) -> Self {
        let dim = cones.dim();
        let mut x = cones.project_state(&cones.twirl(y));
        let mut mu = cones.state_min_eigenvalue(&x);
        for i in 0..cones.num_constraints() {
            mu = mu.min(cones.pt_min_eigenvalue(i, &x));
        }
        const MARGIN: f64 = 1e-13;
        if mu < MARGIN {
            let inv = 1.0 / dim as f64;
            let p = ((MARGIN - mu) / (inv - mu)).min(1.0);
            x = &x * C64::new(1.0 - p, 0.0) + CMatrix::identity(dim, dim) * C64::new(p * inv, 0.0);
        }
        let value = trace_product(&x, w);
        Self { x, value }
    }
}

fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.transpose().iter()).map(|(x, y)| x * y).sum::<C64>().re
}

/// Minimises `tr(XW)` subject to the problem's partial-transpose constraints.
pub fn minimize_over_ppt_set(problem: &PptProblem, opts: &SolverOptions) -> Result<SolverResult> {
    let w = problem.witness.op();
    let dims = w.dims().to_vec();
    let norm = w.spectral_norm()?;
    if norm == 0.0 {
        let dim = w.dim();
        let x = MultiOperator::new(CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0), dims)?;
        return finish(problem, x, 0, SolverStatus::Exact, norm);
    }
    let symmetry = if opts.use_symmetry { TorusSymmetry::detect(w) } else { TorusSymmetry::trivial(&dims) };
    let cones = Cones::new(&dims, &problem.transpose_sets, &symmetry);
    let wn = w.entries() / C64::new(norm, 0.0);

    if problem.transpose_sets.is_empty() {
        let (_, x) = cones.min_eigenpair(&wn);
        return finish(problem, MultiOperator::new(x, dims)?, 0, SolverStatus::Exact, norm);
    }
    let (cand, iterations, converged) = match opts.algorithm {
        Algorithm::Admm => admm::solve(&cones, &wn, opts),
        Algorithm::ProjectedSubgradient => dykstra::solve(&cones, &wn, opts),
    };
    let status = if converged { SolverStatus::Converged } else { SolverStatus::IterationLimit };
    finish(problem, MultiOperator::new(cand.x, dims)?, iterations, status, norm)
}

/// Dense re-evaluation of value and residuals, independent of solver internals.
fn finish(problem: &PptProblem, x: MultiOperator, iterations: usize, status: SolverStatus, norm: f64) -> Result<SolverResult> {
    let x = x.hermitian_part();
    let check = evaluate_point(problem.witness.op(), &x, &problem.transpose_sets)?;
    Ok(SolverResult {
        value: check.value,
        x,
        psd_residual: check.psd_residual,
        residuals: check.residuals,
        trace_error: check.trace_error,
        iterations,
        status,
        witness_norm: norm,
    })
}

/// Independent evaluation of a candidate point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCheck {
    pub value: f64,
    pub trace_error: f64,
    pub psd_residual: f64,
    pub residuals: Vec<f64>,
}

pub fn evaluate_point(w: &MultiOperator, x: &MultiOperator, sets: &[Vec<usize>]) -> Result<PointCheck> {
    let value = w.trace_product(x)?.re;
    let trace_error = (x.trace() - C64::new(1.0, 0.0)).norm();
    let psd_residual = x.min_eigenvalue()?;
    let residuals = sets
        .iter()
        .map(|s| x.partial_transpose(s)?.min_eigenvalue())
        .collect::<Result<Vec<_>>>()?;
    Ok(PointCheck { value, trace_error, psd_residual, residuals })
}

/// Outcome of scanning `t = 0, 1, …` prefix constraints.
#[derive(Clone, Debug)]
pub struct TScan {
    pub t: TValue,
    /// Optimal values found for `t = 0, 1, …` until the first undetected `t`.
    pub values: Vec<f64>,
    pub results: Vec<SolverResult>,
}

/// Largest `t` such that `W` still detects some state whose partial transposes on the
/// first `t` factors are PSD; `Psd` when `W` has no negative eigenvalue.
///
/// Only prefixes are scanned, which suffices for witnesses symmetric under
/// factor permutations.
pub fn max_t_detectable(witness: &WitnessOperator, opts: &SolverOptions) -> Result<TScan> {
    if !witness.op().is_negative()? {
        return Ok(TScan { t: TValue::Psd, values: Vec::new(), results: Vec::new() });
    }
    let n = witness.dims().len();
    let mut values = Vec::new();
    let mut results = Vec::new();
    let mut t_max = 0;
    for t in 0..=n {
        let res = minimize_over_ppt_set(&PptProblem::prefix(witness.clone(), t)?, opts)?;
        let detected = res.detected();
        values.push(res.value);
        results.push(res);
        if !detected {
            break;
        }
        t_max = t;
    }
    Ok(TScan { t: TValue::T(t_max), values, results })
}

/// Searches for a state with every single-factor partial transpose PSD and `tr(XW) < 0`.
pub fn find_local_ppt_violation(witness: &WitnessOperator, opts: &SolverOptions) -> Result<SolverResult> {
    let n = witness.dims().len();
    minimize_over_ppt_set(&PptProblem::new(witness.clone(), (0..n).map(|f| vec![f]).collect())?, opts)
}

/// Serialisable record of a detected (or attempted) violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub witness_id: String,
    pub dims: Vec<usize>,
    pub constraints: Vec<Vec<usize>>,
    pub value: f64,
    pub threshold: f64,
    pub detected: bool,
    #[serde(rename = "X")]
    pub x: ComplexRows,
    pub trace_error: f64,
    pub psd_residual: f64,
    pub residuals: Vec<f64>,
    pub seed: Option<u64>,
}

impl Certificate {
    pub fn new(problem: &PptProblem, result: &SolverResult, seed: Option<u64>) -> Self {
        Self {
            schema_version: CERTIFICATE_SCHEMA_VERSION,
            witness_id: problem.witness.id().to_string(),
            dims: problem.witness.dims().to_vec(),
            constraints: problem.transpose_sets.clone(),
            value: result.value,
            threshold: result.threshold(),
            detected: result.detected(),
            x: ComplexRows::from_matrix(result.x.entries()),
            trace_error: result.trace_error,
            psd_residual: result.psd_residual,
            residuals: result.residuals.clone(),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub check: PointCheck,
    pub threshold: f64,
    pub feasible: bool,
    pub detected: bool,
}

/// Recomputes everything in a certificate from the stored `X` and the given `W`.
pub fn verify_certificate(cert: &Certificate, w: &MultiOperator) -> Result<Verification> {
    if cert.dims != w.dims() {
        return Err(Error::DimensionMismatch(format!("certificate dims {:?}, witness dims {:?}", cert.dims, w.dims())));
    }
    let x = MultiOperator::new(cert.x.to_matrix()?, cert.dims.clone())?;
    x.ensure_hermitian()?;
    let check = evaluate_point(w, &x, &cert.constraints)?;
    let threshold = -DETECTION_RTOL * w.spectral_norm()?;
    let feasible = check.trace_error <= TRACE_TOL
        && check.psd_residual >= -FEASIBILITY_TOL
        && check.residuals.iter().all(|&r| r >= -FEASIBILITY_TOL);
    Ok(Verification { detected: feasible && check.value < threshold, check, threshold, feasible })
}
