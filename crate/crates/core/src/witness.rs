//! Witness operators from immanant inequalities and their contraction with a state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{check_budget, CMatrix, MultiOperator, C64};
use crate::maps::{filtered_kernel, MapSpec, Weighting};

/// How a witness was built.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    /// `E^{⊗n} Σ_λ w_λ a_λ P_λ` for the given spec.
    Immanant(MapSpec),
    /// `tr_S[(W_1 ⊗ … ⊗ W_n)(I ⊗ τ_S)]` over the last factor of each input.
    Contraction { parts: Vec<String>, tau: String },
    Custom(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// Has a negative eigenvalue, so it can detect entanglement.
    Witness,
    /// Positive semidefinite within tolerance.
    PositiveOperator,
}

/// A Hermitian operator whose expectation is nonnegative on the relevant separable states.
#[derive(Clone, Debug)]
pub struct WitnessOperator {
    id: String,
    op: MultiOperator,
    provenance: Provenance,
}

impl WitnessOperator {
    pub fn new(id: impl Into<String>, op: MultiOperator, provenance: Provenance) -> Result<Self> {
        op.ensure_hermitian()?;
        Ok(Self { id: id.into(), op: op.hermitian_part(), provenance })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn op(&self) -> &MultiOperator {
        &self.op
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn kind(&self) -> Result<WitnessKind> {
        Ok(if self.op.is_negative()? { WitnessKind::Witness } else { WitnessKind::PositiveOperator })
    }

    /// `tr(W ρ)`, real part.
    pub fn expectation(&self, rho: &MultiOperator) -> Result<f64> {
        Ok(self.op.trace_product(rho)?.re)
    }
}

/// `W = E^{⊗n} Σ_λ w_λ a_λ P_λ` on `(C^d)^{⊗n}`, with `w_λ = 1/χ_λ(id)` unless the spec overrides it.
pub fn build_witness(spec: &MapSpec, n_parties: usize, d: usize) -> Result<WitnessOperator> {
    if spec.k() != n_parties {
        return Err(Error::DimensionMismatch(format!("coefficients for k = {} but {n_parties} parties", spec.k())));
    }
    let op = filtered_kernel(spec, Weighting::InverseCharacter, Some(d))?;
    WitnessOperator::new(format!("immanant-k{n_parties}-d{d}"), op, Provenance::Immanant(spec.clone()))
}

/// `W_τ = tr_S[(W_1 ⊗ … ⊗ W_n)(I ⊗ τ_S)]` where `S` is the last factor of each `W_i`.
///
/// Each `W_i` acts on `k` factors of dimension `d` and `τ` on `n` such factors.
/// The result acts on `n(k - 1)` factors ordered block by block.
pub fn contract_witnesses(witnesses: &[WitnessOperator], tau: &MultiOperator) -> Result<WitnessOperator> {
    let n = witnesses.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("no witnesses to contract".into()));
    }
    let dims0 = witnesses[0].dims().to_vec();
    let k = dims0.len();
    let d = dims0[0];
    if k < 2 || dims0.iter().any(|&x| x != d) {
        return Err(Error::DimensionMismatch(format!("witness dims {dims0:?} must be at least two equal factors")));
    }
    if witnesses.iter().any(|w| w.dims() != dims0.as_slice()) {
        return Err(Error::DimensionMismatch("witnesses must share factor dimensions".into()));
    }
    if tau.dims() != vec![d; n].as_slice() {
        return Err(Error::DimensionMismatch(format!("tau dims {:?}, expected {:?}", tau.dims(), vec![d; n])));
    }
    let block = d.pow(k as u32 - 1);
    let out_dim = block.checked_pow(n as u32).unwrap_or(usize::MAX);
    check_budget(out_dim)?;

    // blocks[i][s * d + s'][x, x'] = W_i[(x, s), (x', s')]
    let blocks: Vec<Vec<CMatrix>> = witnesses
        .iter()
        .map(|w| {
            let m = w.op().entries();
            (0..d * d)
                .map(|ss| {
                    let (s, s2) = (ss / d, ss % d);
                    CMatrix::from_fn(block, block, |x, x2| m[(x * d + s, x2 * d + s2)])
                })
                .collect()
        })
        .collect();

    let digits = |mut idx: usize| {
        let mut out = vec![0; n];
        for f in (0..n).rev() {
            out[f] = idx % d;
            idx /= d;
        }
        out
    };
    let t = tau.entries();
    let mut acc = CMatrix::zeros(out_dim, out_dim);
    for s in 0..tau.dim() {
        let sd = digits(s);
        for s2 in 0..tau.dim() {
            let coeff = t[(s2, s)];
            if coeff == C64::new(0.0, 0.0) {
                continue;
            }
            let s2d = digits(s2);
            let mut kron = blocks[0][sd[0] * d + s2d[0]].clone();
            for i in 1..n {
                kron = kron.kronecker(&blocks[i][sd[i] * d + s2d[i]]);
            }
            acc += kron * coeff;
        }
    }
    let op = MultiOperator::new(acc, vec![d; n * (k - 1)])?;
    let parts = witnesses.iter().map(|w| w.id().to_string()).collect();
    WitnessOperator::new("contracted", op, Provenance::Contraction { parts, tau: format!("{:?}", tau.dims()) })
}
