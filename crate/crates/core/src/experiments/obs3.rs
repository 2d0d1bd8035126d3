//! Four-qutrit witness from contracting `P_[2,1]/4 - P_[1,1,1]` with the
//! antisymmetrizer through a maximally entangled `τ`, and a locally PPT state
//! it detects.

use serde::Serialize;

use crate::error::Result;
use crate::exec::map_indexed;
use crate::linalg::{CVector, MultiOperator, C64};
use crate::maps::MapSpec;
use crate::optimizer::{find_local_ppt_violation, verify_certificate, Certificate, PptProblem, SolverOptions, Verification};
use crate::random::random_pure_product;
use crate::symgroup::ImmanantCoefficients;
use crate::witness::{build_witness, contract_witnesses, WitnessOperator};

use super::{ExperimentConfig, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductCheck {
    pub samples: usize,
    pub seed: u64,
    pub min_value: f64,
}

/// The same contraction with `τ = I/9`, evaluated on the certificate state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximallyMixedCheck {
    pub value: f64,
    pub min_eigenvalue: f64,
    pub psd: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Obs3Report {
    pub schema_version: u32,
    pub witness_min_eigenvalue: f64,
    pub certificate: Certificate,
    pub verification: Verification,
    pub product_states: ProductCheck,
    pub maximally_mixed: MaximallyMixedCheck,
}

impl Obs3Report {
    pub fn detected(&self) -> bool {
        self.certificate.detected && self.verification.detected
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn phi_plus(d: usize) -> MultiOperator {
    let mut v = CVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    MultiOperator::projector(&v, vec![d, d]).expect("d*d vector")
}

/// `W_τ` on `A_1 A_2 B_1 B_2`, with `W = P_[2,1]/4 - P_[1,1,1]` on `A_1 A_2 S_A`
/// and `P_[1,1,1]` on `B_1 B_2 S_B`, contracted with `τ` on `S_A S_B`.
pub fn obs3_witness(tau: &MultiOperator) -> Result<WitnessOperator> {
    let w = build_witness(&MapSpec::unfiltered(ImmanantCoefficients::new(3, vec![0.0, 0.5, -1.0])?), 3, 3)?;
    let m = build_witness(&MapSpec::unfiltered(ImmanantCoefficients::new(3, vec![0.0, 0.0, 1.0])?), 3, 3)?;
    contract_witnesses(&[w, m], tau)
}

pub fn run_obs3_certificate(config: &ExperimentConfig, opts: &SolverOptions) -> Result<Obs3Report> {
    config.validate()?;
    let w = obs3_witness(&phi_plus(3))?;
    let result = find_local_ppt_violation(&w, opts)?;
    let problem = PptProblem::new(w.clone(), (0..4).map(|f| vec![f]).collect())?;
    let certificate = Certificate::new(&problem, &result, Some(config.seed));
    let verification = verify_certificate(&certificate, w.op())?;

    let values = map_indexed(config.execution, config.n, |i| {
        let p = random_pure_product(&[3; 4], &mut config.rng(i));
        w.expectation(&p)
    });
    let min_value = values.into_iter().collect::<Result<Vec<f64>>>()?.into_iter().fold(f64::INFINITY, f64::min);

    let mixed = obs3_witness(&MultiOperator::identity(vec![3, 3]).scale(1.0 / 9.0))?;
    let mixed_min = mixed.op().min_eigenvalue()?;
    Ok(Obs3Report {
        schema_version: SCHEMA_VERSION,
        witness_min_eigenvalue: w.op().min_eigenvalue()?,
        certificate,
        verification,
        product_states: ProductCheck { samples: config.n, seed: config.seed, min_value },
        maximally_mixed: MaximallyMixedCheck {
            value: mixed.expectation(&result.x)?,
            min_eigenvalue: mixed_min,
            psd: !mixed.op().is_negative()?,
        },
    })
}
