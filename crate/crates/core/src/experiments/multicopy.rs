//! Single-copy reduction criterion against the two-copy determinant criterion.

use crate::error::{Error, Result};
use crate::exec::try_map_indexed;
use crate::maps::{apply_multicopy_det_map, FilteredMap, MapSpec};

use super::{negative_output, DetectionReport, ExperimentConfig, TrialRecord};

/// `single_copy`: reduction map on `A`. `two_copy`: size-3 determinant map on
/// `A_1 A_2` of `ρ ⊗ ρ`, output on `B_1 B_2 A_3`.
pub const MULTICOPY_ROWS: [&str; 2] = ["single_copy", "two_copy"];

pub fn run_multicopy(config: &ExperimentConfig) -> Result<DetectionReport> {
    config.validate()?;
    let d = config.d;
    if d < 2 {
        return Err(Error::Unsupported(format!("multicopy study needs d >= 2, got {d}")));
    }
    let reduction = FilteredMap::new(&MapSpec::reduction(), d)?;
    let trials = try_map_indexed(config.execution, config.n, |i| {
        let rho = config.ensemble.sample(&[d, d], &mut config.rng(i));
        let scale = d as f64 * rho.max_abs();
        let single = negative_output(&reduction.apply_to_subsystems(&rho, &[0])?, scale)?;
        let double = negative_output(&apply_multicopy_det_map(&rho, 3)?, scale * rho.max_abs())?;
        Ok(TrialRecord { index: i, detected: vec![single.0, double.0], min_eigenvalues: vec![single.1, double.1] })
    })?;
    Ok(DetectionReport::from_trials(config, &MULTICOPY_ROWS, trials, &[]))
}
