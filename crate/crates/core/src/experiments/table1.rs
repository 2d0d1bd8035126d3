//! Detection rates of the projector-filtered reduction map on random
//! bipartite states.

use crate::error::{Error, Result};
use crate::exec::try_map_indexed;
use crate::maps::{input_scale, Filter, FilteredMap, MapSpec};
use crate::linalg::MultiOperator;
use crate::random::{haar_unitary, RandomSource};

use super::{negative_output, ppt_violation, DetectionReport, ExperimentConfig, TrialRecord};

/// Criteria in report order, strongest first.
///
/// * `ppt`: `ρ^{T_A}` not PSD.
/// * `haar_pairs_ab`: `pairs_ab` after some local unitary `U_A ⊗ U_B`.
/// * `pairs_ab`: some coordinate-pair projector on `A` or on `B`.
/// * `p_ab`: `P = diag(1, 1, 0, …)` on `A` or on `B`.
/// * `p_a`: `P` on `A`.
/// * `reduction`: unfiltered reduction map on `A`.
pub const TABLE1_ROWS: [&str; 6] = ["ppt", "haar_pairs_ab", "pairs_ab", "p_ab", "p_a", "reduction"];

const CONTAINMENT: [(&str, &str, bool); 9] = [
    ("p_a", "p_ab", true),
    ("p_ab", "pairs_ab", true),
    ("pairs_ab", "haar_pairs_ab", true),
    ("haar_pairs_ab", "ppt", true),
    ("pairs_ab", "ppt", true),
    ("p_ab", "ppt", true),
    ("p_a", "ppt", true),
    ("reduction", "ppt", true),
    ("reduction", "pairs_ab", false),
];

struct Filters {
    reduction: FilteredMap,
    /// Pair projectors, `diag(1, 1, 0, …)` first.
    pairs: Vec<(FilteredMap, Filter)>,
}

impl Filters {
    fn new(d: usize) -> Result<Self> {
        let reduction = FilteredMap::new(&MapSpec::reduction(), d)?;
        let mut pairs = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let mut diag = vec![0.0; d];
                diag[i] = 1.0;
                diag[j] = 1.0;
                let filter = Filter::diagonal(&diag)?;
                pairs.push((reduction.refiltered(&filter)?, filter));
            }
        }
        Ok(Self { reduction, pairs })
    }

    fn check(&self, pair: usize, rho: &MultiOperator, side: usize) -> Result<(bool, f64)> {
        let (map, filter) = &self.pairs[pair];
        let out = map.apply_to_subsystems(rho, &[side])?;
        negative_output(&out, side_scale(filter, rho))
    }

    /// First pair/side that detects `rho`, scanning `A` then `B` per pair.
    fn any_pair(&self, rho: &MultiOperator, min: &mut f64) -> Result<bool> {
        for p in 0..self.pairs.len() {
            for side in 0..2 {
                let (hit, m) = self.check(p, rho, side)?;
                *min = min.min(m);
                if hit {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

fn side_scale(filter: &Filter, rho: &MultiOperator) -> f64 {
    let d = rho.dims()[0];
    input_scale(filter, &[], 2) * d as f64 * rho.max_abs()
}

fn local_unitaries(d: usize, rng: &mut RandomSource) -> MultiOperator {
    let ua = haar_unitary(d, rng);
    let ub = haar_unitary(d, rng);
    ua.tensor_product(&ub)
}

/// Six-row detection table for `N` states of two `d`-level systems.
///
/// Rows that combine several filters stop at the first one that detects.
/// The Haar row tries the untransformed state first, so it contains the
/// pair row by construction.
pub fn run_table1(config: &ExperimentConfig) -> Result<DetectionReport> {
    config.validate()?;
    let d = config.d;
    if !(2..=6).contains(&d) {
        return Err(Error::Unsupported(format!("table 1 needs 2 <= d <= 6, got {d}")));
    }
    let filters = Filters::new(d)?;
    let shared: Vec<MultiOperator> = if config.fresh_unitaries {
        Vec::new()
    } else {
        let mut rng = RandomSource::with_stream(config.seed, u64::MAX);
        (0..config.unitaries_per_state).map(|_| local_unitaries(d, &mut rng)).collect()
    };

    let trials = try_map_indexed(config.execution, config.n, |i| {
        let mut rng = config.rng(i);
        let rho = config.ensemble.sample(&[d, d], &mut rng);

        let ppt = ppt_violation(&rho)?;
        let reduction = negative_output(&filters.reduction.apply_to_subsystems(&rho, &[0])?, d as f64 * rho.max_abs())?;
        let p_a = filters.check(0, &rho, 0)?;

        let mut p_ab = p_a;
        if !p_ab.0 {
            let b = filters.check(0, &rho, 1)?;
            p_ab = (b.0, p_ab.1.min(b.1));
        }

        let mut pairs = p_ab;
        if !pairs.0 {
            pairs.0 = filters.any_pair(&rho, &mut pairs.1)?;
        }

        let mut haar = pairs;
        let mut u = 0;
        while !haar.0 && u < config.unitaries_per_state {
            let local = if config.fresh_unitaries { local_unitaries(d, &mut rng) } else { shared[u].clone() };
            let rotated = rho.conjugate_by(&local)?;
            haar.0 = filters.any_pair(&rotated, &mut haar.1)?;
            u += 1;
        }

        let rows = [ppt, haar, pairs, p_ab, p_a, reduction];
        Ok(TrialRecord {
            index: i,
            detected: rows.iter().map(|r| r.0).collect(),
            min_eigenvalues: rows.iter().map(|r| r.1).collect(),
        })
    })?;
    Ok(DetectionReport::from_trials(config, &TABLE1_ROWS, trials, &CONTAINMENT))
}
