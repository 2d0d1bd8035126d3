//! Projected subgradient descent, projecting onto the feasible intersection
//! with Dykstra's alternating projections.

use crate::linalg::{CMatrix, C64};

use super::cones::{frobenius, Cones};
use super::{Candidate, SolverOptions};

/// Dykstra's algorithm onto `{state} ∩ ⋂_i {X^{T_{S_i}} ⪰ 0}` starting from `y`.
fn project_intersection(cones: &Cones, y: &CMatrix, sweeps: usize, tol: f64) -> CMatrix {
    let dim = cones.dim();
    let m = cones.num_constraints();
    let mut x = y.clone();
    let mut incr = vec![CMatrix::zeros(dim, dim); m + 1];
    for _ in 0..sweeps {
        let start = x.clone();
        for j in 0..=m {
            let tmp = &x + &incr[j];
            let next = if j == 0 { cones.project_state(&tmp) } else { cones.project_pt(j - 1, &tmp) };
            incr[j] = &tmp - &next;
            x = next;
        }
        if frobenius(&(&x - &start)) < tol {
            break;
        }
    }
    x
}

pub(crate) fn solve(cones: &Cones, w: &CMatrix, opts: &SolverOptions) -> (Candidate, usize, bool) {
    let dim = cones.dim();
    let mut x = CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0);
    let mut best = Candidate::from_iterate(cones, w, &x);
    let mut iterations = 0;
    let mut converged = false;
    for it in 1..=opts.max_iter {
        iterations = it;
        let eta = 1.0 / (it as f64).sqrt();
        let y = cones.twirl(&(&x - w * C64::new(eta, 0.0)));
        let next = project_intersection(cones, &y, opts.dykstra_sweeps, opts.dykstra_tol);
        let step = frobenius(&(&next - &x));
        x = next;
        if it % opts.check_every == 0 {
            let cand = Candidate::from_iterate(cones, w, &x);
            if cand.value < best.value {
                best = cand;
            }
        }
        if step < opts.tol {
            converged = true;
            break;
        }
    }
    let cand = Candidate::from_iterate(cones, w, &x);
    if cand.value < best.value {
        best = cand;
    }
    (best, iterations, converged)
}
