//! Consensus ADMM for `min tr(XW)` over `X ⪰ 0, tr X = 1, X^{T_{S_i}} ⪰ 0`.
//!
//! One copy `X_0` carries the objective and the state constraint, one copy
//! `X_i` per partial-transpose cone; all are driven to a common `Z`.
//! The penalty is adapted by residual balancing.

use crate::linalg::{CMatrix, C64};

use super::cones::{frobenius, Cones};
use super::{Candidate, SolverOptions};

pub(crate) fn solve(cones: &Cones, w: &CMatrix, opts: &SolverOptions) -> (Candidate, usize, bool) {
    let dim = cones.dim();
    let m = cones.num_constraints();
    let mut z = CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0);
    let mut u: Vec<CMatrix> = vec![CMatrix::zeros(dim, dim); m + 1];
    let mut x: Vec<CMatrix> = vec![z.clone(); m + 1];
    let mut rho = opts.admm_rho * dim as f64;
    let mut best = Candidate::from_iterate(cones, w, &z);
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=opts.max_iter {
        iterations = it;
        x[0] = cones.project_state(&(&z - &u[0] - w / C64::new(rho, 0.0)));
        for i in 0..m {
            x[i + 1] = cones.project_pt(i, &(&z - &u[i + 1]));
        }
        let z_old = z;
        let mut acc = CMatrix::zeros(dim, dim);
        for (xi, ui) in x.iter().zip(&u) {
            acc += xi + ui;
        }
        z = cones.twirl(&((&acc + acc.adjoint()) / C64::new(2.0 * (m + 1) as f64, 0.0)));
        let mut r2 = 0.0;
        for (xi, ui) in x.iter().zip(u.iter_mut()) {
            let diff = xi - &z;
            r2 += frobenius(&diff).powi(2);
            *ui += diff;
        }
        let r = r2.sqrt();
        let s = rho * ((m + 1) as f64).sqrt() * frobenius(&(&z - &z_old));

        if it % opts.check_every == 0 {
            let cand = Candidate::from_iterate(cones, w, &x[0]);
            if cand.value < best.value {
                best = cand;
            }
        }
        if r < opts.tol && s < opts.tol {
            converged = true;
            break;
        }
        if it % 10 == 0 {
            let factor = if r > 10.0 * s {
                2.0
            } else if s > 10.0 * r {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                for ui in &mut u {
                    *ui /= C64::new(factor, 0.0);
                }
            }
        }
    }
    for cand in [Candidate::from_iterate(cones, w, &x[0]), Candidate::from_iterate(cones, w, &z)] {
        if cand.value < best.value {
            best = cand;
        }
    }
    (best, iterations, converged)
}
