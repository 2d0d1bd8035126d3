//! Euclidean projections onto the state set and the partial-transpose cones,
//! restricted to operators that are block diagonal under a torus symmetry.

use crate::linalg::{hermitian_eigen, CMatrix, MultiOperator, C64};

use super::symmetry::TorusSymmetry;

/// Precomputed index maps and block structures for one problem.
#[derive(Clone, Debug)]
pub(crate) struct Cones {
    dim: usize,
    state_blocks: Vec<Vec<usize>>,
    constraints: Vec<PtCone>,
}

#[derive(Clone, Debug)]
struct PtCone {
    /// Column-major flat map: `pt[k] = x[map[k]]`; an involution.
    map: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Cones {
    pub(crate) fn new(dims: &[usize], transpose_sets: &[Vec<usize>], symmetry: &TorusSymmetry) -> Self {
        let template = MultiOperator::zeros(dims.to_vec());
        let dim = template.dim();
        let n = dims.len();
        let state_blocks = symmetry.blocks(&vec![false; n]);
        let constraints = transpose_sets
            .iter()
            .map(|set| {
                let mut mask = vec![false; n];
                for &f in set {
                    mask[f] = true;
                }
                let (sel, rest) = template.transpose_split(&mask);
                let mut map = vec![0; dim * dim];
                for c in 0..dim {
                    for r in 0..dim {
                        let (sr, sc) = (rest[r] + sel[c], rest[c] + sel[r]);
                        map[r + c * dim] = sr + sc * dim;
                    }
                }
                PtCone { map, blocks: symmetry.blocks(&mask) }
            })
            .collect();
        Self { dim, state_blocks, constraints }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Zeroes every entry outside the state blocks (the torus twirl).
    pub(crate) fn twirl(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for b in &self.state_blocks {
            for &c in b {
                for &r in b {
                    out[(r, c)] = x[(r, c)];
                }
            }
        }
        out
    }

    pub(crate) fn partial_transpose(&self, i: usize, x: &CMatrix) -> CMatrix {
        let map = &self.constraints[i].map;
        let src = x.as_slice();
        CMatrix::from_iterator(self.dim, self.dim, map.iter().map(|&k| src[k]))
    }

    /// Nearest `X ⪰ 0` with `tr X = 1`.
    pub(crate) fn project_state(&self, y: &CMatrix) -> CMatrix {
        let eig: Vec<_> = self.state_blocks.iter().map(|b| hermitian_eigen(&extract(y, b))).collect();
        let all: Vec<f64> = eig.iter().flat_map(|e| e.values.iter().copied()).collect();
        let theta = simplex_shift(&all);
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (b, e) in self.state_blocks.iter().zip(&eig) {
            insert(&mut out, b, &e.reconstruct(|v| (v - theta).max(0.0)));
        }
        out
    }

    /// Nearest `X` with `X^{T_S} ⪰ 0` for constraint `i`.
    pub(crate) fn project_pt(&self, i: usize, y: &CMatrix) -> CMatrix {
        let pt = self.partial_transpose(i, y);
        let mut clipped = CMatrix::zeros(self.dim, self.dim);
        for b in &self.constraints[i].blocks {
            let e = hermitian_eigen(&extract(&pt, b));
            insert(&mut clipped, b, &e.reconstruct(|v| v.max(0.0)));
        }
        self.partial_transpose(i, &clipped)
    }

    /// Smallest eigenvalue of `X^{T_S}` computed blockwise.
    pub(crate) fn pt_min_eigenvalue(&self, i: usize, x: &CMatrix) -> f64 {
        let pt = self.partial_transpose(i, x);
        self.constraints[i]
            .blocks
            .iter()
            .map(|b| hermitian_eigen(&extract(&pt, b)).values[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn state_min_eigenvalue(&self, x: &CMatrix) -> f64 {
        self.state_blocks
            .iter()
            .map(|b| hermitian_eigen(&extract(x, b)).values[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Eigenpair of the smallest eigenvalue, computed blockwise.
    pub(crate) fn min_eigenpair(&self, w: &CMatrix) -> (f64, CMatrix) {
        let mut best = (f64::INFINITY, CMatrix::zeros(self.dim, self.dim));
        for b in &self.state_blocks {
            let e = hermitian_eigen(&extract(w, b));
            if e.values[0] < best.0 {
                let v = e.vectors.column(0);
                let mut full = CMatrix::zeros(self.dim, 1);
                for (j, &i) in b.iter().enumerate() {
                    full[(i, 0)] = v[j];
                }
                best = (e.values[0], &full * full.adjoint());
            }
        }
        best
    }
}

fn extract(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

fn insert(m: &mut CMatrix, idx: &[usize], block: &CMatrix) {
    for (c, &ic) in idx.iter().enumerate() {
        for (r, &ir) in idx.iter().enumerate() {
            m[(ir, ic)] = block[(r, c)];
        }
    }
}

/// `θ` such that `Σ max(v_i - θ, 0) = 1`.
fn simplex_shift(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    theta
}

pub(crate) fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::random::{random_hermitian, RandomSource};

    #[test]
    fn simplex_shift_examples() {
        assert!((simplex_shift(&[0.5, 0.5]) - 0.0).abs() < 1e-15);
        assert!((simplex_shift(&[2.0, 0.0]) - 1.0).abs() < 1e-15);
        let theta = simplex_shift(&[0.3, 0.9, -0.4, 0.2]);
        let total: f64 = [0.3, 0.9, -0.4, 0.2].iter().map(|v| (v - theta).max(0.0)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projections_match_dense_reference() {
        let mut rng = RandomSource::new(1);
        let dims = [2, 3];
        let cones = Cones::new(&dims, &[vec![0]], &TorusSymmetry::trivial(&dims));
        let y = random_hermitian(&dims, &mut rng);
        let x = cones.project_state(y.entries());
        let xo = MultiOperator::new(x.clone(), dims.to_vec()).unwrap();
        assert!((xo.trace().re - 1.0).abs() < 1e-12);
        assert!(xo.min_eigenvalue().unwrap() > -1e-12);

        let pt_dense = y.partial_transpose(&[0]).unwrap();
        assert!(max_abs_diff(&cones.partial_transpose(0, y.entries()), pt_dense.entries()) < 1e-15);
        let p = cones.project_pt(0, y.entries());
        let po = MultiOperator::new(p.clone(), dims.to_vec()).unwrap();
        assert!(po.partial_transpose(&[0]).unwrap().min_eigenvalue().unwrap() > -1e-12);
        // idempotent
        assert!(max_abs_diff(&cones.project_pt(0, &p), &p) < 1e-12);
    }
}
