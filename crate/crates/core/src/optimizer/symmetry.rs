//! Diagonal-torus symmetries of a witness and the block structure they induce.
//!
//! If `W` commutes with `D^{s_1} ⊗ … ⊗ D^{s_n}` for every diagonal unitary
//! `D` (with `D^{-1}` read as `D̄`), twirling over that torus maps feasible
//! points to feasible points with the same objective. The optimum may thus be
//! sought among block-diagonal `X`, blocks labelled by the charge
//! `Σ_f s_f e_{i_f} ∈ Z^d` of a basis index. Transposing the factors in `S`
//! flips the signs on `S`, which gives the block structure of `X^{T_S}`.

use std::collections::BTreeMap;

use crate::linalg::{index_digits, MultiOperator};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusSymmetry {
    dims: Vec<usize>,
    /// Each entry is one sign vector in `{+1, -1}^n`.
    sign_vectors: Vec<Vec<i32>>,
}

impl TorusSymmetry {
    /// No symmetry: every operator is a single block.
    pub fn trivial(dims: &[usize]) -> Self {
        Self { dims: dims.to_vec(), sign_vectors: Vec::new() }
    }

    /// Every sign vector (first sign fixed to `+1`) under which `w` is invariant.
    /// Only applies when all factors share one dimension.
    pub fn detect(w: &MultiOperator) -> Self {
        let dims = w.dims().to_vec();
        let n = dims.len();
        if n == 0 || dims.iter().any(|&x| x != dims[0]) || dims[0] < 2 {
            return Self::trivial(&dims);
        }
        let tol = 1e-12 * w.max_abs();
        let m = w.entries();
        let dim = w.dim();
        let mut nonzero = Vec::new();
        for c in 0..dim {
            for r in 0..dim {
                if m[(r, c)].norm() > tol {
                    nonzero.push((r, c));
                }
            }
        }
        let mut sign_vectors = Vec::new();
        for mask in 0..(1usize << (n - 1)) {
            let signs: Vec<i32> = (0..n).map(|f| if f > 0 && (mask >> (f - 1)) & 1 == 1 { -1 } else { 1 }).collect();
            let candidate = Self { dims: dims.clone(), sign_vectors: vec![signs.clone()] };
            let flip = vec![false; n];
            if nonzero.iter().all(|&(r, c)| candidate.charge(r, &flip) == candidate.charge(c, &flip)) {
                sign_vectors.push(signs);
            }
        }
        Self { dims, sign_vectors }
    }

    pub fn sign_vectors(&self) -> &[Vec<i32>] {
        &self.sign_vectors
    }

    pub fn is_trivial(&self) -> bool {
        self.sign_vectors.is_empty()
    }

    fn charge(&self, index: usize, flip: &[bool]) -> Vec<i32> {
        let digits = index_digits(index, &self.dims);
        let d = self.dims.first().copied().unwrap_or(1);
        let mut key = vec![0i32; d * self.sign_vectors.len()];
        for (v, signs) in self.sign_vectors.iter().enumerate() {
            for (f, &dg) in digits.iter().enumerate() {
                let s = if flip[f] { -signs[f] } else { signs[f] };
                key[v * d + dg] += s;
            }
        }
        key
    }

    /// Index blocks of an operator whose factors in `flip` have been transposed.
    /// Blocks and their members come out in ascending order.
    pub fn blocks(&self, flip: &[bool]) -> Vec<Vec<usize>> {
        let dim: usize = self.dims.iter().product();
        let mut groups: BTreeMap<Vec<i32>, Vec<usize>> = BTreeMap::new();
        for i in 0..dim {
            groups.entry(self.charge(i, flip)).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|b| b[0]);
        out
    }
}
