//! Seeded sampling of random states and unitaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, CVector, MultiOperator, C64};

/// A reproducible random stream: the same `(seed, stream)` pair and call
/// sequence always yield bit-identical samples.
///
/// Parallel code gives every sample its own stream so results do not depend
/// on how work is split across threads.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard complex Gaussian, `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.gaussian() * s, self.gaussian() * s)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn ginibre_matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        // Explicit loop: fill order must not depend on nalgebra's storage layout.
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.complex_gaussian();
            }
        }
        m
    }
}

/// `GG†/tr(GG†)` with `G` square complex Gaussian.
pub fn ginibre_state(dims: &[usize], rng: &mut RandomSource) -> MultiOperator {
    let n: usize = dims.iter().product();
    let g = rng.ginibre_matrix(n, n);
    let mut rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho /= C64::new(tr, 0.0);
    MultiOperator::new(rho, dims.to_vec()).expect("dims match by construction")
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `diag(R)` removed.
pub fn haar_unitary(d: usize, rng: &mut RandomSource) -> MultiOperator {
    assert!(d >= 1, "unitary dimension must be positive");
    let z = rng.ginibre_matrix(d, d);
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    MultiOperator::new(u, vec![d]).expect("square by construction")
}

/// Uniformly random unit vector in `C^d`.
pub fn random_pure_vector(d: usize, rng: &mut RandomSource) -> CVector {
    let v = CVector::from_iterator(d, (0..d).map(|_| rng.complex_gaussian()));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Product of independent random pure states, one per factor.
pub fn random_pure_product(dims: &[usize], rng: &mut RandomSource) -> MultiOperator {
    let mut out: Option<MultiOperator> = None;
    for &d in dims {
        let v = random_pure_vector(d, rng);
        let p = MultiOperator::projector(&v, vec![d]).expect("single factor");
        out = Some(match out {
            None => p,
            Some(acc) => acc.tensor_product(&p),
        });
    }
    out.expect("at least one factor")
}

/// Random convex mixture of `terms` pure product states (a separable state).
pub fn random_separable_state(dims: &[usize], terms: usize, rng: &mut RandomSource) -> MultiOperator {
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.uniform() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let n: usize = dims.iter().product();
    let mut acc = MultiOperator::zeros(dims.to_vec());
    for w in weights {
        let p = random_pure_product(dims, rng);
        acc = &acc + &p.scale(w);
    }
    debug_assert_eq!(acc.dim(), n);
    acc
}

/// Random Hermitian operator with Gaussian entries (GUE-like, unnormalised).
pub fn random_hermitian(dims: &[usize], rng: &mut RandomSource) -> MultiOperator {
    let n: usize = dims.iter().product();
    let g = rng.ginibre_matrix(n, n);
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    MultiOperator::new(h, dims.to_vec()).expect("dims match by construction")
}

/// Random PSD matrix `GG†` of the given rank (not trace-normalised).
pub fn random_psd(d: usize, rank: usize, rng: &mut RandomSource) -> MultiOperator {
    let g = rng.ginibre_matrix(d, rank);
    MultiOperator::new(&g * g.adjoint(), vec![d]).expect("square by construction")
}
