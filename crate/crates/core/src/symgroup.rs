//! Combinatorics and representation theory of the symmetric group `S_k`
//! for `k <= 6`: partitions, characters, permutation operators on
//! `(C^d)^{⊗k}`, Young projectors and immanants.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{check_budget, index_digits, CMatrix, CVector, MultiOperator, C64};

pub const MAX_K: usize = 6;

/// A non-increasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("empty partition".into()));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not non-increasing")));
        }
        Ok(Self { parts })
    }

    /// The one-row partition `[k]`.
    pub fn row(k: usize) -> Self {
        Self { parts: vec![k] }
    }

    /// The one-column partition `[1^k]`.
    pub fn column(k: usize) -> Self {
        Self { parts: vec![1; k] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn rows(&self) -> usize {
        self.parts.len()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// Parses `"[2,1]"`, `"2,1"` or `"[2,1,0]"` (trailing zeros dropped).
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let mut parts = Vec::new();
        for tok in inner.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let v: usize = tok.parse().map_err(|_| Error::InvalidPartition(format!("cannot parse {s:?}")))?;
            parts.push(v);
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition::new(parts)
    }
}

fn check_k(k: usize) -> Result<()> {
    if (1..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("k = {k} outside 1..={MAX_K}")))
    }
}

/// All partitions of `k`, ordered so that at the first differing part the
/// larger one comes first: `[k]` first, `[1^k]` last.
pub fn partitions_of(k: usize) -> Result<Vec<Partition>> {
    check_k(k)?;
    fn rec(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        for p in (1..=remaining.min(max)).rev() {
            prefix.push(p);
            rec(remaining - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    Ok(out)
}

/// A permutation of `{0..k}` stored by images: `pi(i) = images[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &i in &images {
            if i >= k || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(k: usize) -> Self {
        Self { images: (0..k).collect() }
    }

    /// Transposition of `a` and `b` (0-based).
    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..k).collect();
        images.swap(a, b);
        Self { images }
    }

    pub fn k(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.k()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn cycles(&self) -> PermutationCycles {
        let k = self.k();
        let mut seen = vec![false; k];
        let mut cycles = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut j = self.images[start];
            while j != start {
                seen[j] = true;
                cycle.push(j);
                j = self.images[j];
            }
            cycles.push(cycle);
        }
        PermutationCycles { k, cycles }
    }

    pub fn cycle_type(&self) -> Partition {
        let mut lens: Vec<usize> = self.cycles().cycles.iter().map(Vec::len).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts: lens }
    }

    pub fn num_cycles(&self) -> usize {
        self.cycles().cycles.len()
    }

    pub fn sign(&self) -> i64 {
        if (self.k() - self.num_cycles()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All `k!` permutations in lexicographic order of their image vectors.
    pub fn all(k: usize) -> Vec<Permutation> {
        fn rec(k: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Permutation>) {
            if cur.len() == k {
                out.push(Permutation { images: cur.clone() });
                return;
            }
            for i in 0..k {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(k, used, cur, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(k, &mut vec![false; k], &mut Vec::with_capacity(k), &mut out);
        out
    }
}

/// Disjoint-cycle form, 0-based. Canonical order: each cycle starts at its
/// smallest element and cycles are sorted by that element, so the cycle
/// through 0 comes first and is led by 0. Fixed points are 1-cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationCycles {
    k: usize,
    cycles: Vec<Vec<usize>>,
}

impl PermutationCycles {
    /// Builds from arbitrary disjoint cycles; omitted points are fixed.
    pub fn from_cycles(k: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        let mut seen = vec![false; k];
        for cycle in cycles {
            for (pos, &a) in cycle.iter().enumerate() {
                if a >= k || seen[a] {
                    return Err(Error::InvalidPermutation(format!("cycles {cycles:?} are not disjoint in 0..{k}")));
                }
                seen[a] = true;
                images[a] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images }.cycles())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn to_permutation(&self) -> Permutation {
        let mut images: Vec<usize> = (0..self.k).collect();
        for cycle in &self.cycles {
            for (pos, &a) in cycle.iter().enumerate() {
                images[a] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Permutation { images }
    }
}

impl From<&PermutationCycles> for Permutation {
    fn from(c: &PermutationCycles) -> Self {
        c.to_permutation()
    }
}

/// Character table of `S_k`; `values[i][j] = χ_{λ_i}(class μ_j)` with both
/// indices running over [`partitions_of`] in canonical order.
#[derive(Debug)]
pub struct CharacterTable {
    pub partitions: Vec<Partition>,
    pub values: Vec<Vec<i64>>,
}

impl CharacterTable {
    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.partitions.iter().position(|q| q == p)
    }
}

/// Murnaghan–Nakayama on beta-sets: strip a rim hook of length `mu[0]`.
fn mn_character(lambda: &[usize], mu: &[usize], memo: &mut HashMap<(Vec<usize>, Vec<usize>), i64>) -> i64 {
    if mu.is_empty() {
        return i64::from(lambda.is_empty());
    }
    let key = (lambda.to_vec(), mu.to_vec());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let r = mu[0];
    let n = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &l)| l + n - 1 - i).collect();
    let mut total = 0;
    for (bi, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let crossed = beta.iter().filter(|&&c| c > target && c < b).count();
        let sign = if crossed % 2 == 0 { 1 } else { -1 };
        let mut next = beta.clone();
        next[bi] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let new_lambda: Vec<usize> = next
            .iter()
            .enumerate()
            .map(|(i, &x)| x - (n - 1 - i))
            .filter(|&p| p > 0)
            .collect();
        total += sign * mn_character(&new_lambda, &mu[1..], memo);
    }
    memo.insert(key, total);
    total
}

/// Cached character tables for every supported `k` (built once, then read-only).
pub fn character_table(k: usize) -> Result<&'static CharacterTable> {
    check_k(k)?;
    static TABLES: OnceLock<Vec<CharacterTable>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        let mut memo = HashMap::new();
        (1..=MAX_K)
            .map(|k| {
                let partitions = partitions_of(k).expect("k in range");
                let values = partitions
                    .iter()
                    .map(|l| partitions.iter().map(|m| mn_character(&l.parts, &m.parts, &mut memo)).collect())
                    .collect();
                CharacterTable { partitions, values }
            })
            .collect()
    });
    Ok(&tables[k - 1])
}

/// Irreducible character `χ_λ` on the class with the given cycle type.
pub fn character(lambda: &Partition, cycle_type: &Partition) -> Result<i64> {
    if lambda.k() != cycle_type.k() {
        return Err(Error::InvalidPartition(format!(
            "{lambda} and {cycle_type} partition different integers"
        )));
    }
    let table = character_table(lambda.k())?;
    let i = table.index_of(lambda).expect("valid partition is in the table");
    let j = table.index_of(cycle_type).expect("valid partition is in the table");
    Ok(table.values[i][j])
}

/// `χ_λ(id)`, the dimension of the irrep.
pub fn character_at_identity(lambda: &Partition) -> Result<i64> {
    character(lambda, &Partition::column(lambda.k()))
}

pub fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Output basis index of `η_d(π)` applied to every input basis index.
fn permutation_targets(pi: &Permutation, d: usize) -> Vec<usize> {
    let k = pi.k();
    let dims = vec![d; k];
    let n = d.pow(k as u32);
    (0..n)
        .map(|col| {
            let input = index_digits(col, &dims);
            // Input factor a lands in position pi(a).
            let mut out = vec![0; k];
            for (a, &digit) in input.iter().enumerate() {
                out[pi.apply(a)] = digit;
            }
            out.iter().fold(0, |acc, &x| acc * d + x)
        })
        .collect()
}

/// `η_d(π)`: maps `|i_1 … i_k⟩` to `|i_{π⁻¹(1)} … i_{π⁻¹(k)}⟩`.
pub fn permutation_operator(pi: &Permutation, d: usize) -> Result<MultiOperator> {
    let k = pi.k();
    let n = d.checked_pow(k as u32).ok_or(Error::SizeBudget { dim: usize::MAX, budget: crate::linalg::MAX_DIM })?;
    check_budget(n)?;
    let mut m = CMatrix::zeros(n, n);
    for (col, row) in permutation_targets(pi, d).into_iter().enumerate() {
        m[(row, col)] = C64::new(1.0, 0.0);
    }
    MultiOperator::new(m, vec![d; k])
}

/// Young projector `P_λ = (χ_λ(id)/k!) Σ_π χ_λ(π) η_d(π⁻¹)` on `(C^d)^{⊗k}`.
///
/// Vanishes (up to round-off) when `λ` has more than `d` rows; see
/// [`projector_vanishes`].
pub fn young_projector(lambda: &Partition, d: usize) -> Result<MultiOperator> {
    let k = lambda.k();
    check_k(k)?;
    let n = d.checked_pow(k as u32).ok_or(Error::SizeBudget { dim: usize::MAX, budget: crate::linalg::MAX_DIM })?;
    check_budget(n)?;
    let dim = character_at_identity(lambda)? as f64;
    let norm = dim / factorial(k) as f64;
    let mut m = CMatrix::zeros(n, n);
    for pi in Permutation::all(k) {
        let chi = character(lambda, &pi.cycle_type())?;
        if chi == 0 {
            continue;
        }
        let coeff = C64::new(norm * chi as f64, 0.0);
        for (col, row) in permutation_targets(&pi.inverse(), d).into_iter().enumerate() {
            m[(row, col)] += coeff;
        }
    }
    MultiOperator::new(m, vec![d; k])
}

/// Zero-projector check: every entry below `1e-12` in magnitude.
pub fn projector_vanishes(p: &MultiOperator) -> bool {
    p.max_abs() < 1e-12
}

/// `imm_λ(G) = Σ_π χ_λ(π) Π_i G_{i, π⁻¹(i)}`.
pub fn immanant_direct(lambda: &Partition, g: &CMatrix) -> Result<C64> {
    let k = lambda.k();
    if g.nrows() != k || g.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "{lambda} needs a {k}x{k} matrix, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    let mut total = C64::new(0.0, 0.0);
    for pi in Permutation::all(k) {
        let chi = character(lambda, &pi.cycle_type())?;
        if chi == 0 {
            continue;
        }
        let inv = pi.inverse();
        let prod = (0..k).fold(C64::new(1.0, 0.0), |acc, i| acc * g[(i, inv.apply(i))]);
        total += prod * chi as f64;
    }
    Ok(total)
}

/// Gram matrix `G_ij = ⟨v_i|v_j⟩`.
pub fn gram_matrix(vectors: &[CVector]) -> CMatrix {
    let k = vectors.len();
    CMatrix::from_fn(k, k, |i, j| vectors[i].dotc(&vectors[j]))
}

/// `(k!/χ_λ(id)) tr(P_λ |v_1⟩⟨v_1| ⊗ … ⊗ |v_k⟩⟨v_k|)`; agrees with
/// [`immanant_direct`] on the Gram matrix of the vectors.
pub fn immanant_via_projector(lambda: &Partition, vectors: &[CVector]) -> Result<C64> {
    let k = lambda.k();
    if vectors.len() != k {
        return Err(Error::DimensionMismatch(format!("{lambda} needs {k} vectors, got {}", vectors.len())));
    }
    let d = vectors[0].len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::DimensionMismatch("vectors have different lengths".into()));
    }
    let p = young_projector(lambda, d)?;
    let mut product = MultiOperator::projector(&vectors[0], vec![d])?;
    for v in &vectors[1..] {
        product = product.tensor_product(&MultiOperator::projector(v, vec![d])?);
    }
    let weight = factorial(k) as f64 / character_at_identity(lambda)? as f64;
    Ok(p.trace_product(&product)? * weight)
}

/// `Π_i G_ii − det G` for PSD `G`; nonnegative by Hadamard's inequality.
pub fn hadamard_gap(g: &CMatrix) -> Result<f64> {
    let op = MultiOperator::from_matrix(g.clone())?;
    op.ensure_psd()?;
    let diag: C64 = (0..g.nrows()).fold(C64::new(1.0, 0.0), |acc, i| acc * g[(i, i)]);
    Ok((diag - g.determinant()).re)
}

/// Real coefficient vector `(a_λ, …, a_ν)` over [`partitions_of`]`(k)` in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct ImmanantCoefficients {
    k: usize,
    coeffs: Vec<f64>,
}

impl ImmanantCoefficients {
    pub fn new(k: usize, coeffs: Vec<f64>) -> Result<Self> {
        let n = partitions_of(k)?.len();
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch(format!("k = {k} has {n} partitions, got {} coefficients", coeffs.len())));
        }
        Ok(Self { k, coeffs })
    }

    pub fn zeros(k: usize) -> Result<Self> {
        Self::new(k, vec![0.0; partitions_of(k)?.len()])
    }

    /// Coefficients given per partition; unspecified partitions get 0.
    pub fn from_pairs(k: usize, pairs: &[(Partition, f64)]) -> Result<Self> {
        let parts = partitions_of(k)?;
        let mut coeffs = vec![0.0; parts.len()];
        for (p, a) in pairs {
            let i = parts
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| Error::InvalidPartition(format!("{p} is not a partition of {k}")))?;
            coeffs[i] += a;
        }
        Ok(Self { k, coeffs })
    }

    /// `det(G) >= 0`.
    pub fn determinant(k: usize) -> Result<Self> {
        Self::from_pairs(k, &[(Partition::column(k), 1.0)])
    }

    /// `per(G)`; not an inequality by itself beyond `per >= 0`.
    pub fn permanent(k: usize) -> Result<Self> {
        Self::from_pairs(k, &[(Partition::row(k), 1.0)])
    }

    /// Hadamard: `Π G_ii − det G >= 0`, using `Π G_ii = Σ_λ χ_λ(id) imm_λ / k!`.
    pub fn hadamard(k: usize) -> Result<Self> {
        let table = character_table(k)?;
        let kf = factorial(k) as f64;
        let mut coeffs: Vec<f64> = table
            .partitions
            .iter()
            .map(|p| character_at_identity(p).map(|c| c as f64 / kf))
            .collect::<Result<_>>()?;
        let last = coeffs.len() - 1;
        coeffs[last] -= 1.0;
        Self::new(k, coeffs)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, p: &Partition) -> f64 {
        partitions_of(self.k)
            .ok()
            .and_then(|ps| ps.iter().position(|q| q == p))
            .map_or(0.0, |i| self.coeffs[i])
    }

    /// `(partition, coefficient)` pairs in canonical order.
    pub fn terms(&self) -> Vec<(Partition, f64)> {
        partitions_of(self.k).expect("validated k").into_iter().zip(self.coeffs.iter().copied()).collect()
    }

    /// `Σ_λ a_λ imm_λ(G)`.
    pub fn evaluate(&self, g: &CMatrix) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for (p, a) in self.terms() {
            if a != 0.0 {
                total += immanant_direct(&p, g)? * a;
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::random::{random_pure_vector, RandomSource};

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn partition_validation_and_parsing() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert_eq!("[2,1,0]".parse::<Partition>().unwrap(), p(&[2, 1]));
        assert_eq!("3".parse::<Partition>().unwrap(), p(&[3]));
        assert_eq!(p(&[2, 1]).to_string(), "[2,1]");
    }

    #[test]
    fn partition_order() {
        assert_eq!(partitions_of(1).unwrap(), vec![p(&[1])]);
        assert_eq!(partitions_of(2).unwrap(), vec![p(&[2]), p(&[1, 1])]);
        assert_eq!(partitions_of(3).unwrap(), vec![p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]);
        let p4 = partitions_of(4).unwrap();
        assert_eq!(p4, vec![p(&[4]), p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1]), p(&[1, 1, 1, 1])]);
        assert_eq!(partitions_of(6).unwrap().len(), 11);
        assert!(partitions_of(0).is_err());
        assert!(partitions_of(7).is_err());
    }

    #[test]
    fn characters_of_s3() {
        let std = p(&[2, 1]);
        assert_eq!(character(&std, &p(&[1, 1, 1])).unwrap(), 2);
        assert_eq!(character(&std, &p(&[2, 1])).unwrap(), 0);
        assert_eq!(character(&std, &p(&[3])).unwrap(), -1);
        assert!(character(&std, &p(&[2])).is_err());
    }

    #[test]
    fn sign_and_trivial_characters() {
        for k in 1..=6 {
            for pi in Permutation::all(k) {
                let ct = pi.cycle_type();
                assert_eq!(character(&Partition::column(k), &ct).unwrap(), pi.sign());
                assert_eq!(character(&Partition::row(k), &ct).unwrap(), 1);
            }
        }
    }

    #[test]
    fn irrep_dimensions_square_sum() {
        for k in 1..=6 {
            let sum: i64 = partitions_of(k)
                .unwrap()
                .iter()
                .map(|l| character_at_identity(l).unwrap().pow(2))
                .sum();
            assert_eq!(sum as u64, factorial(k));
        }
    }

    #[test]
    fn cycles_canonical_form() {
        let c = PermutationCycles::from_cycles(4, &[vec![2, 1], vec![3, 0]]).unwrap();
        assert_eq!(c.cycles(), &[vec![0, 3], vec![1, 2]]);
        assert_eq!(c.to_permutation().images(), &[3, 2, 1, 0]);
        assert!(PermutationCycles::from_cycles(3, &[vec![0, 1], vec![1, 2]]).is_err());
        let pi = Permutation::from_images(vec![1, 2, 0]).unwrap();
        assert_eq!(pi.cycles().cycles(), &[vec![0, 1, 2]]);
        assert_eq!(pi.cycle_type(), p(&[3]));
        assert_eq!(pi.compose(&pi.inverse()), Permutation::identity(3));
    }

    #[test]
    fn permutation_operator_swaps_qutrits() {
        let mut rng = RandomSource::new(1);
        let u = random_pure_vector(3, &mut rng);
        let w = random_pure_vector(3, &mut rng);
        let swap = permutation_operator(&Permutation::transposition(2, 0, 1), 3).unwrap();
        let uw = u.kronecker(&w);
        let wu = w.kronecker(&u);
        assert!(max_abs_diff(&(swap.entries() * uw), &wu) < 1e-14);
        let id = permutation_operator(&Permutation::identity(3), 2).unwrap();
        assert_eq!(id.entries(), &CMatrix::identity(8, 8));
    }

    #[test]
    fn permutation_operator_is_homomorphism() {
        let d = 2;
        for a in Permutation::all(3) {
            for b in Permutation::all(3) {
                let lhs = permutation_operator(&a, d).unwrap().compose(&permutation_operator(&b, d).unwrap()).unwrap();
                let rhs = permutation_operator(&a.compose(&b), d).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn permutation_operator_trace_counts_cycles() {
        // Fixed points of η_d(π) are assignments constant on each cycle.
        for d in 1..=3 {
            for pi in Permutation::all(4) {
                let tr = permutation_operator(&pi, d).unwrap().trace().re;
                assert_eq!(tr, (d as f64).powi(pi.num_cycles() as i32));
            }
        }
    }

    #[test]
    fn two_qubit_projectors() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi_minus = CVector::zeros(4);
        psi_minus[1] = C64::new(s, 0.0);
        psi_minus[2] = C64::new(-s, 0.0);
        let mut psi_plus = CVector::zeros(4);
        psi_plus[1] = C64::new(s, 0.0);
        psi_plus[2] = C64::new(s, 0.0);
        let singlet = &psi_minus * psi_minus.adjoint();
        let mut triplet = &psi_plus * psi_plus.adjoint();
        triplet[(0, 0)] += C64::new(1.0, 0.0);
        triplet[(3, 3)] += C64::new(1.0, 0.0);
        let p2 = young_projector(&p(&[2]), 2).unwrap();
        let p11 = young_projector(&p(&[1, 1]), 2).unwrap();
        assert!(max_abs_diff(p2.entries(), &triplet) < 1e-15);
        assert!(max_abs_diff(p11.entries(), &singlet) < 1e-15);
    }

    #[test]
    fn antisymmetrizer_vanishes_on_qubits() {
        let p111 = young_projector(&p(&[1, 1, 1]), 2).unwrap();
        assert!(projector_vanishes(&p111));
        assert_eq!(p111.max_abs(), 0.0);
        assert!(!projector_vanishes(&young_projector(&p(&[2, 1]), 2).unwrap()));
        for lambda in partitions_of(4).unwrap() {
            for d in 1..=3 {
                let vanishes = projector_vanishes(&young_projector(&lambda, d).unwrap());
                assert_eq!(vanishes, lambda.rows() > d, "{lambda} d={d}");
            }
        }
    }

    #[test]
    fn three_qutrit_projector_traces() {
        let traces: Vec<f64> = partitions_of(3)
            .unwrap()
            .iter()
            .map(|l| young_projector(l, 3).unwrap().trace().re)
            .collect();
        for (t, e) in traces.iter().zip([10.0, 16.0, 1.0]) {
            assert!((t - e).abs() < 1e-12);
        }
    }

    #[test]
    fn young_projector_rejects_oversized() {
        assert!(matches!(young_projector(&p(&[3, 2]), 4), Err(Error::SizeBudget { .. })));
    }

    #[test]
    fn immanant_examples() {
        let g = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(3.0, 0.0), C64::new(4.0, -1.0)]);
        let det = immanant_direct(&p(&[1, 1]), &g).unwrap();
        assert!((det - (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)])).norm() < 1e-14);
        let ones2 = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!((immanant_direct(&p(&[2]), &ones2).unwrap() - 2.0).norm() < 1e-14);
        let ones3 = CMatrix::from_element(3, 3, C64::new(1.0, 0.0));
        assert!(immanant_direct(&p(&[2, 1]), &ones3).unwrap().norm() < 1e-14);
        assert!(immanant_direct(&p(&[2, 1]), &ones2).is_err());
    }

    #[test]
    fn immanant_via_projector_examples() {
        let e0 = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let e1 = CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let det = immanant_via_projector(&p(&[1, 1]), &[e0.clone(), e1]).unwrap();
        assert!((det - 1.0).norm() < 1e-14);
        let zero = immanant_via_projector(&p(&[1, 1]), &[e0.clone(), e0.clone()]).unwrap();
        assert!(zero.norm() < 1e-14);
        assert!(immanant_via_projector(&p(&[1, 1]), &[e0]).is_err());

        let mut rng = RandomSource::new(5);
        let vs: Vec<CVector> = (0..3).map(|_| random_pure_vector(3, &mut rng)).collect();
        let lhs = immanant_via_projector(&p(&[2, 1]), &vs).unwrap();
        let rhs = immanant_direct(&p(&[2, 1]), &gram_matrix(&vs)).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1e-300));
    }

    #[test]
    fn hadamard_gap_examples() {
        let id = CMatrix::identity(3, 3);
        assert!(hadamard_gap(&id).unwrap().abs() < 1e-15);
        let diag = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(2.0, 0.0), C64::new(0.5, 0.0)]));
        assert!(hadamard_gap(&diag).unwrap().abs() < 1e-15);
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]));
        assert!(matches!(hadamard_gap(&neg), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn coefficient_vectors() {
        let h3 = ImmanantCoefficients::hadamard(3).unwrap();
        // (per + 2 imm21 + det)/6 − det
        let expected = [1.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0 - 1.0];
        for (a, b) in h3.coeffs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let det2 = ImmanantCoefficients::determinant(2).unwrap();
        assert_eq!(det2.coeffs(), &[0.0, 1.0]);
        assert!(ImmanantCoefficients::new(3, vec![1.0]).is_err());
        assert!(ImmanantCoefficients::from_pairs(3, &[(p(&[2]), 1.0)]).is_err());
    }
}
