//! Filtered multilinear maps built from immanant inequalities.
//!
//! A map of size `k` is represented by its kernel
//! `K = Σ_λ a_λ w_λ P_λ E^{⊗k}` on `(C^d)^{⊗k}`. It acts on `k - 1` inputs
//! through `Ψ(ϱ_1, …, ϱ_{k-1}) = tr_{1..k-1}[K (ϱ_1 ⊗ … ⊗ ϱ_{k-1} ⊗ I)]`,
//! and on subsystems of a larger operator by contracting the kernel against
//! the targeted factors and appending a fresh output factor last.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_budget, CMatrix, MultiOperator, C64};
use crate::symgroup::{character_at_identity, factorial, young_projector, ImmanantCoefficients, Partition};

/// Per-partition scalar multiplying `a_λ P_λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// `k!/χ_λ(id)`; the map normalisation and the default for maps.
    FactorialOverCharacter,
    /// `1/χ_λ(id)`; the witness normalisation and the default for witnesses.
    InverseCharacter,
    /// `1`.
    Plain,
}

impl Weighting {
    pub fn factor(self, lambda: &Partition) -> Result<f64> {
        let chi = character_at_identity(lambda)? as f64;
        Ok(match self {
            Weighting::FactorialOverCharacter => factorial(lambda.k()) as f64 / chi,
            Weighting::InverseCharacter => 1.0 / chi,
            Weighting::Plain => 1.0,
        })
    }
}

/// Local filter `E`: either the identity or a `d x d` PSD operator.
#[derive(Clone, Debug, PartialEq)]
pub enum Filter {
    Identity,
    Operator(MultiOperator),
}

impl Filter {
    /// Validates a single-factor PSD filter.
    pub fn operator(e: MultiOperator) -> Result<Self> {
        if e.num_factors() != 1 {
            return Err(Error::DimensionMismatch(format!("filter must act on one factor, got dims {:?}", e.dims())));
        }
        e.ensure_psd()?;
        Ok(Filter::Operator(e))
    }

    /// `diag(values)` as a filter.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::operator(MultiOperator::diagonal(vec![values.len()], values)?)
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Filter::Identity => None,
            Filter::Operator(e) => Some(e.dim()),
        }
    }
}

/// Coefficient vector, filter and normalisation of a map or witness.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub coeffs: ImmanantCoefficients,
    pub filter: Filter,
    /// `None` means the context default: [`Weighting::FactorialOverCharacter`]
    /// for maps and [`Weighting::InverseCharacter`] for witnesses.
    pub weighting: Option<Weighting>,
}

impl MapSpec {
    pub fn new(coeffs: ImmanantCoefficients, filter: Filter) -> Self {
        Self { coeffs, filter, weighting: None }
    }

    pub fn unfiltered(coeffs: ImmanantCoefficients) -> Self {
        Self::new(coeffs, Filter::Identity)
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = Some(weighting);
        self
    }

    pub fn with_filter(mut self, filter: Filter) -> Self {
        self.filter = filter;
        self
    }

    pub fn k(&self) -> usize {
        self.coeffs.k()
    }

    /// The `(0, 1)` map at `k = 2`, i.e. the determinant inequality.
    pub fn reduction() -> Self {
        Self::unfiltered(ImmanantCoefficients::determinant(2).expect("k = 2"))
    }

    fn resolve_dim(&self, d: Option<usize>) -> Result<usize> {
        match (self.filter.dim(), d) {
            (Some(e), Some(d)) if e != d => {
                Err(Error::DimensionMismatch(format!("filter is {e}x{e} but local dimension is {d}")))
            }
            (Some(e), _) => Ok(e),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::DimensionMismatch("local dimension unknown for identity filter".into())),
        }
    }
}

/// `Σ_λ a_λ w_λ P_λ` on `(C^d)^{⊗k}`; partitions with zero coefficient are skipped.
pub fn weighted_projector_sum(coeffs: &ImmanantCoefficients, weighting: Weighting, d: usize) -> Result<MultiOperator> {
    let k = coeffs.k();
    let n = d.checked_pow(k as u32).unwrap_or(usize::MAX);
    check_budget(n)?;
    let mut acc = CMatrix::zeros(n, n);
    for (lambda, a) in coeffs.terms() {
        if a == 0.0 || lambda.rows() > d {
            continue;
        }
        let w = weighting.factor(&lambda)?;
        acc += young_projector(&lambda, d)?.into_entries() * C64::new(a * w, 0.0);
    }
    MultiOperator::new(acc, vec![d; k])
}

/// Filtered kernel `(Σ_λ a_λ w_λ P_λ) E^{⊗k}` of a map or witness.
pub fn filtered_kernel(spec: &MapSpec, default: Weighting, d: Option<usize>) -> Result<MultiOperator> {
    let d = spec.resolve_dim(d)?;
    let base = weighted_projector_sum(&spec.coeffs, spec.weighting.unwrap_or(default), d)?;
    apply_filter(&base, &spec.filter)
}

fn apply_filter(base: &MultiOperator, filter: &Filter) -> Result<MultiOperator> {
    match filter {
        Filter::Identity => Ok(base.clone()),
        Filter::Operator(e) => base.compose(&e.tensor_power(base.num_factors())),
    }
}

/// A map with its kernel precomputed for a fixed local dimension.
#[derive(Clone, Debug)]
pub struct FilteredMap {
    k: usize,
    d: usize,
    base: MultiOperator,
    kernel: MultiOperator,
}

impl FilteredMap {
    pub fn new(spec: &MapSpec, d: usize) -> Result<Self> {
        let d = spec.resolve_dim(Some(d))?;
        let weighting = spec.weighting.unwrap_or(Weighting::FactorialOverCharacter);
        let base = weighted_projector_sum(&spec.coeffs, weighting, d)?;
        let kernel = apply_filter(&base, &spec.filter)?;
        Ok(Self { k: spec.k(), d, base, kernel })
    }

    /// Same coefficients with a different filter, reusing the projector sum.
    pub fn refiltered(&self, filter: &Filter) -> Result<Self> {
        if let Some(e) = filter.dim() {
            if e != self.d {
                return Err(Error::DimensionMismatch(format!("filter is {e}x{e}, map has d = {}", self.d)));
            }
        }
        Ok(Self { k: self.k, d: self.d, base: self.base.clone(), kernel: apply_filter(&self.base, filter)? })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kernel(&self) -> &MultiOperator {
        &self.kernel
    }

    /// `Ψ(ϱ_1, …, ϱ_{k-1})` for `d x d` PSD inputs.
    pub fn apply(&self, inputs: &[MultiOperator]) -> Result<MultiOperator> {
        if inputs.len() + 1 != self.k {
            return Err(Error::DimensionMismatch(format!("map of size {} takes {} inputs, got {}", self.k, self.k - 1, inputs.len())));
        }
        for x in inputs {
            if x.dims() != [self.d] {
                return Err(Error::DimensionMismatch(format!("input dims {:?}, expected [{}]", x.dims(), self.d)));
            }
            x.ensure_psd()?;
        }
        if inputs.is_empty() {
            return self.kernel.clone().with_dims(vec![self.d]);
        }
        let mut joint = inputs[0].clone();
        for x in &inputs[1..] {
            joint = joint.tensor_product(x);
        }
        let targets: Vec<usize> = (0..inputs.len()).collect();
        contract_kernel(&self.kernel, &joint, &targets)
    }

    /// `(Ψ ⊗ id)(ρ)`: targets are the input slots in order, the output factor is appended last.
    pub fn apply_to_subsystems(&self, rho: &MultiOperator, targets: &[usize]) -> Result<MultiOperator> {
        if targets.len() + 1 != self.k {
            return Err(Error::DimensionMismatch(format!(
                "map of size {} needs {} target factors, got {}",
                self.k,
                self.k - 1,
                targets.len()
            )));
        }
        contract_kernel(&self.kernel, rho, targets)
    }
}

/// Contracts the first `k - 1` factors of `kernel` against `targets` of `rho`.
///
/// `out[(r, o), (r', o')] = Σ_{a, b} K[(a, o), (b, o')] ρ[(b, r), (a, r')]`
/// with `ρ` reordered so that the targets come first; `r` runs over the
/// remaining factors in their original order.
pub(crate) fn contract_kernel(kernel: &MultiOperator, rho: &MultiOperator, targets: &[usize]) -> Result<MultiOperator> {
    let k = kernel.num_factors();
    let d = kernel.dims()[k - 1];
    if targets.len() + 1 != k {
        return Err(Error::DimensionMismatch(format!("{} targets for a kernel on {k} factors", targets.len())));
    }
    let m = rho.num_factors();
    let mut seen = vec![false; m];
    for (slot, &t) in targets.iter().enumerate() {
        if t >= m {
            return Err(Error::IndexOutOfRange { index: t, factors: m });
        }
        if seen[t] {
            return Err(Error::InvalidPermutation(format!("target factor {t} listed twice")));
        }
        seen[t] = true;
        if rho.dims()[t] != kernel.dims()[slot] {
            return Err(Error::DimensionMismatch(format!(
                "target factor {t} has dimension {}, map expects {}",
                rho.dims()[t],
                kernel.dims()[slot]
            )));
        }
    }
    let rest: Vec<usize> = (0..m).filter(|f| !seen[*f]).collect();
    let mut perm = targets.to_vec();
    perm.extend_from_slice(&rest);
    let rho_p = rho.permute_subsystems(&perm)?;
    let rest_dims: Vec<usize> = rest.iter().map(|&f| rho.dims()[f]).collect();
    let r_dim: usize = rest_dims.iter().product();
    let mut out_dims = rest_dims;
    out_dims.push(d);
    let n_out = r_dim * d;
    check_budget(n_out)?;

    let km = kernel.entries();
    let rm = rho_p.entries();
    let mut out = CMatrix::zeros(n_out, n_out);
    let ka = kernel.dim() / d;
    for a in 0..ka {
        for o in 0..d {
            for b in 0..ka {
                for o2 in 0..d {
                    let v = km[(a * d + o, b * d + o2)];
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for r2 in 0..r_dim {
                        let col = r2 * d + o2;
                        let src_col = a * r_dim + r2;
                        for r in 0..r_dim {
                            out[(r * d + o, col)] += v * rm[(b * r_dim + r, src_col)];
                        }
                    }
                }
            }
        }
    }
    MultiOperator::new(out, out_dims)
}

/// `‖E‖^k Π_i ‖ϱ_i‖` in max-abs norms: the natural size of a map output, used to
/// scale positivity tolerances when the output itself may vanish.
pub fn input_scale(filter: &Filter, inputs: &[MultiOperator], k: usize) -> f64 {
    let e = match filter {
        Filter::Identity => 1.0,
        Filter::Operator(e) => e.max_abs(),
    };
    let d = inputs.first().map_or(1, MultiOperator::dim) as f64;
    // identity-filter maps carry a factor of up to d from the traced slots
    e.powi(k as i32) * d * inputs.iter().map(MultiOperator::max_abs).product::<f64>()
}

/// `Ψ_ā^E(ϱ_1, …, ϱ_{k-1})` with the map normalisation unless the spec overrides it.
pub fn apply_filtered_map(spec: &MapSpec, inputs: &[MultiOperator]) -> Result<MultiOperator> {
    let d = inputs
        .first()
        .map(MultiOperator::dim)
        .or(spec.filter.dim())
        .ok_or_else(|| Error::DimensionMismatch("no inputs and identity filter: dimension unknown".into()))?;
    FilteredMap::new(spec, d)?.apply(inputs)
}

/// `(Ψ_ā^E ⊗ id)(ρ)` on the given target factors; the output factor is appended last.
pub fn apply_map_to_subsystem(spec: &MapSpec, rho: &MultiOperator, target_factors: &[usize]) -> Result<MultiOperator> {
    let d = match target_factors.first() {
        Some(&t) if t < rho.num_factors() => rho.dims()[t],
        Some(&t) => return Err(Error::IndexOutOfRange { index: t, factors: rho.num_factors() }),
        None => return Err(Error::DimensionMismatch("no target factors".into())),
    };
    FilteredMap::new(spec, d)?.apply_to_subsystems(rho, target_factors)
}

/// Determinant map of size `k` on the `A` halves of `ρ_AB^{⊗(k-1)}`.
///
/// Layout: copies are tensored as `A_1 B_1 A_2 B_2 …`; the `A_i` are the
/// map inputs and the result lives on `B_1 … B_{k-1} A_k`.
pub fn apply_multicopy_det_map(rho_ab: &MultiOperator, k: usize) -> Result<MultiOperator> {
    if rho_ab.num_factors() != 2 {
        return Err(Error::DimensionMismatch(format!("expected a bipartite operator, got dims {:?}", rho_ab.dims())));
    }
    if k < 2 {
        return Err(Error::Unsupported(format!("multicopy map needs k >= 2, got {k}")));
    }
    let (da, db) = (rho_ab.dims()[0], rho_ab.dims()[1]);
    let total = da
        .checked_pow(k as u32)
        .and_then(|x| x.checked_mul(db.checked_pow(k as u32 - 1)?))
        .unwrap_or(usize::MAX);
    check_budget(total.min(da.saturating_mul(rho_ab.dim().saturating_pow(k as u32 - 1))))?;
    let copies = rho_ab.tensor_power(k - 1);
    let targets: Vec<usize> = (0..k - 1).map(|c| 2 * c).collect();
    let map = FilteredMap::new(&MapSpec::unfiltered(ImmanantCoefficients::determinant(k)?), da)?;
    map.apply_to_subsystems(&copies, &targets)
}

/// `θ_τ = tr[(Ψ_1 ⊗ … ⊗ Ψ_n)(ρ^{⊗(k-1)}) τ]` for an `n`-party `ρ`.
///
/// Map `i` acts on party `i` of every copy; `τ` acts on the `n` outputs in party order.
pub fn multicopy_witness_value(specs: &[MapSpec], rho: &MultiOperator, tau: &MultiOperator) -> Result<f64> {
    let n = rho.num_factors();
    if specs.len() != n {
        return Err(Error::DimensionMismatch(format!("{} maps for {n} parties", specs.len())));
    }
    let k = specs[0].k();
    if specs.iter().any(|s| s.k() != k) {
        return Err(Error::DimensionMismatch("all maps must share the same k".into()));
    }
    if tau.dims() != rho.dims() {
        return Err(Error::DimensionMismatch(format!("tau dims {:?} differ from party dims {:?}", tau.dims(), rho.dims())));
    }
    let mut state = rho.tensor_power(k - 1);
    // labels[f] = (copy, party) for inputs, (usize::MAX, party) for outputs
    let mut labels: Vec<(usize, usize)> = (0..k - 1).flat_map(|c| (0..n).map(move |p| (c, p))).collect();
    for (party, spec) in specs.iter().enumerate() {
        let targets: Vec<usize> = (0..k - 1)
            .map(|c| labels.iter().position(|&l| l == (c, party)).expect("input still present"))
            .collect();
        state = apply_map_to_subsystem(spec, &state, &targets)?;
        labels = labels.into_iter().filter(|l| !(l.1 == party && l.0 != usize::MAX)).collect();
        labels.push((usize::MAX, party));
    }
    let order: Vec<usize> = (0..n)
        .map(|p| labels.iter().position(|&l| l == (usize::MAX, p)).expect("output present"))
        .collect();
    let out = state.permute_subsystems(&order)?;
    Ok(out.trace_product(tau)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::inequality_catalog;
    use crate::linalg::max_abs_diff;
    use crate::random::{ginibre_state, random_psd, random_pure_product, RandomSource};
    use proptest::prelude::*;

    fn reduction(rho: &MultiOperator) -> CMatrix {
        let d = rho.dim();
        CMatrix::identity(d, d) * rho.trace() - rho.entries()
    }

    fn coeffs2(a: f64, b: f64) -> ImmanantCoefficients {
        ImmanantCoefficients::new(2, vec![a, b]).unwrap()
    }

    #[test]
    fn determinant_map_is_reduction() {
        let mut rng = RandomSource::new(1);
        let rho = ginibre_state(&[3], &mut rng);
        let out = apply_filtered_map(&MapSpec::reduction(), &[rho.clone()]).unwrap();
        assert!(max_abs_diff(out.entries(), &reduction(&rho)) < 1e-14);
        let plain = apply_filtered_map(&MapSpec::reduction().with_weighting(Weighting::Plain), &[rho.clone()]).unwrap();
        assert!(max_abs_diff(plain.entries(), &(reduction(&rho) * C64::new(0.5, 0.0))) < 1e-14);
    }

    #[test]
    fn plus_minus_map_is_scaled_identity_channel() {
        // 2 P_[2] - 2 P_[1,1] = 2 SWAP, whose partial trace returns 2ρ.
        let mut rng = RandomSource::new(2);
        let rho = ginibre_state(&[2], &mut rng);
        let out = apply_filtered_map(&MapSpec::unfiltered(coeffs2(1.0, -1.0)), &[rho.clone()]).unwrap();
        assert!(max_abs_diff(out.entries(), &(rho.entries() * C64::new(2.0, 0.0))) < 1e-14);
    }

    #[test]
    fn projector_filter_matches_projected_reduction() {
        let mut rng = RandomSource::new(3);
        let p = Filter::diagonal(&[1.0, 1.0, 0.0]).unwrap();
        let pm = MultiOperator::diagonal(vec![3], &[1.0, 1.0, 0.0]).unwrap();
        for _ in 0..20 {
            let rho = ginibre_state(&[3], &mut rng);
            let out = apply_filtered_map(&MapSpec::reduction().with_filter(p.clone()), &[rho.clone()]).unwrap();
            let projected = rho.conjugate_by(&pm).unwrap();
            let expected = pm.entries() * reduction(&projected) * pm.entries();
            assert!(max_abs_diff(out.entries(), &expected) < 1e-13);
        }
    }

    #[test]
    fn input_validation() {
        let rho = MultiOperator::identity(vec![2]);
        let spec3 = MapSpec::unfiltered(ImmanantCoefficients::determinant(3).unwrap());
        assert!(matches!(apply_filtered_map(&spec3, &[rho.clone()]), Err(Error::DimensionMismatch(_))));
        let neg = MultiOperator::diagonal(vec![2], &[1.0, -1.0]).unwrap();
        assert!(matches!(apply_filtered_map(&MapSpec::reduction(), &[neg]), Err(Error::NotPsd { .. })));
        let filt = MapSpec::reduction().with_filter(Filter::diagonal(&[1.0, 1.0, 0.0]).unwrap());
        assert!(apply_filtered_map(&filt, &[rho]).is_err());
        assert!(Filter::diagonal(&[1.0, -0.5]).is_err());
    }

    #[test]
    fn reduction_on_one_side_of_maximally_entangled_qutrits() {
        let d = 3;
        let mut phi = crate::linalg::CVector::zeros(d * d);
        for i in 0..d {
            phi[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        let rho = MultiOperator::projector(&phi, vec![d, d]).unwrap();
        let out = apply_map_to_subsystem(&MapSpec::reduction(), &rho, &[0]).unwrap();
        assert_eq!(out.dims(), &[3, 3]);
        // I/3 - |φ+⟩⟨φ+|: eigenvalue 1/3 - 1 on φ+, 1/3 elsewhere.
        assert!((out.min_eigenvalue().unwrap() + 2.0 / 3.0).abs() < 1e-12);
        // The explicit form I ⊗ ρ_B - ρ with the output factor moved last.
        let explicit = MultiOperator::identity(vec![3]).tensor_product(&rho.partial_trace(&[1]).unwrap());
        let explicit = (&explicit - &rho).permute_subsystems(&[1, 0]).unwrap();
        assert!(max_abs_diff(out.entries(), explicit.entries()) < 1e-14);
    }

    #[test]
    fn subsystem_map_on_separable_state_is_psd() {
        let mut rng = RandomSource::new(4);
        for _ in 0..20 {
            let rho = crate::random::random_separable_state(&[3, 3], 4, &mut rng);
            let out = apply_map_to_subsystem(&MapSpec::reduction(), &rho, &[1]).unwrap();
            assert!(out.min_eigenvalue().unwrap() >= -1e-10 * out.max_abs());
        }
    }

    #[test]
    fn filtered_subsystem_map_agrees_with_projected_reduction() {
        let mut rng = RandomSource::new(5);
        let spec = MapSpec::reduction().with_filter(Filter::diagonal(&[1.0, 1.0, 0.0]).unwrap());
        let pa = MultiOperator::diagonal(vec![3, 3], &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        for _ in 0..50 {
            let rho = ginibre_state(&[3, 3], &mut rng);
            let out = apply_map_to_subsystem(&spec, &rho, &[0]).unwrap();
            let proj = rho.conjugate_by(&pa).unwrap();
            let explicit = &MultiOperator::identity(vec![3]).tensor_product(&proj.partial_trace(&[1]).unwrap()) - &proj;
            let v1 = out.is_negative().unwrap();
            let v2 = explicit.is_negative().unwrap();
            assert_eq!(v1, v2);
        }
    }

    #[test]
    fn multicopy_k2_is_reduction_criterion() {
        let mut rng = RandomSource::new(6);
        for _ in 0..10 {
            let rho = ginibre_state(&[3, 3], &mut rng);
            let two = apply_multicopy_det_map(&rho, 2).unwrap();
            let one = apply_map_to_subsystem(&MapSpec::reduction(), &rho, &[0]).unwrap();
            assert!(max_abs_diff(two.entries(), one.entries()) < 1e-14);
        }
    }

    #[test]
    fn multicopy_output_layout_and_detection() {
        let mut rng = RandomSource::new(7);
        let prod = ginibre_state(&[3], &mut rng).tensor_product(&ginibre_state(&[3], &mut rng));
        let out = apply_multicopy_det_map(&prod, 3).unwrap();
        assert_eq!(out.dims(), &[3, 3, 3]);
        assert!(out.min_eigenvalue().unwrap() >= -1e-10 * out.max_abs());

        let mut phi = crate::linalg::CVector::zeros(9);
        for i in 0..3 {
            phi[i * 3 + i] = C64::new(1.0 / 3f64.sqrt(), 0.0);
        }
        let rho = MultiOperator::projector(&phi, vec![3, 3]).unwrap();
        assert!(apply_multicopy_det_map(&rho, 3).unwrap().is_negative().unwrap());
        assert!(matches!(apply_multicopy_det_map(&rho, 4), Err(Error::SizeBudget { .. })));
    }

    #[test]
    fn purity_inequality_recovered() {
        let mut rng = RandomSource::new(8);
        let specs = [MapSpec::reduction(), MapSpec::unfiltered(coeffs2(1.0, -1.0))];
        for _ in 0..20 {
            let rho = ginibre_state(&[2, 3], &mut rng);
            let theta = multicopy_witness_value(&specs, &rho, &rho).unwrap();
            let rb = rho.partial_trace(&[1]).unwrap();
            let expected = 2.0 * (rb.trace_product(&rb).unwrap().re - rho.trace_product(&rho).unwrap().re);
            assert!((theta - expected).abs() < 1e-12);
        }
        let prod = random_pure_product(&[3, 3], &mut rng);
        assert!(multicopy_witness_value(&specs, &prod, &prod).unwrap().abs() < 1e-12);
    }

    /// `X tr[YX]tr[ZX] + XYXZX + XZXYX − XYX tr[ZX] − X tr[YXZX] − XZX tr[YX]`.
    fn expanded_det3(x: &CMatrix, y: &CMatrix, z: &CMatrix) -> CMatrix {
        let yx = (y * x).trace();
        let zx = (z * x).trace();
        let yxzx = (y * x * z * x).trace();
        x * yx * zx + x * y * x * z * x + x * z * x * y * x - x * y * x * zx - x * yxzx - x * z * x * yx
    }

    /// Ratio between the projector contraction and the expanded polynomial, measured
    /// once on a random instance and pinned here.
    const DET3_EXPANSION_CONSTANT: f64 = 1.0;

    fn fitted_ratio(out: &CMatrix, poly: &CMatrix) -> f64 {
        (poly.dotc(out) / poly.dotc(poly)).re
    }

    #[test]
    fn det3_expansion_constant_is_pinned() {
        let mut rng = RandomSource::new(99);
        let (x, y, z) = (random_psd(3, 3, &mut rng), random_psd(3, 3, &mut rng), random_psd(3, 3, &mut rng));
        let spec = MapSpec::unfiltered(ImmanantCoefficients::determinant(3).unwrap()).with_filter(Filter::operator(x.clone()).unwrap());
        let out = apply_filtered_map(&spec, &[y.clone(), z.clone()]).unwrap();
        let ratio = fitted_ratio(out.entries(), &expanded_det3(x.entries(), y.entries(), z.entries()));
        assert!((ratio - DET3_EXPANSION_CONSTANT).abs() < 1e-9, "ratio {ratio}");
    }

    #[test]
    fn det3_vanishes_on_qubits() {
        let mut rng = RandomSource::new(98);
        let spec = MapSpec::unfiltered(ImmanantCoefficients::determinant(3).unwrap());
        let out = apply_filtered_map(&spec, &[random_psd(2, 2, &mut rng), random_psd(2, 2, &mut rng)]).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn det3_map_matches_expanded_trace_polynomial() {
        let mut rng = RandomSource::new(9);
        let det3 = ImmanantCoefficients::determinant(3).unwrap();
        for d in [3, 4] {
            for _ in 0..30 {
                let x = random_psd(d, d, &mut rng);
                let y = random_psd(d, d, &mut rng);
                let z = random_psd(d, d, &mut rng);
                let spec = MapSpec::unfiltered(det3.clone()).with_filter(Filter::operator(x.clone()).unwrap());
                let out = apply_filtered_map(&spec, &[y.clone(), z.clone()]).unwrap();
                let expected = expanded_det3(x.entries(), y.entries(), z.entries()) * C64::new(DET3_EXPANSION_CONSTANT, 0.0);
                let scale = expected.iter().fold(0.0f64, |m, v| m.max(v.norm()));
                assert!(max_abs_diff(out.entries(), &expected) < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn det3_degenerate_cases() {
        let mut rng = RandomSource::new(10);
        let det3 = MapSpec::unfiltered(ImmanantCoefficients::determinant(3).unwrap());
        for d in [3, 4] {
            let id = CMatrix::identity(d, d);
            let x = random_psd(d, d, &mut rng);
            let y = random_psd(d, d, &mut rng);
            let z = random_psd(d, d, &mut rng);
            let ident = MultiOperator::identity(vec![d]);
            // Z = I
            let filt = det3.clone().with_filter(Filter::operator(x.clone()).unwrap());
            let out = apply_filtered_map(&filt, &[y.clone(), ident.clone()]).unwrap();
            let (xm, ym) = (x.entries(), y.entries());
            let x2 = xm * xm;
            let yx = (ym * xm).trace();
            let c2 = xm * yx * xm.trace() + xm * ym * &x2 + &x2 * ym * xm
                - xm * ym * xm * xm.trace()
                - xm * (ym * &x2).trace()
                - &x2 * yx;
            assert!(max_abs_diff(out.entries(), &c2) < 1e-9 * c2.norm());
            // X = I
            let out = apply_filtered_map(&det3, &[y.clone(), z.clone()]).unwrap();
            let zm = z.entries();
            let c3 = &id * ym.trace() * zm.trace() + ym * zm + zm * ym - ym * zm.trace() - &id * (ym * zm).trace() - zm * ym.trace();
            assert!(max_abs_diff(out.entries(), &c3) < 1e-9 * c3.norm());
            // X = Z = I
            let out = apply_filtered_map(&det3, &[y.clone(), ident]).unwrap();
            let red = (&id * ym.trace() - ym) * C64::new(d as f64 - 2.0, 0.0);
            assert!(max_abs_diff(out.entries(), &red) < 1e-9 * (1.0 + red.norm()));
        }
    }

    fn psd_strategy(d: usize) -> impl Strategy<Value = MultiOperator> {
        (any::<u64>(), 1..=d).prop_map(move |(seed, rank)| random_psd(d, rank, &mut RandomSource::new(seed)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn catalog_maps_are_positive(seed in any::<u64>(), d in 2usize..=3) {
            let mut rng = RandomSource::new(seed);
            for ineq in inequality_catalog().into_iter().filter(|i| i.coeffs.k() <= 3) {
                let e = random_psd(d, 1 + (rng.uniform() * d as f64) as usize % d, &mut rng);
                let spec = MapSpec::unfiltered(ineq.coeffs.clone()).with_filter(Filter::operator(e).unwrap());
                let inputs: Vec<_> = (1..ineq.coeffs.k()).map(|_| random_psd(d, d, &mut rng)).collect();
                let out = apply_filtered_map(&spec, &inputs).unwrap();
                prop_assert!(out.is_hermitian());
                let scale = input_scale(&spec.filter, &inputs, ineq.coeffs.k());
                prop_assert!(out.min_eigenvalue().unwrap() >= -1e-10 * scale, "{}", ineq.id);
            }
        }

        #[test]
        fn filter_covariance(e in psd_strategy(3), y in psd_strategy(3), z in psd_strategy(3)) {
            let coeffs = ImmanantCoefficients::hadamard(3).unwrap();
            let filtered = apply_filtered_map(&MapSpec::new(coeffs.clone(), Filter::operator(e.clone()).unwrap()), &[y.clone(), z.clone()]).unwrap();
            let s = e.psd_sqrt().unwrap();
            let yt = y.conjugate_by(&s).unwrap().hermitian_part();
            let zt = z.conjugate_by(&s).unwrap().hermitian_part();
            let inner = apply_filtered_map(&MapSpec::unfiltered(coeffs), &[yt, zt]).unwrap();
            let outer = inner.conjugate_by(&s).unwrap();
            prop_assert!(max_abs_diff(filtered.entries(), outer.entries()) < 1e-9 * (1.0 + filtered.max_abs()));
        }

        #[test]
        fn inputs_commute(seed in any::<u64>()) {
            let mut rng = RandomSource::new(seed);
            let spec = MapSpec::unfiltered(ImmanantCoefficients::determinant(4).unwrap())
                .with_filter(Filter::operator(random_psd(2, 2, &mut rng)).unwrap());
            let xs: Vec<_> = (0..3).map(|_| random_psd(2, 2, &mut rng)).collect();
            let base = apply_filtered_map(&spec, &xs).unwrap();
            for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
                let permuted: Vec<_> = perm.iter().map(|&i| xs[i].clone()).collect();
                let out = apply_filtered_map(&spec, &permuted).unwrap();
                prop_assert!(max_abs_diff(base.entries(), out.entries()) < 1e-10 * (1.0 + base.max_abs()));
            }
        }

        #[test]
        fn filter_scaling_preserves_verdict(seed in any::<u64>(), c in 0.01f64..100.0) {
            let mut rng = RandomSource::new(seed);
            let e = random_psd(3, 2, &mut rng);
            let rho = ginibre_state(&[3, 3], &mut rng);
            let spec = MapSpec::reduction().with_filter(Filter::operator(e.clone()).unwrap());
            let scaled = MapSpec::reduction().with_filter(Filter::operator(e.scale(c)).unwrap());
            let a = apply_map_to_subsystem(&spec, &rho, &[0]).unwrap();
            let b = apply_map_to_subsystem(&scaled, &rho, &[0]).unwrap();
            let expect = a.scale(c * c);
            prop_assert!(max_abs_diff(b.entries(), expect.entries()) < 1e-10 * (1.0 + expect.max_abs()));
            prop_assert_eq!(a.is_negative().unwrap(), b.is_negative().unwrap());
        }
    }
}
