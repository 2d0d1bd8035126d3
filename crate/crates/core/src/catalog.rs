//! Built-in immanant inequalities and the witnesses of the `k = 3` table.

use crate::error::{Error, Result};
use crate::symgroup::{ImmanantCoefficients, Partition};

/// A linear immanant inequality `Σ_λ a_λ imm_λ(G) >= 0` valid for every PSD `G`.
#[derive(Clone, Debug)]
pub struct Inequality {
    pub id: String,
    pub description: String,
    pub coeffs: ImmanantCoefficients,
}

/// Determinant positivity for `k = 2..4`, Hadamard's inequality for
/// `k = 2..4` and Schur's `imm_{2,1}/2 - det >= 0` at `k = 3`.
pub fn inequality_catalog() -> Vec<Inequality> {
    let mut out = Vec::new();
    for k in 2..=4 {
        out.push(Inequality {
            id: format!("det{k}"),
            description: format!("det(G) >= 0, {k}x{k}"),
            coeffs: ImmanantCoefficients::determinant(k).expect("k in range"),
        });
    }
    for k in 2..=4 {
        out.push(Inequality {
            id: format!("hadamard{k}"),
            description: format!("prod G_ii - det(G) >= 0, {k}x{k}"),
            coeffs: ImmanantCoefficients::hadamard(k).expect("k in range"),
        });
    }
    out.push(Inequality {
        id: "schur21".into(),
        description: "imm_[2,1](G)/2 - det(G) >= 0, 3x3".into(),
        coeffs: ImmanantCoefficients::from_pairs(
            3,
            &[(Partition::new(vec![2, 1]).expect("valid"), 0.5), (Partition::column(3), -1.0)],
        )
        .expect("valid"),
    });
    out
}

pub fn lookup_inequality(id: &str) -> Result<Inequality> {
    inequality_catalog()
        .into_iter()
        .find(|i| i.id == id)
        .ok_or_else(|| Error::Config(format!("unknown inequality {id:?}")))
}

/// One column of the `k = 3` witness table. Coefficients are meant for the
/// `a_λ / χ_λ(id)` weighting, so `W = Σ_λ (a_λ/χ_λ(id)) P_λ` equals `label`.
#[derive(Clone, Debug)]
pub struct TableWitness {
    pub id: &'static str,
    pub label: &'static str,
    pub coeffs: ImmanantCoefficients,
    /// Expected verdicts for `d = 2, 3, 4, 5`.
    pub expected: [TValue; 4],
}

/// Result of scanning prefix partial-transpose constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TValue {
    Psd,
    T(usize),
}

impl std::fmt::Display for TValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TValue::Psd => write!(f, "PSD"),
            TValue::T(t) => write!(f, "{t}"),
        }
    }
}

impl serde::Serialize for TValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn table2_witnesses() -> Vec<TableWitness> {
    let w = |id, label, a: [f64; 3], expected| TableWitness {
        id,
        label,
        coeffs: ImmanantCoefficients::new(3, a.to_vec()).expect("three partitions of 3"),
        expected,
    };
    use TValue::{Psd, T};
    vec![
        w("6P3-I", "3!P_[3] - I", [5.0, -2.0, -1.0], [T(1), T(1), T(1), T(1)]),
        w("P3-P21/4", "P_[3] - P_[2,1]/4", [1.0, -0.5, 0.0], [T(1), T(1), T(1), T(1)]),
        w("P21/4-P111", "P_[2,1]/4 - P_[1,1,1]", [0.0, 0.5, -1.0], [Psd, T(2), T(2), T(2)]),
        w("I-6P111", "I - 3!P_[1,1,1]", [1.0, 2.0, -5.0], [Psd, T(1), T(1), T(1)]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::random::{random_psd, RandomSource};

    #[test]
    fn catalog_inequalities_hold_on_random_gram_matrices() {
        let mut rng = RandomSource::new(11);
        for ineq in inequality_catalog() {
            let k = ineq.coeffs.k();
            for _ in 0..200 {
                let g: CMatrix = random_psd(k, k, &mut rng).into_entries();
                let v = ineq.coeffs.evaluate(&g).unwrap();
                let scale = (0..k).map(|i| g[(i, i)].re).product::<f64>();
                assert!(v.re >= -1e-10 * scale, "{} gave {v}", ineq.id);
                assert!(v.im.abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn catalog_ids_are_unique_and_resolvable() {
        let cat = inequality_catalog();
        assert_eq!(cat.len(), 7);
        for ineq in &cat {
            assert_eq!(lookup_inequality(&ineq.id).unwrap().coeffs, ineq.coeffs);
        }
        assert!(lookup_inequality("per-dominance").is_err());
    }
}
