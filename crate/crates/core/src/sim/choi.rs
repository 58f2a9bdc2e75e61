//! Choi-matrix comparison of two-qubit channels.

use nalgebra::{Matrix2 as NMatrix2, Matrix4};
use num_complex::Complex64 as C64;

use crate::circuit::GateKind;
use crate::ir::GateDecomposition;

use super::{two_qubit_matrix, Matrix2};

pub type Unitary4 = Matrix4<C64>;
type Choi = nalgebra::SMatrix<C64, 16, 16>;

/// 4x4 unitary of a two-qubit gate, basis index `a + 2*b`.
pub fn gate_unitary(kind: GateKind, angle: Option<f64>) -> Option<Unitary4> {
    let m = two_qubit_matrix(kind, angle)?;
    Some(Matrix4::from_fn(|r, c| m[r][c]))
}

fn to_na(m: &Matrix2) -> NMatrix2<C64> {
    NMatrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

fn unit(i: usize, j: usize) -> Unitary4 {
    let mut e = Unitary4::zeros();
    e[(i, j)] = C64::new(1.0, 0.0);
    e
}

fn choi_from(channel: impl Fn(&Unitary4) -> Unitary4) -> Choi {
    let mut out = Choi::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let block = channel(&unit(i, j));
            out.fixed_view_mut::<4, 4>(4 * i, 4 * j).copy_from(&block);
        }
    }
    out
}

pub fn choi_of_unitary(u: &Unitary4) -> Choi {
    choi_from(|rho| u * rho * u.adjoint())
}

pub fn choi_of_decomposition(d: &GateDecomposition) -> Choi {
    let terms: Vec<(f64, Unitary4)> = d
        .entries
        .iter()
        .flat_map(|e| {
            let ka = e.a.signed_kraus();
            let kb = e.b.signed_kraus();
            let coeff = e.coeff;
            ka.into_iter().flat_map(move |(sa, a)| {
                kb.clone()
                    .into_iter()
                    .map(move |(sb, b)| (coeff * sa * sb, to_na(&b).kronecker(&to_na(&a))))
            })
        })
        .collect();
    choi_from(|rho| {
        terms.iter().fold(Unitary4::zeros(), |acc, (w, k)| {
            acc + (k * rho * k.adjoint()) * C64::new(*w, 0.0)
        })
    })
}

/// Largest absolute entry difference between the Choi matrix of `gate` and
/// that of the weighted sum in `decomposition`.
pub fn choi_check(gate: &Unitary4, decomposition: &GateDecomposition) -> f64 {
    let diff = choi_of_unitary(gate) - choi_of_decomposition(decomposition);
    diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{DecompositionEntry, LocalAction};

    #[test]
    fn identity_decomposition_matches_identity() {
        let d = GateDecomposition {
            entries: vec![DecompositionEntry {
                a: LocalAction::Identity,
                b: LocalAction::Identity,
                coeff: 1.0,
            }],
        };
        assert_eq!(choi_check(&Unitary4::identity(), &d), 0.0);
    }

    #[test]
    fn derived_tables_reproduce_their_gates() {
        for (kind, angle) in [
            (GateKind::Cx, None),
            (GateKind::Cz, None),
            (GateKind::Rzz, Some(0.61)),
            (GateKind::Rzz, Some(-2.0)),
        ] {
            let d = GateDecomposition::for_gate(kind, angle).unwrap();
            let u = gate_unitary(kind, angle).unwrap();
            assert!(choi_check(&u, &d) <= 1e-12, "{kind}");
        }
    }

    #[test]
    fn perturbed_coefficient_is_detected() {
        let mut d = GateDecomposition::for_gate(GateKind::Cx, None).unwrap();
        d.entries[2].coeff += 0.01;
        let u = gate_unitary(GateKind::Cx, None).unwrap();
        assert!(choi_check(&u, &d) >= 1e-3);
    }

    #[test]
    fn swapped_sides_are_detected() {
        let mut d = GateDecomposition::for_gate(GateKind::Cx, None).unwrap();
        for e in &mut d.entries {
            std::mem::swap(&mut e.a, &mut e.b);
        }
        let u = gate_unitary(GateKind::Cx, None).unwrap();
        assert!(choi_check(&u, &d) > 0.1);
    }
}
