//! Quasi-probability decompositions of the virtualizable two-qubit gates.
//!
//! Each table is a list of six `(A_i, B_i, c_i)` triples with
//! `U ρ U† = Σ c_i (A_i ⊗ B_i)(ρ)`. `A_i` acts on the gate's first qubit
//! (the control of a CX), `B_i` on the second.
//!
//! The RZZ(θ) table follows from `U = cos(θ/2) I - i sin(θ/2) Z⊗Z`:
//! the cross term `i cos sin [ρ, Z⊗Z]` splits into a signed Z-measurement on
//! one side times the difference of `RZ(±π/2)` on the other. CZ is RZZ(-π/2)
//! followed by `RZ(π/2)` on both qubits, and CX is CZ conjugated by H on the
//! target, which turns the target-side Z-measurement into an X-measurement.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::circuit::{GateKind, Instruction};
use crate::error::{Error, Result};
use crate::sim::{single_qubit_matrix, Matrix2};

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Z,
    X,
}

/// What a placeholder turns into for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum LocalAction {
    Identity,
    Gate {
        kind: GateKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        angle: Option<f64>,
    },
    /// Projective measurement; the ±1 eigenvalue multiplies the instance result.
    Measure {
        basis: Basis,
    },
}

impl LocalAction {
    pub fn gate(kind: GateKind) -> Self {
        LocalAction::Gate { kind, angle: None }
    }

    pub fn rotation(kind: GateKind, angle: f64) -> Self {
        LocalAction::Gate {
            kind,
            angle: Some(angle),
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, LocalAction::Measure { .. })
    }

    /// Concrete instructions realising this action on `qubit`.
    pub fn instructions(&self, qubit: usize) -> Vec<Instruction> {
        match self {
            LocalAction::Identity => Vec::new(),
            LocalAction::Gate { kind, angle } => {
                vec![Instruction {
                    kind: *kind,
                    qubits: vec![qubit],
                    angle: *angle,
                    clbit: None,
                }]
            }
            LocalAction::Measure { basis: Basis::Z } => vec![Instruction::signed_measure(qubit)],
            LocalAction::Measure { basis: Basis::X } => vec![
                Instruction::h(qubit),
                Instruction::signed_measure(qubit),
                Instruction::h(qubit),
            ],
        }
    }

    /// `(sign, K)` pairs with `E(ρ) = Σ sign · K ρ K†`.
    pub fn signed_kraus(&self) -> Vec<(f64, Matrix2)> {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let half = C64::new(0.5, 0.0);
        match self {
            LocalAction::Identity => vec![(1.0, [[one, z], [z, one]])],
            LocalAction::Gate { kind, angle } => {
                vec![(
                    1.0,
                    single_qubit_matrix(*kind, *angle).expect("single-qubit gate"),
                )]
            }
            LocalAction::Measure { basis: Basis::Z } => {
                vec![(1.0, [[one, z], [z, z]]), (-1.0, [[z, z], [z, one]])]
            }
            LocalAction::Measure { basis: Basis::X } => {
                vec![
                    (1.0, [[half, half], [half, half]]),
                    (-1.0, [[half, -half], [-half, half]]),
                ]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionEntry {
    pub a: LocalAction,
    pub b: LocalAction,
    pub coeff: f64,
}

/// The six weighted local instances replacing one two-qubit gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateDecomposition {
    pub entries: Vec<DecompositionEntry>,
}

impl GateDecomposition {
    pub const SIZE: usize = 6;

    pub fn for_gate(kind: GateKind, angle: Option<f64>) -> Result<Self> {
        match kind {
            GateKind::Rzz => {
                let theta = angle
                    .ok_or_else(|| Error::InvalidInstruction("rzz without an angle".into()))?;
                Ok(rzz_table(theta))
            }
            GateKind::Cz => Ok(cz_table()),
            GateKind::Cx => Ok(cx_table()),
            other => Err(Error::InvalidInstruction(format!(
                "`{other}` cannot be virtualized"
            ))),
        }
    }

    pub fn coefficients(&self) -> [f64; 6] {
        let mut c = [0.0; 6];
        for (slot, e) in c.iter_mut().zip(&self.entries) {
            *slot = e.coeff;
        }
        c
    }

    /// Sampling overhead `Σ |c_i|`.
    pub fn kappa(&self) -> f64 {
        self.entries.iter().map(|e| e.coeff.abs()).sum()
    }
}

fn entry(a: LocalAction, b: LocalAction, coeff: f64) -> DecompositionEntry {
    DecompositionEntry { a, b, coeff }
}

fn rzz_table(theta: f64) -> GateDecomposition {
    use LocalAction as L;
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let cross = theta.sin() / 2.0;
    let mz = L::Measure { basis: Basis::Z };
    GateDecomposition {
        entries: vec![
            entry(L::Identity, L::Identity, c * c),
            entry(L::gate(GateKind::Z), L::gate(GateKind::Z), s * s),
            entry(mz.clone(), L::rotation(GateKind::Rz, FRAC_PI_2), cross),
            entry(mz.clone(), L::rotation(GateKind::Rz, -FRAC_PI_2), -cross),
            entry(L::rotation(GateKind::Rz, FRAC_PI_2), mz.clone(), cross),
            entry(L::rotation(GateKind::Rz, -FRAC_PI_2), mz, -cross),
        ],
    }
}

fn cz_table() -> GateDecomposition {
    use LocalAction as L;
    let mz = L::Measure { basis: Basis::Z };
    GateDecomposition {
        entries: vec![
            entry(
                L::rotation(GateKind::Rz, FRAC_PI_2),
                L::rotation(GateKind::Rz, FRAC_PI_2),
                0.5,
            ),
            entry(
                L::rotation(GateKind::Rz, -FRAC_PI_2),
                L::rotation(GateKind::Rz, -FRAC_PI_2),
                0.5,
            ),
            entry(mz.clone(), L::gate(GateKind::Z), -0.5),
            entry(mz.clone(), L::Identity, 0.5),
            entry(L::gate(GateKind::Z), mz.clone(), -0.5),
            entry(L::Identity, mz, 0.5),
        ],
    }
}

fn cx_table() -> GateDecomposition {
    use LocalAction as L;
    let mz = L::Measure { basis: Basis::Z };
    let mx = L::Measure { basis: Basis::X };
    GateDecomposition {
        entries: vec![
            entry(
                L::rotation(GateKind::Rz, FRAC_PI_2),
                L::rotation(GateKind::Rx, FRAC_PI_2),
                0.5,
            ),
            entry(
                L::rotation(GateKind::Rz, -FRAC_PI_2),
                L::rotation(GateKind::Rx, -FRAC_PI_2),
                0.5,
            ),
            entry(mz.clone(), L::gate(GateKind::X), -0.5),
            entry(mz, L::Identity, 0.5),
            entry(L::gate(GateKind::Z), mx.clone(), -0.5),
            entry(L::Identity, mx, 0.5),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_table_has_six_entries_summing_to_one() {
        for (kind, angle) in [
            (GateKind::Cx, None),
            (GateKind::Cz, None),
            (GateKind::Rzz, Some(0.3)),
            (GateKind::Rzz, Some(std::f64::consts::PI)),
        ] {
            let d = GateDecomposition::for_gate(kind, angle).unwrap();
            assert_eq!(d.entries.len(), GateDecomposition::SIZE);
            assert!((d.coefficients().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cx_overhead_is_three() {
        let d = GateDecomposition::for_gate(GateKind::Cx, None).unwrap();
        assert!((d.kappa() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_gates_are_not_virtualizable() {
        assert!(GateDecomposition::for_gate(GateKind::H, None).is_err());
    }

    #[test]
    fn x_measurement_expands_to_basis_change() {
        let ops = LocalAction::Measure { basis: Basis::X }.instructions(3);
        assert_eq!(ops.len(), 3);
        assert!(ops[1].is_signed_measure());
    }
}
