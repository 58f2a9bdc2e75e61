//! Plain quantum circuits: the input and output format of the toolchain.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The fixed gate set understood by every stage of the toolchain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Rx,
    Ry,
    Rz,
    Cx,
    Cz,
    Rzz,
    Measure,
    Reset,
    Barrier,
}

impl GateKind {
    pub const ALL: [GateKind; 15] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Rzz,
        GateKind::Measure,
        GateKind::Reset,
        GateKind::Barrier,
    ];

    /// Lower-case QASM mnemonic.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Rzz => "rzz",
            GateKind::Measure => "measure",
            GateKind::Reset => "reset",
            GateKind::Barrier => "barrier",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, GateKind::Cx | GateKind::Cz | GateKind::Rzz)
    }

    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rzz
        )
    }

    /// Single-qubit unitary gates.
    pub fn is_single_qubit_gate(self) -> bool {
        matches!(
            self,
            GateKind::H
                | GateKind::X
                | GateKind::Y
                | GateKind::Z
                | GateKind::S
                | GateKind::T
                | GateKind::Rx
                | GateKind::Ry
                | GateKind::Rz
        )
    }

    pub fn is_unitary(self) -> bool {
        self.is_single_qubit_gate() || self.is_two_qubit()
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One circuit operation.
///
/// `clbit` is only meaningful for [`GateKind::Measure`]: `Some(c)` records the
/// outcome into classical bit `c`, `None` marks a *signed* measurement whose
/// outcome multiplies the shot's contribution by `(-1)^outcome`. Signed
/// measurements only appear in instantiated fragment circuits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clbit: Option<usize>,
}

impl Instruction {
    pub fn gate(kind: GateKind, qubits: &[usize]) -> Self {
        Self {
            kind,
            qubits: qubits.to_vec(),
            angle: None,
            clbit: None,
        }
    }

    pub fn rotation(kind: GateKind, qubits: &[usize], angle: f64) -> Self {
        Self {
            kind,
            qubits: qubits.to_vec(),
            angle: Some(angle),
            clbit: None,
        }
    }

    pub fn h(q: usize) -> Self {
        Self::gate(GateKind::H, &[q])
    }
    pub fn x(q: usize) -> Self {
        Self::gate(GateKind::X, &[q])
    }
    pub fn y(q: usize) -> Self {
        Self::gate(GateKind::Y, &[q])
    }
    pub fn z(q: usize) -> Self {
        Self::gate(GateKind::Z, &[q])
    }
    pub fn s(q: usize) -> Self {
        Self::gate(GateKind::S, &[q])
    }
    pub fn t(q: usize) -> Self {
        Self::gate(GateKind::T, &[q])
    }
    pub fn rx(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Rx, &[q], angle)
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Ry, &[q], angle)
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Rz, &[q], angle)
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::gate(GateKind::Cx, &[control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::gate(GateKind::Cz, &[a, b])
    }
    pub fn rzz(a: usize, b: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Rzz, &[a, b], angle)
    }
    pub fn measure(q: usize, clbit: usize) -> Self {
        Self {
            kind: GateKind::Measure,
            qubits: vec![q],
            angle: None,
            clbit: Some(clbit),
        }
    }
    /// Measurement whose outcome only contributes a sign.
    pub fn signed_measure(q: usize) -> Self {
        Self {
            kind: GateKind::Measure,
            qubits: vec![q],
            angle: None,
            clbit: None,
        }
    }
    pub fn reset(q: usize) -> Self {
        Self::gate(GateKind::Reset, &[q])
    }
    pub fn barrier(qubits: &[usize]) -> Self {
        Self::gate(GateKind::Barrier, qubits)
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.is_two_qubit()
    }

    pub fn is_signed_measure(&self) -> bool {
        self.kind == GateKind::Measure && self.clbit.is_none()
    }

    /// Shape checks that do not depend on the enclosing circuit.
    pub fn validate_shape(&self) -> Result<()> {
        let arity_ok = match self.kind {
            k if k.is_two_qubit() => self.qubits.len() == 2 && self.qubits[0] != self.qubits[1],
            GateKind::Barrier => !self.qubits.is_empty(),
            _ => self.qubits.len() == 1,
        };
        if !arity_ok {
            return Err(Error::InvalidInstruction(format!(
                "`{}` applied to qubits {:?}",
                self.kind, self.qubits
            )));
        }
        if self.kind.is_parameterized() != self.angle.is_some() {
            return Err(Error::InvalidInstruction(format!(
                "`{}` angle presence mismatch",
                self.kind
            )));
        }
        if self.clbit.is_some() && self.kind != GateKind::Measure {
            return Err(Error::InvalidInstruction(format!(
                "`{}` cannot carry a classical target",
                self.kind
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(a) = self.angle {
            write!(f, "({a})")?;
        }
        write!(f, " {:?}", self.qubits)?;
        if let Some(c) = self.clbit {
            write!(f, " -> c[{c}]")?;
        }
        Ok(())
    }
}

/// A circuit on `num_qubits` qubits; list order is execution order.
///
/// When `num_clbits == 0` every qubit is implicitly measured at the end and
/// bit `i` of an outcome is qubit `i`. Otherwise outcomes are the classical
/// register written by recorded measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub num_qubits: usize,
    #[serde(default)]
    pub num_clbits: usize,
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            name: "circuit".to_string(),
            num_qubits,
            num_clbits: 0,
            instructions: Vec::new(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn push(&mut self, inst: Instruction) -> &mut Self {
        self.instructions.push(inst);
        self
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Number of output bits of a run of this circuit.
    pub fn num_output_bits(&self) -> usize {
        if self.num_clbits == 0 {
            self.num_qubits
        } else {
            self.num_clbits
        }
    }

    pub fn two_qubit_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| i.is_two_qubit())
            .count()
    }

    pub fn validate(&self) -> Result<()> {
        for inst in &self.instructions {
            inst.validate_shape()?;
            for &q in &inst.qubits {
                if q >= self.num_qubits {
                    return Err(Error::QubitOutOfRange {
                        index: q,
                        size: self.num_qubits,
                    });
                }
            }
            if let Some(c) = inst.clbit {
                if c >= self.num_clbits {
                    return Err(Error::ClbitOutOfRange {
                        index: c,
                        size: self.num_clbits,
                    });
                }
            }
        }
        Ok(())
    }

    /// Structural equality with angles compared up to `tol`.
    pub fn approx_eq(&self, other: &Circuit, tol: f64) -> bool {
        self.num_qubits == other.num_qubits
            && self.num_clbits == other.num_clbits
            && self.instructions.len() == other.instructions.len()
            && self
                .instructions
                .iter()
                .zip(&other.instructions)
                .all(|(a, b)| {
                    a.kind == b.kind
                        && a.qubits == b.qubits
                        && a.clbit == b.clbit
                        && match (a.angle, b.angle) {
                            (None, None) => true,
                            (Some(x), Some(y)) => (x - y).abs() <= tol,
                            _ => false,
                        }
                })
    }
}
