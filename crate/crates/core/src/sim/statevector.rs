use num_complex::Complex64 as C64;

use crate::circuit::{GateKind, Instruction};

pub type Matrix2 = [[C64; 2]; 2];

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// 2x2 matrix of a single-qubit gate. `RZ(t) = diag(e^{-it/2}, e^{it/2})`.
pub fn single_qubit_matrix(kind: GateKind, angle: Option<f64>) -> Option<Matrix2> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let t = angle.unwrap_or(0.0);
    let (ch, sh) = ((t / 2.0).cos(), (t / 2.0).sin());
    Some(match kind {
        GateKind::H => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::X => [[z, one], [one, z]],
        GateKind::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        GateKind::Z => [[one, z], [z, -one]],
        GateKind::S => [[one, z], [z, c(0.0, 1.0)]],
        GateKind::T => [
            [one, z],
            [z, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        ],
        GateKind::Rx => [[c(ch, 0.0), c(0.0, -sh)], [c(0.0, -sh), c(ch, 0.0)]],
        GateKind::Ry => [[c(ch, 0.0), c(-sh, 0.0)], [c(sh, 0.0), c(ch, 0.0)]],
        GateKind::Rz => [[c(ch, -sh), z], [z, c(ch, sh)]],
        _ => return None,
    })
}

/// 4x4 matrix of a two-qubit gate on `(a, b)`, basis index `a + 2*b`.
pub fn two_qubit_matrix(kind: GateKind, angle: Option<f64>) -> Option<[[C64; 4]; 4]> {
    let mut m = [[c(0.0, 0.0); 4]; 4];
    match kind {
        GateKind::Cx => {
            // control a (bit 0), target b (bit 1)
            m[0][0] = c(1.0, 0.0);
            m[2][2] = c(1.0, 0.0);
            m[3][1] = c(1.0, 0.0);
            m[1][3] = c(1.0, 0.0);
        }
        GateKind::Cz => {
            for i in 0..3 {
                m[i][i] = c(1.0, 0.0);
            }
            m[3][3] = c(-1.0, 0.0);
        }
        GateKind::Rzz => {
            let t = angle.unwrap_or(0.0);
            let even = C64::from_polar(1.0, -t / 2.0);
            let odd = C64::from_polar(1.0, t / 2.0);
            m[0][0] = even;
            m[3][3] = even;
            m[1][1] = odd;
            m[2][2] = odd;
        }
        _ => return None,
    }
    Some(m)
}

/// Dense statevector; qubit `q` is bit `q` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << num_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Self { num_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        assert!(amps.len().is_power_of_two());
        Self {
            num_qubits: amps.len().trailing_zeros() as usize,
            amps,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_matrix(&mut self, q: usize, m: &Matrix2) {
        let bit = 1usize << q;
        let n = self.amps.len();
        let mut base = 0;
        while base < n {
            for i in base..base + bit {
                let j = i | bit;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
            base += bit << 1;
        }
    }

    /// Apply a unitary instruction. Non-unitary kinds are ignored here; the
    /// callers handle measurement and reset.
    pub fn apply(&mut self, inst: &Instruction) {
        match inst.kind {
            GateKind::Cx => {
                let (cb, tb) = (1usize << inst.qubits[0], 1usize << inst.qubits[1]);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            GateKind::Cz => {
                let mask = (1usize << inst.qubits[0]) | (1usize << inst.qubits[1]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            GateKind::Rzz => {
                let t = inst.angle.unwrap_or(0.0);
                let even = C64::from_polar(1.0, -t / 2.0);
                let odd = C64::from_polar(1.0, t / 2.0);
                let (ab, bb) = (inst.qubits[0], inst.qubits[1]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    let parity = ((i >> ab) ^ (i >> bb)) & 1;
                    *a *= if parity == 0 { even } else { odd };
                }
            }
            kind => {
                if let Some(m) = single_qubit_matrix(kind, inst.angle) {
                    self.apply_matrix(inst.qubits[0], &m);
                }
            }
        }
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Project qubit `q` onto `outcome` and renormalise by `prob`.
    pub fn collapse(&mut self, q: usize, outcome: bool, prob: f64) {
        let bit = 1usize << q;
        let scale = 1.0 / prob.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) == outcome {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
    }

    /// Flip qubit `q` (used by reset after a `1` outcome).
    pub fn flip(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    /// `|<self|other>|`, i.e. overlap magnitude, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm()
    }
}
