//! Benchmark circuit generators and the experiment harness.

mod experiment;
mod instances;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};

pub use experiment::{
    default_fleet, run_experiment, CaseTiming, ExperimentConfig, ExperimentReport, PassSetup,
    ReportRow,
};
pub use instances::{dependency_example, two_cluster_example};

/// Benchmark families. Parameterised families carry their layer count or
/// graph degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Ghz,
    WState,
    /// Bernstein-Vazirani with a seeded hidden string.
    Bv,
    /// Trotterised transverse-field Ising chain, `steps` Trotter steps.
    Hs {
        steps: usize,
    },
    /// Two-local RY ansatz with circular CX entanglement.
    Tl {
        layers: usize,
    },
    /// Real-amplitudes ansatz with linear CX entanglement.
    Vqe {
        layers: usize,
    },
    /// One QAOA layer on a random `degree`-regular graph.
    QaoaRegular {
        degree: usize,
    },
    /// One QAOA layer on a barbell graph.
    QaoaBarbell,
    /// Random layers of single-qubit rotations and disjoint two-qubit gates.
    Random {
        layers: usize,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Ghz => write!(f, "ghz"),
            Family::WState => write!(f, "wstate"),
            Family::Bv => write!(f, "bv"),
            Family::Hs { steps } => write!(f, "hs-{steps}"),
            Family::Tl { layers } => write!(f, "tl-{layers}"),
            Family::Vqe { layers } => write!(f, "vqe-{layers}"),
            Family::QaoaRegular { degree } => write!(f, "qaoa-{degree}"),
            Family::QaoaBarbell => write!(f, "qaoa-b"),
            Family::Random { layers } => write!(f, "random-{layers}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let unknown = || Error::UnknownFamily(s.to_string());
        let (head, param) = match lower.rsplit_once('-') {
            Some((h, p)) if p.chars().all(|c| c.is_ascii_digit()) && !p.is_empty() => {
                (h, Some(p.parse::<usize>().map_err(|_| unknown())?))
            }
            _ => (lower.as_str(), None),
        };
        let need = |p: Option<usize>| p.ok_or_else(unknown);
        Ok(match head {
            "ghz" => Family::Ghz,
            "wstate" | "w-state" => Family::WState,
            "bv" => Family::Bv,
            "hs" => Family::Hs {
                steps: need(param)?,
            },
            "tl" => Family::Tl {
                layers: need(param)?,
            },
            "vqe" => Family::Vqe {
                layers: need(param)?,
            },
            "qaoa" => Family::QaoaRegular {
                degree: need(param)?,
            },
            "qaoa-b" => Family::QaoaBarbell,
            "random" => Family::Random {
                layers: need(param)?,
            },
            _ => return Err(unknown()),
        })
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub family: Family,
    pub num_qubits: usize,
    #[serde(default)]
    pub seed: u64,
}

impl BenchmarkSpec {
    pub fn new(family: Family, num_qubits: usize, seed: u64) -> Self {
        Self {
            family,
            num_qubits,
            seed,
        }
    }

    pub fn label(&self) -> String {
        format!("{}_{}", self.family, self.num_qubits)
    }
}

/// Controlled RY from native gates.
fn cry(c: &mut Circuit, control: usize, target: usize, theta: f64) {
    c.push(Instruction::ry(target, theta / 2.0))
        .push(Instruction::cx(control, target))
        .push(Instruction::ry(target, -theta / 2.0))
        .push(Instruction::cx(control, target));
}

fn angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.0..TAU)
}

/// Edges of a random simple `d`-regular graph (pairing model with retries).
pub fn random_regular_graph(n: usize, d: usize, rng: &mut impl Rng) -> Result<Vec<(usize, usize)>> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(Error::InvalidConfig(format!(
            "no {d}-regular graph on {n} vertices"
        )));
    }
    'attempt: for _ in 0..10_000 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(rng);
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || edges.contains(&(a, b)) {
                continue 'attempt;
            }
            edges.push((a, b));
        }
        edges.sort_unstable();
        return Ok(edges);
    }
    Err(Error::InvalidConfig(format!(
        "failed to sample a {d}-regular graph on {n} vertices"
    )))
}

/// Two cliques of `floor(n/2)` and `ceil(n/2)` vertices joined by one edge.
pub fn barbell_graph(n: usize) -> Vec<(usize, usize)> {
    let half = n / 2;
    let mut edges = Vec::new();
    for (lo, hi) in [(0, half), (half, n)] {
        for a in lo..hi {
            for b in a + 1..hi {
                edges.push((a, b));
            }
        }
    }
    if half > 0 && half < n {
        edges.push((half - 1, half));
    }
    edges.sort_unstable();
    edges
}

fn qaoa(n: usize, edges: &[(usize, usize)], rng: &mut ChaCha8Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Instruction::h(q));
    }
    let (gamma, beta) = (angle(rng), angle(rng));
    for &(a, b) in edges {
        c.push(Instruction::rzz(a, b, gamma));
    }
    for q in 0..n {
        c.push(Instruction::rx(q, beta));
    }
    c
}

/// Hidden string of a Bernstein-Vazirani instance: one bit per data qubit,
/// never all zero.
pub fn bv_hidden_string(num_qubits: usize, seed: u64) -> Vec<bool> {
    let data = num_qubits.saturating_sub(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits: Vec<bool> = (0..data).map(|_| rng.gen()).collect();
    if data > 0 && !bits.iter().any(|&b| b) {
        bits[rng.gen_range(0..data)] = true;
    }
    bits
}

/// Bernstein-Vazirani circuit for `hidden` on `hidden.len()` data qubits plus
/// one ancilla (the last qubit), which is returned to |0>.
pub fn bernstein_vazirani(hidden: &[bool]) -> Circuit {
    let n = hidden.len() + 1;
    let anc = n - 1;
    let mut c = Circuit::new(n);
    c.push(Instruction::x(anc));
    for q in 0..n {
        c.push(Instruction::h(q));
    }
    for (q, _) in hidden.iter().enumerate().filter(|(_, &b)| b) {
        c.push(Instruction::cx(q, anc));
    }
    for q in 0..n {
        c.push(Instruction::h(q));
    }
    c.push(Instruction::x(anc));
    c
}

/// Build the circuit described by `spec`; deterministic in the seed.
pub fn generate_benchmark(spec: &BenchmarkSpec) -> Result<Circuit> {
    let n = spec.num_qubits;
    if n == 0 {
        return Err(Error::InvalidConfig(
            "benchmarks need at least one qubit".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut c = Circuit::new(n);
    match spec.family {
        Family::Ghz => {
            c.push(Instruction::h(0));
            for q in 1..n {
                c.push(Instruction::cx(q - 1, q));
            }
        }
        Family::WState => {
            c.push(Instruction::x(0));
            for k in 0..n - 1 {
                let theta = 2.0 * (1.0 / (n - k) as f64).sqrt().acos();
                cry(&mut c, k, k + 1, theta);
                c.push(Instruction::cx(k + 1, k));
            }
        }
        Family::Bv => {
            if n < 2 {
                return Err(Error::InvalidConfig("bv needs at least two qubits".into()));
            }
            c = bernstein_vazirani(&bv_hidden_string(n, spec.seed));
        }
        Family::Hs { steps } => {
            let dt = 0.1;
            for _ in 0..steps {
                for q in 1..n {
                    c.push(Instruction::rzz(q - 1, q, 2.0 * dt));
                }
                for q in 0..n {
                    c.push(Instruction::rx(q, 2.0 * dt));
                }
            }
        }
        Family::Tl { layers } => {
            for layer in 0..=layers {
                for q in 0..n {
                    c.push(Instruction::ry(q, angle(&mut rng)));
                }
                if layer < layers && n > 1 {
                    if n > 2 {
                        c.push(Instruction::cx(n - 1, 0));
                    }
                    for q in 1..n {
                        c.push(Instruction::cx(q - 1, q));
                    }
                }
            }
        }
        Family::Vqe { layers } => {
            for layer in 0..=layers {
                for q in 0..n {
                    c.push(Instruction::ry(q, angle(&mut rng)));
                }
                if layer < layers {
                    for q in 1..n {
                        c.push(Instruction::cx(q - 1, q));
                    }
                }
            }
        }
        Family::QaoaRegular { degree } => {
            let edges = random_regular_graph(n, degree, &mut rng)?;
            c = qaoa(n, &edges, &mut rng);
        }
        Family::QaoaBarbell => {
            c = qaoa(n, &barbell_graph(n), &mut rng);
        }
        Family::Random { layers } => {
            for _ in 0..layers {
                for q in 0..n {
                    let inst = match rng.gen_range(0..4) {
                        0 => Instruction::h(q),
                        1 => Instruction::rx(q, angle(&mut rng)),
                        2 => Instruction::ry(q, angle(&mut rng)),
                        _ => Instruction::rz(q, angle(&mut rng)),
                    };
                    c.push(inst);
                }
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                for pair in order.chunks_exact(2) {
                    let inst = match rng.gen_range(0..3) {
                        0 => Instruction::cx(pair[0], pair[1]),
                        1 => Instruction::cz(pair[0], pair[1]),
                        _ => Instruction::rzz(pair[0], pair[1], angle(&mut rng)),
                    };
                    c.push(inst);
                }
            }
        }
    }
    c.name = spec.label();
    Ok(c)
}
