//! Mapping circuits onto a coupling graph, plus circuit quality metrics.

mod coupling;
mod metrics;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::error::{Error, Result};

pub use coupling::{falcon27, heavy_hex, line, CouplingGraph};
pub use metrics::{cnot_count, depth, esp, hellinger_fidelity, hellinger_fidelity_raw};

/// Error probability per operation class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub one_qubit: f64,
    pub two_qubit: f64,
    pub measure: f64,
    pub reset: f64,
}

impl ErrorRates {
    pub const ZERO: ErrorRates = ErrorRates {
        one_qubit: 0.0,
        two_qubit: 0.0,
        measure: 0.0,
        reset: 0.0,
    };

    pub fn uniform(e: f64) -> Self {
        Self {
            one_qubit: e,
            two_qubit: e,
            measure: e,
            reset: e,
        }
    }

    /// Error rate of one instruction; `None` for barriers.
    pub fn of(&self, kind: GateKind) -> Option<f64> {
        match kind {
            GateKind::Barrier => None,
            GateKind::Measure => Some(self.measure),
            GateKind::Reset => Some(self.reset),
            k if k.is_two_qubit() => Some(self.two_qubit),
            _ => Some(self.one_qubit),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for e in [self.one_qubit, self.two_qubit, self.measure, self.reset] {
            if !(0.0..1.0).contains(&e) {
                return Err(Error::InvalidConfig(format!(
                    "error rate {e} outside [0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// A simulated QPU: size, connectivity, error rates and a job queue counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpuModel {
    pub name: String,
    pub num_qubits: usize,
    pub coupling: Vec<(usize, usize)>,
    pub errors: ErrorRates,
    #[serde(default)]
    pub queue_length: u64,
}

impl QpuModel {
    pub fn new(name: impl Into<String>, graph: &CouplingGraph, errors: ErrorRates) -> Self {
        Self {
            name: name.into(),
            num_qubits: graph.num_qubits(),
            coupling: graph.edges().to_vec(),
            errors,
            queue_length: 0,
        }
    }

    pub fn graph(&self) -> CouplingGraph {
        CouplingGraph::new(self.num_qubits, &self.coupling)
    }

    pub fn validate(&self) -> Result<()> {
        self.errors.validate()?;
        if let Some(&(a, b)) = self
            .coupling
            .iter()
            .find(|(a, b)| *a >= self.num_qubits || *b >= self.num_qubits || a == b)
        {
            return Err(Error::InvalidConfig(format!(
                "bad coupling edge ({a}, {b}) on `{}`",
                self.name
            )));
        }
        Ok(())
    }
}

/// A circuit expressed on physical qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalCircuit {
    pub circuit: Circuit,
    /// Physical qubit of each logical qubit before the first gate.
    pub initial_layout: Vec<usize>,
    /// Physical qubit of each logical qubit at the end.
    pub final_layout: Vec<usize>,
    pub inserted_swaps: usize,
}

fn interaction_weights(c: &Circuit) -> BTreeMap<(usize, usize), usize> {
    let mut w = BTreeMap::new();
    for inst in c.instructions.iter().filter(|i| i.is_two_qubit()) {
        let (a, b) = (
            inst.qubits[0].min(inst.qubits[1]),
            inst.qubits[0].max(inst.qubits[1]),
        );
        *w.entry((a, b)).or_insert(0) += 1;
    }
    w
}

/// Greedy placement: the most connected logical qubit goes to the best
/// connected physical qubit, every next one next to its placed partners.
fn initial_layout(c: &Circuit, g: &CouplingGraph) -> Vec<usize> {
    let n = c.num_qubits;
    let weights = interaction_weights(c);
    let mut adj = vec![vec![0usize; n]; n];
    for (&(a, b), &w) in &weights {
        adj[a][b] += w;
        adj[b][a] += w;
    }
    let degree: Vec<usize> = adj.iter().map(|r| r.iter().sum()).collect();
    let mut layout = vec![usize::MAX; n];
    let mut used = vec![false; g.num_qubits()];
    for _ in 0..n {
        let next = (0..n)
            .filter(|&l| layout[l] == usize::MAX)
            .max_by_key(|&l| {
                let placed: usize = (0..n)
                    .filter(|&m| layout[m] != usize::MAX)
                    .map(|m| adj[l][m])
                    .sum();
                (placed, degree[l], std::cmp::Reverse(l))
            })
            .expect("unplaced qubit");
        let cost = |p: usize| -> usize {
            (0..n)
                .filter(|&m| layout[m] != usize::MAX && adj[next][m] > 0)
                .map(|m| adj[next][m] * g.distance(p, layout[m]))
                .sum()
        };
        let p = (0..g.num_qubits())
            .filter(|&p| !used[p])
            .min_by_key(|&p| (cost(p), std::cmp::Reverse(g.degree(p)), p))
            .expect("enough physical qubits");
        layout[next] = p;
        used[p] = true;
    }
    layout
}

/// Place and route `c` on `qpu`. Two-qubit gates become CX on coupled
/// pairs (a SWAP is three CX); a circuit without classical bits gets an
/// explicit final measurement of every logical qubit.
pub fn map_and_route(c: &Circuit, qpu: &QpuModel) -> Result<PhysicalCircuit> {
    if c.num_qubits > qpu.num_qubits {
        return Err(Error::DoesNotFit {
            width: c.num_qubits,
            qpu: qpu.name.clone(),
            capacity: qpu.num_qubits,
        });
    }
    c.validate()?;
    let layout = initial_layout(c, &qpu.graph());
    route(c, qpu, layout)
}

/// Route `c` on `qpu` starting from a given logical-to-physical layout.
pub fn route(c: &Circuit, qpu: &QpuModel, layout: Vec<usize>) -> Result<PhysicalCircuit> {
    if c.num_qubits > qpu.num_qubits {
        return Err(Error::DoesNotFit {
            width: c.num_qubits,
            qpu: qpu.name.clone(),
            capacity: qpu.num_qubits,
        });
    }
    let mut seen = vec![false; qpu.num_qubits];
    if layout.len() != c.num_qubits
        || layout
            .iter()
            .any(|&p| p >= qpu.num_qubits || std::mem::replace(&mut seen[p], true))
    {
        return Err(Error::InvalidConfig(
            "layout must map qubits injectively".into(),
        ));
    }
    let g = qpu.graph();
    let init = layout;
    let mut l2p = init.clone();
    let mut p2l = vec![usize::MAX; qpu.num_qubits];
    for (l, &p) in l2p.iter().enumerate() {
        p2l[p] = l;
    }
    let mut out = Circuit {
        name: c.name.clone(),
        num_qubits: qpu.num_qubits,
        num_clbits: if c.num_clbits == 0 {
            c.num_qubits
        } else {
            c.num_clbits
        },
        instructions: Vec::with_capacity(c.instructions.len()),
    };
    let mut swaps = 0;
    for inst in &c.instructions {
        if inst.is_two_qubit() {
            let (a, b) = (inst.qubits[0], inst.qubits[1]);
            let path = g.shortest_path(l2p[a], l2p[b]).ok_or_else(|| {
                Error::InvalidConfig(format!("coupling graph of `{}` is disconnected", qpu.name))
            })?;
            for &hop in &path[1..path.len() - 1] {
                let from = l2p[a];
                for (x, y) in [(from, hop), (hop, from), (from, hop)] {
                    out.instructions.push(Instruction::cx(x, y));
                }
                let other = p2l[hop];
                p2l[hop] = a;
                p2l[from] = other;
                l2p[a] = hop;
                if other != usize::MAX {
                    l2p[other] = from;
                }
                swaps += 1;
            }
            let (pa, pb) = (l2p[a], l2p[b]);
            match inst.kind {
                GateKind::Cx => out.instructions.push(Instruction::cx(pa, pb)),
                GateKind::Cz => {
                    out.instructions.push(Instruction::h(pb));
                    out.instructions.push(Instruction::cx(pa, pb));
                    out.instructions.push(Instruction::h(pb));
                }
                GateKind::Rzz => {
                    out.instructions.push(Instruction::cx(pa, pb));
                    out.instructions
                        .push(Instruction::rz(pb, inst.angle.unwrap_or(0.0)));
                    out.instructions.push(Instruction::cx(pa, pb));
                }
                _ => unreachable!("two-qubit kinds are cx, cz, rzz"),
            }
        } else {
            let qubits: Vec<usize> = inst.qubits.iter().map(|&q| l2p[q]).collect();
            out.instructions.push(Instruction {
                qubits,
                ..inst.clone()
            });
        }
    }
    if c.num_clbits == 0 {
        for (l, &p) in l2p.iter().enumerate() {
            out.instructions.push(Instruction::measure(p, l));
        }
    }
    Ok(PhysicalCircuit {
        circuit: out,
        initial_layout: init,
        final_layout: l2p,
        inserted_swaps: swaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qpu(graph: CouplingGraph) -> QpuModel {
        QpuModel::new("test", &graph, ErrorRates::ZERO)
    }

    #[test]
    fn distance_two_needs_one_swap() {
        let mut c = Circuit::new(3);
        c.push(Instruction::cx(0, 2));
        let pc = route(&c, &qpu(line(3)), vec![0, 1, 2]).unwrap();
        assert_eq!(pc.inserted_swaps, 1);
        assert_eq!(cnot_count(&pc.circuit), 4);
        assert_eq!(map_and_route(&c, &qpu(line(3))).unwrap().inserted_swaps, 0);
    }

    #[test]
    fn embedded_chain_needs_no_swaps() {
        let mut c = Circuit::new(5);
        for q in 0..4 {
            c.push(Instruction::cx(q, q + 1));
        }
        let pc = map_and_route(&c, &qpu(falcon27())).unwrap();
        assert_eq!(pc.inserted_swaps, 0);
        for inst in pc.circuit.instructions.iter().filter(|i| i.is_two_qubit()) {
            assert!(falcon27().are_coupled(inst.qubits[0], inst.qubits[1]));
        }
    }

    #[test]
    fn too_wide_circuit_is_rejected() {
        assert!(matches!(
            map_and_route(&Circuit::new(4), &qpu(line(3))),
            Err(Error::DoesNotFit { .. })
        ));
    }
}
