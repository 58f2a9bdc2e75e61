//! Fragment extraction: every fragment becomes a circuit over its own wires
//! in which each virtual-gate side is a placeholder to be filled per instance.

mod peephole;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::error::{Error, Result};
use crate::ir::{GateId, LocalAction, VInstruction, VirtualCircuit};
use crate::qasm::{emit_qasm, parse_qasm};

pub use peephole::peephole_optimize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// A slot in a fragment circuit where one side of a virtual gate goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placeholder {
    /// Index of the marker instruction in the fragment circuit.
    pub position: usize,
    /// Index into [`CompiledProgram::gate_order`].
    pub gate: usize,
    pub side: Side,
    pub wire: usize,
}

/// One fragment with its placeholders.
///
/// Placeholders are single-wire barriers in `circuit`. Classical bit `c`
/// holds the final value of original qubit `output_qubits[c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ParamCircuitDoc", try_from = "ParamCircuitDoc")]
pub struct ParamCircuit {
    pub circuit: Circuit,
    pub output_qubits: Vec<usize>,
    pub placeholders: Vec<Placeholder>,
    /// The six candidate actions of each placeholder.
    pub param_vectors: Vec<Vec<LocalAction>>,
    /// Program gate indices touching this fragment, ascending.
    pub gates: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamCircuitDoc {
    name: String,
    qasm: String,
    output_qubits: Vec<usize>,
    placeholders: Vec<Placeholder>,
    param_vectors: Vec<Vec<LocalAction>>,
    gates: Vec<usize>,
}

impl From<ParamCircuit> for ParamCircuitDoc {
    fn from(p: ParamCircuit) -> Self {
        Self {
            name: p.circuit.name.clone(),
            qasm: emit_qasm(&p.circuit),
            output_qubits: p.output_qubits,
            placeholders: p.placeholders,
            param_vectors: p.param_vectors,
            gates: p.gates,
        }
    }
}

impl TryFrom<ParamCircuitDoc> for ParamCircuit {
    type Error = Error;

    fn try_from(d: ParamCircuitDoc) -> Result<Self> {
        let circuit = parse_qasm(&d.qasm)?.with_name(d.name);
        let p = ParamCircuit {
            circuit,
            output_qubits: d.output_qubits,
            placeholders: d.placeholders,
            param_vectors: d.param_vectors,
            gates: d.gates,
        };
        p.validate()?;
        Ok(p)
    }
}

impl ParamCircuit {
    pub fn num_instances(&self) -> u128 {
        6u128
            .checked_pow(self.gates.len() as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn width(&self) -> usize {
        self.circuit.num_qubits
    }

    pub fn validate(&self) -> Result<()> {
        self.circuit.validate()?;
        if self.param_vectors.len() != self.placeholders.len() {
            return Err(Error::ShapeMismatch(
                "one parameter vector per placeholder".into(),
            ));
        }
        if self.output_qubits.len() != self.circuit.num_clbits {
            return Err(Error::ShapeMismatch(
                "one output qubit per classical bit".into(),
            ));
        }
        for (p, v) in self.placeholders.iter().zip(&self.param_vectors) {
            let marker = self.circuit.instructions.get(p.position);
            let ok =
                matches!(marker, Some(i) if i.kind == GateKind::Barrier && i.qubits == [p.wire]);
            if !ok || v.len() != 6 || self.gates.binary_search(&p.gate).is_err() {
                return Err(Error::ShapeMismatch(format!(
                    "bad placeholder at {}",
                    p.position
                )));
            }
        }
        Ok(())
    }

    /// Digits of local instance `index`, one per entry of `gates`, the last
    /// gate varying fastest.
    pub fn digits(&self, mut index: u64) -> Vec<usize> {
        let mut d = vec![0; self.gates.len()];
        for slot in d.iter_mut().rev() {
            *slot = (index % 6) as usize;
            index /= 6;
        }
        d
    }

    /// Concrete circuit of local instance `index`.
    pub fn instantiate(&self, index: u64) -> Circuit {
        let digits = self.digits(index);
        let choice: HashMap<usize, usize> = self
            .gates
            .iter()
            .copied()
            .zip(digits.iter().copied())
            .collect();
        let by_position: HashMap<usize, usize> = self
            .placeholders
            .iter()
            .enumerate()
            .map(|(k, p)| (p.position, k))
            .collect();
        let mut out = Circuit {
            name: self.circuit.name.clone(),
            num_qubits: self.circuit.num_qubits,
            num_clbits: self.circuit.num_clbits,
            instructions: Vec::with_capacity(self.circuit.instructions.len()),
        };
        for (pos, inst) in self.circuit.instructions.iter().enumerate() {
            match by_position.get(&pos) {
                Some(&k) => {
                    let p = &self.placeholders[k];
                    let action = &self.param_vectors[k][choice[&p.gate]];
                    out.instructions.extend(action.instructions(p.wire));
                }
                None => out.instructions.push(inst.clone()),
            }
        }
        out
    }
}

/// Everything the runtime needs to execute and knit a virtual circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledProgram {
    pub name: String,
    pub num_qubits: usize,
    pub fragments: Vec<ParamCircuit>,
    /// Coefficients of each virtual gate, in `gate_order`.
    pub coeff_vectors: Vec<[f64; 6]>,
    /// Original instruction ids of the virtual gates, in creation order.
    pub gate_order: Vec<GateId>,
}

impl CompiledProgram {
    pub fn num_virtual_gates(&self) -> usize {
        self.gate_order.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: CompiledProgram = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.coeff_vectors.len() != self.gate_order.len() {
            return Err(Error::ShapeMismatch(
                "one coefficient vector per virtual gate".into(),
            ));
        }
        let mut sides = vec![(0usize, 0usize); self.gate_order.len()];
        let mut outputs = vec![0usize; self.num_qubits];
        for f in &self.fragments {
            f.validate()?;
            for p in &f.placeholders {
                let s = sides
                    .get_mut(p.gate)
                    .ok_or_else(|| Error::ShapeMismatch(format!("unknown gate {}", p.gate)))?;
                match p.side {
                    Side::A => s.0 += 1,
                    Side::B => s.1 += 1,
                }
            }
            for &q in &f.output_qubits {
                *outputs.get_mut(q).ok_or(Error::QubitOutOfRange {
                    index: q,
                    size: self.num_qubits,
                })? += 1;
            }
        }
        if sides.iter().any(|&s| s != (1, 1)) {
            return Err(Error::ShapeMismatch(
                "each virtual gate needs one A and one B side".into(),
            ));
        }
        if outputs.iter().any(|&c| c != 1) {
            return Err(Error::ShapeMismatch(
                "each qubit must be output by exactly one fragment".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    /// Instruction of the virtual circuit, or one side of a virtual gate.
    Op(usize, u8),
    /// Qubit hands its wire to its successor.
    End(usize),
}

/// Extract every fragment of `vc` as a [`ParamCircuit`].
pub fn generate(vc: &VirtualCircuit) -> CompiledProgram {
    let gate_order: Vec<GateId> = vc.virtual_gates().iter().map(|v| v.id).collect();
    let coeff_vectors = vc
        .virtual_gates()
        .iter()
        .map(|v| v.decomposition.coefficients())
        .collect();
    let fragments = (0..vc.fragments().len())
        .map(|f| generate_fragment(vc, f))
        .collect();
    CompiledProgram {
        name: vc.name().to_string(),
        num_qubits: vc.num_qubits(),
        fragments,
        coeff_vectors,
        gate_order,
    }
}

fn generate_fragment(vc: &VirtualCircuit, f: usize) -> ParamCircuit {
    let qubits = &vc.fragments()[f].qubits;
    let in_frag = |q: usize| vc.position(q).fragment == f;
    let chains: Vec<Vec<usize>> = vc
        .wire_chains()
        .into_iter()
        .filter(|c| in_frag(c[0]))
        .collect();
    let mut wire_of = HashMap::new();
    for (w, chain) in chains.iter().enumerate() {
        for &q in chain {
            wire_of.insert(q, w);
        }
    }

    // Per-qubit operation sequences.
    let mut per_qubit: HashMap<usize, Vec<Node>> =
        qubits.iter().map(|&q| (q, Vec::new())).collect();
    for (i, inst) in vc.instructions().iter().enumerate() {
        match inst {
            VInstruction::Real(r) => {
                for &q in r.qubits.iter().filter(|&&q| in_frag(q)) {
                    per_qubit
                        .get_mut(&q)
                        .expect("fragment qubit")
                        .push(Node::Op(i, 0));
                }
            }
            VInstruction::Virtual(k) => {
                for (side, &q) in vc.virtual_gates()[*k].qubits.iter().enumerate() {
                    if in_frag(q) {
                        per_qubit
                            .get_mut(&q)
                            .expect("fragment qubit")
                            .push(Node::Op(i, side as u8));
                    }
                }
            }
        }
    }

    // Dependency graph over nodes; priority is original program order.
    let mut succ: HashMap<Node, Vec<Node>> = HashMap::new();
    let mut indeg: HashMap<Node, usize> = HashMap::new();
    let mut priority: HashMap<Node, (usize, u8)> = HashMap::new();
    let mut add_node = |n: Node, p: (usize, u8), indeg: &mut HashMap<Node, usize>| {
        indeg.entry(n).or_insert(0);
        priority.entry(n).or_insert(p);
    };
    for &q in qubits {
        for n in &per_qubit[&q] {
            if let Node::Op(i, s) = *n {
                add_node(*n, (i, s), &mut indeg);
            }
        }
        if vc.next_on_wire(q).is_some() {
            let last = per_qubit[&q].iter().rev().find_map(|n| match n {
                Node::Op(i, _) => Some(*i),
                Node::End(_) => None,
            });
            per_qubit
                .get_mut(&q)
                .expect("fragment qubit")
                .push(Node::End(q));
            add_node(Node::End(q), (last.unwrap_or(0), 2), &mut indeg);
        }
    }
    for &q in qubits {
        let seq = &per_qubit[&q];
        let mut link = |a: Node, b: Node| {
            succ.entry(a).or_default().push(b);
            *indeg.get_mut(&b).expect("node") += 1;
        };
        for pair in seq.windows(2) {
            link(pair[0], pair[1]);
        }
        if let Some(next) = vc.next_on_wire(q) {
            if let Some(&first) = per_qubit[&next].first() {
                link(Node::End(q), first);
            }
        }
    }
    let mut heap: BinaryHeap<Reverse<((usize, u8), Node)>> = indeg
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(n, _)| Reverse((priority[n], *n)))
        .collect();

    let clbit_of: HashMap<usize, usize> = qubits.iter().enumerate().map(|(c, &q)| (q, c)).collect();
    let gate_index: HashMap<usize, usize> = vc
        .virtual_gates()
        .iter()
        .enumerate()
        .map(|(k, v)| (v.id.0, k))
        .collect();
    let mut circuit = Circuit {
        name: format!("{}_f{f}", vc.name()),
        num_qubits: chains.len(),
        num_clbits: qubits.len(),
        instructions: Vec::new(),
    };
    let mut placeholders = Vec::new();
    let mut param_vectors = Vec::new();
    let mut gates = Vec::new();
    while let Some(Reverse((_, node))) = heap.pop() {
        match node {
            Node::Op(i, side) => match &vc.instructions()[i] {
                VInstruction::Real(r) => {
                    let mapped: Vec<usize> = r
                        .qubits
                        .iter()
                        .filter(|&&q| in_frag(q))
                        .map(|q| wire_of[q])
                        .collect();
                    circuit.instructions.push(Instruction {
                        qubits: mapped,
                        ..r.clone()
                    });
                }
                VInstruction::Virtual(k) => {
                    let v = &vc.virtual_gates()[*k];
                    let wire = wire_of[&v.qubits[side as usize]];
                    let side = if side == 0 { Side::A } else { Side::B };
                    placeholders.push(Placeholder {
                        position: circuit.instructions.len(),
                        gate: gate_index[&v.id.0],
                        side,
                        wire,
                    });
                    param_vectors.push(
                        v.decomposition
                            .entries
                            .iter()
                            .map(|e| {
                                if side == Side::A {
                                    e.a.clone()
                                } else {
                                    e.b.clone()
                                }
                            })
                            .collect(),
                    );
                    gates.push(gate_index[&v.id.0]);
                    circuit.instructions.push(Instruction::barrier(&[wire]));
                }
            },
            Node::End(q) => {
                let w = wire_of[&q];
                circuit
                    .instructions
                    .push(Instruction::measure(w, clbit_of[&q]));
                circuit.instructions.push(Instruction::reset(w));
            }
        }
        for next in succ.get(&node).into_iter().flatten() {
            let d = indeg.get_mut(next).expect("node");
            *d -= 1;
            if *d == 0 {
                heap.push(Reverse((priority[next], *next)));
            }
        }
    }
    for chain in &chains {
        let last = *chain.last().expect("non-empty chain");
        circuit
            .instructions
            .push(Instruction::measure(wire_of[&last], clbit_of[&last]));
    }
    gates.sort_unstable();
    gates.dedup();
    ParamCircuit {
        circuit,
        output_qubits: qubits.clone(),
        placeholders,
        param_vectors,
        gates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_program() -> CompiledProgram {
        let mut c = Circuit::new(2);
        c.push(Instruction::h(0)).push(Instruction::cx(0, 1));
        let mut vc = VirtualCircuit::from_circuit(&c).unwrap();
        vc.virt_gate(GateId(1)).unwrap();
        generate(&vc)
    }

    #[test]
    fn sides_land_in_their_fragments() {
        let p = bell_program();
        assert_eq!(p.fragments.len(), 2);
        assert_eq!(p.fragments[0].placeholders[0].side, Side::A);
        assert_eq!(p.fragments[1].placeholders[0].side, Side::B);
        assert_eq!(p.coeff_vectors.len(), 1);
        p.validate().unwrap();
    }

    #[test]
    fn no_virtual_gates_means_no_placeholders() {
        let mut c = Circuit::new(2);
        c.push(Instruction::h(0)).push(Instruction::cx(0, 1));
        let p = generate(&VirtualCircuit::from_circuit(&c).unwrap());
        assert_eq!(p.fragments.len(), 1);
        assert!(p.fragments[0].placeholders.is_empty());
        assert_eq!(p.fragments[0].num_instances(), 1);
    }

    #[test]
    fn json_round_trip() {
        let p = bell_program();
        let back = CompiledProgram::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn instantiation_replaces_markers() {
        let p = bell_program();
        let f = &p.fragments[1];
        // digit 4 of the CX table on the target side is an X-basis measurement
        let c = f.instantiate(4);
        assert_eq!(
            c.instructions
                .iter()
                .filter(|i| i.is_signed_measure())
                .count(),
            1
        );
        assert!(c.instructions.iter().all(|i| i.kind != GateKind::Barrier));
    }

    #[test]
    fn reused_wire_is_measured_and_reset() {
        let mut c = Circuit::new(3);
        c.push(Instruction::cx(0, 1)).push(Instruction::cx(1, 2));
        let mut vc = VirtualCircuit::from_circuit(&c).unwrap();
        vc.reuse(0, 2).unwrap();
        let p = generate(&vc);
        let f = &p.fragments[0];
        assert_eq!(f.circuit.num_qubits, 2);
        let kinds: Vec<GateKind> = f.circuit.instructions.iter().map(|i| i.kind).collect();
        assert_eq!(
            kinds,
            vec![
                GateKind::Cx,
                GateKind::Measure,
                GateKind::Reset,
                GateKind::Cx,
                GateKind::Measure,
                GateKind::Measure
            ]
        );
    }
}
