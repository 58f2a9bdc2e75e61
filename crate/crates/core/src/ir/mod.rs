//! Virtual circuits: a circuit whose two-qubit gates may be virtual, split
//! into independently executable fragments.

mod decomposition;
mod dot;
mod graph;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::error::{Error, Result};

pub use decomposition::{Basis, DecompositionEntry, GateDecomposition, LocalAction};
pub use graph::{GateId, OpEdge, OperationGraph, QubitGraph, UnionFind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualGate {
    pub id: GateId,
    pub kind: GateKind,
    pub qubits: [usize; 2],
    pub angle: Option<f64>,
    pub decomposition: GateDecomposition,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VInstruction {
    Real(Instruction),
    /// Index into [`VirtualCircuit::virtual_gates`].
    Virtual(usize),
}

/// A set of original qubits executed together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fragment {
    pub qubits: Vec<usize>,
}

/// Where a qubit lives: fragment index and offset inside that fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitPosition {
    pub fragment: usize,
    pub offset: usize,
}

#[derive(Debug, Clone)]
pub struct VirtualCircuit {
    name: String,
    num_qubits: usize,
    instructions: Vec<VInstruction>,
    virtual_gates: Vec<VirtualGate>,
    op_graph: OperationGraph,
    qubit_graph: QubitGraph,
    fragments: Vec<Fragment>,
    positions: Vec<QubitPosition>,
    /// `next_on_wire[q] = Some(r)`: `r` runs on `q`'s wire after `q` is
    /// measured and reset.
    next_on_wire: Vec<Option<usize>>,
}

impl VirtualCircuit {
    /// Build the IR from a plain circuit. Terminal measurements are dropped
    /// (every qubit is measured at the end); other measurements and resets
    /// are rejected.
    pub fn from_circuit(c: &Circuit) -> Result<Self> {
        c.validate()?;
        let mut measured = vec![false; c.num_qubits];
        let mut kept = Vec::with_capacity(c.instructions.len());
        for inst in &c.instructions {
            match inst.kind {
                GateKind::Measure => {
                    measured[inst.qubits[0]] = true;
                    continue;
                }
                GateKind::Reset => {
                    return Err(Error::UnsupportedCircuit("reset in input circuit".into()));
                }
                GateKind::Barrier => {}
                _ => {
                    if let Some(&q) = inst.qubits.iter().find(|&&q| measured[q]) {
                        return Err(Error::UnsupportedCircuit(format!(
                            "qubit {q} is used after being measured"
                        )));
                    }
                }
            }
            kept.push(inst.clone());
        }
        let n = c.num_qubits;
        let mut op_graph = OperationGraph::new(n);
        let mut qubit_graph = QubitGraph::new(n);
        let instructions: Vec<VInstruction> = kept
            .into_iter()
            .enumerate()
            .map(|(i, inst)| {
                if inst.is_two_qubit() {
                    let (a, b) = (inst.qubits[0], inst.qubits[1]);
                    op_graph.push(GateId(i), [a, b]);
                    qubit_graph.add(a, b);
                }
                VInstruction::Real(inst)
            })
            .collect();
        let mut vc = Self {
            name: c.name.clone(),
            num_qubits: n,
            instructions,
            virtual_gates: Vec::new(),
            op_graph,
            qubit_graph,
            fragments: Vec::new(),
            positions: Vec::new(),
            next_on_wire: vec![None; n],
        };
        vc.refresh_fragments();
        Ok(vc)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instructions(&self) -> &[VInstruction] {
        &self.instructions
    }

    /// Virtual gates in creation order.
    pub fn virtual_gates(&self) -> &[VirtualGate] {
        &self.virtual_gates
    }

    pub fn op_graph(&self) -> &OperationGraph {
        &self.op_graph
    }

    pub fn qubit_graph(&self) -> &QubitGraph {
        &self.qubit_graph
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn position(&self, q: usize) -> QubitPosition {
        self.positions[q]
    }

    /// Real two-qubit gates in program order.
    pub fn real_two_qubit_gates(&self) -> Vec<GateId> {
        self.op_graph.gates().collect()
    }

    fn refresh_fragments(&mut self) {
        let mut uf = UnionFind::new(self.num_qubits);
        for ((a, b), _) in self.qubit_graph.edges() {
            uf.union(a, b);
        }
        for (q, next) in self.next_on_wire.iter().enumerate() {
            if let Some(r) = next {
                uf.union(q, *r);
            }
        }
        self.fragments = uf
            .groups()
            .into_iter()
            .map(|qubits| Fragment { qubits })
            .collect();
        self.positions = vec![
            QubitPosition {
                fragment: 0,
                offset: 0
            };
            self.num_qubits
        ];
        for (f, frag) in self.fragments.iter().enumerate() {
            for (offset, &q) in frag.qubits.iter().enumerate() {
                self.positions[q] = QubitPosition {
                    fragment: f,
                    offset,
                };
            }
        }
    }

    /// Replace the real two-qubit gate `g` by a virtual gate.
    pub fn virt_gate(&mut self, g: GateId) -> Result<()> {
        let inst = match self.instructions.get(g.0) {
            None => return Err(Error::UnknownGate(g.0)),
            Some(VInstruction::Virtual(_)) => return Err(Error::AlreadyVirtual(g.0)),
            Some(VInstruction::Real(inst)) if !inst.is_two_qubit() => {
                return Err(Error::NotTwoQubitGate(g.0))
            }
            Some(VInstruction::Real(inst)) => inst.clone(),
        };
        let decomposition = GateDecomposition::for_gate(inst.kind, inst.angle)?;
        let (a, b) = (inst.qubits[0], inst.qubits[1]);
        self.qubit_graph.decrement(a, b)?;
        self.op_graph.remove(g);
        self.virtual_gates.push(VirtualGate {
            id: g,
            kind: inst.kind,
            qubits: [a, b],
            angle: inst.angle,
            decomposition,
        });
        self.instructions[g.0] = VInstruction::Virtual(self.virtual_gates.len() - 1);
        self.refresh_fragments();
        Ok(())
    }

    /// Virtualize every real two-qubit gate between `a` and `b`, in program
    /// order. Returns the number of gates virtualized.
    pub fn virt_between(&mut self, a: usize, b: usize) -> Result<usize> {
        if self.qubit_graph.weight(a, b) == 0 {
            return Err(Error::NoSuchEdge(a.min(b), a.max(b)));
        }
        let targets: Vec<GateId> = self
            .op_graph
            .gates()
            .filter(|g| {
                let [x, y] = self.op_graph.qubits_of(*g).expect("live gate");
                (x, y) == (a, b) || (x, y) == (b, a)
            })
            .collect();
        for g in &targets {
            self.virt_gate(*g)?;
        }
        Ok(targets.len())
    }

    /// Gate kind, qubits and angle of instruction `g`, real or virtual.
    pub fn gate(&self, g: GateId) -> Option<Instruction> {
        match self.instructions.get(g.0)? {
            VInstruction::Real(inst) => Some(inst.clone()),
            VInstruction::Virtual(k) => {
                let v = &self.virtual_gates[*k];
                Some(Instruction {
                    kind: v.kind,
                    qubits: v.qubits.to_vec(),
                    angle: v.angle,
                    clbit: None,
                })
            }
        }
    }

    /// Per-gate cost `ancestors * descendants`, in program order.
    pub fn gate_costs(&self) -> Vec<(GateId, u64)> {
        let anc = self.op_graph.ancestor_counts();
        let desc = self.op_graph.descendant_counts();
        self.op_graph
            .gates()
            .zip(anc.iter().zip(&desc))
            .map(|(g, (a, d))| (g, a * d))
            .collect()
    }

    /// Ordered pairs `(i, j)` where qubit `i` depends on qubit `j`: some gate
    /// on `i` is reachable from, or equal to, some gate on `j`. Qubit reuse
    /// links count as dependencies as well.
    pub fn qubit_dependencies(&self) -> BTreeSet<(usize, usize)> {
        let reach = self.end_reach();
        let mut out = BTreeSet::new();
        for (i, set) in reach.iter().enumerate() {
            for j in set.iter() {
                if i != j {
                    out.insert((i, j));
                }
            }
        }
        out
    }

    pub fn dependency_count(&self) -> usize {
        self.end_reach().iter().map(|s| s.len() - 1).sum()
    }

    /// For every qubit `q`, the set of qubits whose start reaches the end of `q`.
    fn end_reach(&self) -> Vec<BitSet> {
        let n = self.num_qubits;
        let gates: Vec<GateId> = self.op_graph.gates().collect();
        let index: std::collections::HashMap<GateId, usize> =
            gates.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        // nodes: start_q = q, end_q = n + q, gate i = 2n + i
        let total = 2 * n + gates.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); total];
        let mut indeg = vec![0usize; total];
        let mut link = |from: usize, to: usize, succ: &mut Vec<Vec<usize>>| {
            succ[from].push(to);
            indeg[to] += 1;
        };
        for q in 0..n {
            let wire = self.op_graph.wire(q);
            let mut prev = q;
            for g in wire {
                let node = 2 * n + index[g];
                link(prev, node, &mut succ);
                prev = node;
            }
            link(prev, n + q, &mut succ);
            if let Some(r) = self.next_on_wire[q] {
                link(n + q, r, &mut succ);
            }
        }
        let mut sets: Vec<BitSet> = (0..total).map(|_| BitSet::new(n)).collect();
        for q in 0..n {
            sets[q].insert(q);
        }
        let mut queue: VecDeque<usize> = (0..total).filter(|&v| indeg[v] == 0).collect();
        while let Some(v) = queue.pop_front() {
            let current = sets[v].clone();
            for &w in &succ[v] {
                sets[w].union_with(&current);
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        sets.drain(n..2 * n).collect()
    }

    /// Chains of qubits sharing a wire, each listed in execution order.
    pub fn wire_chains(&self) -> Vec<Vec<usize>> {
        let mut has_prev = vec![false; self.num_qubits];
        for r in self.next_on_wire.iter().flatten() {
            has_prev[*r] = true;
        }
        (0..self.num_qubits)
            .filter(|&q| !has_prev[q])
            .map(|head| {
                let mut chain = vec![head];
                while let Some(r) = self.next_on_wire[*chain.last().expect("non-empty")] {
                    chain.push(r);
                }
                chain
            })
            .collect()
    }

    pub fn next_on_wire(&self, q: usize) -> Option<usize> {
        self.next_on_wire[q]
    }

    /// Number of physical wires fragment `f` needs.
    pub fn fragment_width(&self, f: usize) -> usize {
        self.fragments[f]
            .qubits
            .iter()
            .filter(|&&q| !self.has_predecessor(q))
            .count()
    }

    pub fn max_fragment_width(&self) -> usize {
        (0..self.fragments.len())
            .map(|f| self.fragment_width(f))
            .max()
            .unwrap_or(0)
    }

    fn has_predecessor(&self, q: usize) -> bool {
        self.next_on_wire.contains(&Some(q))
    }

    fn chain_tail(&self, mut q: usize) -> usize {
        while let Some(r) = self.next_on_wire[q] {
            q = r;
        }
        q
    }

    /// Pairs `(i, j)` for which `j` may run on `i`'s wire after `i` finishes.
    pub fn reuse_candidates(&self) -> Vec<(usize, usize)> {
        let deps = self.qubit_dependencies();
        let mut out = Vec::new();
        for i in 0..self.num_qubits {
            if self.next_on_wire[i].is_some() {
                continue;
            }
            for j in 0..self.num_qubits {
                if i == j
                    || self.has_predecessor(j)
                    || self.positions[i].fragment != self.positions[j].fragment
                    || self.chain_tail(j) == i
                    || deps.contains(&(i, j))
                {
                    continue;
                }
                out.push((i, j));
            }
        }
        out
    }

    /// Measure and reset qubit `i`, then run qubit `j` on the same wire.
    pub fn reuse(&mut self, i: usize, j: usize) -> Result<()> {
        if !self.reuse_candidates().contains(&(i, j)) {
            return Err(Error::InvalidConfig(format!(
                "qubit {j} cannot reuse the wire of qubit {i}"
            )));
        }
        self.next_on_wire[i] = Some(j);
        self.refresh_fragments();
        Ok(())
    }

    /// Circuit with every virtual gate restored as the original gate.
    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.num_qubits).with_name(self.name.clone());
        for (i, _) in self.instructions.iter().enumerate() {
            c.push(self.gate(GateId(i)).expect("index in range"));
        }
        c
    }
}

/// Fixed-size bit set over qubit ids.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(n: usize) -> Self {
        Self {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| k * 64 + b)
        })
    }
}
