//! The operation graph over real two-qubit gates and the weighted qubit graph.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of an instruction in a [`VirtualCircuit`](super::VirtualCircuit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GateId(pub usize);

impl std::fmt::Display for GateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// A direct dependency `to` on `from` through `qubit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpEdge {
    pub from: GateId,
    pub to: GateId,
    pub qubit: usize,
}

/// DAG of real two-qubit gates. Stored as the per-qubit sequence of gates;
/// edges join consecutive gates on a wire, so removing a gate re-links its
/// neighbours in wire order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperationGraph {
    wires: Vec<Vec<GateId>>,
    gates: BTreeMap<GateId, [usize; 2]>,
}

impl OperationGraph {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            wires: vec![Vec::new(); num_qubits],
            gates: BTreeMap::new(),
        }
    }

    /// Append a gate; ids must be pushed in increasing order.
    pub(crate) fn push(&mut self, id: GateId, qubits: [usize; 2]) {
        debug_assert!(self.gates.keys().next_back().is_none_or(|last| *last < id));
        for q in qubits {
            self.wires[q].push(id);
        }
        self.gates.insert(id, qubits);
    }

    pub(crate) fn remove(&mut self, id: GateId) -> bool {
        let Some(qubits) = self.gates.remove(&id) else {
            return false;
        };
        for q in qubits {
            self.wires[q].retain(|g| *g != id);
        }
        true
    }

    pub fn num_qubits(&self) -> usize {
        self.wires.len()
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn contains(&self, id: GateId) -> bool {
        self.gates.contains_key(&id)
    }

    /// Gate ids in program order, which is a topological order.
    pub fn gates(&self) -> impl Iterator<Item = GateId> + '_ {
        self.gates.keys().copied()
    }

    pub fn qubits_of(&self, id: GateId) -> Option<[usize; 2]> {
        self.gates.get(&id).copied()
    }

    pub fn wire(&self, q: usize) -> &[GateId] {
        &self.wires[q]
    }

    pub fn edges(&self) -> Vec<OpEdge> {
        let mut out: Vec<OpEdge> = self
            .wires
            .iter()
            .enumerate()
            .flat_map(|(q, w)| {
                w.windows(2).map(move |p| OpEdge {
                    from: p[0],
                    to: p[1],
                    qubit: q,
                })
            })
            .collect();
        out.sort();
        out
    }

    /// Number of distinct ancestors of every gate, in [`gates`](Self::gates) order.
    ///
    /// The ancestors of a gate meet each wire in a prefix, so a gate's closed
    /// ancestor set is summarised by one prefix length per wire.
    pub fn ancestor_counts(&self) -> Vec<u64> {
        self.closure_counts(false)
    }

    /// Number of distinct descendants of every gate, in [`gates`](Self::gates) order.
    pub fn descendant_counts(&self) -> Vec<u64> {
        self.closure_counts(true)
    }

    fn closure_counts(&self, reverse: bool) -> Vec<u64> {
        let n = self.wires.len();
        let order: Vec<(GateId, [usize; 2])> = self.gates.iter().map(|(g, q)| (*g, *q)).collect();
        let mut rank = vec![0usize; order.last().map_or(0, |(g, _)| g.0 + 1)];
        for (r, (g, _)) in order.iter().enumerate() {
            rank[g.0] = r;
        }
        let mut pos = vec![[0usize; 2]; order.len()];
        for (q, wire) in self.wires.iter().enumerate() {
            for (i, g) in wire.iter().enumerate() {
                let r = rank[g.0];
                let slot = usize::from(order[r].1[0] != q);
                pos[r][slot] = i;
            }
        }
        let mut frontier = vec![0u32; order.len() * n];
        let mut counts = vec![0u64; order.len()];
        let mut f = vec![0u32; n];
        let ranks: Box<dyn Iterator<Item = usize>> = if reverse {
            Box::new((0..order.len()).rev())
        } else {
            Box::new(0..order.len())
        };
        for r in ranks {
            let qs = order[r].1;
            f.fill(0);
            for (slot, &q) in qs.iter().enumerate() {
                let i = pos[r][slot];
                let neighbour = if reverse {
                    self.wires[q].get(i + 1)
                } else {
                    i.checked_sub(1).map(|j| &self.wires[q][j])
                };
                if let Some(p) = neighbour {
                    let p = rank[p.0];
                    for (a, b) in f.iter_mut().zip(&frontier[p * n..(p + 1) * n]) {
                        *a = (*a).max(*b);
                    }
                }
            }
            for (slot, &q) in qs.iter().enumerate() {
                let i = pos[r][slot];
                f[q] = if reverse {
                    (self.wires[q].len() - i) as u32
                } else {
                    i as u32 + 1
                };
            }
            let total: u64 = f.iter().map(|&x| u64::from(x)).sum();
            counts[r] = total / 2 - 1;
            frontier[r * n..(r + 1) * n].copy_from_slice(&f);
        }
        counts
    }
}

/// Undirected qubit connectivity; edge weight = number of real two-qubit gates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QubitGraph {
    num_qubits: usize,
    edges: BTreeMap<(usize, usize), usize>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl QubitGraph {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            edges: BTreeMap::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub(crate) fn add(&mut self, a: usize, b: usize) {
        *self.edges.entry(key(a, b)).or_insert(0) += 1;
    }

    pub(crate) fn decrement(&mut self, a: usize, b: usize) -> Result<()> {
        let k = key(a, b);
        let w = self.edges.get_mut(&k).ok_or(Error::NoSuchEdge(k.0, k.1))?;
        *w -= 1;
        if *w == 0 {
            self.edges.remove(&k);
        }
        Ok(())
    }

    pub fn weight(&self, a: usize, b: usize) -> usize {
        self.edges.get(&key(a, b)).copied().unwrap_or(0)
    }

    /// Edges `((a, b), weight)` with `a < b`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.edges.iter().map(|(k, w)| (*k, *w))
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> usize {
        self.edges.values().sum()
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.num_qubits);
        for &(a, b) in self.edges.keys() {
            uf.union(a, b);
        }
        uf.groups()
    }
}

/// Disjoint-set forest with path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Sets as sorted vectors, ordered by smallest member.
    pub fn groups(&mut self) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.parent.len() {
            let r = self.find(x);
            by_root.entry(r).or_default().push(x);
        }
        let mut out: Vec<Vec<usize>> = by_root.into_values().collect();
        out.sort_by_key(|g| g[0]);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> OperationGraph {
        // g0(0,1) g1(1,2) g2(0,1)
        let mut g = OperationGraph::new(3);
        g.push(GateId(0), [0, 1]);
        g.push(GateId(1), [1, 2]);
        g.push(GateId(2), [0, 1]);
        g
    }

    #[test]
    fn edges_follow_wires() {
        let e = chain().edges();
        assert_eq!(e.len(), 3);
        assert!(e.contains(&OpEdge {
            from: GateId(0),
            to: GateId(2),
            qubit: 0
        }));
    }

    #[test]
    fn removal_relinks_wire() {
        let mut g = chain();
        g.remove(GateId(1));
        let e = g.edges();
        assert!(e.contains(&OpEdge {
            from: GateId(0),
            to: GateId(2),
            qubit: 1
        }));
    }

    #[test]
    fn closure_counts() {
        let g = chain();
        assert_eq!(g.ancestor_counts(), vec![0, 1, 2]);
        assert_eq!(g.descendant_counts(), vec![2, 1, 0]);
    }

    #[test]
    fn weights_and_components() {
        let mut q = QubitGraph::new(4);
        q.add(0, 1);
        q.add(1, 0);
        q.add(2, 3);
        assert_eq!(q.weight(1, 0), 2);
        q.decrement(0, 1).unwrap();
        q.decrement(0, 1).unwrap();
        assert!(q.decrement(0, 1).is_err());
        assert_eq!(q.components(), vec![vec![0], vec![1], vec![2, 3]]);
    }
}
