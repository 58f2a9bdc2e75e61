//! Independent oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use gatevm::{Circuit, GateKind, Instruction};
use rand::prelude::*;

/// Random circuit over the single-qubit rotations and CX/CZ/RZZ, with
/// `two_qubit` two-qubit gates placed uniformly at random.
pub fn random_circuit(rng: &mut impl Rng, n: usize, two_qubit: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Instruction::h(q));
    }
    for _ in 0..two_qubit {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let theta = rng.gen_range(0.0..TAU);
        c.push(match rng.gen_range(0..3) {
            0 => Instruction::cx(a, b),
            1 => Instruction::cz(a, b),
            _ => Instruction::rzz(a, b, theta),
        });
        let q = rng.gen_range(0..n);
        let phi = rng.gen_range(0.0..TAU);
        c.push(match rng.gen_range(0..3) {
            0 => Instruction::rx(q, phi),
            1 => Instruction::ry(q, phi),
            _ => Instruction::rz(q, phi),
        });
    }
    c
}

/// Instruction indices of the two-qubit gates.
pub fn two_qubit_indices(c: &Circuit) -> Vec<usize> {
    c.instructions
        .iter()
        .enumerate()
        .filter(|(_, i)| i.qubits.len() == 2)
        .map(|(k, _)| k)
        .collect()
}

/// Ordered qubit pairs `(i, j)`, `i != j`, such that an operation on `j`
/// reaches an operation on `i` in the instruction DAG. Instructions listed in
/// `cut` are split into two unrelated one-qubit nodes. Closure by
/// Floyd-Warshall.
pub fn dependency_pairs(c: &Circuit, cut: &[usize]) -> BTreeSet<(usize, usize)> {
    let mut node_qubits: Vec<usize> = Vec::new();
    let mut node_of: Vec<Vec<usize>> = Vec::new();
    for (k, inst) in c.instructions.iter().enumerate() {
        if inst.kind == GateKind::Barrier || inst.kind == GateKind::Measure {
            node_of.push(Vec::new());
            continue;
        }
        let mut ids = Vec::new();
        if cut.contains(&k) {
            for &q in &inst.qubits {
                ids.push(node_qubits.len());
                node_qubits.push(q);
            }
        } else {
            ids.push(node_qubits.len());
            node_qubits.push(usize::MAX);
        }
        node_of.push(ids);
    }
    let m = node_qubits.len();
    let mut reach = vec![vec![false; m]; m];
    let mut last: Vec<Option<usize>> = vec![None; c.num_qubits];
    let mut on_qubit: Vec<Vec<usize>> = vec![Vec::new(); c.num_qubits];
    for (k, inst) in c.instructions.iter().enumerate() {
        for (slot, &q) in inst.qubits.iter().enumerate() {
            let Some(&node) = node_of[k].get(if node_of[k].len() == 1 { 0 } else { slot }) else {
                continue;
            };
            if let Some(p) = last[q] {
                reach[p][node] = true;
            }
            last[q] = Some(node);
            on_qubit[q].push(node);
        }
    }
    for v in 0..m {
        reach[v][v] = true;
    }
    for k in 0..m {
        for i in 0..m {
            if reach[i][k] {
                for j in 0..m {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..c.num_qubits {
        for j in 0..c.num_qubits {
            if i != j
                && on_qubit[j]
                    .iter()
                    .any(|&a| on_qubit[i].iter().any(|&b| reach[a][b]))
            {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Interaction weights between qubit pairs, counting every two-qubit gate
/// not listed in `cut`.
pub fn interaction_weights(c: &Circuit, cut: &[usize]) -> Vec<Vec<usize>> {
    let n = c.num_qubits;
    let mut w = vec![vec![0; n]; n];
    for (k, inst) in c.instructions.iter().enumerate() {
        if inst.qubits.len() == 2 && !cut.contains(&k) {
            let (a, b) = (inst.qubits[0], inst.qubits[1]);
            w[a][b] += 1;
            w[b][a] += 1;
        }
    }
    w
}

/// Smallest total weight of edges between blocks over every partition of the
/// vertices into blocks of at most `max_block` vertices.
pub fn brute_force_min_cut(w: &[Vec<usize>], max_block: usize) -> usize {
    fn go(
        v: usize,
        w: &[Vec<usize>],
        max_block: usize,
        labels: &mut Vec<usize>,
        sizes: &mut Vec<usize>,
        best: &mut usize,
    ) {
        let n = w.len();
        if v == n {
            let mut cost = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if labels[a] != labels[b] {
                        cost += w[a][b];
                    }
                }
            }
            *best = (*best).min(cost);
            return;
        }
        for block in 0..=sizes.len() {
            if block == sizes.len() {
                sizes.push(0);
            }
            if sizes[block] < max_block {
                sizes[block] += 1;
                labels.push(block);
                go(v + 1, w, max_block, labels, sizes, best);
                labels.pop();
                sizes[block] -= 1;
            }
            if sizes[block] == 0 {
                sizes.pop();
            }
        }
    }
    let mut best = usize::MAX;
    go(0, w, max_block, &mut Vec::new(), &mut Vec::new(), &mut best);
    best
}

/// Every subset of `items` with at most `k` elements.
pub fn subsets_up_to(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &x in items {
        let grown: Vec<Vec<usize>> = out
            .iter()
            .filter(|s| s.len() < k)
            .map(|s| s.iter().copied().chain([x]).collect())
            .collect();
        out.extend(grown);
    }
    out
}

/// Connected components of the interaction graph, each sorted, ordered by
/// smallest member.
pub fn components(w: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = w.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        let mut comp = Vec::new();
        seen[s] = true;
        while let Some(v) = stack.pop() {
            comp.push(v);
            for u in 0..n {
                if w[v][u] > 0 && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}
