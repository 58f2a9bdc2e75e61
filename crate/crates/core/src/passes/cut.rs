//! Circuit cutting: partition the qubit graph into blocks of at most `s`
//! qubits and virtualize every gate between blocks.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ir::VirtualCircuit;

use super::PassConfig;

/// Largest component the exhaustive cutter accepts.
pub const EXACT_CUT_LIMIT: usize = 14;

const KL_RESTARTS: usize = 10;

/// A partition of the qubits and its cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSolution {
    /// Block index of every qubit.
    pub assignment: Vec<usize>,
    /// Qubit-graph edges between different blocks, `(a, b)` with `a < b`.
    pub cut_edges: Vec<(usize, usize)>,
    pub cost: usize,
    /// Sum of squared block sizes.
    pub balance: usize,
}

/// Dense symmetric weight matrix over a vertex subset.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    w: Vec<usize>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            w: vec![0; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = ((usize, usize), usize)>) -> Self {
        let mut g = Self::new(n);
        for ((a, b), w) in edges {
            g.add(a, b, w);
        }
        g
    }

    pub fn add(&mut self, a: usize, b: usize, w: usize) {
        self.w[a * self.n + b] += w;
        self.w[b * self.n + a] += w;
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weight(&self, a: usize, b: usize) -> usize {
        self.w[a * self.n + b]
    }

    fn induced(&self, vertices: &[usize]) -> WeightedGraph {
        let mut g = WeightedGraph::new(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                g.add(i, j, self.weight(a, b));
            }
        }
        g
    }

    fn components_of(&self, vertices: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; vertices.len()];
        let mut out = Vec::new();
        for start in 0..vertices.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(i) = stack.pop() {
                comp.push(vertices[i]);
                for j in 0..vertices.len() {
                    if !seen[j] && self.weight(vertices[i], vertices[j]) > 0 {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Cost, cut edges and balance of an assignment.
    pub fn evaluate(&self, assignment: &[usize]) -> CutSolution {
        let mut cut_edges = Vec::new();
        let mut cost = 0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                let w = self.weight(a, b);
                if w > 0 && assignment[a] != assignment[b] {
                    cut_edges.push((a, b));
                    cost += w;
                }
            }
        }
        let blocks = assignment.iter().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; blocks];
        for &b in assignment {
            sizes[b] += 1;
        }
        let balance = sizes.iter().map(|s| s * s).sum();
        CutSolution {
            assignment: assignment.to_vec(),
            cut_edges,
            cost,
            balance,
        }
    }
}

struct Search<'a> {
    g: &'a WeightedGraph,
    max_block: usize,
    assignment: Vec<usize>,
    sizes: Vec<usize>,
    bound: usize,
    best: Option<(usize, usize, Vec<usize>)>,
}

impl Search<'_> {
    fn go(&mut self, v: usize, cut: usize) {
        if let Some((c, _, _)) = &self.best {
            if cut > *c {
                return;
            }
        } else if cut > self.bound {
            return;
        }
        if v == self.g.len() {
            let balance: usize = self.sizes.iter().map(|s| s * s).sum();
            let better = match &self.best {
                None => true,
                Some((c, b, a)) => (cut, balance, &self.assignment) < (*c, *b, a),
            };
            if better {
                self.best = Some((cut, balance, self.assignment.clone()));
            }
            return;
        }
        for block in 0..=self.sizes.len() {
            if block < self.sizes.len() && self.sizes[block] >= self.max_block {
                continue;
            }
            let added: usize = (0..v)
                .filter(|&u| self.assignment[u] != block)
                .map(|u| self.g.weight(u, v))
                .sum();
            if block == self.sizes.len() {
                self.sizes.push(0);
            }
            self.sizes[block] += 1;
            self.assignment[v] = block;
            self.go(v + 1, cut + added);
            self.sizes[block] -= 1;
            if self.sizes[block] == 0 {
                self.sizes.pop();
            }
        }
    }
}

/// Exhaustive optimum over all partitions with blocks of at most `max_block`
/// vertices: minimal cut weight, then minimal sum of squared sizes, then the
/// lexicographically smallest assignment in canonical block numbering.
pub fn partition_exact(g: &WeightedGraph, max_block: usize) -> Result<CutSolution> {
    if g.len() > EXACT_CUT_LIMIT {
        return Err(Error::InstanceTooLarge {
            what: "component qubits",
            size: g.len(),
            limit: EXACT_CUT_LIMIT,
        });
    }
    let max_block = max_block.max(1);
    let bound = partition_kl(g, max_block, 0).cost;
    let mut s = Search {
        g,
        max_block,
        assignment: vec![0; g.len()],
        sizes: Vec::new(),
        bound,
        best: None,
    };
    s.go(0, 0);
    let (_, _, assignment) = s.best.expect("the heuristic bound is always attainable");
    Ok(g.evaluate(&assignment))
}

/// Kernighan-Lin refinement of a balanced bisection, in place.
fn kl_refine(g: &WeightedGraph, side: &mut [bool]) {
    let n = side.len();
    loop {
        let mut d: Vec<i64> = (0..n)
            .map(|v| {
                (0..n)
                    .map(|u| {
                        let w = g.weight(u, v) as i64;
                        if side[u] == side[v] {
                            -w
                        } else {
                            w
                        }
                    })
                    .sum()
            })
            .collect();
        let mut locked = vec![false; n];
        let mut swaps = Vec::new();
        let mut gains = Vec::new();
        let mut trial = side.to_vec();
        loop {
            let mut best: Option<(i64, usize, usize)> = None;
            for a in (0..n).filter(|&a| !locked[a] && !trial[a]) {
                for b in (0..n).filter(|&b| !locked[b] && trial[b]) {
                    let gain = d[a] + d[b] - 2 * g.weight(a, b) as i64;
                    if best.is_none_or(|(bg, _, _)| gain > bg) {
                        best = Some((gain, a, b));
                    }
                }
            }
            let Some((gain, a, b)) = best else { break };
            locked[a] = true;
            locked[b] = true;
            trial[a] = true;
            trial[b] = false;
            for v in (0..n).filter(|&v| !locked[v]) {
                let (wa, wb) = (g.weight(v, a) as i64, g.weight(v, b) as i64);
                // a moved to side true, b moved to side false
                if trial[v] {
                    d[v] += -2 * wa + 2 * wb;
                } else {
                    d[v] += 2 * wa - 2 * wb;
                }
            }
            swaps.push((a, b));
            gains.push(gain);
        }
        let mut best_k = 0;
        let (mut acc, mut best_acc) = (0i64, 0i64);
        for (k, gain) in gains.iter().enumerate() {
            acc += gain;
            if acc > best_acc {
                best_acc = acc;
                best_k = k + 1;
            }
        }
        if best_k == 0 {
            return;
        }
        for &(a, b) in &swaps[..best_k] {
            side[a] = true;
            side[b] = false;
        }
    }
}

/// Best of several seeded Kernighan-Lin bisections; sides get
/// `floor(n/2)` and `ceil(n/2)` vertices.
pub fn bisect_kl(g: &WeightedGraph, seed: u64) -> Vec<bool> {
    let n = g.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Vec<bool>)> = None;
    for _ in 0..KL_RESTARTS {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut side = vec![false; n];
        for &v in &order[n / 2..] {
            side[v] = true;
        }
        kl_refine(g, &mut side);
        let assignment: Vec<usize> = side.iter().map(|&s| usize::from(s)).collect();
        let cost = g.evaluate(&assignment).cost;
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, side));
        }
    }
    best.map(|(_, s)| s).unwrap_or_default()
}

/// Recursive bisection of the largest connected part until every part has at
/// most `max_block` vertices.
pub fn partition_kl(g: &WeightedGraph, max_block: usize, seed: u64) -> CutSolution {
    let max_block = max_block.max(1);
    let all: Vec<usize> = (0..g.len()).collect();
    let mut parts = g.components_of(&all);
    let mut round = 0u64;
    while let Some(idx) = (0..parts.len())
        .filter(|&i| parts[i].len() > max_block)
        .max_by_key(|&i| (parts[i].len(), std::cmp::Reverse(i)))
    {
        let part = parts.swap_remove(idx);
        let side = bisect_kl(&g.induced(&part), seed.wrapping_add(round));
        round += 1;
        for s in [false, true] {
            let half: Vec<usize> = part
                .iter()
                .zip(&side)
                .filter(|(_, &x)| x == s)
                .map(|(&v, _)| v)
                .collect();
            parts.extend(g.components_of(&half));
        }
    }
    parts.sort_by_key(|p| p[0]);
    let mut assignment = vec![0; g.len()];
    for (b, p) in parts.iter().enumerate() {
        for &v in p {
            assignment[v] = b;
        }
    }
    g.evaluate(&assignment)
}

fn apply_cut(
    vc: &VirtualCircuit,
    cfg: &PassConfig,
    solve: impl Fn(&WeightedGraph) -> Result<CutSolution>,
) -> Result<VirtualCircuit> {
    let qg = vc.qubit_graph();
    let mut cut_edges = Vec::new();
    let mut cost = 0;
    for frag in vc.fragments() {
        if frag.qubits.len() <= cfg.max_fragment_size {
            continue;
        }
        let local = |q: usize| frag.qubits.binary_search(&q).ok();
        let edges = qg
            .edges()
            .filter_map(|((a, b), w)| Some(((local(a)?, local(b)?), w)));
        let g = WeightedGraph::from_edges(frag.qubits.len(), edges);
        let sol = solve(&g)?;
        cost += sol.cost;
        cut_edges.extend(
            sol.cut_edges
                .iter()
                .map(|&(a, b)| (frag.qubits[a], frag.qubits[b])),
        );
    }
    let mut out = vc.clone();
    if cost > cfg.budget {
        return Ok(out);
    }
    for (a, b) in cut_edges {
        out.virt_between(a, b)?;
    }
    Ok(out)
}

/// Optimal cut of every over-size fragment; unchanged if it needs more than
/// `cfg.budget` virtual gates.
pub fn cut_exact(vc: &VirtualCircuit, cfg: &PassConfig) -> Result<VirtualCircuit> {
    apply_cut(vc, cfg, |g| partition_exact(g, cfg.max_fragment_size))
}

/// Kernighan-Lin cut of every over-size fragment, with the same budget rule.
pub fn cut_greedy_kl(vc: &VirtualCircuit, cfg: &PassConfig) -> Result<VirtualCircuit> {
    apply_cut(vc, cfg, |g| {
        Ok(partition_kl(g, cfg.max_fragment_size, cfg.seed))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> WeightedGraph {
        WeightedGraph::from_edges(n, (0..n - 1).map(|i| ((i, i + 1), 1)))
    }

    #[test]
    fn chain_bisects_with_one_edge() {
        let sol = partition_kl(&chain(8), 4, 7);
        assert_eq!(sol.cost, 1);
        assert_eq!(partition_exact(&chain(8), 4).unwrap().cost, 1);
    }

    #[test]
    fn exact_prefers_balanced_blocks() {
        let sol = partition_exact(&chain(6), 5).unwrap();
        assert_eq!(sol.cost, 1);
        assert_eq!(sol.balance, 18);
    }

    #[test]
    fn exact_rejects_large_components() {
        assert!(partition_exact(&chain(15), 4).is_err());
    }

    #[test]
    fn blocks_of_one() {
        let sol = partition_exact(&chain(4), 1).unwrap();
        assert_eq!(sol.cost, 3);
        assert_eq!(sol.assignment, vec![0, 1, 2, 3]);
    }
}
