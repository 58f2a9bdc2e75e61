use std::collections::VecDeque;

/// Undirected coupling graph with all-pairs hop distances.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<usize>>,
}

impl CouplingGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut norm: Vec<(usize, usize)> =
            edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        norm.sort_unstable();
        norm.dedup();
        for &(a, b) in &norm {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let dist = (0..n).map(|s| bfs(&adj, s)).collect();
        Self {
            n,
            edges: norm,
            adj,
            dist,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adj[q].len()
    }

    pub fn are_coupled(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Hop distance; `usize::MAX / 4` when unreachable.
    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.dist[a][b]
    }

    /// Vertices of a shortest path from `a` to `b`, both included.
    pub fn shortest_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if self.dist[a][b] >= UNREACHABLE {
            return None;
        }
        let mut path = vec![a];
        let mut at = a;
        while at != b {
            at = *self.adj[at]
                .iter()
                .find(|&&m| self.dist[m][b] + 1 == self.dist[at][b])?;
            path.push(at);
        }
        Some(path)
    }
}

const UNREACHABLE: usize = usize::MAX / 4;

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut d = vec![UNREACHABLE; adj.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if d[w] == UNREACHABLE {
                d[w] = d[v] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

pub fn line(n: usize) -> CouplingGraph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    CouplingGraph::new(n, &edges)
}

/// The 27-qubit heavy-hex layout of IBM Falcon processors.
pub fn falcon27() -> CouplingGraph {
    const EDGES: [(usize, usize); 28] = [
        (0, 1),
        (1, 2),
        (1, 4),
        (2, 3),
        (3, 5),
        (4, 7),
        (5, 8),
        (6, 7),
        (7, 10),
        (8, 9),
        (8, 11),
        (10, 12),
        (11, 14),
        (12, 13),
        (12, 15),
        (13, 14),
        (14, 16),
        (15, 18),
        (16, 19),
        (17, 18),
        (18, 21),
        (19, 20),
        (19, 22),
        (21, 23),
        (22, 25),
        (23, 24),
        (24, 25),
        (25, 26),
    ];
    CouplingGraph::new(27, &EDGES)
}

/// Heavy-hex lattice: `rows` chains of `row_len` qubits, neighbouring chains
/// joined by bridge qubits every fourth column, alternating offsets.
pub fn heavy_hex(rows: usize, row_len: usize) -> CouplingGraph {
    let mut edges = Vec::new();
    let at = |r: usize, c: usize| r * row_len + c;
    for r in 0..rows {
        for c in 1..row_len {
            edges.push((at(r, c - 1), at(r, c)));
        }
    }
    let mut next = rows * row_len;
    for r in 0..rows.saturating_sub(1) {
        let offset = if r % 2 == 0 { 0 } else { 2 };
        for c in (offset..row_len).step_by(4) {
            edges.push((at(r, c), next));
            edges.push((next, at(r + 1, c)));
            next += 1;
        }
    }
    CouplingGraph::new(next, &edges)
}
