//! Divisor theory on finite connected multigraphs: the Laplacian, genus,
//! spanning-tree count, reduced divisors via Dhar's burning algorithm, and
//! the divisor rank (exhaustive for small degrees, Riemann-Roch above
//! `2g - 2`).

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::smith::{snf, SmithDecomposition};

/// A finite connected multigraph without self-loops, stored as a symmetric
/// multiplicity matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    adj: Vec<Vec<u64>>,
    edges: Vec<(usize, usize, u64)>,
}

pub type GraphDivisor = Vec<BigInt>;

impl MultiGraph {
    pub fn new(n: usize, edge_list: &[(usize, usize, u64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("graph must have at least one vertex"));
        }
        let mut adj = vec![vec![0u64; n]; n];
        for &(u, v, m) in edge_list {
            if u >= n || v >= n {
                return Err(Error::validation(format!(
                    "edge ({u},{v}) references a vertex out of range"
                )));
            }
            if u == v {
                return Err(Error::validation("self-loops are rejected"));
            }
            if m == 0 {
                return Err(Error::validation("edge multiplicity must be positive"));
            }
            adj[u][v] += m;
            adj[v][u] += m;
        }
        let g = MultiGraph {
            n,
            adj,
            edges: edge_list.to_vec(),
        };
        if !g.is_connected() {
            return Err(Error::validation("graph must be connected"));
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, 1));
            }
        }
        Self::new(n, &edges).expect("complete graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_list(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        self.adj[u][v]
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.adj[v].iter().sum()
    }

    pub fn edge_count(&self) -> u64 {
        (0..self.n).map(|v| self.degree(v)).sum::<u64>() / 2
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for u in 0..self.n {
                if self.adj[v][u] > 0 && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Graph Laplacian: degree on the diagonal, minus multiplicities off it.
    pub fn laplacian(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.n, self.n);
        for u in 0..self.n {
            m[(u, u)] = BigInt::from(self.degree(u));
            for v in 0..self.n {
                if v != u {
                    m[(u, v)] = -BigInt::from(self.adj[u][v]);
                }
            }
        }
        m
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn genus(&self) -> i64 {
        self.edge_count() as i64 - self.n as i64 + 1
    }

    /// Number of spanning trees, by the matrix-tree theorem (any cofactor of
    /// the Laplacian).
    pub fn spanning_tree_count(&self) -> BigInt {
        if self.n == 1 {
            return BigInt::one();
        }
        let l = self.laplacian();
        let mut minor = IntMatrix::zero(self.n - 1, self.n - 1);
        for i in 1..self.n {
            for j in 1..self.n {
                minor[(i - 1, j - 1)] = l[(i, j)].clone();
            }
        }
        minor.det()
    }

    /// Canonical divisor: coefficient `deg(v) - 2` at every vertex.
    pub fn canonical_divisor(&self) -> GraphDivisor {
        (0..self.n)
            .map(|v| BigInt::from(self.degree(v)) - BigInt::from(2))
            .collect()
    }

    /// The `n - 1` divisors `(v_i) - (v_n)` spanning the degree-zero part.
    pub fn basis_divisors(&self) -> Vec<GraphDivisor> {
        assert!(self.n >= 2, "basis divisors need at least two vertices");
        (0..self.n - 1)
            .map(|i| {
                let mut d = vec![BigInt::zero(); self.n];
                d[i] = BigInt::one();
                d[self.n - 1] = -BigInt::one();
                d
            })
            .collect()
    }

    /// BFS distances from vertex 0.
    fn bfs_layers(&self, root: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for u in 0..self.n {
                if self.adj[v][u] > 0 && dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }
}

pub fn divisor_degree(d: &GraphDivisor) -> BigInt {
    d.iter().sum()
}

pub fn divisor_from_i64(d: &[i64]) -> GraphDivisor {
    d.iter().map(|&x| BigInt::from(x)).collect()
}

/// The unique `q`-reduced divisor linearly equivalent to `d`: non-negative
/// away from `q`, and every non-empty vertex set avoiding `q` can burn.
///
/// Phase 1 pushes all deficits into `q` by borrowing along BFS layers from
/// the outside in; phase 2 is Dhar's algorithm, firing the maximal unburnt
/// set until the fire spreads everywhere.
pub fn q_reduce(g: &MultiGraph, d: &GraphDivisor, q: usize) -> GraphDivisor {
    assert_eq!(d.len(), g.n);
    assert!(q < g.n);
    let mut d = d.clone();
    let dist = g.bfs_layers(q);
    let max_dist = *dist.iter().max().unwrap();

    // phase 1: for each layer from the outside in, borrow the whole outer
    // set enough times to make the layer non-negative; inner layers absorb
    for layer in (1..=max_dist).rev() {
        let outer: Vec<usize> = (0..g.n).filter(|&v| dist[v] >= layer).collect();
        let mut need = BigInt::zero();
        for &v in &outer {
            if dist[v] == layer && d[v].is_negative() {
                let inward: u64 = (0..g.n)
                    .filter(|&u| dist[u] < layer)
                    .map(|u| g.adj[v][u])
                    .sum();
                debug_assert!(inward > 0, "BFS layer has an inward edge");
                let t = (-&d[v] + BigInt::from(inward - 1)) / BigInt::from(inward);
                need = need.max(t);
            }
        }
        if need.is_zero() {
            continue;
        }
        // borrowing the set `outer` t times moves chips across the boundary
        for v in 0..g.n {
            let boundary: u64 = if dist[v] >= layer {
                (0..g.n).filter(|&u| dist[u] < layer).map(|u| g.adj[v][u]).sum()
            } else {
                0
            };
            if boundary > 0 {
                d[v] += &need * BigInt::from(boundary);
            }
            let incoming: u64 = if dist[v] < layer {
                (0..g.n).filter(|&u| dist[u] >= layer).map(|u| g.adj[v][u]).sum()
            } else {
                0
            };
            if incoming > 0 {
                d[v] -= &need * BigInt::from(incoming);
            }
        }
    }
    debug_assert!((0..g.n).all(|v| v == q || !d[v].is_negative()));

    // phase 2: Dhar burning; fire the unburnt set until everything burns
    loop {
        let mut burnt = vec![false; g.n];
        burnt[q] = true;
        loop {
            let mut changed = false;
            for v in 0..g.n {
                if burnt[v] {
                    continue;
                }
                let heat: u64 = (0..g.n).filter(|&u| burnt[u]).map(|u| g.adj[v][u]).sum();
                if BigInt::from(heat) > d[v] {
                    burnt[v] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if burnt.iter().all(|&b| b) {
            return d;
        }
        // fire every unburnt vertex once
        for v in 0..g.n {
            if burnt[v] {
                let gain: u64 = (0..g.n).filter(|&u| !burnt[u]).map(|u| g.adj[v][u]).sum();
                d[v] += BigInt::from(gain);
            } else {
                let loss: u64 = (0..g.n).filter(|&u| burnt[u]).map(|u| g.adj[v][u]).sum();
                d[v] -= BigInt::from(loss);
            }
        }
    }
}

/// Rank oracle for divisors on a fixed graph, with memoization by divisor
/// class.  Class keys come from the Smith normal form of the Laplacian.
pub struct GraphRankOracle {
    graph: MultiGraph,
    laplacian_snf: SmithDecomposition,
    effective_cache: RefCell<HashMap<Vec<BigInt>, bool>>,
    rank_cache: RefCell<HashMap<Vec<BigInt>, i64>>,
}

impl GraphRankOracle {
    pub fn new(graph: MultiGraph) -> Self {
        let laplacian_snf = snf(&graph.laplacian());
        GraphRankOracle {
            graph,
            laplacian_snf,
            effective_cache: RefCell::new(HashMap::new()),
            rank_cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn laplacian_snf(&self) -> &SmithDecomposition {
        &self.laplacian_snf
    }

    /// Canonical key of the linear equivalence class of `d`.
    pub fn class_key(&self, d: &GraphDivisor) -> Vec<BigInt> {
        let c = self.laplacian_snf.u_inv().mul_vec(d);
        let diag = self.laplacian_snf.diagonal();
        c.iter()
            .zip(&diag)
            .map(|(x, s)| if s.is_zero() { x.clone() } else { x.mod_floor(s) })
            .collect()
    }

    /// Whether `d` is in the Laplacian lattice (i.e. principal).
    pub fn is_principal(&self, d: &GraphDivisor) -> bool {
        self.laplacian_snf.solve(d).is_some()
    }

    /// Whether the class of `d` contains an effective divisor.
    pub fn is_effective_class(&self, d: &GraphDivisor) -> bool {
        let deg = divisor_degree(d);
        if deg.is_negative() {
            return false;
        }
        let key = self.class_key(d);
        if let Some(&v) = self.effective_cache.borrow().get(&key) {
            return v;
        }
        let reduced = q_reduce(&self.graph, d, 0);
        let v = !reduced[0].is_negative();
        self.effective_cache.borrow_mut().insert(key, v);
        v
    }

    /// Divisor rank: -1 when no effective equivalent exists, otherwise the
    /// largest `r` such that `d - e` stays effective-equivalent for every
    /// effective `e` of degree `r`.
    pub fn rank(&self, d: &GraphDivisor) -> i64 {
        let deg = divisor_degree(d);
        if deg.is_negative() {
            return -1;
        }
        let g = self.graph.genus();
        let deg_i: i64 = (&deg).try_into().expect("degree fits in machine range");
        if deg_i > 2 * g - 2 {
            return deg_i - g;
        }
        let key = self.class_key(d);
        if let Some(&r) = self.rank_cache.borrow().get(&key) {
            return r;
        }
        let r = self.rank_search(d, deg_i);
        self.rank_cache.borrow_mut().insert(key, r);
        r
    }

    fn rank_search(&self, d: &GraphDivisor, deg: i64) -> i64 {
        if !self.is_effective_class(d) {
            return -1;
        }
        for r in 1..=deg {
            if !self.all_removals_effective(d, r as usize) {
                return r - 1;
            }
        }
        deg
    }

    /// Whether `d - e` is effective-equivalent for every effective `e` of
    /// degree `r` (multisets of vertices).
    fn all_removals_effective(&self, d: &GraphDivisor, r: usize) -> bool {
        let n = self.graph.n;
        let mut counts = vec![0usize; n];
        counts[0] = r;
        loop {
            let mut probe = d.clone();
            for (v, &c) in counts.iter().enumerate() {
                probe[v] -= BigInt::from(c);
            }
            if !self.is_effective_class(&probe) {
                return false;
            }
            if !next_composition(&mut counts) {
                return true;
            }
        }
    }
}

/// Advance a composition `(c_0, ..., c_{n-1})` of fixed total to the next
/// one in reverse-lexicographic order; false when exhausted.
fn next_composition(c: &mut [usize]) -> bool {
    let n = c.len();
    if n <= 1 {
        return false;
    }
    // move one unit from the first nonzero entry to the right
    let first = match c.iter().position(|&x| x > 0) {
        Some(i) => i,
        None => return false,
    };
    if first + 1 == n {
        return false;
    }
    let head = c[first];
    c[first] = 0;
    c[0] = head - 1;
    c[first + 1] += 1;
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> MultiGraph {
        MultiGraph::complete(3)
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(
            k3().laplacian(),
            IntMatrix::from_i64(&[vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]])
        );
        let path = MultiGraph::new(2, &[(0, 1, 1)]).unwrap();
        assert_eq!(path.laplacian(), IntMatrix::from_i64(&[vec![1, -1], vec![-1, 1]]));
        let double = MultiGraph::new(2, &[(0, 1, 2)]).unwrap();
        assert_eq!(
            double.laplacian(),
            IntMatrix::from_i64(&[vec![2, -2], vec![-2, 2]])
        );
    }

    #[test]
    fn genus_examples() {
        let tree = MultiGraph::new(4, &[(0, 1, 1), (1, 2, 1), (1, 3, 1)]).unwrap();
        assert_eq!(tree.genus(), 0);
        assert_eq!(k3().genus(), 1);
        assert_eq!(MultiGraph::new(2, &[(0, 1, 3)]).unwrap().genus(), 2);
    }

    #[test]
    fn spanning_tree_counts() {
        assert_eq!(k3().spanning_tree_count(), BigInt::from(3));
        // Cayley: n^(n-2)
        assert_eq!(MultiGraph::complete(4).spanning_tree_count(), BigInt::from(16));
        let tree = MultiGraph::new(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(tree.spanning_tree_count(), BigInt::one());
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(MultiGraph::new(2, &[(0, 0, 1)]).is_err());
        assert!(MultiGraph::new(3, &[(0, 1, 1)]).is_err()); // disconnected
        assert!(MultiGraph::new(2, &[(0, 1, 0)]).is_err());
        assert!(MultiGraph::new(0, &[]).is_err());
    }

    #[test]
    fn q_reduce_examples() {
        let g = k3();
        // already reduced: 3 chips on the base vertex
        let d = divisor_from_i64(&[3, 0, 0]);
        assert_eq!(q_reduce(&g, &d, 0), d);
        // idempotence and class preservation
        let d2 = divisor_from_i64(&[0, 2, 2]);
        let r = q_reduce(&g, &d2, 0);
        assert!(r[1] >= BigInt::zero() && r[2] >= BigInt::zero());
        assert_eq!(q_reduce(&g, &r, 0), r);
        let diff: Vec<BigInt> = d2.iter().zip(&r).map(|(a, b)| a - b).collect();
        assert!(crate::smith::solve_integer(&g.laplacian(), &diff).is_some());
    }

    #[test]
    fn q_reduce_handles_deep_deficits() {
        // path graph, deficit far from the base vertex
        let g = MultiGraph::new(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let d = divisor_from_i64(&[0, 0, 0, -5]);
        let r = q_reduce(&g, &d, 0);
        assert!((1..4).all(|v| !r[v].is_negative()));
        assert_eq!(divisor_degree(&r), BigInt::from(-5));
    }

    #[test]
    fn canonical_divisor_examples() {
        assert_eq!(k3().canonical_divisor(), divisor_from_i64(&[0, 0, 0]));
        let theta = MultiGraph::new(2, &[(0, 1, 3)]).unwrap();
        assert_eq!(theta.canonical_divisor(), divisor_from_i64(&[1, 1]));
        let path = MultiGraph::new(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(path.canonical_divisor(), divisor_from_i64(&[-1, 0, -1]));
    }

    #[test]
    fn rank_examples() {
        let oracle = GraphRankOracle::new(k3());
        assert_eq!(oracle.rank(&divisor_from_i64(&[-1, 0, 0])), -1);
        assert_eq!(oracle.rank(&divisor_from_i64(&[0, 0, 0])), 0);
        // degree 2 on K_3 (g = 1): Riemann-Roch regime, rank 1
        assert_eq!(oracle.rank(&divisor_from_i64(&[1, 1, 0])), 1);
    }

    #[test]
    fn riemann_roch_identity_small() {
        // r(D) - r(K - D) = deg D - g + 1 on a genus-2 multigraph
        let g = MultiGraph::new(3, &[(0, 1, 2), (1, 2, 1), (0, 2, 1)]).unwrap();
        let oracle = GraphRankOracle::new(g.clone());
        let k = g.canonical_divisor();
        let genus = g.genus();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -2i64..=2 {
                    let d = divisor_from_i64(&[a, b, c]);
                    let kd: Vec<BigInt> = k.iter().zip(&d).map(|(x, y)| x - y).collect();
                    let lhs = oracle.rank(&d) - oracle.rank(&kd);
                    let rhs = (a + b + c) - genus + 1;
                    assert_eq!(lhs, rhs, "D = ({a},{b},{c})");
                }
            }
        }
    }

    #[test]
    fn rank_on_tree_equals_degree() {
        let tree = MultiGraph::new(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let oracle = GraphRankOracle::new(tree);
        assert_eq!(oracle.rank(&divisor_from_i64(&[1, 0, 1])), 2);
        assert_eq!(oracle.rank(&divisor_from_i64(&[0, 1, 0])), 1);
    }
}
