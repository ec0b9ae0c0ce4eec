//! Graphs, orientations, configurations and the measurement map.
//!
//! Vertices are `0..n` internally (the file formats are 1-indexed). Edges
//! are unordered pairs stored as `(i, j)` with `i < j`, sorted
//! lexicographically; coordinate `k` of every length vector, cycle vector
//! and orientation refers to `edges[k]`.

mod generate;
pub mod io;
mod iso;

pub use generate::{
    complete, complete_bipartite, cube, cycle, generate_graph, petersen, prism, sample_configuration, wheel, Family,
};
pub use iso::{find_isomorphism, vertex_map_from_edge_map};

use std::collections::VecDeque;

use thiserror::Error;

use crate::exactmath::{Matrix, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is a loop")]
    Loop(usize, usize),
    #[error("edge ({0}, {1}) appears more than once")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("edge {0} has coincident endpoints")]
    CoincidentEndpoints(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("orientation arc for edge {0} does not match the edge")]
    BadArc(usize),
    #[error("no {family} graph exists on {n} vertices")]
    InfeasibleFamily { family: String, n: usize },
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a simple graph; endpoint order within an edge is irrelevant.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange(a, b, n));
            }
            if a == b {
                return Err(GraphError::Loop(a, b));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Graph { n, edges: list })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    /// Dimension of the cycle space, `m - n + (#components)`.
    pub fn cycle_rank(&self) -> usize {
        self.m() + self.component_count() - self.n
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// Neighbour lists `(neighbour, edge index)`, sorted by neighbour.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let adj = self.adjacency();
        let mut count = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &(w, _) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.component_count() == 1
    }

    /// Graph obtained by deleting the given vertices (remaining vertices are
    /// renumbered in increasing order).
    pub fn without_vertices(&self, removed: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if !removed.contains(&v) {
                index[v] = next;
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| index[a] != usize::MAX && index[b] != usize::MAX)
            .map(|&(a, b)| (index[a], index[b]));
        Graph::new(next, edges).expect("induced subgraph of a simple graph is simple")
    }

    /// Returns `true` iff the graph has more than `k` vertices and stays
    /// connected after deleting any `k - 1` of them.
    pub fn is_k_connected(&self, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        if self.n <= k || !self.is_connected() {
            return false;
        }
        let mut subset: Vec<usize> = (0..k - 1).collect();
        loop {
            if !self.without_vertices(&subset).is_connected() {
                return false;
            }
            // next (k-1)-subset in lexicographic order
            let r = subset.len();
            let Some(i) = (0..r).rev().find(|&i| subset[i] < self.n - r + i) else {
                return true;
            };
            subset[i] += 1;
            for j in i + 1..r {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }
}

/// Per-edge direction `(tail, head)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    arcs: Vec<(usize, usize)>,
}

impl Orientation {
    pub fn from_arcs(g: &Graph, arcs: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if arcs.len() != g.m() {
            return Err(GraphError::LengthMismatch { expected: g.m(), found: arcs.len() });
        }
        for (k, &(t, h)) in arcs.iter().enumerate() {
            if (t.min(h), t.max(h)) != g.edge(k) {
                return Err(GraphError::BadArc(k));
            }
        }
        Ok(Orientation { arcs })
    }

    /// Every edge directed from its lower to its higher endpoint.
    pub fn ascending(g: &Graph) -> Self {
        Orientation { arcs: g.edges().to_vec() }
    }

    /// `signs[k] = +1` keeps edge `k` ascending, `-1` reverses it.
    pub fn from_signs(g: &Graph, signs: &[i8]) -> Self {
        assert_eq!(signs.len(), g.m());
        let arcs = g.edges().iter().zip(signs).map(|(&(a, b), &s)| if s >= 0 { (a, b) } else { (b, a) }).collect();
        Orientation { arcs }
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn tail(&self, k: usize) -> usize {
        self.arcs[k].0
    }

    pub fn head(&self, k: usize) -> usize {
        self.arcs[k].1
    }

    /// `+1` if edge `k` points from lower to higher vertex index.
    pub fn sign(&self, k: usize) -> i8 {
        if self.arcs[k].0 < self.arcs[k].1 {
            1
        } else {
            -1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.arcs.len()).map(|k| self.sign(k)).collect()
    }

    pub fn flipped(&self) -> Self {
        Orientation { arcs: self.arcs.iter().map(|&(t, h)| (h, t)).collect() }
    }

    /// Representative of `{self, self.flipped()}` in which edge 0 ascends.
    pub fn canonical(&self) -> Self {
        if self.arcs.first().is_some_and(|&(t, h)| t > h) {
            self.flipped()
        } else {
            self.clone()
        }
    }

    pub fn equal_up_to_flip(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Positions of the `n` points on the line.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration<T = crate::Int> {
    positions: Vec<T>,
}

impl<T> Configuration<T> {
    pub fn new(positions: Vec<T>) -> Self {
        Configuration { positions }
    }

    pub fn positions(&self) -> &[T] {
        &self.positions
    }

    pub fn into_positions(self) -> Vec<T> {
        self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

impl<T: Scalar + PartialOrd> Configuration<T> {
    /// Translates the smallest position to zero, then reflects if the
    /// reflected vector is lexicographically smaller. Two configurations
    /// are congruent iff their normal forms are equal.
    pub fn normalized(&self) -> Self {
        let Some(min) = self.positions.iter().cloned().reduce(|a, b| if b < a { b } else { a }) else {
            return self.clone();
        };
        let shifted: Vec<T> = self.positions.iter().map(|x| x.clone() - min.clone()).collect();
        let max = shifted.iter().cloned().reduce(|a, b| if b > a { b } else { a }).unwrap();
        let reflected: Vec<T> = shifted.iter().map(|x| max.clone() - x.clone()).collect();
        let pick = match reflected.partial_cmp(&shifted) {
            Some(std::cmp::Ordering::Less) => reflected,
            _ => shifted,
        };
        Configuration { positions: pick }
    }

    pub fn congruent_to(&self, other: &Self) -> bool {
        self.len() == other.len() && self.normalized() == other.normalized()
    }

    /// The configuration with vertex `v` of the result at `self[map[v]]`.
    pub fn permuted(&self, map: &[usize]) -> Self {
        Configuration { positions: map.iter().map(|&i| self.positions[i].clone()).collect() }
    }
}

/// The orientation induced by point order: each edge points toward its
/// endpoint with the larger position.
pub fn configuration_orientation<T: PartialOrd>(g: &Graph, p: &Configuration<T>) -> Result<Orientation, GraphError> {
    let x = p.positions();
    if x.len() != g.n() {
        return Err(GraphError::LengthMismatch { expected: g.n(), found: x.len() });
    }
    let mut arcs = Vec::with_capacity(g.m());
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        if x[i] < x[j] {
            arcs.push((i, j));
        } else if x[j] < x[i] {
            arcs.push((j, i));
        } else {
            return Err(GraphError::CoincidentEndpoints(k));
        }
    }
    Ok(Orientation { arcs })
}

/// Signed edge-vertex incidence matrix (`m x n`): row `k` has `-1` at the
/// tail and `+1` at the head of edge `k`.
pub fn incidence_matrix<T: Scalar>(g: &Graph, sigma: &Orientation) -> Matrix<T> {
    let mut m = Matrix::zeros(g.m(), g.n());
    for k in 0..g.m() {
        m[(k, sigma.tail(k))] = -T::one();
        m[(k, sigma.head(k))] = T::one();
    }
    m
}

/// Edge lengths `|p_j - p_i|` in canonical edge order.
pub fn measure<T: Scalar>(g: &Graph, p: &Configuration<T>) -> Vec<T> {
    let x = p.positions();
    g.edges().iter().map(|&(i, j)| (x[j].clone() - x[i].clone()).abs()).collect()
}

/// BFS spanning tree rooted at vertex 0 (neighbours visited in index order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    /// `parent[v] = Some((parent vertex, edge index))`, `None` for the root.
    pub parent: Vec<Option<(usize, usize)>>,
    pub depth: Vec<usize>,
    /// BFS visiting order.
    pub order: Vec<usize>,
    pub tree_edges: Vec<usize>,
}

impl SpanningTree {
    pub fn bfs(g: &Graph) -> Result<Self, GraphError> {
        let n = g.n();
        let adj = g.adjacency();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut tree_edges = Vec::new();
        if n > 0 {
            let mut queue = VecDeque::from([0]);
            seen[0] = true;
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &(w, k) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some((v, k));
                        depth[w] = depth[v] + 1;
                        tree_edges.push(k);
                        queue.push_back(w);
                    }
                }
            }
        }
        if order.len() != n {
            return Err(GraphError::Disconnected);
        }
        tree_edges.sort_unstable();
        Ok(SpanningTree { parent, depth, order, tree_edges })
    }

    pub fn contains_edge(&self, k: usize) -> bool {
        self.tree_edges.binary_search(&k).is_ok()
    }

    /// Tree path from `a` to `b` as a vertex sequence including both ends.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut x, mut y) = (a, b);
        let mut left = vec![x];
        let mut right = vec![y];
        while x != y {
            if self.depth[x] >= self.depth[y] {
                x = self.parent[x].expect("non-root has a parent").0;
                left.push(x);
            } else {
                y = self.parent[y].expect("non-root has a parent").0;
                right.push(y);
            }
        }
        right.pop();
        left.extend(right.into_iter().rev());
        left
    }
}

/// A simple cycle given as a closed walk: `edges[i]` joins `vertices[i]`
/// and `vertices[(i + 1) % len]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Cycle {
    pub fn from_vertices(g: &Graph, vertices: Vec<usize>) -> Option<Self> {
        let len = vertices.len();
        let edges = (0..len).map(|i| g.edge_index(vertices[i], vertices[(i + 1) % len])).collect::<Option<Vec<_>>>()?;
        Some(Cycle { vertices, edges })
    }

    /// Sorted edge indices.
    pub fn edge_set(&self) -> Vec<usize> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    /// Signed cycle vector: `+1` on edges traversed tail-to-head, `-1` on
    /// edges traversed against their direction.
    pub fn signed_vector<T: Scalar>(&self, g: &Graph, sigma: &Orientation) -> Vec<T> {
        let mut w = vec![T::zero(); g.m()];
        let len = self.vertices.len();
        for (i, &k) in self.edges.iter().enumerate() {
            let from = self.vertices[i];
            let to = self.vertices[(i + 1) % len];
            debug_assert_eq!((from.min(to), from.max(to)), g.edge(k));
            w[k] = if sigma.arcs[k] == (from, to) { T::one() } else { -T::one() };
        }
        w
    }
}

/// Fundamental cycles of the BFS spanning tree, one per non-tree edge in
/// canonical edge order. For non-tree edge `{i, j}` the cycle walks
/// `i -> j` across the edge and returns along the tree path.
pub fn fundamental_cycle_basis(g: &Graph) -> Result<(SpanningTree, Vec<Cycle>), GraphError> {
    let tree = SpanningTree::bfs(g)?;
    let mut cycles = Vec::with_capacity(g.m() + 1 - g.n().max(1));
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        if tree.contains_edge(k) {
            continue;
        }
        // j ... i along the tree, then the edge i -> j closes the walk
        let vertices = {
            let mut v = vec![i];
            v.extend(tree.path(j, i).into_iter().take_while(|&x| x != i));
            v
        };
        let len = vertices.len();
        let edges = (0..len)
            .map(|t| g.edge_index(vertices[t], vertices[(t + 1) % len]).expect("tree path edges exist"))
            .collect();
        cycles.push(Cycle { vertices, edges });
    }
    Ok((tree, cycles))
}

/// The `c x m` matrix of signed fundamental cycle vectors.
pub fn cycle_space_matrix<T: Scalar>(g: &Graph, sigma: &Orientation) -> Result<Matrix<T>, GraphError> {
    let (_, cycles) = fundamental_cycle_basis(g)?;
    let rows = cycles.iter().map(|c| c.signed_vector(g, sigma)).collect();
    Ok(Matrix::from_rows(g.m(), rows))
}

/// True iff the edge subset contains no cycle (union-find check).
pub fn is_acyclic(g: &Graph, edges: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &k in edges {
        let (a, b) = g.edge(k);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

/// `a == b` or `a == -b`.
pub fn equal_up_to_sign<T: Scalar>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && (a == b || a.iter().zip(b).all(|(x, y)| *x == -y.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Int;

    fn cfg(v: &[i64]) -> Configuration<Int> {
        Configuration::new(v.iter().map(|&x| Int::from(x)).collect())
    }

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert_eq!(Graph::new(3, [(1, 1)]), Err(GraphError::Loop(1, 1)));
        assert_eq!(Graph::new(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert!(matches!(Graph::new(2, [(0, 2)]), Err(GraphError::VertexOutOfRange(..))));
        let g = Graph::new(3, [(2, 1), (1, 0), (0, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn configuration_orientation_examples() {
        let k3 = complete(3);
        let up = configuration_orientation(&k3, &cfg(&[1, 5, 12])).unwrap();
        assert_eq!(up.arcs(), &[(0, 1), (0, 2), (1, 2)]);
        let down = configuration_orientation(&k3, &cfg(&[12, 5, 1])).unwrap();
        assert_eq!(down.arcs(), &[(1, 0), (2, 0), (2, 1)]);
        let e = Graph::new(2, [(0, 1)]).unwrap();
        assert_eq!(configuration_orientation(&e, &cfg(&[7, 7])), Err(GraphError::CoincidentEndpoints(0)));
    }

    #[test]
    fn incidence_examples() {
        let e = Graph::new(2, [(0, 1)]).unwrap();
        let m: Matrix<i64> = incidence_matrix(&e, &Orientation::ascending(&e));
        assert_eq!(m.row(0), &[-1, 1]);
        let k3 = complete(3);
        let m: Matrix<i64> = incidence_matrix(&k3, &Orientation::ascending(&k3));
        assert_eq!(m.to_rows(), vec![vec![-1, 1, 0], vec![-1, 0, 1], vec![0, -1, 1]]);
        let flipped: Matrix<i64> = incidence_matrix(&k3, &Orientation::from_signs(&k3, &[1, -1, 1]));
        assert_eq!(flipped.row(1), &[1, 0, -1]);
    }

    #[test]
    fn measure_examples() {
        assert_eq!(measure(&complete(3), &cfg(&[1, 5, 12])), ints(&[4, 11, 7]));
        let k4 = complete(4);
        assert_eq!(measure(&k4, &cfg(&[1, 5, 12, 30])), ints(&[4, 11, 29, 7, 25, 18]));
        let reflected = cfg(&[99, 95, 88, 70]);
        assert_eq!(measure(&k4, &reflected), measure(&k4, &cfg(&[1, 5, 12, 30])));
        // l = M p
        let p = cfg(&[1, 5, 12, 30]);
        let sigma = configuration_orientation(&k4, &p).unwrap();
        let m: Matrix<Int> = incidence_matrix(&k4, &sigma);
        assert_eq!(m.mul_vec(p.positions()), measure(&k4, &p));
    }

    #[test]
    fn fundamental_cycles() {
        let (tree, cycles) = fundamental_cycle_basis(&complete(3)).unwrap();
        assert_eq!(tree.tree_edges, vec![0, 1]);
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].edge_set(), vec![0, 1, 2]);
        let (_, cycles) = fundamental_cycle_basis(&complete(4)).unwrap();
        assert_eq!(cycles.len(), 3);
        let path = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(fundamental_cycle_basis(&path).unwrap().1.is_empty());
        let split = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(fundamental_cycle_basis(&split), Err(GraphError::Disconnected));
    }

    #[test]
    fn cycle_vectors_are_stresses() {
        let k4 = complete(4);
        let p = cfg(&[1, 5, 12, 30]);
        let sigma = configuration_orientation(&k4, &p).unwrap();
        let l = measure(&k4, &p);
        let (_, cycles) = fundamental_cycle_basis(&k4).unwrap();
        for c in &cycles {
            let w: Vec<Int> = c.signed_vector(&k4, &sigma);
            assert_eq!(crate::exactmath::dot(&w, &l), Int::from(0));
        }
    }

    #[test]
    fn connectivity_examples() {
        assert!(complete(4).is_k_connected(3));
        let bowtie = Graph::new(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]).unwrap();
        assert!(!bowtie.is_k_connected(2));
        assert!(cycle(5).is_k_connected(2));
        assert!(!cycle(5).is_k_connected(3));
        assert!(petersen().is_k_connected(3));
    }

    #[test]
    fn normalization() {
        let a = cfg(&[12, 5, 1]);
        assert_eq!(a.normalized(), cfg(&[0, 7, 11]));
        let b = cfg(&[1, 5, 12]);
        assert_eq!(b.normalized(), cfg(&[0, 4, 11]));
        assert!(cfg(&[3, 7, 14]).congruent_to(&b));
        assert!(cfg(&[11, 7, 0]).congruent_to(&b));
        assert!(!cfg(&[0, 7, 11]).congruent_to(&b));
    }

    #[test]
    fn orientation_flips() {
        let k3 = complete(3);
        let s = Orientation::from_signs(&k3, &[-1, 1, 1]);
        assert_eq!(s.canonical(), s.flipped());
        assert!(s.equal_up_to_flip(&s.flipped()));
        assert!(!s.equal_up_to_flip(&Orientation::ascending(&k3)));
    }

    #[test]
    fn acyclicity() {
        let k4 = complete(4);
        assert!(is_acyclic(&k4, &[0, 1, 2]));
        assert!(!is_acyclic(&k4, &[0, 1, 3]));
        assert!(is_acyclic(&k4, &[]));
    }
}
