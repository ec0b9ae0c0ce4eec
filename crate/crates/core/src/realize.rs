//! Graph realization from a signed cycle space.
//!
//! The kernel of the cycle-space matrix `W` is the cut space. Written in
//! the parameterized form returned by `right_kernel_basis`, its basis
//! vectors are the fundamental cuts of some spanning tree, so for a graphic
//! input they are `{-1,0,1}`-valued. Every vertex star (a column of the
//! incidence matrix) is a `{-1,0,1}` kernel vector; we enumerate all such
//! vectors by their values on the `n - 1` free coordinates, then search
//! for `n` of them that cover every edge exactly twice with opposite signs.
//! A candidate assembly is accepted only after checking that its cycle
//! space is exactly the row space of `W`.

use std::collections::HashSet;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exactmath::{to_rational, Matrix};
use crate::graph::{Graph, Orientation};
use crate::{Int, IntMatrix, RatMatrix};

/// Default cap on the number of vertices realized by star enumeration
/// (`3^(n-1)` assignments).
pub const DEFAULT_MAX_VERTICES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("the matroid of the cycle space is not graphic")]
    NotGraphic,
    #[error("realization needs {vertices} vertices, above the enumeration limit {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("cycle-space rows are linearly dependent")]
    RankDeficient,
}

/// Answers independence queries for the graphic matroid whose cycle space
/// is the row space of `W`: an edge set is independent iff no nonzero
/// vector of the row space is supported inside it.
#[derive(Clone, Debug)]
pub struct IndependenceOracle {
    w: RatMatrix,
    rank: usize,
}

impl IndependenceOracle {
    pub fn new(w: &IntMatrix) -> Self {
        let w = to_rational(w);
        let rank = w.rank();
        IndependenceOracle { w, rank }
    }

    /// `dim(S ∩ span{e_k : k in subset}) = rank(W) - rank(W restricted to
    /// the complement)`; the subset is independent iff that is zero.
    pub fn is_independent(&self, subset: &[usize]) -> bool {
        let mut inside = vec![false; self.w.cols()];
        for &k in subset {
            inside[k] = true;
        }
        let outside: Vec<usize> = (0..self.w.cols()).filter(|&k| !inside[k]).collect();
        self.w.select_columns(&outside).rank() == self.rank
    }
}

/// A `{-1,0,1}` vector of the cut space, sign-normalized so that its first
/// nonzero entry is `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarVector(pub Vec<i8>);

impl StarVector {
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &x)| x != 0).map(|(k, _)| k)
    }

    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&x| x != 0).count()
    }
}

/// Result of a successful realization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub graph: Graph,
    /// `coord_to_edge[k]` is the edge of `graph` occupying coordinate `k`.
    pub coord_to_edge: Vec<usize>,
    /// An orientation of `graph` whose signed cycle space is the row space
    /// of `W` (indexed by edges of `graph`).
    pub orientation: Orientation,
    /// `false` means the graph is only determined up to 2-isomorphism.
    pub three_connected: bool,
}

impl Realization {
    /// Reorders a per-coordinate vector into the graph's edge order.
    pub fn to_edge_order<T: Clone>(&self, per_coordinate: &[T]) -> Vec<T> {
        let mut out = per_coordinate.to_vec();
        for (k, &e) in self.coord_to_edge.iter().enumerate() {
            out[e] = per_coordinate[k].clone();
        }
        out
    }

    /// Column order that maps coordinates onto the graph's edge order:
    /// edge `e` of the graph is coordinate `order[e]`.
    pub fn coordinate_order(&self) -> Vec<usize> {
        let mut order = vec![0; self.coord_to_edge.len()];
        for (k, &e) in self.coord_to_edge.iter().enumerate() {
            order[e] = k;
        }
        order
    }
}

fn full_rank(w: &IntMatrix) -> Result<usize, RealizeError> {
    let rank = to_rational(w).rank();
    if rank != w.rows() {
        return Err(RealizeError::RankDeficient);
    }
    Ok(rank)
}

/// All `{-1,0,1}` kernel vectors of `w`, sign-normalized and sorted by
/// support size, then lexicographically.
pub fn enumerate_star_candidates(w: &IntMatrix, max_vertices: usize) -> Result<Vec<StarVector>, RealizeError> {
    let m = w.cols();
    let c = full_rank(w)?;
    let n = m - c + 1;
    if n > max_vertices {
        return Err(RealizeError::TooLarge { vertices: n, limit: max_vertices });
    }
    let kernel = to_rational(w).right_kernel_basis();
    // fundamental cuts of a graphic matroid have entries in {-1,0,1}
    let mut basis: Vec<Vec<i8>> = Vec::with_capacity(kernel.rows());
    for row in kernel.row_iter() {
        let mut ints = Vec::with_capacity(m);
        for x in row {
            if !x.is_integer() {
                return Err(RealizeError::NotGraphic);
            }
            match x.to_integer().to_i8() {
                Some(v @ -1..=1) => ints.push(v),
                _ => return Err(RealizeError::NotGraphic),
            }
        }
        basis.push(ints);
    }
    let d = basis.len();
    // coordinates whose value is fixed once the first j+1 parameters are set
    let mut settled_at: Vec<Vec<usize>> = vec![Vec::new(); d];
    for k in 0..m {
        if let Some(last) = (0..d).rev().find(|&j| basis[j][k] != 0) {
            settled_at[last].push(k);
        }
    }

    let mut out = Vec::new();
    let mut partial = vec![0i32; m];
    fn descend(
        j: usize,
        basis: &[Vec<i8>],
        settled_at: &[Vec<usize>],
        partial: &mut Vec<i32>,
        out: &mut Vec<StarVector>,
    ) {
        if j == basis.len() {
            let first = partial.iter().find(|&&x| x != 0);
            if first == Some(&1) {
                out.push(StarVector(partial.iter().map(|&x| x as i8).collect()));
            }
            return;
        }
        for t in [-1i32, 0, 1] {
            if t != 0 {
                for (p, &b) in partial.iter_mut().zip(&basis[j]) {
                    *p += t * b as i32;
                }
            }
            if settled_at[j].iter().all(|&k| (-1..=1).contains(&partial[k])) {
                descend(j + 1, basis, settled_at, partial, out);
            }
            if t != 0 {
                for (p, &b) in partial.iter_mut().zip(&basis[j]) {
                    *p -= t * b as i32;
                }
            }
        }
    }
    descend(0, &basis, &settled_at, &mut partial, &mut out);
    out.sort_by(|a, b| a.support_size().cmp(&b.support_size()).then_with(|| a.cmp(b)));
    Ok(out)
}

struct Assembly<'a> {
    candidates: &'a [StarVector],
    by_coordinate: Vec<Vec<usize>>,
    m: usize,
    n: usize,
    w: &'a IntMatrix,
    cover: Vec<u8>,
    first_sign: Vec<i8>,
    chosen: Vec<(usize, i8)>,
    used: HashSet<usize>,
}

impl Assembly<'_> {
    fn compatible(&self, cand: usize, sign: i8) -> bool {
        if self.used.contains(&cand) {
            return false;
        }
        let v = &self.candidates[cand].0;
        v.iter()
            .enumerate()
            .all(|(k, &x)| x == 0 || self.cover[k] == 0 || (self.cover[k] == 1 && self.first_sign[k] == -sign * x))
    }

    fn apply(&mut self, cand: usize, sign: i8) {
        for (k, &x) in self.candidates[cand].0.iter().enumerate() {
            if x != 0 {
                if self.cover[k] == 0 {
                    self.first_sign[k] = sign * x;
                }
                self.cover[k] += 1;
            }
        }
        self.used.insert(cand);
        self.chosen.push((cand, sign));
    }

    fn undo(&mut self) {
        let (cand, _) = self.chosen.pop().expect("undo without apply");
        self.used.remove(&cand);
        for (k, &x) in self.candidates[cand].0.iter().enumerate() {
            if x != 0 {
                self.cover[k] -= 1;
            }
        }
    }

    /// Options for covering coordinate `k` a second time.
    fn options(&self, k: usize) -> Vec<(usize, i8)> {
        self.by_coordinate[k]
            .iter()
            .map(|&cand| (cand, -self.first_sign[k] * self.candidates[cand].0[k]))
            .filter(|&(cand, s)| self.compatible(cand, s))
            .collect()
    }

    fn search(&mut self) -> Option<Realization> {
        if self.chosen.len() == self.n {
            return if self.cover.iter().all(|&c| c == 2) { self.verify() } else { None };
        }
        if self.chosen.is_empty() {
            // global sign is free; fix the first star's sign
            let k = (0..self.m).next()?;
            for cand in self.by_coordinate[k].clone() {
                self.apply(cand, 1);
                if let Some(r) = self.search() {
                    return Some(r);
                }
                self.undo();
            }
            return None;
        }
        // most constrained half-covered coordinate
        let mut best: Option<Vec<(usize, i8)>> = None;
        for k in (0..self.m).filter(|&k| self.cover[k] == 1) {
            let opts = self.options(k);
            if opts.is_empty() {
                return None;
            }
            if best.as_ref().is_none_or(|b| opts.len() < b.len()) {
                best = Some(opts);
            }
        }
        // nothing half-covered but coordinates remain: chosen stars close off
        // a proper vertex subset, so the graph would be disconnected
        let options = best?;
        for (cand, sign) in options {
            self.apply(cand, sign);
            if let Some(r) = self.search() {
                return Some(r);
            }
            self.undo();
        }
        None
    }

    fn verify(&self) -> Option<Realization> {
        let mut ends: Vec<Vec<(usize, i8)>> = vec![Vec::new(); self.m];
        for (vertex, &(cand, sign)) in self.chosen.iter().enumerate() {
            for (k, &x) in self.candidates[cand].0.iter().enumerate() {
                if x != 0 {
                    ends[k].push((vertex, sign * x));
                }
            }
        }
        // head carries +1, tail -1
        let arcs: Vec<(usize, usize)> =
            ends.iter().map(|e| if e[0].1 < 0 { (e[0].0, e[1].0) } else { (e[1].0, e[0].0) }).collect();
        let graph = Graph::new(self.n, arcs.iter().copied()).ok()?;
        let coord_to_edge: Vec<usize> = arcs.iter().map(|&(t, h)| graph.edge_index(t, h).unwrap()).collect();
        let mut incidence = Matrix::<Int>::zeros(self.m, self.n);
        for (k, &(t, h)) in arcs.iter().enumerate() {
            incidence[(k, t)] = Int::from(-1);
            incidence[(k, h)] = Int::from(1);
        }
        // row space of W ⊆ cokernel(incidence); equality follows from
        // rank W = m - n + 1 once the graph is connected
        if !self.w.mul(&incidence).is_zero() || !graph.is_connected() {
            return None;
        }
        let mut edge_arcs = vec![(0, 0); self.m];
        for (k, &e) in coord_to_edge.iter().enumerate() {
            edge_arcs[e] = arcs[k];
        }
        let orientation = Orientation::from_arcs(&graph, edge_arcs).ok()?;
        let three_connected = graph.is_k_connected(3);
        Some(Realization { graph, coord_to_edge, orientation, three_connected })
    }
}

/// Exact-cover search for `n` stars covering every coordinate twice with
/// opposite signs. `w` is used to verify the assembled graph.
pub fn assemble_graph(
    candidates: &[StarVector],
    m: usize,
    n: usize,
    w: &IntMatrix,
) -> Result<Realization, RealizeError> {
    if m == 0 || n < 2 {
        return Err(RealizeError::NotGraphic);
    }
    let mut by_coordinate = vec![Vec::new(); m];
    for (i, c) in candidates.iter().enumerate() {
        for k in c.support() {
            by_coordinate[k].push(i);
        }
    }
    let mut state = Assembly {
        candidates,
        by_coordinate,
        m,
        n,
        w,
        cover: vec![0; m],
        first_sign: vec![0; m],
        chosen: Vec::with_capacity(n),
        used: HashSet::new(),
    };
    state.search().ok_or(RealizeError::NotGraphic)
}

/// Realizes a graph whose signed cycle space (for some orientation) is the
/// row space of `w`.
pub fn realize_graph(w: &IntMatrix) -> Result<Realization, RealizeError> {
    realize_graph_with_limit(w, DEFAULT_MAX_VERTICES)
}

pub fn realize_graph_with_limit(w: &IntMatrix, max_vertices: usize) -> Result<Realization, RealizeError> {
    let m = w.cols();
    let c = full_rank(w)?;
    if c > m || m == 0 {
        return Err(RealizeError::NotGraphic);
    }
    let n = m - c + 1;
    let candidates = enumerate_star_candidates(w, max_vertices)?;
    if candidates.is_empty() {
        return Err(RealizeError::NotGraphic);
    }
    // in a 3-connected graph the stars are exactly the non-separating bonds
    let stars = non_separating_bonds(w, &candidates, n);
    if stars.len() >= n {
        if let Ok(r) = assemble_graph(&stars, m, n, w) {
            return Ok(r);
        }
    }
    assemble_graph(&candidates, m, n, w)
}

const PRIME: u64 = 2_147_483_647;

fn inverse_mod(a: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % PRIME, PRIME - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % PRIME;
        }
        base = base * base % PRIME;
        exp >>= 1;
    }
    acc
}

/// Row reduction over `GF(PRIME)` with columns visited in `order`; returns
/// the pivot column of each nonzero row.
fn reduce_mod(rows: &mut [Vec<u64>], order: &[usize]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for &col in order {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, p);
        let inv = inverse_mod(rows[r][col]);
        for x in rows[r].iter_mut() {
            *x = *x * inv % PRIME;
        }
        for i in 0..rows.len() {
            let f = rows[i][col];
            if i != r && f != 0 {
                for k in 0..rows[i].len() {
                    rows[i][k] = (rows[i][k] + (PRIME - f) * rows[r][k]) % PRIME;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Candidates whose support `B` is a bond (`E \ B` has rank `n - 2`) and
/// whose deletion `M \ B` is a connected matroid. Ranks are taken modulo a
/// prime, so this only preselects; assemblies are verified exactly.
fn non_separating_bonds(w: &IntMatrix, candidates: &[StarVector], n: usize) -> Vec<StarVector> {
    let m = w.cols();
    let p = Int::from(PRIME);
    let base: Vec<Vec<u64>> = w
        .row_iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let r = ((x % &p) + &p) % &p;
                    r.to_u64().expect("residue fits in u64")
                })
                .collect()
        })
        .collect();
    candidates
        .iter()
        .filter(|cand| {
            let inside: Vec<bool> = cand.0.iter().map(|&x| x != 0).collect();
            let rest: Vec<usize> = (0..m).filter(|&k| !inside[k]).collect();
            let order: Vec<usize> = (0..m).filter(|&k| inside[k]).chain(rest.iter().copied()).collect();
            let mut rows = base.clone();
            let pivots = reduce_mod(&mut rows, &order);
            let in_b = pivots.iter().filter(|&&k| inside[k]).count();
            // r(E \ B) = |E \ B| - dim(cycles avoiding B)
            let cycles_avoiding = pivots.len() - in_b;
            if rest.len() - cycles_avoiding + 2 != n {
                return false;
            }
            if rest.len() <= 1 {
                return true;
            }
            // fundamental circuits of M \ B link its components
            let mut parent: Vec<usize> = (0..m).collect();
            fn find(parent: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while parent[r] != r {
                    r = parent[r];
                }
                parent[x] = r;
                r
            }
            for row in &rows[in_b..pivots.len()] {
                let support: Vec<usize> = rest.iter().copied().filter(|&k| row[k] != 0).collect();
                for pair in support.windows(2) {
                    let (a, c) = (find(&mut parent, pair[0]), find(&mut parent, pair[1]));
                    parent[a] = c;
                }
            }
            let root = find(&mut parent, rest[0]);
            rest.iter().all(|&k| find(&mut parent, k) == root)
        })
        .cloned()
        .collect()
}
