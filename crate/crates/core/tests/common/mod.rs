//! Independent oracles and fixtures shared by the integration tests.
//!
//! Nothing here calls into the library's linear algebra, lattice or
//! realization code; the oracles recompute what they check from scratch.

#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use linerecon::graph::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

// ---------------------------------------------------------------- graphs

/// Random spanning tree plus `extra` random chords (no duplicates).
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Graph {
    let mut edges = BTreeSet::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        edges.insert((a.min(b), a.max(b)));
    }
    let max_edges = n * (n - 1) / 2;
    let target = (n - 1 + extra).min(max_edges);
    while edges.len() < target {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    Graph::new(n, edges).unwrap()
}

fn connected_without(n: usize, edges: &[(usize, usize)], removed: Option<usize>) -> bool {
    let alive: Vec<usize> = (0..n).filter(|&v| Some(v) != removed).collect();
    let Some(&start) = alive.first() else { return true };
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && Some(y) != removed && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    alive.iter().all(|&v| seen[v])
}

pub fn is_connected(g: &Graph) -> bool {
    connected_without(g.n(), g.edges(), None)
}

/// No cut vertex and at least three vertices.
pub fn is_two_connected(g: &Graph) -> bool {
    g.n() >= 3 && is_connected(g) && (0..g.n()).all(|v| connected_without(g.n(), g.edges(), Some(v)))
}

/// Random 2-connected graph by rejection.
pub fn random_two_connected_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Graph {
    loop {
        let g = random_connected_graph(rng, n, extra);
        if is_two_connected(&g) {
            return g;
        }
    }
}

/// Union-find acyclicity of an edge subset.
pub fn acyclic(g: &Graph, subset: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &k in subset {
        let (a, b) = g.edge(k);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

/// Backtracking isomorphism test on adjacency matrices.
pub fn isomorphic(g: &Graph, h: &Graph) -> bool {
    if g.n() != h.n() || g.m() != h.m() {
        return false;
    }
    let n = g.n();
    let adj = |x: &Graph| {
        let mut a = vec![vec![false; n]; n];
        for &(u, v) in x.edges() {
            a[u][v] = true;
            a[v][u] = true;
        }
        a
    };
    let (ag, ah) = (adj(g), adj(h));
    let deg = |a: &Vec<Vec<bool>>, v: usize| a[v].iter().filter(|&&x| x).count();
    let mut degs_g: Vec<usize> = (0..n).map(|v| deg(&ag, v)).collect();
    let mut degs_h: Vec<usize> = (0..n).map(|v| deg(&ah, v)).collect();
    let (dg, dh) = (degs_g.clone(), degs_h.clone());
    degs_g.sort_unstable();
    degs_h.sort_unstable();
    if degs_g != degs_h {
        return false;
    }
    #[allow(clippy::too_many_arguments)]
    fn extend(
        v: usize,
        n: usize,
        map: &mut Vec<usize>,
        used: &mut [bool],
        ag: &[Vec<bool>],
        ah: &[Vec<bool>],
        dg: &[usize],
        dh: &[usize],
    ) -> bool {
        if v == n {
            return true;
        }
        for w in 0..n {
            if used[w] || dg[v] != dh[w] {
                continue;
            }
            if (0..v).all(|u| ag[u][v] == ah[map[u]][w]) {
                used[w] = true;
                map.push(w);
                if extend(v + 1, n, map, used, ag, ah, dg, dh) {
                    return true;
                }
                map.pop();
                used[w] = false;
            }
        }
        false
    }
    extend(0, n, &mut Vec::with_capacity(n), &mut vec![false; n], &ag, &ah, &dg, &dh)
}

/// `(tail, head)` per edge with the head at the larger position.
pub fn orientation_from_positions(g: &Graph, p: &[BigInt]) -> Vec<(usize, usize)> {
    g.edges().iter().map(|&(a, b)| if p[a] < p[b] { (a, b) } else { (b, a) }).collect()
}

/// `p` and `q` agree up to translation and reflection.
pub fn congruent(p: &[BigInt], q: &[BigInt]) -> bool {
    if p.len() != q.len() {
        return false;
    }
    if p.is_empty() {
        return true;
    }
    let shift = |v: &[BigInt]| {
        let lo = v.iter().min().unwrap().clone();
        v.iter().map(|x| x - &lo).collect::<Vec<_>>()
    };
    let mirror = |v: &[BigInt]| v.iter().map(|x| -x).collect::<Vec<_>>();
    let (sp, sq) = (shift(p), shift(q));
    sp == sq || shift(&mirror(p)) == sq
}

/// Vertex map `g -> h` induced by an edge bijection, for graphs without
/// isolated vertices where each vertex is identified by its star.
pub fn vertex_map_from_stars(g: &Graph, h: &Graph, edge_map: &[usize]) -> Option<Vec<usize>> {
    let star = |x: &Graph, v: usize| -> BTreeSet<usize> {
        x.edges().iter().enumerate().filter(|(_, &(a, b))| a == v || b == v).map(|(k, _)| k).collect()
    };
    let mut map = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let image: BTreeSet<usize> = star(g, v).iter().map(|&k| edge_map[k]).collect();
        let w = (0..h.n()).find(|&w| star(h, w) == image)?;
        map.push(w);
    }
    Some(map)
}

// ---------------------------------------------------------------- rationals

pub fn rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rank by fraction-based Gaussian elimination.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(rat).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Determinant by Gaussian elimination over the rationals.
pub fn determinant(rows: &[Vec<BigInt>]) -> BigRational {
    let n = rows.len();
    let mut a: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(rat).collect()).collect();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return BigRational::zero() };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= a[c][c].clone();
        for i in c + 1..n {
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

// ---------------------------------------------------------------- lattices

pub struct Gso {
    pub mu: Vec<Vec<BigRational>>,
    pub b: Vec<BigRational>,
}

pub fn gso(basis: &[Vec<BigInt>]) -> Gso {
    let k = basis.len();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(k);
    let mut mu = vec![vec![BigRational::zero(); k]; k];
    let mut b = Vec::with_capacity(k);
    for i in 0..k {
        let mut v: Vec<BigRational> = basis[i].iter().map(rat).collect();
        for j in 0..i {
            let num: BigRational = basis[i].iter().zip(&star[j]).map(|(x, y)| rat(x) * y).sum();
            mu[i][j] = num / &b[j];
            for (vt, sj) in v.iter_mut().zip(&star[j]) {
                *vt -= &mu[i][j] * sj;
            }
        }
        b.push(v.iter().map(|x| x * x).sum::<BigRational>());
        star.push(v);
    }
    Gso { mu, b }
}

/// Size reduction `|mu_ij| <= 1/2` and Lovász with the given delta.
pub fn is_lll_reduced(basis: &[Vec<BigInt>], delta: &BigRational) -> bool {
    let g = gso(basis);
    let half = BigRational::new(1.into(), 2.into());
    for i in 0..basis.len() {
        for j in 0..i {
            if g.mu[i][j].abs() > half {
                return false;
            }
        }
        if i > 0 {
            let lhs = delta * &g.b[i - 1];
            let rhs = &g.b[i] + &g.mu[i][i - 1] * &g.mu[i][i - 1] * &g.b[i - 1];
            if lhs > rhs {
                return false;
            }
        }
    }
    true
}

/// Exact squared length of a shortest nonzero lattice vector, by
/// Fincke-Pohst enumeration of all vectors with squared norm at most
/// `radius_sq`.
pub fn shortest_norm_sq(basis: &[Vec<BigInt>], radius_sq: &BigInt) -> BigInt {
    let g = gso(basis);
    let d = basis.len();
    let r2 = rat(radius_sq);
    let mut best: Option<BigRational> = None;
    let mut x = vec![BigInt::zero(); d];
    fn level(
        i: usize,
        g: &Gso,
        r2: &BigRational,
        partial: BigRational,
        x: &mut Vec<BigInt>,
        best: &mut Option<BigRational>,
    ) {
        let d = x.len();
        let c: BigRational = -(i + 1..d).map(|j| &g.mu[j][i] * rat(&x[j])).sum::<BigRational>();
        let fits = |xi: &BigInt| {
            let t = rat(xi) - &c;
            let total = &partial + &t * &t * &g.b[i];
            (total <= *r2).then_some(total)
        };
        // the feasible x_i form an interval around c: scan down from
        // floor(c) and up from floor(c) + 1
        let start = c.floor().to_integer();
        for (first, step) in [(start.clone(), -1i64), (&start + 1, 1)] {
            let mut xi = first;
            while let Some(total) = fits(&xi) {
                x[i] = xi.clone();
                if i == 0 {
                    if x.iter().any(|v| !v.is_zero()) && best.as_ref().is_none_or(|b| total < *b) {
                        *best = Some(total);
                    }
                } else {
                    level(i - 1, g, r2, total, x, best);
                }
                xi += step;
            }
        }
        x[i] = BigInt::zero();
    }
    level(d - 1, &g, &r2, BigRational::zero(), &mut x, &mut best);
    let best = best.expect("radius admits a nonzero vector");
    assert!(best.is_integer());
    best.to_integer()
}

pub fn norm_sq(v: &[BigInt]) -> BigInt {
    dot(v, v)
}

/// Random full-rank `d x dim` integer basis with entries in `[-bound, bound]`.
pub fn random_basis(rng: &mut ChaCha8Rng, d: usize, dim: usize, bound: i64) -> Vec<Vec<BigInt>> {
    loop {
        let rows: Vec<Vec<BigInt>> =
            (0..d).map(|_| (0..dim).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()).collect();
        if rank(&rows) == d {
            return rows;
        }
    }
}

// ---------------------------------------------------------------- matroids

/// All permutations of `0..m` (Heap's algorithm).
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..m).collect();
    let mut c = vec![0; m];
    out.push(a.clone());
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Whether some connected simple graph on `n` vertices, some bijection of
/// its edges onto the columns of `w` and some orientation make the row
/// space of `w` its signed cycle space. Exhaustive; small `m` only.
pub fn graphic_by_exhaustion(w: &[Vec<BigInt>], n: usize) -> bool {
    let m = w[0].len();
    let c = rank(w);
    if c != w.len() || m + 1 != n + c {
        return false;
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    if pairs.len() < m {
        return false;
    }
    let perms = permutations(m);
    // choose m of the vertex pairs
    let mut chosen: Vec<usize> = (0..m).collect();
    loop {
        let edges: Vec<(usize, usize)> = chosen.iter().map(|&i| pairs[i]).collect();
        if connected_without(n, &edges, None) {
            for perm in &perms {
                // edge k sits at column perm[k]
                for signs in 0u32..(1 << m) {
                    let ok = w.iter().all(|row| {
                        (0..n).all(|v| {
                            let mut s = BigInt::zero();
                            for (k, &(a, b)) in edges.iter().enumerate() {
                                let flip = signs >> k & 1 == 1;
                                let (t, h) = if flip { (b, a) } else { (a, b) };
                                if v == h {
                                    s += &row[perm[k]];
                                } else if v == t {
                                    s -= &row[perm[k]];
                                }
                            }
                            s.is_zero()
                        })
                    });
                    if ok {
                        return true;
                    }
                }
            }
        }
        let Some(i) = (0..m).rev().find(|&i| chosen[i] < pairs.len() - m + i) else { return false };
        chosen[i] += 1;
        for j in i + 1..m {
            chosen[j] = chosen[j - 1] + 1;
        }
    }
}
