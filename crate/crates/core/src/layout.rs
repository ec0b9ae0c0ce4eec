//! Laying out the vertices on the line from `G`, `σ` and the lengths.
//!
//! The exact layout walks a BFS tree. Under noise the positions are the
//! least-squares solution of `ℓ_σ(p) ≈ l`, computed as a small floating
//! point correction `δ` to the (huge, exact) tree layout so that floats
//! never carry the full magnitude of the lengths.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, RealField};
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{Configuration, Graph, GraphError, Orientation, SpanningTree};
use crate::Int;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("expected {expected} lengths, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("edge {edge} disagrees with the tree layout")]
    InconsistentLengths { edge: usize },
    #[error("normal equations are singular")]
    Singular,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn check_lengths(g: &Graph, l: &[Int]) -> Result<(), LayoutError> {
    if l.len() != g.m() {
        return Err(LayoutError::LengthMismatch { expected: g.m(), found: l.len() });
    }
    Ok(())
}

/// Positions along a BFS tree rooted at vertex 0 (placed at 0), using only
/// the tree edges.
fn tree_positions(g: &Graph, sigma: &Orientation, l: &[Int]) -> Result<(SpanningTree, Vec<Int>), LayoutError> {
    check_lengths(g, l)?;
    let tree = SpanningTree::bfs(g)?;
    let mut p = vec![Int::zero(); g.n()];
    for &v in tree.order.iter().skip(1) {
        let (parent, e) = tree.parent[v].expect("non-root vertices have a parent");
        p[v] = if sigma.head(e) == v { &p[parent] + &l[e] } else { &p[parent] - &l[e] };
    }
    Ok((tree, p))
}

/// Exact layout: `p_head - p_tail = l_e` on every edge, normalized.
pub fn tree_layout(g: &Graph, sigma: &Orientation, l: &[Int]) -> Result<Configuration<Int>, LayoutError> {
    let (tree, p) = tree_positions(g, sigma, l)?;
    for e in (0..g.m()).filter(|&e| !tree.contains_edge(e)) {
        if &p[sigma.head(e)] - &p[sigma.tail(e)] != l[e] {
            return Err(LayoutError::InconsistentLengths { edge: e });
        }
    }
    Ok(Configuration::new(p).normalized())
}

/// Least-squares positions `base[v] + offset[v]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquaresLayout<F> {
    pub base: Vec<Int>,
    pub offset: Vec<F>,
    /// `Σ_e (p_head - p_tail - l_e)^2` at the minimizer.
    pub residual: F,
}

fn int_to<F: RealField + Copy>(x: &Int) -> F {
    nalgebra::convert(x.to_f64().unwrap_or(f64::NAN))
}

fn to_f64<F: RealField + Copy>(x: F) -> f64 {
    x.to_subset().unwrap_or(f64::NAN)
}

impl<F: RealField + Copy> LeastSquaresLayout<F> {
    /// Positions as floats; loses precision once lengths exceed the
    /// mantissa.
    pub fn positions(&self) -> Vec<F> {
        self.base.iter().zip(&self.offset).map(|(b, &o)| int_to::<F>(b) + o).collect()
    }

    fn cmp_positions(&self, i: usize, j: usize) -> Ordering {
        let diff = &self.base[i] - &self.base[j];
        if diff.abs() > Int::from(1u64 << 40) {
            return diff.sign().cmp(&num_bigint::Sign::NoSign);
        }
        let d = int_to::<F>(&diff) + self.offset[i] - self.offset[j];
        d.partial_cmp(&F::zero()).unwrap_or(Ordering::Equal)
    }

    fn cmp_layouts(a: &Self, b: &Self) -> Ordering {
        for i in 0..a.base.len() {
            let diff = &a.base[i] - &b.base[i];
            let ord = if diff.abs() > Int::from(1u64 << 40) {
                diff.sign().cmp(&num_bigint::Sign::NoSign)
            } else {
                let d = int_to::<F>(&diff) + a.offset[i] - b.offset[i];
                d.partial_cmp(&F::zero()).unwrap_or(Ordering::Equal)
            };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }

    /// Same normalization as [`Configuration::normalized`]: minimum at 0,
    /// then the lexicographically smaller of the layout and its mirror.
    pub fn normalized(&self) -> Self {
        let n = self.base.len();
        if n == 0 {
            return self.clone();
        }
        let lo = (0..n).min_by(|&i, &j| self.cmp_positions(i, j)).unwrap();
        let hi = (0..n).max_by(|&i, &j| self.cmp_positions(i, j)).unwrap();
        let shifted = LeastSquaresLayout {
            base: self.base.iter().map(|b| b - &self.base[lo]).collect(),
            offset: self.offset.iter().map(|&o| o - self.offset[lo]).collect(),
            residual: self.residual,
        };
        let mirrored = LeastSquaresLayout {
            base: self.base.iter().map(|b| &self.base[hi] - b).collect(),
            offset: self.offset.iter().map(|&o| self.offset[hi] - o).collect(),
            residual: self.residual,
        };
        if Self::cmp_layouts(&mirrored, &shifted) == Ordering::Less {
            mirrored
        } else {
            shifted
        }
    }

    /// Nearest integer positions.
    pub fn rounded(&self) -> Configuration<Int> {
        let p = self
            .base
            .iter()
            .zip(&self.offset)
            .map(|(b, &o)| b + Int::from(to_f64(o).round_ties_even() as i64))
            .collect();
        Configuration::new(p)
    }
}

/// `Σ_e (p_head - p_tail - l_e)^2` for the positions of `layout`.
pub fn squared_error<F: RealField + Copy>(
    g: &Graph,
    sigma: &Orientation,
    l: &[Int],
    layout: &LeastSquaresLayout<F>,
) -> F {
    (0..g.m()).fold(F::zero(), |acc, e| {
        let (t, h) = (sigma.tail(e), sigma.head(e));
        let r = int_to::<F>(&(&layout.base[h] - &layout.base[t] - &l[e])) + layout.offset[h] - layout.offset[t];
        acc + r * r
    })
}

/// Minimizes `Σ_e (p_head - p_tail - l_e)^2` with `p_0 = 0` through the
/// reduced Laplacian normal equations, then normalizes.
pub fn least_squares_layout<F: RealField + Copy>(
    g: &Graph,
    sigma: &Orientation,
    l: &[Int],
) -> Result<LeastSquaresLayout<F>, LayoutError> {
    let (_, base) = tree_positions(g, sigma, l)?;
    let n = g.n();
    // residual of the tree layout on each edge; zero on tree edges
    let r: Vec<F> = (0..g.m()).map(|e| int_to::<F>(&(&l[e] - (&base[sigma.head(e)] - &base[sigma.tail(e)])))).collect();
    let mut offset = vec![F::zero(); n];
    if n > 1 {
        let mut lap = DMatrix::<F>::zeros(n, n);
        let mut rhs = DVector::<F>::zeros(n);
        for e in 0..g.m() {
            let (t, h) = (sigma.tail(e), sigma.head(e));
            lap[(t, t)] += F::one();
            lap[(h, h)] += F::one();
            lap[(t, h)] -= F::one();
            lap[(h, t)] -= F::one();
            rhs[h] += r[e];
            rhs[t] -= r[e];
        }
        let reduced = lap.view((1, 1), (n - 1, n - 1)).into_owned();
        let b = rhs.rows(1, n - 1).into_owned();
        let delta = reduced.cholesky().ok_or(LayoutError::Singular)?.solve(&b);
        for v in 1..n {
            offset[v] = delta[v - 1];
        }
    }
    let mut layout = LeastSquaresLayout { base, offset, residual: F::zero() };
    layout.residual = squared_error(g, sigma, l, &layout);
    Ok(layout.normalized())
}

/// Integer positions with `|p_head - p_tail - l_e| <= bound` on every edge,
/// if any exist. Tries the rounded least-squares layout first, then solves
/// the difference constraints with Bellman-Ford.
pub fn integer_layout_within(
    g: &Graph,
    sigma: &Orientation,
    l: &[Int],
    bound: &Int,
    hint: Option<&LeastSquaresLayout<f64>>,
) -> Result<Option<Configuration<Int>>, LayoutError> {
    check_lengths(g, l)?;
    let fits = |p: &[Int]| (0..g.m()).all(|e| (&p[sigma.head(e)] - &p[sigma.tail(e)] - &l[e]).abs() <= *bound);
    if let Some(h) = hint {
        let q = h.rounded();
        if q.len() == g.n() && fits(q.positions()) {
            return Ok(Some(q.normalized()));
        }
    }
    // x_h - x_t <= l + bound: arc t -> h; x_t - x_h <= bound - l: arc h -> t
    let mut arcs: Vec<(usize, usize, Int)> = Vec::with_capacity(2 * g.m());
    for e in 0..g.m() {
        let (t, h) = (sigma.tail(e), sigma.head(e));
        arcs.push((t, h, &l[e] + bound));
        arcs.push((h, t, bound - &l[e]));
    }
    let mut dist = vec![Int::zero(); g.n()];
    for _ in 0..=g.n() {
        let mut changed = false;
        for (u, v, w) in &arcs {
            let cand = &dist[*u] + w;
            if cand < dist[*v] {
                dist[*v] = cand;
                changed = true;
            }
        }
        if !changed {
            return Ok(Some(Configuration::new(dist).normalized()));
        }
    }
    // still relaxing after n + 1 rounds: negative cycle, infeasible
    Ok(None)
}
