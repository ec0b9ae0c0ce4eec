//! Recovering the edge orientation from the signed cycle space.
//!
//! For a cycle `ρ` of `G`, the vectors of the signed cycle space supported
//! inside `ρ` form a line spanned by `±w_ρ`. We obtain it as `a^T W` where
//! `a` spans the left kernel of `W` restricted to the columns outside `ρ`.
//! Walking the fundamental cycles, each one fixes the orientation of its
//! edges up to the sign of `w_ρ`, which is resolved by an edge that is
//! already oriented.

use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactmath::to_rational;
use crate::graph::{fundamental_cycle_basis, Cycle, Graph, GraphError, Orientation};
use crate::relations::primitive;
use crate::{Int, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrientError {
    #[error("cycle-space matrix has {found} columns, graph has {expected} edges")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors supported on cycle {cycle} form a space of dimension {dimension}, expected 1")]
    NotACycle { cycle: usize, dimension: usize },
    #[error("vector supported on cycle {cycle} is not a signed cycle vector")]
    NotSigned { cycle: usize },
    #[error("cycle {cycle} orients edge {edge} against an earlier cycle")]
    OrientationConflict { cycle: usize, edge: usize },
    #[error("{remaining} cycles never meet an oriented edge")]
    Deadlock { remaining: usize },
    #[error("edge {edge} lies on no cycle")]
    NotTwoConnected { edge: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The signed vector of the row space of `w` supported inside
/// `cycle_edges`, scaled to a primitive integer vector with positive
/// leading entry. Returns `(dimension, vector)`; the vector is meaningful
/// only when the dimension is 1.
fn supported_vector(w: &IntMatrix, cycle_edges: &[usize]) -> (usize, Vec<Int>) {
    let m = w.cols();
    let mut inside = vec![false; m];
    for &e in cycle_edges {
        inside[e] = true;
    }
    let outside: Vec<usize> = (0..m).filter(|&k| !inside[k]).collect();
    let restricted = to_rational(&w.select_columns(&outside).transpose());
    let left_kernel = restricted.right_kernel_basis();
    let dimension = left_kernel.rows();
    if dimension != 1 {
        return (dimension, Vec::new());
    }
    let a = left_kernel.row(0);
    let wr = to_rational(w);
    let y: Vec<_> = (0..m)
        .map(|k| a.iter().enumerate().fold(crate::Rational::zero(), |acc, (i, ai)| acc + ai * &wr[(i, k)]))
        .collect();
    let scaled = crate::exactmath::primitive_integer_vector(&y);
    (1, primitive(&scaled))
}

/// The signed cycle vector of the row space of `w` supported on the edges
/// of a cycle (`w` must have full row rank). Entries are `±1` on the cycle,
/// `0` elsewhere, first nonzero entry `+1`.
pub fn cycle_vector_from_space(w: &IntMatrix, cycle_edges: &[usize]) -> Result<Vec<Int>, OrientError> {
    let (dimension, v) = supported_vector(w, cycle_edges);
    if dimension != 1 {
        return Err(OrientError::NotACycle { cycle: 0, dimension });
    }
    let mut inside = vec![false; w.cols()];
    for &e in cycle_edges {
        inside[e] = true;
    }
    let ok = v.iter().enumerate().all(|(k, x)| if inside[k] { x.abs().is_one() } else { x.is_zero() });
    if !ok {
        return Err(OrientError::NotSigned { cycle: 0 });
    }
    Ok(v)
}

fn with_cycle(err: OrientError, cycle: usize) -> OrientError {
    match err {
        OrientError::NotACycle { dimension, .. } => OrientError::NotACycle { cycle, dimension },
        OrientError::NotSigned { .. } => OrientError::NotSigned { cycle },
        e => e,
    }
}

/// Arcs implied by walking `cycle` with signs `s * w`: positive entries
/// are traversed forward.
fn implied_arcs(cycle: &Cycle, w: &[Int], s: i8) -> Vec<(usize, (usize, usize))> {
    let len = cycle.vertices.len();
    cycle
        .edges
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let (from, to) = (cycle.vertices[i], cycle.vertices[(i + 1) % len]);
            let forward = w[e].is_positive() == (s > 0);
            (e, if forward { (from, to) } else { (to, from) })
        })
        .collect()
}

/// Orientation of `g` (up to a global flip, returned in canonical form)
/// whose signed cycle space is the row space of `w`, with columns of `w`
/// indexed by the edges of `g`.
pub fn compute_orientation(g: &Graph, w: &IntMatrix) -> Result<Orientation, OrientError> {
    if w.cols() != g.m() {
        return Err(OrientError::DimensionMismatch { expected: g.m(), found: w.cols() });
    }
    let (_, cycles) = fundamental_cycle_basis(g)?;
    let mut arcs: Vec<Option<(usize, usize)>> = vec![None; g.m()];
    let mut vectors: Vec<Option<Vec<Int>>> = vec![None; cycles.len()];
    let mut queue: VecDeque<usize> = (0..cycles.len()).collect();
    let mut deferred_in_a_row = 0;
    let mut first = true;
    while let Some(i) = queue.pop_front() {
        let cycle = &cycles[i];
        if vectors[i].is_none() {
            vectors[i] = Some(cycle_vector_from_space(w, &cycle.edges).map_err(|e| with_cycle(e, i))?);
        }
        let wv = vectors[i].as_ref().unwrap();
        let anchor = cycle.edges.iter().position(|&e| arcs[e].is_some());
        let s = match anchor {
            _ if first => 1,
            Some(pos) => {
                let e = cycle.edges[pos];
                if implied_arcs(cycle, wv, 1)[pos].1 == arcs[e].unwrap() {
                    1
                } else {
                    -1
                }
            }
            None => {
                queue.push_back(i);
                deferred_in_a_row += 1;
                if deferred_in_a_row >= queue.len() {
                    return Err(OrientError::Deadlock { remaining: queue.len() });
                }
                continue;
            }
        };
        first = false;
        deferred_in_a_row = 0;
        for (e, arc) in implied_arcs(cycle, wv, s) {
            match arcs[e] {
                Some(existing) if existing != arc => {
                    return Err(OrientError::OrientationConflict { cycle: i, edge: e })
                }
                _ => arcs[e] = Some(arc),
            }
        }
    }
    let arcs: Vec<(usize, usize)> = arcs
        .into_iter()
        .enumerate()
        .map(|(e, a)| a.ok_or(OrientError::NotTwoConnected { edge: e }))
        .collect::<Result<_, _>>()?;
    Ok(Orientation::from_arcs(g, arcs)?.canonical())
}
