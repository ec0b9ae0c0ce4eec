//! Recovering the signed cycle space from a (noisy) length vector.
//!
//! Every signed cycle vector `w` of the configuration orientation satisfies
//! `w . l(p) = 0`, so `[w; w . l]` is a short vector of the lattice built
//! from `l` (its last coordinate is `w . eps`, at most the cycle length in
//! magnitude). LLL exposes these vectors; the ones below the medium-norm
//! threshold `sqrt(2m) 2^(m/2)` are kept and their last coordinate dropped.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactmath::{canonical_integer_row_basis, EchelonBasis, Matrix};
use crate::lll::{build_lattice, lll_reduce, norm_sq, LatticeBasis, LllError, LllReduction};
use crate::{Int, IntMatrix, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationsError {
    #[error("length vector is empty")]
    EmptyInput,
    #[error("no reduced basis vector is below the medium-norm threshold")]
    NoMediumVectors,
    #[error("no short signed relation satisfies the length vector")]
    NoRelationsFound,
    #[error(transparent)]
    Lll(#[from] LllError),
}

/// Rows spanning the recovered cycle space, in canonical form (RREF rows
/// scaled to primitive integers with positive leading entry), plus the
/// lattice vectors they came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSpaceBasis {
    rows: IntMatrix,
    augmented: Vec<Vec<Int>>,
}

impl CycleSpaceBasis {
    /// Canonicalizes the span of `vectors` (each of length `m`).
    pub fn from_vectors(m: usize, vectors: Vec<Vec<Int>>, augmented: Vec<Vec<Int>>) -> Self {
        let rows = canonical_integer_row_basis(&Matrix::from_rows(m, vectors));
        CycleSpaceBasis { rows, augmented }
    }

    pub fn from_matrix(rows: &IntMatrix) -> Self {
        CycleSpaceBasis { rows: canonical_integer_row_basis(rows), augmented: Vec::new() }
    }

    pub fn rows(&self) -> &IntMatrix {
        &self.rows
    }

    /// Dimension of the recovered space.
    pub fn dimension(&self) -> usize {
        self.rows.rows()
    }

    pub fn m(&self) -> usize {
        self.rows.cols()
    }

    /// The kept lattice vectors `[x; f]` before truncation, with `f = l . x`.
    pub fn augmented(&self) -> &[Vec<Int>] {
        &self.augmented
    }

    /// Same space with coordinates reordered: new coordinate `j` is old
    /// coordinate `order[j]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        CycleSpaceBasis { rows: canonical_integer_row_basis(&self.rows.select_columns(order)), augmented: Vec::new() }
    }
}

pub fn default_delta() -> Rational {
    Rational::new(3.into(), 4.into())
}

/// Square of the medium-norm threshold: `2m * 2^m`.
pub fn medium_norm_sq_bound(m: usize) -> Int {
    Int::from(2 * m) << m
}

/// Number of vectors of `basis` whose norm is at most `sqrt(2m) 2^(m/2)`
/// (ties count as medium).
pub fn count_medium_vectors(basis: &LatticeBasis<Int>, m: usize) -> usize {
    let bound = medium_norm_sq_bound(m);
    basis.vectors().iter().filter(|v| norm_sq(v) <= bound).count()
}

/// How reduced vectors are picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    /// Every vector below the medium-norm threshold.
    Threshold,
    /// The `c` shortest vectors (requires knowing `c`, hence `n`).
    Shortest(usize),
}

#[derive(Clone, Debug)]
pub struct RelationsOutput {
    pub basis: CycleSpaceBasis,
    pub reduction: LllReduction<Int>,
    /// Reduced vectors below the medium-norm threshold.
    pub medium_count: usize,
}

/// Threshold-based relation recovery with `delta = 3/4`.
pub fn compute_relations(l: &[Int]) -> Result<RelationsOutput, RelationsError> {
    compute_relations_with(l, &default_delta(), Selection::Threshold)
}

pub fn compute_relations_with(
    l: &[Int],
    delta: &Rational,
    selection: Selection,
) -> Result<RelationsOutput, RelationsError> {
    let m = l.len();
    if m == 0 {
        return Err(RelationsError::EmptyInput);
    }
    let reduction = lll_reduce(&build_lattice(l), delta)?;
    let medium_count = count_medium_vectors(&reduction.basis, m);
    let kept: Vec<Vec<Int>> = match selection {
        Selection::Threshold => {
            let bound = medium_norm_sq_bound(m);
            reduction.basis.vectors().iter().filter(|v| norm_sq(v) <= bound).cloned().collect()
        }
        Selection::Shortest(c) => {
            let mut by_norm: Vec<(Int, usize)> =
                reduction.basis.vectors().iter().enumerate().map(|(i, v)| (norm_sq(v), i)).collect();
            by_norm.sort();
            by_norm.iter().take(c).map(|&(_, i)| reduction.basis.vector(i).to_vec()).collect()
        }
    };
    if kept.is_empty() {
        return Err(RelationsError::NoMediumVectors);
    }
    let truncated = kept.iter().map(|v| v[..m].to_vec()).collect();
    let basis = CycleSpaceBasis::from_vectors(m, truncated, kept);
    Ok(RelationsOutput { basis, reduction, medium_count })
}

/// Exhaustive search for short relations: every `{-1,0,1}` vector `v`
/// supported on at most `k` coordinates with
/// `|v . l| <= noise_bound * |supp(v)|` is a candidate; a maximal
/// independent subset is returned, taking candidates with smaller
/// `|v . l|` (then smaller support) first. With `max_rank` set (the cycle
/// rank, when known) the search stops after that many relations.
pub fn kbasis_relations(
    l: &[Int],
    k: usize,
    noise_bound: u32,
    max_rank: Option<usize>,
) -> Result<CycleSpaceBasis, RelationsError> {
    let m = l.len();
    if m == 0 {
        return Err(RelationsError::EmptyInput);
    }
    let mut candidates: Vec<(Int, Vec<usize>, Vec<i8>)> = Vec::new();
    let mut support: Vec<usize> = Vec::new();
    for size in 1..=k.min(m) {
        support.clear();
        support.extend(0..size);
        loop {
            // first entry fixed to +1; the negated vector is the same relation
            for mask in 0..(1u64 << (size - 1)) {
                let signs: Vec<i8> =
                    std::iter::once(1).chain((0..size - 1).map(|b| if mask >> b & 1 == 1 { -1 } else { 1 })).collect();
                let total = support.iter().zip(&signs).fold(
                    Int::zero(),
                    |acc, (&i, &s)| {
                        if s > 0 {
                            acc + &l[i]
                        } else {
                            acc - &l[i]
                        }
                    },
                );
                if total.abs() <= Int::from(noise_bound) * Int::from(size) {
                    candidates.push((total.abs(), support.clone(), signs));
                }
            }
            let Some(i) = (0..size).rev().find(|&i| support[i] < m - size + i) else { break };
            support[i] += 1;
            for j in i + 1..size {
                support[j] = support[j - 1] + 1;
            }
        }
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.len().cmp(&b.1.len())).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut echelon = EchelonBasis::<Rational>::new(m);
    let mut rows = Vec::new();
    let mut augmented = Vec::new();
    for (_, supp, signs) in candidates {
        if max_rank.is_some_and(|r| rows.len() >= r) {
            break;
        }
        let mut v = vec![Int::zero(); m];
        for (&i, &s) in supp.iter().zip(&signs) {
            v[i] = Int::from(s);
        }
        if echelon.insert(v.iter().map(|x| Rational::from_integer(x.clone())).collect()) {
            let f = v.iter().zip(l).fold(Int::zero(), |acc, (a, b)| acc + a * b);
            let mut aug = v.clone();
            aug.push(f);
            augmented.push(aug);
            rows.push(v);
        }
    }
    if rows.is_empty() {
        return Err(RelationsError::NoRelationsFound);
    }
    Ok(CycleSpaceBasis::from_vectors(m, rows, augmented))
}

/// True iff the rows of `w` span exactly the cokernel of `incidence`
/// (`m x n`): every row is orthogonal to every incidence column and the
/// rank equals `m - rank(incidence)`.
pub fn spans_cycle_space(w: &IntMatrix, incidence: &IntMatrix) -> bool {
    if w.cols() != incidence.rows() {
        return false;
    }
    if !w.mul(incidence).is_zero() {
        return false;
    }
    let inc_rank = crate::exactmath::to_rational(incidence).rank();
    crate::exactmath::to_rational(w).rank() == incidence.rows() - inc_rank
}

/// Helper for sign-normalizing a single integer row.
pub(crate) fn primitive(v: &[Int]) -> Vec<Int> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let neg = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    v.iter()
        .map(|x| {
            let y = x / &g;
            if neg {
                -y
            } else {
                y
            }
        })
        .collect()
}
