//! Exact LLL lattice basis reduction.
//!
//! Two exact implementations of the same swap-based algorithm are provided:
//!
//! * [`lll_reduce`]: the integral variant that tracks the Gram determinants
//!   `d_i` and the scaled coefficients `lambda_ij = d_j * mu_ij`, so every
//!   intermediate value is an integer (Cohen, Algorithm 2.6.7). This is the
//!   one the pipeline runs.
//! * [`lll_reduce_rational`]: the textbook variant with rational
//!   Gram-Schmidt data. It takes exactly the same decisions and serves as the
//!   reference the integral variant is tested against.
//!
//! Both return the reduced basis together with the unimodular transform.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{NumAssignRef, NumRef, One, Signed, Zero};
use thiserror::Error;

use crate::exactmath::Matrix;

/// Integer types the reduction can run over.
pub trait LllInt: Integer + Signed + Clone + fmt::Debug + NumRef + NumAssignRef {}

impl<T> LllInt for T where T: Integer + Signed + Clone + fmt::Debug + NumRef + NumAssignRef {}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LllError {
    #[error("input vectors are linearly dependent")]
    DependentInput,
    #[error("delta must satisfy 1/4 < delta < 1")]
    InvalidDelta,
    #[error("basis vector {index} has length {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
}

/// An ordered list of lattice vectors in `Z^dim` (the columns of the
/// generating matrix).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBasis<I> {
    dim: usize,
    vectors: Vec<Vec<I>>,
}

impl<I: Clone> LatticeBasis<I> {
    pub fn new(dim: usize, vectors: Vec<Vec<I>>) -> Result<Self, LllError> {
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(LllError::DimensionMismatch { index, expected: dim, found: v.len() });
            }
        }
        Ok(LatticeBasis { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<I>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[I] {
        &self.vectors[i]
    }

    /// `dim x len` matrix whose columns are the basis vectors.
    pub fn generator_matrix(&self) -> Matrix<I> {
        let mut data = Vec::with_capacity(self.dim * self.vectors.len());
        for r in 0..self.dim {
            for v in &self.vectors {
                data.push(v[r].clone());
            }
        }
        Matrix::new(self.dim, self.vectors.len(), data)
    }
}

/// The lattice spanned by the columns of `[I_m ; r^T]`: column `k` is the
/// unit vector `e_k` with `r_k` appended. A vector `[x; f]` belongs to it
/// iff `f = r . x`.
pub fn build_lattice<I: Clone + Zero + One>(r: &[I]) -> LatticeBasis<I> {
    let m = r.len();
    let vectors = r
        .iter()
        .enumerate()
        .map(|(k, rk)| {
            let mut v = vec![I::zero(); m + 1];
            v[k] = I::one();
            v[m] = rk.clone();
            v
        })
        .collect();
    LatticeBasis { dim: m + 1, vectors }
}

pub fn norm_sq<I: LllInt>(v: &[I]) -> I {
    dot(v, v)
}

fn dot<I: LllInt>(a: &[I], b: &[I]) -> I {
    a.iter().zip(b).fold(I::zero(), |acc, (x, y)| acc + x.clone() * y)
}

/// `a -= q * b`
fn sub_multiple<I: LllInt>(a: &mut [I], q: &I, b: &[I]) {
    if q.is_one() {
        a.iter_mut().zip(b).for_each(|(x, y)| *x -= y);
    } else if (-q.clone()).is_one() {
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    } else {
        a.iter_mut().zip(b).for_each(|(x, y)| *x -= &(q.clone() * y));
    }
}

/// Nearest integer to `num / den` for `den > 0`, halves rounded up.
fn round_div<I: LllInt>(num: &I, den: &I) -> I {
    let two = I::one() + I::one();
    (two.clone() * num + den).div_floor(&(two * den))
}

fn check_delta<I: LllInt>(delta: &Ratio<I>) -> Result<(), LllError> {
    let quarter = Ratio::new(I::one(), I::one() + I::one() + I::one() + I::one());
    if *delta <= quarter || *delta >= Ratio::one() {
        return Err(LllError::InvalidDelta);
    }
    Ok(())
}

/// Result of a reduction: `basis[j] = sum_i transform[(i, j)] * input[i]`.
#[derive(Clone, Debug)]
pub struct LllReduction<I> {
    pub basis: LatticeBasis<I>,
    pub transform: Matrix<I>,
    pub swaps: usize,
}

/// Tracks the coefficient vectors of the current basis in terms of the input.
struct Transform<I> {
    rows: Vec<Vec<I>>,
}

impl<I: LllInt> Transform<I> {
    fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { I::one() } else { I::zero() }).collect()).collect();
        Transform { rows }
    }

    fn sub_multiple(&mut self, k: usize, q: &I, l: usize) {
        let (lo, hi) = self.rows.split_at_mut(k);
        sub_multiple(&mut hi[0], q, &lo[l]);
    }

    fn into_matrix(self) -> Matrix<I> {
        let n = self.rows.len();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for row in &self.rows {
                data.push(row[i].clone());
            }
        }
        Matrix::new(n, n, data)
    }
}

/// Integral LLL reduction with parameter `delta` (`1/4 < delta < 1`).
pub fn lll_reduce<I: LllInt>(input: &LatticeBasis<I>, delta: &Ratio<I>) -> Result<LllReduction<I>, LllError> {
    check_delta(delta)?;
    let (p, q) = (delta.numer().clone(), delta.denom().clone());
    let n = input.len();
    let mut b = input.vectors.clone();
    let mut tr = Transform::identity(n);
    let mut swaps = 0;
    if n == 0 {
        return Ok(LllReduction { basis: input.clone(), transform: tr.into_matrix(), swaps });
    }

    // d[i] is the Gram determinant of the first i vectors; d[0] = 1.
    let mut d = vec![I::zero(); n + 1];
    d[0] = I::one();
    d[1] = norm_sq(&b[0]);
    if d[1].is_zero() {
        return Err(LllError::DependentInput);
    }
    // lam[k][j] = d[j + 1] * mu_kj for j < k
    let mut lam: Vec<Vec<I>> = (0..n).map(|k| vec![I::zero(); k]).collect();

    let red = |k: usize, l: usize, b: &mut Vec<Vec<I>>, lam: &mut Vec<Vec<I>>, d: &[I], tr: &mut Transform<I>| {
        let two_lam = lam[k][l].clone() + &lam[k][l];
        if two_lam.abs() <= d[l + 1] {
            return;
        }
        let r = round_div(&lam[k][l], &d[l + 1]);
        {
            let (lo, hi) = b.split_at_mut(k);
            sub_multiple(&mut hi[0], &r, &lo[l]);
        }
        tr.sub_multiple(k, &r, l);
        lam[k][l] -= &(r.clone() * &d[l + 1]);
        let (lo, hi) = lam.split_at_mut(k);
        for i in 0..l {
            hi[0][i] -= &(r.clone() * &lo[l][i]);
        }
    };

    let mut k = 1;
    let mut kmax = 0;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&b[k], &b[j]);
                for i in 0..j {
                    u = (d[i + 1].clone() * &u - lam[k][i].clone() * &lam[j][i]) / d[i].clone();
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(LllError::DependentInput);
                    }
                    d[k + 1] = u;
                }
            }
        }
        red(k, k - 1, &mut b, &mut lam, &d, &mut tr);
        let lhs = q.clone() * &d[k + 1] * &d[k - 1];
        let rhs = p.clone() * &d[k] * &d[k] - q.clone() * &lam[k][k - 1] * &lam[k][k - 1];
        if lhs < rhs {
            swaps += 1;
            b.swap(k, k - 1);
            tr.rows.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = std::mem::replace(&mut lam[k][j], I::zero());
                lam[k][j] = std::mem::replace(&mut lam[k - 1][j], t);
            }
            let mu = lam[k][k - 1].clone();
            let big = (d[k - 1].clone() * &d[k + 1] + mu.clone() * &mu) / d[k].clone();
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                let new_ik = (d[k + 1].clone() * &lam[i][k - 1] - mu.clone() * &t) / d[k].clone();
                let new_ik1 = (big.clone() * &t + mu.clone() * &new_ik) / d[k + 1].clone();
                lam[i][k] = new_ik;
                lam[i][k - 1] = new_ik1;
            }
            d[k] = big;
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                red(k, l, &mut b, &mut lam, &d, &mut tr);
            }
            k += 1;
        }
    }
    Ok(LllReduction { basis: LatticeBasis { dim: input.dim, vectors: b }, transform: tr.into_matrix(), swaps })
}

/// Reference reduction with rational Gram-Schmidt coefficients. Takes the
/// same decisions as [`lll_reduce`] and therefore returns the same basis.
pub fn lll_reduce_rational<I: LllInt>(input: &LatticeBasis<I>, delta: &Ratio<I>) -> Result<LllReduction<I>, LllError> {
    check_delta(delta)?;
    type Q<I> = Ratio<I>;
    let n = input.len();
    let mut b = input.vectors.clone();
    let mut tr = Transform::identity(n);
    let mut swaps = 0;
    if n == 0 {
        return Ok(LllReduction { basis: input.clone(), transform: tr.into_matrix(), swaps });
    }
    let lift = |v: &[I]| -> Vec<Q<I>> { v.iter().map(|x| Q::from_integer(x.clone())).collect() };
    let qdot =
        |a: &[Q<I>], c: &[Q<I>]| -> Q<I> { a.iter().zip(c).fold(Q::zero(), |acc, (x, y)| acc + x.clone() * y.clone()) };
    let half = Q::new(I::one(), I::one() + I::one());

    let mut bstar: Vec<Vec<Q<I>>> = vec![Vec::new(); n];
    let mut big: Vec<Q<I>> = vec![Q::zero(); n];
    let mut mu: Vec<Vec<Q<I>>> = (0..n).map(|k| vec![Q::zero(); k]).collect();
    bstar[0] = lift(&b[0]);
    big[0] = qdot(&bstar[0], &bstar[0]);
    if big[0].is_zero() {
        return Err(LllError::DependentInput);
    }

    let mut k = 1;
    let mut kmax = 0;
    while k < n {
        if k > kmax {
            kmax = k;
            let bk = lift(&b[k]);
            let mut star = bk.clone();
            for j in 0..k {
                mu[k][j] = qdot(&bk, &bstar[j]) / big[j].clone();
                for (s, t) in star.iter_mut().zip(&bstar[j]) {
                    *s = s.clone() - mu[k][j].clone() * t.clone();
                }
            }
            big[k] = qdot(&star, &star);
            bstar[k] = star;
            if big[k].is_zero() {
                return Err(LllError::DependentInput);
            }
        }
        let reduce = |k: usize, l: usize, b: &mut Vec<Vec<I>>, mu: &mut Vec<Vec<Q<I>>>, tr: &mut Transform<I>| {
            if mu[k][l].abs() <= half {
                return;
            }
            let r = (mu[k][l].clone() + half.clone()).floor().to_integer();
            {
                let (lo, hi) = b.split_at_mut(k);
                sub_multiple(&mut hi[0], &r, &lo[l]);
            }
            tr.sub_multiple(k, &r, l);
            let rq = Q::from_integer(r);
            mu[k][l] = mu[k][l].clone() - rq.clone();
            let (lo, hi) = mu.split_at_mut(k);
            for i in 0..l {
                hi[0][i] = hi[0][i].clone() - rq.clone() * lo[l][i].clone();
            }
        };
        reduce(k, k - 1, &mut b, &mut mu, &mut tr);
        let m = mu[k][k - 1].clone();
        if big[k] < (delta.clone() - m.clone() * m.clone()) * big[k - 1].clone() {
            swaps += 1;
            b.swap(k, k - 1);
            tr.rows.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = t;
            }
            let bb = big[k].clone() + m.clone() * m.clone() * big[k - 1].clone();
            mu[k][k - 1] = m.clone() * big[k - 1].clone() / bb.clone();
            // new b*_{k-1} = b*_k + m b*_{k-1};  new b*_k = (B_k/BB) b*_{k-1} - mu' b*_k
            let old_prev = bstar[k - 1].clone();
            let old_cur = bstar[k].clone();
            let new_prev: Vec<Q<I>> =
                old_cur.iter().zip(&old_prev).map(|(c, p)| c.clone() + m.clone() * p.clone()).collect();
            let coef = big[k].clone() / bb.clone();
            let new_cur: Vec<Q<I>> = old_prev
                .iter()
                .zip(&old_cur)
                .map(|(p, c)| coef.clone() * p.clone() - mu[k][k - 1].clone() * c.clone())
                .collect();
            bstar[k - 1] = new_prev;
            bstar[k] = new_cur;
            big[k] = big[k - 1].clone() * big[k].clone() / bb.clone();
            big[k - 1] = bb;
            for i in k + 1..=kmax {
                let t = mu[i][k].clone();
                mu[i][k] = mu[i][k - 1].clone() - m.clone() * t.clone();
                mu[i][k - 1] = t + mu[k][k - 1].clone() * mu[i][k].clone();
            }
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                reduce(k, l, &mut b, &mut mu, &mut tr);
            }
            k += 1;
        }
    }
    Ok(LllReduction { basis: LatticeBasis { dim: input.dim, vectors: b }, transform: tr.into_matrix(), swaps })
}

/// Gram-Schmidt data computed from scratch: `mu[(i, j)]` for `j < i` and the
/// squared norms of the orthogonalized vectors.
#[derive(Clone, Debug)]
pub struct GramSchmidt<I: Clone> {
    pub mu: Matrix<Ratio<I>>,
    pub norms_sq: Vec<Ratio<I>>,
}

pub fn gram_schmidt<I: LllInt>(basis: &LatticeBasis<I>) -> GramSchmidt<I> {
    let n = basis.len();
    let mut mu = Matrix::zeros(n, n);
    let mut stars: Vec<Vec<Ratio<I>>> = Vec::with_capacity(n);
    let mut norms_sq = Vec::with_capacity(n);
    for i in 0..n {
        let v: Vec<Ratio<I>> = basis.vectors[i].iter().map(|x| Ratio::from_integer(x.clone())).collect();
        let mut star = v.clone();
        for j in 0..i {
            let nj: &Ratio<I> = &norms_sq[j];
            if nj.is_zero() {
                continue;
            }
            let c = crate::exactmath::dot(&v, &stars[j]) / nj.clone();
            for (s, t) in star.iter_mut().zip(&stars[j]) {
                *s = s.clone() - c.clone() * t.clone();
            }
            mu[(i, j)] = c;
        }
        norms_sq.push(crate::exactmath::dot(&star, &star));
        stars.push(star);
    }
    for i in 0..n {
        mu[(i, i)] = Ratio::one();
    }
    GramSchmidt { mu, norms_sq }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionViolation {
    Dependent(usize),
    SizeReduction { i: usize, j: usize },
    Lovasz { k: usize },
}

/// Checks size reduction (`|mu_ij| <= 1/2`) and the Lovasz condition
/// `B_k >= (delta - mu_{k,k-1}^2) B_{k-1}` exactly.
pub fn check_reduced<I: LllInt>(basis: &LatticeBasis<I>, delta: &Ratio<I>) -> Result<(), ReductionViolation> {
    let gs = gram_schmidt(basis);
    let half = Ratio::new(I::one(), I::one() + I::one());
    for (i, b) in gs.norms_sq.iter().enumerate() {
        if b.is_zero() {
            return Err(ReductionViolation::Dependent(i));
        }
    }
    for i in 0..basis.len() {
        for j in 0..i {
            if gs.mu[(i, j)].abs() > half {
                return Err(ReductionViolation::SizeReduction { i, j });
            }
        }
    }
    for k in 1..basis.len() {
        let m = gs.mu[(k, k - 1)].clone();
        if gs.norms_sq[k] < (delta.clone() - m.clone() * m) * gs.norms_sq[k - 1].clone() {
            return Err(ReductionViolation::Lovasz { k });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn three_quarters() -> Ratio<BigInt> {
        Ratio::new(3.into(), 4.into())
    }

    fn basis(dim: usize, vs: &[&[i64]]) -> LatticeBasis<BigInt> {
        LatticeBasis::new(dim, vs.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn lattice_construction() {
        let l = build_lattice(&[BigInt::from(4), BigInt::from(11), BigInt::from(7)]);
        assert_eq!(l, basis(4, &[&[1, 0, 0, 4], &[0, 1, 0, 11], &[0, 0, 1, 7]]));
        let empty = build_lattice::<BigInt>(&[]);
        assert!(empty.is_empty());
        assert_eq!(empty.dim(), 1);
        // [x; r.x] = L x
        let x = [2i64, -1, 3];
        let g = l.generator_matrix();
        let v = g.mul_vec(&x.iter().map(|&t| BigInt::from(t)).collect::<Vec<_>>());
        assert_eq!(v[3], BigInt::from(2 * 4 - 11 + 3 * 7));
    }

    #[test]
    fn orthogonal_basis_is_fixed() {
        let b = basis(2, &[&[1, 0], &[0, 1]]);
        let out = lll_reduce(&b, &three_quarters()).unwrap();
        assert_eq!(out.basis, b);
        assert_eq!(out.swaps, 0);
    }

    #[test]
    fn finds_the_triangle_relation() {
        let l = build_lattice(&[BigInt::from(4), BigInt::from(11), BigInt::from(7)]);
        let out = lll_reduce(&l, &three_quarters()).unwrap();
        let target: Vec<BigInt> = [1, -1, 1, 0].iter().map(|&x| BigInt::from(x)).collect();
        let neg: Vec<BigInt> = target.iter().map(|x| -x).collect();
        assert!(out.basis.vectors().iter().any(|v| *v == target || *v == neg));
        assert_eq!(norm_sq(out.basis.vector(0)), BigInt::from(3));
    }

    #[test]
    fn rejects_bad_input() {
        let dep = basis(2, &[&[1, 2], &[2, 4]]);
        assert_eq!(lll_reduce(&dep, &three_quarters()).unwrap_err(), LllError::DependentInput);
        assert_eq!(lll_reduce_rational(&dep, &three_quarters()).unwrap_err(), LllError::DependentInput);
        let b = basis(2, &[&[1, 0]]);
        assert_eq!(lll_reduce(&b, &Ratio::new(1.into(), 4.into())).unwrap_err(), LllError::InvalidDelta);
        assert_eq!(lll_reduce(&b, &Ratio::new(1.into(), 1.into())).unwrap_err(), LllError::InvalidDelta);
        assert!(LatticeBasis::new(2, vec![vec![BigInt::from(1)]]).is_err());
    }

    #[test]
    fn machine_integers_work_too() {
        let b = LatticeBasis::new(3, vec![vec![1i64, 1, 1], vec![-1, 0, 2], vec![3, 5, 6]]).unwrap();
        let delta = Ratio::new(3i64, 4);
        let out = lll_reduce(&b, &delta).unwrap();
        assert_eq!(check_reduced(&out.basis, &delta), Ok(()));
        assert_eq!(out.basis, lll_reduce_rational(&b, &delta).unwrap().basis);
    }

    fn random_basis() -> impl Strategy<Value = LatticeBasis<BigInt>> {
        (1usize..6).prop_flat_map(|d| {
            proptest::collection::vec(proptest::collection::vec(-1000i64..1000, d + 1), d).prop_map(move |vs| {
                LatticeBasis::new(d + 1, vs.into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect())
                    .unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn integral_matches_reference(b in random_basis()) {
            let delta = three_quarters();
            match (lll_reduce(&b, &delta), lll_reduce_rational(&b, &delta)) {
                (Ok(x), Ok(y)) => {
                    prop_assert_eq!(&x.basis, &y.basis);
                    prop_assert_eq!(&x.transform, &y.transform);
                    prop_assert_eq!(check_reduced(&x.basis, &delta), Ok(()));
                    // output = input * transform
                    let prod = b.generator_matrix().mul(&x.transform);
                    prop_assert_eq!(prod, x.basis.generator_matrix());
                    let det = crate::exactmath::to_rational(&x.transform).determinant();
                    prop_assert!(det.abs().is_one());
                }
                (Err(e1), Err(e2)) => prop_assert_eq!(e1, e2),
                (a, c) => prop_assert!(false, "variants disagree: {:?} vs {:?}", a.is_ok(), c.is_ok()),
            }
        }
    }
}
