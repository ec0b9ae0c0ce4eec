//! Dense matrices over exact scalars.
//!
//! `Matrix<T>` is generic over any signed numeric type; elimination-based
//! routines (`rref`, `rank`, `right_kernel_basis`, `solve`, `determinant`)
//! require an [`ExactField`], which in practice means `Ratio<I>` for some
//! integer type `I`. Pivoting is deterministic: leftmost column first, and
//! within a column the topmost usable row.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed, Zero};

/// Signed numeric scalar usable as a matrix entry.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Num + Signed {}

impl<T> Scalar for T where T: Clone + PartialEq + fmt::Debug + Num + Signed {}

/// Marker for scalars with exact division. Floating point types are
/// deliberately excluded: rank decisions must not depend on a tolerance.
pub trait ExactField: Scalar {}

impl<I> ExactField for Ratio<I> where I: Clone + Integer + Signed + fmt::Debug {}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        Matrix { rows, cols, data }
    }

    /// A matrix with no rows and `cols` columns.
    pub fn empty(cols: usize) -> Self {
        Matrix { rows: 0, cols, data: Vec::new() }
    }

    /// Builds a matrix from row vectors; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: nrows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self[(r, c)].clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * columns.len());
        for r in 0..self.rows {
            for &c in columns {
                data.push(self[(r, c)].clone());
            }
        }
        Matrix { rows: self.rows, cols: columns.len(), data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix { rows: rows.len(), cols: self.cols, data }
    }

    /// Vertical concatenation.
    pub fn stack(&self, below: &Self) -> Self {
        assert_eq!(self.cols, below.cols, "column mismatch in stack");
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Matrix { rows: self.rows + below.rows, cols: self.cols, data }
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        self.row_iter().map(|row| dot(row, v)).collect()
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<F: ExactField> Matrix<F> {
    /// Reduced row echelon form together with the pivot column of each
    /// nonzero row.
    pub fn rref_with_pivots(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(lead, p);
            let inv = F::one() / m[(lead, col)].clone();
            for c in col..m.cols {
                m[(lead, c)] = m[(lead, c)].clone() * inv.clone();
            }
            for r in 0..m.rows {
                if r == lead || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in col..m.cols {
                    let sub = factor.clone() * m[(lead, c)].clone();
                    m[(r, c)] = m[(r, c)].clone() - sub;
                }
            }
            pivots.push(col);
            lead += 1;
        }
        (m, pivots)
    }

    pub fn rref(&self) -> Self {
        self.rref_with_pivots().0
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Basis of `{x : self * x = 0}` as rows. Each basis vector has a 1 in
    /// one free (non-pivot) coordinate and 0 in every other free coordinate,
    /// listed in increasing order of that free coordinate.
    pub fn right_kernel_basis(&self) -> Self {
        let (r, pivots) = self.rref_with_pivots();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[(row, free)].clone();
            }
            basis.push(v);
        }
        Matrix::from_rows(self.cols, basis)
    }

    /// Nonzero rows of the RREF: a canonical basis of the row space.
    pub fn row_space_basis(&self) -> Self {
        let (r, pivots) = self.rref_with_pivots();
        r.select_rows(&(0..pivots.len()).collect::<Vec<_>>())
    }

    /// True iff both matrices have the same row space.
    pub fn same_row_space(&self, other: &Self) -> bool {
        self.cols == other.cols && self.row_space_basis() == other.row_space_basis()
    }

    pub fn determinant(&self) -> F {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let mut det = F::one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                return F::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det = det * pivot.clone();
            for r in col + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone() / pivot.clone();
                for c in col..m.cols {
                    let sub = factor.clone() * m[(col, c)].clone();
                    m[(r, c)] = m[(r, c)].clone() - sub;
                }
            }
        }
        det
    }

    /// The unique `X` with `self * X = rhs`, or `None` if the system is
    /// inconsistent or its solution is not unique.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "row mismatch in solve");
        let n = self.cols;
        let mut aug = Matrix::zeros(self.rows, n + rhs.cols);
        for r in 0..self.rows {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..rhs.cols {
                aug[(r, n + c)] = rhs[(r, c)].clone();
            }
        }
        let (red, pivots) = aug.rref_with_pivots();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            // either a pivot in the right-hand block (inconsistent) or a free unknown
            return None;
        }
        let mut x = Matrix::zeros(n, rhs.cols);
        for i in 0..n {
            for c in 0..rhs.cols {
                x[(i, c)] = red[(i, n + c)].clone();
            }
        }
        Some(x)
    }
}

/// Row-echelon basis built one vector at a time; `insert` reports whether
/// the vector was independent of those already present.
#[derive(Clone, Debug)]
pub struct EchelonBasis<F> {
    cols: usize,
    // (pivot column, row with 1 at the pivot)
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: ExactField> EchelonBasis<F> {
    pub fn new(cols: usize) -> Self {
        EchelonBasis { cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows; the remainder is zero iff `v`
    /// lies in their span.
    pub fn reduce(&self, mut v: Vec<F>) -> Vec<F> {
        assert_eq!(v.len(), self.cols);
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        v
    }

    pub fn contains(&self, v: Vec<F>) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn insert(&mut self, v: Vec<F>) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = F::one() / r[p].clone();
        for x in &mut r {
            *x = x.clone() * inv.clone();
        }
        self.rows.push((p, r));
        true
    }
}

/// Lifts an integer matrix to its field of fractions.
pub fn to_rational<I>(m: &Matrix<I>) -> Matrix<Ratio<I>>
where
    I: Clone + Integer,
{
    m.map(|x| Ratio::from_integer(x.clone()))
}

/// Scales a rational vector to the primitive integer vector on the same
/// ray, then flips it so the first nonzero entry is positive. The zero
/// vector maps to zero.
pub fn primitive_integer_vector<I>(v: &[Ratio<I>]) -> Vec<I>
where
    I: Clone + Integer + Signed,
{
    let lcm = v.iter().fold(I::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<I> = v.iter().map(|x| x.numer().clone() * (lcm.clone() / x.denom().clone())).collect();
    let g = ints.iter().fold(I::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let negate = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    for x in &mut ints {
        *x = x.clone() / g.clone();
        if negate {
            *x = -x.clone();
        }
    }
    ints
}

/// Canonical integer basis of the row space: RREF rows made primitive with
/// positive leading entry.
pub fn canonical_integer_row_basis<I>(m: &Matrix<I>) -> Matrix<I>
where
    I: Clone + Integer + Signed + fmt::Debug,
{
    let basis = to_rational(m).row_space_basis();
    let rows = basis.row_iter().map(primitive_integer_vector).collect();
    Matrix::from_rows(m.cols(), rows)
}

/// True if `v` is `±1` times a vector whose entries are all in `{-1,0,1}`.
pub fn is_signed_unit_vector<I: Clone + Integer + Signed>(v: &[I]) -> bool {
    v.iter().all(|x| x.is_zero() || x.abs().is_one())
}
