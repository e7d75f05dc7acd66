//! Dense matrices with entries in an arbitrary [`Field`], plus the usual
//! Gaussian-elimination toolkit.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        Matrix { rows: r, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Clone, E>(&self, f: impl FnMut(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Matrix::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)].clone())
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows.start + i, cols.start + j)].clone())
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack: row counts differ");
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack: column counts differ");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Concatenates column blocks; `rows` is needed when the list is empty.
    pub fn hconcat(rows: usize, blocks: &[Self]) -> Self {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                assert_eq!(b.rows, rows, "hconcat: row counts differ");
                out.extend(b.row(i).iter().cloned());
            }
        }
        Matrix { rows, cols, data: out }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn zero<F: Field<Elem = T>>(f: &F, rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, f.zero())
    }

    pub fn identity<F: Field<Elem = T>>(f: &F, n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { f.one() } else { f.zero() })
    }

    pub fn diagonal<F: Field<Elem = T>>(f: &F, diag: &[T]) -> Self {
        let n = diag.len();
        Matrix::from_fn(n, n, |i, j| if i == j { diag[i].clone() } else { f.zero() })
    }

    /// Block-diagonal matrix.
    pub fn block_diagonal<F: Field<Elem = T>>(f: &F, blocks: &[Self]) -> Self {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zero(f, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn is_zero<F: Field<Elem = T>>(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }

    pub fn mul<F: Field<Elem = T>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product: shapes do not match");
        let mut out = Matrix::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if f.is_zero(b) {
                        continue;
                    }
                    let t = f.add(&out[(i, j)], &f.mul(a, b));
                    out[(i, j)] = t;
                }
            }
        }
        out
    }

    pub fn add<F: Field<Elem = T>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum: shapes differ");
        Matrix::from_fn(self.rows, self.cols, |i, j| f.add(&self[(i, j)], &other[(i, j)]))
    }

    pub fn sub<F: Field<Elem = T>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix difference: shapes differ");
        Matrix::from_fn(self.rows, self.cols, |i, j| f.sub(&self[(i, j)], &other[(i, j)]))
    }

    pub fn neg<F: Field<Elem = T>>(&self, f: &F) -> Self {
        self.map(|x| f.neg(x))
    }

    pub fn scale<F: Field<Elem = T>>(&self, f: &F, c: &T) -> Self {
        self.map(|x| f.mul(x, c))
    }

    pub fn apply<F: Field<Elem = T>>(&self, f: &F, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(f.zero(), |acc, j| f.add(&acc, &f.mul(&self[(i, j)], &v[j]))))
            .collect()
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref<F: Field<Elem = T>>(&self, f: &F) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(&m[(i, c)])) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(&m[(r, c)]).unwrap();
            for j in c..m.cols {
                m[(r, j)] = f.mul(&m[(r, j)], &inv);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(&m[(i, c)]) {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    let t = f.sub(&m[(i, j)], &f.mul(&factor, &m[(r, j)]));
                    m[(i, j)] = t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank<F: Field<Elem = T>>(&self, f: &F) -> usize {
        self.rref(f).1.len()
    }

    /// Basis of the null space, as the columns of the returned matrix.
    pub fn kernel<F: Field<Elem = T>>(&self, f: &F) -> Self {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zero(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out[(fc, k)] = f.one();
            for (row, &pc) in pivots.iter().enumerate() {
                out[(pc, k)] = f.neg(&r[(row, fc)]);
            }
        }
        out
    }

    /// A basis of the column space, extracted from the columns of `self`.
    pub fn column_basis<F: Field<Elem = T>>(&self, f: &F) -> Self {
        let (_, pivots) = self.rref(f);
        self.select_columns(&pivots)
    }

    /// Some `X` with `self · X = rhs`, if one exists.
    pub fn solve<F: Field<Elem = T>>(&self, f: &F, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "solve: row counts differ");
        let aug = self.hstack(rhs);
        let (r, pivots) = aug.rref(f);
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Matrix::zero(f, self.cols, rhs.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(pc, j)] = r[(row, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    pub fn inverse<F: Field<Elem = T>>(&self, f: &F) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(f, n));
        let (r, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[..n].iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        Some(r.submatrix(0..n, n..2 * n))
    }

    pub fn det<F: Field<Elem = T>>(&self, f: &F) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut acc = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !f.is_zero(&m[(i, c)])) else {
                return f.zero();
            };
            if p != c {
                m.swap_rows(p, c);
                acc = f.neg(&acc);
            }
            let piv = m[(c, c)].clone();
            acc = f.mul(&acc, &piv);
            let inv = f.inv(&piv).unwrap();
            for i in c + 1..n {
                if f.is_zero(&m[(i, c)]) {
                    continue;
                }
                let factor = f.mul(&m[(i, c)], &inv);
                for j in c..n {
                    let t = f.sub(&m[(i, j)], &f.mul(&factor, &m[(c, j)]));
                    m[(i, j)] = t;
                }
            }
        }
        acc
    }

    pub fn check_shape(&self, rows: usize, cols: usize, what: &str) -> Result<()> {
        if self.rows != rows || self.cols != cols {
            return Err(Error::DimensionMismatch(format!(
                "{what}: expected {rows}x{cols}, found {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }
}

/// Coordinates on a quotient space `F^n / T`, relative to a complement of
/// `T` spanned by standard basis vectors.
#[derive(Clone, Debug)]
pub struct QuotientMap<T> {
    sub_rank: usize,
    /// Indices of the standard basis vectors spanning the complement.
    complement: Vec<usize>,
    /// Inverse of `[basis of T | chosen standard vectors]`.
    inverse: Matrix<T>,
}

impl<T: Clone> QuotientMap<T> {
    /// `sub` holds spanning vectors of `T` as columns.
    pub fn new<F: Field<Elem = T>>(f: &F, sub: &Matrix<T>) -> Self {
        let n = sub.rows();
        let m = sub.hstack(&Matrix::identity(f, n));
        let (_, pivots) = m.rref(f);
        let sub_rank = pivots.iter().filter(|&&c| c < sub.cols()).count();
        let complement = pivots.iter().filter(|&&c| c >= sub.cols()).map(|c| c - sub.cols()).collect();
        let inverse = m.select_columns(&pivots).inverse(f).expect("pivot columns are independent");
        QuotientMap { sub_rank, complement, inverse }
    }

    /// Standard basis vectors whose classes form the quotient basis.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    /// The complement vectors as columns of an `n × dim` matrix.
    pub fn lifts<F: Field<Elem = T>>(&self, f: &F) -> Matrix<T> {
        Matrix::identity(f, self.inverse.rows()).select_columns(&self.complement)
    }

    pub fn dim(&self) -> usize {
        self.inverse.rows() - self.sub_rank
    }

    /// Quotient coordinates of each column of `v`.
    pub fn apply<F: Field<Elem = T>>(&self, f: &F, v: &Matrix<T>) -> Matrix<T> {
        let full = self.inverse.mul(f, v);
        full.submatrix(self.sub_rank..full.rows(), 0..full.cols())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn q(rows: Vec<Vec<i64>>) -> Matrix<num_rational::BigRational> {
        let c = rows[0].len();
        Matrix::from_rows(rows, c).map(|x| Rationals.integer(*x))
    }

    #[test]
    fn det_and_inverse() {
        let a = q(vec![vec![2, 1], vec![7, 4]]);
        assert_eq!(a.det(&Rationals), Rationals.integer(1));
        let inv = a.inverse(&Rationals).unwrap();
        assert_eq!(a.mul(&Rationals, &inv), Matrix::identity(&Rationals, 2));
        let s = q(vec![vec![1, 2], vec![2, 4]]);
        assert!(s.inverse(&Rationals).is_none());
        assert_eq!(s.det(&Rationals), Rationals.zero());
    }

    #[test]
    fn kernel_is_annihilated() {
        let f = PrimeField::new(3).unwrap();
        let a = Matrix::from_rows(vec![vec![1, 2, 0, 1], vec![2, 1, 0, 2]], 4);
        let k = a.kernel(&f);
        assert_eq!(k.cols(), 4 - a.rank(&f));
        assert!(a.mul(&f, &k).is_zero(&f));
    }

    #[test]
    fn solve_finds_preimage() {
        let a = q(vec![vec![1, 1], vec![0, 2], vec![1, 3]]);
        let b = q(vec![vec![3], vec![4], vec![7]]);
        let x = a.solve(&Rationals, &b).unwrap();
        assert_eq!(a.mul(&Rationals, &x), b);
        let bad = q(vec![vec![1], vec![0], vec![0]]);
        assert!(a.solve(&Rationals, &bad).is_none());
    }
}
