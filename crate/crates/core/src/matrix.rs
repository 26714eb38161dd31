//! Dense small matrices over ℤ or ℤ/m with `i64` entries.
//!
//! Entries over ℤ/m are kept reduced into `[0, m)`. Rectangular shapes,
//! including the empty 0×k and k×0 shapes, are allowed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;

use crate::scalars::{Ring, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

/// Which line of a matrix an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Row,
    Column,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Row => "row",
            Axis::Column => "column",
        })
    }
}

impl Matrix {
    /// Builds a matrix from row-major entries, reducing them into the ring.
    pub fn new(ring: Ring, rows: usize, cols: usize, data: Vec<i64>) -> Result<Self, ScalarError> {
        if ring == Ring::Rationals {
            return Err(ScalarError::Invalid("matrices need Z or Z/m entries".into()));
        }
        if data.len() != rows * cols {
            return Err(ScalarError::Invalid(alloc::format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let mut m = Matrix { ring, rows, cols, data };
        m.reduce();
        Ok(m)
    }

    pub fn from_rows(ring: Ring, rows: &[Vec<i64>]) -> Result<Self, ScalarError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ScalarError::Invalid("ragged rows".into()));
        }
        Matrix::new(ring, r, c, rows.concat())
    }

    /// The matrix whose columns are `cols`, each of height `height`.
    pub fn from_columns(ring: Ring, height: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = Matrix::zero(ring, height, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), height, "column height mismatch");
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn zero(ring: Ring, rows: usize, cols: usize) -> Self {
        Matrix {
            ring,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = Matrix::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Iₙ + s·e_ij.
    pub fn elementary(ring: Ring, n: usize, i: usize, j: usize, s: i64) -> Self {
        let mut m = Matrix::identity(ring, n);
        let v = m.get(i, j) + s;
        m.set(i, j, v);
        m
    }

    pub fn ring(&self) -> Ring {
        self.ring
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

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = self.reduce_one(v);
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn line(&self, axis: Axis, r: usize) -> Vec<i64> {
        match axis {
            Axis::Row => self.row(r),
            Axis::Column => self.column(r),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ring, other.ring, "mixed matrix rings");
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Matrix::zero(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc += i128::from(self.get(i, k)) * i128::from(other.get(k, j));
                }
                out.data[i * other.cols + j] = out.reduce_wide(acc);
            }
        }
        out
    }

    /// Submatrix on the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut out = Matrix::zero(self.ring, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.data[a * cols.len() + b] = self.get(i, j);
            }
        }
        out
    }

    pub fn without_column(&self, j: usize) -> Matrix {
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != j).collect();
        self.submatrix(&(0..self.rows).collect::<Vec<_>>(), &cols)
    }

    pub fn without_row(&self, i: usize) -> Matrix {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != i).collect();
        self.submatrix(&rows, &(0..self.cols).collect::<Vec<_>>())
    }

    /// Appends a column on the right.
    pub fn with_column(&self, col: &[i64]) -> Matrix {
        assert_eq!(col.len(), self.rows, "column height mismatch");
        let mut cols = self.columns();
        cols.push(col.to_vec());
        Matrix::from_columns(self.ring, self.rows, &cols)
    }

    /// Appends a row at the bottom.
    pub fn with_row(&self, row: &[i64]) -> Matrix {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(row);
        Matrix::new(self.ring, self.rows + 1, self.cols, data).expect("valid shape")
    }

    /// Replaces line `r` along `axis`.
    pub fn with_line(&self, axis: Axis, r: usize, line: &[i64]) -> Matrix {
        let mut m = self.clone();
        for (k, &v) in line.iter().enumerate() {
            match axis {
                Axis::Row => m.set(r, k, v),
                Axis::Column => m.set(k, r, v),
            }
        }
        m
    }

    /// Block diagonal `self ⊕ other`.
    pub fn diag_sum(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ring, other.ring, "mixed matrix rings");
        let mut out = Matrix::zero(self.ring, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }

    /// Exact determinant (fraction-free Bareiss over ℤ, reduced mod m for ℤ/m).
    pub fn det(&self) -> i128 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = (0..n)
            .map(|i| self.row(i).into_iter().map(i128::from).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                    return 0;
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        let d = sign * a[n - 1][n - 1];
        match self.ring {
            Ring::Zmod(m) => d.rem_euclid(i128::from(m)),
            _ => d,
        }
    }

    /// Rank of the matrix viewed over ℚ (entries as integers).
    pub fn rational_rank(&self) -> usize {
        crate::scalars::rank(&self.to_rational_rows())
    }

    pub fn to_rational_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows)
            .map(|i| self.row(i).into_iter().map(crate::scalars::q).collect())
            .collect()
    }

    fn reduce(&mut self) {
        if let Ring::Zmod(m) = self.ring {
            let m = m as i64;
            for x in &mut self.data {
                *x = x.rem_euclid(m);
            }
        }
    }

    fn reduce_one(&self, v: i64) -> i64 {
        match self.ring {
            Ring::Zmod(m) => v.rem_euclid(m as i64),
            _ => v,
        }
    }

    fn reduce_wide(&self, v: i128) -> i64 {
        match self.ring {
            Ring::Zmod(m) => v.rem_euclid(i128::from(m)) as i64,
            _ => i64::try_from(v).expect("integer matrix entry overflow"),
        }
    }
}

impl fmt::Display for Matrix {
    /// `[[a,b],[c,d]]`; the empty shapes print as `[]` with their size.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == 0 || self.cols == 0 {
            return write!(f, "[]({}x{})", self.rows, self.cols);
        }
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// All `rows × cols` matrices whose entries range over `values`, enumerated
/// column-major with entries in the order given.
pub fn all_matrices(ring: Ring, rows: usize, cols: usize, values: &[i64]) -> impl Iterator<Item = Matrix> + '_ {
    let len = rows * cols;
    let total = values.len().checked_pow(len as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut idx| {
        let mut m = Matrix::zero(ring, rows, cols);
        // last column-major slot varies fastest
        for slot in (0..len).rev() {
            let v = values[idx % values.len()];
            idx /= values.len();
            let (i, j) = (slot % rows.max(1), slot / rows.max(1));
            m.set(i, j, v);
        }
        m
    })
}

/// Number of matrices [`all_matrices`] yields, if it fits.
pub fn count_matrices(rows: usize, cols: usize, values: usize) -> Option<usize> {
    values.checked_pow(u32::try_from(rows * cols).ok()?)
}

/// The canonical entry list for a ring: all residues for ℤ/m, `[-b, b]` for ℤ.
pub fn entry_values(ring: Ring, bound: i64) -> Vec<i64> {
    match ring {
        Ring::Zmod(m) => (0..m as i64).collect(),
        _ => (-bound..=bound).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_rows(Ring::Integers, rows).unwrap()
    }

    fn cofactor_det(m: &Matrix) -> i128 {
        let n = m.rows();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor = m.without_row(0).without_column(j);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * i128::from(m.get(0, j)) * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let vals = [-2, -1, 0, 1, 2];
        for m in all_matrices(Ring::Integers, 2, 2, &vals) {
            assert_eq!(m.det(), cofactor_det(&m));
        }
        let m = z(&[vec![2, -1, 3], vec![0, 4, 1], vec![5, 2, -2]]);
        assert_eq!(m.det(), cofactor_det(&m));
        let sing = z(&[vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6]]);
        assert_eq!(sing.det(), 0);
        let m = z(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]);
        assert_eq!(m.det(), -1);
    }

    #[test]
    fn modular_reduction() {
        let m = Matrix::from_rows(Ring::Zmod(4), &[vec![-1, 5], vec![2, 3]]).unwrap();
        assert_eq!(m.entries(), &[3, 1, 2, 3]);
        assert_eq!(m.det(), (9 - 2) % 4);
        assert_eq!(m.mul(&m).entries(), &[(9 + 2) % 4, (3 + 3) % 4, (6 + 6) % 4, (2 + 9) % 4]);
    }

    #[test]
    fn diag_sum_shapes() {
        let a = z(&[vec![1, 2], vec![3, 4]]);
        let b = z(&[vec![5]]);
        let s = a.diag_sum(&b);
        assert_eq!(s, z(&[vec![1, 2, 0], vec![3, 4, 0], vec![0, 0, 5]]));
        assert_eq!(s.det(), a.det() * b.det());
    }

    #[test]
    fn empty_product_is_zero() {
        let b = Matrix::zero(Ring::Integers, 1, 0);
        let c = Matrix::zero(Ring::Integers, 0, 1);
        assert_eq!(b.mul(&c), z(&[vec![0]]));
        assert_eq!(Matrix::zero(Ring::Integers, 0, 0).det(), 1);
    }

    #[test]
    fn enumeration_is_complete_and_column_major() {
        let all: Vec<_> = all_matrices(Ring::Zmod(2), 2, 2, &[0, 1]).collect();
        assert_eq!(all.len(), 16);
        let distinct: alloc::collections::BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 16);
        // the last column-major slot (bottom-right) moves first
        assert_eq!(all[1], Matrix::from_rows(Ring::Zmod(2), &[vec![0, 0], vec![0, 1]]).unwrap());
        assert_eq!(all[2], Matrix::from_rows(Ring::Zmod(2), &[vec![0, 1], vec![0, 0]]).unwrap());
        assert_eq!(count_matrices(2, 2, 5), Some(625));
    }

    #[test]
    fn elementary_and_lines() {
        let e = Matrix::elementary(Ring::Integers, 2, 0, 1, -1);
        assert_eq!(e, z(&[vec![1, -1], vec![0, 1]]));
        let m = z(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(m.line(Axis::Column, 1), vec![2, 4]);
        assert_eq!(m.with_line(Axis::Row, 0, &[7, 8]), z(&[vec![7, 8], vec![3, 4]]));
        assert_eq!(m.transpose(), z(&[vec![1, 3], vec![2, 4]]));
        assert_eq!(m.rational_rank(), 2);
    }
}
