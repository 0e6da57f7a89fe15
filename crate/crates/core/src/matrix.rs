use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::scalar::{PadicContext, Scalar, Valuation};

/// Dense row-major matrix of exact rationals. Columns are the vectors of
/// interest: a lattice basis is stored column by column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn diagonal(entries: Vec<Scalar>) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds an `n × columns.len()` matrix from column vectors of length `n`.
    pub fn from_columns(n: usize, columns: &[Vec<Scalar>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension(format!("expected vectors of length {n}")));
        }
        let mut m = Matrix::zeros(n, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    /// Convenience constructor from small integer rows.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
        .expect("ragged integer rows")
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

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, range: std::ops::Range<usize>) -> Matrix {
        let mut m = Matrix::zeros(range.len(), self.cols);
        for (k, i) in range.enumerate() {
            for j in 0..self.cols {
                m[(k, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "cannot stack {} rows beside {} rows",
                self.rows, other.rows
            )));
        }
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        Ok(m)
    }

    /// Block-diagonal `diag(self, other)`.
    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    pub fn set_block(&mut self, row: usize, col: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        m[(i, j)] = &m[(i, j)] + &(a * b);
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Smallest valuation among the entries (`Infinite` for the zero matrix).
    pub fn min_valuation(&self, ctx: &PadicContext) -> Valuation {
        self.data
            .iter()
            .map(|x| ctx.valuation(x))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// All entries lie in the valuation ring.
    pub fn is_integral(&self, ctx: &PadicContext) -> bool {
        self.data.iter().all(|x| ctx.is_integral(x))
    }

    /// Exact rank by Gaussian elimination over the rationals.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(piv) = (rank..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, piv);
            let inv = m[(rank, col)].inv().expect("nonzero pivot");
            for i in rank + 1..m.rows {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let f = &m[(i, col)] * &inv;
                m.add_row_multiple(i, rank, &-f);
            }
            rank += 1;
        }
        rank
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let mut det = Scalar::one();
        for col in 0..m.cols {
            let Some(piv) = (col..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                return Ok(Scalar::zero());
            };
            if piv != col {
                m.swap_rows(col, piv);
                det = -det;
            }
            det = &det * &m[(col, col)];
            let inv = m[(col, col)].inv()?;
            for i in col + 1..m.rows {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let f = &m[(i, col)] * &inv;
                m.add_row_multiple(i, col, &-f);
            }
        }
        Ok(det)
    }

    /// Exact inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let Some(piv) = (col..n).find(|&i| !m[(i, col)].is_zero()) else {
                return Err(Error::Rank {
                    expected: n,
                    found: self.rank(),
                });
            };
            m.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let pinv = m[(col, col)].inv()?;
            m.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            for i in 0..n {
                if i == col || m[(i, col)].is_zero() {
                    continue;
                }
                let f = -m[(i, col)].clone();
                m.add_row_multiple(i, col, &f);
                inv.add_row_multiple(i, col, &f);
            }
        }
        Ok(inv)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub(crate) fn scale_row(&mut self, i: usize, c: &Scalar) {
        for j in 0..self.cols {
            self[(i, j)] = &self[(i, j)] * c;
        }
    }

    pub(crate) fn scale_col(&mut self, j: usize, c: &Scalar) {
        for i in 0..self.rows {
            self[(i, j)] = &self[(i, j)] * c;
        }
    }

    /// `row[target] += c · row[source]`
    pub(crate) fn add_row_multiple(&mut self, target: usize, source: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self[(source, j)];
            if !s.is_zero() {
                self[(target, j)] = &self[(target, j)] + &(s * c);
            }
        }
    }

    /// `col[target] += c · col[source]`
    pub(crate) fn add_col_multiple(&mut self, target: usize, source: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self[(i, source)];
            if !s.is_zero() {
                self[(i, target)] = &self[(i, target)] + &(s * c);
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    /// Panics on a shape mismatch; use [`Matrix::try_mul`] for a checked product.
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix shape mismatch")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
