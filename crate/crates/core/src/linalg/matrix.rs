//! Dense row-major matrices whose arithmetic is supplied by a [`Field`] handle.

use crate::arith::Field;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone + PartialEq> Matrix<E> {
    pub fn new(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}×{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        if let Some(bad) = rows.iter().position(|row| row.len() != cols) {
            return Err(Error::Shape(format!("row {bad} has length {} (expected {cols})", rows[bad].len())));
        }
        Ok(Matrix { rows: r, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros<F: Field<Elem = E>>(f: &F, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![f.zero(); rows * cols] }
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { f.one() } else { f.zero() })
    }

    pub fn scalar<F: Field<Elem = E>>(f: &F, n: usize, c: &E) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c.clone() } else { f.zero() })
    }

    pub fn column(v: Vec<E>) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<T: Clone + PartialEq>(&self, g: impl Fn(&E) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(g).collect() }
    }

    pub fn try_map<T: Clone + PartialEq>(&self, g: impl Fn(&E) -> Result<T>) -> Result<Matrix<T>> {
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(g).collect::<Result<_>>()? })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn from_cols(cols: &[Vec<E>], rows: usize) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    /// [self | other]
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// [self ; other]
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// [[a, b], [c, d]]
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        a.hstack(b).vstack(&c.hstack(d))
    }

    pub fn block_diag<F: Field<Elem = E>>(f: &F, a: &Self, b: &Self) -> Self {
        Self::block2(a, &Self::zeros(f, a.rows, b.cols), &Self::zeros(f, b.rows, a.cols), b)
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        assert_eq!(self.shape(), o.shape(), "add shape mismatch");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| f.add(a, b)).collect() }
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        assert_eq!(self.shape(), o.shape(), "sub shape mismatch");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| f.sub(a, b)).collect() }
    }

    pub fn neg<F: Field<Elem = E>>(&self, f: &F) -> Self {
        self.map(|x| f.neg(x))
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        self.map(|x| f.mul(c, x))
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "mul shape mismatch: {:?}·{:?}", self.shape(), o.shape());
        let mut out = Self::zeros(f, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        out
    }

    pub fn mul_vec<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(f.zero(), |acc, (a, b)| {
                    if f.is_zero(a) || f.is_zero(b) {
                        acc
                    } else {
                        f.add(&acc, &f.mul(a, b))
                    }
                })
            })
            .collect()
    }

    pub fn pow<F: Field<Elem = E>>(&self, f: &F, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(f, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base);
            }
        }
        acc
    }

    pub fn trace<F: Field<Elem = E>>(&self, f: &F) -> E {
        (0..self.rows.min(self.cols)).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i)))
    }

    /// row_dst += c · row_src
    pub fn add_row_multiple<F: Field<Elem = E>>(&mut self, f: &F, dst: usize, src: usize, c: &E) {
        if f.is_zero(c) {
            return;
        }
        for j in 0..self.cols {
            let v = f.add(self.get(dst, j), &f.mul(c, self.get(src, j)));
            self.set(dst, j, v);
        }
    }

    /// col_dst += c · col_src
    pub fn add_col_multiple<F: Field<Elem = E>>(&mut self, f: &F, dst: usize, src: usize, c: &E) {
        if f.is_zero(c) {
            return;
        }
        for i in 0..self.rows {
            let v = f.add(self.get(i, dst), &f.mul(c, self.get(i, src)));
            self.set(i, dst, v);
        }
    }

    pub fn scale_row<F: Field<Elem = E>>(&mut self, f: &F, i: usize, c: &E) {
        for j in 0..self.cols {
            let v = f.mul(c, self.get(i, j));
            self.set(i, j, v);
        }
    }

    pub fn scale_col<F: Field<Elem = E>>(&mut self, f: &F, j: usize, c: &E) {
        for i in 0..self.rows {
            let v = f.mul(c, self.get(i, j));
            self.set(i, j, v);
        }
    }
}
