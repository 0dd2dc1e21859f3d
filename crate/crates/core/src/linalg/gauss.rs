//! Gaussian elimination over a field.

use super::matrix::Matrix;
use crate::arith::Field;

/// Reduced row echelon form and pivot columns.
pub fn rref<F: Field>(f: &F, m: &Matrix<F::Elem>) -> (Matrix<F::Elem>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let Some(i) = (r..a.rows()).find(|&i| !f.is_zero(a.get(i, c))) else { continue };
        a.swap_rows(r, i);
        let inv = f.inv(a.get(r, c)).unwrap();
        a.scale_row(f, r, &inv);
        for k in 0..a.rows() {
            if k != r && !f.is_zero(a.get(k, c)) {
                let factor = f.neg(a.get(k, c));
                a.add_row_multiple(f, k, r, &factor);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<F: Field>(f: &F, m: &Matrix<F::Elem>) -> usize {
    rref(f, m).1.len()
}

/// Columns of `m` (by index, earliest first) forming a basis of its image.
pub fn pivot_columns<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Vec<usize> {
    rref(f, m).1
}

/// A basis of {x : m x = 0}, one vector per free column.
pub fn kernel<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let (r, pivots) = rref(f, m);
    let n = m.cols();
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![f.zero(); n];
            v[free] = f.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(row, free));
            }
            v
        })
        .collect()
}

/// Some solution of m x = b.
pub fn solve<F: Field>(f: &F, m: &Matrix<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let x = solve_matrix(f, m, &Matrix::column(b.to_vec()))?;
    Some(x.col(0))
}

/// Some X with m X = b.
pub fn solve_matrix<F: Field>(f: &F, m: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    assert_eq!(m.rows(), b.rows(), "solve shape mismatch");
    let n = m.cols();
    let (r, pivots) = rref(f, &m.hstack(b));
    if pivots.last().is_some_and(|&c| c >= n) {
        return None;
    }
    let mut x = Matrix::zeros(f, n, b.cols());
    for (row, &pc) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x.set(pc, j, r.get(row, n + j).clone());
        }
    }
    Some(x)
}

pub fn inverse<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let (r, pivots) = rref(f, &m.hstack(&Matrix::identity(f, n)));
    if n > 0 && (pivots.len() < n || pivots[n - 1] != n - 1) {
        return None;
    }
    Some(r.submatrix(0..n, n..2 * n))
}

pub fn det<F: Field>(f: &F, m: &Matrix<F::Elem>) -> F::Elem {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let mut a = m.clone();
    let n = a.rows();
    let mut d = f.one();
    for c in 0..n {
        let Some(i) = (c..n).find(|&i| !f.is_zero(a.get(i, c))) else { return f.zero() };
        if i != c {
            a.swap_rows(c, i);
            d = f.neg(&d);
        }
        let piv = a.get(c, c).clone();
        d = f.mul(&d, &piv);
        let inv = f.inv(&piv).unwrap();
        for k in c + 1..n {
            if !f.is_zero(a.get(k, c)) {
                let factor = f.neg(&f.mul(a.get(k, c), &inv));
                a.add_row_multiple(f, k, c, &factor);
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::RationalField;

    fn q(rows: &[&[i64]]) -> Matrix<num_rational::BigRational> {
        let f = RationalField;
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect(), rows[0].len()).unwrap()
    }

    #[test]
    fn kernel_and_rank() {
        let f = RationalField;
        let m = q(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&f, &m), 1);
        let k = kernel(&f, &m);
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(m.mul_vec(&f, &v).iter().all(|x| f.is_zero(x)));
        }
    }

    #[test]
    fn inverse_and_det() {
        let f = RationalField;
        let m = q(&[&[2, 1], &[1, 1]]);
        assert_eq!(det(&f, &m), f.one());
        let inv = inverse(&f, &m).unwrap();
        assert_eq!(m.mul(&f, &inv), Matrix::identity(&f, 2));
        assert!(inverse(&f, &q(&[&[1, 2], &[2, 4]])).is_none());
        assert_eq!(det(&f, &q(&[&[0, 1], &[1, 0]])), f.from_int(-1));
    }

    #[test]
    fn solve_consistency() {
        let f = RationalField;
        let m = q(&[&[1, 1], &[0, 0]]);
        assert!(solve(&f, &m, &[f.one(), f.one()]).is_none());
        let x = solve(&f, &m, &[f.from_int(3), f.zero()]).unwrap();
        assert_eq!(m.mul_vec(&f, &x), vec![f.from_int(3), f.zero()]);
    }
}
