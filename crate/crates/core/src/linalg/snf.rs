//! Smith normal form over an effective DVR, and module-theoretic solving.

use super::dvr::Dvr;
use super::matrix::Matrix;
use crate::arith::FfElem;

/// M = U · D · V with D = diag(p^e_1, …, p^e_r, 0, …), U and V unimodular.
/// The inverses are kept alongside: U⁻¹ · M · V⁻¹ = D.
#[derive(Clone, Debug, PartialEq)]
pub struct Snf<E> {
    pub u: Matrix<E>,
    pub u_inv: Matrix<E>,
    pub v: Matrix<E>,
    pub v_inv: Matrix<E>,
    pub exponents: Vec<u32>,
}

impl<E: Clone + PartialEq> Snf<E> {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn diagonal<D: Dvr<Elem = E>>(&self, d: &D) -> Matrix<E> {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = Matrix::zeros(d, m, n);
        for (i, &e) in self.exponents.iter().enumerate() {
            out.set(i, i, d.p_pow(e as i64));
        }
        out
    }
}

/// Minimal-valuation pivoting, row-major tie-break, early exit on a unit.
pub fn smith_normal_form<D: Dvr>(d: &D, m: &Matrix<D::Elem>) -> Snf<D::Elem> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut u_inv = Matrix::identity(d, rows);
    let mut u = Matrix::identity(d, rows);
    let mut v_inv = Matrix::identity(d, cols);
    let mut v = Matrix::identity(d, cols);
    let mut exponents = Vec::new();

    for k in 0..rows.min(cols) {
        let mut best: Option<(i64, usize, usize)> = None;
        'search: for i in k..rows {
            for j in k..cols {
                if let Some(val) = d.valuation(a.get(i, j)) {
                    if best.is_none_or(|(b, _, _)| val < b) {
                        best = Some((val, i, j));
                        if val <= 0 {
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else { break };
        debug_assert!(val >= 0, "SNF input must be integral");

        a.swap_rows(k, pi);
        u_inv.swap_rows(k, pi);
        u.swap_cols(k, pi);
        a.swap_cols(k, pj);
        v_inv.swap_cols(k, pj);
        v.swap_rows(k, pj);

        let (_, unit) = d.unit_part(a.get(k, k)).unwrap();
        let unit_inv = d.inv(&unit).unwrap();
        a.scale_row(d, k, &unit_inv);
        u_inv.scale_row(d, k, &unit_inv);
        u.scale_col(d, k, &unit);

        let pivot_inv = d.inv(a.get(k, k)).unwrap();
        for i in k + 1..rows {
            if d.is_zero(a.get(i, k)) {
                continue;
            }
            let c = d.mul(a.get(i, k), &pivot_inv);
            let neg_c = d.neg(&c);
            a.add_row_multiple(d, i, k, &neg_c);
            u_inv.add_row_multiple(d, i, k, &neg_c);
            u.add_col_multiple(d, k, i, &c);
        }
        for j in k + 1..cols {
            if d.is_zero(a.get(k, j)) {
                continue;
            }
            let c = d.mul(a.get(k, j), &pivot_inv);
            let neg_c = d.neg(&c);
            a.add_col_multiple(d, j, k, &neg_c);
            v_inv.add_col_multiple(d, j, k, &neg_c);
            v.add_row_multiple(d, k, j, &c);
        }
        exponents.push(val as u32);
    }
    Snf { u, u_inv, v, v_inv, exponents }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solvability {
    Integral,
    FractionalOnly,
    Unsolvable,
}

/// Result of solving M x = b over the ring.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleSolution<E> {
    pub kind: Solvability,
    /// A solution (integral when one exists); `None` when unsolvable.
    pub witness: Option<Vec<E>>,
    /// Integral basis of ker M.
    pub kernel: Vec<Vec<E>>,
}

pub fn solve_in_module<D: Dvr>(d: &D, m: &Matrix<D::Elem>, b: &[D::Elem]) -> ModuleSolution<D::Elem> {
    let snf = smith_normal_form(d, m);
    solve_with_snf(d, &snf, b)
}

pub fn solve_with_snf<D: Dvr>(d: &D, snf: &Snf<D::Elem>, b: &[D::Elem]) -> ModuleSolution<D::Elem> {
    let r = snf.rank();
    let cols = snf.v.rows();
    let kernel: Vec<_> = (r..cols).map(|j| snf.v_inv.col(j)).collect();
    let c = snf.u_inv.mul_vec(d, b);
    if c[r..].iter().any(|x| !d.is_zero(x)) {
        return ModuleSolution { kind: Solvability::Unsolvable, witness: None, kernel };
    }
    let mut y = vec![d.zero(); cols];
    let mut integral = true;
    for (i, &e) in snf.exponents.iter().enumerate() {
        y[i] = d.mul(&c[i], &d.p_pow(-(e as i64)));
        integral &= d.is_integral(&y[i]);
    }
    let x = snf.v_inv.mul_vec(d, &y);
    let kind = if integral { Solvability::Integral } else { Solvability::FractionalOnly };
    ModuleSolution { kind, witness: Some(x), kernel }
}

/// Solve M X = B column by column; `None` unless every column is integrally solvable.
pub fn solve_integral_matrix<D: Dvr>(d: &D, m: &Matrix<D::Elem>, b: &Matrix<D::Elem>) -> Option<Matrix<D::Elem>> {
    let snf = smith_normal_form(d, m);
    let mut cols = Vec::with_capacity(b.cols());
    for j in 0..b.cols() {
        let s = solve_with_snf(d, &snf, &b.col(j));
        if s.kind != Solvability::Integral {
            return None;
        }
        cols.push(s.witness.unwrap());
    }
    Some(Matrix::from_cols(&cols, m.cols()))
}

pub fn residue_matrix<D: Dvr>(d: &D, m: &Matrix<D::Elem>) -> Matrix<FfElem> {
    m.map(|x| d.residue(x))
}

pub fn is_integral_matrix<D: Dvr>(d: &D, m: &Matrix<D::Elem>) -> bool {
    m.entries().iter().all(|x| d.is_integral(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Field, ScalarContext};
    use crate::linalg::gauss::det;
    use num_rational::BigRational;

    fn mat(ctx: &ScalarContext, rows: &[&[i64]]) -> Matrix<BigRational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| ctx.from_int(x)).collect()).collect(), rows[0].len()).unwrap()
    }

    fn check(ctx: &ScalarContext, m: &Matrix<BigRational>) -> Snf<BigRational> {
        let s = smith_normal_form(ctx, m);
        assert_eq!(s.u.mul(ctx, &s.diagonal(ctx)).mul(ctx, &s.v), *m);
        assert_eq!(s.u.mul(ctx, &s.u_inv), Matrix::identity(ctx, m.rows()));
        assert_eq!(s.v.mul(ctx, &s.v_inv), Matrix::identity(ctx, m.cols()));
        assert!(ctx.is_unit(&det(ctx, &s.u)) && ctx.is_unit(&det(ctx, &s.v)));
        assert!(s.exponents.windows(2).all(|w| w[0] <= w[1]));
        s
    }

    #[test]
    fn examples() {
        let c3 = ScalarContext::new(3).unwrap();
        assert_eq!(check(&c3, &mat(&c3, &[&[3, 1], &[0, 3]])).exponents, vec![0, 2]);
        assert_eq!(check(&c3, &mat(&c3, &[&[0, 0], &[0, 0]])).exponents, Vec::<u32>::new());
        assert_eq!(check(&c3, &mat(&c3, &[&[3]])).exponents, vec![1]);
        let c2 = ScalarContext::new(2).unwrap();
        assert_eq!(check(&c2, &mat(&c2, &[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])).exponents, vec![1, 1, 2]);
    }

    #[test]
    fn solving() {
        let c7 = ScalarContext::new(7).unwrap();
        let m = mat(&c7, &[&[7]]);
        let s = solve_in_module(&c7, &m, &[c7.from_int(7)]);
        assert_eq!((s.kind, s.witness), (Solvability::Integral, Some(vec![c7.one()])));
        let s = solve_in_module(&c7, &m, &[c7.one()]);
        assert_eq!(s.kind, Solvability::FractionalOnly);
        assert_eq!(s.witness, Some(vec![BigRational::new(1.into(), 7.into())]));
        let s = solve_in_module(&c7, &m, &[c7.zero()]);
        assert_eq!((s.kind, s.witness, s.kernel.len()), (Solvability::Integral, Some(vec![c7.zero()]), 0));
        let s = solve_in_module(&c7, &mat(&c7, &[&[1], &[0]]), &[c7.zero(), c7.one()]);
        assert_eq!(s.kind, Solvability::Unsolvable);
    }
}
