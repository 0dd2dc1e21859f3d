//! Characteristic polynomials and cyclotomic spectra.

use num_rational::BigRational;

use super::dvr::Dvr;
use super::gauss::det;
use super::matrix::Matrix;
use crate::arith::cyclo::cyclotomic_poly_q;
use crate::arith::{nt, CyclotomicField, FfElem, Field, FiniteField, Poly, RationalField, ScalarContext, TeichmullerDictionary};
use crate::error::{Error, Result};

/// det(x·I − M) by Berkowitz's division-free recursion over leading
/// principal submatrices.
pub fn characteristic_polynomial<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Poly<F::Elem> {
    assert!(m.is_square(), "characteristic polynomial of a non-square matrix");
    let n = m.rows();
    // ascending coefficients of the current monic polynomial
    let mut p = vec![f.one()];
    for k in 1..=n {
        let b = m.submatrix(0..k - 1, 0..k - 1);
        let c: Vec<_> = (0..k - 1).map(|i| m.get(i, k - 1).clone()).collect();
        let r: Vec<_> = (0..k - 1).map(|j| m.get(k - 1, j).clone()).collect();
        let a = m.get(k - 1, k - 1);
        // w_t = r · B^t · c
        let mut w = Vec::with_capacity(k);
        let mut bc = c;
        for _ in 0..k.saturating_sub(1) {
            w.push(r.iter().zip(&bc).fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y))));
            bc = b.mul_vec(f, &bc);
        }
        // (x − a)·p
        let mut next = vec![f.zero(); k + 1];
        for (i, pi) in p.iter().enumerate() {
            next[i + 1] = f.add(&next[i + 1], pi);
            next[i] = f.sub(&next[i], &f.mul(a, pi));
        }
        // − r · adj(xI − B) · c, adj(xI − B) = Σ_j x^j Σ_{i>j} p_i B^{i−j−1}
        let m_deg = k - 1;
        for j in 0..m_deg {
            let mut s = f.zero();
            for i in j + 1..=m_deg {
                s = f.add(&s, &f.mul(&p[i], &w[i - j - 1]));
            }
            next[j] = f.sub(&next[j], &s);
        }
        p = next;
    }
    Poly::new(f, p)
}

/// Exponents j (with multiplicity) such that f = ∏ (x − root(j)), trying
/// j = 0, …, level − 1 in turn.
pub fn root_of_unity_spectrum_with<F: Field>(
    f: &F,
    poly: &Poly<F::Elem>,
    level: u64,
    root: impl Fn(u64) -> F::Elem,
) -> Result<Vec<u64>> {
    let deg = poly.degree().expect("spectrum of the zero polynomial");
    let mut rest = poly.clone();
    let mut out = Vec::with_capacity(deg);
    for j in 0..level {
        if rest.degree() == Some(0) {
            break;
        }
        let z = root(j);
        loop {
            let (q, r) = rest.div_rem(f, &Poly::linear_root(f, &z));
            if !r.is_zero() {
                break;
            }
            out.push(j);
            rest = q;
            if rest.degree() == Some(0) {
                break;
            }
        }
    }
    if out.len() != deg {
        return Err(Error::NonUnityRoots(level));
    }
    Ok(out)
}

/// Spectrum of a polynomial over the dictionary's residue field in powers of ω.
pub fn residue_spectrum(dict: &TeichmullerDictionary, poly: &Poly<FfElem>) -> Result<Vec<u64>> {
    root_of_unity_spectrum_with(dict.field(), poly, dict.level(), |j| dict.omega_pow(j).clone())
}

/// Spectrum of a rational polynomial in powers of ζ_N.
pub fn rational_spectrum(poly: &Poly<BigRational>, level: u64) -> Result<Vec<u64>> {
    let k = CyclotomicField::new(level);
    let lifted = poly.map(&k, |c| k.from_rational(c.clone()));
    root_of_unity_spectrum_with(&k, &lifted, level, |j| k.zeta_pow(j))
}

/// Least n ≤ `max` such that every root of f (over a finite field) is an
/// n-th root of unity, i.e. f divides (x^n − 1)^{deg f}. That n is the lcm
/// of the root orders and is automatically prime to p.
pub fn unity_level(k: &FiniteField, poly: &Poly<FfElem>, max: u64) -> Option<u64> {
    let deg = poly.degree()?;
    if deg == 0 {
        return Some(1);
    }
    if k.is_zero(&poly.coeff(k, 0)) {
        return None;
    }
    let x = Poly::new(k, vec![k.zero(), k.one()]);
    let one = Poly::constant(k, k.one());
    let mut xn = one.clone();
    for n in 1..=max {
        xn = xn.mul(k, &x).rem(k, poly);
        if n % k.p() == 0 {
            continue;
        }
        let h = xn.sub(k, &one);
        let mut acc = one.clone();
        for _ in 0..deg {
            acc = acc.mul(k, &h).rem(k, poly);
        }
        if acc.is_zero() {
            return Some(n);
        }
    }
    None
}

/// Levels d (with multiplicity, ascending) with f = ∏ Φ_d, or `None` when f
/// has a factor that is not cyclotomic. Candidates satisfy φ(d) ≤ deg f.
pub fn cyclotomic_levels(poly: &Poly<BigRational>) -> Option<Vec<u64>> {
    let q = RationalField;
    let deg = poly.degree()?;
    let mut rest = poly.monic(&q);
    let mut out = Vec::new();
    // φ(d) ≥ √(d/2), so φ(d) ≤ deg forces d ≤ 2·deg²
    let bound = 2 * (deg as u64).pow(2) + 2;
    for d in 1..=bound {
        if rest.degree() == Some(0) {
            break;
        }
        if nt::euler_phi(d) as usize > rest.degree().unwrap() {
            continue;
        }
        let phi = cyclotomic_poly_q(d);
        loop {
            let (quot, r) = rest.div_rem(&q, &phi);
            if !r.is_zero() {
                break;
            }
            out.push(d);
            rest = quot;
        }
    }
    (rest.degree() == Some(0)).then_some(out)
}

/// Whether the characteristic polynomial is a product of Φ_d with p ∤ d.
pub fn is_prime_to_p_automorphism(m: &Matrix<BigRational>, ctx: &ScalarContext) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::Shape("automorphism test needs a square matrix".into()));
    }
    if !ctx.is_unit(&det(ctx, m)) {
        return Err(Error::NotInvertible);
    }
    let cp = characteristic_polynomial(&RationalField, m);
    Ok(cyclotomic_levels(&cp).is_some_and(|ds| ds.iter().all(|d| d % ctx.p() != 0)))
}

/// Companion matrix of a monic polynomial (last column carries −coefficients).
pub fn companion<F: Field>(f: &F, poly: &Poly<F::Elem>) -> Matrix<F::Elem> {
    let n = poly.degree().expect("companion of the zero polynomial");
    Matrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            f.neg(&poly.coeff(f, i))
        } else if i == j + 1 {
            f.one()
        } else {
            f.zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{cyclotomic_polynomial, FiniteField};

    fn q(rows: &[&[i64]]) -> Matrix<BigRational> {
        let f = RationalField;
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect(), rows[0].len()).unwrap()
    }

    fn qp(c: &[i64]) -> Poly<BigRational> {
        Poly::new(&RationalField, c.iter().map(|&x| RationalField.from_int(x)).collect())
    }

    #[test]
    fn charpoly_examples() {
        let f = RationalField;
        assert_eq!(characteristic_polynomial(&f, &q(&[&[0, -1], &[1, -1]])), qp(&[1, 1, 1]));
        assert_eq!(characteristic_polynomial(&f, &q(&[&[1, 0], &[0, 1]])), qp(&[1, -2, 1]));
        assert_eq!(characteristic_polynomial(&f, &q(&[&[2, 0], &[0, 4]])), qp(&[8, -6, 1]));
        assert_eq!(characteristic_polynomial(&f, &Matrix::zeros(&f, 0, 0)), qp(&[1]));
    }

    #[test]
    fn spectra() {
        let c7 = ScalarContext::new(7).unwrap();
        let d = TeichmullerDictionary::build(&c7, 3).unwrap();
        let ff = d.field();
        let poly = Poly::new(ff, vec![ff.one(), ff.one(), ff.one()]);
        assert_eq!(residue_spectrum(&d, &poly).unwrap(), vec![1, 2]);
        assert_eq!(rational_spectrum(&qp(&[1, -2, 1]), 1).unwrap(), vec![0, 0]);
        assert_eq!(rational_spectrum(&qp(&[1, 0, 1]), 4).unwrap(), vec![1, 3]);
        assert_eq!(rational_spectrum(&qp(&[-2, 1]), 4), Err(Error::NonUnityRoots(4)));
        let f7 = FiniteField::prime(7);
        // roots 2 (order 3) and 6 (order 2)
        let g = Poly::new(&f7, vec![FfElem(vec![5]), FfElem(vec![6]), FfElem(vec![1])]);
        assert_eq!(unity_level(&f7, &g, 100), Some(6));
        let sq = Poly::new(&f7, vec![FfElem(vec![1]), FfElem(vec![5]), FfElem(vec![1])]);
        assert_eq!(unity_level(&f7, &sq, 100), Some(1));
        assert_eq!(unity_level(&f7, &Poly::new(&f7, vec![FfElem(vec![0]), FfElem(vec![1])]), 100), None);
    }

    #[test]
    fn prime_to_p_examples() {
        let c2 = ScalarContext::new(2).unwrap();
        let c3 = ScalarContext::new(3).unwrap();
        let w = q(&[&[0, -1], &[1, -1]]);
        assert!(is_prime_to_p_automorphism(&w, &c2).unwrap());
        assert!(!is_prime_to_p_automorphism(&w, &c3).unwrap());
        assert!(is_prime_to_p_automorphism(&q(&[&[1, 0], &[0, 1]]), &c3).unwrap());
        // unipotent: every root is 1, so the criterion accepts it
        assert!(is_prime_to_p_automorphism(&q(&[&[1, 1], &[0, 1]]), &c3).unwrap());
        assert_eq!(is_prime_to_p_automorphism(&q(&[&[3]]), &c3), Err(Error::NotInvertible));
    }

    #[test]
    fn cyclotomic_levels_of_products() {
        let phi = |d| {
            let c: Vec<i64> = cyclotomic_polynomial(d).iter().map(|x| i64::try_from(x).unwrap()).collect();
            qp(&c)
        };
        let f = RationalField;
        let prod = phi(1).mul(&f, &phi(12)).mul(&f, &phi(12)).mul(&f, &phi(5));
        assert_eq!(cyclotomic_levels(&prod), Some(vec![1, 5, 12, 12]));
        assert_eq!(cyclotomic_levels(&qp(&[-2, 1])), None);
    }
}
