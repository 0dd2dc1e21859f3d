//! γ^m-stable flags of the top module with rank-one subquotients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{nt, sqrt_in_cyclotomic, CyclotomicNumber, Field, Poly, RationalField};
use crate::error::{Error, Result};
use crate::linalg::gauss::{det, inverse, kernel};
use crate::linalg::{characteristic_polynomial, Dvr, Matrix};

use super::extring::CyclotomicLocal;

const MAX_RATIONAL_CANDIDATES: usize = 20_000;

/// Basis ℓ_1, …, ℓ_s (columns) of the top module with F^e = span(ℓ_1, …, ℓ_e)
/// stable under γ^m, the diagonal eigenvalues λ_e and their Teichmüller
/// units ξ_e = ζ_N^{j_e}.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationData {
    pub basis: Matrix<CyclotomicNumber>,
    pub eigenvalues: Vec<CyclotomicNumber>,
    pub xi: Vec<CyclotomicNumber>,
    pub exponents: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionRequest {
    /// Degree of the offending factor over the current field.
    pub degree: usize,
    /// A cyclotomic level whose field contains a root, when one is known.
    pub level: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FiltrationOutcome {
    Ready(FiltrationData),
    NeedsExtension(ExtensionRequest),
}

enum Root {
    Found(Vec<CyclotomicNumber>),
    Missing(ExtensionRequest),
}

fn rational_coefficients(cp: &Poly<CyclotomicNumber>) -> Option<Vec<BigRational>> {
    cp.coeffs().iter().map(|c| c.as_rational()).collect()
}

fn divisors_big(n: &BigInt) -> Option<Vec<BigInt>> {
    let n: u128 = n.abs().try_into().ok()?;
    if n == 0 {
        return None;
    }
    let mut divs = vec![1u128];
    for (q, e) in nt::factorize(n) {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut x = *d;
            for _ in 0..=e {
                next.push(x);
                x *= q;
            }
        }
        divs = next;
        if divs.len() > MAX_RATIONAL_CANDIDATES {
            return None;
        }
    }
    divs.sort_unstable();
    Some(divs.into_iter().map(BigInt::from).collect())
}

/// Rational roots by the rational root theorem.
fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let q = RationalField;
    let poly = Poly::new(&q, coeffs.to_vec());
    let mut roots = Vec::new();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
    if low > 0 {
        roots.push(BigRational::zero());
    }
    let (Some(us), Some(vs)) = (divisors_big(&ints[low]), divisors_big(ints.last().unwrap())) else {
        return roots;
    };
    for u in &us {
        for v in &vs {
            if !u.gcd(v).is_one() {
                continue;
            }
            for s in [1, -1] {
                let r = BigRational::new(u * s, v.clone());
                if poly.eval(&q, &r).is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

fn find_roots(ring: &CyclotomicLocal, cp: &Poly<CyclotomicNumber>) -> Root {
    let k = ring.field();
    let level = ring.level();
    let deg = cp.degree().unwrap_or(0);
    if deg == 1 {
        let c = cp.coeffs();
        return Root::Found(vec![k.neg(&k.div(&c[0], &c[1]).unwrap())]);
    }
    let mut found: Vec<CyclotomicNumber> = (0..level)
        .map(|j| k.zeta_pow(j))
        .filter(|z| k.is_zero(&cp.eval(k, z)))
        .collect();
    let Some(rc) = rational_coefficients(cp) else {
        return if found.is_empty() {
            Root::Missing(ExtensionRequest { degree: deg, level: None })
        } else {
            Root::Found(found)
        };
    };
    for r in rational_roots(&rc) {
        let x = k.from_rational(r);
        if !found.contains(&x) {
            found.push(x);
        }
    }
    if !found.is_empty() {
        return Root::Found(found);
    }
    if deg == 2 {
        let (c, b, a) = (&rc[0], &rc[1], &rc[2]);
        let disc = b * b - BigRational::from_integer(4.into()) * a * c;
        return match sqrt_in_cyclotomic(&disc, ring.p()) {
            Some((m, s)) if level % m == 0 => {
                let s = s.embed(level).unwrap();
                let two_a = k.from_rational(a * BigRational::from_integer(2.into()));
                let mb = k.from_rational(-b.clone());
                let roots = [k.add(&mb, &s), k.sub(&mb, &s)].iter().map(|x| k.div(x, &two_a).unwrap()).collect();
                Root::Found(roots)
            }
            Some((m, _)) => Root::Missing(ExtensionRequest { degree: 2, level: Some(nt::lcm(level, m)) }),
            None => Root::Missing(ExtensionRequest { degree: 2, level: None }),
        };
    }
    // a product of cyclotomic polynomials splits in a larger cyclotomic field
    if let Some(ds) = crate::linalg::cyclotomic_levels(&Poly::new(&RationalField, rc)) {
        let target = ds.iter().fold(level, |acc, &d| nt::lcm(acc, d));
        if target % ring.p() != 0 && target != level {
            let degree = (nt::euler_phi(target) / nt::euler_phi(level)) as usize;
            return Root::Missing(ExtensionRequest { degree, level: Some(target) });
        }
    }
    Root::Missing(ExtensionRequest { degree: deg, level: None })
}

/// Eigenvector for λ scaled by its least-index entry of minimal valuation,
/// together with that index.
fn unimodular_eigenvector(ring: &CyclotomicLocal, m: &Matrix<CyclotomicNumber>, lambda: &CyclotomicNumber) -> Option<(usize, Vec<CyclotomicNumber>)> {
    let k = ring.field();
    let a = m.sub(k, &Matrix::scalar(k, m.rows(), lambda));
    let v = kernel(k, &a).into_iter().next()?;
    let (i0, _) = v
        .iter()
        .enumerate()
        .filter_map(|(i, x)| ring.valuation(x).map(|val| (i, val)))
        .min_by_key(|&(i, val)| (val, i))?;
    let s = k.inv(&v[i0]).unwrap();
    Some((i0, v.iter().map(|x| k.mul(x, &s)).collect()))
}

/// Triangularize γ^m over the ring one eigenvector at a time.
pub fn build_stable_filtration(ring: &CyclotomicLocal, top: &Matrix<CyclotomicNumber>) -> Result<FiltrationOutcome> {
    let k = ring.field().clone();
    let s = top.rows();
    if !top.is_square() {
        return Err(Error::Shape("γ^m must be square".into()));
    }
    let kr = ring.residue_field();
    if s > 0 && det(kr, &top.map(|x| ring.residue(x))) == kr.zero() {
        return Err(Error::NotBijective);
    }
    let mut basis = Matrix::identity(&k, s);
    let mut cur = top.clone();
    let mut eigenvalues = Vec::with_capacity(s);
    for e in 0..s {
        let cp = characteristic_polynomial(&k, &cur);
        let roots = match find_roots(ring, &cp) {
            Root::Found(r) => r,
            Root::Missing(req) => return Ok(FiltrationOutcome::NeedsExtension(req)),
        };
        let (lambda, (i0, v)) = roots
            .into_iter()
            .filter_map(|r| unimodular_eigenvector(ring, &cur, &r).map(|ev| (r, ev)))
            .min_by_key(|(_, (i0, _))| *i0)
            .ok_or_else(|| Error::InternalInconsistency("root without eigenvector".into()))?;
        let n = cur.rows();
        let mut cols = vec![v];
        cols.extend((0..n).filter(|&j| j != i0).map(|j| (0..n).map(|i| if i == j { k.one() } else { k.zero() }).collect()));
        let p = Matrix::from_cols(&cols, n);
        let p_inv = inverse(&k, &p).ok_or(Error::NotInvertible)?;
        let conj = p_inv.mul(&k, &cur).mul(&k, &p);
        let lift = Matrix::block_diag(&k, &Matrix::identity(&k, e), &p);
        basis = basis.mul(&k, &lift);
        eigenvalues.push(lambda);
        cur = conj.submatrix(1..n, 1..n);
    }
    let dict = ring.dictionary();
    let mut xi = Vec::with_capacity(s);
    let mut exponents = Vec::with_capacity(s);
    for lambda in &eigenvalues {
        let r = ring.residue(lambda);
        match dict.discrete_log(&r) {
            Ok(j) => {
                exponents.push(j);
                xi.push(k.zeta_pow(j));
            }
            Err(_) => {
                let ord = ring.residue_field().multiplicative_order(&r)?;
                let level = nt::lcm(ring.level(), ord);
                let degree = (nt::euler_phi(level) / nt::euler_phi(ring.level())) as usize;
                return Ok(FiltrationOutcome::NeedsExtension(ExtensionRequest { degree, level: Some(level) }));
            }
        }
    }
    Ok(FiltrationOutcome::Ready(FiltrationData { basis, eigenvalues, xi, exponents }))
}

impl FiltrationData {
    /// B^{-1} γ^m B is upper triangular with diagonal λ, B is unimodular and
    /// every ξ_e reduces to the residue of λ_e.
    pub fn check(&self, ring: &CyclotomicLocal, top: &Matrix<CyclotomicNumber>) -> bool {
        let k = ring.field();
        let s = top.rows();
        let Some(b_inv) = inverse(k, &self.basis) else {
            return false;
        };
        let integral = |m: &Matrix<CyclotomicNumber>| m.entries().iter().all(|x| ring.is_integral(x));
        if !integral(&self.basis) || !integral(&b_inv) {
            return false;
        }
        let t = b_inv.mul(k, top).mul(k, &self.basis);
        (0..s).all(|i| (0..i).all(|j| k.is_zero(t.get(i, j))))
            && (0..s).all(|i| t.get(i, i) == &self.eigenvalues[i])
            && self.xi.iter().zip(&self.eigenvalues).all(|(x, l)| ring.residue(x) == ring.residue(l))
    }
}
