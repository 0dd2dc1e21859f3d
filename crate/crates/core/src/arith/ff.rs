//! Prime fields and their finite extensions F_p[x]/(f).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::field::Field;
use super::nt;
use super::poly::Poly;
use crate::error::{Error, Result};

/// F_p with elements as canonical residues in [0, p).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        PrimeField { p }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.p as u128 - *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a % self.p) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            nt::mod_inverse(*a, self.p)
        }
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Ben-Or test: a monic polynomial of degree s over F_p is irreducible iff it
/// shares no factor with x^{p^i} − x for 1 ≤ i ≤ s/2.
pub fn is_irreducible(fp: &PrimeField, f: &Poly<u64>) -> bool {
    let Some(s) = f.degree() else { return false };
    if s == 0 {
        return false;
    }
    let x = Poly::new(fp, vec![0, 1]);
    let mut h = x.clone();
    for _ in 1..=s / 2 {
        h = h.pow_mod(fp, fp.p(), f);
        let g = h.sub(fp, &x).gcd(fp, f);
        if g.degree() != Some(0) {
            return false;
        }
    }
    true
}

/// An element of a finite field: coefficients of a polynomial of degree < s
/// in the class of x.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FfElem(pub Vec<u64>);

impl fmt::Debug for FfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// F_p[x]/(modulus) with a monic irreducible modulus of degree s.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteField {
    fp: PrimeField,
    modulus: Arc<Poly<u64>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; {:?})", self.fp.p(), self.degree(), self.modulus.coeffs())
    }
}

impl FiniteField {
    /// The prime field, presented as F_p[x]/(x).
    pub fn prime(p: u64) -> Self {
        let fp = PrimeField::new(p);
        FiniteField { fp, modulus: Arc::new(Poly::new(&fp, vec![0, 1])) }
    }

    /// Extension by a monic modulus; irreducibility is witnessed here.
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !nt::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let fp = PrimeField::new(p);
        let m = Poly::new(&fp, modulus.into_iter().map(|c| c % p).collect());
        if m.leading() != Some(&1) {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        if !is_irreducible(&fp, &m) {
            return Err(Error::InvalidModulus("modulus is reducible".into()));
        }
        Ok(FiniteField { fp, modulus: Arc::new(m) })
    }

    pub(crate) fn new_unchecked(fp: PrimeField, modulus: Poly<u64>) -> Self {
        FiniteField { fp, modulus: Arc::new(modulus) }
    }

    pub fn p(&self) -> u64 {
        self.fp.p()
    }

    pub fn prime_field(&self) -> PrimeField {
        self.fp
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    pub fn modulus(&self) -> &Poly<u64> {
        &self.modulus
    }

    /// Field order p^s.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.p()).pow(self.degree() as u32)
    }

    pub fn constant(&self, c: u64) -> FfElem {
        let mut v = vec![0; self.degree()];
        v[0] = c % self.p();
        FfElem(v)
    }

    /// The class of x.
    pub fn generator(&self) -> FfElem {
        if self.degree() == 1 {
            // x ≡ −m₀ modulo a linear modulus
            let m0 = self.modulus.coeffs()[0];
            return FfElem(vec![self.fp.neg(&m0)]);
        }
        let mut v = vec![0; self.degree()];
        v[1] = 1;
        FfElem(v)
    }

    pub fn from_poly(&self, poly: &Poly<u64>) -> FfElem {
        let r = poly.rem(&self.fp, &self.modulus);
        let mut v = r.into_coeffs();
        v.resize(self.degree(), 0);
        FfElem(v)
    }

    pub fn to_poly(&self, a: &FfElem) -> Poly<u64> {
        Poly::new(&self.fp, a.0.clone())
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FfElem {
        self.from_poly(&Poly::new(&self.fp, coeffs.iter().map(|c| c % self.p()).collect()))
    }

    /// Prime-field value if `a` lies in F_p.
    pub fn as_prime(&self, a: &FfElem) -> Option<u64> {
        if a.0.iter().skip(1).all(|&c| c == 0) {
            Some(a.0[0])
        } else {
            None
        }
    }

    pub fn pow_big(&self, a: &FfElem, e: &BigUint) -> FfElem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    fn pow_u128(&self, a: &FfElem, mut e: u128) -> FfElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Least n ≥ 1 with a^n = 1, found by factoring p^s − 1 and descending.
    pub fn multiplicative_order(&self, a: &FfElem) -> Result<u64> {
        if self.is_zero(a) {
            return Err(Error::ZeroElement);
        }
        let q = self.order();
        if q.bits() > 62 {
            return Err(Error::FieldTooLarge);
        }
        let group: u128 = u128::try_from(q).unwrap() - 1;
        let mut n = group;
        for (r, _) in nt::factorize(group) {
            while n % r == 0 && self.is_one(&self.pow_u128(a, n / r)) {
                n /= r;
            }
        }
        Ok(n as u64)
    }

    /// Least n ≥ 1 dividing `exponent` with a^n = 1, when a^exponent = 1.
    pub fn order_dividing(&self, a: &FfElem, exponent: u64) -> Option<u64> {
        if !self.is_one(&self.pow(a, exponent)) {
            return None;
        }
        let mut n = exponent;
        for (r, _) in nt::factorize(exponent as u128) {
            let r = r as u64;
            while n % r == 0 && self.is_one(&self.pow(a, n / r)) {
                n /= r;
            }
        }
        Some(n)
    }
}

impl Field for FiniteField {
    type Elem = FfElem;

    fn zero(&self) -> FfElem {
        FfElem(vec![0; self.degree()])
    }
    fn one(&self) -> FfElem {
        self.constant(1)
    }
    fn from_int(&self, n: i64) -> FfElem {
        self.constant(self.fp.from_int(n))
    }
    fn add(&self, a: &FfElem, b: &FfElem) -> FfElem {
        FfElem(a.0.iter().zip(&b.0).map(|(x, y)| self.fp.add(x, y)).collect())
    }
    fn sub(&self, a: &FfElem, b: &FfElem) -> FfElem {
        FfElem(a.0.iter().zip(&b.0).map(|(x, y)| self.fp.sub(x, y)).collect())
    }
    fn neg(&self, a: &FfElem) -> FfElem {
        FfElem(a.0.iter().map(|x| self.fp.neg(x)).collect())
    }
    fn mul(&self, a: &FfElem, b: &FfElem) -> FfElem {
        if self.degree() == 1 {
            return FfElem(vec![self.fp.mul(&a.0[0], &b.0[0])]);
        }
        self.from_poly(&self.to_poly(a).mul(&self.fp, &self.to_poly(b)))
    }
    fn inv(&self, a: &FfElem) -> Option<FfElem> {
        if self.is_zero(a) {
            return None;
        }
        if self.degree() == 1 {
            return self.fp.inv(&a.0[0]).map(|x| FfElem(vec![x]));
        }
        let (g, s, _) = self.to_poly(a).ext_gcd(&self.fp, &self.modulus);
        debug_assert_eq!(g.degree(), Some(0));
        Some(self.from_poly(&s))
    }
    fn is_zero(&self, a: &FfElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }
}
