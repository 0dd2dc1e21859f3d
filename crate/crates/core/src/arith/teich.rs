//! The Teichmüller dictionary: a fixed identification of the N-th roots of
//! unity of a finite field with the N-th roots of unity of Q(ζ_N).
//!
//! The residue field is F_p[x]/(f) where f is an irreducible factor of Φ_N
//! modulo p. The factor selects a prime P = (p, f(ζ_N)) of Z[ζ_N], and
//! ζ_N ↦ x is exactly reduction modulo P. With p ∤ N every irreducible factor
//! has degree s = ord_N(p); the lexicographically least one (constant term
//! first) is chosen.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;

use super::cyclo::{cyclotomic_polynomial, CyclotomicField, CyclotomicNumber};
use super::ff::{is_irreducible, FfElem, FiniteField, PrimeField};
use super::field::Field;
use super::local::ScalarContext;
use super::nt;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Discrete logarithms are found by enumeration below this level.
pub const MAX_DICTIONARY_LEVEL: u64 = 10_000;

#[derive(Clone, Debug)]
pub struct TeichmullerDictionary {
    p: u64,
    level: u64,
    factor: Vec<u64>,
    field: FiniteField,
    powers: Vec<FfElem>,
}

impl TeichmullerDictionary {
    pub fn build(ctx: &ScalarContext, level: u64) -> Result<Self> {
        let p = ctx.p();
        check_level(p, level)?;
        let factors = cyclotomic_factors_mod_p(p, level);
        Self::from_factor(p, level, factors.into_iter().next().expect("Φ_N has a factor"))
    }

    /// The dictionary at level M (a multiple of this level) whose prime lies
    /// over this dictionary's prime, so that lifts agree on μ_N.
    pub fn refine(&self, target: u64) -> Result<Self> {
        check_level(self.p, target)?;
        if target % self.level != 0 {
            return Err(Error::Shape(format!("level {} does not divide {}", self.level, target)));
        }
        if target == self.level {
            return Ok(self.clone());
        }
        let fp = PrimeField::new(self.p);
        let mine = Poly::new(&fp, self.factor.clone());
        let step = target / self.level;
        for cand in cyclotomic_factors_mod_p(self.p, target) {
            let field = FiniteField::new_unchecked(fp, Poly::new(&fp, cand.clone()));
            let w = field.pow(&field.generator(), step);
            let val = mine.coeffs().iter().rev().fold(field.zero(), |acc, c| {
                field.add(&field.mul(&acc, &w), &field.constant(*c))
            });
            if field.is_zero(&val) {
                return Self::from_factor(self.p, target, cand);
            }
        }
        Err(Error::InternalInconsistency("no compatible prime above the current one".into()))
    }

    fn from_factor(p: u64, level: u64, factor: Vec<u64>) -> Result<Self> {
        let field = FiniteField::new(p, factor.clone())?;
        let omega = field.generator();
        let powers: Vec<FfElem> = (0..level).map(|j| field.pow(&omega, j)).collect();
        let dict = TeichmullerDictionary { p, level, factor, field, powers };
        debug_assert!(dict.field.is_one(&dict.field.pow(&omega, level)));
        Ok(dict)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// s = ord_N(p), the degree of the residue field.
    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn factor(&self) -> &[u64] {
        &self.factor
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    /// ω, the class of the variable.
    pub fn omega(&self) -> FfElem {
        self.powers.get(1).cloned().unwrap_or_else(|| self.field.one())
    }

    pub fn omega_pow(&self, j: u64) -> &FfElem {
        &self.powers[(j % self.level) as usize]
    }

    pub fn cyclotomic_field(&self) -> CyclotomicField {
        CyclotomicField::new(self.level)
    }

    /// j with α = ω^j, by enumeration.
    pub fn discrete_log(&self, alpha: &FfElem) -> Result<u64> {
        if self.field.is_zero(alpha) {
            return Err(Error::ZeroElement);
        }
        self.powers
            .iter()
            .position(|w| w == alpha)
            .map(|j| j as u64)
            .ok_or(Error::NotRootOfUnity(self.level))
    }

    /// ζ_N^j where α = ω^j.
    pub fn lift(&self, alpha: &FfElem) -> Result<CyclotomicNumber> {
        Ok(self.cyclotomic_field().zeta_pow(self.discrete_log(alpha)?))
    }

    /// Reduction modulo the dictionary's prime of an element with
    /// p-integral coordinates: ζ_N ↦ ω, coefficients via residue.
    pub fn reduce(&self, x: &CyclotomicNumber) -> Result<FfElem> {
        let x = x.embed(self.level)?;
        let fp = PrimeField::new(self.p);
        let mut acc = self.field.zero();
        for (i, c) in x.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = nt::big_mod(c.denom(), self.p);
            let d_inv = fp.inv(&d).ok_or_else(|| Error::DenominatorNotInvertible(c.to_string()))?;
            let r = fp.mul(&nt::big_mod(c.numer(), self.p), &d_inv);
            acc = self.field.add(&acc, &self.field.mul(&self.field.constant(r), &self.powers[i]));
        }
        Ok(acc)
    }

    /// Carry an element of a coarser dictionary's field into this one along
    /// ω_coarse ↦ ω^{M/N}. Prime-field elements map to themselves.
    pub fn embed_residue(&self, coarse: &FiniteField, coarse_level: u64, a: &FfElem) -> Result<FfElem> {
        if coarse.degree() == 1 && coarse.modulus().coeffs() == [0, 1] {
            return Ok(self.field.constant(a.0[0]));
        }
        if coarse == &self.field {
            return Ok(a.clone());
        }
        if self.level % coarse_level != 0 {
            return Err(Error::Shape("residue fields are not nested".into()));
        }
        let w = self.omega_pow(self.level / coarse_level).clone();
        Ok(a.0.iter().rev().fold(self.field.zero(), |acc, c| {
            self.field.add(&self.field.mul(&acc, &w), &self.field.constant(*c))
        }))
    }
}

fn check_level(p: u64, level: u64) -> Result<()> {
    if level == 0 || nt::gcd(level, p) != 1 {
        return Err(Error::NotCoprime { level, p });
    }
    if level > MAX_DICTIONARY_LEVEL {
        return Err(Error::DictionaryTooSmall { needed: level, max: MAX_DICTIONARY_LEVEL });
    }
    Ok(())
}

/// Base-p digits of k, least significant first, padded to `len`.
fn digits(mut k: u64, p: u64, len: usize) -> Vec<u64> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push(k % p);
        k /= p;
    }
    v
}

/// Some irreducible monic polynomial of degree s over F_p (first found in
/// enumeration order).
fn some_irreducible(fp: &PrimeField, s: usize) -> Poly<u64> {
    if s == 1 {
        return Poly::new(fp, vec![0, 1]);
    }
    (1u64..)
        .map(|k| {
            let mut c = digits(k, fp.p(), s);
            c.push(1);
            Poly::new(fp, c)
        })
        .find(|f| f.coeffs()[0] != 0 && is_irreducible(fp, f))
        .unwrap()
}

/// All monic irreducible factors of Φ_N mod p, sorted lexicographically by
/// coefficient sequence starting from the constant term.
pub fn cyclotomic_factors_mod_p(p: u64, level: u64) -> Vec<Vec<u64>> {
    let fp = PrimeField::new(p);
    let s = nt::multiplicative_order_mod(p, level) as usize;
    let aux = if s == 1 {
        FiniteField::prime(p)
    } else {
        FiniteField::new_unchecked(fp, some_irreducible(&fp, s))
    };
    // an element of exact order N
    let cofactor = (aux.order() - BigUint::from(1u32)) / BigUint::from(level);
    let primes: Vec<u64> = nt::factorize(level as u128).into_iter().map(|(r, _)| r as u64).collect();
    let b = (1u64..)
        .map(|k| aux.pow_big(&aux.from_coeffs(&digits(k, p, s)), &cofactor))
        .find(|b| !aux.is_zero(b) && primes.iter().all(|r| !aux.is_one(&aux.pow(b, level / r))))
        .unwrap();
    // Frobenius orbits j ↦ jp on (Z/N)^×; each gives one factor
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for j in (0..level).filter(|&j| nt::gcd(j, level) == 1 || level == 1) {
        if !seen.insert(j) {
            continue;
        }
        let mut orbit = vec![j];
        let mut k = j * p % level.max(1);
        while k != j && level > 1 {
            seen.insert(k);
            orbit.push(k);
            k = k * p % level;
        }
        let mut minpoly = Poly::constant(&aux, aux.one());
        for e in orbit {
            minpoly = minpoly.mul(&aux, &Poly::linear_root(&aux, &aux.pow(&b, e)));
        }
        let coeffs: Vec<u64> = minpoly
            .coeffs()
            .iter()
            .map(|c| aux.as_prime(c).expect("minimal polynomial over F_p"))
            .collect();
        out.push(coeffs);
    }
    out.sort();
    debug_assert_eq!(
        out.iter().map(|f| f.len() - 1).sum::<usize>(),
        cyclotomic_polynomial(level).len() - 1
    );
    out
}
