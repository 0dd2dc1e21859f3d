//! The cyclotomic local ring Z[ζ_N] localized at the prime P = (p, f(ζ_N))
//! chosen by a Teichmüller dictionary. p ∤ N, so P is unramified and p is a
//! uniformizer.
//!
//! Valuations and residues are read off the image of ζ_N in the truncated
//! unramified extension W_M = (Z/p^M)[y]/(f̃), where f̃ is the chosen factor
//! with coefficients in [0, p) and ζ_N maps to the Teichmüller lift of y.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::local::modinv_big;
use crate::arith::{nt, CyclotomicField, CyclotomicNumber, FfElem, Field, FiniteField, ScalarContext, TeichmullerDictionary};
use crate::error::Result;
use crate::linalg::Dvr;

struct Inner {
    dict: TeichmullerDictionary,
    field: CyclotomicField,
    /// ζ̃^i for i < φ(N), per precision M.
    powers: Mutex<HashMap<u32, Arc<Vec<Vec<BigInt>>>>>,
}

#[derive(Clone)]
pub struct CyclotomicLocal {
    inner: Arc<Inner>,
}

impl fmt::Debug for CyclotomicLocal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[ζ{}]_P (p = {}, f = {:?})", self.level(), self.p(), self.inner.dict.factor())
    }
}

impl PartialEq for CyclotomicLocal {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.p() == other.p() && self.inner.dict.factor() == other.inner.dict.factor() && self.level() == other.level())
    }
}

impl CyclotomicLocal {
    pub fn new(ctx: &ScalarContext, level: u64) -> Result<Self> {
        Ok(Self::from_dictionary(TeichmullerDictionary::build(ctx, level)?))
    }

    pub fn from_dictionary(dict: TeichmullerDictionary) -> Self {
        let field = dict.cyclotomic_field();
        CyclotomicLocal { inner: Arc::new(Inner { dict, field, powers: Mutex::new(HashMap::new()) }) }
    }

    /// The ring at level M (a multiple of N) whose prime lies over this one.
    pub fn refine(&self, target: u64) -> Result<Self> {
        Ok(Self::from_dictionary(self.inner.dict.refine(target)?))
    }

    pub fn dictionary(&self) -> &TeichmullerDictionary {
        &self.inner.dict
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.inner.field
    }

    pub fn embed(&self, x: &CyclotomicNumber) -> CyclotomicNumber {
        x.embed(self.level()).expect("element level divides the ring level")
    }

    /// Teichmüller lift of a residue that is an N-th root of unity.
    pub fn teichmuller(&self, r: &FfElem) -> Result<CyclotomicNumber> {
        self.inner.dict.lift(r)
    }

    fn modulus(&self, m: u32) -> BigInt {
        BigInt::from(self.p()).pow(m)
    }

    fn w_mul(&self, a: &[BigInt], b: &[BigInt], pm: &BigInt) -> Vec<BigInt> {
        let f = self.inner.dict.factor();
        let s = f.len() - 1;
        let mut prod = vec![BigInt::zero(); 2 * s - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        // reduce by the monic f̃ from the top
        for k in (s..prod.len()).rev() {
            let c = std::mem::take(&mut prod[k]).mod_floor(pm);
            if c.is_zero() {
                continue;
            }
            for (j, fj) in f.iter().take(s).enumerate() {
                prod[k - s + j] -= &c * BigInt::from(*fj);
            }
        }
        prod.truncate(s);
        prod.into_iter().map(|x| x.mod_floor(pm)).collect()
    }

    fn w_pow(&self, a: &[BigInt], mut e: u64, pm: &BigInt) -> Vec<BigInt> {
        let s = a.len();
        let mut acc = vec![BigInt::zero(); s];
        acc[0] = BigInt::one();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.w_mul(&acc, &base, pm);
            }
            e >>= 1;
            if e > 0 {
                base = self.w_mul(&base, &base, pm);
            }
        }
        acc
    }

    fn zeta_powers(&self, m: u32) -> Arc<Vec<Vec<BigInt>>> {
        if let Some(v) = self.inner.powers.lock().unwrap().get(&m) {
            return v.clone();
        }
        let pm = self.modulus(m);
        let s = self.inner.dict.degree();
        let q = self.p().pow(s as u32);
        // y^{q^m} is the Teichmüller representative of y modulo p^m
        let mut z = vec![BigInt::zero(); s];
        if s == 1 {
            z[0] = BigInt::from(self.inner.dict.omega().0[0]);
        } else {
            z[1] = BigInt::one();
        }
        for _ in 0..m {
            z = self.w_pow(&z, q, &pm);
        }
        let phi = self.inner.field.phi();
        let mut pows = Vec::with_capacity(phi);
        let mut cur = vec![BigInt::zero(); s];
        cur[0] = BigInt::one();
        for _ in 0..phi {
            pows.push(cur.clone());
            cur = self.w_mul(&cur, &z, &pm);
        }
        let v = Arc::new(pows);
        self.inner.powers.lock().unwrap().insert(m, v.clone());
        v
    }

    /// Image of a(ζ) in W_M for integer coordinates a.
    fn image(&self, nums: &[BigInt], m: u32) -> Vec<BigInt> {
        let pm = self.modulus(m);
        let pows = self.zeta_powers(m);
        let s = self.inner.dict.degree();
        let mut out = vec![BigInt::zero(); s];
        for (a, pw) in nums.iter().zip(pows.iter()) {
            if a.is_zero() {
                continue;
            }
            for (o, w) in out.iter_mut().zip(pw) {
                *o += a * w;
            }
        }
        out.into_iter().map(|x| x.mod_floor(&pm)).collect()
    }

    fn precision_for(k: u32) -> u32 {
        (k + 1).next_power_of_two().max(8)
    }

    /// Residue via coefficient reduction when no coordinate has p in its denominator.
    fn cheap_residue(&self, x: &CyclotomicNumber) -> Option<FfElem> {
        self.inner.dict.reduce(x).ok()
    }
}

impl Field for CyclotomicLocal {
    type Elem = CyclotomicNumber;

    fn zero(&self) -> CyclotomicNumber {
        self.inner.field.zero()
    }
    fn one(&self) -> CyclotomicNumber {
        self.inner.field.one()
    }
    fn from_int(&self, n: i64) -> CyclotomicNumber {
        self.inner.field.from_int(n)
    }
    fn add(&self, a: &CyclotomicNumber, b: &CyclotomicNumber) -> CyclotomicNumber {
        self.inner.field.add(a, b)
    }
    fn sub(&self, a: &CyclotomicNumber, b: &CyclotomicNumber) -> CyclotomicNumber {
        self.inner.field.sub(a, b)
    }
    fn neg(&self, a: &CyclotomicNumber) -> CyclotomicNumber {
        self.inner.field.neg(a)
    }
    fn mul(&self, a: &CyclotomicNumber, b: &CyclotomicNumber) -> CyclotomicNumber {
        self.inner.field.mul(a, b)
    }
    fn inv(&self, a: &CyclotomicNumber) -> Option<CyclotomicNumber> {
        self.inner.field.inv(a)
    }
    fn is_zero(&self, a: &CyclotomicNumber) -> bool {
        self.inner.field.is_zero(a)
    }
}

impl Dvr for CyclotomicLocal {
    fn p(&self) -> u64 {
        self.inner.dict.p()
    }

    fn valuation(&self, x: &CyclotomicNumber) -> Option<i64> {
        if self.is_zero(x) {
            return None;
        }
        let p = self.p();
        if let Some(r) = x.as_rational() {
            return Some(nt::int_valuation(r.numer(), p) as i64 - nt::int_valuation(r.denom(), p) as i64);
        }
        if let Some(r) = self.cheap_residue(x) {
            if !self.residue_field().is_zero(&r) {
                return Some(0);
            }
        }
        let (nums, d) = x.split_denominator();
        let vd = nt::int_valuation(&d, p) as i64;
        let mut m = 8u32;
        loop {
            let img = self.image(&nums, m);
            if let Some(v) = img.iter().filter(|c| !c.is_zero()).map(|c| nt::int_valuation(c, p)).min() {
                return Some(v as i64 - vd);
            }
            m *= 2;
        }
    }

    fn residue_field(&self) -> &FiniteField {
        self.inner.dict.field()
    }

    fn residue(&self, x: &CyclotomicNumber) -> FfElem {
        if let Some(r) = self.cheap_residue(x) {
            return r;
        }
        let p = self.p();
        let (nums, d) = x.split_denominator();
        let k = nt::int_valuation(&d, p);
        let pk = BigInt::from(p).pow(k);
        let img = self.image(&nums, Self::precision_for(k));
        let unit_d = &d / &pk;
        let inv = modinv_big(&unit_d, &BigInt::from(p)).expect("unit part of denominator");
        let coeffs: Vec<u64> = img
            .iter()
            .map(|c| {
                debug_assert!((c % &pk).is_zero(), "residue of a non-integral element");
                nt::big_mod(&((c / &pk) * &inv), p)
            })
            .collect();
        FfElem(coeffs)
    }

    fn lift(&self, r: &FfElem) -> CyclotomicNumber {
        let k = &self.inner.field;
        r.0.iter().enumerate().fold(k.zero(), |acc, (i, &c)| k.add(&acc, &k.mul(&k.from_int(c as i64), &k.zeta_pow(i as u64))))
    }

    fn from_rational(&self, r: &BigRational) -> CyclotomicNumber {
        self.inner.field.from_rational(r.clone())
    }

    fn to_cyclotomic(&self, x: &CyclotomicNumber) -> CyclotomicNumber {
        x.clone()
    }

    fn from_cyclotomic(&self, x: &CyclotomicNumber) -> Option<CyclotomicNumber> {
        x.embed(self.level()).ok()
    }

    fn level(&self) -> u64 {
        self.inner.field.level()
    }
}
