//! The integers localized at p, Z_(p), and their fraction field Q.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ff::{FfElem, FiniteField};
use super::field::{Field, RationalField};
use super::nt;
use crate::error::{Error, Result};

/// Houses p. Doubles as the handle for Z_(p): arithmetic happens in the
/// fraction field Q, integrality is a valuation condition.
#[derive(Clone, PartialEq, Eq)]
pub struct ScalarContext {
    p: u64,
    residue: FiniteField,
}

impl fmt::Debug for ScalarContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_({})", self.p)
    }
}

impl ScalarContext {
    pub fn new(p: u64) -> Result<Self> {
        if !nt::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(ScalarContext { p, residue: FiniteField::prime(p) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn residue_field(&self) -> &FiniteField {
        &self.residue
    }

    /// v_p(x); `None` stands for +∞.
    pub fn valuation(&self, x: &BigRational) -> Option<i64> {
        if x.is_zero() {
            return None;
        }
        Some(nt::int_valuation(x.numer(), self.p) as i64 - nt::int_valuation(x.denom(), self.p) as i64)
    }

    pub fn is_integral(&self, x: &BigRational) -> bool {
        self.valuation(x).is_none_or(|v| v >= 0)
    }

    /// Image in F_p of an integral element.
    pub fn residue_of(&self, x: &BigRational) -> u64 {
        debug_assert!(self.is_integral(x));
        let n = nt::big_mod(x.numer(), self.p);
        let d = nt::big_mod(x.denom(), self.p);
        let d_inv = nt::mod_inverse(d, self.p).expect("integral element has unit denominator");
        ((n as u128 * d_inv as u128) % self.p as u128) as u64
    }

    /// Canonical representative in [0, p^e) of an integral element modulo p^e.
    pub fn reduce_mod_power(&self, x: &BigRational, e: u32) -> BigInt {
        let m = BigInt::from(self.p).pow(e);
        let d_inv = modinv_big(x.denom(), &m).expect("unit denominator");
        (x.numer() * d_inv).mod_floor(&m)
    }

    /// Parse "a" or "a/b" and check the denominator is prime to p.
    pub fn parse(&self, s: &str) -> Result<BigRational> {
        let v = BigRational::from_str(s.trim())
            .map_err(|_| Error::DenominatorNotInvertible(format!("malformed scalar {s:?}")))?;
        if !self.is_integral(&v) {
            return Err(Error::DenominatorNotInvertible(s.to_string()));
        }
        Ok(v)
    }
}

pub(crate) fn modinv_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

impl Field for ScalarContext {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_int(&self, n: i64) -> BigRational {
        RationalField.from_int(n)
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        RationalField.inv(a)
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// An element of Z_(p): a reduced fraction whose denominator is prime to p.
#[derive(Clone, PartialEq, Eq)]
pub struct LocalScalar {
    value: BigRational,
    ctx: ScalarContext,
}

impl LocalScalar {
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>, ctx: &ScalarContext) -> Result<Self> {
        let d: BigInt = denominator.into();
        if d.is_zero() {
            return Err(Error::DenominatorNotInvertible("0".into()));
        }
        Self::from_rational(BigRational::new(numerator.into(), d), ctx)
    }

    pub fn from_rational(value: BigRational, ctx: &ScalarContext) -> Result<Self> {
        if !ctx.is_integral(&value) {
            return Err(Error::DenominatorNotInvertible(value.to_string()));
        }
        Ok(LocalScalar { value, ctx: ctx.clone() })
    }

    pub fn parse(s: &str, ctx: &ScalarContext) -> Result<Self> {
        Ok(LocalScalar { value: ctx.parse(s)?, ctx: ctx.clone() })
    }

    pub fn numerator(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.value.denom()
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn context(&self) -> &ScalarContext {
        &self.ctx
    }

    /// `None` for zero (valuation +∞).
    pub fn valuation(&self) -> Option<u32> {
        self.ctx.valuation(&self.value).map(|v| v as u32)
    }

    pub fn residue(&self) -> FfElem {
        self.ctx.residue.constant(self.ctx.residue_of(&self.value))
    }

    /// Split x = p^v · u with u a unit; `None` for zero.
    pub fn unit_part(&self) -> Option<(u32, LocalScalar)> {
        let v = self.valuation()?;
        let pv = BigRational::from_integer(BigInt::from(self.ctx.p).pow(v));
        Some((v, LocalScalar { value: &self.value / pv, ctx: self.ctx.clone() }))
    }
}

impl fmt::Debug for LocalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// "a/b" in lowest terms; "a" when the denominator is 1.
impl fmt::Display for LocalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
