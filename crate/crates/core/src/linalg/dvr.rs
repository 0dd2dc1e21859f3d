//! The effective discrete valuation ring contract.
//!
//! A handle implementing [`Dvr`] is simultaneously the fraction field (its
//! [`Field`] impl) and the ring of elements with nonnegative valuation. The
//! uniformizer is always the rational prime p.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::{CyclotomicNumber, FfElem, Field, FiniteField, ScalarContext};

pub trait Dvr: Field + PartialEq {
    fn p(&self) -> u64;

    /// `None` stands for +∞.
    fn valuation(&self, x: &Self::Elem) -> Option<i64>;

    fn residue_field(&self) -> &FiniteField;

    /// Image in the residue field of an integral element.
    fn residue(&self, x: &Self::Elem) -> FfElem;

    /// Some integral element with the given residue.
    fn lift(&self, r: &FfElem) -> Self::Elem;

    fn from_rational(&self, r: &BigRational) -> Self::Elem;

    /// Coordinates in Q(ζ_N) for N = [`Dvr::level`].
    fn to_cyclotomic(&self, x: &Self::Elem) -> CyclotomicNumber;

    /// The element with these coordinates, when it lies in the fraction field.
    fn from_cyclotomic(&self, x: &CyclotomicNumber) -> Option<Self::Elem>;

    /// Level of the cyclotomic field the fraction field sits in.
    fn level(&self) -> u64;

    fn is_integral(&self, x: &Self::Elem) -> bool {
        self.valuation(x).is_none_or(|v| v >= 0)
    }

    fn is_unit(&self, x: &Self::Elem) -> bool {
        self.valuation(x) == Some(0)
    }

    fn p_pow(&self, e: i64) -> Self::Elem {
        let pe = BigRational::from_integer(BigInt::from(self.p()).pow(e.unsigned_abs() as u32));
        let r = if e >= 0 { pe } else { pe.recip() };
        self.from_rational(&r)
    }

    /// u with x = p^v(x) · u.
    fn unit_part(&self, x: &Self::Elem) -> Option<(i64, Self::Elem)> {
        let v = self.valuation(x)?;
        Some((v, self.mul(x, &self.p_pow(-v))))
    }
}

impl Dvr for ScalarContext {
    fn p(&self) -> u64 {
        ScalarContext::p(self)
    }

    fn valuation(&self, x: &BigRational) -> Option<i64> {
        ScalarContext::valuation(self, x)
    }

    fn residue_field(&self) -> &FiniteField {
        ScalarContext::residue_field(self)
    }

    fn residue(&self, x: &BigRational) -> FfElem {
        FfElem(vec![self.residue_of(x)])
    }

    fn lift(&self, r: &FfElem) -> BigRational {
        BigRational::from_integer(BigInt::from(r.0[0]))
    }

    fn from_rational(&self, r: &BigRational) -> BigRational {
        r.clone()
    }

    fn to_cyclotomic(&self, x: &BigRational) -> CyclotomicNumber {
        CyclotomicNumber::from_rational(1, x.clone())
    }

    fn from_cyclotomic(&self, x: &CyclotomicNumber) -> Option<BigRational> {
        x.as_rational()
    }

    fn level(&self) -> u64 {
        1
    }
}
