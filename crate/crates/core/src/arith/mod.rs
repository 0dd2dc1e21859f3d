//! Exact scalar arithmetic: p-local integers, finite fields, cyclotomic
//! fields and the Teichmüller dictionary tying them together.

pub mod cyclo;
pub mod ff;
pub mod field;
pub mod local;
pub mod nt;
pub mod poly;
pub mod teich;

pub use cyclo::{cyclotomic_polynomial, sqrt_in_cyclotomic, CyclotomicField, CyclotomicNumber};
pub use ff::{FfElem, FiniteField, PrimeField};
pub use field::{Field, RationalField};
pub use local::{LocalScalar, ScalarContext};
pub use poly::Poly;
pub use teich::{TeichmullerDictionary, MAX_DICTIONARY_LEVEL};
