//! Exact verification that the Brauer character of the mod-p cohomology of a
//! strictly perfect complex over Z_(p) agrees with the ordinary character of
//! its rational cohomology, together with a step-by-step executable version
//! of the inductive argument behind that identity.

pub mod arith;
pub mod characters;
pub mod complexes;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod prooftrace;

pub use error::{Error, Result};
