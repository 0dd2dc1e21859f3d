//! Strictly perfect complexes over an effective DVR.

pub mod cohomology;
pub mod complex;
pub mod homotopy;

pub use cohomology::{
    field_cohomology, induced_on_cohomology, integral_cohomology, rational_cohomology, residue_cohomology,
    same_induced_map, CohomologyPresentation, DegreeCohomology, FieldCohomology,
};
pub use complex::{cone, direct_sum, perturb, quotient_by_split, ChainMap, DirectSum, Homotopy, PerfectComplex, SplitQuotient};
pub use homotopy::{is_quasi_isomorphism, null_homotopy_witness};
