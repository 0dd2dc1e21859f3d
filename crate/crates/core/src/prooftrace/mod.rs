//! An executable version of the inductive argument: strip acyclic pieces,
//! build a γ-stable filtration with Teichmüller subquotients, correct γ by a
//! homotopy, split off the top degree and recurse, checking that (Br, Tr) is
//! preserved at every stage.

pub mod correction;
pub mod driver;
pub mod extring;
pub mod filtration;
pub mod strip;

pub use extring::CyclotomicLocal;
pub use strip::{check_transport, strip_along, strip_top_acyclic, transport_along_quasi_iso, transport_along_strip, StripMode, StripResult, Transported};
pub use correction::{homotopy_correction, is_teichmuller_triangular, Correction};
pub use driver::{initial_level, split_top_and_recurse, Stage, StageRecord, TraceAbort, TraceConfig, TraceTranscript};
pub use filtration::{build_stable_filtration, ExtensionRequest, FiltrationData, FiltrationOutcome};
