//! Brauer and ordinary virtual characters, the prime-to-p criterion and
//! group actions up to homotopy.

pub mod action;
pub mod group;
pub mod values;

pub use action::{check_action_coherence, choose_level, element_report, equivariant_report, ActionAssignment, CoherenceError, EquivariantReport};
pub use group::GroupTable;
pub use values::{
    brauer_virtual_character, ordinary_virtual_trace, prime_to_p_on_cohomology, verify_theorem, BrauerValue, CharacterReport,
    Verdict,
};
