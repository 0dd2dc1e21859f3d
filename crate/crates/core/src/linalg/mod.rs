//! Exact linear algebra over fields and over effective discrete valuation rings.

pub mod charpoly;
pub mod dvr;
pub mod gauss;
pub mod matrix;
pub mod snf;

pub use charpoly::{
    characteristic_polynomial, companion, cyclotomic_levels, is_prime_to_p_automorphism, rational_spectrum, unity_level,
    residue_spectrum, root_of_unity_spectrum_with,
};
pub use dvr::Dvr;
pub use matrix::Matrix;
pub use snf::{smith_normal_form, solve_in_module, ModuleSolution, Snf, Solvability};
