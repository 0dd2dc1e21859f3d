//! Instance generation, the instance file format and grid self-tests.

pub mod format;
pub mod generator;
pub mod selftest;

pub use format::{decode, decode_value, encode, encode_value, InstanceDocument, FORMAT_TAG};
pub use generator::{generate_action, generate_instance, GeneratorParams, Mode};
pub use selftest::{grid_pairs, grid_params, run_selftest, Failure, Grid, InstanceOutcome, SelftestConfig, SelftestSummary};
