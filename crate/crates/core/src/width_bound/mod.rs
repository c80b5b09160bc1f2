//! Width lower bound: certified instances showing that width `d - 1` cannot
//! approximate certain `d`-variate functions to arbitrary accuracy.
//!
//! Everything touching the first layer runs in exact arithmetic; floats enter
//! only when the rest of the network is evaluated.

pub mod family;
pub mod gap;
pub mod matrix;
pub mod sample;
pub mod witness;

pub use family::{example_family, twice_abs, ExampleFamily, ScalarFn};
pub use gap::{first_layer_rational, two_point_gap, two_point_gap_with, GapCertificate, GAP_SLACK};
pub use matrix::Matrix;
pub use sample::{random_narrow_network, random_rational_matrix, train_narrow_network};
pub use witness::{classify_indices, construct_witness, rational_string, IndexClasses, WitnessReport};
