//! Univariate approximation inside a fixed width-36, depth-5 EUAF template.
//!
//! The construction follows three steps: split `[a, b]` into `n` cells (sized
//! by the modulus of continuity), map each cell to its integer index, then map
//! indices to function values. When that misses the tolerance the same
//! template is re-parameterized as a piecewise-linear interpolant and refined
//! by multi-start pattern search.

pub mod decoder;
pub mod fit;
pub mod indexer;
pub mod modulus;
pub mod partition;
pub mod pl;
pub mod search;

pub use decoder::fit_point_values;
pub use fit::{
    embed_in_template, fit_univariate, sup_error, template_fingerprint, uniform_grid, FitMethod, FitReport,
    TEMPLATE_DEPTH, TEMPLATE_WIDTH, VALIDATION_POINTS,
};
pub use indexer::build_indexer;
pub use modulus::estimate_modulus;
pub use partition::{choose_partition, PartitionPlan, DEFAULT_MAX_INTERVALS};
pub use pl::PiecewiseLinear;
pub use search::{pattern_search, PatternOptions, SearchBudget, SearchOutcome};
