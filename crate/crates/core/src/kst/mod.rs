//! Multivariate approximation by composing univariate networks along a
//! Kolmogorov superposition representation
//! `f(x) = Σ_{i=1}^{2d+1} g(Σ_j λ_j h_i(x_j))`.

pub mod budget;
pub mod compose;
pub mod pipeline;
pub mod serial;
pub mod triple;

pub use budget::{compute_budget, ErrorBudget, BUDGET_SAMPLES, MIN_DELTA};
pub use compose::{
    clip_inner, compose_kst, count_intrinsic_neurons, ends_with_clip, full_width_count, rescale_maps,
    validate_lambda, AffineMap, KstComposition, NeuronCount,
};
pub use pipeline::{
    approximate_multivariate, default_axis_points, tensor_grid, verify_against_triple, verify_error, KstRun,
};
pub use serial::{deserialize_composition, serialize_composition};
pub use triple::SyntheticKstTriple;
