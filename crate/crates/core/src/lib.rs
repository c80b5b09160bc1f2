//! Fixed-architecture approximation with the elementary universal activation
//! function (EUAF).
//!
//! * [`activation`] and [`network`]: the activation, layered networks and the
//!   three-neuron clipping fragment.
//! * [`univariate`]: fitting `f ∈ C([a, b])` with a fixed width-36/depth-5 template.
//! * [`kst`]: composing `2d + 1` clipped inner networks with one shared outer
//!   network into a `d`-variate approximant, and counting its intrinsic neurons.
//! * [`width_bound`]: exact witness construction showing that width `d - 1`
//!   networks cannot approximate certain functions to arbitrary accuracy.
//!
//! Network code is generic over [`Scalar`] (`f32`/`f64`); exact linear algebra is
//! generic over [`ExactField`]. The aliases below fix the concrete types used by
//! the fitting pipeline and the witness construction.

pub mod activation;
pub mod error;
pub mod format;
pub mod kst;
pub mod network;
pub mod scalar;
pub mod table;
pub mod univariate;
pub mod width_bound;

pub use activation::euaf;
pub use error::{Error, Result};
pub use network::{clip01_fragment, AffineLayer, FeedforwardNetwork};
pub use scalar::{ExactField, Scalar};

/// Double-precision network, used by all fitting and composition code.
pub type Network = FeedforwardNetwork<f64>;
/// Single-precision network.
pub type Network32 = FeedforwardNetwork<f32>;
/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Exact rational matrix.
pub type RationalMatrix = width_bound::Matrix<Rational>;
