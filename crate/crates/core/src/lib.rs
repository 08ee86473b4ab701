//! Fractional calculus of radial functions on ℝⁿ: Hankel transforms, Riesz
//! and Bessel potentials, fractional derivatives, weighted norms, the
//! inequality lab and the spectral solver on the ball.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball;
pub mod error;
pub mod grid;
pub mod inequality;
pub mod interp;
pub mod norms;
pub mod profile;
pub mod potentials;
pub mod quadrature;
pub mod specfun;
pub mod transforms;
pub mod sphere;

pub use error::{Error, Result};
pub use grid::{Grid, Spacing};
pub use profile::{Family, ProfileKind, RadialProfile};
pub use quadrature::{integrate, EndpointRule, Estimate, QuadratureSpec};
pub use sphere::sphere_mean;
