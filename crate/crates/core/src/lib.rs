//! Numerical tools for the `L^p`-cosine and spherical Radon transforms of
//! even densities on the unit sphere, the closed-form derivatives of the
//! resulting support functions, and the curvature of the convex bodies they
//! define.

// `!(x > a)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convexity;
pub mod deriv;
pub mod error;
pub mod harmonics;
pub mod linalg;
pub mod mesh;
pub mod specfun;
pub mod squad;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
