//! Airy-mode propagators, a multi-reflection parametrix and caustic
//! diagnostics for the half-plane model `x > 0` with operator
//! `∂²_x + (1 + x)∂²_y`.
//!
//! The generic quadrature and fitting layers are written over [`Real`]; the
//! physics modules run in [`Scalar`] (f64) because the Airy kernels need the
//! full double-precision range.

pub mod caustics;
pub mod config;
pub mod error;
pub mod gallery;
pub mod green;
pub mod harness;
pub mod oscint;
pub mod parametrix;
pub mod quad;
pub mod specfun;
pub mod window;

pub use error::{Error, Result};

use std::fmt::Debug;

/// Floating point types accepted by the generic numerical layers.
pub trait Real:
    num_traits::Float + num_traits::FloatConst + num_traits::FromPrimitive + Debug + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Working precision of the physics modules.
pub type Scalar = f64;

/// Complex amplitude in working precision.
pub type Complex = num_complex::Complex<Scalar>;

/// Crate version, echoed into every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[inline]
pub(crate) fn c(re: Scalar, im: Scalar) -> Complex {
    Complex::new(re, im)
}
