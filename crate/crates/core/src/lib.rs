//! Higher-order splitting solver for the time-dependent Schrödinger equation
//! on a (semi-)infinite strip.
//!
//! The main integrator combines Numerov averages split into products of 1D
//! averages, a Strang splitting with respect to the potential, and discrete
//! transparent boundary conditions written as a time convolution per
//! transverse sine mode. Each time level reduces to independent complex
//! tridiagonal problems along the leading axis.
//!
//! Module map:
//! - [`grid`]: meshes, fields, initial packets, sampled potentials.
//! - [`spectral`]: closed-form eigenvalues of the discrete operators.
//! - [`transforms`]: sine transforms across the transverse axes and the
//!   axis-1 stencils.
//! - [`tbc`]: convolution kernels and boundary rows.
//! - [`stepper`]: the time integrator and its variants.
//! - [`diagnostics`]: mesh norms, energies, scheme differences.

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod spectral;
pub mod stepper;
pub mod tbc;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
