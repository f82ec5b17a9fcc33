//! Special functions, combinatorics and quadrature used throughout the
//! analytics and channel code.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod combinatorics;
mod qfunc;
pub mod quadrature;

pub use bessel::{bessel_i0, bessel_j0, bessel_k1, bessel_k1_scaled, one_minus_x_k1};
pub(crate) use combinatorics::binomial_f64;
pub use combinatorics::{binomial, double_factorial_ratio};
pub use qfunc::gaussian_q;
