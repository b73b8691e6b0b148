//! Special functions and quadrature.

pub mod bessel;
pub mod gamma;
pub mod ode;
pub mod quad;
