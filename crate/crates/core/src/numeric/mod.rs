//! Floating-point building blocks: compensated sums, quadrature and the
//! gamma family.

pub mod compensated;
pub mod gamma;
pub mod incgamma;
pub mod quad;
pub mod zeta;

pub use statrs::function::erf::erfc;
