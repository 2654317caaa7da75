//! Independent verification engines: adaptive quadrature that honours
//! breakpoints, and Monte Carlo samplers for point-pair distances and
//! isotropic uniform random chords.

pub mod monte_carlo;
pub mod quadrature;

pub use monte_carlo::{mc_estimate, sample_point, Estimator, McConfig, McEstimate};
pub use quadrature::{integrate, QuadConfig, QuadResult};
