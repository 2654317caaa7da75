//! Exact distance statistics for regular polygons.
//!
//! For the regular `n`-gon with circumradius `r` this crate evaluates
//!
//! * the chord length distribution function `F(x)` of isotropic uniform random
//!   lines ([`ChordLengthDistribution`]),
//! * the density `g(x)` of the distance between two independent uniform points
//!   ([`DistanceDensity`]),
//! * every integer moment `E[Δ^m]`, `m ≥ -1`, in closed form ([`moments`]),
//!
//! together with independent quadrature and Monte Carlo oracles that cross-check
//! each of them.
//!
//! ```
//! use polymoments::{PolygonSpec, moments};
//!
//! let pentagon = PolygonSpec::new(5, 1.0)?.derive()?;
//! let mean = moments::moment(&pentagon, 1)?.value;
//! assert!((mean - 0.793_698_195_033_753_4).abs() < 1e-13);
//! # Ok::<(), polymoments::Error>(())
//! ```

#![allow(clippy::excessive_precision)]

pub mod antiderivatives;
pub mod chord_cdf;
pub mod circle;
mod dd;
pub mod distance_pdf;
mod error;
pub mod geometry;
pub mod moments;
pub mod oracles;
pub mod verify;

pub use chord_cdf::{BranchId, BranchTag, ChordLengthDistribution, CurveSample};
pub use distance_pdf::{DistanceDensity, PhiPrefix};
pub use error::{Error, Result};
pub use geometry::{Point, PolygonParams, PolygonSpec};
pub use moments::{Method, MomentResult};
pub use oracles::monte_carlo::{Estimator, McConfig, McEstimate};
pub use oracles::quadrature::{QuadConfig, QuadResult};
