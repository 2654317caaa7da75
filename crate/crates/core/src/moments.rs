//! Moments `M_m = E[Δ^m]` of the distance between two uniform points.
//!
//! Integrating the distance density by parts against the chord length
//! distribution gives
//!
//! ```text
//! M_m = 2L / ((m+2)·A²·ℓ₁) · Σ_k ∫_{ℓ_k}^{ℓ_{k+1}} x^{m+2}·H_k(x) dx,   m ≥ −1,
//! ```
//!
//! and every branch integral has a closed form in terms of `σ̃` and `τ̃`.
//! Besides that analytic route this module offers two quadrature routes and a
//! Monte Carlo route for cross-checking, the short closed forms for `M_2` and
//! `M_4`, and the related polar moment and chord power integrals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chord_cdf::{BranchId, BranchTag, ChordLengthDistribution};
use crate::dd::compensated_sum;
use crate::distance_pdf::DistanceDensity;
use crate::error::{Error, Result};
use crate::geometry::PolygonParams;
use crate::oracles::monte_carlo::{mc_estimate, Estimator, McConfig};
use crate::oracles::quadrature::{integrate, QuadConfig};

pub use crate::circle::{circle_moment, circle_variance};

/// Highest supported order. Beyond it the primitives lose too many digits to
/// cancellation between terms of size `d^{m+3}`.
pub const MAX_ORDER: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    QuadraturePdf,
    QuadratureCdf,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentResult {
    pub m: i32,
    pub value: f64,
    pub method: Method,
    pub err_estimate: Option<f64>,
}

fn check_order(m: i32) -> Result<()> {
    if (-1..=MAX_ORDER).contains(&m) {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange {
            order: m,
            min: -1,
            max: MAX_ORDER,
        })
    }
}

/// `2L/((m+2)·A²)`, the factor in front of `∫ x^{m+2}(1 − F)`.
fn prefactor(params: &PolygonParams, m: i32) -> f64 {
    2.0 * params.perimeter() / ((m + 2) as f64 * params.area().powi(2))
}

/// A primitive of `x^{m+2}·H_k(x)` on branch `(k, tag)`, evaluated at `x`.
pub fn h_tilde(params: &PolygonParams, tag: BranchTag, m: i32, k: usize, x: f64) -> Result<f64> {
    check_order(m)?;
    let dist = ChordLengthDistribution::new(params);
    let formula = dist.formula(BranchId { k, tag }).ok_or_else(|| {
        Error::Domain(format!(
            "branch ({k}, {tag:?}) does not occur for n = {}",
            params.n()
        ))
    })?;
    Ok(formula.primitive((m + 2) as u32, x))
}

/// `M_m` from the closed-form branch integrals.
pub fn moment(params: &PolygonParams, m: i32) -> Result<MomentResult> {
    moment_of(&ChordLengthDistribution::new(params), m)
}

/// As [`moment`], reusing an already built distribution.
pub fn moment_of(dist: &ChordLengthDistribution, m: i32) -> Result<MomentResult> {
    check_order(m)?;
    let params = dist.params();
    let ell = params.ell();
    let weight = (m + 2) as u32;
    let parts = (0..=params.big_k())
        .map(|k| dist.branch_integral(weight, k, ell[k], ell[k + 1]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(MomentResult {
        m,
        value: prefactor(params, m) / params.side() * compensated_sum(&parts),
        method: Method::Analytic,
        err_estimate: None,
    })
}

/// `∫₀^d x^m·g(x) dx` by adaptive quadrature split at the breakpoints.
pub fn moment_by_pdf_quadrature(
    params: &PolygonParams,
    m: i32,
    cfg: &QuadConfig,
) -> Result<MomentResult> {
    check_order(m)?;
    let density = DistanceDensity::new(params);
    let cfg = cfg.clone().with_splits(density.chords().breakpoints());
    let q = integrate(|x| x.powi(m) * density.pdf(x), 0.0, params.diameter(), &cfg)?;
    Ok(MomentResult {
        m,
        value: q.value,
        method: Method::QuadraturePdf,
        err_estimate: Some(q.err_estimate),
    })
}

/// `2L/((m+2)A²) · ∫₀^d x^{m+2}(1 − F(x)) dx` by adaptive quadrature.
pub fn moment_by_cdf_quadrature(
    params: &PolygonParams,
    m: i32,
    cfg: &QuadConfig,
) -> Result<MomentResult> {
    check_order(m)?;
    let dist = ChordLengthDistribution::new(params);
    let cfg = cfg.clone().with_splits(dist.breakpoints());
    let q = integrate(
        |x| x.powi(m + 2) * (1.0 - dist.cdf(x)),
        0.0,
        params.diameter(),
        &cfg,
    )?;
    let scale = prefactor(params, m);
    Ok(MomentResult {
        m,
        value: scale * q.value,
        method: Method::QuadratureCdf,
        err_estimate: Some(scale * q.err_estimate),
    })
}

/// Sample mean of `Δ^m` over random point pairs. The estimator in `cfg` is
/// ignored; chord lengths have different moments.
pub fn moment_by_monte_carlo(
    params: &PolygonParams,
    m: i32,
    cfg: &McConfig,
) -> Result<MomentResult> {
    check_order(m)?;
    let cfg = McConfig::new(cfg.samples(), cfg.seed(), Estimator::PointPairDistance)?;
    let est = mc_estimate(params, &cfg, m);
    Ok(MomentResult {
        m,
        value: est.estimate,
        method: Method::MonteCarlo,
        err_estimate: Some(est.std_error),
    })
}

/// `M_2 = (r²/3)(2 + cos(2π/n))`.
pub fn moment2_closed(params: &PolygonParams) -> f64 {
    let t = 2.0 * PI / params.n() as f64;
    params.r().powi(2) / 3.0 * (2.0 + t.cos())
}

/// `M_4 = (r⁴/90)(77 + 64cos(2π/n) + 9cos(4π/n))`.
pub fn moment4_closed(params: &PolygonParams) -> f64 {
    let t = 2.0 * PI / params.n() as f64;
    params.r().powi(4) / 90.0 * (77.0 + 64.0 * t.cos() + 9.0 * (2.0 * t).cos())
}

/// `Var[Δ] = M_2 − M_1²`.
pub fn variance(params: &PolygonParams) -> Result<f64> {
    let m1 = moment(params, 1)?.value;
    Ok(moment2_closed(params) - m1 * m1)
}

/// Polar second moment of area about the centre,
/// `I_p = (nr⁴/6)·cos(π/n)·sin(π/n)·(2 + cos(2π/n))`. Note `M_2 = 2I_p/A`.
pub fn polar_moment(params: &PolygonParams) -> f64 {
    let a = params.alpha();
    params.n() as f64 * params.r().powi(4) / 6.0 * a.cos() * a.sin() * (2.0 + (2.0 * a).cos())
}

/// Chord power integral `S_m = ∫ σ^m dG = m(m−1)/2 · A² · M_{m−3}` for `m ≥ 2`.
pub fn chord_power_integral(params: &PolygonParams, m: i32) -> Result<f64> {
    if !(2..=MAX_ORDER + 3).contains(&m) {
        return Err(Error::OrderOutOfRange {
            order: m,
            min: 2,
            max: MAX_ORDER + 3,
        });
    }
    let mm = (m * (m - 1)) as f64 / 2.0;
    Ok(mm * params.area().powi(2) * moment(params, m - 3)?.value)
}
