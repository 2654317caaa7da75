//! The disc of radius `r`, the `n → ∞` limit of the regular polygons.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Highest supported moment order, matching the polygon moments.
pub const MAX_ORDER: i32 = 64;

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPolygon(format!("need finite r > 0, got {r}")))
    }
}

/// Chord length distribution of the disc, `1 − √(1 − (x/2r)²)` on `[0, 2r]`.
pub fn circle_chord_cdf(r: f64, x: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(if x <= 0.0 {
        0.0
    } else if x >= 2.0 * r {
        1.0
    } else {
        let t = x / (2.0 * r);
        1.0 - ((1.0 - t) * (1.0 + t)).sqrt()
    })
}

/// Density of the distance between two uniform points in the disc,
/// `(4x/(πr²))·[arccos t − t√(1 − t²)]` with `t = x/2r`, on `[0, 2r)`.
pub fn circle_distance_pdf(r: f64, x: f64) -> Result<f64> {
    check_radius(r)?;
    if !(0.0..2.0 * r).contains(&x) {
        return Ok(0.0);
    }
    let t = x / (2.0 * r);
    let bracket = t.acos() - t * ((1.0 - t) * (1.0 + t)).sqrt();
    Ok(4.0 * x / (PI * r * r) * bracket)
}

/// `Γ(h/2)` with the `√π` of half-integer arguments left out.
fn gamma_half_reduced(h: u32) -> f64 {
    let mut value = 1.0;
    let mut arg = h;
    while arg > 2 {
        arg -= 2;
        value *= arg as f64 / 2.0;
    }
    value
}

/// `E[Δ^m]` for two uniform points in the disc:
/// `2^{m+4} r^m Γ((m+3)/2) / (√π (m+2)(m+4) Γ(m/2+2))`.
pub fn circle_moment(m: i32, r: f64) -> Result<f64> {
    check_radius(r)?;
    if !(-1..=MAX_ORDER).contains(&m) {
        return Err(Error::OrderOutOfRange {
            order: m,
            min: -1,
            max: MAX_ORDER,
        });
    }
    let (num, den) = ((m + 3) as u32, (m + 4) as u32);
    // Exactly one of the two gamma arguments is a half-integer; its √π
    // cancels the √π of the prefactor or leaves a 1/π behind.
    let pi_factor = if m % 2 == 0 { 1.0 } else { PI.recip() };
    let ratio = gamma_half_reduced(num) / gamma_half_reduced(den);
    Ok(2f64.powi(m + 4) * r.powi(m) * ratio * pi_factor / ((m + 2) * (m + 4)) as f64)
}

/// `Var[Δ] = M₂ − M₁² = [1 − (128/(45π))²]·r²`.
pub fn circle_variance(r: f64) -> Result<f64> {
    let m1 = circle_moment(1, r)?;
    Ok(circle_moment(2, r)? - m1 * m1)
}
