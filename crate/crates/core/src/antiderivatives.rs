//! Closed-form primitives of
//!
//! * `ψ(x) = x^μ / √(x² − a²)`,
//! * `σ(x) = x^μ · arcsin(a/x)`,
//! * `τ(x) = x^μ · √(x² − a²)`,
//!
//! for integer `μ`, on `x ≥ a`. Every branch formula of the chord length
//! distribution, the distance density and the moments is integrated through
//! these three functions.
//!
//! The public functions validate their arguments and evaluate in `f64`. The
//! crate-internal `*_delta` functions return `F(x1) − F(x0)` evaluated in
//! double-double so that differences over short intervals keep their digits.

use crate::dd::{Dd, Real};
use crate::error::{Error, Result};

/// Relative amount by which `x` may undershoot `a` before it is a domain error.
/// Breakpoints hit `x = a` exactly in exact arithmetic but not in binary64.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// `k!!` with `0!! = 1`, using checked arithmetic.
pub fn double_factorial(k: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    let mut i = k as u64;
    while i > 1 {
        acc = acc
            .checked_mul(i)
            .ok_or_else(|| Error::Overflow(format!("{k}!!")))?;
        i -= 2;
    }
    Ok(acc)
}

/// `γ_{μ,a}(x) = 1 + Σ_{ν=1}^{⌊(μ−1)/2⌋} (a/x)^{2ν} ∏_{j=1}^{ν} (μ+1−2j)/(μ−2j)`.
pub fn gamma_factor(mu: i32, a: f64, x: f64) -> Result<f64> {
    if mu < 1 {
        return Err(Error::Domain(format!(
            "gamma_factor needs mu >= 1, got {mu}"
        )));
    }
    check_positive_a(a)?;
    check_abscissa(a, x)?;
    Ok(gamma_generic(mu, a, x))
}

/// Primitive of `x^μ / √(x² − a²)` for `μ ≥ −1`, `a > 0`, `x ≥ a`.
pub fn psi_tilde(mu: i32, a: f64, x: f64) -> Result<f64> {
    check_order(mu, -1)?;
    check_positive_a(a)?;
    check_abscissa(a, x)?;
    Ok(psi_generic(mu, a, x))
}

/// Primitive of `x^μ · arcsin(a/x)` for `μ ≥ 0`, `a ≥ 0`; identically zero for `a = 0`.
pub fn sigma_tilde(mu: i32, a: f64, x: f64) -> Result<f64> {
    check_order(mu, 0)?;
    check_nonnegative_a(a)?;
    if a > 0.0 {
        check_abscissa(a, x)?;
    }
    Ok(sigma_generic(mu, a, x))
}

/// Primitive of `x^μ · √(x² − a²)` for `μ ≥ −1`, `a ≥ 0`.
pub fn tau_tilde(mu: i32, a: f64, x: f64) -> Result<f64> {
    check_order(mu, -1)?;
    check_nonnegative_a(a)?;
    if a > 0.0 {
        check_abscissa(a, x)?;
    }
    Ok(tau_generic(mu, a, x))
}

fn check_order(mu: i32, min: i32) -> Result<()> {
    if mu < min {
        Err(Error::OrderOutOfRange {
            order: mu,
            min,
            max: i32::MAX,
        })
    } else {
        Ok(())
    }
}

fn check_positive_a(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("need a > 0, got {a}")))
    }
}

fn check_nonnegative_a(a: f64) -> Result<()> {
    if a.is_finite() && a >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("need a >= 0, got {a}")))
    }
}

fn check_abscissa(a: f64, x: f64) -> Result<()> {
    if x.is_finite() && x >= a * (1.0 - CLAMP_TOLERANCE) {
        Ok(())
    } else {
        Err(Error::Domain(format!("need x >= a, got x = {x}, a = {a}")))
    }
}

/// `(μ−1)!!/μ!!` as a running product, so large `μ` never overflows.
fn double_factorial_ratio<T: Real>(mu: i32) -> T {
    let mut ratio = T::from_f64(1.0);
    let mut i = mu;
    while i > 1 {
        ratio = ratio * T::from_f64((i - 1) as f64) / T::from_f64(i as f64);
        i -= 2;
    }
    ratio
}

pub(crate) fn gamma_generic<T: Real>(mu: i32, a: T, x: T) -> T {
    let ratio_sq = (a / x) * (a / x);
    let mut sum = T::from_f64(1.0);
    let mut term = T::from_f64(1.0);
    for nu in 1..=(mu - 1) / 2 {
        term = term * ratio_sq * T::from_f64((mu + 1 - 2 * nu) as f64)
            / T::from_f64((mu - 2 * nu) as f64);
        sum = sum + term;
    }
    sum
}

/// `ln((x + √(x² − a²))/a)`, the `μ = 0` primitive.
fn log_term<T: Real>(a: T, x: T) -> T {
    ((x + T::radical(a, x)) / a).ln()
}

pub(crate) fn psi_generic<T: Real>(mu: i32, a: T, x: T) -> T {
    match mu {
        -1 => -T::asin_ratio(a, x) / a,
        0 => log_term(a, x),
        _ => {
            let rad = T::radical(a, x);
            let mut value =
                x.powi(mu as u32 - 1) * rad * gamma_generic(mu, a, x) / T::from_f64(mu as f64);
            if mu % 2 == 0 {
                value =
                    value + double_factorial_ratio::<T>(mu) * a.powi(mu as u32) * log_term(a, x);
            }
            value
        }
    }
}

pub(crate) fn sigma_generic<T: Real>(mu: i32, a: T, x: T) -> T {
    if a.is_zero() {
        return T::zero();
    }
    let e = (mu + 1) as u32;
    (x.powi(e) * T::asin_ratio(a, x) + a * psi_generic(mu, a, x)) / T::from_f64(e as f64)
}

pub(crate) fn tau_generic<T: Real>(mu: i32, a: T, x: T) -> T {
    let e = mu + 2;
    if a.is_zero() {
        return x.powi(e as u32) / T::from_f64(e as f64);
    }
    (x.powi((mu + 1) as u32) * T::radical(a, x) - a * a * psi_generic(mu, a, x))
        / T::from_f64(e as f64)
}

fn delta<F>(f: F, x0: f64, x1: f64) -> f64
where
    F: Fn(Dd) -> Dd,
{
    (f(Dd::from_f64(x1)) - f(Dd::from_f64(x0))).to_f64()
}

/// `σ̃_{μ,a}(x1) − σ̃_{μ,a}(x0)`; callers guarantee `a ≤ x0 ≤ x1` up to clamping.
pub(crate) fn sigma_delta(mu: i32, a: f64, x0: f64, x1: f64) -> f64 {
    let a = Dd::from_f64(a);
    delta(|x| sigma_generic(mu, a, x), x0, x1)
}

pub(crate) fn tau_delta(mu: i32, a: f64, x0: f64, x1: f64) -> f64 {
    let a = Dd::from_f64(a);
    delta(|x| tau_generic(mu, a, x), x0, x1)
}

/// `(x1^e − x0^e)/e` for `e ≥ 1`.
pub(crate) fn power_delta(e: u32, x0: f64, x1: f64) -> f64 {
    let div = Dd::from_f64(e as f64);
    delta(|x| x.powi(e) / div, x0, x1)
}

pub(crate) fn log_delta(x0: f64, x1: f64) -> f64 {
    delta(|x| x.ln(), x0, x1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::quadrature::{integrate, QuadConfig};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    fn central_difference(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-5 * x;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(0), Ok(1));
        assert_eq!(double_factorial(1), Ok(1));
        assert_eq!(double_factorial(5), Ok(15));
        assert_eq!(double_factorial(6), Ok(48));
        assert_eq!(double_factorial(30), Ok(42_849_873_690_624_000));
        assert!(matches!(double_factorial(40), Err(Error::Overflow(_))));
    }

    #[test]
    fn gamma_factor_values() {
        assert_eq!(gamma_factor(1, 1.0, 3.0), Ok(1.0));
        assert_eq!(gamma_factor(2, 0.5, 3.0), Ok(1.0));
        // ν = 1 term: (1/2)² · (3+1−2)/(3−2) = 1/2
        assert_relative_eq!(
            gamma_factor(3, 1.0, 2.0).unwrap(),
            1.5,
            max_relative = 1e-15
        );
        // ψ̃₅ = (3x⁴ + 4a²x² + 8a⁴)√(x²−a²)/15 = x⁴√(x²−a²)γ/5 ⇒ γ(1,1) = 15/3
        assert_relative_eq!(
            gamma_factor(5, 1.0, 1.0).unwrap(),
            5.0,
            max_relative = 1e-15
        );
        assert!(gamma_factor(0, 1.0, 2.0).is_err());
    }

    #[test]
    fn psi_values() {
        assert_relative_eq!(
            psi_tilde(-1, 1.0, 2.0).unwrap(),
            -FRAC_PI_6,
            max_relative = 1e-15
        );
        assert_relative_eq!(psi_tilde(1, 3.0, 5.0).unwrap(), 4.0, max_relative = 1e-15);
        let s3 = 3f64.sqrt();
        let expected = (11.0 * s3 + 1.5 * (2.0 + s3).ln()) / 4.0;
        assert_relative_eq!(
            psi_tilde(4, 1.0, 2.0).unwrap(),
            expected,
            max_relative = 1e-15
        );
        assert_eq!(psi_tilde(0, 2.0, 2.0), Ok(0.0));
    }

    #[test]
    fn psi_domain_errors() {
        assert!(matches!(psi_tilde(2, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(psi_tilde(2, 1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(
            psi_tilde(-2, 1.0, 2.0),
            Err(Error::OrderOutOfRange { .. })
        ));
        // Undershoot within the clamp is accepted and treated as x = a.
        let v = psi_tilde(3, 1.0, 1.0 - 1e-14).unwrap();
        assert!(v.abs() < 1e-6);
        assert!(sigma_tilde(-1, 1.0, 2.0).is_err());
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma_tilde(7, 0.0, 3.0), Ok(0.0));
        assert_relative_eq!(
            sigma_tilde(0, 1.0, 1.0).unwrap(),
            FRAC_PI_2,
            max_relative = 1e-15
        );

        let cfg = QuadConfig::new(1e-14, 1e-13);
        let area = integrate(|x| x.powi(4) * (1.0 / x).asin(), 1.0, 2.0, &cfg).unwrap();
        let closed = sigma_tilde(4, 1.0, 2.0).unwrap() - sigma_tilde(4, 1.0, 1.0).unwrap();
        assert_relative_eq!(closed, area.value, max_relative = 1e-10);
    }

    #[test]
    fn tau_values() {
        assert_eq!(tau_tilde(2, 0.0, 2.0), Ok(4.0));
        assert_relative_eq!(
            tau_tilde(-1, 1.0, 1.0).unwrap(),
            FRAC_PI_2,
            max_relative = 1e-15
        );
        let r8 = 8f64.sqrt();
        let corollary = (3.0 * 17.0 * r8 - (3.0 + r8).ln()) / 8.0;
        assert_relative_eq!(
            tau_tilde(2, 1.0, 3.0).unwrap(),
            corollary,
            max_relative = 1e-14
        );
    }

    #[test]
    fn sigma_four_matches_corollary_form() {
        for &(a, x) in &[(1.0, 2.0), (0.3, 0.9), (2.0, 2.5)] {
            let r = (x * x - a * a).sqrt();
            let explicit = (8.0 * x.powi(5) * (a / x).asin()
                + a * x * (2.0 * x * x + 3.0 * a * a) * r
                + 3.0 * a.powi(5) * ((x + r) / a).ln())
                / 40.0;
            assert_relative_eq!(
                sigma_tilde(4, a, x).unwrap(),
                explicit,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn deltas_agree_with_plain_differences() {
        for mu in -1..=8 {
            let (a, x0, x1) = (0.7, 0.9, 1.6);
            let plain = tau_tilde(mu, a, x1).unwrap() - tau_tilde(mu, a, x0).unwrap();
            assert_relative_eq!(tau_delta(mu, a, x0, x1), plain, max_relative = 1e-13);
            if mu >= 0 {
                let plain = sigma_tilde(mu, a, x1).unwrap() - sigma_tilde(mu, a, x0).unwrap();
                assert_relative_eq!(sigma_delta(mu, a, x0, x1), plain, max_relative = 1e-13);
            }
        }
        assert_relative_eq!(power_delta(3, 1.0, 2.0), 7.0 / 3.0, max_relative = 1e-16);
        assert_relative_eq!(
            log_delta(1.0, 2.0),
            std::f64::consts::LN_2,
            max_relative = 1e-16
        );
    }

    #[test]
    fn delta_keeps_digits_on_short_intervals() {
        // ∫_{1}^{1+δ} x⁶ √(x²−1) dx ≈ (2δ)^{3/2}/3 for small δ; the plain
        // difference of two O(1) values cannot resolve it, the delta can.
        let delta_x = 1e-9;
        let d = tau_delta(6, 1.0, 1.0, 1.0 + delta_x);
        let leading = (2.0 * delta_x).powf(1.5) / 3.0;
        assert_relative_eq!(d, leading, max_relative = 1e-7);
    }

    fn psi_examples(mu: i32, a: f64, x: f64) -> f64 {
        let r = (x * x - a * a).sqrt();
        let l = ((x + r) / a).ln();
        match mu {
            1 => r,
            2 => 0.5 * (x * r + a * a * l),
            3 => (x * x + 2.0 * a * a) * r / 3.0,
            4 => (x * (2.0 * x * x + 3.0 * a * a) * r + 3.0 * a.powi(4) * l) / 8.0,
            5 => (3.0 * x.powi(4) + 4.0 * a * a * x * x + 8.0 * a.powi(4)) * r / 15.0,
            6 => {
                (x * (8.0 * x.powi(4) + 10.0 * a * a * x * x + 15.0 * a.powi(4)) * r
                    + 15.0 * a.powi(6) * l)
                    / 48.0
            }
            _ => unreachable!(),
        }
    }

    proptest! {
        #[test]
        fn psi_matches_worked_examples(mu in 1i32..=6, a in 0.01f64..2.0, t in 1.0f64..5.0) {
            let x = a * t;
            let got = psi_tilde(mu, a, x).unwrap();
            let want = psi_examples(mu, a, x);
            prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} vs {want}");
        }

        #[test]
        fn finite_difference_derivatives(mu in -1i32..=8, a in 0.01f64..=2.0, u in 0.0f64..1.0) {
            let lo = a * 1.01;
            let x = lo + u * (a + 5.0 - lo);
            let rad = (x * x - a * a).sqrt();

            let want = x.powi(mu) / rad;
            let got = central_difference(|s| psi_tilde(mu, a, s).unwrap(), x);
            prop_assert!((got / want - 1.0).abs() < 1e-6, "psi mu={mu}: {got} vs {want}");

            let want = x.powi(mu) * rad;
            let got = central_difference(|s| tau_tilde(mu, a, s).unwrap(), x);
            prop_assert!((got / want - 1.0).abs() < 1e-6, "tau mu={mu}: {got} vs {want}");

            if mu >= 0 {
                let want = x.powi(mu) * (a / x).asin();
                let got = central_difference(|s| sigma_tilde(mu, a, s).unwrap(), x);
                prop_assert!((got / want - 1.0).abs() < 1e-6, "sigma mu={mu}: {got} vs {want}");
            }
        }

        #[test]
        fn small_a_limit(mu in 0i32..=8, x in 0.5f64..3.0) {
            let tiny = 1e-8;
            let tau0 = tau_tilde(mu, 0.0, x).unwrap();
            prop_assert!((tau_tilde(mu, tiny, x).unwrap() - tau0).abs() <= 1e-6 * tau0.abs().max(1.0));
            prop_assert!(sigma_tilde(mu, tiny, x).unwrap().abs() <= 1e-6 * tau0.abs().max(1.0));
        }
    }
}
