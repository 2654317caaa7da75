//! The verification suite behind the `verify` command: every analytic result
//! is compared with an independent route (quadrature, Monte Carlo, short
//! closed forms, finite differences) and each comparison becomes a [`Check`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antiderivatives::{psi_tilde, sigma_tilde, tau_tilde};
use crate::distance_pdf::DistanceDensity;
use crate::error::Result;
use crate::geometry::{PolygonParams, PolygonSpec};
use crate::moments::{
    moment2_closed, moment4_closed, moment_by_cdf_quadrature, moment_by_pdf_quadrature, moment_of,
};
use crate::oracles::monte_carlo::{
    dkw_scale, ks_distance, mc_estimate, sample_values, Estimator, McConfig,
};
use crate::oracles::quadrature::{integrate, QuadConfig};

/// What to verify. `mc_samples = 0` skips the Monte Carlo checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub n_values: Vec<u32>,
    pub m_values: Vec<i32>,
    pub r: f64,
    pub mc_samples: u64,
    pub seed: u64,
    pub grid_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_values: (3..=12).collect(),
            m_values: (-1..=4).collect(),
            r: 1.0,
            mc_samples: 0,
            seed: 42,
            grid_points: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub n: Option<u32>,
    pub m: Option<i32>,
    /// Observed discrepancy, in the units the tolerance is stated in.
    pub discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, n: Option<u32>, m: Option<i32>, discrepancy: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_owned(),
            n,
            m,
            discrepancy,
            tolerance,
            passed: discrepancy <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Runs the suite; polygons are checked in parallel and reported in the
/// order of `cfg.n_values`.
pub fn run(cfg: &VerifyConfig) -> Result<Report> {
    let per_polygon = cfg
        .n_values
        .par_iter()
        .map(|&n| polygon_checks(PolygonSpec::new(n, cfg.r)?.derive()?, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = antiderivative_checks(cfg.seed);
    checks.extend(per_polygon.into_iter().flatten());
    Ok(Report { checks })
}

fn polygon_checks(p: PolygonParams, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let n = Some(p.n());
    let density = DistanceDensity::new(&p);
    let dist = density.chords();
    let quad = QuadConfig::new(1e-14, 1e-12).with_splits(dist.breakpoints());
    let d = p.diameter();
    let mut out = Vec::new();

    out.push(Check::new(
        "normalisation M_0 = 1",
        n,
        Some(0),
        (moment_of(dist, 0)?.value - 1.0).abs(),
        1e-10,
    ));
    for &m in &cfg.m_values {
        let exact = moment_of(dist, m)?.value;
        let pdf = moment_by_pdf_quadrature(&p, m, &quad)?.value;
        let cdf = moment_by_cdf_quadrature(&p, m, &quad)?.value;
        out.push(Check::new(
            "moment: analytic vs pdf quadrature",
            n,
            Some(m),
            rel(pdf, exact),
            1e-8,
        ));
        out.push(Check::new(
            "moment: analytic vs cdf quadrature",
            n,
            Some(m),
            rel(cdf, exact),
            1e-8,
        ));
        out.push(Check::new(
            "moment: pdf vs cdf quadrature",
            n,
            Some(m),
            rel(pdf, cdf),
            1e-8,
        ));
    }
    out.push(Check::new(
        "M_2 short formula",
        n,
        Some(2),
        rel(moment2_closed(&p), moment_of(dist, 2)?.value),
        1e-12,
    ));
    out.push(Check::new(
        "M_4 short formula",
        n,
        Some(4),
        rel(moment4_closed(&p), moment_of(dist, 4)?.value),
        1e-12,
    ));

    let mean = dist.mean_chord_by_quadrature(&quad)?.value;
    out.push(Check::new(
        "mean chord = pi A / L",
        n,
        None,
        rel(mean, dist.mean_chord()),
        1e-9,
    ));
    let mass = integrate(|x| density.pdf(x), 0.0, d, &quad)?.value;
    out.push(Check::new(
        "density integrates to 1",
        n,
        None,
        (mass - 1.0).abs(),
        1e-9,
    ));

    let cdf = dist.curve(cfg.grid_points);
    let worst_drop = cdf
        .windows(2)
        .map(|w| w[0].value - w[1].value)
        .fold(0.0, f64::max);
    out.push(Check::new(
        "F nondecreasing on grid",
        n,
        None,
        worst_drop,
        0.0,
    ));
    let worst_jump = dist
        .breakpoint_jumps()
        .into_iter()
        .map(|(_, jump)| jump.abs())
        .fold(0.0, f64::max);
    out.push(Check::new(
        "F continuous at breakpoints (one-sided limits)",
        n,
        None,
        worst_jump,
        1e-8,
    ));
    let eps = 1e-10 * d;
    let cusps = dist.cusps();
    let worst_probe = dist
        .breakpoints()
        .into_iter()
        .filter(|b| !cusps.contains(b))
        .map(|b| (dist.cdf(b + eps) - dist.cdf(b - eps)).abs())
        .fold(0.0, f64::max);
    out.push(Check::new(
        "F(b + eps) - F(b - eps) off cusps",
        n,
        None,
        worst_probe,
        1e-8,
    ));
    let boundary =
        dist.cdf(0.0).abs() + (1.0 - dist.cdf(d)).abs() + (1.0 - dist.cdf(d * (1.0 - 1e-12)));
    out.push(Check::new(
        "F(0) = 0, F(d-) = F(d) = 1",
        n,
        None,
        boundary,
        1e-8,
    ));
    let negative = density
        .curve(cfg.grid_points)
        .iter()
        .map(|s| if s.value < 0.0 { -s.value } else { 0.0 })
        .fold(0.0, f64::max);
    out.push(Check::new("g nonnegative on grid", n, None, negative, 0.0));

    if cfg.mc_samples > 0 {
        let seed = cfg.seed ^ u64::from(p.n());
        let pairs = McConfig::new(cfg.mc_samples, seed, Estimator::PointPairDistance)?;
        let est = mc_estimate(&p, &pairs, 1);
        let exact = moment_of(dist, 1)?.value;
        out.push(Check::new(
            "Monte Carlo M_1 (standard errors)",
            n,
            Some(1),
            (est.estimate - exact).abs() / est.std_error,
            4.0,
        ));
        let chords = McConfig::new(cfg.mc_samples, seed, Estimator::IurChordLength)?;
        let mut lengths = sample_values(&p, &chords);
        let ks = ks_distance(&mut lengths, |x| dist.cdf(x));
        out.push(Check::new(
            "Kolmogorov-Smirnov vs sampled chords",
            n,
            None,
            ks,
            4.0 * dkw_scale(lengths.len()),
        ));
    }
    Ok(out)
}

/// Centred differences of `ψ̃`, `σ̃`, `τ̃` against their integrands at
/// random `μ ∈ [−1, 8]`, `a ∈ (0, 2]`, `x ∈ (1.01a, a + 5]`.
fn antiderivative_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut psi, mut sigma, mut tau) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..500 {
        let mu = rng.random_range(-1..=8);
        let a = rng.random_range(0.01..=2.0);
        let x = rng.random_range(1.01 * a..=a + 5.0);
        let h = 1e-5 * x;
        let diff = |f: &dyn Fn(f64) -> f64| (f(x + h) - f(x - h)) / (2.0 * h);
        let root = (x * x - a * a).sqrt();
        let fd = diff(&|s| psi_tilde(mu, a, s).expect("valid arguments"));
        psi = psi.max(rel(fd, x.powi(mu) / root));
        let fd = diff(&|s| tau_tilde(mu, a, s).expect("valid arguments"));
        tau = tau.max(rel(fd, x.powi(mu) * root));
        if mu >= 0 {
            let fd = diff(&|s| sigma_tilde(mu, a, s).expect("valid arguments"));
            sigma = sigma.max(rel(fd, x.powi(mu) * (a / x).asin()));
        }
    }
    vec![
        Check::new("psi~ derivative", None, None, psi, 1e-6),
        Check::new("sigma~ derivative", None, None, sigma, 1e-6),
        Check::new("tau~ derivative", None, None, tau, 1e-6),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let cfg = VerifyConfig {
            n_values: vec![3, 6, 7],
            m_values: vec![-1, 1, 2],
            mc_samples: 50_000,
            grid_points: 2_000,
            ..VerifyConfig::default()
        };
        let report = run(&cfg).unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
        assert_eq!(report.checks.iter().filter(|c| c.n == Some(6)).count(), 21);
    }

    #[test]
    fn rejects_invalid_polygon() {
        let cfg = VerifyConfig {
            n_values: vec![2],
            ..VerifyConfig::default()
        };
        assert!(run(&cfg).is_err());
    }
}
