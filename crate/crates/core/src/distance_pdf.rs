//! Density `g` of the distance `Δ` between two independent uniform points.
//!
//! With `φ♭(x) = ∫₀ˣ H(s) ds`, where `H = ℓ₁(1 − F)` is the branchwise
//! function of the chord length distribution,
//!
//! ```text
//! g(x) = (2x/A)·[π − L·φ♭(x)/(A·ℓ₁)],   0 ≤ x < d.
//! ```
//!
//! `φ♭` is the sum of the full branch integrals below `x` (cached in
//! [`PhiPrefix`]) plus a partial integral over the branch containing `x`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chord_cdf::{grid, BranchId, ChordLengthDistribution, CurveSample};
use crate::error::{Error, Result};
use crate::geometry::PolygonParams;

/// Prefix sums of the branch integrals: `partial[k] = Σ_{ν<k} ∫_{ℓ_ν}^{ℓ_{ν+1}} H_ν`,
/// for `k = 0..=K+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiPrefix {
    pub partial: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DistanceDensity {
    chords: ChordLengthDistribution,
    prefix: PhiPrefix,
}

impl DistanceDensity {
    pub fn new(params: &PolygonParams) -> Self {
        let chords = ChordLengthDistribution::new(params);
        let ell = params.ell();
        let mut partial = Vec::with_capacity(ell.len());
        let mut acc = 0.0;
        partial.push(acc);
        for k in 0..=params.big_k() {
            acc += chords
                .branch_integral(0, k, ell[k], ell[k + 1])
                .expect("full branch is in range");
            partial.push(acc);
        }
        Self {
            chords,
            prefix: PhiPrefix { partial },
        }
    }

    pub fn params(&self) -> &PolygonParams {
        self.chords.params()
    }

    pub fn chords(&self) -> &ChordLengthDistribution {
        &self.chords
    }

    pub fn phi_prefix(&self) -> &PhiPrefix {
        &self.prefix
    }

    /// A primitive of `H_k` for the given branch, evaluated at `x`.
    pub fn h_flat(&self, branch: BranchId, x: f64) -> Result<f64> {
        let formula = self
            .chords
            .formula(branch)
            .ok_or_else(|| Error::Domain(format!("{branch:?} does not occur for this polygon")))?;
        Ok(formula.primitive(0, x))
    }

    /// `∫_{ℓ_k}^{x} H_k(s) ds` for `ℓ_k ≤ x ≤ ℓ_{k+1}`.
    pub fn j_flat(&self, k: usize, x: f64) -> Result<f64> {
        let ell = self.params().ell();
        let start = *ell.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            len: ell.len() - 1,
        })?;
        self.chords.branch_integral(0, k, start, x)
    }

    /// `φ♭(x) = ∫₀ˣ H(s) ds` on `[0, d]`; constant beyond `d`.
    pub fn phi_flat(&self, x: f64) -> f64 {
        let ell = self.params().ell();
        let d = self.params().diameter();
        if x <= 0.0 {
            return 0.0;
        }
        if x >= d {
            return *self.prefix.partial.last().expect("nonempty");
        }
        let k = ell[1..].partition_point(|&l| l <= x);
        self.prefix.partial[k] + self.j_flat(k, x).expect("x lies in branch k")
    }

    /// `g(x)`; zero outside `[0, d)`, clamped at zero against rounding.
    pub fn pdf(&self, x: f64) -> f64 {
        let p = self.params();
        if !(0.0..p.diameter()).contains(&x) {
            return 0.0;
        }
        let a = p.area();
        let bracket = PI - p.perimeter() * self.phi_flat(x) / (a * p.side());
        (2.0 * x / a * bracket).max(0.0)
    }

    /// `g` on `points` equally spaced abscissae covering `[0, d]`.
    pub fn curve(&self, points: usize) -> Vec<CurveSample> {
        grid(self.params().diameter(), points)
            .map(|x| CurveSample {
                x,
                value: self.pdf(x),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord_cdf::BranchTag;
    use crate::geometry::PolygonSpec;
    use crate::oracles::monte_carlo::{chi_square, sample_values, Estimator, McConfig};
    use crate::oracles::quadrature::{integrate, QuadConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn density(n: u32) -> DistanceDensity {
        DistanceDensity::new(&PolygonSpec::new(n, 1.0).unwrap().derive().unwrap())
    }

    fn quad(g: &DistanceDensity) -> QuadConfig {
        QuadConfig::new(1e-14, 1e-12).with_splits(g.chords().breakpoints())
    }

    #[test]
    fn prefix_is_nondecreasing_from_zero() {
        for n in 3..=30 {
            let g = density(n);
            let partial = &g.phi_prefix().partial;
            assert_eq!(partial[0], 0.0);
            assert!(partial.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn flat_primitives_at_origin() {
        let g = density(6);
        let b0 = BranchId {
            k: 0,
            tag: BranchTag::H0,
        };
        assert_eq!(g.h_flat(b0, 0.0).unwrap(), 0.0);
        let step = 1e-7;
        let slope = g.h_flat(b0, step).unwrap() / step;
        assert!((slope - g.params().side()).abs() < 1e-6);
        assert!(g
            .h_flat(
                BranchId {
                    k: 0,
                    tag: BranchTag::H3
                },
                0.5
            )
            .is_err());
        assert_eq!(g.j_flat(0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn flat_primitive_derivative_is_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 5..=12 {
            let g = density(n);
            let ell = g.params().ell().to_vec();
            for k in 1..g.params().big_k() {
                let id = BranchId {
                    k,
                    tag: BranchTag::H1,
                };
                for _ in 0..20 {
                    let x = ell[k] + (ell[k + 1] - ell[k]) * rng.random_range(0.05..0.95);
                    let h = 1e-5 * x;
                    let fd =
                        (g.h_flat(id, x + h).unwrap() - g.h_flat(id, x - h).unwrap()) / (2.0 * h);
                    let exact = g.chords().h(x);
                    assert!((fd / exact - 1.0).abs() < 1e-7, "n={n} k={k} x={x}");
                }
            }
        }
    }

    #[test]
    fn full_branch_integrals_match_quadrature() {
        for (n, k) in [(3, 0), (6, 2)] {
            let g = density(n);
            let d = g.params().diameter();
            let exact = g.j_flat(k, d).unwrap();
            let start = g.params().ell()[k];
            let q = integrate(|x| g.chords().h(x), start, d, &quad(&g)).unwrap();
            assert!((exact / q.value - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn phi_flat_matches_integrated_cdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [3, 4, 5, 8, 13] {
            let g = density(n);
            let d = g.params().diameter();
            for _ in 0..20 {
                let x = d * rng.random::<f64>();
                let cfg = quad(&g);
                let q = integrate(|s| g.chords().cdf(s), 0.0, x, &cfg).unwrap();
                let natural = x - q.value;
                let flat = g.phi_flat(x);
                assert!(
                    (flat - g.params().side() * natural).abs() <= 1e-8 * flat.abs().max(1e-12),
                    "n={n} x={x}"
                );
            }
        }
    }

    #[test]
    fn outside_support_is_zero() {
        let g = density(5);
        assert_eq!(g.pdf(-0.1), 0.0);
        assert_eq!(g.pdf(g.params().diameter()), 0.0);
        assert_eq!(g.pdf(5.0), 0.0);
    }

    #[test]
    fn normalised_with_known_mean() {
        let g = density(5);
        let d = g.params().diameter();
        let mass = integrate(|x| g.pdf(x), 0.0, d, &quad(&g)).unwrap().value;
        assert!((mass - 1.0).abs() < 1e-9);
        let mean = integrate(|x| x * g.pdf(x), 0.0, d, &quad(&g))
            .unwrap()
            .value;
        assert!((mean - 0.793_698_195_033_753_4).abs() < 1e-9);
    }

    #[test]
    fn nonnegative_on_grid() {
        for n in 3..=30 {
            let g = density(n);
            assert!(g.curve(10_000).iter().all(|s| s.value >= 0.0), "n = {n}");
        }
    }

    #[test]
    fn linear_near_origin() {
        for n in [3, 4, 7, 20] {
            let g = density(n);
            let x = 1e-6 * g.params().diameter();
            let slope = g.pdf(x) / x;
            let expected = 2.0 * PI / g.params().area();
            assert!((slope / expected - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn histogram_of_sampled_distances() {
        let critical = ChiSquared::new(49.0).unwrap().inverse_cdf(0.999);
        for n in [5, 7, 8] {
            let g = density(n);
            let cfg = McConfig::new(200_000, 100 + n as u64, Estimator::PointPairDistance).unwrap();
            let samples = sample_values(g.params(), &cfg);
            let d = g.params().diameter();
            let edges: Vec<f64> = (0..=50).map(|i| d * i as f64 / 50.0).collect();
            let probs: Vec<f64> = edges
                .windows(2)
                .map(|w| {
                    integrate(|x| g.pdf(x), w[0], w[1], &quad(&g))
                        .unwrap()
                        .value
                })
                .collect();
            let (stat, dof) = chi_square(&samples, &edges, &probs);
            let critical = if dof == 49 {
                critical
            } else {
                ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.999)
            };
            assert!(stat < critical, "n = {n}: chi2 = {stat} with {dof} dof");
        }
    }
}
