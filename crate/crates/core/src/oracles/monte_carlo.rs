//! Monte Carlo estimators for the point-pair distance `Δ` and the isotropic
//! uniform random (IUR) chord length `Λ`.
//!
//! Samples are drawn in shards of [`SHARD_SIZE`]. Shard `i` uses a
//! `ChaCha8Rng` seeded with the configured seed and switched to stream `i`,
//! and shard results are merged in shard order, so an estimate depends only on
//! `(seed, samples, estimator)` and never on the number of worker threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, PolygonParams};

pub const GENERATOR: &str = "ChaCha8Rng";
pub const SHARD_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    PointPairDistance,
    IurChordLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    samples: u64,
    seed: u64,
    estimator: Estimator,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64, estimator: Estimator) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Domain(
                "Monte Carlo needs at least one sample".into(),
            ));
        }
        Ok(Self {
            samples,
            seed,
            estimator,
        })
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    pub fn shard_count(&self) -> u64 {
        self.samples.div_ceil(SHARD_SIZE)
    }

    /// Human-readable description of the generator and shard plan, for output
    /// metadata.
    pub fn shard_plan(&self) -> String {
        format!(
            "{GENERATOR} seed_from_u64({}) stream=shard_index shard_size={SHARD_SIZE} shards={}",
            self.seed,
            self.shard_count()
        )
    }

    fn shard_rng(&self, shard: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(shard);
        rng
    }

    fn shard_len(&self, shard: u64) -> u64 {
        SHARD_SIZE.min(self.samples - shard * SHARD_SIZE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    /// Fraction of proposed lines that hit the polygon (chord estimator only).
    pub acceptance_rate: Option<f64>,
}

/// Precomputed polygon data for the samplers.
#[derive(Debug, Clone)]
pub struct PolygonSampler {
    vertices: Vec<Point>,
    normals: Vec<Point>,
    apothem: f64,
    r: f64,
}

impl PolygonSampler {
    pub fn new(params: &PolygonParams) -> Self {
        let alpha = params.alpha();
        let normals = (0..params.n())
            .map(|k| {
                let phi = (2 * k + 1) as f64 * alpha;
                Point::new(phi.cos(), phi.sin())
            })
            .collect();
        Self {
            vertices: params.vertices(),
            normals,
            apothem: params.r() * alpha.cos(),
            r: params.r(),
        }
    }

    /// Uniform point: pick one of the `n` congruent fan triangles
    /// `(O, X_k, X_{k+1})`, then fold a uniform point of the unit square into it.
    pub fn point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let n = self.vertices.len();
        let k = rng.random_range(0..n);
        let (a, b) = (self.vertices[k], self.vertices[(k + 1) % n]);
        let (mut s, mut t): (f64, f64) = (rng.random(), rng.random());
        if s + t > 1.0 {
            s = 1.0 - s;
            t = 1.0 - t;
        }
        Point::new(s * a.x + t * b.x, s * a.y + t * b.y)
    }

    /// Length of the chord cut from the line `x cos φ + y sin φ = p`, or
    /// `None` if the line misses the polygon. The line is clipped against
    /// every edge half-plane; convexity leaves at most one segment.
    pub fn chord_length(&self, p: f64, phi: f64) -> Option<f64> {
        let (sin, cos) = phi.sin_cos();
        let foot = Point::new(p * cos, p * sin);
        let dir = Point::new(-sin, cos);
        let mut t_min = f64::NEG_INFINITY;
        let mut t_max = f64::INFINITY;
        for nrm in &self.normals {
            let offset = self.apothem - (nrm.x * foot.x + nrm.y * foot.y);
            let slope = nrm.x * dir.x + nrm.y * dir.y;
            if slope > 0.0 {
                t_max = t_max.min(offset / slope);
            } else if slope < 0.0 {
                t_min = t_min.max(offset / slope);
            } else if offset < 0.0 {
                return None;
            }
        }
        (t_max > t_min).then_some(t_max - t_min)
    }

    /// Draws `(p, φ)` uniformly from `[0, r] × [0, 2π)` until the line hits
    /// the polygon. Returns the chord length and the number of proposals.
    pub fn chord<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, u64) {
        let mut proposals = 0;
        loop {
            proposals += 1;
            let p = self.r * rng.random::<f64>();
            let phi = TAU * rng.random::<f64>();
            if let Some(len) = self.chord_length(p, phi) {
                return (len, proposals);
            }
        }
    }

    fn point_in_polygon<R: Rng + ?Sized>(&self, params: &PolygonParams, rng: &mut R) -> Point {
        loop {
            let pt = self.point(rng);
            if params.contains(pt) {
                return pt;
            }
        }
    }

    fn draw<R: Rng + ?Sized>(
        &self,
        params: &PolygonParams,
        estimator: Estimator,
        rng: &mut R,
    ) -> (f64, u64) {
        match estimator {
            Estimator::PointPairDistance => {
                let a = self.point_in_polygon(params, rng);
                let b = self.point_in_polygon(params, rng);
                (a.distance(b), 1)
            }
            Estimator::IurChordLength => self.chord(rng),
        }
    }
}

/// One uniform point of the polygon, re-checked with
/// [`PolygonParams::contains`].
pub fn sample_point<R: Rng + ?Sized>(params: &PolygonParams, rng: &mut R) -> Point {
    PolygonSampler::new(params).point_in_polygon(params, rng)
}

#[derive(Debug, Clone, Copy, Default)]
struct Running {
    count: u64,
    mean: f64,
    m2: f64,
    proposals: u64,
}

impl Running {
    fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    fn merge(self, other: Running) -> Running {
        if self.count == 0 {
            return Running {
                proposals: self.proposals + other.proposals,
                ..other
            };
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let weight = other.count as f64 / count as f64;
        Running {
            count,
            mean: self.mean + delta * weight,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * weight,
            proposals: self.proposals + other.proposals,
        }
    }
}

fn per_shard<T, F>(cfg: &McConfig, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    (0..cfg.shard_count())
        .into_par_iter()
        .map(|shard| work(&mut cfg.shard_rng(shard), cfg.shard_len(shard)))
        .collect()
}

/// Sample mean of `Δ^m` or `Λ^m` with its standard error.
pub fn mc_estimate(params: &PolygonParams, cfg: &McConfig, m: i32) -> McEstimate {
    let sampler = PolygonSampler::new(params);
    let total = per_shard(cfg, |rng, len| {
        let mut acc = Running::default();
        for _ in 0..len {
            let (value, proposals) = sampler.draw(params, cfg.estimator, rng);
            acc.push(value.powi(m));
            acc.proposals += proposals;
        }
        acc
    })
    .into_iter()
    .fold(Running::default(), Running::merge);

    let std_error = if total.count > 1 {
        (total.m2 / (total.count - 1) as f64).sqrt() / (total.count as f64).sqrt()
    } else {
        0.0
    };
    McEstimate {
        estimate: total.mean,
        std_error,
        samples: total.count,
        acceptance_rate: (cfg.estimator == Estimator::IurChordLength)
            .then(|| total.count as f64 / total.proposals as f64),
    }
}

/// Raw samples in shard order, e.g. for empirical CDFs and histograms.
pub fn sample_values(params: &PolygonParams, cfg: &McConfig) -> Vec<f64> {
    let sampler = PolygonSampler::new(params);
    per_shard(cfg, |rng, len| {
        (0..len)
            .map(|_| sampler.draw(params, cfg.estimator, rng).0)
            .collect::<Vec<_>>()
    })
    .concat()
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Pearson's χ² statistic of `samples` against bin probabilities `probs` on
/// the cells `edges[i]..edges[i+1]`. Adjacent cells are pooled until each
/// expects at least five counts. Returns the statistic and its degrees of
/// freedom (pooled cells minus one).
pub fn chi_square(samples: &[f64], edges: &[f64], probs: &[f64]) -> (f64, usize) {
    assert_eq!(edges.len(), probs.len() + 1, "one probability per cell");
    let mut counts = vec![0u64; probs.len()];
    for &x in samples {
        let cell = edges.partition_point(|&e| e <= x);
        if (1..edges.len()).contains(&cell) {
            counts[cell - 1] += 1;
        }
    }
    let total = samples.len() as f64;
    let mut cells = Vec::new();
    let (mut observed, mut expected) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        observed += c as f64;
        expected += p * total;
        if expected >= 5.0 {
            cells.push((observed, expected));
            (observed, expected) = (0.0, 0.0);
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += observed;
        last.1 += expected;
    }
    let stat = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    (stat, cells.len().saturating_sub(1))
}

/// Dvoretzky–Kiefer–Wolfowitz scale `√(ln 2 / (2N))`.
pub fn dkw_scale(samples: usize) -> f64 {
    (std::f64::consts::LN_2 / (2.0 * samples as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PolygonSpec;

    fn params(n: u32) -> PolygonParams {
        PolygonSpec::new(n, 1.0).unwrap().derive().unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(0, 1, Estimator::PointPairDistance).is_err());
        let cfg = McConfig::new(SHARD_SIZE + 1, 7, Estimator::IurChordLength).unwrap();
        assert_eq!(cfg.shard_count(), 2);
        assert_eq!(cfg.shard_len(1), 1);
        assert!(cfg.shard_plan().contains("ChaCha8Rng"));
    }

    #[test]
    fn points_are_inside_and_centred() {
        let p = params(5);
        let sampler = PolygonSampler::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let (mut sx, mut sy, mut sr2, mut sr4) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let q = sampler.point(&mut rng);
            assert!(p.contains(q));
            let r2 = q.x * q.x + q.y * q.y;
            sx += q.x;
            sy += q.y;
            sr2 += r2;
            sr4 += r2 * r2;
        }
        let n = n as f64;
        // Coordinate variance is I_p/(2A) per axis.
        let ip_over_a = crate::moments::polar_moment(&p) / p.area();
        let axis_se = (ip_over_a / 2.0 / n).sqrt();
        assert!((sx / n).abs() < 4.0 * axis_se);
        assert!((sy / n).abs() < 4.0 * axis_se);
        let mean_r2 = sr2 / n;
        let se_r2 = ((sr4 / n - mean_r2 * mean_r2) / n).sqrt();
        assert!((mean_r2 - ip_over_a).abs() < 4.0 * se_r2);
    }

    #[test]
    fn chord_clipping_matches_geometry() {
        let sq = params(4);
        let s = PolygonSampler::new(&sq);
        // Square with vertices on the axes; the horizontal line through the
        // centre is a diagonal of length 2.
        let len = s.chord_length(0.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((len - 2.0).abs() < 1e-12);
        // Line x = 0.5 cuts a chord of length 1.
        assert!((s.chord_length(0.5, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(s.chord_length(0.99, 0.0).is_some());
        assert!(s.chord_length(0.8, std::f64::consts::FRAC_PI_4).is_none());
    }

    #[test]
    fn zeroth_moment_is_exact() {
        let p = params(7);
        for est in [Estimator::PointPairDistance, Estimator::IurChordLength] {
            let cfg = McConfig::new(100_000, 11, est).unwrap();
            let e = mc_estimate(&p, &cfg, 0);
            assert_eq!(e.estimate, 1.0);
            assert_eq!(e.std_error, 0.0);
        }
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let p = params(6);
        let cfg = McConfig::new(150_000, 42, Estimator::IurChordLength).unwrap();
        let a = mc_estimate(&p, &cfg, 1);
        let b = mc_estimate(&p, &cfg, 1);
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool.install(|| mc_estimate(&p, &cfg, 1));
        assert_eq!(a.estimate.to_bits(), c.estimate.to_bits());
    }

    #[test]
    fn chord_acceptance_rate_and_mean() {
        // Acceptance = mean support function / r = n sin α / π.
        for n in [3, 4, 9] {
            let p = params(n);
            let cfg = McConfig::new(400_000, 5, Estimator::IurChordLength).unwrap();
            let e = mc_estimate(&p, &cfg, 1);
            let rate = e.acceptance_rate.unwrap();
            let expected_rate = n as f64 * p.alpha().sin() / std::f64::consts::PI;
            assert!(rate > 0.5);
            assert!(
                (rate - expected_rate).abs() < 0.005,
                "n={n}: {rate} vs {expected_rate}"
            );
            let mean_chord = std::f64::consts::PI * p.area() / p.perimeter();
            assert!((e.estimate - mean_chord).abs() < 4.0 * e.std_error);
        }
    }

    #[test]
    fn ks_distance_of_exact_quantiles_is_small() {
        let mut v: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_distance(&mut v, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.0005).abs() < 1e-12);
    }
}
