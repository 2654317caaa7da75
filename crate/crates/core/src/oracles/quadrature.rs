//! Globally adaptive Gauss–Kronrod (7/15) quadrature with mandatory split points.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], 0`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and split points for [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any one subinterval.
    pub max_depth: u32,
    /// Abscissae where the integrand changes analytic form; intervals are
    /// always split there.
    pub mandatory_splits: Vec<f64>,
}

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_depth: 40,
            mandatory_splits: Vec::new(),
        }
    }

    pub fn with_splits(mut self, splits: impl IntoIterator<Item = f64>) -> Self {
        self.mandatory_splits.extend(splits);
        self
    }

    pub fn with_max_depth(mut self, max_depth: u32) -> Self {
        self.max_depth = max_depth;
        self
    }
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self::new(1e-13, 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod_segment<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut values = [(0.0, 0.0); 7];
    for (j, &node) in XGK[..7].iter().enumerate() {
        let f1 = f(center - half * node);
        let f2 = f(center + half * node);
        values[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in values.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        a,
        b,
        value,
        err,
        depth,
    }
}

/// Integrates `f` over `[a, b]`, splitting first at every mandatory split
/// point strictly inside the interval, then bisecting the subinterval with the
/// largest error estimate until
/// `err ≤ max(abs_tol, rel_tol·|value|)`.
///
/// Fails with [`Error::Quadrature`] (carrying the best estimate) when every
/// remaining subinterval has reached `max_depth`.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::Domain(format!(
            "bad integration interval [{a}, {b}]"
        )));
    }
    if !(cfg.abs_tol > 0.0 && cfg.rel_tol > 0.0) {
        return Err(Error::Domain(
            "quadrature tolerances must be positive".into(),
        ));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            err_estimate: 0.0,
            evaluations: 0,
        });
    }

    let mut knots: Vec<f64> = cfg
        .mandatory_splits
        .iter()
        .copied()
        .filter(|&s| s > a && s < b)
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    knots.insert(0, a);
    knots.push(b);

    let mut heap: BinaryHeap<Segment> = knots
        .windows(2)
        .map(|w| kronrod_segment(&f, w[0], w[1], 0))
        .collect();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut evaluations = 15 * heap.len();

    loop {
        let value: f64 = heap.iter().chain(&frozen).map(|s| s.value).sum();
        let err: f64 = heap.iter().chain(&frozen).map(|s| s.err).sum();
        if err <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                err_estimate: err,
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::Quadrature {
                estimate: value,
                error: err,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= cfg.max_depth || mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        heap.push(kronrod_segment(&f, worst.a, mid, worst.depth + 1));
        heap.push(kronrod_segment(&f, mid, worst.b, worst.depth + 1));
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linear() {
        let r = integrate(|x| x, 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn polynomials_up_to_degree_twelve_are_exact() {
        for deg in 0..=12 {
            let r = integrate(|x| x.powi(deg), -1.0, 2.0, &QuadConfig::default()).unwrap();
            let exact = (2f64.powi(deg + 1) - (-1f64).powi(deg + 1)) / (deg + 1) as f64;
            assert!(
                (r.value - exact).abs() <= 1e-13 * exact.abs().max(1.0),
                "deg {deg}"
            );
            assert_eq!(r.evaluations, 15, "deg {deg} needed subdivision");
        }
    }

    #[test]
    fn square_root_endpoint_singularity() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &QuadConfig::new(1e-14, 1e-12)).unwrap();
        assert_relative_eq!(r.value, 2.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn mandatory_splits_resolve_kinks() {
        let f = |x: f64| (x - 0.3).abs();
        let cfg = QuadConfig::default().with_splits([0.3]);
        let r = integrate(f, 0.0, 1.0, &cfg).unwrap();
        assert_relative_eq!(r.value, 0.5 * (0.09 + 0.49), max_relative = 1e-14);
        assert_eq!(r.evaluations, 30);
    }

    #[test]
    fn depth_limit_reports_best_estimate() {
        let cfg = QuadConfig::new(1e-300, 1e-300).with_max_depth(2);
        match integrate(|x: f64| x.sqrt(), 0.0, 1.0, &cfg) {
            Err(Error::Quadrature { estimate, .. }) => assert!((estimate - 2.0 / 3.0).abs() < 1e-3),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(integrate(|x| x, 1.0, 0.0, &QuadConfig::default()).is_err());
        assert_eq!(
            integrate(|x| x, 1.0, 1.0, &QuadConfig::default())
                .unwrap()
                .value,
            0.0
        );
    }
}
