//! Geometric constants of the regular polygon `P(n, r)`.
//!
//! The polygon is centred at the origin with vertex `X_k = r·e^{2ikα}`,
//! `α = π/n`. Everything the branch formulas need is computed once in
//! [`PolygonParams`] and never recomputed per abscissa.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when testing membership on the closed polygon.
const BOUNDARY_SLACK: f64 = 1e-12;

/// A point of the plane, in length units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Side count and circumradius of a regular polygon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygonSpec {
    n: u32,
    r: f64,
}

impl PolygonSpec {
    /// Validates `n ≥ 3` and `r > 0` (finite).
    pub fn new(n: u32, r: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("need n >= 3, got {n}")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidPolygon(format!("need finite r > 0, got {r}")));
        }
        Ok(Self { n, r })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn derive(self) -> Result<PolygonParams> {
        derive_params(self)
    }
}

/// All derived constants of `P(n, r)`.
///
/// `p` and `s` are only materialised where some branch formula consumes them:
/// index `k` with `1 ≤ k` and `2(k+1) < n` (so neither cotangent hits a
/// multiple of π), or `k = 0` for the triangle, where they take the
/// conventional values `p₀ = 0`, `s₀ = ½`. Other indices are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonParams {
    spec: PolygonSpec,
    alpha: f64,
    big_k: usize,
    ell: Vec<f64>,
    lambda: f64,
    perimeter: f64,
    area: f64,
    h: Vec<f64>,
    p: Vec<Option<f64>>,
    q: Vec<f64>,
    s: Vec<Option<f64>>,
}

/// Computes every constant of the polygon described by `spec`.
pub fn derive_params(spec: PolygonSpec) -> Result<PolygonParams> {
    // Re-validate: the fields are private but serde can build a spec too.
    let spec = PolygonSpec::new(spec.n, spec.r)?;
    let n = spec.n as usize;
    let r = spec.r;
    let alpha = PI / n as f64;
    let big_k = n / 2 - 1;

    let ell: Vec<f64> = (0..=big_k + 1)
        .map(|k| 2.0 * r * (k as f64 * alpha).sin())
        .collect();
    let h: Vec<f64> = (0..=big_k)
        .map(|k| 2.0 * r * (k as f64 * alpha).sin() * ((k + 1) as f64 * alpha).sin())
        .collect();
    let q: Vec<f64> = (0..=big_k)
        .map(|k| (k as f64 * alpha).tan() - ((k + 1) as f64 * alpha).tan())
        .collect();

    let mut p = vec![None; big_k + 1];
    let mut s = vec![None; big_k + 1];
    if n == 3 {
        p[0] = Some(0.0);
        s[0] = Some(0.5);
    } else {
        for k in 1..=big_k {
            if 2 * (k + 1) < n {
                let pk = cot(2.0 * k as f64 * alpha) - cot(2.0 * (k + 1) as f64 * alpha);
                p[k] = Some(pk);
                s[k] = Some(k as f64 * alpha * pk);
            }
        }
    }

    Ok(PolygonParams {
        spec,
        alpha,
        big_k,
        perimeter: n as f64 * ell[1],
        area: 0.5 * n as f64 * r * r * (2.0 * alpha).sin(),
        lambda: 2.0 * r * (alpha / 2.0).cos().powi(2),
        ell,
        h,
        p,
        q,
        s,
    })
}

pub(crate) fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

impl PolygonParams {
    pub fn spec(&self) -> PolygonSpec {
        self.spec
    }

    pub fn n(&self) -> u32 {
        self.spec.n
    }

    pub fn r(&self) -> f64 {
        self.spec.r
    }

    /// `α = π/n`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `K = ⌊n/2⌋ − 1`, the index of the last branch.
    pub fn big_k(&self) -> usize {
        self.big_k
    }

    /// Vertex-to-vertex distances `ℓ_0 = 0 < ℓ_1 < … < ℓ_{K+1} = d`.
    pub fn ell(&self) -> &[f64] {
        &self.ell
    }

    /// Distance from a vertex to the opposite side (odd `n`), `2r·cos²(α/2)`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn diameter(&self) -> f64 {
        self.ell[self.big_k + 1]
    }

    pub fn side(&self) -> f64 {
        self.ell[1]
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn is_odd(&self) -> bool {
        self.spec.n % 2 == 1
    }

    /// `h_k = 2r·sin(kα)·sin((k+1)α)` for `k = 0..=K`.
    pub fn h(&self, k: usize) -> f64 {
        self.h[k]
    }

    pub fn p(&self, k: usize) -> Option<f64> {
        self.p.get(k).copied().flatten()
    }

    /// `q_k = tan(kα) − tan((k+1)α)` for `k = 0..=K`.
    pub fn q(&self, k: usize) -> f64 {
        self.q[k]
    }

    pub fn s(&self, k: usize) -> Option<f64> {
        self.s.get(k).copied().flatten()
    }

    /// Vertex `X_k = (r·cos 2kα, r·sin 2kα)`.
    pub fn vertex(&self, k: usize) -> Result<Point> {
        let n = self.spec.n as usize;
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, len: n });
        }
        let theta = 2.0 * k as f64 * self.alpha;
        Ok(Point::new(self.r() * theta.cos(), self.r() * theta.sin()))
    }

    pub fn vertices(&self) -> Vec<Point> {
        (0..self.spec.n as usize)
            .map(|k| self.vertex(k).expect("k < n"))
            .collect()
    }

    /// Closed-polygon membership: the point lies on the inner side of every
    /// edge. Edge `k` joins `X_k` and `X_{k+1}`; its outward normal points at
    /// angle `(2k+1)α` and its distance from the origin is `r·cos α`.
    pub fn contains(&self, point: Point) -> bool {
        let apothem = self.r() * self.alpha.cos();
        let limit = apothem + BOUNDARY_SLACK * self.r();
        (0..self.spec.n).all(|k| {
            let phi = (2 * k + 1) as f64 * self.alpha;
            point.x * phi.cos() + point.y * phi.sin() <= limit
        })
    }
}
