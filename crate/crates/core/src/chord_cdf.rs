//! Chord length distribution `F(x) = P(Λ ≤ x)` of isotropic uniform random
//! lines hitting the regular polygon.
//!
//! On `[ℓ_k, ℓ_{k+1})` the distribution is `F = 1 − H_k/ℓ₁`. Every `H_k` is
//! a short linear combination of the basis functions in [`Basis`], so the
//! same [`BranchFormula`] also yields the primitives of `x^j·H_k` that the
//! distance density (`j = 0`) and the moments (`j = m + 2`) are built from.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::antiderivatives::{
    log_delta, power_delta, sigma_delta, sigma_generic, tau_delta, tau_generic,
};
use crate::dd::{compensated_sum, Real};
use crate::error::{Error, Result};
use crate::geometry::{cot, PolygonParams};
use crate::oracles::quadrature::{integrate, QuadConfig, QuadResult};

/// The four analytic shapes `H_k` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchTag {
    /// First branch, `k = 0` (below `λ` when `n = 3`).
    H0,
    /// Interior branches, and the last branch of odd `n` below `λ`.
    H1,
    /// Last branch of even `n`.
    H2,
    /// Last branch of odd `n` at and above `λ`.
    H3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchId {
    pub k: usize,
    pub tag: BranchTag,
}

/// A `(x, value)` row of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    /// `1`
    Constant,
    /// `x`
    Linear,
    /// `x·arcsin(a/x)`
    ArcSine(f64),
    /// `√(x² − a²)/x`
    RootOverX(f64),
    /// `1/x`
    Reciprocal,
}

impl Basis {
    fn eval(self, x: f64) -> f64 {
        match self {
            Basis::Constant => 1.0,
            Basis::Linear => x,
            Basis::ArcSine(0.0) => 0.0,
            Basis::ArcSine(a) => x * f64::asin_ratio(a, x),
            Basis::RootOverX(0.0) => 1.0,
            Basis::RootOverX(a) => f64::radical(a, x) / x,
            Basis::Reciprocal => x.recip(),
        }
    }

    /// A primitive of `x^j` times the basis function.
    fn primitive(self, j: u32, x: f64) -> f64 {
        let j = j as i32;
        match self {
            Basis::Constant => x.powi(j + 1) / (j + 1) as f64,
            Basis::Linear => x.powi(j + 2) / (j + 2) as f64,
            Basis::ArcSine(a) => sigma_generic(j + 1, a, x),
            Basis::RootOverX(a) => tau_generic(j - 1, a, x),
            Basis::Reciprocal if j == 0 => x.ln(),
            Basis::Reciprocal => x.powi(j) / j as f64,
        }
    }

    /// `∫_{x0}^{x1} x^j·basis(x) dx`, differenced in double-double.
    fn integral(self, j: u32, x0: f64, x1: f64) -> f64 {
        match self {
            Basis::Constant => power_delta(j + 1, x0, x1),
            Basis::Linear => power_delta(j + 2, x0, x1),
            Basis::ArcSine(a) => sigma_delta(j as i32 + 1, a, x0, x1),
            Basis::RootOverX(a) => tau_delta(j as i32 - 1, a, x0, x1),
            Basis::Reciprocal if j == 0 => log_delta(x0, x1),
            Basis::Reciprocal => power_delta(j, x0, x1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub basis: Basis,
}

/// `H_k` for one branch, as `Σ coef·basis(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchFormula {
    pub id: BranchId,
    pub terms: Vec<Term>,
}

impl BranchFormula {
    fn new(k: usize, tag: BranchTag, terms: &[(f64, Basis)]) -> Self {
        Self {
            id: BranchId { k, tag },
            terms: terms
                .iter()
                .map(|&(coef, basis)| Term { coef, basis })
                .collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.coef * t.basis.eval(x)).sum()
    }

    /// A primitive of `x^j·H_k(x)`.
    pub fn primitive(&self, j: u32, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.basis.primitive(j, x))
            .sum()
    }

    /// `∫_{x0}^{x1} x^j·H_k(x) dx`.
    pub fn integral(&self, j: u32, x0: f64, x1: f64) -> f64 {
        let parts: Vec<f64> = self
            .terms
            .iter()
            .map(|t| t.coef * t.basis.integral(j, x0, x1))
            .collect();
        compensated_sum(&parts)
    }
}

/// `F` for one polygon, with all branch formulas precomputed.
#[derive(Debug, Clone)]
pub struct ChordLengthDistribution {
    params: PolygonParams,
    /// `lower[k]` holds `H_k` on `[ℓ_k, ℓ_{k+1})`, cut at `λ` where `upper` takes over.
    lower: Vec<BranchFormula>,
    /// The `H3` formula on `[λ, d)` for odd `n`.
    upper: Option<BranchFormula>,
}

impl ChordLengthDistribution {
    pub fn new(params: &PolygonParams) -> Self {
        let n = params.n() as usize;
        let big_k = params.big_k();
        let lower = (0..=big_k)
            .map(|k| {
                if k == 0 {
                    h0(params)
                } else if n.is_multiple_of(2) && k == big_k {
                    h2(params, k)
                } else {
                    h1(params, k)
                }
            })
            .collect();
        let upper = params.is_odd().then(|| h3(params, big_k));
        Self {
            params: params.clone(),
            lower,
            upper,
        }
    }

    pub fn params(&self) -> &PolygonParams {
        &self.params
    }

    /// `λ` when the last branch splits there (odd `n`), else `None`.
    pub fn split(&self) -> Option<f64> {
        self.upper.as_ref().map(|_| self.params.lambda())
    }

    /// Interior abscissae where `F` changes formula: `ℓ_1, …, ℓ_K` and, for
    /// odd `n`, `λ`. Sorted ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        let ell = self.params.ell();
        let mut points = ell[1..ell.len() - 1].to_vec();
        points.extend(self.split());
        points.sort_by(f64::total_cmp);
        points
    }

    /// For each breakpoint `b`, the difference between the right and left
    /// limits of `F` at `b`, taken by evaluating the two adjacent branch
    /// formulas at `b` itself.
    pub fn breakpoint_jumps(&self) -> Vec<(f64, f64)> {
        let ell = self.params.ell();
        let side = self.params.side();
        let mut jumps: Vec<(f64, f64)> = (1..=self.params.big_k())
            .map(|k| {
                let b = ell[k];
                (
                    b,
                    (self.lower[k - 1].eval(b) - self.lower[k].eval(b)) / side,
                )
            })
            .collect();
        if let Some(upper) = &self.upper {
            let b = self.params.lambda();
            let last = &self.lower[self.params.big_k()];
            jumps.push((b, (last.eval(b) - upper.eval(b)) / side));
        }
        jumps
    }

    /// Breakpoints where `F` has a square-root cusp: for even `n` the last
    /// branch starts at `ℓ_K = h_K`, where `√(x² − h_K²)` has unbounded slope.
    pub fn cusps(&self) -> Vec<f64> {
        let big_k = self.params.big_k();
        if self.params.is_odd() || big_k == 0 {
            Vec::new()
        } else {
            vec![self.params.ell()[big_k]]
        }
    }

    /// The branch in force at `x`, or `None` outside `[0, d)`.
    pub fn select_branch(&self, x: f64) -> Option<BranchId> {
        self.formula_at(x).map(|f| f.id)
    }

    pub fn formula(&self, id: BranchId) -> Option<&BranchFormula> {
        std::iter::once(self.lower.get(id.k))
            .chain(std::iter::once(self.upper.as_ref()))
            .flatten()
            .find(|f| f.id == id)
    }

    fn formula_at(&self, x: f64) -> Option<&BranchFormula> {
        if !(0.0..self.params.diameter()).contains(&x) {
            return None;
        }
        if let Some(upper) = &self.upper {
            if x >= self.params.lambda() {
                return Some(upper);
            }
        }
        let ell = self.params.ell();
        let k = ell[1..].partition_point(|&l| l <= x);
        Some(&self.lower[k.min(self.params.big_k())])
    }

    /// `H_k(x)` for the branch containing `x`; `ℓ₁` below 0 and 0 from `d` on.
    pub fn h(&self, x: f64) -> f64 {
        match self.formula_at(x) {
            Some(f) => f.eval(x),
            None if x < 0.0 => self.params.side(),
            None => 0.0,
        }
    }

    /// `F(x)`, clamped to `[0, 1]`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match self.formula_at(x) {
            Some(f) => (1.0 - f.eval(x) / self.params.side()).clamp(0.0, 1.0),
            None if x < 0.0 => 0.0,
            None => 1.0,
        }
    }

    /// `∫_{x0}^{x1} x^j·H_k(x) dx` for `ℓ_k ≤ x0 ≤ x1 ≤ ℓ_{k+1}`, switching
    /// formulas at `λ` when the branch straddles it.
    pub fn branch_integral(&self, j: u32, k: usize, x0: f64, x1: f64) -> Result<f64> {
        let big_k = self.params.big_k();
        if k > big_k {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: big_k + 1,
            });
        }
        let ell = self.params.ell();
        let slack = 1e-12 * self.params.diameter();
        if !(x0 >= ell[k] - slack && x0 <= x1 && x1 <= ell[k + 1] + slack) {
            return Err(Error::Domain(format!(
                "[{x0}, {x1}] is not inside branch {k} = [{}, {}]",
                ell[k],
                ell[k + 1]
            )));
        }
        let lower = &self.lower[k];
        match (&self.upper, k == big_k) {
            (Some(upper), true) => {
                let lambda = self.params.lambda();
                let mut total = 0.0;
                if x0 < lambda {
                    total += lower.integral(j, x0, x1.min(lambda));
                }
                if x1 > lambda {
                    total += upper.integral(j, x0.max(lambda), x1);
                }
                Ok(total)
            }
            _ => Ok(lower.integral(j, x0, x1)),
        }
    }

    /// Centred difference `(F(x+h) − F(x−h))/(2h)` of the chord length
    /// distribution. Refused when `[x−h, x+h]` leaves `(0, d)` or touches a
    /// breakpoint, where `F` has a kink.
    pub fn chord_pdf_numeric(&self, x: f64, h: f64) -> Result<f64> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("step must be positive, got {h}")));
        }
        let d = self.params.diameter();
        if !(x - h > 0.0 && x + h < d) {
            return Err(Error::Domain(format!(
                "x = {x} is within {h} of [0, {d}]'s ends"
            )));
        }
        if let Some(b) = self.breakpoints().into_iter().find(|b| (x - b).abs() <= h) {
            return Err(Error::Domain(format!(
                "x = {x} is within {h} of breakpoint {b}"
            )));
        }
        Ok((self.cdf(x + h) - self.cdf(x - h)) / (2.0 * h))
    }

    /// `E[Λ] = πA/L`.
    pub fn mean_chord(&self) -> f64 {
        PI * self.params.area() / self.params.perimeter()
    }

    /// `∫₀^d (1 − F)`, by adaptive quadrature split at the breakpoints.
    pub fn mean_chord_by_quadrature(&self, cfg: &QuadConfig) -> Result<QuadResult> {
        let cfg = cfg.clone().with_splits(self.breakpoints());
        integrate(|x| 1.0 - self.cdf(x), 0.0, self.params.diameter(), &cfg)
    }

    /// `F` on `points` equally spaced abscissae covering `[0, d]`.
    pub fn curve(&self, points: usize) -> Vec<CurveSample> {
        grid(self.params.diameter(), points)
            .map(|x| CurveSample {
                x,
                value: self.cdf(x),
            })
            .collect()
    }
}

/// `points` equally spaced abscissae from 0 to `end` inclusive.
pub(crate) fn grid(end: f64, points: usize) -> impl Iterator<Item = f64> {
    let steps = points.saturating_sub(1).max(1) as f64;
    (0..points).map(move |i| {
        if i + 1 == points && points > 1 {
            end
        } else {
            end * i as f64 / steps
        }
    })
}

fn h0(p: &PolygonParams) -> BranchFormula {
    let a = p.alpha();
    BranchFormula::new(
        0,
        BranchTag::H0,
        &[
            (p.side(), Basis::Constant),
            (-(1.0 + a * (a.tan() - cot(a))) / 2.0, Basis::Linear),
        ],
    )
}

fn h1(p: &PolygonParams, k: usize) -> BranchFormula {
    let (a, r) = (p.alpha(), p.r());
    let (kf, k1) = (k as f64, (k + 1) as f64);
    let hk = p.h(k);
    let pk = p.p(k).expect("p_k exists on interior branches");
    BranchFormula::new(
        k,
        BranchTag::H1,
        &[
            (pk, Basis::ArcSine(hk)),
            (
                -(kf * a * cot(2.0 * kf * a) - k1 * a * cot(2.0 * k1 * a)),
                Basis::Linear,
            ),
            (
                -(hk * pk + 2.0 * r * p.q(k) * a.cos()),
                Basis::RootOverX(hk),
            ),
        ],
    )
}

fn h2(p: &PolygonParams, k: usize) -> BranchFormula {
    let (a, r) = (p.alpha(), p.r());
    let kf = k as f64;
    let hk = p.h(k);
    let c = cot(2.0 * kf * a);
    BranchFormula::new(
        k,
        BranchTag::H2,
        &[
            (0.5 - kf * a * c, Basis::Linear),
            (c, Basis::ArcSine(hk)),
            (-(hk - 2.0 * r * a.cos()) * hk, Basis::Reciprocal),
            (
                -(hk * c + 2.0 * r * a.cos() * (kf * a).tan()),
                Basis::RootOverX(hk),
            ),
        ],
    )
}

fn h3(p: &PolygonParams, k: usize) -> BranchFormula {
    let (a, r, lambda) = (p.alpha(), p.r(), p.lambda());
    let k1 = (k + 1) as f64;
    let hk = p.h(k);
    let pk = p.p(k).expect("p_K exists for odd n");
    let sk = p.s(k).expect("s_K exists for odd n");
    let c = cot(2.0 * k1 * a);
    BranchFormula::new(
        k,
        BranchTag::H3,
        &[
            (pk, Basis::ArcSine(hk)),
            (2.0 * c, Basis::ArcSine(lambda)),
            (-((PI - a) * c + sk), Basis::Linear),
            (
                -(hk * pk + 2.0 * r * p.q(k) * a.cos()),
                Basis::RootOverX(hk),
            ),
            (
                -2.0 * a.cos()
                    * (2.0 * r * (a / 2.0).cos() / (k1 * a).cos() - lambda / (2.0 * k1 * a).sin()),
                Basis::RootOverX(lambda),
            ),
        ],
    )
}
