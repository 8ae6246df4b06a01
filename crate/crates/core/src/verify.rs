//! Independent checks on Cartesian samples: finite-difference PDE residuals, the
//! Keller-Osserman bound, the Phragmen-Lindelof harness and the scaling map.
//!
//! The Phragmen-Lindelof harness only corroborates the lemma on samples; its verdicts
//! are grid-limit estimates, not proofs.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{alpha_roots, critical_constant};
use crate::nonlinear::NonlinearProfile;
use crate::spectra::SeparableHarmonic;

/// Default finite-difference step as a fraction of `min(x_1, 1)`.
pub const STEP_FRACTION: f64 = 1e-3;
const KO_GRID: usize = 100;

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A function on the half-space with the metadata the checks need.
#[derive(Clone)]
pub struct FieldSampler {
    pub name: String,
    pub n: u32,
    pub mu: f64,
    /// Exponent of the nonlinearity when the field is meant to solve the nonlinear problem.
    pub p: Option<f64>,
    pub radial_exponent: Option<f64>,
    pub boundary_exponent: Option<f64>,
    pub branch: Option<String>,
    eval: Evaluator,
}

impl fmt::Debug for FieldSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSampler")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("mu", &self.mu)
            .field("p", &self.p)
            .field("radial_exponent", &self.radial_exponent)
            .field("boundary_exponent", &self.boundary_exponent)
            .field("branch", &self.branch)
            .finish()
    }
}

impl FieldSampler {
    pub fn new(name: impl Into<String>, n: u32, mu: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            n,
            mu,
            p: None,
            radial_exponent: None,
            boundary_exponent: None,
            branch: None,
            eval: Arc::new(f),
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_exponents(mut self, radial: f64, boundary: f64) -> Self {
        self.radial_exponent = Some(radial);
        self.boundary_exponent = Some(boundary);
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// `x_1^alpha`.
    pub fn power(n: u32, mu: f64, alpha: f64) -> Self {
        Self::new(format!("x1^{alpha}"), n, mu, move |x| x[0].powf(alpha)).with_exponents(alpha, alpha)
    }

    /// `x_1^{alpha_+} |x|^{-(n-2+2 alpha_+)}`, singular at the origin.
    pub fn point_singular(n: u32, mu: f64) -> Self {
        let (ap, _) = alpha_roots(mu);
        let e = -(n as f64 - 2.0 + 2.0 * ap);
        Self::new("x1^alpha_+ |x|^-(n-2+2alpha_+)", n, mu, move |x| x[0].powf(ap) * norm(x).powf(e))
            .with_exponents(ap + e, ap)
    }

    /// `U* = C_{p,mu} x_1^{-2/(p-1)}`, when the constant exists.
    pub fn u_star(n: u32, mu: f64, p: f64) -> Option<Self> {
        let c = critical_constant(p, mu)?;
        let k = -2.0 / (p - 1.0);
        Some(Self::new("U*", n, mu, move |x| c * x[0].powf(k)).with_p(p).with_exponents(k, k))
    }

    pub fn harmonic(h: SeparableHarmonic) -> Self {
        let (n, mu, gamma) = (h.n, h.mu, h.gamma);
        let name = format!("harmonic {}", h.kind.as_str());
        let (ap, am) = alpha_roots(mu);
        let boundary = if h.kind == crate::spectra::HarmonicKind::SingularGamma { am } else { ap };
        Self::new(name, n, mu, move |x| h.eval(x)).with_exponents(gamma, boundary)
    }

    pub fn profile(prof: NonlinearProfile) -> Self {
        let (n, mu, p, alpha) = (prof.params.n, prof.params.mu, prof.p(), prof.alpha());
        let branch = prof.branch.as_str().to_string();
        let mut s = Self::new(format!("{branch}-branch profile"), n, mu, move |x| crate::nonlinear::eval_solution(&prof, x))
            .with_p(p)
            .with_exponents(-2.0 / (p - 1.0), alpha);
        s.branch = Some(branch);
        s
    }

    /// `u_a(x) = a^{2/(p-1)} u(a x)`.
    pub fn rescaled(&self, a: f64) -> Result<Self> {
        let p = self.p.ok_or_else(|| Error::InvalidParams("rescaling needs p".into()))?;
        let inner = self.eval.clone();
        let factor = a.powf(2.0 / (p - 1.0));
        let mut s = self.clone();
        s.name = format!("{} scaled by {a}", self.name);
        s.eval = Arc::new(move |x: &[f64]| {
            let ax: Vec<f64> = x.iter().map(|c| a * c).collect();
            factor * inner(&ax)
        });
        Ok(s)
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `(-Delta_h u - mu u / x_1^2 [+ u^p]) / (|u(x)| / x_1^2)` with the second-order central stencil.
pub fn pde_residual(u: &FieldSampler, x: &[f64], h: f64, nonlinearity: bool) -> Result<f64> {
    let n = u.n as usize;
    if x.len() != n {
        return Err(Error::InvalidParams(format!("point has {} coordinates, expected {n}", x.len())));
    }
    if !(h > 0.0) || x[0] - n as f64 * h <= 0.0 {
        return Err(Error::StencilOutOfDomain { x1: x[0], h });
    }
    let center = u.eval(x);
    let mut lap = 0.0;
    let mut y = x.to_vec();
    for j in 0..n {
        y[j] = x[j] + h;
        let plus = u.eval(&y);
        y[j] = x[j] - h;
        let minus = u.eval(&y);
        y[j] = x[j];
        lap += (plus - 2.0 * center + minus) / (h * h);
    }
    let x1 = x[0];
    let mut r = -lap - u.mu * center / (x1 * x1);
    if nonlinearity {
        let p = u.p.ok_or_else(|| Error::InvalidParams(format!("{} has no nonlinearity exponent", u.name)))?;
        r += center.abs().powf(p);
    }
    Ok(r / (center.abs() / (x1 * x1)))
}

/// Residual with the default step `STEP_FRACTION * min(x_1, 1)`.
pub fn pde_residual_default(u: &FieldSampler, x: &[f64], nonlinearity: bool) -> Result<f64> {
    pde_residual(u, x, STEP_FRACTION * x[0].min(1.0), nonlinearity)
}

/// Default-step residual with the `O(h^2)` stencil error removed by combining steps `h` and `h/2`.
pub fn pde_residual_extrapolated(u: &FieldSampler, x: &[f64], nonlinearity: bool) -> Result<f64> {
    let h = STEP_FRACTION * x[0].min(1.0);
    let coarse = pde_residual(u, x, h, nonlinearity)?;
    let fine = pde_residual(u, x, 0.5 * h, nonlinearity)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Supremum of the checked quantity over the grid.
    pub constant_found: f64,
    /// Bound it is compared with (infinite when only finiteness is checked).
    pub bound: f64,
    pub grid_spec: String,
    pub worst_point: Vec<f64>,
    pub pass: bool,
}

/// Bracket of `L U - U^p` for `U = c (x_1-eps)^{-k} (R-r)^{-k}`, `k = 2/(p-1)`, without the `c^{p-1}` term.
fn ko_bracket(n: u32, mu: f64, p: f64, r_big: f64, eps: f64, x1: f64, r: f64) -> f64 {
    let a_p = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
    let b_p = 2.0 * (n as f64 - 1.0) / (p - 1.0);
    let c_p = 2.0 * (2.0 / (p - 1.0)).powi(2);
    let d = x1 - eps;
    let e = r_big - r;
    d * d * (a_p + b_p * e / r) - c_p * d * e * x1 / r + a_p * e * e + mu / (x1 * x1) * d * d * e * e
}

fn ko_grid(r_big: f64, eps: f64, points: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..points).flat_map(move |i| {
        let a = (i as f64 + 0.5) / points as f64;
        let x1 = eps + (r_big - eps) * a;
        (0..points).map(move |j| {
            let b = (j as f64 + 0.5) / points as f64;
            (x1, x1 + (r_big - x1) * b)
        })
    })
}

/// Smallest power-of-two `c` making the supersolution bracket nonpositive on a
/// `100 x 100` grid of `eps < x_1 < r < R`.
pub fn ko_supersolution_constant(n: u32, mu: f64, p: f64, r_big: f64, eps: f64) -> Result<f64> {
    if !(p > 1.0) || !(r_big > 0.0) || !(eps > 0.0 && eps < r_big) {
        return Err(Error::InvalidParams(format!("need p > 1 and 0 < eps < R (p={p}, R={r_big}, eps={eps})")));
    }
    let worst = ko_grid(r_big, eps, KO_GRID)
        .map(|(x1, r)| ko_bracket(n, mu, p, r_big, eps, x1, r))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut c: f64 = 1.0;
    for _ in 0..200 {
        if c.powf(p - 1.0) >= worst {
            return Ok(c);
        }
        c *= 2.0;
    }
    Err(Error::SearchExhausted(format!("Keller-Osserman constant (bracket maximum {worst})")))
}

/// Points of `B_{R/2}` in the half-space: `x_1` log-spaced in `[1e-4 R, R/2)`, tangential offsets in the `x_2` direction.
fn half_ball_grid(n: u32, r_big: f64, radial: usize, tangential: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(radial * tangential);
    let lo = (1e-4 * r_big).ln();
    let hi = (0.499 * r_big).ln();
    for i in 0..radial {
        let x1 = (lo + (hi - lo) * i as f64 / (radial - 1) as f64).exp();
        let room = (0.25 * r_big * r_big - x1 * x1).max(0.0).sqrt();
        for j in 0..tangential {
            let mut x = vec![0.0; n as usize];
            x[0] = x1;
            if n > 1 {
                x[1] = room * (2.0 * j as f64 / (tangential.max(2) - 1) as f64 - 1.0) * 0.999;
            }
            pts.push(x);
        }
    }
    pts
}

/// Checks `u(x) x_1^{2/(p-1)} <= C` on `B_{R/2}` with `C = c (R/2)^{-2/(p-1)}` from the supersolution.
pub fn ko_bound_check(u: &FieldSampler, n: u32, mu: f64, p: f64, r_big: f64) -> Result<BoundReport> {
    let c = ko_supersolution_constant(n, mu, p, r_big, 1e-3 * r_big)?;
    let k = 2.0 / (p - 1.0);
    let bound = c * (0.5 * r_big).powf(-k);
    let (radial, tangential) = (60, 41);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_point = Vec::new();
    for x in half_ball_grid(n, r_big, radial, tangential) {
        let v = u.eval(&x) * x[0].powf(k);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v > worst {
            worst = v;
            worst_point = x;
        }
    }
    Ok(BoundReport {
        constant_found: worst,
        bound,
        grid_spec: format!("{radial} log-spaced x1 in [1e-4 R, R/2) x {tangential} tangential offsets, R={r_big}"),
        worst_point,
        pass: worst.is_finite() && worst <= bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Holds,
    Fails,
    Inconclusive,
}

impl Trend {
    pub fn holds(&self) -> bool {
        *self == Trend::Holds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlVerdict {
    pub hypothesis_a: Trend,
    pub hypothesis_b: Trend,
    pub conclusion: Trend,
    pub hypotheses_hold: bool,
    pub conclusion_holds: bool,
    /// `x_1` levels used for the limits.
    pub levels: Vec<f64>,
    /// Level maxima of `h / x_1^{alpha_+}` on `rho < |x| < R`.
    pub ratio_a: Vec<f64>,
    /// Level maxima of the hypothesis-(b) ratio.
    pub ratio_b: Vec<f64>,
    /// Level maxima of `h / x_1^{alpha_+}` on the whole half-ball.
    pub ratio_conclusion: Vec<f64>,
}

/// Growth of level maxima: bounded if the last step does not grow.
fn boundedness(m: &[f64]) -> Trend {
    if m.iter().any(|v| !v.is_finite()) {
        return Trend::Fails;
    }
    let q1 = m[1] / m[0];
    let q2 = m[2] / m[1];
    if q2 <= 1.05 && q1 <= 1.05 {
        Trend::Holds
    } else if q1 > 1.05 && q2 > 1.05 {
        Trend::Fails
    } else {
        Trend::Inconclusive
    }
}

/// Limit of a geometric-looking sequence by Aitken's extrapolation; zero-limit test.
fn vanishing(m: &[f64]) -> Trend {
    if m.iter().any(|v| !v.is_finite()) {
        return Trend::Fails;
    }
    let (a, b, c) = (m[0], m[1], m[2]);
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Trend::Holds;
    }
    if c >= b && b >= a {
        // non-decreasing toward the boundary
        return Trend::Fails;
    }
    if !(c <= b && b <= a) {
        return Trend::Inconclusive;
    }
    let denom = (c - b) - (b - a);
    let limit = if denom.abs() > 1e-14 * scale { c - (c - b) * (c - b) / denom } else { c };
    if limit.abs() <= 1e-2 * scale {
        Trend::Holds
    } else {
        Trend::Fails
    }
}

/// Samples the hypotheses and the conclusion of the Phragmen-Lindelof estimate for `h`.
pub fn phragmen_lindelof_check(h: &FieldSampler, r_big: f64, rho: f64, tangential: usize) -> Result<PlVerdict> {
    if !(0.0 < rho && rho < r_big) {
        return Err(Error::InvalidParams(format!("need 0 < rho < R (rho={rho}, R={r_big})")));
    }
    let n = h.n as usize;
    let (ap, am) = alpha_roots(h.mu);
    let e = -(h.n as f64 - 2.0 + 2.0 * ap);
    let levels: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|f| f * r_big).collect();
    let point = |x1: f64, radius: f64| {
        let mut x = vec![0.0; n];
        x[0] = x1;
        if n > 1 {
            x[1] = (radius * radius - x1 * x1).max(0.0).sqrt();
        }
        x
    };
    let shell: Vec<f64> = (0..tangential.max(2))
        .map(|j| rho + (r_big - rho) * (j as f64 + 0.5) / tangential.max(2) as f64)
        .collect();
    let mut ratio_a = Vec::new();
    let mut ratio_b = Vec::new();
    let mut ratio_c = Vec::new();
    for &x1 in &levels {
        let a = shell
            .iter()
            .map(|&r| h.eval(&point(x1, r)) / x1.powf(ap))
            .fold(f64::NEG_INFINITY, f64::max);
        // fixed radii plus radii shrinking with x1 (approach to the origin)
        let radii: Vec<f64> = [0.5 * r_big, 0.25 * r_big, 2.0 * x1, 4.0 * x1].to_vec();
        let b = radii
            .iter()
            .map(|&r| {
                let x = point(x1, r);
                (h.eval(&x) / (x1.powf(am) + x1.powf(ap) * norm(&x).powf(e))).abs()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let c = shell
            .iter()
            .chain(radii.iter())
            .map(|&r| h.eval(&point(x1, r)) / x1.powf(ap))
            .fold(f64::NEG_INFINITY, f64::max);
        ratio_a.push(a);
        ratio_b.push(b);
        ratio_c.push(c);
    }
    let hypothesis_a = boundedness(&ratio_a);
    let hypothesis_b = vanishing(&ratio_b);
    let conclusion = boundedness(&ratio_c);
    Ok(PlVerdict {
        hypotheses_hold: hypothesis_a.holds() && hypothesis_b.holds(),
        conclusion_holds: conclusion.holds(),
        hypothesis_a,
        hypothesis_b,
        conclusion,
        levels,
        ratio_a,
        ratio_b,
        ratio_conclusion: ratio_c,
    })
}

/// Largest difference between the scaled residual of `u_a` at `x` and that of `u` at `a x`.
pub fn scaling_check(u: &FieldSampler, a: f64, points: &[Vec<f64>], nonlinearity: bool) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidParams(format!("scaling factor must be positive, got {a}")));
    }
    let ua = u.rescaled(a)?;
    let mut drift: f64 = 0.0;
    for x in points {
        let h = STEP_FRACTION * x[0];
        let ax: Vec<f64> = x.iter().map(|c| a * c).collect();
        let ra = pde_residual(&ua, x, h, nonlinearity)?;
        let r = pde_residual(u, &ax, a * h, nonlinearity)?;
        drift = drift.max((ra - r).abs());
    }
    Ok(drift)
}
