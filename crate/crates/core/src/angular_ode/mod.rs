//! The linear angular equation
//! `(1-t^2) k'' - (n-1) t k' + (mu/t^2 + Lambda - nu/(1-t^2)) k = 0` on `(0, 1)`.
//!
//! Solutions are represented by Frobenius series near the two singular
//! endpoints and by an adaptive Runge-Kutta solution in between. The
//! profiles `k_gamma`, regular on the `x_1`-axis, are obtained by starting
//! on the regular branch at `t = 1` and continuing the solution to `t = 0`.

mod frobenius;
mod integrator;
mod profile;

use serde::{Deserialize, Serialize};

pub use frobenius::{frobenius_expansion, frobenius_log_expansion, FrobeniusExpansion, LogTerm};
pub use integrator::{dopri5, DenseSolution, State};
pub use profile::{AngularProfile, EndpointRep};

use crate::error::{Error, Result};
use crate::exponents::{alpha_roots, angular_indices, lambda_of, nu_of, ProblemParams};

/// Distance from the singular endpoints where the series hand over to the integrator.
pub const HANDOFF_RADIUS: f64 = 1e-3;
pub const SERIES_ORDER: usize = 14;
/// Relative weight of the `t^{alpha_-}` component above which a profile counts as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-6;
/// Relative distance from an eigenvalue below which `Lambda(gamma)` is rejected.
pub const EIGEN_GAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearAngularODE {
    pub n: u32,
    pub mu: f64,
    pub nu: f64,
    pub lambda: f64,
}

impl LinearAngularODE {
    pub fn new(n: u32, mu: f64, nu: f64, lambda: f64) -> Self {
        Self { n, mu, nu, lambda }
    }

    pub fn for_gamma(n: u32, mu: f64, m: u32, gamma: f64) -> Self {
        Self::new(n, mu, nu_of(n, m), lambda_of(n, gamma))
    }

    #[inline]
    pub fn potential(&self, t: f64) -> f64 {
        self.mu / (t * t) + self.lambda - self.nu / (1.0 - t * t)
    }

    /// `k''` from the equation.
    #[inline]
    pub fn kdd(&self, t: f64, k: f64, kd: f64) -> f64 {
        let w = 1.0 - t * t;
        ((self.n as f64 - 1.0) * t * kd - self.potential(t) * k) / w
    }

    #[inline]
    pub fn residual(&self, t: f64, k: f64, kd: f64, kdd: f64) -> f64 {
        (1.0 - t * t) * kdd - (self.n as f64 - 1.0) * t * kd + self.potential(t) * k
    }

    /// `sigma(t) = (1-t^2)^{(n-1)/2}`.
    pub fn sigma(&self, t: f64) -> f64 {
        (1.0 - t * t).powf((self.n as f64 - 1.0) / 2.0)
    }

    pub fn rhs(&self, t: f64, y: &State) -> State {
        [y[1], self.kdd(t, y[0], y[1])]
    }
}

/// Adaptive propagation of `(k, k')` between two interior points.
pub fn integrate_interior(ode: &LinearAngularODE, t_from: f64, t_to: f64, state: State, tol: f64) -> Result<DenseSolution> {
    if !(t_from > 0.0 && t_from < 1.0 && t_to > 0.0 && t_to < 1.0) {
        return Err(Error::InvalidParams(format!(
            "integration interval [{t_from}, {t_to}] must lie inside (0, 1)"
        )));
    }
    if tol <= 0.0 {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    let near = t_from.min(1.0 - t_from);
    let h0 = 0.05 * near.min((t_to - t_from).abs());
    dopri5(|t, y| ode.rhs(t, y), t_from, t_to, state, tol, h0)
}

/// The two Frobenius bases at the origin, `(t^{alpha_-} branch, t^{alpha_+} branch)`.
pub fn origin_bases(ode: &LinearAngularODE, order: usize) -> Result<(FrobeniusExpansion, FrobeniusExpansion)> {
    let (ap, am) = alpha_roots(ode.mu);
    let plus = frobenius_expansion(ode, 0, ap, order)?;
    let minus = match frobenius_expansion(ode, 0, am, order) {
        Ok(e) => e,
        Err(Error::ResonantIndices { .. }) => frobenius_log_expansion(ode, 0, am, &plus, order)?,
        Err(e) => return Err(e),
    };
    Ok((minus, plus))
}

/// Regular branch at `t = 1` with unit leading coefficient.
pub fn axis_series(ode: &LinearAngularODE, m: u32, order: usize) -> Result<FrobeniusExpansion> {
    let idx = angular_indices(ode.n, ode.mu, m, ode.lambda);
    frobenius_expansion(ode, 1, idx.kappa_regular, order)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OriginBehavior {
    /// Coefficient of the `t^{alpha_-}` basis.
    pub a: f64,
    /// Coefficient of the `t^{alpha_+}` basis.
    pub b: f64,
    pub condition: f64,
    pub singular: bool,
}

fn fit_origin(
    ode: &LinearAngularODE,
    sample: impl Fn(f64) -> (f64, f64),
    t_min: f64,
    order: usize,
) -> Result<(OriginBehavior, FrobeniusExpansion, FrobeniusExpansion)> {
    let (minus, plus) = origin_bases(ode, order)?;
    let am = minus.exponent;
    let mut rows: Vec<([f64; 2], f64)> = Vec::new();
    let mut t = t_min;
    for _ in 0..6 {
        if minus.tail_estimate(t) > 1e-13 || plus.tail_estimate(t) > 1e-13 {
            break;
        }
        let (k, kd) = sample(t);
        let (vm, dm) = minus.eval(t);
        let (vp, dp) = plus.eval(t);
        let s = t.powf(-am);
        rows.push(([vm * s, vp * s], k * s));
        rows.push(([t * dm * s, t * dp * s], t * kd * s));
        t *= 2.0;
    }
    if rows.len() < 2 {
        return Err(Error::InvalidParams("origin series radius below the handoff point".into()));
    }
    // column scaling then normal equations
    let mut col = [0.0f64; 2];
    for (r, _) in &rows {
        col[0] += r[0] * r[0];
        col[1] += r[1] * r[1];
    }
    let col = [col[0].sqrt(), col[1].sqrt()];
    let (mut g00, mut g01, mut g11, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (r, y) in &rows {
        let (x0, x1) = (r[0] / col[0], r[1] / col[1]);
        g00 += x0 * x0;
        g01 += x0 * x1;
        g11 += x1 * x1;
        r0 += x0 * y;
        r1 += x1 * y;
    }
    let det = g00 * g11 - g01 * g01;
    let a = (g11 * r0 - g01 * r1) / det / col[0];
    let b = (g00 * r1 - g01 * r0) / det / col[1];
    let tr = g00 + g11;
    let disc = ((g00 - g11).powi(2) + 4.0 * g01 * g01).sqrt();
    let (lmax, lmin) = (0.5 * (tr + disc), (0.5 * (tr - disc)).max(1e-300));
    let condition = (lmax / lmin).sqrt();
    let singular = a.abs() > SINGULAR_THRESHOLD * (a.abs() + b.abs());
    Ok((OriginBehavior { a, b, condition, singular }, minus, plus))
}

/// Splits a profile near `t = 0` into its `t^{alpha_-}` and `t^{alpha_+}` components.
pub fn classify_origin_behavior(profile: &AngularProfile) -> Result<OriginBehavior> {
    let ode = profile
        .ode
        .ok_or_else(|| Error::InvalidParams("profile carries no linear ODE".into()))?;
    let (fit, _, _) = fit_origin(&ode, |t| profile.eval(t), profile.grid[0], SERIES_ORDER)?;
    let (ap, am) = alpha_roots(ode.mu);
    if ap - am < 0.05 {
        return Err(Error::IllConditionedFit {
            a: fit.a,
            b: fit.b,
            cond: fit.condition,
            gap: ap - am,
        });
    }
    Ok(fit)
}

/// Integrates from the axis series at `1 - delta` down to `delta` and attaches
/// the fitted origin combination.
pub(crate) fn continue_from_axis(ode: &LinearAngularODE, m: u32, tol: f64, normalization: &str) -> Result<AngularProfile> {
    let series = axis_series(ode, m, SERIES_ORDER)?;
    let t1 = 1.0 - HANDOFF_RADIUS;
    let (k, kd) = series.eval(t1);
    let sol = integrate_interior(ode, t1, HANDOFF_RADIUS, [k, kd], tol)?;
    let dense = sol.clone();
    let (fit, minus, plus) = fit_origin(ode, |t| {
        let [k, kd] = dense.eval(t);
        (k, kd)
    }, HANDOFF_RADIUS, SERIES_ORDER)?;
    let at0 = EndpointRep::Combination { a: fit.a, b: fit.b, minus, plus };
    let at1 = EndpointRep::Series { scale: 1.0, expansion: series };
    Ok(AngularProfile::from_nodes(*ode, sol.nodes, Some(at0), Some(at1), normalization))
}

/// The axis-regular profile `k_gamma` for `Lambda(gamma)` away from the spectrum.
pub fn solve_k_gamma(n: u32, mu: f64, m: u32, gamma: f64, tol: f64) -> Result<AngularProfile> {
    ProblemParams::linear(n, mu)?;
    if n == 2 && m > 0 {
        return Err(Error::InvalidParams("n = 2 admits only m = 0".into()));
    }
    if !gamma.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidParams("gamma must be finite and tol positive".into()));
    }
    let ode = LinearAngularODE::for_gamma(n, mu, m, gamma);
    let lambda = ode.lambda;
    let spectrum = crate::spectra::eigenvalues_up_to(n, mu, m, lambda * (1.0 + 2.0 * EIGEN_GAP_TOL) + EIGEN_GAP_TOL, tol.max(1e-13))?;
    for (s, ev) in spectrum.iter().enumerate() {
        if (ev - lambda).abs() <= EIGEN_GAP_TOL * ev.abs().max(1.0) {
            return Err(Error::EigenvalueCollision {
                lambda,
                eigenvalue: *ev,
                s: s + 1,
                m,
            });
        }
    }
    let norm = if m == 0 {
        "k(1) = 1"
    } else {
        "unit leading coefficient of the (1-t)^kappa branch at t = 1"
    };
    continue_from_axis(&ode, m, tol, norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagates_exact_power() {
        for (n, mu) in [(3, 0.1875), (4, -2.0), (2, 0.0)] {
            let (ap, _) = alpha_roots(mu);
            let ode = LinearAngularODE::new(n, mu, 0.0, lambda_of(n, ap));
            let tol = 1e-10;
            let t0: f64 = 0.1;
            let sol = integrate_interior(&ode, t0, 0.9, [t0.powf(ap), ap * t0.powf(ap - 1.0)], tol).unwrap();
            let exact = 0.9f64.powf(ap);
            assert!((sol.final_state()[0] - exact).abs() <= 10.0 * tol * exact, "n={n} mu={mu}");
        }
    }

    #[test]
    fn chebyshev_backward() {
        let g: f64 = 0.7;
        let ode = LinearAngularODE::new(2, 0.0, 0.0, g * g);
        let f = |t: f64| (g * t.acos()).cos();
        let df = |t: f64| g * (g * t.acos()).sin() / (1.0 - t * t).sqrt();
        let tol = 1e-10;
        let sol = integrate_interior(&ode, 0.9, 0.2, [f(0.9), df(0.9)], tol).unwrap();
        assert!((sol.final_state()[0] - f(0.2)).abs() < 10.0 * tol);
        assert!((sol.eval(0.5)[0] - f(0.5)).abs() < 10.0 * tol);
    }

    #[test]
    fn linearity() {
        let ode = LinearAngularODE::new(4, -1.0, 2.0, 3.3);
        let tol = 1e-11;
        let a = [1.0, -0.5];
        let b = [0.3, 2.0];
        let sa = integrate_interior(&ode, 0.3, 0.8, a, tol).unwrap().final_state();
        let sb = integrate_interior(&ode, 0.3, 0.8, b, tol).unwrap().final_state();
        let sab = integrate_interior(&ode, 0.3, 0.8, [a[0] + b[0], a[1] + b[1]], tol).unwrap().final_state();
        let scale = sab[0].abs().max(sab[1].abs());
        for i in 0..2 {
            assert!((sab[i] - sa[i] - sb[i]).abs() <= 2.0 * tol * scale * 10.0);
        }
    }

    #[test]
    fn rejects_bad_interval() {
        let ode = LinearAngularODE::new(3, 0.0, 0.0, 1.0);
        assert!(integrate_interior(&ode, 0.0, 0.5, [1.0, 0.0], 1e-8).is_err());
        assert!(integrate_interior(&ode, 0.2, 0.5, [1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn abel_identity() {
        // sigma * Wronskian is constant for two solutions
        let ode = LinearAngularODE::new(5, -0.4, 6.0, 4.2);
        let tol = 1e-12;
        let s1 = integrate_interior(&ode, 0.5, 0.05, [1.0, 0.0], tol).unwrap();
        let s2 = integrate_interior(&ode, 0.5, 0.05, [0.0, 1.0], tol).unwrap();
        let w0 = ode.sigma(0.5);
        for t in [0.4, 0.25, 0.1, 0.06] {
            let [a, ad] = s1.eval(t);
            let [b, bd] = s2.eval(t);
            let w = ode.sigma(t) * (a * bd - ad * b);
            assert!((w - w0).abs() < 1e-8 * w0, "t={t}: {w} vs {w0}");
        }
    }

    #[test]
    fn chebyshev_profile() {
        let g: f64 = 0.5;
        let prof = solve_k_gamma(2, 0.0, 0, g, 1e-12).unwrap();
        assert!((prof.value(0.0 + 1e-9) - (std::f64::consts::FRAC_PI_4).cos()).abs() < 1e-6);
        for i in 1..200 {
            let t = i as f64 / 200.0;
            assert!((prof.value(t) - (g * t.acos()).cos()).abs() < 1e-8, "t={t}");
        }
        let fit = classify_origin_behavior(&prof).unwrap();
        assert!((fit.a - std::f64::consts::FRAC_PI_4.cos()).abs() < 1e-8);
        assert!((fit.b - 0.5 * std::f64::consts::FRAC_PI_4.sin()).abs() < 1e-8);
        assert!(fit.singular);
    }

    #[test]
    fn k_alpha_minus_is_power() {
        for (n, mu) in [(3, -1.0), (4, 0.1875), (2, -0.5)] {
            let (_, am) = alpha_roots(mu);
            let prof = solve_k_gamma(n, mu, 0, am, 1e-12).unwrap();
            for t in [0.01f64, 0.2, 0.6, 0.95] {
                let exact = t.powf(am);
                assert!((prof.value(t) - exact).abs() < 1e-8 * exact, "n={n} mu={mu} t={t}");
            }
            let fit = classify_origin_behavior(&prof).unwrap();
            assert!((fit.a - 1.0).abs() < 1e-7 && fit.b.abs() < 1e-7, "{fit:?}");
        }
    }

    #[test]
    fn collision_at_alpha_plus() {
        let (ap, _) = alpha_roots(0.1);
        let err = solve_k_gamma(3, 0.1, 0, ap, 1e-12).unwrap_err();
        assert!(matches!(err, Error::EigenvalueCollision { s: 1, .. }), "{err}");
    }

    #[test]
    fn handoff_continuity() {
        let prof = solve_k_gamma(3, -0.6, 0, 0.3, 1e-12).unwrap();
        let t0 = prof.grid[0];
        let from_grid = prof.eval_stored(t0).0;
        let from_series = prof.expansion_at_0.as_ref().unwrap().eval(t0).0;
        assert!((from_grid - from_series).abs() < 1e-9 * from_grid.abs());
        let t1 = *prof.grid.last().unwrap();
        let from_grid = prof.eval_stored(t1).0;
        let from_series = prof.expansion_at_1.as_ref().unwrap().eval(t1).0;
        assert!((from_grid - from_series).abs() < 1e-9 * from_grid.abs());
    }

    #[test]
    fn series_order_doubling() {
        let ode = LinearAngularODE::for_gamma(4, -0.3, 1, 0.4);
        let s14 = axis_series(&ode, 1, 14).unwrap();
        let s28 = axis_series(&ode, 1, 28).unwrap();
        let (m14, p14) = origin_bases(&ode, 14).unwrap();
        let (m28, p28) = origin_bases(&ode, 28).unwrap();
        let d = HANDOFF_RADIUS;
        assert!((s14.value(1.0 - d) - s28.value(1.0 - d)).abs() < 1e-11);
        assert!((m14.value(d) - m28.value(d)).abs() < 1e-11 * m14.value(d).abs());
        assert!((p14.value(d) - p28.value(d)).abs() < 1e-11 * p14.value(d).abs());
    }

    #[test]
    fn sturm_positivity() {
        let (ap, _) = alpha_roots(0.05);
        for gamma in [-1.5, -0.3, 0.2, ap - 0.05] {
            let prof = solve_k_gamma(3, 0.05, 0, gamma, 1e-12).unwrap();
            assert!(prof.values.iter().all(|v| *v > 0.0), "gamma={gamma}");
        }
    }

    #[test]
    fn ode_residual_on_grid() {
        let prof = solve_k_gamma(4, -0.8, 0, 0.6, 1e-12).unwrap();
        let ode = prof.ode.unwrap();
        for (i, &t) in prof.grid.iter().enumerate().step_by(7) {
            let (k, kd) = (prof.values[i], prof.derivatives[i]);
            let r = ode.residual(t, k, kd, prof.second_derivatives[i]);
            assert!(r.abs() < 1e-12 * (k.abs() / (t * t) + kd.abs()));
        }
    }

    #[test]
    fn ill_conditioned_near_quarter() {
        let prof = solve_k_gamma(3, 0.2499, 0, 0.1, 1e-12).unwrap();
        assert!(matches!(classify_origin_behavior(&prof), Err(Error::IllConditionedFit { .. })));
    }
}
