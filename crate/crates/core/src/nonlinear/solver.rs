//! Finite-volume discretization of the profile equation for `w = v / t^alpha`:
//! `-(S w')' + R (t^{alpha(p-1)} w^p - Lambda_0 w) = 0`,
//! `S = t^{2 alpha} (1-t^2)^{(n-1)/2}`, `R = t^{2 alpha} (1-t^2)^{(n-3)/2}`,
//! on the graded grid `t = s^2 (3 - 2 s)`, with zero flux at both ends.

use super::bracket::Bracket;
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, solve_tridiagonal};

pub const MAX_ITERATIONS: usize = 200_000;
/// Allowed upward drift of a monotone iterate, relative to the iterate's size.
const MONOTONE_SLACK: f64 = 1e-12;
/// Rounding allowance for a flux difference, in units of `eps * a * (|w_i| + |w_j|)`.
const ROUNDING_ULPS: f64 = 16.0;

pub(crate) fn grade(s: f64) -> f64 {
    s * s * (3.0 - 2.0 * s)
}

pub(crate) fn grade_d(s: f64) -> f64 {
    6.0 * s * (1.0 - s)
}

/// `int_0^x t^a (1-t^2)^k dt` for small `x` by the binomial series.
fn power_integral(a: f64, k: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut coef = 1.0;
    for j in 0..60 {
        let e = a + 2.0 * j as f64 + 1.0;
        let term = coef * x.powf(e) / e;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        coef *= -(k - j as f64) / (j as f64 + 1.0);
    }
    sum
}

#[derive(Debug, Clone)]
pub(crate) struct System {
    pub p: f64,
    pub lambda_0: f64,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    /// Interface coefficients `a_{i+1/2}`.
    pub flux: Vec<f64>,
    /// `int_cell R`.
    pub mass: Vec<f64>,
    /// `int_cell R t^{alpha(p-1)}`.
    pub source: Vec<f64>,
}

impl System {
    pub fn new(n: u32, p: f64, alpha: f64, lambda_0: f64, cells: usize) -> Result<Self> {
        let beta = alpha * (p - 1.0);
        if 2.0 * alpha + 1.0 <= 0.0 || 2.0 * alpha + beta + 1.0 <= 0.0 {
            return Err(Error::DivergentIntegral(format!(
                "weights t^{} and t^{} are not integrable at t=0; zero-flux selection undefined",
                2.0 * alpha,
                2.0 * alpha + beta
            )));
        }
        let h = 1.0 / cells as f64;
        let half = (n as f64 - 1.0) / 2.0;
        let s: Vec<f64> = (0..=cells).map(|i| i as f64 * h).collect();
        let t: Vec<f64> = s.iter().map(|&x| grade(x)).collect();
        let flux = (0..cells)
            .map(|i| {
                let sm = (i as f64 + 0.5) * h;
                let tm = grade(sm);
                tm.powf(2.0 * alpha) * (1.0 - tm * tm).powf(half) / grade_d(sm) / h
            })
            .collect();
        let (gx, gw) = gauss_legendre(6);
        let weight = |x: f64, extra: f64| {
            let tt = grade(x);
            tt.powf(2.0 * alpha + extra) * (1.0 - tt * tt).powf(half - 1.0) * grade_d(x)
        };
        let integrate = |a: f64, b: f64, extra: f64| -> f64 {
            let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
            gx.iter().zip(&gw).map(|(x, w)| w * r * weight(c + r * x, extra)).sum()
        };
        let mut mass = vec![0.0; cells + 1];
        let mut source = vec![0.0; cells + 1];
        for i in 0..=cells {
            if i == 0 {
                let x = grade(0.5 * h);
                mass[0] = power_integral(2.0 * alpha, half - 1.0, x);
                source[0] = power_integral(2.0 * alpha + beta, half - 1.0, x);
                continue;
            }
            let lo = (i as f64 - 0.5) * h;
            let hi = ((i as f64 + 0.5) * h).min(1.0);
            for (a, b) in [(lo, s[i]), (s[i], hi)] {
                if b > a {
                    mass[i] += integrate(a, b, 0.0);
                    source[i] += integrate(a, b, beta);
                }
            }
        }
        Ok(Self {
            p,
            lambda_0,
            s,
            t,
            flux,
            mass,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    /// Nonlinear cell term `N_i w^p - Lambda_0 M_i w`.
    fn reaction(&self, i: usize, w: f64) -> f64 {
        self.source[i] * w.max(0.0).powf(self.p) - self.lambda_0 * self.mass[i] * w
    }

    fn reaction_d(&self, i: usize, w: f64) -> f64 {
        self.p * self.source[i] * w.max(0.0).powf(self.p - 1.0) - self.lambda_0 * self.mass[i]
    }

    /// Cell residual and its magnitude scale.
    pub fn residual_at(&self, w: &[f64], i: usize) -> (f64, f64) {
        let (r, scale, _) = self.residual_parts(w, i);
        (r, scale)
    }

    /// Cell residual, magnitude scale and rounding noise of the flux differences.
    fn residual_parts(&self, w: &[f64], i: usize) -> (f64, f64, f64) {
        let mut noise = 0.0;
        let mut r = self.reaction(i, w[i]);
        let mut scale = self.source[i] * w[i].abs().powf(self.p) + self.lambda_0.abs() * self.mass[i] * w[i].abs();
        if i > 0 {
            let f = self.flux[i - 1] * (w[i] - w[i - 1]);
            r += f;
            scale += f.abs();
            noise += self.flux[i - 1] * (w[i].abs() + w[i - 1].abs());
        }
        if i + 1 < w.len() {
            let f = self.flux[i] * (w[i] - w[i + 1]);
            r += f;
            scale += f.abs();
            noise += self.flux[i] * (w[i].abs() + w[i + 1].abs());
        }
        (r, scale, ROUNDING_ULPS * f64::EPSILON * noise)
    }

    /// Largest normalized cell residual over `from..len`, ignoring the part explained by rounding.
    pub fn residual_sup(&self, w: &[f64], from: usize) -> f64 {
        (from..w.len())
            .map(|i| {
                let (r, s, noise) = self.residual_parts(w, i);
                (r.abs() - noise).max(0.0) / s.max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    /// Stiffness matrix with an added diagonal; row 0 replaced by identity when `dirichlet`.
    fn matrix(&self, diag_extra: &[f64], dirichlet: bool) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let len = self.len();
        let mut lower = vec![0.0; len];
        let mut diag = diag_extra.to_vec();
        let mut upper = vec![0.0; len];
        for i in 0..len {
            if i > 0 {
                diag[i] += self.flux[i - 1];
                lower[i] = -self.flux[i - 1];
            }
            if i + 1 < len {
                diag[i] += self.flux[i];
                upper[i] = -self.flux[i];
            }
        }
        if dirichlet {
            diag[0] = 1.0;
            upper[0] = 0.0;
        }
        (lower, diag, upper)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Iteration {
    pub w: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Monotone iteration `(K + D) w_{k+1} = D w_k - reaction(w_k)` from a supersolution `start`.
/// With `dirichlet`, `w[0]` stays at its initial value.
pub(crate) fn monotone_iteration(
    sys: &System,
    bracket: &Bracket,
    start: Vec<f64>,
    dirichlet: bool,
    tol: f64,
) -> Result<Iteration> {
    let len = sys.len();
    let sub: Vec<f64> = sys.t.iter().map(|&t| bracket.sub_w(t)).collect();
    let shift: Vec<f64> = (0..len)
        .map(|i| 1.25 * sys.p * sys.source[i] * start[i].powf(sys.p - 1.0) + (-sys.lambda_0).max(0.0) * sys.mass[i])
        .collect();
    let (lower, diag, upper) = sys.matrix(&shift, dirichlet);
    let first = usize::from(dirichlet);
    let mut w = start;
    let mut change = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for k in 1..=MAX_ITERATIONS {
        // correction form keeps the defect exact where cells are tiny
        let rhs: Vec<f64> = (0..len)
            .map(|i| if dirichlet && i == 0 { 0.0 } else { -sys.residual_at(&w, i).0 })
            .collect();
        let delta = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        let next: Vec<f64> = w.iter().zip(&delta).map(|(a, d)| a + d).collect();
        let size = next.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        change = 0.0;
        for i in 0..len {
            let d = next[i] - w[i];
            if d > MONOTONE_SLACK * size {
                return Err(Error::MonotonicityViolation { iteration: k, t: sys.t[i], excess: d });
            }
            if next[i] < sub[i] - MONOTONE_SLACK * size {
                return Err(Error::MonotonicityViolation { iteration: k, t: sys.t[i], excess: sub[i] - next[i] });
            }
            change = change.max(d.abs());
        }
        w = next;
        change /= size;
        if change < tol {
            residual = sys.residual_sup(&w, first);
            if residual < tol {
                return Ok(Iteration { w, iterations: k, residual });
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        change,
        residual,
    })
}

/// Projected pseudo-transient Newton iteration on the zero-flux system, kept inside `[lo, hi]`.
pub(crate) fn newton_iteration(sys: &System, lo: &[f64], hi: &[f64], start: Vec<f64>, tol: f64) -> Result<Iteration> {
    let len = sys.len();
    let mut w = start;
    let norm = |w: &[f64]| sys.residual_sup(w, 0);
    let mut res = norm(&w);
    let mut dt = 1e-2;
    for k in 1..=2000 {
        let jac: Vec<f64> = (0..len).map(|i| sys.reaction_d(i, w[i]) + sys.mass[i] / dt).collect();
        let (lower, diag, upper) = sys.matrix(&jac, false);
        let rhs: Vec<f64> = (0..len).map(|i| -sys.residual_at(&w, i).0).collect();
        let step = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        let next: Vec<f64> = (0..len).map(|i| (w[i] + step[i]).clamp(lo[i], hi[i])).collect();
        let r = norm(&next);
        if r < res {
            dt = (dt * 4.0).min(1e12);
        } else {
            dt = (dt * 0.25).max(1e-12);
        }
        w = next;
        res = r;
        if res < tol {
            return Ok(Iteration { w, iterations: k, residual: res });
        }
    }
    Err(Error::NoConvergence {
        iterations: 2000,
        change: f64::NAN,
        residual: res,
    })
}
