//! Eigenvalues `Lambda_{s,m}` of the angular problem with the `t^{alpha_+}`
//! condition at `t = 0` and the regular branch at `t = 1`, and the separable
//! harmonics built from angular profiles.

mod discrete;
mod harmonic;

use serde::{Deserialize, Serialize};

pub use discrete::{discretized_eigenvalues, extrapolated_eigenvalues};
pub use harmonic::{harmonic, is_boundary_singular, verify_growth_bounds, AngularFactor, GrowthBound, GrowthGrid, HarmonicExtra, HarmonicKind, SeparableHarmonic};

use crate::angular_ode::{
    axis_series, frobenius_expansion, integrate_interior, AngularProfile, DenseSolution, EndpointRep, FrobeniusExpansion,
    LinearAngularODE, HANDOFF_RADIUS, SERIES_ORDER,
};
use crate::error::{Error, Result};
use crate::exponents::{alpha_roots, gamma_roots, lambda_of, nu_of, ProblemParams};
use crate::numerics::{brent, count_sign_changes};

/// Matching point of the two shooting branches.
pub const MATCH_POINT: f64 = 0.5;
/// Smallest `Lambda` examined by the scan (all eigenvalues are positive).
pub const SCAN_START: f64 = 1e-8;
/// Scan step in the radial exponent `gamma`.
pub const SCAN_STEP: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub s: usize,
    pub m: u32,
    pub lambda: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Normalized Wronskian of the two branches at the matching point.
    pub mismatch: f64,
    pub profile: AngularProfile,
}

struct Shot {
    ode: LinearAngularODE,
    left: DenseSolution,
    right: DenseSolution,
    left_series: FrobeniusExpansion,
    right_series: FrobeniusExpansion,
    mismatch: f64,
    /// Scale applied to the right branch so that it continues the left one.
    join: f64,
}

impl Shot {
    fn zeros(&self) -> usize {
        let left = self.left.nodes.iter().map(|(_, y)| y[0]);
        let right = self.right.nodes.iter().rev().map(|(_, y)| self.join * y[0]);
        count_sign_changes(left.chain(right))
    }

    /// Separate zero counts on the two halves; their sum is nondecreasing in `Lambda`.
    fn branch_zeros(&self) -> usize {
        count_sign_changes(self.left.nodes.iter().map(|(_, y)| y[0]))
            + count_sign_changes(self.right.nodes.iter().map(|(_, y)| y[0]))
    }
}

struct Shooter {
    n: u32,
    mu: f64,
    m: u32,
    alpha_plus: f64,
    tol: f64,
}

impl Shooter {
    fn new(n: u32, mu: f64, m: u32, tol: f64) -> Result<Self> {
        ProblemParams::linear(n, mu)?;
        if n == 2 && m > 0 {
            return Err(Error::InvalidParams("n = 2 admits only m = 0".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParams("tolerance must be positive".into()));
        }
        Ok(Self {
            n,
            mu,
            m,
            alpha_plus: alpha_roots(mu).0,
            tol: (0.1 * tol).clamp(1e-13, 1e-9),
        })
    }

    fn shoot(&self, lambda: f64) -> Result<Shot> {
        let ode = LinearAngularODE::new(self.n, self.mu, nu_of(self.n, self.m), lambda);
        let left_series = frobenius_expansion(&ode, 0, self.alpha_plus, SERIES_ORDER)?;
        let right_series = axis_series(&ode, self.m, SERIES_ORDER)?;
        let t0 = HANDOFF_RADIUS;
        let (a, ad) = left_series.eval(t0);
        let left = integrate_interior(&ode, t0, MATCH_POINT, [a, ad], self.tol)?;
        let (b, bd) = right_series.eval(1.0 - t0);
        let right = integrate_interior(&ode, 1.0 - t0, MATCH_POINT, [b, bd], self.tol)?;
        let [yl, dl] = left.final_state();
        let [yr, dr] = right.final_state();
        let nl = yl.hypot(dl);
        let nr = yr.hypot(dr);
        let mismatch = ode.sigma(MATCH_POINT) * (yl * dr - dl * yr) / (nl * nr);
        let join = (yl * yr + dl * dr) / (nr * nr);
        Ok(Shot {
            ode,
            left,
            right,
            left_series,
            right_series,
            mismatch,
            join,
        })
    }

    fn lambda(&self, gamma: f64) -> f64 {
        lambda_of(self.n, gamma)
    }

    fn refine(&self, g_lo: f64, g_hi: f64) -> Result<Shot> {
        let mut err = None;
        let g = brent(
            |g| match self.shoot(self.lambda(g)) {
                Ok(s) => s.mismatch,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            g_lo,
            g_hi,
            4.0 * f64::EPSILON * g_hi.abs(),
            200,
        );
        if let Some(e) = err {
            return Err(e);
        }
        self.shoot(self.lambda(g))
    }

    /// Scans `gamma` upward from the start of the spectrum and calls `visit` for every
    /// refined root until it returns `false` or `gamma_max` is passed.
    fn scan(&self, gamma_max: f64, mut visit: impl FnMut(Shot) -> bool) -> Result<()> {
        let half = (self.n as f64 - 2.0) / 2.0;
        let mut g = gamma_roots(self.n, SCAN_START).0.max(-half);
        let mut prev = self.shoot(self.lambda(g))?;
        while g < gamma_max {
            let g_next = g + SCAN_STEP;
            let next = self.shoot(self.lambda(g_next))?;
            // two or more zeros gained in one step: look closer
            let jump = next.branch_zeros().saturating_sub(prev.branch_zeros());
            let mut next = Some(next);
            let pieces = if jump >= 2 { 16 } else { 1 };
            let mut a = g;
            let mut sa = prev;
            for i in 1..=pieces {
                let b = g + SCAN_STEP * i as f64 / pieces as f64;
                let sb = match next.take() {
                    Some(sn) if i == pieces => sn,
                    other => {
                        next = other;
                        self.shoot(self.lambda(b))?
                    }
                };
                if sa.mismatch == 0.0 || sa.mismatch * sb.mismatch < 0.0 {
                    let root = if sa.mismatch == 0.0 { sa } else { self.refine(a, b)? };
                    if !visit(root) {
                        return Ok(());
                    }
                }
                a = b;
                sa = sb;
            }
            g = g_next;
            prev = sa;
        }
        Ok(())
    }

    fn result(&self, s: usize, shot: Shot) -> EigenResult {
        let lambda = shot.ode.lambda;
        let (gp, gm) = gamma_roots(self.n, lambda);
        let mut nodes = shot.left.nodes.clone();
        nodes.extend(shot.right.nodes.iter().map(|(t, y)| (*t, [shot.join * y[0], shot.join * y[1]])));
        let at0 = EndpointRep::Series {
            scale: 1.0,
            expansion: shot.left_series.clone(),
        };
        let at1 = EndpointRep::Series {
            scale: shot.join,
            expansion: shot.right_series.clone(),
        };
        let profile = AngularProfile::from_nodes(
            shot.ode,
            nodes,
            Some(at0),
            Some(at1),
            "unit leading coefficient of t^alpha_+ at t = 0",
        );
        EigenResult {
            s,
            m: self.m,
            lambda,
            gamma_plus: gp,
            gamma_minus: gm,
            mismatch: shot.mismatch,
            profile,
        }
    }
}

fn gamma_cap(alpha_plus: f64, s: usize, m: u32) -> f64 {
    alpha_plus + m as f64 + 2.0 * s as f64 + 24.0
}

/// The `s`-th eigenvalue (1-based) for azimuthal index `m`, indexed by the
/// interior zero count of its eigenfunction.
pub fn eigenvalue(n: u32, mu: f64, s: usize, m: u32, tol: f64) -> Result<EigenResult> {
    if s == 0 {
        return Err(Error::InvalidParams("eigenvalue index s starts at 1".into()));
    }
    let shooter = Shooter::new(n, mu, m, tol)?;
    let cap = gamma_cap(shooter.alpha_plus, s, m);
    let mut found = None;
    shooter.scan(cap, |shot| {
        let z = shot.zeros();
        if z + 1 >= s {
            if z + 1 == s {
                found = Some(shot);
            }
            return false;
        }
        true
    })?;
    match found {
        Some(shot) => Ok(shooter.result(s, shot)),
        None => Err(Error::BracketNotFound {
            s,
            m,
            lambda_max: lambda_of(n, cap),
        }),
    }
}

/// All eigenvalues `Lambda_{s,m} <= lambda_max`, in increasing order.
pub fn eigenvalues_up_to(n: u32, mu: f64, m: u32, lambda_max: f64, tol: f64) -> Result<Vec<f64>> {
    let shooter = Shooter::new(n, mu, m, tol)?;
    let mut out = Vec::new();
    if lambda_max < SCAN_START {
        return Ok(out);
    }
    let g_max = gamma_roots(n, lambda_max).0 + SCAN_STEP;
    shooter.scan(g_max, |shot| {
        if shot.ode.lambda <= lambda_max {
            out.push(shot.ode.lambda);
            true
        } else {
            false
        }
    })?;
    Ok(out)
}

/// The first `count` eigenvalues for each `m` in `ms`, computed in parallel.
pub fn eigen_table(n: u32, mu: f64, ms: &[u32], count: usize, tol: f64) -> Result<Vec<EigenResult>> {
    use rayon::prelude::*;
    let jobs: Vec<(usize, u32)> = ms.iter().flat_map(|&m| (1..=count).map(move |s| (s, m))).collect();
    jobs.par_iter().map(|&(s, m)| eigenvalue(n, mu, s, m, tol)).collect()
}
