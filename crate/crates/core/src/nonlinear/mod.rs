//! Separable solutions `u = r^{-2/(p-1)} v(x_1/|x|)` of `-Delta u - mu u/x_1^2 = -u^p`.
//!
//! Profiles are computed for `w = v / t^alpha` (`alpha = alpha_+` or `alpha_-`), which is
//! bounded and positive on `[0, 1]`. The minus branch is not unique; see [`Selection`].

mod bracket;
mod identity;
mod solver;
mod uniqueness;

use serde::{Deserialize, Serialize};

pub use bracket::{build_bracket, verification_grid, Bracket, INEQUALITY_SLACK, VERIFY_POINTS};
pub use identity::{integral_identity_check, integral_identity_defect};
pub use uniqueness::{check_uniqueness_plus, UniquenessReport};

use crate::angular_ode::{AngularProfile, EndpointRep};
use crate::error::{Error, Result};
use crate::exponents::ProblemParams;
use solver::{grade_d, monotone_iteration, Iteration, System};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_CELLS: usize = 2000;

const ODE_SECOND_DERIVATIVE_CUTOFF: f64 = 0.05;
const MAX_C_DOUBLINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            _ => Err(Error::InvalidParams(format!("unknown branch '{s}' (expected plus or minus)"))),
        }
    }
}

/// Which member of the solution family a profile is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Plus branch: the positive solution is unique.
    Unique,
    /// Minus branch with `Lambda_0 > 0`: no `t^{alpha_+}` component, i.e. zero flux of `w` at 0.
    ZeroFlux,
    /// Minus branch with `Lambda_0 <= 0`, where every solution has nonzero flux at 0:
    /// the largest solution below the supersolution, `w(0) = c`.
    MaximalBelowSuper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearProfile {
    pub branch: Branch,
    pub selection: Selection,
    pub params: ProblemParams,
    /// `v` on `(0, 1]`, stored as `v / t^alpha`.
    pub profile: AngularProfile,
    /// `lim v(t) / t^alpha` as `t -> 0`.
    pub v_limit: f64,
    pub bracket: Bracket,
    pub residual_sup: f64,
    pub iterations: usize,
    pub cells: usize,
    pub tol: f64,
    /// `w = v / t^alpha` at the solver nodes, including `t = 0`.
    pub nodes: Vec<f64>,
    pub node_values: Vec<f64>,
}

impl NonlinearProfile {
    pub fn p(&self) -> f64 {
        self.bracket.p
    }

    pub fn alpha(&self) -> f64 {
        self.bracket.alpha
    }

    pub fn v(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.v_limit * 0f64.powf(self.alpha());
        }
        self.profile.value(t)
    }

    /// `v / t^alpha`.
    pub fn w(&self, t: f64) -> f64 {
        if t <= self.profile.grid[0] {
            return self.v_limit;
        }
        self.profile.eval_stored(t.min(1.0)).0
    }

    /// Largest normalized excursion of the node values outside `[sub, super]` (`<= 0` when contained).
    pub fn containment_violation(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.node_values)
            .map(|(&t, &w)| {
                let lo = self.bracket.sub_w(t);
                let hi = self.bracket.super_w(t);
                (lo - w).max(w - hi) / hi.abs().max(1e-300)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn solve_on(params: &ProblemParams, branch: Branch, tol: f64, cells: usize) -> Result<NonlinearProfile> {
    let mut bracket = build_bracket(params, branch)?;
    let sys = System::new(params.n, bracket.p, bracket.alpha, bracket.lambda_0, cells)?;
    let supersolution = |b: &Bracket| sys.t.iter().map(|&t| b.super_w(t)).collect::<Vec<_>>();
    let (start, selection) = match branch {
        Branch::Plus => (supersolution(&bracket), Selection::Unique),
        Branch::Minus if bracket.lambda_0 <= 0.0 => {
            let mut top = supersolution(&bracket);
            top[0] = bracket.c;
            let it = monotone_iteration(&sys, &bracket, top, true, tol)?;
            return Ok(assemble(params, branch, Selection::MaximalBelowSuper, bracket, &sys, it, tol));
        }
        Branch::Minus => {
            // Dirichlet solve at w(0) = c; it is a zero-flux supersolution once its flux at 0 points outward
            let grid = verification_grid(VERIFY_POINTS);
            let mut doublings = 0;
            loop {
                let mut top = supersolution(&bracket);
                top[0] = bracket.c;
                let it = monotone_iteration(&sys, &bracket, top, true, tol)?;
                if sys.residual_at(&it.w, 0).0 >= 0.0 {
                    break (it.w, Selection::ZeroFlux);
                }
                doublings += 1;
                if doublings > MAX_C_DOUBLINGS {
                    return Err(Error::SearchExhausted("zero-flux solution above every supersolution tried".into()));
                }
                bracket.c *= 2.0;
                if !bracket.verify(&grid) {
                    return Err(Error::NoBracket(format!("c = {} no longer a supersolution", bracket.c)));
                }
            }
        }
    };
    let it = monotone_iteration(&sys, &bracket, start, false, tol)?;
    Ok(assemble(params, branch, selection, bracket, &sys, it, tol))
}

/// Differences in `s`: fourth-order first derivative in the interior, second-order elsewhere.
fn differences(s: &[f64], w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = w.len();
    let h = s[1] - s[0];
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let (a, b, c, off) = if i == 0 {
            (0, 1, 2, -1.0)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1, 1.0)
        } else {
            (i - 1, i, i + 1, 0.0)
        };
        let second = (w[a] - 2.0 * w[b] + w[c]) / (h * h);
        d1[i] = if i >= 2 && i + 2 < n {
            (w[i - 2] - 8.0 * w[i - 1] + 8.0 * w[i + 1] - w[i + 2]) / (12.0 * h)
        } else {
            (w[c] - w[a]) / (2.0 * h) + off * h * second
        };
        d2[i] = second;
    }
    (d1, d2)
}

fn assemble(
    params: &ProblemParams,
    branch: Branch,
    selection: Selection,
    bracket: Bracket,
    sys: &System,
    it: Iteration,
    tol: f64,
) -> NonlinearProfile {
    let w = &it.w;
    let len = w.len();
    let (ws, wss) = differences(&sys.s, w);
    let n1 = params.n as f64 - 1.0;
    let mut dw = vec![0.0; len];
    let mut ddw = vec![0.0; len];
    for i in 1..len {
        let s = sys.s[i];
        let g1 = grade_d(s);
        let g2 = 6.0 - 12.0 * s;
        if i == len - 1 {
            dw[i] = (bracket.lambda_0 * w[i] - w[i].powf(bracket.p)) / n1;
            ddw[i] = 2.0 * ddw[i - 1] - ddw[i - 2];
        } else {
            dw[i] = ws[i] / g1;
            ddw[i] = (wss[i] - dw[i] * g2) / (g1 * g1);
        }
    }
    // Away from t = 1 take w'' from the equation itself, so the interpolant solves it at the nodes.
    let (alpha, p, mu) = (bracket.alpha, bracket.p, params.mu);
    let zeroth = mu - n1 * alpha + bracket.lambda_p();
    for i in 1..len - 1 {
        let t = sys.t[i];
        let q = 1.0 - t * t;
        if q < ODE_SECOND_DERIVATIVE_CUTOFF {
            break;
        }
        let first = 2.0 * alpha * q / t - n1 * t;
        ddw[i] = -(first * dw[i] + zeroth * w[i] - t.powf(alpha * (p - 1.0)) * w[i].powf(p)) / q;
    }
    let profile = AngularProfile {
        ode: None,
        grid: sys.t[1..].to_vec(),
        values: w[1..].to_vec(),
        derivatives: dw[1..].to_vec(),
        second_derivatives: ddw[1..].to_vec(),
        prefactor_exponent: bracket.alpha,
        expansion_at_0: Some(EndpointRep::PowerLaw {
            coefficient: w[0],
            exponent: bracket.alpha,
        }),
        expansion_at_1: None,
        normalization: "none".into(),
    };
    NonlinearProfile {
        branch,
        selection,
        params: *params,
        profile,
        v_limit: w[0],
        bracket,
        residual_sup: it.residual,
        iterations: it.iterations,
        cells: sys.len() - 1,
        tol,
        nodes: sys.t.clone(),
        node_values: it.w,
    }
}

/// Solves the profile equation on `cells` grid cells, refining once if monotonicity breaks.
pub fn solve_profile_on(params: &ProblemParams, branch: Branch, tol: f64, cells: usize) -> Result<NonlinearProfile> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tol must be positive, got {tol}")));
    }
    if cells < 16 {
        return Err(Error::InvalidParams(format!("need at least 16 cells, got {cells}")));
    }
    match solve_on(params, branch, tol, cells) {
        Err(Error::MonotonicityViolation { .. }) => solve_on(params, branch, tol, 2 * cells),
        other => other,
    }
}

pub fn solve_profile(params: &ProblemParams, branch: Branch, tol: f64) -> Result<NonlinearProfile> {
    solve_profile_on(params, branch, tol, DEFAULT_CELLS)
}

/// `u(x) = |x|^{-2/(p-1)} v(x_1 / |x|)`.
pub fn eval_solution(profile: &NonlinearProfile, x: &[f64]) -> f64 {
    let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    let t = (x[0] / r).clamp(0.0, 1.0);
    r.powf(-2.0 / (profile.p() - 1.0)) * profile.v(t)
}
