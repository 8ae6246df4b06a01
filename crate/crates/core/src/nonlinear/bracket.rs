//! Sub/supersolution pairs for the profile equation
//! `Lv - v^p = 0`, `Lv = (1-t^2) v'' - (n-1) t v' + (mu/t^2) v + Lambda_p v`,
//! with `Lambda_p = Lambda(-2/(p-1))`.

use serde::{Deserialize, Serialize};

use super::Branch;
use crate::error::{Error, Result};
use crate::exponents::{derive_exponents, lambda_of, minus_row, ProblemParams, CRITICAL_EPS};

/// Points of the verification grid.
pub const VERIFY_POINTS: usize = 10_000;
/// Relative slack allowed in the pointwise inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-12;
const MAX_STEPS: usize = 60;

/// `t^b` terms `(coefficient, exponent)`; used for closed-form operator application.
type PowerSum = Vec<(f64, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub branch: Branch,
    /// Row of the sub/supersolution table (1: plus branch; 2-4: minus branch).
    pub row: u8,
    pub n: u32,
    pub mu: f64,
    pub p: f64,
    /// Boundary exponent of the branch (`alpha_+` or `alpha_-`).
    pub alpha: f64,
    pub tau: f64,
    pub c: f64,
    pub kappa_sub: f64,
    pub kappa_super: f64,
    pub epsilon: f64,
    /// `Lambda(-2/(p-1)) - Lambda(alpha)`.
    pub lambda_0: f64,
    /// `Lambda(-2/(p-1)) - Lambda(alpha + epsilon)`.
    pub lambda_eps: f64,
    /// Largest normalized violation found at the final (double) resolution; `<= 0` when verified.
    pub sub_margin: f64,
    pub super_margin: f64,
}

/// Quadratically graded points on `(0, 1]`, clustered at both ends.
pub fn verification_grid(points: usize) -> Vec<f64> {
    (1..=points)
        .map(|j| {
            let s = j as f64 / points as f64;
            s * s * (3.0 - 2.0 * s)
        })
        .collect()
}

impl Bracket {
    pub fn lambda_p(&self) -> f64 {
        lambda_of(self.n, -2.0 / (self.p - 1.0))
    }

    /// Subsolution divided by `t^alpha`.
    pub fn sub_w(&self, t: f64) -> f64 {
        match self.branch {
            Branch::Plus => self.tau,
            Branch::Minus => self.tau * (1.0 - self.kappa_sub * t.powf(self.epsilon)).max(0.0),
        }
    }

    /// Supersolution divided by `t^alpha`.
    pub fn super_w(&self, t: f64) -> f64 {
        match self.row {
            1 => self.c * (1.0 - self.kappa_super * t.powf(self.epsilon)),
            2 => self.c,
            _ => self.c * (1.0 + self.kappa_super * t.powf(self.epsilon)),
        }
    }

    pub fn sub(&self, t: f64) -> f64 {
        t.powf(self.alpha) * self.sub_w(t)
    }

    pub fn sup(&self, t: f64) -> f64 {
        t.powf(self.alpha) * self.super_w(t)
    }

    fn sub_terms(&self) -> PowerSum {
        match self.branch {
            Branch::Plus => vec![(self.tau, self.alpha)],
            Branch::Minus => vec![(self.tau, self.alpha), (-self.tau * self.kappa_sub, self.alpha + self.epsilon)],
        }
    }

    fn super_terms(&self) -> PowerSum {
        let (a, e, c, k) = (self.alpha, self.epsilon, self.c, self.kappa_super);
        match self.row {
            1 => vec![(c, a), (-c * k, a + e)],
            2 => vec![(c, a)],
            _ => vec![(c, a), (c * k, a + e)],
        }
    }

    /// `(Lv - v^p, scale)` for `v = sum c_j t^{b_j}`, using
    /// `L t^b = (b(b-1) + mu) t^{b-2} + (Lambda_p - Lambda(b)) t^b`.
    fn residual(&self, terms: &PowerSum, t: f64) -> (f64, f64) {
        let lp = self.lambda_p();
        let mut value = 0.0;
        let mut lv = 0.0;
        let mut scale = 0.0;
        for &(c, b) in terms {
            let tb = t.powf(b);
            value += c * tb;
            // b(b-1) + mu factored through the indicial roots: exactly 0 at b = alpha
            let x = c * (b - self.alpha) * (b - (1.0 - self.alpha)) * tb / (t * t);
            let y = c * (lp - lambda_of(self.n, b)) * tb;
            lv += x + y;
            scale += x.abs() + y.abs();
        }
        let vp = value.max(0.0).powf(self.p);
        (lv - vp, scale + vp)
    }

    /// Largest normalized violation of `L sub - sub^p >= 0` on the grid.
    pub fn sub_violation(&self, grid: &[f64]) -> f64 {
        let terms = self.sub_terms();
        let cutoff = match self.branch {
            Branch::Plus => f64::INFINITY,
            Branch::Minus => self.kappa_sub.powf(-1.0 / self.epsilon),
        };
        grid.iter()
            .filter(|&&t| t < cutoff)
            .map(|&t| {
                let (r, s) = self.residual(&terms, t);
                -r / s
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest normalized violation of `L super - super^p <= 0` on the grid.
    pub fn super_violation(&self, grid: &[f64]) -> f64 {
        let terms = self.super_terms();
        grid.iter()
            .map(|&t| {
                let (r, s) = self.residual(&terms, t);
                r / s
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn ordered(&self, grid: &[f64]) -> bool {
        grid.iter().all(|&t| self.sub_w(t) <= self.super_w(t))
    }

    /// `true` when both inequalities and the ordering hold on the grid.
    pub fn verify(&self, grid: &[f64]) -> bool {
        self.sub_violation(grid) <= INEQUALITY_SLACK
            && self.super_violation(grid) <= INEQUALITY_SLACK
            && self.ordered(grid)
    }
}

/// Builds the sub/supersolution pair for the branch by a deterministic constant search.
pub fn build_bracket(params: &ProblemParams, branch: Branch) -> Result<Bracket> {
    let p = params.require_p()?;
    params.validate()?;
    let n = params.n;
    let mu = params.mu;
    let table = derive_exponents(params)?;
    let lp = lambda_of(n, -2.0 / (p - 1.0));
    let (alpha, row) = match branch {
        Branch::Plus => {
            if p >= table.p_c * (1.0 - CRITICAL_EPS) {
                return Err(Error::NoBracket(format!(
                    "plus branch needs p < p_c = {}; Lambda_0 = {} <= 0",
                    table.p_c,
                    lp - table.lambda_alpha_plus
                )));
            }
            (table.alpha_plus, 1)
        }
        Branch::Minus => {
            if p >= table.p_ko * (1.0 - CRITICAL_EPS) {
                return Err(Error::NoBracket(format!(
                    "minus branch needs p < p_KO = {}",
                    table.p_ko
                )));
            }
            (table.alpha_minus, minus_row(&table, p))
        }
    };
    let lambda_0 = lp - lambda_of(n, alpha);
    let eps_max = match branch {
        Branch::Plus => 2f64.min(2.0 / (p - 1.0) - (n as f64 - 2.0) - alpha),
        Branch::Minus => (1.0 - 2.0 * alpha).min(alpha * (p - 1.0) + 2.0),
    };
    if !(eps_max > 0.0) {
        return Err(Error::NoBracket(format!("empty admissible interval for epsilon (upper end {eps_max})")));
    }
    let epsilon = 0.5 * eps_max;
    let lambda_eps = lp - lambda_of(n, alpha + epsilon);

    let mut b = Bracket {
        branch,
        row,
        n,
        mu,
        p,
        alpha,
        tau: 1.0,
        c: 1.0,
        kappa_sub: 0.0,
        kappa_super: match row {
            1 => 0.5,
            2 => 0.0,
            _ => 2.0,
        },
        epsilon,
        lambda_0,
        lambda_eps,
        sub_margin: 0.0,
        super_margin: 0.0,
    };

    if branch == Branch::Minus {
        // kappa > 1 with the leading bracket of the subsolution positive on its support
        let grid = verification_grid(VERIFY_POINTS);
        let mut kappa: f64 = 2.0;
        let mut ok = false;
        for _ in 0..MAX_STEPS {
            let cutoff = kappa.powf(-1.0 / epsilon);
            ok = grid.iter().filter(|&&t| t <= cutoff).all(|&t| {
                lambda_0 * t.powf(2.0 - epsilon) - kappa * epsilon * (2.0 * alpha + epsilon - 1.0) - kappa * lambda_eps * t * t > 0.0
            });
            if ok {
                break;
            }
            kappa *= 2.0;
        }
        if !ok {
            return Err(Error::SearchExhausted("kappa for the minus-branch subsolution".into()));
        }
        b.kappa_sub = kappa;
    }

    // the zero-flux minus-branch solution stays below Lambda_0^{1/(p-1)} when mu <= 0
    let c_floor = if branch == Branch::Minus && lambda_0 > 0.0 {
        lambda_0.powf(1.0 / (p - 1.0))
    } else {
        0.0
    };

    // natural size of the solution; matters when p is close to 1
    let scale = lambda_0.abs().max(lambda_eps.abs()).max(1.0).powf(1.0 / (p - 1.0));
    if scale.is_finite() {
        b.c = 2f64.powi(scale.log2().floor().min(1000.0) as i32).max(1.0);
    }

    for points in [VERIFY_POINTS, 2 * VERIFY_POINTS] {
        let grid = verification_grid(points);
        let mut steps = 0;
        while b.c < c_floor || b.super_violation(&grid) > INEQUALITY_SLACK {
            b.c *= 2.0;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::SearchExhausted(format!("supersolution constant c (reached {})", b.c)));
            }
        }
        steps = 0;
        while b.sub_violation(&grid) > INEQUALITY_SLACK || !b.ordered(&grid) {
            b.tau *= 0.5;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::SearchExhausted(format!("subsolution constant tau (reached {})", b.tau)));
            }
        }
        b.sub_margin = b.sub_violation(&grid);
        b.super_margin = b.super_violation(&grid);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, mu: f64, p: f64) -> ProblemParams {
        ProblemParams::nonlinear(n, mu, p).unwrap()
    }

    #[test]
    fn plus_row_one() {
        let b = build_bracket(&params(3, 0.0, 1.5), Branch::Plus).unwrap();
        assert_eq!(b.row, 1);
        assert!(b.kappa_super < 1.0 && b.epsilon < 2.0 && 2.0 * b.alpha > 1.0);
        assert!((b.sub(0.3) - b.tau * 0.3).abs() < 1e-15);
        let fine = verification_grid(2 * VERIFY_POINTS);
        assert!(b.verify(&fine));
    }

    #[test]
    fn minus_row_three_contains_constant() {
        let b = build_bracket(&params(3, 0.0, 2.0), Branch::Minus).unwrap();
        assert_eq!(b.row, 3);
        assert!(b.kappa_sub > 1.0 && b.kappa_super > 1.0);
        assert!(2.0 * b.alpha + b.epsilon - 1.0 < 0.0);
        assert!(b.alpha * (b.p - 1.0) + 2.0 - b.epsilon > 0.0);
        for t in verification_grid(VERIFY_POINTS) {
            assert!(b.sub(t) <= 2.0 && 2.0 <= b.sup(t), "t={t}");
        }
    }

    #[test]
    fn rows_two_and_four() {
        assert_eq!(build_bracket(&params(3, 0.0, 3.5), Branch::Minus).unwrap().row, 2);
        assert_eq!(build_bracket(&params(2, -0.2, 2.0), Branch::Minus).unwrap().row, 4);
    }

    #[test]
    fn plus_branch_above_critical() {
        for p in [2.0, 2.5, 3.0] {
            let err = build_bracket(&params(3, 0.0, p), Branch::Plus).unwrap_err();
            assert!(matches!(err, Error::NoBracket(_)), "{err}");
        }
        assert!(build_bracket(&params(3, -2.0, 4.0), Branch::Minus).is_err());
    }

    #[test]
    fn power_operator_identity() {
        // L t^{alpha+eps} = eps(2 alpha + eps - 1) t^{alpha+eps-2} + Lambda_eps t^{alpha+eps}
        let b = build_bracket(&params(4, -0.5, 1.4), Branch::Plus).unwrap();
        let (a, e) = (b.alpha, b.epsilon);
        let t: f64 = 0.37;
        let (r, _) = b.residual(&vec![(1.0, a + e)], t);
        let lhs = r + t.powf(a + e).powf(b.p);
        let rhs = e * (2.0 * a + e - 1.0) * t.powf(a + e - 2.0) + b.lambda_eps * t.powf(a + e);
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs());
    }
}
