//! Multi-start consistency of the plus-branch profile.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::solver::{monotone_iteration, newton_iteration, System};
use super::{build_bracket, Branch, DEFAULT_CELLS};
use crate::error::{Error, Result};
use crate::exponents::ProblemParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub n_starts: usize,
    pub seed: u64,
    /// How each start was produced.
    pub methods: Vec<String>,
    /// `w(0)` of each limit.
    pub w0: Vec<f64>,
    /// Sup-norm distance of each limit from the first, relative to its maximum.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub w0_positive: bool,
}

/// Solves the plus-branch problem from `n_starts` starting iterates and checks that the limits agree.
/// Start 0 is the bracket supersolution, start 1 a doubled supersolution; the rest are
/// random positive vectors clipped to the bracket, driven by projected Newton.
pub fn check_uniqueness_plus(params: &ProblemParams, n_starts: usize, tol: f64, seed: u64) -> Result<UniquenessReport> {
    if n_starts < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 starts, got {n_starts}")));
    }
    let bracket = build_bracket(params, Branch::Plus)?;
    let sys = System::new(params.n, bracket.p, bracket.alpha, bracket.lambda_0, DEFAULT_CELLS)?;
    let solve_tol = (1e-2 * tol).max(1e-10);
    let lo: Vec<f64> = sys.t.iter().map(|&t| bracket.sub_w(t)).collect();
    let hi: Vec<f64> = sys.t.iter().map(|&t| bracket.super_w(t)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut limits = Vec::with_capacity(n_starts);
    let mut methods = Vec::with_capacity(n_starts);
    for k in 0..n_starts {
        let it = match k {
            0 => {
                methods.push("monotone from supersolution".to_string());
                monotone_iteration(&sys, &bracket, hi.clone(), false, solve_tol)?
            }
            1 => {
                let mut wide = bracket.clone();
                wide.c *= 2.0;
                let start = sys.t.iter().map(|&t| wide.super_w(t)).collect();
                methods.push("monotone from 2c supersolution".to_string());
                monotone_iteration(&sys, &wide, start, false, solve_tol)?
            }
            _ => {
                let start = lo.iter().zip(&hi).map(|(a, b)| a + rng.gen::<f64>() * (b - a)).collect();
                methods.push("projected Newton from random start".to_string());
                newton_iteration(&sys, &lo, &hi, start, solve_tol)?
            }
        };
        limits.push(it.w);
    }

    let reference = &limits[0];
    let size = reference.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let deviations: Vec<f64> = limits
        .iter()
        .map(|w| w.iter().zip(reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / size)
        .collect();
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    let w0: Vec<f64> = limits.iter().map(|w| w[0]).collect();
    if max_deviation > tol {
        return Err(Error::NonUniqueLimit { deviation: max_deviation });
    }
    Ok(UniquenessReport {
        n_starts,
        seed,
        methods,
        w0_positive: w0.iter().all(|&x| x > 0.0),
        w0,
        deviations,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_starts_agree() {
        let pr = ProblemParams::nonlinear(3, 0.0, 1.5).unwrap();
        let report = check_uniqueness_plus(&pr, 5, 1e-6, 7).unwrap();
        assert!(report.max_deviation < 1e-6, "{:?}", report.deviations);
        assert!(report.w0_positive);
    }
}
