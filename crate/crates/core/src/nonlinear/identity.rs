//! Integral identity obtained by testing the profile equation with `t^{alpha_+}`:
//! `Lambda_0 I_1 + (alpha_+ - alpha) w(0) = I_2`, where
//! `I_1 = int rho v t^{alpha_+}`, `I_2 = int rho v^p t^{alpha_+}`, `rho = (1-t^2)^{(n-3)/2}`
//! and `Lambda_0 = Lambda(-2/(p-1)) - Lambda(alpha_+)`. The boundary term vanishes on the plus branch.

use super::NonlinearProfile;
use crate::error::{Error, Result};
use crate::exponents::{alpha_roots, lambda_of};
use crate::numerics::gauss_legendre;

const PANELS: usize = 400;
const ORDER: usize = 8;
const GEOMETRIC_LEVELS: usize = 48;

fn grade(s: f64) -> f64 {
    s * s * (3.0 - 2.0 * s)
}

/// `int_0^1 f(t) dt` by Gauss-Legendre panels in `s` (`t = s^2(3-2s)`), with the first
/// panel split geometrically toward `s = 0`.
fn quadrature(f: &dyn Fn(f64) -> f64) -> f64 {
    let (gx, gw) = gauss_legendre(ORDER);
    let panel = |a: f64, b: f64| -> f64 {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        gx.iter()
            .zip(&gw)
            .map(|(x, w)| {
                let s = c + r * x;
                w * r * f(grade(s)) * 6.0 * s * (1.0 - s)
            })
            .sum()
    };
    let h = 1.0 / PANELS as f64;
    let mut sum: f64 = (1..PANELS).map(|i| panel(i as f64 * h, (i + 1) as f64 * h)).sum();
    let mut hi = h;
    for _ in 0..GEOMETRIC_LEVELS {
        sum += panel(0.5 * hi, hi);
        hi *= 0.5;
    }
    sum
}

/// Relative defect `|Lambda_0 I_1 + B - I_2| / (|Lambda_0 I_1| + |B| + |I_2|)` for a profile `v`
/// with `v ~ w0 t^alpha` at 0.
pub fn integral_identity_defect(n: u32, mu: f64, p: f64, alpha: f64, w0: f64, v: &dyn Fn(f64) -> f64) -> Result<f64> {
    let (ap, _) = alpha_roots(mu);
    for e in [alpha + ap, p * alpha + ap] {
        if e <= -1.0 {
            return Err(Error::DivergentIntegral(format!("integrand ~ t^{e} at t=0")));
        }
    }
    let lambda_0 = lambda_of(n, -2.0 / (p - 1.0)) - lambda_of(n, ap);
    let k = (n as f64 - 3.0) / 2.0;
    let weight = |t: f64| (1.0 - t * t).powf(k) * t.powf(ap);
    let i1 = quadrature(&|t| if t >= 1.0 && k < 0.0 { 0.0 } else { weight(t) * v(t) });
    let i2 = quadrature(&|t| if t >= 1.0 && k < 0.0 { 0.0 } else { weight(t) * v(t).max(0.0).powf(p) });
    let boundary = (ap - alpha) * w0;
    let lhs = lambda_0 * i1 + boundary;
    Ok((lhs - i2).abs() / (lambda_0.abs() * i1.abs() + boundary.abs() + i2.abs()))
}

pub fn integral_identity_check(profile: &NonlinearProfile) -> Result<f64> {
    let pr = &profile.params;
    integral_identity_defect(pr.n, pr.mu, profile.p(), profile.alpha(), profile.v_limit, &|t| profile.v(t))
}
