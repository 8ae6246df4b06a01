//! Independent eigenvalue oracle: a graded finite-volume discretization of the
//! weighted form for `w = k / t^{alpha_+}`,
//! `-(t^{2a} sigma w')' + t^{2a} rho nu/(1-t^2) w = (Lambda - Lambda(a)) t^{2a} rho w`,
//! solved exactly by Sturm-sequence bisection on the symmetric tridiagonal matrix.

use crate::exponents::{alpha_roots, lambda_of, nu_of};
use crate::numerics::gauss_legendre;

fn grade(s: f64) -> f64 {
    s * s * (3.0 - 2.0 * s)
}

fn grade_d(s: f64) -> f64 {
    6.0 * s * (1.0 - s)
}

/// Number of eigenvalues of the tridiagonal matrix `(d, e)` below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let prev = if q == 0.0 { f64::EPSILON * (d[i - 1].abs() + 1.0) } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `count` eigenvalues `Lambda` of the discretized problem with `points` cells.
pub fn discretized_eigenvalues(n: u32, mu: f64, m: u32, points: usize, count: usize) -> Vec<f64> {
    let (ap, _) = alpha_roots(mu);
    let nu = nu_of(n, m);
    let half = (n as f64 - 1.0) / 2.0;
    let sigma = |t: f64| t.powf(2.0 * ap) * (1.0 - t * t).powf(half);
    let rho = |t: f64| t.powf(2.0 * ap) * (1.0 - t * t).powf(half - 1.0);
    let h = 1.0 / points as f64;
    let (gx, gw) = gauss_legendre(6);
    let integrate = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| -> f64 {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        gx.iter().zip(&gw).map(|(x, w)| w * r * f(c + r * x)).sum()
    };
    // a nonzero azimuthal mode vanishes on the axis
    let last = if m > 0 { points - 1 } else { points };
    let size = last + 1;
    let flux: Vec<f64> = (0..points)
        .map(|i| {
            let s = (i as f64 + 0.5) * h;
            sigma(grade(s)) / grade_d(s) / h
        })
        .collect();
    let mut diag = vec![0.0; size];
    let mut mass = vec![0.0; size];
    for i in 0..size {
        let lo = ((i as f64 - 0.5) * h).max(0.0);
        let hi = ((i as f64 + 0.5) * h).min(1.0);
        let s_i = i as f64 * h;
        let weight = |s: f64| rho(grade(s)) * grade_d(s);
        let mut b = 0.0;
        let mut c = 0.0;
        for (x0, x1) in [(lo, s_i), (s_i, hi)] {
            if x1 > x0 {
                b += integrate(x0, x1, &weight);
                if nu > 0.0 {
                    c += integrate(x0, x1, &|s| {
                        let t = grade(s);
                        weight(s) * nu / (1.0 - t * t)
                    });
                }
            }
        }
        mass[i] = b;
        diag[i] = c + if i > 0 { flux[i - 1] } else { 0.0 } + if i < points { flux[i] } else { 0.0 };
    }
    let d: Vec<f64> = diag.iter().zip(&mass).map(|(k, b)| k / b).collect();
    let e: Vec<f64> = (0..size - 1).map(|i| -flux[i] / (mass[i] * mass[i + 1]).sqrt()).collect();

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..size {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < size { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let shift = lambda_of(n, ap);
    (0..count.min(size))
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if sturm_count(&d, &e, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
                if b - a <= 1e-15 * b.abs().max(1.0) {
                    break;
                }
            }
            0.5 * (a + b) + shift
        })
        .collect()
}

/// Richardson extrapolation of [`discretized_eigenvalues`] from `points` and `2 * points` cells
/// (second-order scheme).
pub fn extrapolated_eigenvalues(n: u32, mu: f64, m: u32, points: usize, count: usize) -> Vec<f64> {
    let coarse = discretized_eigenvalues(n, mu, m, points, count);
    let fine = discretized_eigenvalues(n, mu, m, 2 * points, count);
    coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}
