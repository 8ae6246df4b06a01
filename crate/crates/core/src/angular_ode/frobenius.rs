//! Local power series at the regular singular points `t = 0` and `t = 1`.
//!
//! The angular equation is multiplied through so that, in the local variable
//! `x` (`x = t` at 0, `x = 1 - t` at 1), it reads
//! `x^2 A(x) y'' + x B(x) y' + C(x) y = 0` with polynomial `A, B, C` and
//! `A(0) != 0`. Derivatives here are taken in `x`.

use serde::{Deserialize, Serialize};

use super::LinearAngularODE;
use crate::error::{Error, Result};

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn poly_scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Coefficient polynomials `(A, B, C)` of the normalized equation at the endpoint.
pub(crate) fn local_polynomials(ode: &LinearAngularODE, endpoint: u8) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let nm1 = ode.n as f64 - 1.0;
    let (mu, nu, lam) = (ode.mu, ode.nu, ode.lambda);
    if endpoint == 0 {
        let a = vec![1.0, 0.0, -2.0, 0.0, 1.0];
        let b = vec![0.0, 0.0, -nm1, 0.0, nm1];
        let c = vec![mu, 0.0, lam - mu - nu, 0.0, -lam];
        (a, b, c)
    } else {
        let two_minus = [2.0, -1.0];
        let one_minus = [1.0, -1.0];
        let one_minus_sq = poly_mul(&one_minus, &one_minus);
        let a = poly_mul(&poly_mul(&two_minus, &two_minus), &one_minus_sq);
        let b = poly_scale(&poly_mul(&poly_mul(&one_minus_sq, &one_minus), &two_minus), nm1);
        let s_two_minus = poly_mul(&[0.0, 1.0], &two_minus);
        let c = poly_add(
            &poly_add(&poly_scale(&s_two_minus, mu), &poly_scale(&poly_mul(&s_two_minus, &one_minus_sq), lam)),
            &poly_scale(&one_minus_sq, -nu),
        );
        (a, b, c)
    }
}

fn coeff(p: &[f64], i: usize) -> f64 {
    p.get(i).copied().unwrap_or(0.0)
}

/// `F_i(r) = A_i r (r-1) + B_i r + C_i`.
fn f_i(a: &[f64], b: &[f64], c: &[f64], i: usize, r: f64) -> f64 {
    coeff(a, i) * r * (r - 1.0) + coeff(b, i) * r + coeff(c, i)
}

/// Logarithmic part `log_coefficient * ln(x) * x^partner_exponent * sum partner[j] x^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogTerm {
    pub log_coefficient: f64,
    pub partner_exponent: f64,
    pub partner: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusExpansion {
    pub endpoint: u8,
    pub exponent: f64,
    pub coefficients: Vec<f64>,
    /// Local-variable radius inside which the truncation error is below ~1e-15 relative.
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_term: Option<LogTerm>,
}

impl FrobeniusExpansion {
    fn local(&self, t: f64) -> f64 {
        if self.endpoint == 0 {
            t
        } else {
            1.0 - t
        }
    }

    /// Value and `d/dt` derivative at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let x = self.local(t);
        let (v, dx) = series_eval(self.exponent, &self.coefficients, x);
        let (mut value, mut deriv_x) = (v, dx);
        if let Some(log) = &self.log_term {
            let (pv, pd) = series_eval(log.partner_exponent, &log.partner, x);
            let lnx = x.ln();
            value += log.log_coefficient * lnx * pv;
            deriv_x += log.log_coefficient * (lnx * pd + pv / x);
        }
        let deriv_t = if self.endpoint == 0 { deriv_x } else { -deriv_x };
        (value, deriv_t)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    /// Size of the last retained term at local distance `x`, relative to the leading term.
    pub fn tail_estimate(&self, x: f64) -> f64 {
        let n = self.coefficients.len();
        let last = self.coefficients[n - 1].abs().max(self.coefficients[n - 2].abs());
        last * x.powi(n as i32 - 2)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }
}

/// `x^e sum c_j x^j` and its `x`-derivative.
fn series_eval(exponent: f64, c: &[f64], x: f64) -> (f64, f64) {
    if x == 0.0 {
        return series_at_zero(exponent, c);
    }
    let mut s = 0.0;
    let mut ds = 0.0;
    for (j, cj) in c.iter().enumerate().rev() {
        s = s * x + cj;
        ds = ds * x + cj * (exponent + j as f64);
    }
    let xe = x.powf(exponent);
    (xe * s, xe / x * ds)
}

fn series_at_zero(exponent: f64, c: &[f64]) -> (f64, f64) {
    let power = |e: f64, coef: f64| {
        if e > 0.0 {
            0.0
        } else if e == 0.0 {
            coef
        } else {
            f64::INFINITY.copysign(coef)
        }
    };
    let value = power(exponent, c[0]);
    let deriv = c
        .iter()
        .enumerate()
        .map(|(j, cj)| (exponent + j as f64, cj))
        .find(|(e, cj)| *e != 0.0 && **cj != 0.0)
        .map_or(0.0, |(e, cj)| power(e - 1.0, cj * e));
    (value, deriv)
}

fn estimate_radius(c: &[f64]) -> f64 {
    let n = c.len() - 1;
    let mut r: f64 = 0.5;
    for (j, cj) in c.iter().enumerate().skip(1) {
        if *cj != 0.0 {
            r = r.min((1e-15 / cj.abs()).powf(1.0 / (n.max(j) as f64 + 1.0)).max(1e-300));
        }
    }
    r.min(0.5)
}

/// Power series solution `x^exponent (1 + c_1 x + ... + c_order x^order)`.
///
/// Fails with [`Error::ResonantIndices`] when the recurrence must divide by zero
/// with a nonzero right-hand side (a logarithmic solution).
pub fn frobenius_expansion(ode: &LinearAngularODE, endpoint: u8, exponent: f64, order: usize) -> Result<FrobeniusExpansion> {
    let (a, b, c) = local_polynomials(ode, endpoint);
    let scale = f_scale(&a, &b, &c, exponent, order);
    let f0_at = f_i(&a, &b, &c, 0, exponent);
    if f0_at.abs() > 1e-8 * scale {
        return Err(Error::InvalidParams(format!(
            "exponent {exponent} is not an indicial root at t={endpoint} (residual {f0_at})"
        )));
    }
    let coefficients = recurrence(&a, &b, &c, exponent, order, endpoint, scale, |_| 0.0)?;
    Ok(FrobeniusExpansion {
        endpoint,
        exponent,
        radius: estimate_radius(&coefficients),
        coefficients,
        log_term: None,
    })
}

fn f_scale(a: &[f64], b: &[f64], c: &[f64], exponent: f64, order: usize) -> f64 {
    let r = exponent.abs() + order as f64;
    let sum = |p: &[f64]| p.iter().map(|x| x.abs()).sum::<f64>();
    sum(a) * r * (r + 1.0) + sum(b) * r + sum(c) + 1.0
}

#[allow(clippy::too_many_arguments)]
fn recurrence(
    a: &[f64],
    b: &[f64],
    c: &[f64],
    exponent: f64,
    order: usize,
    endpoint: u8,
    scale: f64,
    forcing: impl Fn(usize) -> f64,
) -> Result<Vec<f64>> {
    let width = a.len().max(b.len()).max(c.len());
    let mut coeffs = vec![0.0; order + 1];
    coeffs[0] = 1.0;
    for j in 1..=order {
        let mut rhs = -forcing(j);
        for i in 1..width.min(j + 1) {
            rhs -= coeffs[j - i] * f_i(a, b, c, i, exponent + (j - i) as f64);
        }
        let f0 = f_i(a, b, c, 0, exponent + j as f64);
        if f0.abs() <= 1e-10 * scale {
            let mag: f64 = coeffs[..j].iter().map(|x| x.abs()).fold(0.0, f64::max);
            if rhs.abs() <= 1e-10 * scale * mag.max(1.0) {
                coeffs[j] = 0.0;
                continue;
            }
            return Err(Error::ResonantIndices { endpoint, index: j });
        }
        coeffs[j] = rhs / f0;
    }
    Ok(coeffs)
}

/// Second solution at a resonant endpoint:
/// `x^exponent sum c_j x^j + C ln(x) * (partner series)`, with `c_d = 0` at the resonant index.
pub fn frobenius_log_expansion(
    ode: &LinearAngularODE,
    endpoint: u8,
    exponent: f64,
    partner: &FrobeniusExpansion,
    order: usize,
) -> Result<FrobeniusExpansion> {
    let (a, b, c) = local_polynomials(ode, endpoint);
    let scale = f_scale(&a, &b, &c, exponent, order);
    let gap = partner.exponent - exponent;
    let d = gap.round();
    if (gap - d).abs() > 1e-9 || d < 1.0 {
        // Not resonant: the plain series suffices.
        return frobenius_expansion(ode, endpoint, exponent, order);
    }
    let d = d as usize;
    let beta = partner.exponent;
    let pc = &partner.coefficients;
    // G_k: coefficient of x^{beta+k} in A(2x phi' - phi) + B phi.
    let g = |k: usize| -> f64 {
        let mut s = 0.0;
        for i in 0..=k {
            if let Some(bj) = pc.get(k - i) {
                let r = beta + (k - i) as f64;
                s += (coeff(&a, i) * (2.0 * r - 1.0) + coeff(&b, i)) * bj;
            }
        }
        s
    };
    let width = a.len().max(b.len()).max(c.len());
    let mut coeffs = vec![0.0; order + 1];
    coeffs[0] = 1.0;
    let mut log_c = 0.0;
    for j in 1..=order {
        let mut rhs = 0.0;
        for i in 1..width.min(j + 1) {
            rhs -= coeffs[j - i] * f_i(&a, &b, &c, i, exponent + (j - i) as f64);
        }
        if j == d {
            log_c = rhs / g(0);
            coeffs[j] = 0.0;
            continue;
        }
        if j > d {
            rhs -= log_c * g(j - d);
        }
        let f0 = f_i(&a, &b, &c, 0, exponent + j as f64);
        if f0.abs() <= 1e-10 * scale {
            return Err(Error::ResonantIndices { endpoint, index: j });
        }
        coeffs[j] = rhs / f0;
    }
    let mut partner_coeffs = pc.clone();
    partner_coeffs.truncate(order.saturating_sub(d) + 1);
    Ok(FrobeniusExpansion {
        endpoint,
        exponent,
        radius: estimate_radius(&coeffs).min(partner.radius),
        coefficients: coeffs,
        log_term: (log_c != 0.0).then_some(LogTerm {
            log_coefficient: log_c,
            partner_exponent: beta,
            partner: partner_coeffs,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{alpha_roots, lambda_of};

    fn residual(ode: &LinearAngularODE, e: &FrobeniusExpansion, t: f64) -> f64 {
        // second derivative by central difference of the analytic first derivative
        let h = 1e-6 * t.min(1.0 - t);
        let (k, kd) = e.eval(t);
        let kdd = (e.eval(t + h).1 - e.eval(t - h).1) / (2.0 * h);
        let r = ode.residual(t, k, kd, kdd);
        r / (k.abs() / (t * t * (1.0 - t))).max(1e-300)
    }

    #[test]
    fn t_alpha_plus_is_exact() {
        for (n, mu) in [(2, 0.0), (3, -2.0), (5, 0.1875), (4, -0.7)] {
            let (ap, _) = alpha_roots(mu);
            let ode = LinearAngularODE::new(n, mu, 0.0, lambda_of(n, ap));
            let e = frobenius_expansion(&ode, 0, ap, 14).unwrap();
            for c in &e.coefficients[1..] {
                assert!(c.abs() < 1e-13, "n={n} mu={mu}: {:?}", e.coefficients);
            }
        }
    }

    #[test]
    fn slope_at_one() {
        let ode = LinearAngularODE::new(2, 0.0, 0.0, 0.25);
        let e = frobenius_expansion(&ode, 1, 0.0, 14).unwrap();
        let (k, kd) = e.eval(1.0 - 1e-12);
        assert!((kd / k - 0.25).abs() < 1e-9);
        // d/dt cos(gamma arccos t) at t = 1 equals gamma^2
        let g: f64 = 0.5;
        let t: f64 = 0.95;
        let exact = (g * t.acos()).cos();
        assert!((e.value(t) - exact).abs() < 1e-13);
    }

    #[test]
    fn vanishes_at_one_for_positive_kappa() {
        let ode = LinearAngularODE::new(3, 0.0, 1.0, 3.0);
        let e = frobenius_expansion(&ode, 1, 0.5, 14).unwrap();
        assert_eq!(e.eval(1.0).0, 0.0);
    }

    #[test]
    fn residual_decays_with_order() {
        let ode = LinearAngularODE::new(4, -0.3, 2.0, 1.7);
        let (ap, am) = alpha_roots(-0.3);
        for exp in [ap, am] {
            let e = frobenius_expansion(&ode, 0, exp, 8).unwrap();
            let r1 = residual(&ode, &e, 0.2).abs();
            let r2 = residual(&ode, &e, 0.1).abs();
            // residual ~ t^{order+1}: halving t shrinks it by ~2^9
            assert!(r2 < r1 / 100.0, "{r1} {r2}");
        }
        let k = crate::exponents::angular_indices(4, -0.3, 1, 1.7);
        let e = frobenius_expansion(&ode, 1, k.kappa_plus, 8).unwrap();
        let r1 = residual(&ode, &e, 0.8).abs();
        let r2 = residual(&ode, &e, 0.9).abs();
        assert!(r2 < r1 / 100.0, "{r1} {r2}");
    }

    #[test]
    fn resonance_detected_and_log_series_solves() {
        // mu = -3/4: alpha_+ = 3/2, alpha_- = -1/2, gap 2 hits an even power
        let n = 3;
        let mu = -0.75;
        let ode = LinearAngularODE::new(n, mu, 0.0, 1.3);
        let (ap, am) = alpha_roots(mu);
        let err = frobenius_expansion(&ode, 0, am, 14).unwrap_err();
        assert!(matches!(err, Error::ResonantIndices { endpoint: 0, index: 2 }));
        let plus = frobenius_expansion(&ode, 0, ap, 14).unwrap();
        let minus = frobenius_log_expansion(&ode, 0, am, &plus, 14).unwrap();
        assert!(minus.log_term.is_some());
        for t in [0.05, 0.1, 0.2] {
            assert!(residual(&ode, &minus, t).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn odd_gap_is_not_resonant() {
        // mu = 0: roots 0 and 1 differ by an odd integer; only even powers appear
        let ode = LinearAngularODE::new(2, 0.0, 0.0, 0.25);
        let e = frobenius_expansion(&ode, 0, 0.0, 14).unwrap();
        assert!((e.coefficients[2] + 0.125).abs() < 1e-15);
    }
}
