//! Closed-form exponents, critical powers and regime classification.
//!
//! Everything here is plain 64-bit arithmetic on the triple `(n, mu, p)`.
//! Extended reals (`p_KO`, `p_c^-`) are stored as `f64::INFINITY` when
//! infinite and serialized as the string `"inf"`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two values closer than this are treated as equal when comparing `p`
/// against a critical exponent.
pub const CRITICAL_EPS: f64 = 1e-12;

/// `Lambda(gamma) = gamma (gamma + n - 2)`.
#[inline]
pub fn lambda_of(n: u32, gamma: f64) -> f64 {
    gamma * (gamma + n as f64 - 2.0)
}

/// The two roots of `Lambda(gamma) = lambda`, ordered `(gamma_+, gamma_-)`.
pub fn gamma_roots(n: u32, lambda: f64) -> (f64, f64) {
    let half = (n as f64 - 2.0) / 2.0;
    let disc = (lambda + half * half).max(0.0).sqrt();
    (disc - half, -disc - half)
}

/// Roots of `x^2 + b x + c = 0` (real discriminant assumed), larger first.
pub(crate) fn quadratic_roots(b: f64, c: f64) -> (f64, f64) {
    let disc = (b * b - 4.0 * c).max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * disc);
    if q == 0.0 {
        // b == 0 and c == 0
        return (0.0, 0.0);
    }
    let (r1, r2) = (q, c / q);
    if r1 >= r2 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: u32,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl ProblemParams {
    pub fn new(n: u32, mu: f64, p: Option<f64>) -> Result<Self> {
        let params = Self { n, mu, p };
        params.validate()?;
        Ok(params)
    }

    pub fn linear(n: u32, mu: f64) -> Result<Self> {
        Self::new(n, mu, None)
    }

    pub fn nonlinear(n: u32, mu: f64, p: f64) -> Result<Self> {
        Self::new(n, mu, Some(p))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!("n = {} must be >= 2", self.n)));
        }
        if !self.mu.is_finite() || self.mu >= 0.25 {
            return Err(Error::InvalidParams(format!(
                "mu = {} must be finite and < 1/4 (no positive L_mu-harmonics otherwise)",
                self.mu
            )));
        }
        if let Some(p) = self.p {
            if !p.is_finite() || p <= 1.0 {
                return Err(Error::InvalidParams(format!("p = {p} must be finite and > 1")));
            }
        }
        Ok(())
    }

    pub fn require_p(&self) -> Result<f64> {
        self.p
            .ok_or_else(|| Error::InvalidParams("nonlinearity exponent p is required".into()))
    }
}

/// Indicial roots `alpha_+-` of `alpha(alpha-1) + mu = 0`.
pub fn alpha_roots(mu: f64) -> (f64, f64) {
    let d = (0.25 - mu).sqrt();
    (0.5 + d, 0.5 - d)
}

/// Serde adapter for extended reals: finite values as numbers, `+inf` as `"inf"`.
pub mod ext_real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentTable {
    pub n: u32,
    pub mu: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub lambda_alpha_plus: f64,
    pub lambda_alpha_minus: f64,
    pub p_c: f64,
    #[serde(with = "ext_real")]
    pub p_ko: f64,
    #[serde(with = "ext_real")]
    pub p_c_minus: f64,
    pub mu_star: f64,
    /// `C_{p,mu}`; `None` when `p` is absent or the radicand is negative.
    pub c_pmu: Option<f64>,
}

impl ExponentTable {
    pub fn lambda(&self, gamma: f64) -> f64 {
        lambda_of(self.n, gamma)
    }
}

pub fn derive_exponents(params: &ProblemParams) -> Result<ExponentTable> {
    params.validate()?;
    let n = params.n;
    let nf = n as f64;
    let mu = params.mu;
    let (ap, am) = alpha_roots(mu);
    let mu_star = -nf * (nf - 2.0) / 4.0;
    let p_ko = if mu >= 0.0 { f64::INFINITY } else { 1.0 - 2.0 / am };
    let p_c_minus = if mu > mu_star {
        1.0 + 2.0 / (nf - 2.0 + am)
    } else {
        f64::INFINITY
    };
    let c_pmu = params.p.and_then(|p| critical_constant(p, mu));
    Ok(ExponentTable {
        n,
        mu,
        alpha_plus: ap,
        alpha_minus: am,
        lambda_alpha_plus: lambda_of(n, ap),
        lambda_alpha_minus: lambda_of(n, am),
        p_c: 1.0 + 2.0 / (nf - 2.0 + ap),
        p_ko,
        p_c_minus,
        mu_star,
        c_pmu,
    })
}

/// `C_{p,mu} = (2(p+1)/(p-1)^2 + mu)^{1/(p-1)}`, or `None` when the radicand is negative.
///
/// A radicand within rounding of zero (this happens exactly at `p = p_KO`) returns `Some(0.0)`.
pub fn critical_constant(p: f64, mu: f64) -> Option<f64> {
    let a = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
    let radicand = a + mu;
    if radicand.abs() <= 1e-12 * (a + mu.abs()) {
        Some(0.0)
    } else if radicand < 0.0 {
        None
    } else {
        Some(radicand.powf(1.0 / (p - 1.0)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralIndices {
    pub m: u32,
    pub nu_m: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    /// Exponent of the solution that is smooth on the `x_1`-axis. Equals `m/2`;
    /// this is `kappa_plus` for `n >= 3` and `kappa_minus` for `n = 2, m = 0`.
    pub kappa_regular: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

/// `nu_m = m (m + n - 3)`.
pub fn nu_of(n: u32, m: u32) -> f64 {
    let m = m as f64;
    m * (m + n as f64 - 3.0)
}

/// Indicial roots at `t = 1` and radial exponents for a given angular eigenvalue.
///
/// The roots are taken directly from `kappa^2 + kappa (n-3)/2 - nu_m/4 = 0`.
pub fn angular_indices(n: u32, _mu: f64, m: u32, lambda: f64) -> SpectralIndices {
    let nu = nu_of(n, m);
    let (kp, km) = quadratic_roots((n as f64 - 3.0) / 2.0, -nu / 4.0);
    let target = m as f64 / 2.0;
    let kappa_regular = if (kp - target).abs() <= (km - target).abs() { kp } else { km };
    let (gp, gm) = gamma_roots(n, lambda);
    SpectralIndices {
        m,
        nu_m: nu,
        kappa_plus: kp,
        kappa_minus: km,
        kappa_regular,
        gamma_plus: gp,
        gamma_minus: gm,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlusBranch {
    ExistsUnique,
    Nonexistent,
    /// `p` equals `p_c` to within [`CRITICAL_EPS`].
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinusBranch {
    #[serde(rename = "exists")]
    Exists,
    #[serde(rename = "nonexistent_KO")]
    NonexistentKo,
    #[serde(rename = "critical")]
    Critical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub plus_branch: PlusBranch,
    pub minus_branch: MinusBranch,
    pub strong_singularity_possible: bool,
    /// Bracket recipe for the plus branch (always row 1 when it exists).
    pub plus_row: Option<u8>,
    /// Bracket recipe for the minus branch (rows 2-4), `None` when `p >= p_KO`.
    pub table1_row: Option<u8>,
    pub applicable_theorems: Vec<String>,
}

fn compare(p: f64, critical: f64) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if critical.is_infinite() {
        return Ordering::Less;
    }
    if (p - critical).abs() <= CRITICAL_EPS * critical.abs().max(1.0) {
        Ordering::Equal
    } else if p < critical {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Minus-branch bracket row for `p < p_KO`.
pub fn minus_row(table: &ExponentTable, p: f64) -> u8 {
    if table.mu <= table.mu_star {
        4
    } else if p >= table.p_c_minus {
        2
    } else {
        3
    }
}

pub fn classify_regime(params: &ProblemParams) -> Result<RegimeClassification> {
    use std::cmp::Ordering;
    let p = params.require_p()?;
    let table = derive_exponents(params)?;
    let mut theorems = Vec::new();

    let plus_branch = match compare(p, table.p_c) {
        Ordering::Less => {
            theorems.push("plus_existence_uniqueness".to_string());
            PlusBranch::ExistsUnique
        }
        Ordering::Equal => {
            theorems.push("plus_separable_nonexistence".to_string());
            PlusBranch::Critical
        }
        Ordering::Greater => {
            theorems.push("plus_separable_nonexistence".to_string());
            theorems.push("plus_nonexistence".to_string());
            PlusBranch::Nonexistent
        }
    };
    let minus_branch = match compare(p, table.p_ko) {
        Ordering::Less => {
            theorems.push("minus_existence".to_string());
            MinusBranch::Exists
        }
        Ordering::Equal => MinusBranch::Critical,
        Ordering::Greater => {
            theorems.push("minus_nonexistence_keller_osserman".to_string());
            MinusBranch::NonexistentKo
        }
    };
    let strong = minus_branch == MinusBranch::Exists;
    if strong {
        theorems.push("uniform_strong_singularity".to_string());
    }
    Ok(RegimeClassification {
        plus_branch,
        minus_branch,
        strong_singularity_possible: strong,
        plus_row: (plus_branch == PlusBranch::ExistsUnique).then_some(1),
        table1_row: (minus_branch == MinusBranch::Exists).then(|| minus_row(&table, p)),
        applicable_theorems: theorems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn planar_laplacian() {
        let t = derive_exponents(&ProblemParams::linear(2, 0.0).unwrap()).unwrap();
        assert_eq!(t.alpha_plus, 1.0);
        assert_eq!(t.alpha_minus, 0.0);
        assert_eq!(t.lambda_alpha_plus, 1.0);
        assert!(t.p_ko.is_infinite());
    }

    #[test]
    fn n3_mu_minus_two() {
        let t = derive_exponents(&ProblemParams::linear(3, -2.0).unwrap()).unwrap();
        assert!(close(t.alpha_plus, 2.0, 1e-15));
        assert!(close(t.alpha_minus, -1.0, 1e-15));
        assert!(close(t.p_ko, 3.0, 1e-15));
        assert!(close(t.p_c, 5.0 / 3.0, 1e-15));
    }

    #[test]
    fn three_sixteenths() {
        for n in 2..6 {
            let t = derive_exponents(&ProblemParams::linear(n, 3.0 / 16.0).unwrap()).unwrap();
            assert!(close(t.alpha_plus, 0.75, 1e-15));
            assert!(close(t.alpha_minus, 0.25, 1e-15));
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(ProblemParams::linear(3, 0.25).is_err());
        assert!(ProblemParams::linear(3, 0.3).is_err());
        assert!(ProblemParams::linear(1, 0.0).is_err());
        assert!(ProblemParams::nonlinear(3, 0.0, 1.0).is_err());
    }

    #[test]
    fn critical_constant_values() {
        assert!(close(critical_constant(2.0, 0.0).unwrap(), 6.0, 1e-14));
        assert!(close(critical_constant(3.0, 0.0).unwrap(), 2f64.sqrt(), 1e-14));
        assert_eq!(critical_constant(2.0, -6.0), Some(0.0));
        assert_eq!(critical_constant(3.0, -5.0), None);
    }

    #[test]
    fn critical_constant_vanishes_at_p_ko() {
        // 2(p+1)/(p-1)^2 = -mu exactly at p = p_KO, for any mu < 0
        let mut mu = -0.013;
        while mu > -40.0 {
            let t = derive_exponents(&ProblemParams::linear(3, mu).unwrap()).unwrap();
            let p = t.p_ko;
            let a = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
            assert!((a + mu).abs() <= 1e-10 * a, "mu={mu}");
            assert_eq!(critical_constant(p, mu), Some(0.0), "mu={mu}");
            mu *= 1.37;
        }
    }

    #[test]
    fn kappa_examples() {
        let k = angular_indices(5, 0.0, 0, 1.0);
        assert_eq!(k.nu_m, 0.0);
        assert_eq!(k.kappa_plus, 0.0);
        assert!(close(k.kappa_minus, -1.0, 1e-15));
        for kap in [k.kappa_plus, k.kappa_minus] {
            assert!((kap * kap + kap - 0.0).abs() < 1e-15);
        }
        let k = angular_indices(3, 0.0, 1, 1.0);
        assert_eq!(k.nu_m, 1.0);
        assert!(close(k.kappa_plus, 0.5, 1e-15));
        assert!(close(k.kappa_minus, -0.5, 1e-15));
        let k = angular_indices(3, 0.0, 0, 2.0);
        assert!(close(k.gamma_plus, 1.0, 1e-15));
        assert!(close(k.gamma_minus, -2.0, 1e-15));
    }

    #[test]
    fn kappa_regular_is_half_m() {
        for n in 2..8 {
            for m in 0..5 {
                let k = angular_indices(n, 0.0, m, 1.0);
                assert!(close(k.kappa_regular, m as f64 / 2.0, 1e-14), "n={n} m={m}");
                if n >= 3 {
                    assert_eq!(k.kappa_regular, k.kappa_plus);
                    if m >= 1 {
                        assert!(k.kappa_plus > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let c = classify_regime(&ProblemParams::nonlinear(3, -2.0, 4.0).unwrap()).unwrap();
        assert_eq!(c.minus_branch, MinusBranch::NonexistentKo);
        let c = classify_regime(&ProblemParams::nonlinear(3, 0.0, 3.0).unwrap()).unwrap();
        assert_eq!(c.plus_branch, PlusBranch::Nonexistent);
        assert_eq!(c.minus_branch, MinusBranch::Exists);
        let c = classify_regime(&ProblemParams::nonlinear(3, 0.1, 1.5).unwrap()).unwrap();
        assert_eq!(c.plus_branch, PlusBranch::ExistsUnique);
        assert_eq!(c.minus_branch, MinusBranch::Exists);
        assert_eq!(c.table1_row, Some(3));
        // p_c^- through two routes
        let am = 0.5 - 0.15f64.sqrt();
        let t = derive_exponents(&ProblemParams::linear(3, 0.1).unwrap()).unwrap();
        let via_lambda = {
            // Lambda(-2/(p-1)) = Lambda(alpha_-) at p = p_c^-
            let q = 2.0 / (t.p_c_minus - 1.0);
            lambda_of(3, -q) - lambda_of(3, am)
        };
        assert!(close(t.p_c_minus, 1.0 + 2.0 / (1.0 + am), 1e-14));
        assert!(via_lambda.abs() < 1e-12);
        assert!((t.p_c_minus - 2.797).abs() < 1e-3);
    }

    #[test]
    fn critical_tags() {
        let c = classify_regime(&ProblemParams::nonlinear(3, 0.0, 2.0).unwrap()).unwrap();
        assert_eq!(c.plus_branch, PlusBranch::Critical);
        let c = classify_regime(&ProblemParams::nonlinear(3, -2.0, 3.0).unwrap()).unwrap();
        assert_eq!(c.minus_branch, MinusBranch::Critical);
    }

    #[test]
    fn serde_ext_real() {
        let t = derive_exponents(&ProblemParams::linear(3, 0.0).unwrap()).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"p_ko\":\"inf\""));
        let back: ExponentTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    proptest! {
        #[test]
        fn indicial_identity(n in 2u32..9, mu in -10.0f64..0.2499) {
            let t = derive_exponents(&ProblemParams::linear(n, mu).unwrap()).unwrap();
            for a in [t.alpha_plus, t.alpha_minus] {
                prop_assert!((a * (a - 1.0) + mu).abs() <= 1e-12);
            }
            prop_assert!((t.alpha_plus + t.alpha_minus - 1.0).abs() <= 1e-15);
            prop_assert!(t.alpha_minus < 0.5 && 0.5 < t.alpha_plus);
            prop_assert!(1.0 < t.p_c && t.p_c < t.p_ko);
        }

        #[test]
        fn lambda_reflection(n in 2u32..9, g in -20.0f64..20.0) {
            let refl = -(g + n as f64 - 2.0);
            prop_assert!((lambda_of(n, g) - lambda_of(n, refl)).abs() <= 1e-12 * (1.0 + g * g));
        }

        #[test]
        fn classification_total(n in 2u32..9, mu in -10.0f64..0.2499, p in 1.0001f64..12.0) {
            let c = classify_regime(&ProblemParams::nonlinear(n, mu, p).unwrap()).unwrap();
            let t = derive_exponents(&ProblemParams::linear(n, mu).unwrap()).unwrap();
            let below = |crit: f64| crit.is_infinite() || p < crit - 1e-12 * crit;
            prop_assert_eq!(c.plus_branch == PlusBranch::ExistsUnique, below(t.p_c));
            prop_assert_eq!(c.minus_branch == MinusBranch::Exists, below(t.p_ko));
            if let Some(row) = c.table1_row {
                let l0m = lambda_of(n, -2.0 / (p - 1.0)) - t.lambda_alpha_minus;
                match row {
                    2 => prop_assert!(mu > t.mu_star && l0m <= 1e-9),
                    3 => prop_assert!(mu > t.mu_star && l0m > -1e-9),
                    4 => prop_assert!(mu <= t.mu_star),
                    _ => prop_assert!(false),
                }
            }
        }

        #[test]
        fn p_c_decreasing_in_alpha(n in 2u32..9, mu1 in -10.0f64..0.24, d in 0.001f64..5.0) {
            // smaller mu => larger alpha_+ => smaller p_c
            let a = derive_exponents(&ProblemParams::linear(n, mu1).unwrap()).unwrap();
            let b = derive_exponents(&ProblemParams::linear(n, mu1 - d).unwrap()).unwrap();
            prop_assert!(b.alpha_plus > a.alpha_plus);
            prop_assert!(b.p_c < a.p_c);
        }
    }
}
