use serde::{Deserialize, Serialize};

use super::eigenvalue;
use crate::angular_ode::{classify_origin_behavior, solve_k_gamma, AngularProfile, HANDOFF_RADIUS};
use crate::error::{Error, Result};
use crate::exponents::{alpha_roots, lambda_of, ProblemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HarmonicKind {
    #[serde(rename = "h_plus")]
    SmallPlus,
    #[serde(rename = "h_minus")]
    SmallMinus,
    #[serde(rename = "H_plus")]
    SingularPlus,
    #[serde(rename = "H_minus")]
    SingularMinus,
    #[serde(rename = "H_gamma")]
    SingularGamma,
}

impl HarmonicKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            HarmonicKind::SmallPlus => "h_plus",
            HarmonicKind::SmallMinus => "h_minus",
            HarmonicKind::SingularPlus => "H_plus",
            HarmonicKind::SingularMinus => "H_minus",
            HarmonicKind::SingularGamma => "H_gamma",
        }
    }
}

impl std::str::FromStr for HarmonicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "h_plus" => HarmonicKind::SmallPlus,
            "h_minus" => HarmonicKind::SmallMinus,
            "H_plus" => HarmonicKind::SingularPlus,
            "H_minus" => HarmonicKind::SingularMinus,
            "H_gamma" => HarmonicKind::SingularGamma,
            other => return Err(Error::InvalidParams(format!("unknown harmonic kind {other:?}"))),
        })
    }
}

/// Extra input for [`harmonic`]: either a radial exponent or an eigen-index pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HarmonicExtra {
    pub gamma: Option<f64>,
    pub s: Option<usize>,
    #[serde(default)]
    pub m: u32,
}

impl HarmonicExtra {
    pub fn gamma(gamma: f64) -> Self {
        Self {
            gamma: Some(gamma),
            ..Self::default()
        }
    }

    pub fn mode(s: usize, m: u32) -> Self {
        Self { gamma: None, s: Some(s), m }
    }
}

/// Angular part of a separable harmonic as a function of `t = cos(theta_1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum AngularFactor {
    Power { exponent: f64 },
    Profile { profile: AngularProfile },
}

impl AngularFactor {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            AngularFactor::Power { exponent } => t.powf(*exponent),
            AngularFactor::Profile { profile } => profile.value(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableHarmonic {
    pub kind: HarmonicKind,
    pub n: u32,
    pub mu: f64,
    /// Radial exponent: `u = r^gamma * angular(cos theta_1) * azimuthal`.
    pub gamma: f64,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    pub angular: AngularFactor,
    /// Azimuthal factor in closed form: `"1"` for `m = 0`.
    pub azimuthal: String,
    pub positive: bool,
}

impl SeparableHarmonic {
    pub fn eval_polar(&self, r: f64, t: f64) -> f64 {
        r.powf(self.gamma) * self.angular.value(t)
    }

    /// Value at a point of the half-space; `x[0]` is the normal coordinate.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.eval_polar(r, (x[0] / r).min(1.0)) * azimuthal_factor(self.m, x)
    }
}

fn closed(kind: HarmonicKind, n: u32, mu: f64, gamma: f64, exponent: f64) -> SeparableHarmonic {
    SeparableHarmonic {
        kind,
        n,
        mu,
        gamma,
        m: 0,
        s: None,
        angular: AngularFactor::Power { exponent },
        azimuthal: "1".into(),
        positive: true,
    }
}

fn azimuthal(m: u32) -> String {
    if m == 0 {
        "1".into()
    } else {
        format!("Re((x2 + i x3)^{m}) / |x'|^{m}")
    }
}

/// `Re((x_2 + i x_3)^m) / |x'|^m`, a degree-`m` spherical harmonic on the sphere of `x'`.
fn azimuthal_factor(m: u32, x: &[f64]) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let tangential = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
    if x.len() < 3 || tangential == 0.0 {
        return 0.0;
    }
    let planar = x[1].hypot(x[2]);
    (planar / tangential).powi(m as i32) * (m as f64 * x[2].atan2(x[1])).cos()
}

/// Builds a separable harmonic of the given kind.
///
/// `h_plus = x_1^{alpha_+}` and `h_minus = x_1^{alpha_+} |x|^{-(n-2+2 alpha_+)}` are closed
/// forms. `H_plus` / `H_minus` take either `gamma` (profile `k_gamma`, radial exponents
/// `gamma` and `-(gamma+n-2)`) or `(s, m)` (eigenfunction, exponents `gamma_+-(s,m)`).
/// `H_gamma` is the positive family with `gamma` in `(-(alpha_+ + n - 2), alpha_+)`.
pub fn harmonic(kind: HarmonicKind, n: u32, mu: f64, extra: HarmonicExtra, tol: f64) -> Result<SeparableHarmonic> {
    ProblemParams::linear(n, mu)?;
    let (ap, am) = alpha_roots(mu);
    let reflect = |g: f64| -(g + n as f64 - 2.0);
    match kind {
        HarmonicKind::SmallPlus => Ok(closed(kind, n, mu, ap, ap)),
        HarmonicKind::SmallMinus => Ok(closed(kind, n, mu, reflect(ap), ap)),
        HarmonicKind::SingularGamma => {
            let gamma = extra
                .gamma
                .ok_or_else(|| Error::InvalidParams("H_gamma needs gamma".into()))?;
            let (lo, hi) = (reflect(ap), ap);
            if !(gamma > lo && gamma < hi) {
                return Err(Error::GammaOutOfRange { gamma, lo, hi });
            }
            let near = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
            if near(gamma, am) || near(gamma, reflect(am)) {
                return Ok(closed(kind, n, mu, gamma, am));
            }
            let profile = solve_k_gamma(n, mu, 0, gamma, tol)?;
            Ok(SeparableHarmonic {
                kind,
                n,
                mu,
                gamma,
                m: 0,
                s: None,
                angular: AngularFactor::Profile { profile },
                azimuthal: "1".into(),
                positive: true,
            })
        }
        HarmonicKind::SingularPlus | HarmonicKind::SingularMinus => {
            let plus = kind == HarmonicKind::SingularPlus;
            if let Some(s) = extra.s {
                let e = eigenvalue(n, mu, s, extra.m, tol)?;
                return Ok(SeparableHarmonic {
                    kind,
                    n,
                    mu,
                    gamma: if plus { e.gamma_plus } else { e.gamma_minus },
                    m: extra.m,
                    s: Some(s),
                    angular: AngularFactor::Profile { profile: e.profile },
                    azimuthal: azimuthal(extra.m),
                    positive: s == 1 && extra.m == 0,
                });
            }
            let gamma = extra
                .gamma
                .ok_or_else(|| Error::InvalidParams(format!("{} needs gamma or (s, m)", kind.as_str())))?;
            let profile = solve_k_gamma(n, mu, extra.m, gamma, tol)?;
            Ok(SeparableHarmonic {
                kind,
                n,
                mu,
                gamma: if plus { gamma } else { reflect(gamma) },
                m: extra.m,
                s: None,
                angular: AngularFactor::Profile { profile },
                azimuthal: azimuthal(extra.m),
                positive: extra.m == 0 && lambda_of(n, gamma) < lambda_of(n, ap),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthGrid {
    pub radii: usize,
    pub angles: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for GrowthGrid {
    fn default() -> Self {
        Self {
            radii: 60,
            angles: 60,
            r_min: 1e-3,
            r_max: 1e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthBound {
    pub sup: f64,
    pub inf: f64,
    pub c_best: f64,
    /// `d log(ratio) / d log t` as `t -> 0`; must vanish for a two-sided bound.
    pub boundary_slope: f64,
    /// `d log(ratio) / d log r` across the radial range.
    pub radial_slope: f64,
    pub pass: bool,
}

/// Two-sided comparison of `h` with `x_1^{alpha_-} |x|^{gamma - alpha_-}`.
///
/// Besides finite positive extrema on the grid, the ratio must be flat in `r` and have a
/// nonzero limit as `t -> 0`, otherwise a finite grid would hide the unbounded direction.
pub fn verify_growth_bounds(h: &SeparableHarmonic, gamma: f64, grid: &GrowthGrid) -> GrowthBound {
    let (ap, am) = alpha_roots(h.mu);
    let ratio = |r: f64, t: f64| h.eval_polar(r, t) / ((r * t).powf(am) * r.powf(gamma - am));
    let theta_max = HANDOFF_RADIUS.acos();
    let (mut sup, mut inf) = (f64::NEG_INFINITY, f64::INFINITY);
    let lr = (grid.r_max / grid.r_min).ln();
    for i in 0..grid.radii {
        let r = grid.r_min * (lr * i as f64 / (grid.radii - 1).max(1) as f64).exp();
        for j in 0..grid.angles {
            let theta = theta_max * j as f64 / (grid.angles - 1).max(1) as f64;
            let q = ratio(r, theta.cos());
            if q.is_nan() {
                sup = f64::NAN;
                continue;
            }
            sup = sup.max(q);
            inf = inf.min(q);
        }
    }
    let radial_slope = (ratio(grid.r_max, 0.5) / ratio(grid.r_min, 0.5)).ln() / lr;
    let t0 = 1e-8;
    let boundary_slope = (ratio(1.0, 2.0 * t0) / ratio(1.0, t0)).ln() / 2f64.ln();
    let gap = ap - am;
    let finite = sup.is_finite() && inf.is_finite() && inf > 0.0;
    let pass = finite && radial_slope.abs() < 1e-6 && boundary_slope.abs() < 0.5 * gap.max(1e-3);
    GrowthBound {
        sup,
        inf,
        c_best: if finite { sup.max(1.0 / inf) } else { f64::INFINITY },
        boundary_slope,
        radial_slope,
        pass,
    }
}

/// Whether the angular part carries a `t^{alpha_-}` component (singular on the boundary).
pub fn is_boundary_singular(h: &SeparableHarmonic) -> Result<bool> {
    let (ap, am) = alpha_roots(h.mu);
    match &h.angular {
        AngularFactor::Power { exponent } => Ok((exponent - am).abs() < 1e-12 && ap != am),
        AngularFactor::Profile { profile } => Ok(classify_origin_behavior(profile)?.singular),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_singular_small_harmonic() {
        let (n, mu) = (4, -0.5);
        let h = harmonic(HarmonicKind::SmallMinus, n, mu, HarmonicExtra::default(), 1e-10).unwrap();
        let (ap, _) = alpha_roots(mu);
        let x = [0.3, -0.7, 1.1, 0.2];
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let expect = 0.3f64.powf(ap) * r2.sqrt().powf(-(n as f64 - 2.0 + 2.0 * ap));
        assert!((h.eval(&x) - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn alpha_minus_closed_forms() {
        let (n, mu) = (3, -2.0);
        let (_, am) = alpha_roots(mu);
        let plus = harmonic(HarmonicKind::SingularGamma, n, mu, HarmonicExtra::gamma(am), 1e-10).unwrap();
        let x = [0.4, 0.9, -0.3];
        assert!((plus.eval(&x) - 0.4f64.powf(am)).abs() < 1e-12);
        let g = -(am + n as f64 - 2.0);
        let minus = harmonic(HarmonicKind::SingularGamma, n, mu, HarmonicExtra::gamma(g), 1e-10).unwrap();
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let expect = 0.4f64.powf(am) * r.powf(-(n as f64 - 2.0 + 2.0 * am));
        assert!((minus.eval(&x) - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn planar_sector_harmonic() {
        let h = harmonic(HarmonicKind::SingularPlus, 2, 0.0, HarmonicExtra::gamma(0.5), 1e-11).unwrap();
        // r^{1/2} cos(phi/2) up to normalization; phi is the angle from the x_1 axis
        let c = h.eval(&[1.0, 0.0]);
        for phi in [0.3f64, 0.9, 1.4] {
            let x = [2.0 * phi.cos(), 2.0 * phi.sin()];
            let expect = c * 2f64.sqrt() * (phi / 2.0).cos();
            assert!((h.eval(&x) - expect).abs() < 1e-8, "phi={phi}");
        }
    }

    #[test]
    fn gamma_range() {
        let err = harmonic(HarmonicKind::SingularGamma, 3, 0.0, HarmonicExtra::gamma(1.0), 1e-10).unwrap_err();
        assert!(matches!(err, Error::GammaOutOfRange { .. }));
        assert!(harmonic(HarmonicKind::SingularGamma, 3, 0.0, HarmonicExtra::gamma(-2.0), 1e-10).is_err());
    }

    #[test]
    fn growth_bounds() {
        let h = harmonic(HarmonicKind::SingularGamma, 3, 0.0, HarmonicExtra::gamma(0.0), 1e-10).unwrap();
        let b = verify_growth_bounds(&h, 0.0, &GrowthGrid::default());
        assert!(b.pass && (b.c_best - 1.0).abs() < 1e-12, "{b:?}");

        let h = harmonic(HarmonicKind::SingularGamma, 3, 0.1875, HarmonicExtra::gamma(0.0), 1e-10).unwrap();
        let b = verify_growth_bounds(&h, 0.0, &GrowthGrid::default());
        assert!(b.pass && b.c_best.is_finite() && b.c_best >= 1.0, "{b:?}");

        let mu = -0.7;
        let (ap, _) = alpha_roots(mu);
        let h = harmonic(HarmonicKind::SmallPlus, 3, mu, HarmonicExtra::default(), 1e-10).unwrap();
        assert!(!verify_growth_bounds(&h, ap, &GrowthGrid::default()).pass);
    }

    #[test]
    fn eigen_harmonic_flags() {
        let h = harmonic(HarmonicKind::SingularMinus, 3, 0.0, HarmonicExtra::mode(1, 1), 1e-10).unwrap();
        assert!((h.gamma + 3.0).abs() < 1e-7);
        assert!(!h.positive);
        assert_eq!(h.azimuthal, "Re((x2 + i x3)^1) / |x'|^1");
    }
}
