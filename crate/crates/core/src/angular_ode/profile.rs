use serde::{Deserialize, Serialize};

use super::frobenius::FrobeniusExpansion;
use super::LinearAngularODE;
use crate::numerics::{hermite5, locate};

/// Representation of a profile below the first / above the last grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndpointRep {
    Series {
        scale: f64,
        expansion: FrobeniusExpansion,
    },
    /// `a * minus + b * plus` from the two origin bases.
    Combination {
        a: f64,
        b: f64,
        minus: FrobeniusExpansion,
        plus: FrobeniusExpansion,
    },
    /// `coefficient * t^exponent` (leading behavior only).
    PowerLaw { coefficient: f64, exponent: f64 },
}

impl EndpointRep {
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            EndpointRep::Series { scale, expansion } => {
                let (v, d) = expansion.eval(t);
                (scale * v, scale * d)
            }
            EndpointRep::Combination { a, b, minus, plus } => {
                let (vm, dm) = minus.eval(t);
                let (vp, dp) = plus.eval(t);
                (a * vm + b * vp, a * dm + b * dp)
            }
            EndpointRep::PowerLaw { coefficient, exponent } => {
                let v = coefficient * t.powf(*exponent);
                (v, exponent * v / t)
            }
        }
    }
}

/// A function on `[0, 1]`: Hermite data on an interior grid plus endpoint expansions.
///
/// The stored `values`/`derivatives`/`second_derivatives` describe
/// `k(t) / t^prefactor_exponent`; evaluation restores the prefactor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularProfile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<LinearAngularODE>,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    pub second_derivatives: Vec<f64>,
    #[serde(default)]
    pub prefactor_exponent: f64,
    pub expansion_at_0: Option<EndpointRep>,
    pub expansion_at_1: Option<EndpointRep>,
    pub normalization: String,
}

impl AngularProfile {
    /// Value and derivative of the profile at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let first = self.grid[0];
        let last = self.grid[self.grid.len() - 1];
        if t < first {
            if let Some(rep) = &self.expansion_at_0 {
                return rep.eval(t);
            }
        }
        if t > last {
            if let Some(rep) = &self.expansion_at_1 {
                return rep.eval(t);
            }
        }
        let tc = t.clamp(first, last);
        let (w, dw) = self.eval_stored(tc);
        let beta = self.prefactor_exponent;
        if beta == 0.0 {
            (w, dw)
        } else {
            let tb = t.powf(beta);
            (tb * w, tb * (dw + beta * w / t))
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    /// Interpolated stored quantity `k / t^prefactor` and its derivative.
    pub fn eval_stored(&self, t: f64) -> (f64, f64) {
        let i = locate(&self.grid, t);
        hermite5(
            t,
            self.grid[i],
            self.grid[i + 1],
            self.values[i],
            self.values[i + 1],
            self.derivatives[i],
            self.derivatives[i + 1],
            self.second_derivatives[i],
            self.second_derivatives[i + 1],
        )
    }

    /// Profile values divided by `t^exponent` on the grid (used for normalized comparisons).
    pub fn scaled_values(&self, exponent: f64) -> Vec<f64> {
        let shift = self.prefactor_exponent - exponent;
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(t, w)| if shift == 0.0 { *w } else { w * t.powf(shift) })
            .collect()
    }

    /// Number of sign changes of the grid values.
    pub fn sign_changes(&self) -> usize {
        crate::numerics::count_sign_changes(self.values.iter().copied())
    }

    pub(crate) fn from_nodes(
        ode: LinearAngularODE,
        mut nodes: Vec<(f64, [f64; 2])>,
        expansion_at_0: Option<EndpointRep>,
        expansion_at_1: Option<EndpointRep>,
        normalization: impl Into<String>,
    ) -> Self {
        nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        nodes.dedup_by(|a, b| a.0 == b.0);
        let grid: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let values: Vec<f64> = nodes.iter().map(|n| n.1[0]).collect();
        let derivatives: Vec<f64> = nodes.iter().map(|n| n.1[1]).collect();
        let second_derivatives = nodes.iter().map(|(t, [k, kd])| ode.kdd(*t, *k, *kd)).collect();
        Self {
            ode: Some(ode),
            grid,
            values,
            derivatives,
            second_derivatives,
            prefactor_exponent: 0.0,
            expansion_at_0,
            expansion_at_1,
            normalization: normalization.into(),
        }
    }
}
