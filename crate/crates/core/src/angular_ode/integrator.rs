//! Dormand-Prince 5(4) for the two-component first-order system `(k, k')`,
//! with the standard 4th-order continuous extension.

use crate::error::{Error, Result};

pub type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone)]
struct DenseStep {
    t0: f64,
    h: f64,
    rcont: [[f64; 2]; 5],
}

impl DenseStep {
    fn eval(&self, t: f64) -> State {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            *o = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        out
    }
}

/// Accepted step nodes plus the continuous extension between them.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub nodes: Vec<(f64, State)>,
    steps: Vec<DenseStep>,
}

impl DenseSolution {
    pub fn t_start(&self) -> f64 {
        self.nodes[0].0
    }

    pub fn t_end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].0
    }

    pub fn final_state(&self) -> State {
        self.nodes[self.nodes.len() - 1].1
    }

    /// Dense output at any `t` between the start and end points.
    pub fn eval(&self, t: f64) -> State {
        let forward = self.t_end() >= self.t_start();
        // steps are ordered in the direction of integration
        let idx = self.steps.partition_point(|s| {
            let end = s.t0 + s.h;
            if forward {
                end < t
            } else {
                end > t
            }
        });
        let step = &self.steps[idx.min(self.steps.len() - 1)];
        step.eval(t)
    }
}

fn axpy(y: &State, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += c * k[0];
        out[1] += c * k[1];
    }
    out
}

/// Adaptive integration of `y' = f(t, y)` from `t_from` to `t_to`.
///
/// The error norm is relative to the state magnitude `max(|k|, |k'|)`, so `tol`
/// acts as a per-step relative tolerance.
pub fn dopri5<F>(f: F, t_from: f64, t_to: f64, y0: State, tol: f64, h_init: f64) -> Result<DenseSolution>
where
    F: Fn(f64, &State) -> State,
{
    let dir = (t_to - t_from).signum();
    let span = (t_to - t_from).abs();
    let mut t = t_from;
    let mut y = y0;
    let mut h = h_init.abs().min(span).max(1e-16 * span) * dir;
    let mut k1 = f(t, &y);
    let mut nodes = vec![(t, y)];
    let mut steps = Vec::new();
    let mut fac_old: f64 = 1e-4;
    let mut count = 0usize;

    while (t_to - t) * dir > 0.0 {
        count += 1;
        if count > MAX_STEPS {
            return Err(Error::StepSizeUnderflow { t });
        }
        if (t_to - t).abs() <= 4.0 * f64::EPSILON * t_to.abs().max(t.abs()) {
            break;
        }
        let mut clipped = false;
        if (t + h - t_to) * dir >= 0.0 {
            h = t_to - t;
            clipped = true;
        }
        let k2 = f(t + C2 * h, &axpy(&y, &[(h * A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]),
        );
        let y6 = axpy(&y, &[(h * A61, &k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)]);
        let k6 = f(t + h, &y6);
        let y_new = axpy(&y, &[(h * A71, &k1), (h * A73, &k3), (h * A74, &k4), (h * A75, &k5), (h * A76, &k6)]);
        let k7 = f(t + h, &y_new);

        let scale = y[0].abs().max(y[1].abs()).max(y_new[0].abs()).max(y_new[1].abs()).max(1e-300);
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err = err.max((e / (tol * scale)).abs());
        }
        if !err.is_finite() {
            h *= 0.1;
            if h.abs() < 1e-14 * t.abs().max(1e-300) {
                return Err(Error::StepSizeUnderflow { t });
            }
            continue;
        }

        // PI step control
        let fac11 = err.max(1e-300).powf(0.17);
        let mut fac = fac11 / fac_old.powf(0.04);
        fac = (fac / 0.9).clamp(0.1, 5.0);
        let h_new = h / fac;

        if err <= 1.0 {
            fac_old = err.max(1e-4);
            let mut rcont = [[0.0; 2]; 5];
            for i in 0..2 {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k7[i] - bspl;
                rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            steps.push(DenseStep { t0: t, h, rcont });
            t += h;
            y = y_new;
            k1 = k7;
            nodes.push((t, y));
            if clipped {
                break;
            }
            h = h_new;
        } else {
            h /= (fac11 / 0.9).min(10.0);
        }
        if h.abs() < 1e-14 * t.abs().max(1e-300) {
            return Err(Error::StepSizeUnderflow { t });
        }
    }
    // snap the last node to the requested endpoint
    if let Some(last) = nodes.last_mut() {
        last.0 = t_to;
    }
    Ok(DenseSolution { nodes, steps })
}
