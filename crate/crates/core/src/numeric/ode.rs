//! Adaptive Dormand–Prince 5(4) integration.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Step-size controlled integrator for autonomous systems `y' = f(y)`.
#[derive(Clone, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(tol: f64) -> Self {
        Dopri5 { rtol: tol, atol: tol, h_init: 1e-3, h_min: 1e-14, h_max: 0.5, max_steps: 2_000_000 }
    }

    /// One explicit step of size `h` (no error control), used to locate events
    /// inside an accepted step.
    pub fn single_step<F>(&self, f: &F, y: &[f64], h: f64) -> Vec<f64>
    where
        F: Fn(&[f64], &mut [f64]),
    {
        let (y5, _) = stages(f, y, h);
        y5
    }

    /// Integrates from `y0` over `duration` (which may be negative), calling
    /// `project` after every accepted step and `observe(t_prev, y_prev, t, y)`
    /// afterwards. The observer may stop the integration early. Returns the
    /// final time and state.
    pub fn integrate<F, P, O>(
        &self,
        f: &F,
        y0: &[f64],
        duration: f64,
        project: P,
        mut observe: O,
    ) -> Result<(f64, Vec<f64>)>
    where
        F: Fn(&[f64], &mut [f64]),
        P: Fn(&mut [f64]),
        O: FnMut(f64, &[f64], f64, &[f64]) -> ControlFlow<()>,
    {
        let dir = if duration < 0.0 { -1.0 } else { 1.0 };
        let span = duration.abs();
        let mut t = 0.0;
        let mut y = y0.to_vec();
        let mut h = self.h_init.min(span).max(self.h_min);
        let mut steps = 0;
        while t < span {
            if steps >= self.max_steps {
                return Err(Error::Integration(format!("step budget exhausted at t = {}", dir * t)));
            }
            steps += 1;
            let last = t + h >= span;
            let h_try = if last { span - t } else { h };
            let (mut y_new, err_vec) = stages(f, &y, dir * h_try);
            let err = error_norm(&y, &y_new, &err_vec, self.rtol, self.atol);
            if err <= 1.0 {
                project(&mut y_new);
                let t_new = if last { span } else { t + h_try };
                let flow = observe(dir * t, &y, dir * t_new, &y_new);
                t = t_new;
                y = y_new;
                if flow.is_break() {
                    break;
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h_try * factor).min(self.h_max);
            if h < self.h_min && t < span {
                return Err(Error::Integration(format!(
                    "step size underflow ({h:e}) at t = {}; the vector field is nearly degenerate",
                    dir * t
                )));
            }
        }
        Ok((dir * t, y))
    }
}

fn stages<F>(f: &F, y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = y.len();
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    f(y, &mut k[0]);
    for (s, a) in A.iter().enumerate().take(7).skip(1) {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += a[j] * kj[i];
            }
            tmp[i] = y[i] + h * acc;
        }
        let (_, rest) = k.split_at_mut(s);
        f(&tmp, &mut rest[0]);
    }
    let mut y5 = vec![0.0; n];
    let mut err = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        let mut e = 0.0;
        for s in 0..7 {
            acc += B[s] * k[s][i];
            e += E[s] * k[s][i];
        }
        y5[i] = y[i] + h * acc;
        err[i] = h * e;
    }
    (y5, err)
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], rtol: f64, atol: f64) -> f64 {
    let n = y.len() as f64;
    let sum: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}
