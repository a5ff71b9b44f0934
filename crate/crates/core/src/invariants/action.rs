//! The second action on regular fibers, by reduced area and by return
//! times of the Hamiltonian flow.

use std::f64::consts::{PI, TAU};
use std::ops::ControlFlow;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::SystemInstance;
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::numeric::quad::{gauss_legendre_nodes, integrate_pieces};
use crate::numeric::roots::{bisect, minimize, sign_changes};
use crate::phasespace::{field_closure, integrator, IntegrableSystem, Observable, PhasePoint};

/// Integration tolerance for return-time flows.
pub const FLOW_TOL: f64 = 1e-12;
/// Longest `H`-time searched for a return.
pub const RETURN_CAP: f64 = 1e4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionMethod {
    Area,
    ReturnTime,
}

/// One evaluation of the second action.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionSample {
    pub l: f64,
    pub h: f64,
    /// Eliasson coordinate, when a normal form was supplied.
    pub j: Option<f64>,
    /// `I(l, h)`, zero at the bottom of the `L = l` level.
    pub action: f64,
    /// `L`-time closing the `H`-orbit, in `[0, 2π)`.
    pub tau1: Option<f64>,
    /// First return time of the `H`-flow to the starting `L`-orbit.
    pub tau2: Option<f64>,
    pub method: ActionMethod,
}

/// `2π` times the share of the circle where `A + B cos φ < h`.
fn phi_measure(a: f64, b: f64, h: f64) -> f64 {
    let b = b.abs();
    if b < 1e-300 {
        return if a < h { TAU } else { 0.0 };
    }
    2.0 * (-((h - a) / b).clamp(-1.0, 1.0)).acos()
}

fn level_bounds(sys: &SystemInstance, l: f64) -> Result<(f64, f64)> {
    sys.reduced()
        .z_range(l)
        .ok_or_else(|| Error::Range(format!("level L = {l} is empty")))
}

/// Points where the level `H = h` touches the edges `A ± |B|` of the
/// reduced strip; the area integrand has square-root kinks there.
fn kinks(sys: &SystemInstance, l: f64, h: f64, lo: f64, hi: f64) -> Vec<f64> {
    let red = sys.reduced();
    let mut out = Vec::new();
    for s in [-1.0, 1.0] {
        out.extend(sign_changes(
            |z| {
                let (a, b) = red.terms(z, l);
                a + s * b.abs() - h
            },
            lo,
            hi,
            256,
            1e-15,
        ));
    }
    out
}

fn area_with(sys: &SystemInstance, l: f64, h: f64, below: bool) -> Result<f64> {
    let red = sys.reduced();
    let (lo, hi) = level_bounds(sys, l)?;
    if hi - lo <= 0.0 {
        return Ok(0.0);
    }
    let breaks = kinks(sys, l, h, lo, hi);
    let integrand = |z: f64| {
        let (a, b) = red.terms(z, l);
        let m = phi_measure(a, b, h);
        if below {
            m
        } else {
            TAU - m
        }
    };
    Ok(red.weight() * integrate_pieces(integrand, lo, hi, &breaks, 1e-12)?)
}

/// Symplectic area of `{H < h}` in the reduced space at `L = l`.
pub fn area_below(sys: &SystemInstance, l: f64, h: f64) -> Result<f64> {
    area_with(sys, l, h, true)
}

/// Symplectic area of `{H > h}` in the reduced space at `L = l`.
pub fn area_above(sys: &SystemInstance, l: f64, h: f64) -> Result<f64> {
    area_with(sys, l, h, false)
}

/// Total area of the reduced space at `L = l`.
pub fn total_area(sys: &SystemInstance, l: f64) -> Result<f64> {
    let (lo, hi) = level_bounds(sys, l)?;
    Ok(sys.reduced().weight() * TAU * (hi - lo))
}

/// A point on the fiber `F = (l, h)`, placed where the level sits deepest
/// inside the reduced strip.
pub fn fiber_point(sys: &SystemInstance, l: f64, h: f64) -> Result<PhasePoint> {
    let red = sys.reduced();
    let (lo, hi) = level_bounds(sys, l)?;
    let slack = |z: f64| {
        let (a, b) = red.terms(z, l);
        (h - (a - b.abs())).min(a + b.abs() - h)
    };
    let (z, neg) = minimize(|z| -slack(z), lo, hi, 256, 1e-13 * (hi - lo).max(1e-300));
    if -neg <= 0.0 {
        return Err(Error::Range(format!("fiber over ({l}, {h}) is empty")));
    }
    let (a, b) = red.terms(z, l);
    let p = red.lift(l, z, ((h - a) / b).clamp(-1.0, 1.0).acos());
    let (lv, hv) = sys.values(&p.coords);
    if (lv - l).abs() > 1e-9 || (hv - h).abs() > 1e-9 {
        return Err(Error::Accuracy(format!("fiber point misses ({l}, {h}) by ({:e}, {:e})", lv - l, hv - h)));
    }
    Ok(p)
}

/// Return times `(τ₁, τ₂)` at a regular value and the point the `H`-flow
/// returns to.
#[derive(Clone, Debug)]
pub struct ReturnTimes {
    pub tau1: f64,
    pub tau2: f64,
    pub start: PhasePoint,
    pub end: PhasePoint,
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Flows `H` from a fiber point until the orbit of the circle action is
/// met again (detected on the orbit invariants), then measures the circle
/// angle separating the two points.
pub fn return_times(sys: &SystemInstance, l: f64, h: f64) -> Result<ReturnTimes> {
    let p0 = fiber_point(sys, l, h)?;
    let x0 = p0.coords.clone();
    let m = sys.manifold();
    let inv0 = sys.orbit_invariants(&x0);
    let f = field_closure(sys, Observable::H);

    // Section through the start, transverse to the reduced motion.
    let mut v = vec![0.0; x0.len()];
    f(&x0, &mut v);
    let speed = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if speed < 1e-12 {
        return Err(Error::Precondition(format!("({l}, {h}) is a critical value")));
    }
    let eps = 1e-6 / speed;
    let shifted = |s: f64| -> Vec<f64> { x0.iter().zip(&v).map(|(x, d)| x + s * eps * d).collect() };
    let (ip, im) = (sys.orbit_invariants(&shifted(1.0)), sys.orbit_invariants(&shifted(-1.0)));
    let u: Vec<f64> = (0..3).map(|k| (ip[k] - im[k]) / (2.0 * eps)).collect();
    let section = |x: &[f64]| {
        let inv = sys.orbit_invariants(x);
        (0..3).map(|k| u[k] * (inv[k] - inv0[k])).sum::<f64>()
    };

    let solver = integrator(FLOW_TOL);
    let mut far = 0.0f64;
    let mut hit: Option<(f64, Vec<f64>, f64)> = None;
    solver.integrate(&f, &x0, RETURN_CAP, |y| m.project(y), |t_prev, y_prev, t, y| {
        let d = dist(&sys.orbit_invariants(y), &inv0);
        far = far.max(d);
        if t_prev > 0.0 && section(y_prev) < 0.0 && section(y) >= 0.0 && d < 0.25 * far {
            hit = Some((t_prev, y_prev.to_vec(), t - t_prev));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    let (t_prev, y_prev, step) =
        hit.ok_or_else(|| Error::Integration(format!("no return within H-time {RETURN_CAP} at ({l}, {h})")))?;
    let advance = |s: f64| {
        let mut y = solver.single_step(&f, &y_prev, s);
        m.project(&mut y);
        y
    };
    let s = bisect(|s| section(&advance(s)), 0.0, step, 1e-15 * step.max(1.0))
        .ok_or_else(|| Error::Integration("lost the section crossing".into()))?;
    let end = advance(s);
    let miss = dist(&sys.orbit_invariants(&end), &inv0);
    if miss > 1e-6 * far.max(1e-3) {
        return Err(Error::Integration(format!("H-orbit does not close on the circle orbit (miss {miss:e})")));
    }
    let w0 = sys.horizontal(&x0);
    let w1 = sys.horizontal(&end);
    let overlap: Complex64 = w0.iter().zip(&w1).map(|(a, b)| a.conj() * b).sum();
    let theta = overlap.arg();
    let tau1 = (-theta * sys.rotation_sense()).rem_euclid(TAU);
    Ok(ReturnTimes { tau1, tau2: t_prev + s, start: p0, end: PhasePoint::new(end) })
}

/// Quadrature layout for the return-time action.
const RT_PANELS: usize = 6;
const RT_ORDER: usize = 12;

/// `I(l, h) = ∫ τ₂ / 2π dh'` from the bottom of the level.
pub fn return_time_action(sys: &SystemInstance, l: f64, h: f64, mode: Execution) -> Result<f64> {
    let (h_min, _) = sys
        .reduced()
        .h_extent(l)
        .ok_or_else(|| Error::Range(format!("level L = {l} is empty")))?;
    if h <= h_min {
        return Ok(0.0);
    }
    let nodes = gauss_legendre_nodes(h_min, h, RT_PANELS, RT_ORDER);
    let taus = map_slice(mode, &nodes, |&(x, _)| return_times(sys, l, x).map(|r| r.tau2));
    let mut total = 0.0;
    for ((_, w), tau) in nodes.iter().zip(taus) {
        total += w * tau?;
    }
    Ok(total / (2.0 * PI))
}

/// Samples the second action with the requested method.
pub fn action_sample(sys: &SystemInstance, l: f64, h: f64, method: ActionMethod, mode: Execution) -> Result<ActionSample> {
    match method {
        ActionMethod::Area => {
            let a = area_below(sys, l, h)?;
            Ok(ActionSample { l, h, j: None, action: a / TAU, tau1: None, tau2: None, method })
        }
        ActionMethod::ReturnTime => {
            let rt = return_times(sys, l, h)?;
            let action = return_time_action(sys, l, h, mode)?;
            Ok(ActionSample { l, h, j: None, action, tau1: Some(rt.tau1), tau2: Some(rt.tau2), method })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cam() -> SystemInstance {
        SystemInstance::cam(1.0, 1.5, 0.5).unwrap()
    }

    #[test]
    fn areas_are_complementary() {
        let sys = cam();
        for (l, h) in [(0.3, 0.1), (-1.0, -0.4), (1.7, 0.4)] {
            let total = total_area(&sys, l).unwrap();
            let sum = area_below(&sys, l, h).unwrap() + area_above(&sys, l, h).unwrap();
            assert!((sum - total).abs() < 1e-9, "{l} {h}");
        }
    }

    #[test]
    fn area_shrinks_at_elliptic_end() {
        let sys = cam();
        let (lo, hi) = sys.reduced().h_extent(0.7).unwrap();
        assert!(area_below(&sys, 0.7, lo + 1e-8).unwrap() < 1e-3);
        let total = total_area(&sys, 0.7).unwrap();
        assert!((area_below(&sys, 0.7, hi - 1e-8).unwrap() - total).abs() < 1e-3);
    }

    #[test]
    fn fiber_points_land_on_the_fiber() {
        let sys = SystemInstance::cso(1.0, 1.0).unwrap();
        let p = fiber_point(&sys, 0.4, 0.1).unwrap();
        let (l, h) = sys.values(&p.coords);
        assert!((l - 0.4).abs() < 1e-12 && (h - 0.1).abs() < 1e-12);
        assert!(matches!(fiber_point(&sys, 0.4, 5.0), Err(Error::Range(_))));
    }

    #[test]
    fn return_time_matches_area_derivative() {
        let sys = cam();
        let (l, h, dh) = (0.5, 0.2, 1e-4);
        let rt = return_times(&sys, l, h).unwrap();
        let d = (area_below(&sys, l, h + dh).unwrap() - area_below(&sys, l, h - dh).unwrap()) / (2.0 * dh);
        assert!((rt.tau2 - d).abs() < 1e-5, "τ₂ {} vs {}", rt.tau2, d);
        let dl = 1e-4;
        let dldl = (area_below(&sys, l + dl, h).unwrap() - area_below(&sys, l - dl, h).unwrap()) / (2.0 * dl);
        let wrapped = (rt.tau1 - dldl).rem_euclid(TAU);
        assert!(wrapped.min(TAU - wrapped) < 1e-5, "τ₁ {} vs {}", rt.tau1, dldl);
    }

    #[test]
    fn two_action_routes_agree() {
        let sys = cam();
        let a = action_sample(&sys, -0.6, -0.2, ActionMethod::Area, Execution::Parallel).unwrap();
        let r = action_sample(&sys, -0.6, -0.2, ActionMethod::ReturnTime, Execution::Parallel).unwrap();
        assert!((a.action - r.action).abs() < 1e-6, "{} vs {}", a.action, r.action);
    }

    #[test]
    fn return_time_diverges_logarithmically_at_focus_focus() {
        use crate::normalform::{eliasson_map_at, DEFAULT_DEGREE};
        use crate::singularities::{count_focus_focus, SearchOptions};
        let sys = cam();
        let c = count_focus_focus(&sys, &SearchOptions::lattice_only()).unwrap();
        let ff = c.focus_focus().next().unwrap();
        let (lambda, eta) = ff.critical_value;
        let map = eliasson_map_at(&sys, &ff.point, DEFAULT_DEGREE).unwrap();
        for side in [1.0, -1.0] {
            // Time is measured in units of the focus-focus rate β.
            let pts: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4, 1e-5]
                .iter()
                .map(|&j: &f64| {
                    let rt = return_times(&sys, lambda, eta + map.energy(0.0, side * j)).unwrap();
                    (-j.ln(), map.beta * rt.tau2)
                })
                .collect();
            let n = pts.len() as f64;
            let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
            let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
                / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
            assert!((slope - 1.0).abs() < 0.05, "side {side}: slope {slope}");
        }
    }
}
