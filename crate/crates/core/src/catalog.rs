//! The explicit system families and their closed-form reference data.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasespace::{FactorKind, IntegrableSystem, ManifoldDescriptor, PhasePoint};
use crate::series::{Field, TruncatedSeries};

/// `L = ρ₁(z−1) + ρ₂(u²+v²)/2`, `H = (xu+yv)/2` on S² × R².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledSpinOscillator {
    pub rho1: f64,
    pub rho2: f64,
}

/// `L = R₁(z₁−1) + R₂(z₂+1)`, `H = (1−t)z₁ + t(x₁x₂+y₁y₂+z₁z₂) + 2t − 1`
/// on S² × S² with `ω = −(R₁ ⊕ R₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledAngularMomenta {
    pub r1: f64,
    pub r2: f64,
    pub t: f64,
}

/// `L = R₁z₁ + R₂z₂` with a four-term `H`, able to carry two focus-focus
/// points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoFocusFamily {
    pub r1: f64,
    pub r2: f64,
    pub s1: f64,
    pub s2: f64,
}

impl TwoFocusFamily {
    /// Weights `(a, b, c, d)` of `z₁`, `z₂`, `x₁x₂+y₁y₂+z₁z₂` and
    /// `x₁x₂+y₁y₂−z₁z₂` in `H`.
    fn weights(&self) -> (f64, f64, f64, f64) {
        let (s1, s2) = (self.s1, self.s2);
        ((1.0 - s1) * (1.0 - s2), s1 * s2, s1 * (1.0 - s2), s2 * (1.0 - s1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Cso(CoupledSpinOscillator),
    Cam(CoupledAngularMomenta),
    #[serde(rename = "twoff")]
    TwoFocus(TwoFocusFamily),
}

/// A family member together with its phase space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemInstance {
    pub family: Family,
    manifold: ManifoldDescriptor,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

impl SystemInstance {
    pub fn new(family: Family) -> Result<Self> {
        let manifold = match family {
            Family::Cso(CoupledSpinOscillator { rho1, rho2 }) => {
                positive("rho1", rho1)?;
                positive("rho2", rho2)?;
                ManifoldDescriptor::new(vec![FactorKind::Sphere, FactorKind::Plane], vec![rho1, rho2], 1)?
            }
            Family::Cam(CoupledAngularMomenta { r1, r2, t }) => {
                positive("R1", r1)?;
                positive("R2", r2)?;
                finite("t", t)?;
                ManifoldDescriptor::new(vec![FactorKind::Sphere, FactorKind::Sphere], vec![r1, r2], -1)?
            }
            Family::TwoFocus(TwoFocusFamily { r1, r2, s1, s2 }) => {
                positive("R1", r1)?;
                positive("R2", r2)?;
                if r1 >= r2 {
                    return Err(Error::InvalidParameter(format!("two-focus family needs R1 < R2, got {r1} >= {r2}")));
                }
                for (name, s) in [("s1", s1), ("s2", s2)] {
                    if !(0.0..=1.0).contains(&s) {
                        return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {s}")));
                    }
                }
                ManifoldDescriptor::new(vec![FactorKind::Sphere, FactorKind::Sphere], vec![r1, r2], -1)?
            }
        };
        Ok(SystemInstance { family, manifold })
    }

    pub fn cso(rho1: f64, rho2: f64) -> Result<Self> {
        Self::new(Family::Cso(CoupledSpinOscillator { rho1, rho2 }))
    }

    pub fn cam(r1: f64, r2: f64, t: f64) -> Result<Self> {
        Self::new(Family::Cam(CoupledAngularMomenta { r1, r2, t }))
    }

    pub fn two_focus(r1: f64, r2: f64, s1: f64, s2: f64) -> Result<Self> {
        Self::new(Family::TwoFocus(TwoFocusFamily { r1, r2, s1, s2 }))
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Cso(_) => "cso",
            Family::Cam(_) => "cam",
            Family::TwoFocus(_) => "twoff",
        }
    }

    /// Parameter names and values, in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self.family {
            Family::Cso(c) => vec![("rho1", c.rho1), ("rho2", c.rho2)],
            Family::Cam(c) => vec![("R1", c.r1), ("R2", c.r2), ("t", c.t)],
            Family::TwoFocus(c) => vec![("R1", c.r1), ("R2", c.r2), ("s1", c.s1), ("s2", c.s2)],
        }
    }

    /// `(L, H)` on numbers or on truncated series.
    pub fn observables<F: Field>(&self, x: &[F]) -> (F, F) {
        match self.family {
            Family::Cso(CoupledSpinOscillator { rho1, rho2 }) => {
                let (sx, sy, sz, u, v) = (&x[0], &x[1], &x[2], &x[3], &x[4]);
                let l = (sz.clone() + (-1.0)) * rho1 + (u.clone() * u.clone() + v.clone() * v.clone()) * (rho2 / 2.0);
                let h = (sx.clone() * u.clone() + sy.clone() * v.clone()) * 0.5;
                (l, h)
            }
            Family::Cam(CoupledAngularMomenta { r1, r2, t }) => {
                let (x1, y1, z1, x2, y2, z2) = (&x[0], &x[1], &x[2], &x[3], &x[4], &x[5]);
                let l = (z1.clone() + (-1.0)) * r1 + (z2.clone() + 1.0) * r2;
                let dot = x1.clone() * x2.clone() + y1.clone() * y2.clone() + z1.clone() * z2.clone();
                let h = z1.clone() * (1.0 - t) + dot * t + (2.0 * t - 1.0);
                (l, h)
            }
            Family::TwoFocus(ref p) => {
                let (x1, y1, z1, x2, y2, z2) = (&x[0], &x[1], &x[2], &x[3], &x[4], &x[5]);
                let (a, b, c, d) = p.weights();
                let l = z1.clone() * p.r1 + z2.clone() * p.r2;
                let planar = x1.clone() * x2.clone() + y1.clone() * y2.clone();
                let zz = z1.clone() * z2.clone();
                let h = z1.clone() * a + z2.clone() * b + planar * (c + d) + zz * (c - d);
                (l, h)
            }
        }
    }

    /// Hessians of `L` and `H` in ambient coordinates, read off an exact
    /// second-order expansion.
    pub fn hessians(&self, x: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = x.len();
        let vars: Vec<TruncatedSeries<f64>> =
            (0..n).map(|i| TruncatedSeries::variable(n, 2, i) + x[i]).collect();
        let (l, h) = self.observables(&vars);
        let to_mat = |s: &TruncatedSeries<f64>| {
            let m = s.hessian();
            DMatrix::from_fn(n, n, |i, j| m[i][j])
        };
        (to_mat(&l), to_mat(&h))
    }

    /// Sense of the `L` rotation: the flow of `L` for time `s` multiplies every
    /// horizontal block `x + iy` (or `u + iv`) by `exp(i · sense · s)`.
    pub fn rotation_sense(&self) -> f64 {
        -self.manifold.global_sign()
    }

    /// Rank-0 candidates from the fixed points of the circle action: every
    /// sphere block at a pole and every plane block at the origin.
    pub fn pole_lattice(&self) -> Vec<PhasePoint> {
        let m = &self.manifold;
        let mut out = vec![Vec::new()];
        for f in m.factors() {
            let options: Vec<Vec<f64>> = match f {
                FactorKind::Sphere => vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]],
                FactorKind::Plane => vec![vec![0.0, 0.0]],
            };
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<f64>| {
                    options.iter().map(move |o| {
                        let mut p = prefix.clone();
                        p.extend(o);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(PhasePoint::new).collect()
    }

    /// `(x + iy)` for the two horizontal blocks.
    pub fn horizontal(&self, x: &[f64]) -> [Complex64; 2] {
        // Both layouts keep the horizontal pairs at indices (0, 1) and (3, 4).
        [Complex64::new(x[0], x[1]), Complex64::new(x[3], x[4])]
    }

    /// Functions constant on the orbits of the circle action that separate
    /// them: first vertical coordinate, and the dot and cross products of the
    /// two horizontal blocks.
    pub fn orbit_invariants(&self, x: &[f64]) -> [f64; 3] {
        let [a, b] = self.horizontal(x);
        let prod = a.conj() * b;
        [x[2], prod.re, prod.im]
    }

    /// The reduced description of `H` on the `L`-levels.
    pub fn reduced(&self) -> ReducedModel {
        ReducedModel { family: self.family }
    }
}

impl IntegrableSystem for SystemInstance {
    fn manifold(&self) -> &ManifoldDescriptor {
        &self.manifold
    }

    fn values(&self, x: &[f64]) -> (f64, f64) {
        self.observables(x)
    }

    fn gradients(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match self.family {
            Family::Cso(CoupledSpinOscillator { rho1, rho2 }) => (
                vec![0.0, 0.0, rho1, rho2 * x[3], rho2 * x[4]],
                vec![0.5 * x[3], 0.5 * x[4], 0.0, 0.5 * x[0], 0.5 * x[1]],
            ),
            Family::Cam(CoupledAngularMomenta { r1, r2, t }) => (
                vec![0.0, 0.0, r1, 0.0, 0.0, r2],
                vec![t * x[3], t * x[4], (1.0 - t) + t * x[5], t * x[0], t * x[1], t * x[2]],
            ),
            Family::TwoFocus(ref p) => {
                let (a, b, c, d) = p.weights();
                let (cp, cm) = (c + d, c - d);
                (
                    vec![0.0, 0.0, p.r1, 0.0, 0.0, p.r2],
                    vec![cp * x[3], cp * x[4], a + cm * x[5], cp * x[0], cp * x[1], b + cm * x[2]],
                )
            }
        }
    }
}

/// `H` restricted to an `L`-level and written in the reduced coordinates
/// `(z, φ)`: `H = A(z) + B(z) cos φ`, where `z` is the vertical coordinate of
/// the first sphere and `φ` the relative angle of the two horizontal blocks.
/// The reduced area form is `w · dz ∧ dφ`.
#[derive(Clone, Copy, Debug)]
pub struct ReducedModel {
    family: Family,
}

impl ReducedModel {
    /// Weight `w` of the reduced area form.
    pub fn weight(&self) -> f64 {
        match self.family {
            Family::Cso(c) => c.rho1,
            Family::Cam(c) => c.r1,
            Family::TwoFocus(c) => c.r1,
        }
    }

    /// Admissible range of `z` on the level `L = l`, if the level is nonempty.
    pub fn z_range(&self, l: f64) -> Option<(f64, f64)> {
        let (lo, hi) = match self.family {
            Family::Cso(c) => (-1.0, (1.0 + l / c.rho1).min(1.0)),
            Family::Cam(c) => (((l + c.r1 - 2.0 * c.r2) / c.r1).max(-1.0), ((l + c.r1) / c.r1).min(1.0)),
            Family::TwoFocus(c) => (((l - c.r2) / c.r1).max(-1.0), ((l + c.r2) / c.r1).min(1.0)),
        };
        (lo <= hi).then_some((lo, hi))
    }

    /// Range of `L` over the phase space (`None` for an unbounded end).
    pub fn l_range(&self) -> (f64, Option<f64>) {
        match self.family {
            Family::Cso(c) => (-2.0 * c.rho1, None),
            Family::Cam(c) => (-2.0 * c.r1, Some(2.0 * c.r2)),
            Family::TwoFocus(c) => (-(c.r1 + c.r2), Some(c.r1 + c.r2)),
        }
    }

    /// Second block's vertical coordinate (or squared radius for the plane).
    fn partner(&self, z: f64, l: f64) -> f64 {
        match self.family {
            Family::Cso(c) => (2.0 * (l - c.rho1 * (z - 1.0)) / c.rho2).max(0.0),
            Family::Cam(c) => ((l - c.r1 * (z - 1.0)) / c.r2 - 1.0).clamp(-1.0, 1.0),
            Family::TwoFocus(c) => ((l - c.r1 * z) / c.r2).clamp(-1.0, 1.0),
        }
    }

    /// `(A(z), B(z))` on the level `L = l`.
    pub fn terms(&self, z: f64, l: f64) -> (f64, f64) {
        let rho = |z: f64| (1.0 - z * z).max(0.0).sqrt();
        match self.family {
            Family::Cso(_) => {
                let w2 = self.partner(z, l);
                (0.0, 0.5 * rho(z) * w2.sqrt())
            }
            Family::Cam(c) => {
                let z2 = self.partner(z, l);
                let t = c.t;
                ((1.0 - t) * z + t * z * z2 + 2.0 * t - 1.0, t * rho(z) * rho(z2))
            }
            Family::TwoFocus(c) => {
                let z2 = self.partner(z, l);
                let (a, b, cc, d) = c.weights();
                (a * z + b * z2 + (cc - d) * z * z2, (cc + d) * rho(z) * rho(z2))
            }
        }
    }

    /// Ambient point with reduced coordinates `(z, φ)` on `L = l`.
    pub fn lift(&self, l: f64, z: f64, phi: f64) -> PhasePoint {
        let r1 = (1.0 - z * z).max(0.0).sqrt();
        let first = [r1 * phi.cos(), r1 * phi.sin(), z];
        match self.family {
            Family::Cso(_) => {
                let w = self.partner(z, l).sqrt();
                PhasePoint::from_blocks(&[&first, &[w, 0.0]])
            }
            _ => {
                let z2 = self.partner(z, l);
                let r2 = (1.0 - z2 * z2).max(0.0).sqrt();
                PhasePoint::from_blocks(&[&first, &[r2, 0.0, z2]])
            }
        }
    }

    /// Lowest and highest value of `H` on the level `L = l`.
    pub fn h_extent(&self, l: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.z_range(l)?;
        if hi - lo < 1e-14 {
            let (a, b) = self.terms(lo, l);
            return Some((a - b.abs(), a + b.abs()));
        }
        let tol = 1e-12 * (hi - lo).max(1e-3);
        let (_, min) = crate::numeric::roots::minimize(
            |z| {
                let (a, b) = self.terms(z, l);
                a - b.abs()
            },
            lo,
            hi,
            128,
            tol,
        );
        let (_, negmax) = crate::numeric::roots::minimize(
            |z| {
                let (a, b) = self.terms(z, l);
                -(a + b.abs())
            },
            lo,
            hi,
            128,
            tol,
        );
        Some((min, -negmax))
    }
}

/// Parameter values where the coupled angular momenta stop being semitoric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionTimes {
    pub t_minus: f64,
    pub t_plus: f64,
    /// Set when the raw formula puts `t⁺` at or beyond 1.
    pub t_plus_at_least_one: bool,
}

/// `t^± = R₂ / (2R₂ + R₁ ∓ 2√(R₁R₂))`.
pub fn cam_transition_times(r1: f64, r2: f64) -> Result<TransitionTimes> {
    positive("R1", r1)?;
    positive("R2", r2)?;
    let root = 2.0 * (r1 * r2).sqrt();
    let t_minus = r2 / (2.0 * r2 + r1 + root);
    let t_plus = r2 / (2.0 * r2 + r1 - root);
    Ok(TransitionTimes { t_minus, t_plus, t_plus_at_least_one: t_plus >= 1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HirzebruchKind {
    W1,
    W2,
}

/// Transition times of the semitoric families on the Hirzebruch surfaces.
///
/// `W1`: `t^∓ = 1/(2(1 ± γ√(2β)))`, valid for `0 < γ < 1/(2√(2β))`.
/// `W2`: `t^∓ = (1+2ν)/(1+(3±c)ν)` with `ν = β/α`, `c = 2γ√ν`, valid for
/// `0 < γ < 1/(2ν)` and `c < 1`.
pub fn hirzebruch_transition_times(kind: HirzebruchKind, alpha: f64, beta: f64, gamma: f64) -> Result<(f64, f64)> {
    positive("alpha", alpha)?;
    positive("beta", beta)?;
    positive("gamma", gamma)?;
    match kind {
        HirzebruchKind::W1 => {
            let g = gamma * (2.0 * beta).sqrt();
            if gamma >= 1.0 / (2.0 * (2.0 * beta).sqrt()) {
                return Err(Error::InvalidParameter(format!("W1 needs gamma < 1/(2 sqrt(2 beta)), got {gamma}")));
            }
            Ok((1.0 / (2.0 * (1.0 + g)), 1.0 / (2.0 * (1.0 - g))))
        }
        HirzebruchKind::W2 => {
            let nu = beta / alpha;
            let c = 2.0 * gamma * nu.sqrt();
            if gamma >= 1.0 / (2.0 * nu) {
                return Err(Error::InvalidParameter(format!("W2 needs gamma < 1/(2 nu), got {gamma}")));
            }
            if c >= 1.0 {
                return Err(Error::InvalidParameter(format!("W2 needs c = 2 gamma sqrt(nu) < 1, got {c}")));
            }
            Ok(((1.0 + 2.0 * nu) / (1.0 + (3.0 + c) * nu), (1.0 + 2.0 * nu) / (1.0 + (3.0 - c) * nu)))
        }
    }
}

/// Delzant polygon of the standard toric system on the Hirzebruch surface
/// `W_n`: `(0,0), (α+nβ, 0), (α, β), (0, β)`.
pub fn hirzebruch_toric_polygon(n: u32, alpha: f64, beta: f64) -> Result<Vec<(f64, f64)>> {
    positive("alpha", alpha)?;
    positive("beta", beta)?;
    Ok(vec![(0.0, 0.0), (alpha + n as f64 * beta, 0.0), (alpha, beta), (0.0, beta)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::{fd_gradient, poisson_bracket, Observable};
    use rand::rngs::StdRng;
    use rand::{RngExt, SeedableRng};

    pub(crate) fn random_point(sys: &SystemInstance, rng: &mut StdRng) -> PhasePoint {
        let m = sys.manifold();
        let mut x = Vec::new();
        for f in m.factors() {
            match f {
                FactorKind::Sphere => {
                    let z: f64 = rng.random_range(-1.0..1.0);
                    let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    let r = (1.0 - z * z).sqrt();
                    x.extend([r * a.cos(), r * a.sin(), z]);
                }
                FactorKind::Plane => x.extend([rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]),
            }
        }
        PhasePoint::new(x)
    }

    fn systems() -> Vec<SystemInstance> {
        vec![
            SystemInstance::cso(1.0, 1.0).unwrap(),
            SystemInstance::cso(0.7, 1.9).unwrap(),
            SystemInstance::cam(1.0, 1.5, 0.5).unwrap(),
            SystemInstance::cam(2.0, 1.0, 0.3).unwrap(),
            SystemInstance::two_focus(1.0, 2.0, 0.3, 0.6).unwrap(),
        ]
    }

    #[test]
    fn values_at_the_poles() {
        let cam = SystemInstance::cam(1.0, 1.5, 0.37).unwrap();
        assert_eq!(cam.values(&[0.0, 0.0, 1.0, 0.0, 0.0, -1.0]), (0.0, 0.0));
        let cso = SystemInstance::cso(1.0, 1.0).unwrap();
        assert_eq!(cso.values(&[0.0, 0.0, 1.0, 0.0, 0.0]), (0.0, 0.0));
    }

    #[test]
    fn two_focus_reduces_to_cam_on_the_s2_zero_edge() {
        let mut rng = StdRng::seed_from_u64(7);
        let (r1, r2, t) = (1.0, 2.0, 0.4);
        let tf = SystemInstance::two_focus(r1, r2, t, 0.0).unwrap();
        let cam = SystemInstance::cam(r1, r2, t).unwrap();
        for _ in 0..100 {
            let p = random_point(&cam, &mut rng);
            let (l1, h1) = tf.values(&p.coords);
            let (l2, h2) = cam.values(&p.coords);
            assert!((h1 - (h2 - (2.0 * t - 1.0))).abs() < 1e-15);
            assert!((l1 - (l2 + r1 - r2)).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let mut rng = StdRng::seed_from_u64(11);
        for sys in systems() {
            for _ in 0..50 {
                let p = random_point(&sys, &mut rng);
                let (gl, gh) = sys.gradients(&p.coords);
                let fl = fd_gradient(|x| sys.values(x).0, &p.coords, 1e-3);
                let fh = fd_gradient(|x| sys.values(x).1, &p.coords, 1e-3);
                for (a, b) in gl.iter().zip(&fl).chain(gh.iter().zip(&fh)) {
                    assert!((a - b).abs() < 1e-7, "{}: {a} vs {b}", sys.name());
                }
            }
        }
    }

    #[test]
    fn series_hessian_matches_gradient_differences() {
        let mut rng = StdRng::seed_from_u64(5);
        for sys in systems() {
            let p = random_point(&sys, &mut rng);
            let (_, hh) = sys.hessians(&p.coords);
            for j in 0..p.coords.len() {
                let col = fd_gradient(|x| sys.gradients(x).1[j], &p.coords, 1e-3);
                for i in 0..p.coords.len() {
                    assert!((hh[(j, i)] - col[i]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn integrability_at_random_points() {
        let mut rng = StdRng::seed_from_u64(3);
        for sys in systems() {
            for _ in 0..1000 {
                let p = random_point(&sys, &mut rng);
                let b = poisson_bracket(&sys, Observable::L, Observable::H, &p).unwrap();
                assert!(b.abs() < 1e-10, "{}: {b}", sys.name());
            }
        }
    }

    #[test]
    fn reduced_model_reproduces_h_on_lifts() {
        let mut rng = StdRng::seed_from_u64(9);
        for sys in systems() {
            let red = sys.reduced();
            for _ in 0..50 {
                let p = random_point(&sys, &mut rng);
                let (l, h) = sys.values(&p.coords);
                let (lo, hi) = red.z_range(l).unwrap();
                let z = p.coords[2];
                assert!(z >= lo - 1e-12 && z <= hi + 1e-12);
                let inv = sys.orbit_invariants(&p.coords);
                let phi = inv[2].atan2(inv[1]);
                let (a, b) = red.terms(z, l);
                assert!((a + b * phi.cos() - h).abs() < 1e-12, "{}", sys.name());
                let q = red.lift(l, z, phi);
                let (l2, h2) = sys.values(&q.coords);
                assert!((l2 - l).abs() < 1e-12 && (h2 - h).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transition_times_examples() {
        let t = cam_transition_times(1.0, 1.0).unwrap();
        assert!((t.t_minus - 0.2).abs() < 1e-15 && (t.t_plus - 1.0).abs() < 1e-15);
        assert!(t.t_plus_at_least_one);
        let t = cam_transition_times(1.0, 1.5).unwrap();
        assert!((t.t_minus - 0.23258).abs() < 1e-5 && (t.t_plus - 0.96743).abs() < 1e-5);
        assert!(cam_transition_times(0.0, 1.0).is_err());
    }

    #[test]
    fn hirzebruch_examples() {
        let (a, b) = hirzebruch_transition_times(HirzebruchKind::W1, 1.0, 0.5, 0.25).unwrap();
        assert!((a - 0.4).abs() < 1e-15 && (b - 2.0 / 3.0).abs() < 1e-15);
        let (a, b) = hirzebruch_transition_times(HirzebruchKind::W1, 1.0, 0.5, 1e-9).unwrap();
        assert!((a - 0.5).abs() < 1e-8 && (b - 0.5).abs() < 1e-8);
        // ν = 1, c = 1/2 means γ = 1/4.
        let (a, b) = hirzebruch_transition_times(HirzebruchKind::W2, 1.0, 1.0, 0.25).unwrap();
        assert!((a - 2.0 / 3.0).abs() < 1e-15 && (b - 6.0 / 7.0).abs() < 1e-15);
        assert!(hirzebruch_transition_times(HirzebruchKind::W1, 1.0, 0.5, 0.5).is_err());
        // ν = 1/4: γ < 2 passes the first bound but c = γ fails at γ = 1.5.
        assert!(hirzebruch_transition_times(HirzebruchKind::W2, 4.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn hirzebruch_polygons() {
        assert_eq!(hirzebruch_toric_polygon(0, 2.0, 1.0).unwrap(), vec![(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]);
        assert_eq!(hirzebruch_toric_polygon(1, 1.0, 1.0).unwrap(), vec![(0.0, 0.0), (2.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(hirzebruch_toric_polygon(2, 1.0, 0.5).unwrap(), vec![(0.0, 0.0), (2.0, 0.0), (1.0, 0.5), (0.0, 0.5)]);
    }

    #[test]
    fn two_focus_rejects_reversed_weights() {
        assert!(SystemInstance::two_focus(2.0, 1.0, 0.5, 0.5).is_err());
        assert!(SystemInstance::two_focus(1.0, 2.0, 1.5, 0.5).is_err());
    }
}
