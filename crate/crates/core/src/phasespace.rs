//! Products of unit spheres and planes with weighted symplectic forms.
//!
//! Points are stored as one flat vector of ambient coordinates, `(x, y, z)`
//! per sphere factor and `(u, v)` per plane factor, in factor order. The
//! bracket convention is
//!
//! * sphere factor of weight `R`: `{x, y} = -σ z / R` (cyclically),
//! * plane factor of weight `ρ`: `{u, v} = σ / ρ`,
//!
//! where `σ` is the global sign of the symplectic form. With these signs the
//! flow of `L` is 2π-periodic for every catalog system.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ode::Dopri5;
use crate::series::Field;

/// Tolerance on `x² + y² + z² = 1` accepted for input points.
pub const SPHERE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Sphere,
    Plane,
}

impl FactorKind {
    pub fn dim(self) -> usize {
        match self {
            FactorKind::Sphere => 3,
            FactorKind::Plane => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldDescriptor {
    factors: Vec<FactorKind>,
    weights: Vec<f64>,
    global_sign: f64,
}

impl ManifoldDescriptor {
    pub fn new(factors: Vec<FactorKind>, weights: Vec<f64>, global_sign: i8) -> Result<Self> {
        if factors.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} factors but {} weights",
                factors.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(format!("factor weights must be positive, got {w}")));
        }
        if global_sign != 1 && global_sign != -1 {
            return Err(Error::InvalidParameter(format!("global sign must be ±1, got {global_sign}")));
        }
        Ok(ManifoldDescriptor { factors, weights, global_sign: global_sign as f64 })
    }

    pub fn factors(&self) -> &[FactorKind] {
        &self.factors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn global_sign(&self) -> f64 {
        self.global_sign
    }

    /// Ambient dimension of the flat coordinate vector.
    pub fn ambient_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).sum()
    }

    /// Coordinate range of factor `i` inside the flat vector.
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        let start: usize = self.factors[..i].iter().map(|f| f.dim()).sum();
        start..start + self.factors[i].dim()
    }

    /// Radially projects every sphere block back onto the unit sphere.
    pub fn project(&self, x: &mut [f64]) {
        for (i, f) in self.factors.iter().enumerate() {
            if *f == FactorKind::Sphere {
                let r = self.range(i);
                let n = x[r.clone()].iter().map(|c| c * c).sum::<f64>().sqrt();
                if n > 0.0 {
                    x[r].iter_mut().for_each(|c| *c /= n);
                }
            }
        }
    }

    /// Largest violation of the sphere constraints.
    pub fn constraint_violation(&self, x: &[f64]) -> f64 {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, f)| **f == FactorKind::Sphere)
            .map(|(i, _)| (x[self.range(i)].iter().map(|c| c * c).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub coords: Vec<f64>,
}

impl PhasePoint {
    pub fn new(coords: Vec<f64>) -> Self {
        PhasePoint { coords }
    }

    pub fn from_blocks(blocks: &[&[f64]]) -> Self {
        PhasePoint { coords: blocks.concat() }
    }

    pub fn block<'a>(&'a self, m: &ManifoldDescriptor, i: usize) -> &'a [f64] {
        &self.coords[m.range(i)]
    }

    /// Checks the dimension and the sphere constraints.
    pub fn validate(&self, m: &ManifoldDescriptor) -> Result<()> {
        if self.coords.len() != m.ambient_dim() {
            return Err(Error::ManifoldMismatch(format!(
                "point has {} coordinates, manifold needs {}",
                self.coords.len(),
                m.ambient_dim()
            )));
        }
        let v = m.constraint_violation(&self.coords);
        if v > SPHERE_TOL {
            return Err(Error::Constraint(format!("sphere constraint violated by {v:e}")));
        }
        Ok(())
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub coords: Vec<f64>,
}

impl TangentVector {
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// A pair of commuting functions on a product manifold.
pub trait IntegrableSystem: Sync {
    fn manifold(&self) -> &ManifoldDescriptor;
    /// `(L, H)` at ambient coordinates `x`.
    fn values(&self, x: &[f64]) -> (f64, f64);
    /// Ambient gradients of `L` and `H`.
    fn gradients(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>);
}

/// Observables the vector-field and flow operations accept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Observable {
    L,
    H,
    /// `a L + b H`
    Combination { a: f64, b: f64 },
}

impl Observable {
    fn coefficients(self) -> (f64, f64) {
        match self {
            Observable::L => (1.0, 0.0),
            Observable::H => (0.0, 1.0),
            Observable::Combination { a, b } => (a, b),
        }
    }

    pub fn value<S: IntegrableSystem + ?Sized>(self, sys: &S, x: &[f64]) -> f64 {
        let (a, b) = self.coefficients();
        let (l, h) = sys.values(x);
        a * l + b * h
    }

    pub fn gradient<S: IntegrableSystem + ?Sized>(self, sys: &S, x: &[f64]) -> Vec<f64> {
        let (a, b) = self.coefficients();
        let (gl, gh) = sys.gradients(x);
        gl.iter().zip(&gh).map(|(l, h)| a * l + b * h).collect()
    }
}

/// Hamiltonian vector field of a function with ambient gradient `grad`.
pub fn vector_field_from_gradient(m: &ManifoldDescriptor, x: &[f64], grad: &[f64], out: &mut [f64]) {
    let sigma = m.global_sign();
    for (i, f) in m.factors().iter().enumerate() {
        let r = m.range(i);
        let k = sigma / m.weights()[i];
        let (p, g) = (&x[r.clone()], &grad[r.clone()]);
        let o = &mut out[r];
        match f {
            FactorKind::Sphere => {
                o[0] = k * (p[1] * g[2] - p[2] * g[1]);
                o[1] = k * (p[2] * g[0] - p[0] * g[2]);
                o[2] = k * (p[0] * g[1] - p[1] * g[0]);
            }
            FactorKind::Plane => {
                o[0] = k * g[1];
                o[1] = -k * g[0];
            }
        }
    }
}

/// `{f, g}` from the ambient gradients of `f` and `g`.
pub fn bracket_from_gradients(m: &ManifoldDescriptor, x: &[f64], gf: &[f64], gg: &[f64]) -> f64 {
    let sigma = m.global_sign();
    let mut total = 0.0;
    for (i, f) in m.factors().iter().enumerate() {
        let r = m.range(i);
        let k = sigma / m.weights()[i];
        let (p, a, b) = (&x[r.clone()], &gf[r.clone()], &gg[r]);
        total += match f {
            FactorKind::Sphere => {
                let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
                -k * (p[0] * c[0] + p[1] * c[1] + p[2] * c[2])
            }
            FactorKind::Plane => k * (a[0] * b[1] - a[1] * b[0]),
        };
    }
    total
}

pub fn hamiltonian_vector_field<S: IntegrableSystem + ?Sized>(
    sys: &S,
    observable: Observable,
    p: &PhasePoint,
) -> Result<TangentVector> {
    let m = sys.manifold();
    p.validate(m)?;
    let grad = observable.gradient(sys, &p.coords);
    let mut out = vec![0.0; p.coords.len()];
    vector_field_from_gradient(m, &p.coords, &grad, &mut out);
    Ok(TangentVector { coords: out })
}

pub fn poisson_bracket<S: IntegrableSystem + ?Sized>(sys: &S, f: Observable, g: Observable, p: &PhasePoint) -> Result<f64> {
    let m = sys.manifold();
    p.validate(m)?;
    Ok(bracket_from_gradients(m, &p.coords, &f.gradient(sys, &p.coords), &g.gradient(sys, &p.coords)))
}

/// Fourth-order central finite-difference gradient with step `h`.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            let mut at = |d: f64| {
                y[i] = x[i] + d;
                let v = f(&y);
                y[i] = x[i];
                v
            };
            (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h)
        })
        .collect()
}

/// Hamiltonian vector field of an arbitrary function, differentiated
/// numerically with step `1e-6`.
pub fn generic_vector_field<F: Fn(&[f64]) -> f64>(m: &ManifoldDescriptor, f: F, p: &PhasePoint) -> Result<TangentVector> {
    p.validate(m)?;
    let grad = fd_gradient(f, &p.coords, 1e-6);
    let mut out = vec![0.0; p.coords.len()];
    vector_field_from_gradient(m, &p.coords, &grad, &mut out);
    Ok(TangentVector { coords: out })
}

/// Sampled trajectory of a flow.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.points.last().expect("trajectory holds the initial point")
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Integrates the flow of `observable` for `duration` (negative allowed),
/// recording every accepted step.
pub fn flow<S: IntegrableSystem + ?Sized>(
    sys: &S,
    observable: Observable,
    p0: &PhasePoint,
    duration: f64,
    tol: f64,
) -> Result<Trajectory> {
    let mut traj = Trajectory { times: vec![0.0], points: vec![p0.clone()] };
    flow_observed(sys, observable, p0, duration, tol, |_, _, t, y| {
        traj.times.push(t);
        traj.points.push(PhasePoint::new(y.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(traj)
}

/// Endpoint of a flow, without storing the trajectory.
pub fn flow_endpoint<S: IntegrableSystem + ?Sized>(
    sys: &S,
    observable: Observable,
    p0: &PhasePoint,
    duration: f64,
    tol: f64,
) -> Result<PhasePoint> {
    let (_, y) = flow_observed(sys, observable, p0, duration, tol, |_, _, _, _| ControlFlow::Continue(()))?;
    Ok(PhasePoint::new(y))
}

/// Lower-level flow driver: `observe(t_prev, y_prev, t, y)` sees every
/// accepted step and may stop the run.
pub fn flow_observed<S, O>(
    sys: &S,
    observable: Observable,
    p0: &PhasePoint,
    duration: f64,
    tol: f64,
    observe: O,
) -> Result<(f64, Vec<f64>)>
where
    S: IntegrableSystem + ?Sized,
    O: FnMut(f64, &[f64], f64, &[f64]) -> ControlFlow<()>,
{
    check_tol(tol)?;
    let m = sys.manifold();
    p0.validate(m)?;
    let rhs = field_closure(sys, observable);
    integrator(tol).integrate(&rhs, &p0.coords, duration, |y| m.project(y), observe)
}

/// The integrator configuration used by every flow.
pub fn integrator(tol: f64) -> Dopri5 {
    let mut s = Dopri5::new(tol);
    s.h_max = 0.25;
    s
}

/// Right-hand side `y' = X_f(y)` suitable for [`Dopri5`].
pub fn field_closure<S: IntegrableSystem + ?Sized>(sys: &S, observable: Observable) -> impl Fn(&[f64], &mut [f64]) + '_ {
    move |y: &[f64], dy: &mut [f64]| {
        let grad = observable.gradient(sys, y);
        vector_field_from_gradient(sys.manifold(), y, &grad, dy);
    }
}

/// Local canonical coordinates around a point.
///
/// Each factor contributes one conjugate pair `(q_k, p_k)` with
/// `{q_k, p_k} = 1`; the local vector is ordered `(q_1..q_n, p_1..p_n)`.
/// Sphere factors use the Archimedes (equal-area) chart centred at the base
/// point, so the chart is exactly canonical, not only to first order.
#[derive(Clone, Debug)]
pub struct DarbouxChart {
    manifold: ManifoldDescriptor,
    base: PhasePoint,
    /// Per factor: rotation with third column equal to the base point
    /// (spheres) or unused (planes).
    rotations: Vec<[[f64; 3]; 3]>,
    /// Per factor: whether `(q, p) = (b, a)` rather than `(a, b)`.
    swapped: Vec<bool>,
}

impl DarbouxChart {
    pub fn new(m: &ManifoldDescriptor, base: &PhasePoint) -> Result<Self> {
        base.validate(m)?;
        let sigma = m.global_sign();
        let mut rotations = Vec::new();
        let mut swapped = Vec::new();
        for (i, f) in m.factors().iter().enumerate() {
            match f {
                FactorKind::Sphere => {
                    rotations.push(rotation_to(base.block(m, i)));
                    // {a, b} = -σ in the chart.
                    swapped.push(-sigma < 0.0);
                }
                FactorKind::Plane => {
                    rotations.push([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
                    // {a, b} = σ in the chart.
                    swapped.push(sigma < 0.0);
                }
            }
        }
        Ok(DarbouxChart { manifold: m.clone(), base: base.clone(), rotations, swapped })
    }

    pub fn base(&self) -> &PhasePoint {
        &self.base
    }

    /// Number of conjugate pairs.
    pub fn degrees_of_freedom(&self) -> usize {
        self.manifold.factors().len()
    }

    /// Ambient coordinates of the local point `(q, p)`. Works on plain
    /// numbers and on truncated series alike.
    pub fn embed<F: Field>(&self, local: &[F]) -> Vec<F> {
        let n = self.degrees_of_freedom();
        assert_eq!(local.len(), 2 * n, "local coordinates are (q_1..q_n, p_1..p_n)");
        let m = &self.manifold;
        let mut out = Vec::with_capacity(m.ambient_dim());
        for (i, f) in m.factors().iter().enumerate() {
            let (q, p) = (local[i].clone(), local[n + i].clone());
            let (a, b) = if self.swapped[i] { (p, q) } else { (q, p) };
            let w = m.weights()[i];
            let base = self.base.block(m, i);
            match f {
                FactorKind::Sphere => {
                    let s = a.clone() * a.clone() + b.clone() * b.clone();
                    let g = (s.clone() * (1.0 / (4.0 * w))).sqrt_one_minus() * (1.0 / w.sqrt());
                    let local_xyz = [a * g.clone(), b * g, s * (-1.0 / (2.0 * w)) + 1.0];
                    let q = &self.rotations[i];
                    for row in q.iter() {
                        out.push(
                            local_xyz[0].clone() * row[0] + local_xyz[1].clone() * row[1] + local_xyz[2].clone() * row[2],
                        );
                    }
                }
                FactorKind::Plane => {
                    out.push(a * (1.0 / w.sqrt()) + base[0]);
                    out.push(b * (1.0 / w.sqrt()) + base[1]);
                }
            }
        }
        out
    }
}

/// Rotation matrix whose third column is the unit vector `r`.
fn rotation_to(r: &[f64]) -> [[f64; 3]; 3] {
    if r[2] > 1.0 - 1e-15 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    if r[2] < -1.0 + 1e-15 {
        return [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
    }
    // e1 = normalize(k × r) for the axis k least aligned with r.
    let k = if r[0].abs() <= r[1].abs() && r[0].abs() <= r[2].abs() {
        [1.0, 0.0, 0.0]
    } else if r[1].abs() <= r[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let cross = |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let e3 = [r[0], r[1], r[2]];
    let mut e1 = cross(k, e3);
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|c| *c /= n);
    let e2 = cross(e3, e1);
    [[e1[0], e2[0], e3[0]], [e1[1], e2[1], e3[1]], [e1[2], e2[2], e3[2]]]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A single sphere with L = R z, whose flow is a unit-speed rotation.
    struct Spin {
        m: ManifoldDescriptor,
    }

    impl IntegrableSystem for Spin {
        fn manifold(&self) -> &ManifoldDescriptor {
            &self.m
        }
        fn values(&self, x: &[f64]) -> (f64, f64) {
            let r = self.m.weights()[0];
            (r * x[2], x[0] * x[0])
        }
        fn gradients(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
            (vec![0.0, 0.0, self.m.weights()[0]], vec![2.0 * x[0], 0.0, 0.0])
        }
    }

    #[test]
    fn descriptor_rejects_bad_weights() {
        assert!(ManifoldDescriptor::new(vec![FactorKind::Sphere], vec![0.0], 1).is_err());
        assert!(ManifoldDescriptor::new(vec![FactorKind::Sphere], vec![1.0, 2.0], 1).is_err());
        assert!(ManifoldDescriptor::new(vec![FactorKind::Sphere], vec![1.0], 0).is_err());
    }

    #[test]
    fn constraint_violation_is_reported() {
        let m = ManifoldDescriptor::new(vec![FactorKind::Sphere], vec![1.0], 1).unwrap();
        let s = Spin { m: m.clone() };
        let bad = PhasePoint::new(vec![0.0, 0.0, 1.1]);
        assert!(matches!(hamiltonian_vector_field(&s, Observable::L, &bad), Err(Error::Constraint(_))));
    }

    #[test]
    fn sphere_rotation_has_period_two_pi() {
        for sign in [1, -1] {
            let m = ManifoldDescriptor::new(vec![FactorKind::Sphere], vec![2.5], sign).unwrap();
            let s = Spin { m };
            let p = PhasePoint::new(vec![0.6, 0.0, 0.8]);
            let end = flow_endpoint(&s, Observable::L, &p, 2.0 * std::f64::consts::PI, 1e-12).unwrap();
            assert!(end.distance(&p) < 1e-9);
            let quarter = flow_endpoint(&s, Observable::L, &p, std::f64::consts::FRAC_PI_2, 1e-12).unwrap();
            // σ = -1 rotates counter-clockwise seen from +z.
            assert!((quarter.coords[1] + sign as f64 * 0.6).abs() < 1e-9);
        }
    }

    #[test]
    fn fd_gradient_is_fourth_order_accurate() {
        let f = |x: &[f64]| (x[0] * x[1]).sin() + x[2].exp();
        let g = fd_gradient(f, &[0.3, -0.4, 0.2], 1e-3);
        let exact = [(-0.12f64).cos() * -0.4, (-0.12f64).cos() * 0.3, 0.2f64.exp()];
        for (a, b) in g.iter().zip(exact) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn chart_is_canonical() {
        // Pull back the bracket through the chart Jacobian: {q, p} = 1 and
        // every other pair commutes, at random local points.
        for sign in [1i8, -1] {
            let m = ManifoldDescriptor::new(vec![FactorKind::Sphere, FactorKind::Plane], vec![1.3, 0.7], sign).unwrap();
            let mut base = PhasePoint::new(vec![0.3, 0.5, -0.8, 0.2, -0.1]);
            m.project(&mut base.coords);
            let chart = DarbouxChart::new(&m, &base).unwrap();
            let at = [0.11, -0.07, 0.05, 0.09];
            assert!(chart.embed(&[0.0, 0.0, 0.0, 0.0]).iter().zip(&base.coords).all(|(a, b)| (a - b).abs() < 1e-15));
            let x = chart.embed(&at);
            let grads: Vec<Vec<f64>> = (0..4)
                .map(|k| {
                    // gradient of the local coordinate k as a function on the manifold,
                    // via the inverse Jacobian of the chart
                    let jac: Vec<Vec<f64>> = (0..4)
                        .map(|j| {
                            let h = 1e-6;
                            let mut a = at;
                            let mut b = at;
                            a[j] += h;
                            b[j] -= h;
                            let (ea, eb) = (chart.embed(&a), chart.embed(&b));
                            ea.iter().zip(&eb).map(|(u, v)| (u - v) / (2.0 * h)).collect()
                        })
                        .collect();
                    // Solve for the ambient covector g with g · J_j = δ_kj, using
                    // the pseudo-inverse of the 5x4 Jacobian.
                    let jm = nalgebra::DMatrix::from_fn(5, 4, |r, c| jac[c][r]);
                    let pinv = jm.clone().pseudo_inverse(1e-12).unwrap();
                    (0..5).map(|r| pinv[(k, r)]).collect()
                })
                .collect();
            let br = |i: usize, j: usize| bracket_from_gradients(&m, &x, &grads[i], &grads[j]);
            assert!((br(0, 2) - 1.0).abs() < 1e-6, "sign {sign}: {{q1,p1}} = {}", br(0, 2));
            assert!((br(1, 3) - 1.0).abs() < 1e-6);
            assert!(br(0, 1).abs() < 1e-6 && br(0, 3).abs() < 1e-6 && br(2, 3).abs() < 1e-6);
        }
    }

    #[test]
    fn rotation_completion_is_special_orthogonal() {
        let r = [0.48, -0.6, 0.64];
        let q = rotation_to(&r);
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| q[k][i] * q[k][j]).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
            assert!((q[i][2] - r[i]).abs() < 1e-15);
        }
        let det = q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1]) - q[0][1] * (q[1][0] * q[2][2] - q[1][2] * q[2][0])
            + q[0][2] * (q[1][0] * q[2][1] - q[1][1] * q[2][0]);
        assert!((det - 1.0).abs() < 1e-14);
    }
}
