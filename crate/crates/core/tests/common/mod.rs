//! Closed-form reference values for the coupled angular momenta and random
//! sampling helpers. Nothing here calls into the library's own formulas.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::RngExt;
use semitoric::catalog::SystemInstance;
use semitoric::phasespace::{FactorKind, IntegrableSystem, PhasePoint};

/// `(t⁻, t⁺)` of the coupled angular momenta.
pub fn transition_times(r1: f64, r2: f64) -> (f64, f64) {
    let root = 2.0 * (r1 * r2).sqrt();
    (r2 / (2.0 * r2 + r1 + root), r2 / (2.0 * r2 + r1 - root))
}

fn r_d(r1: f64, r2: f64, t: f64) -> f64 {
    (-(r2 * r2) * (1.0 - 2.0 * t).powi(2) + 2.0 * r1 * r2 * t - r1 * r1 * t * t).sqrt()
}

/// Height invariant. The two arctangents are taken on their continuous
/// branch, `atan2(r_D, denominator)`.
pub fn height(r1: f64, r2: f64, t: f64) -> f64 {
    let rd = r_d(r1, r2, t);
    2.0 * r1.min(r2) + rd / (PI * t)
        - 2.0 * r2 / PI * rd.atan2(r2 - t * r1)
        - 2.0 * r1 / PI * rd.atan2(r2 + t * r1 - 2.0 * r2 * t)
}

/// Linear and quadratic Taylor coefficients `[s₁₀, s₀₁, s₂₀, s₁₁, s₀₂]`,
/// `s₁₀` reduced into `[0, 2π)`. For `R₁ < R₂` the arctangent is the
/// principal one; otherwise its continuation in `(R₁, R₂)`.
pub fn taylor(r1: f64, r2: f64, t: f64) -> [f64; 5] {
    let rd = r_d(r1, r2, t);
    let num = r2 * r2 * (2.0 * t - 1.0) - r1 * r2 * (t + 1.0) + r1 * r1 * t;
    let s10 = (-num).atan2((r2 - r1) * rd).rem_euclid(2.0 * PI);
    let s01 = (4.0 * rd.powi(3) / (r1.sqrt() * r2.powf(1.5) * (1.0 - t) * t * t)).ln();
    let s20 = (-r2.powi(4) * (2.0 * t - 1.0).powi(3)
        - r1 * r2.powi(3) * (32.0 * t.powi(3) - 46.0 * t * t + 17.0 * t - 1.0)
        - 3.0 * r1 * r1 * r2 * r2 * t * (4.0 * t * t - 7.0 * t + 1.0)
        - r1.powi(3) * r2 * (5.0 * t - 3.0) * t * t
        - r1.powi(4) * t.powi(3))
        / (16.0 * r1 * r2 * rd.powi(3));
    let s11 = (r2 - r1) * (r2 * r2 * (2.0 * t - 1.0).powi(2) + 2.0 * r1 * r2 * t * (6.0 * t - 1.0) + r1 * r1 * t * t)
        / (8.0 * r1 * r2 * rd * rd);
    let s02 = (r2.powi(4) * (2.0 * t - 1.0).powi(3)
        - r1 * r2.powi(3) * (16.0 * t.powi(3) - 42.0 * t * t + 15.0 * t + 1.0)
        - r1 * r1 * r2 * r2 * t * (28.0 * t * t - 3.0 * t - 3.0)
        + r1.powi(3) * r2 * t * t * (13.0 * t - 3.0)
        + r1.powi(4) * t.powi(3))
        / (16.0 * r1 * r2 * rd.powi(3));
    [s10, s01, s20, s11, s02]
}

/// Corners of the `t = 0` image in `(L, area/2π)`: the images of the four
/// poles, where the second action is `R₁(z₁ + 1)`.
pub fn toric_corners(r1: f64, r2: f64) -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for z1 in [-1.0, 1.0] {
        for z2 in [-1.0, 1.0] {
            v.push((r1 * (z1 - 1.0) + r2 * (z2 + 1.0), r1 * (z1 + 1.0)));
        }
    }
    v
}

/// Uniform on each sphere factor; plane factors in a box.
pub fn random_point(sys: &SystemInstance, rng: &mut StdRng) -> PhasePoint {
    let mut x = Vec::new();
    for f in sys.manifold().factors() {
        match f {
            FactorKind::Sphere => {
                let z: f64 = rng.random_range(-1.0..1.0);
                let a: f64 = rng.random_range(0.0..2.0 * PI);
                let r = (1.0 - z * z).sqrt();
                x.extend([r * a.cos(), r * a.sin(), z]);
            }
            FactorKind::Plane => x.extend([rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]),
        }
    }
    PhasePoint::new(x)
}

/// Set equality of two point lists within `tol`.
pub fn same_points(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
    let near = |p: &(f64, f64), q: &[(f64, f64)]| q.iter().any(|r| (p.0 - r.0).abs() < tol && (p.1 - r.1).abs() < tol);
    a.len() == b.len() && a.iter().all(|p| near(p, b)) && b.iter().all(|p| near(p, a))
}
