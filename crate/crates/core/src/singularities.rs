//! Rank-0 points, their Williamson type, and parameter scans of the
//! focus-focus count.

use std::f64::consts;

use nalgebra::{Complex, DMatrix, DVector, Matrix4, Schur};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::catalog::SystemInstance;
use crate::error::{Error, Result};
use crate::exec::{map_range, map_slice, Execution};
use crate::numeric::roots::bisect_predicate;
use crate::phasespace::{
    vector_field_from_gradient, DarbouxChart, FactorKind, IntegrableSystem, PhasePoint,
};
use crate::series::TruncatedSeries;

/// Both vector fields must vanish to this level at a rank-0 point.
pub const RANK0_TOL: f64 = 1e-8;
/// Relative eigenvalue tolerance of the classification.
pub const CLASSIFY_TOL: f64 = 1e-7;
/// Relative distance below which two eigenvalues count as collided. A
/// defective double eigenvalue splits by about the square root of the
/// roundoff, so this is looser than [`CLASSIFY_TOL`].
pub const COLLISION_TOL: f64 = 1e-6;
/// Rank-0 points closer than this are merged.
pub const MERGE_TOL: f64 = 1e-8;
/// Cap on the Schur iteration before falling back to the closed form.
const SCHUR_ITERATIONS: usize = 10_000;

/// Regularizing multiples tried in order for the combination `H + cL`.
pub(crate) const REGULARIZERS: [f64; 8] = [
    consts::FRAC_1_PI,
    -0.577_215_664_901_532_9,
    consts::SQRT_2,
    -consts::E,
    0.137_035_999_084,
    -1.618_033_988_749_895,
    consts::PI,
    -consts::LN_2,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityKind {
    EllipticElliptic,
    FocusFocus,
    /// Eigenvalue collision or a zero eigenvalue for every regularizer tried.
    Degenerate,
    /// A real eigenvalue pair; such points are excluded from semitoric
    /// systems and never occur in the catalog away from degenerate loci.
    Hyperbolic,
}

impl SingularityKind {
    pub fn label(self) -> &'static str {
        match self {
            SingularityKind::EllipticElliptic => "elliptic-elliptic",
            SingularityKind::FocusFocus => "focus-focus",
            SingularityKind::Degenerate => "degenerate",
            SingularityKind::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityRecord {
    pub point: PhasePoint,
    pub kind: SingularityKind,
    /// `(λ, η) = F(point)`.
    pub critical_value: (f64, f64),
    /// Eigenvalues `(re, im)` of the linearization of `H + cL`.
    pub eigenvalues: Vec<(f64, f64)>,
    /// The regularizing multiple `c` used.
    pub regularizer: f64,
}

/// `Ω = [[0, I], [-I, 0]]` for coordinates `(q₁, q₂, p₁, p₂)`.
pub fn omega() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 2)] = 1.0;
    j[(1, 3)] = 1.0;
    j[(2, 0)] = -1.0;
    j[(3, 1)] = -1.0;
    j
}

/// Expansions of `L` and `H` to total degree `degree` in the Darboux chart
/// centred at `p` (constant terms included).
pub fn chart_expansion(
    sys: &SystemInstance,
    p: &PhasePoint,
    degree: usize,
) -> Result<(DarbouxChart, TruncatedSeries<f64>, TruncatedSeries<f64>)> {
    let chart = DarbouxChart::new(sys.manifold(), p)?;
    let n = 2 * chart.degrees_of_freedom();
    let vars: Vec<TruncatedSeries<f64>> = (0..n).map(|i| TruncatedSeries::variable(n, degree, i)).collect();
    let ambient = chart.embed(&vars);
    let (l, h) = sys.observables(&ambient);
    Ok((chart, l, h))
}

fn to_matrix4(s: &[Vec<f64>]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| s[i][j])
}

/// Norms of the two Hamiltonian vector fields at `p`.
pub fn field_norms(sys: &SystemInstance, x: &[f64]) -> (f64, f64) {
    let m = sys.manifold();
    let (gl, gh) = sys.gradients(x);
    let mut a = vec![0.0; x.len()];
    let mut b = vec![0.0; x.len()];
    vector_field_from_gradient(m, x, &gl, &mut a);
    vector_field_from_gradient(m, x, &gh, &mut b);
    let n = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    (n(&a), n(&b))
}

/// Linearizations `A_L = Ω S_L`, `A_H = Ω S_H` in the Darboux chart at a
/// rank-0 point.
pub fn linearizations(sys: &SystemInstance, p: &PhasePoint) -> Result<(Matrix4<f64>, Matrix4<f64>)> {
    p.validate(sys.manifold())?;
    let (fl, fh) = field_norms(sys, &p.coords);
    if fl > RANK0_TOL || fh > RANK0_TOL {
        return Err(Error::Precondition(format!(
            "point is not rank-0: |X_L| = {fl:e}, |X_H| = {fh:e}"
        )));
    }
    let (_, l, h) = chart_expansion(sys, p, 2)?;
    let j = omega();
    Ok((j * to_matrix4(&l.hessian()), j * to_matrix4(&h.hessian())))
}

/// Spectrum of a Hamiltonian matrix from `μ⁴ − ½tr(A²)μ² + det A`, the
/// characteristic polynomial being even.
fn hamiltonian_eigenvalues(a: &Matrix4<f64>) -> Vec<Complex<f64>> {
    let b = -0.5 * (a * a).trace();
    let c = a.determinant();
    let disc = Complex::new(b * b - 4.0 * c, 0.0).sqrt();
    let mut out = Vec::with_capacity(4);
    for nu in [(-b + disc) / 2.0, (-b - disc) / 2.0] {
        let mu = nu.sqrt();
        out.extend([mu, -mu]);
    }
    out
}

fn eigenvalues(a: &Matrix4<f64>) -> Vec<Complex<f64>> {
    // The unbounded Schur iteration can cycle on some inputs.
    let mut ev: Vec<Complex<f64>> = match Schur::try_new(*a, f64::EPSILON, SCHUR_ITERATIONS) {
        Some(s) => s.complex_eigenvalues().iter().copied().collect(),
        None => {
            log::debug!("Schur iteration did not converge; using the characteristic polynomial");
            hamiltonian_eigenvalues(a)
        }
    };
    ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    ev
}

fn collided(ev: &[Complex<f64>], tol: f64) -> bool {
    (0..ev.len()).any(|i| (i + 1..ev.len()).any(|j| (ev[i] - ev[j]).norm() < tol))
}

/// Williamson type of a spectrum without collisions.
fn pattern(ev: &[Complex<f64>], tol: f64) -> SingularityKind {
    let zero = ev.iter().any(|e| e.norm() < tol);
    if zero {
        return SingularityKind::Degenerate;
    }
    let real_small = ev.iter().filter(|e| e.re.abs() < tol).count();
    let imag_small = ev.iter().filter(|e| e.im.abs() < tol).count();
    match (real_small, imag_small) {
        (4, 0) => SingularityKind::EllipticElliptic,
        (0, 0) => SingularityKind::FocusFocus,
        _ => SingularityKind::Hyperbolic,
    }
}

/// Classifies a spectrum pair, trying the regularizers in order.
pub fn classify_linearization(al: &Matrix4<f64>, ah: &Matrix4<f64>, regularizers: &[f64]) -> (SingularityKind, Vec<Complex<f64>>, f64) {
    let mut first = None;
    for &c in regularizers {
        let ev = eigenvalues(&(ah + al * c));
        let radius = ev.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let tol = CLASSIFY_TOL * radius.max(f64::MIN_POSITIVE);
        if first.is_none() {
            first = Some((ev.clone(), c));
        }
        // Roundoff in the split of a double eigenvalue scales with the
        // matrix, not with the spectrum.
        let scale = ah.norm() + c.abs() * al.norm();
        if radius == 0.0 || collided(&ev, COLLISION_TOL * scale) {
            continue;
        }
        return (pattern(&ev, tol), ev, c);
    }
    let (ev, c) = first.expect("at least one regularizer");
    (SingularityKind::Degenerate, ev, c)
}

pub fn classify(sys: &SystemInstance, p: &PhasePoint) -> Result<SingularityRecord> {
    classify_with(sys, p, &REGULARIZERS)
}

/// Classification with an explicit regularizer sequence.
pub fn classify_with(sys: &SystemInstance, p: &PhasePoint, regularizers: &[f64]) -> Result<SingularityRecord> {
    let (al, ah) = linearizations(sys, p)?;
    let (kind, ev, c) = classify_linearization(&al, &ah, regularizers);
    Ok(SingularityRecord {
        point: p.clone(),
        kind,
        critical_value: sys.values(&p.coords),
        eigenvalues: ev.iter().map(|e| (e.re, e.im)).collect(),
        regularizer: c,
    })
}

/// Largest distance from an eigenvalue's negative and conjugate to the
/// spectrum, relative to the spectral radius.
pub fn pairing_residual(eigenvalues: &[(f64, f64)]) -> f64 {
    let ev: Vec<Complex<f64>> = eigenvalues.iter().map(|&(r, i)| Complex::new(r, i)).collect();
    let radius = ev.iter().map(|e| e.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let nearest = |z: Complex<f64>| ev.iter().map(|e| (e - z).norm()).fold(f64::INFINITY, f64::min);
    ev.iter().map(|&e| nearest(-e).max(nearest(e.conj()))).fold(0.0, f64::max) / radius
}

/// Controls the multistart search for rank-0 points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub random_starts: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { random_starts: 24, seed: 0x5eed, execution: Execution::default() }
    }
}

impl SearchOptions {
    /// Pole lattice only. The circle action fixes exactly those points in
    /// every catalog family, so nothing is lost; scans use this.
    pub fn lattice_only() -> Self {
        SearchOptions { random_starts: 0, ..Default::default() }
    }
}

fn residual(sys: &SystemInstance, x: &[f64]) -> Vec<f64> {
    let m = sys.manifold();
    let (gl, gh) = sys.gradients(x);
    let n = x.len();
    let mut r = vec![0.0; 2 * n];
    vector_field_from_gradient(m, x, &gl, &mut r[..n]);
    vector_field_from_gradient(m, x, &gh, &mut r[n..]);
    for (i, f) in m.factors().iter().enumerate() {
        if *f == FactorKind::Sphere {
            r.push(x[m.range(i)].iter().map(|c| c * c).sum::<f64>() - 1.0);
        }
    }
    r
}

/// Gauss-Newton on the vector-field residual, finite-difference Jacobian,
/// SVD steps with backtracking.
fn newton_rank0(sys: &SystemInstance, seed: &[f64]) -> Option<Vec<f64>> {
    let m = sys.manifold();
    let mut x = seed.to_vec();
    m.project(&mut x);
    let norm = |r: &[f64]| r.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut r = residual(sys, &x);
    for _ in 0..60 {
        if norm(&r) < 1e-14 {
            break;
        }
        let n = x.len();
        let h = 1e-7;
        let mut jac = DMatrix::zeros(r.len(), n);
        for j in 0..n {
            let mut a = x.clone();
            let mut b = x.clone();
            a[j] += h;
            b[j] -= h;
            let (ra, rb) = (residual(sys, &a), residual(sys, &b));
            for i in 0..r.len() {
                jac[(i, j)] = (ra[i] - rb[i]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_iterator(r.len(), r.iter().map(|c| -c));
        let step = jac.svd(true, true).solve(&rhs, 1e-12).ok()?;
        let mut lambda = 1.0;
        let current = norm(&r);
        let mut improved = false;
        for _ in 0..20 {
            let mut trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + lambda * s).collect();
            m.project(&mut trial);
            let rt = residual(sys, &trial);
            if norm(&rt) < current {
                x = trial;
                r = rt;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let (fl, fh) = field_norms(sys, &x);
    (fl < 1e-10 && fh < 1e-10).then_some(x)
}

fn random_seed(sys: &SystemInstance, rng: &mut StdRng) -> Vec<f64> {
    let mut x = Vec::new();
    for f in sys.manifold().factors() {
        match f {
            FactorKind::Sphere => {
                let z: f64 = rng.random_range(-1.0..1.0);
                let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let r = (1.0 - z * z).sqrt();
                x.extend([r * a.cos(), r * a.sin(), z]);
            }
            FactorKind::Plane => x.extend([rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)]),
        }
    }
    x
}

/// All rank-0 points reachable from the pole lattice and the random starts,
/// merged within [`MERGE_TOL`] and sorted lexicographically.
pub fn find_rank_zero_points(sys: &SystemInstance, opts: &SearchOptions) -> Vec<PhasePoint> {
    let mut seeds: Vec<Vec<f64>> = sys.pole_lattice().into_iter().map(|p| p.coords).collect();
    let mut rng = StdRng::seed_from_u64(opts.seed);
    seeds.extend((0..opts.random_starts).map(|_| random_seed(sys, &mut rng)));
    let found = map_slice(opts.execution, &seeds, |s| newton_rank0(sys, s));
    let mut points: Vec<PhasePoint> = Vec::new();
    for (seed, hit) in seeds.iter().zip(found) {
        match hit {
            Some(mut x) => {
                // Snap roundoff so lattice points print cleanly.
                x.iter_mut().for_each(|c| {
                    if c.abs() < 1e-13 {
                        *c = 0.0
                    }
                });
                let p = PhasePoint::new(x);
                if !points.iter().any(|q| q.distance(&p) < MERGE_TOL) {
                    points.push(p);
                }
            }
            None => log::debug!("rank-0 search: seed {seed:?} did not converge"),
        }
    }
    points.sort_by(|a, b| {
        a.coords.iter().zip(&b.coords).map(|(x, y)| y.total_cmp(x)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    points
}

/// The focus-focus census: every rank-0 point classified.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Census {
    pub n_ff: usize,
    pub records: Vec<SingularityRecord>,
}

impl Census {
    pub fn focus_focus(&self) -> impl Iterator<Item = &SingularityRecord> {
        self.records.iter().filter(|r| r.kind == SingularityKind::FocusFocus)
    }

    pub fn has_degenerate(&self) -> bool {
        self.records.iter().any(|r| matches!(r.kind, SingularityKind::Degenerate | SingularityKind::Hyperbolic))
    }
}

pub fn count_focus_focus(sys: &SystemInstance, opts: &SearchOptions) -> Result<Census> {
    let points = find_rank_zero_points(sys, opts);
    let records = points.iter().map(|p| classify(sys, p)).collect::<Result<Vec<_>>>()?;
    let n_ff = records.iter().filter(|r| r.kind == SingularityKind::FocusFocus).count();
    Ok(Census { n_ff, records })
}

fn lattice_count(sys: &SystemInstance) -> Result<usize> {
    Ok(count_focus_focus(sys, &SearchOptions { execution: Execution::Sequential, ..SearchOptions::lattice_only() })?.n_ff)
}

/// A detected change of the focus-focus count along a scan axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub value: f64,
    pub n_ff_before: usize,
    pub n_ff_after: usize,
}

/// Samples per grid point along a scan axis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanResult {
    pub axis: String,
    pub values: Vec<f64>,
    pub n_ff: Vec<usize>,
    pub transitions: Vec<Transition>,
}

/// Scans `make(x)` for `x` in `[from, to]` on `resolution + 1` points and
/// refines every change of the focus-focus count by bisection to `1e-8`.
pub fn transition_scan<M>(
    axis: &str,
    make: M,
    from: f64,
    to: f64,
    resolution: usize,
    mode: Execution,
) -> Result<ScanResult>
where
    M: Fn(f64) -> Result<SystemInstance> + Sync + Send,
{
    if resolution < 16 {
        return Err(Error::InvalidParameter(format!("scan resolution must be at least 16, got {resolution}")));
    }
    if from.is_nan() || to.is_nan() || to <= from {
        return Err(Error::InvalidParameter(format!("empty scan interval [{from}, {to}]")));
    }
    let values: Vec<f64> = (0..=resolution).map(|i| from + (to - from) * i as f64 / resolution as f64).collect();
    let n_ff = map_slice(mode, &values, |&x| make(x).and_then(|s| lattice_count(&s)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let flips: Vec<usize> = (0..resolution).filter(|&i| n_ff[i] != n_ff[i + 1]).collect();
    let refined = map_slice(mode, &flips, |&i| {
        let before = n_ff[i];
        let (a, b) = bisect_predicate(
            |x| make(x).and_then(|s| lattice_count(&s)).map(|n| n == before).unwrap_or(false),
            values[i],
            values[i + 1],
            1e-9,
        );
        Transition { value: 0.5 * (a + b), n_ff_before: before, n_ff_after: n_ff[i + 1] }
    });
    Ok(ScanResult { axis: axis.to_string(), values, n_ff, transitions: refined })
}

/// Focus-focus counts of the two-focus family over the `(s₁, s₂)` square.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionMap {
    pub r1: f64,
    pub r2: f64,
    /// Grid nodes along each axis, `i / (n − 1)`.
    pub axis: Vec<f64>,
    /// `counts[j][i]` at `(s₁, s₂) = (axis[i], axis[j])`.
    pub counts: Vec<Vec<u8>>,
    /// Points on the boundaries between regions, found by bisection along
    /// grid edges whose endpoints disagree.
    pub boundary: Vec<(f64, f64)>,
}

impl RegionMap {
    pub fn count_at(&self, i: usize, j: usize) -> u8 {
        self.counts[j][i]
    }

    pub fn contains(&self, n: u8) -> bool {
        self.counts.iter().any(|row| row.contains(&n))
    }

    /// CSV with header `s1,s2,n_ff`, one row per grid node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s1,s2,n_ff\n");
        for (j, row) in self.counts.iter().enumerate() {
            for (i, c) in row.iter().enumerate() {
                out.push_str(&format!("{:.6},{:.6},{}\n", self.axis[i], self.axis[j], c));
            }
        }
        out
    }
}

pub fn region_map(r1: f64, r2: f64, n: usize, mode: Execution) -> Result<RegionMap> {
    if n < 32 {
        return Err(Error::InvalidParameter(format!("region map needs a grid of at least 32x32, got {n}")));
    }
    SystemInstance::two_focus(r1, r2, 0.5, 0.5)?;
    let axis: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let count = |s1: f64, s2: f64| -> Result<u8> {
        Ok(lattice_count(&SystemInstance::two_focus(r1, r2, s1, s2)?)? as u8)
    };
    let flat = map_range(mode, n * n, |k| count(axis[k % n], axis[k / n]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let counts: Vec<Vec<u8>> = flat.chunks(n).map(|c| c.to_vec()).collect();

    // Edges (i, j) -> neighbour, horizontal then vertical.
    let mut edges = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if i + 1 < n && counts[j][i] != counts[j][i + 1] {
                edges.push(((i, j), (i + 1, j)));
            }
            if j + 1 < n && counts[j][i] != counts[j + 1][i] {
                edges.push(((i, j), (i, j + 1)));
            }
        }
    }
    let boundary = map_slice(mode, &edges, |&((i0, j0), (i1, j1))| {
        let (a, b) = ((axis[i0], axis[j0]), (axis[i1], axis[j1]));
        let start = counts[j0][i0];
        let at = |s: f64| (a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1));
        let (lo, hi) = bisect_predicate(|s| count(at(s).0, at(s).1).map(|c| c == start).unwrap_or(false), 0.0, 1.0, 1e-6);
        at(0.5 * (lo + hi))
    });
    Ok(RegionMap { r1, r2, axis, counts, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_terminate_where_plain_schur_cycles() {
        // The unbounded iteration never returned for this point.
        let sys = SystemInstance::cam(1.0, 1.5, 0.715).unwrap();
        let c = count_focus_focus(&sys, &SearchOptions::lattice_only()).unwrap();
        assert_eq!(c.n_ff, 1);
        assert!(!c.has_degenerate());
    }

    #[test]
    fn closed_form_spectrum_matches_schur() {
        let sys = SystemInstance::cam(1.0, 1.5, 0.5).unwrap();
        for p in sys.pole_lattice() {
            let (al, ah) = linearizations(&sys, &p).unwrap();
            let a = ah + al * 0.3;
            let x = hamiltonian_eigenvalues(&a);
            let y = eigenvalues(&a);
            for u in &x {
                let d = y.iter().map(|v| (u - v).norm()).fold(f64::INFINITY, f64::min);
                assert!(d < 1e-9, "{x:?} vs {y:?}");
            }
        }
    }
    use crate::catalog::cam_transition_times;

    fn pole(z1: f64, z2: f64) -> PhasePoint {
        PhasePoint::new(vec![0.0, 0.0, z1, 0.0, 0.0, z2])
    }

    #[test]
    fn cso_census() {
        let sys = SystemInstance::cso(1.0, 1.0).unwrap();
        let census = count_focus_focus(&sys, &SearchOptions::default()).unwrap();
        assert_eq!(census.n_ff, 1);
        assert_eq!(census.records.len(), 2);
        let ff = census.focus_focus().next().unwrap();
        assert!(ff.point.distance(&PhasePoint::new(vec![0.0, 0.0, 1.0, 0.0, 0.0])) < 1e-12);
        let ee = census.records.iter().find(|r| r.kind == SingularityKind::EllipticElliptic).unwrap();
        assert!(ee.point.distance(&PhasePoint::new(vec![0.0, 0.0, -1.0, 0.0, 0.0])) < 1e-12);
    }

    #[test]
    fn cam_pole_types_follow_transition_times() {
        let tt = cam_transition_times(1.0, 1.5).unwrap();
        for t in [0.1, 0.2, 0.3, 0.5, 0.9, 0.99] {
            let sys = SystemInstance::cam(1.0, 1.5, t).unwrap();
            let rec = classify(&sys, &pole(1.0, -1.0)).unwrap();
            let expect = if t > tt.t_minus && t < tt.t_plus {
                SingularityKind::FocusFocus
            } else {
                SingularityKind::EllipticElliptic
            };
            assert_eq!(rec.kind, expect, "t = {t}");
            for (z1, z2) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                assert_eq!(classify(&sys, &pole(z1, z2)).unwrap().kind, SingularityKind::EllipticElliptic);
            }
        }
    }

    #[test]
    fn degenerate_exactly_at_transition() {
        let tt = cam_transition_times(1.0, 1.5).unwrap();
        for t in [tt.t_minus, tt.t_plus] {
            let sys = SystemInstance::cam(1.0, 1.5, t).unwrap();
            assert_eq!(classify(&sys, &pole(1.0, -1.0)).unwrap().kind, SingularityKind::Degenerate);
        }
        let inside = SystemInstance::cam(1.0, 1.5, tt.t_minus + 1e-6).unwrap();
        assert_eq!(classify(&inside, &pole(1.0, -1.0)).unwrap().kind, SingularityKind::FocusFocus);
        let outside = SystemInstance::cam(1.0, 1.5, tt.t_minus - 1e-6).unwrap();
        assert_eq!(classify(&outside, &pole(1.0, -1.0)).unwrap().kind, SingularityKind::EllipticElliptic);
    }

    #[test]
    fn classify_rejects_regular_points() {
        let sys = SystemInstance::cam(1.0, 1.5, 0.5).unwrap();
        let p = PhasePoint::new(vec![0.6, 0.0, 0.8, 0.0, 0.0, -1.0]);
        assert!(matches!(classify(&sys, &p), Err(Error::Precondition(_))));
    }

    #[test]
    fn spectrum_is_hamiltonian_and_regularizer_independent() {
        let sys = SystemInstance::cam(1.0, 2.0, 0.5).unwrap();
        let cs: Vec<f64> = (0..10).map(|k| -2.3 + 0.517 * k as f64).collect();
        for p in sys.pole_lattice() {
            let base = classify(&sys, &p).unwrap();
            assert!(pairing_residual(&base.eigenvalues) < 1e-9);
            for &c in &cs {
                let r = classify_with(&sys, &p, &[c]).unwrap();
                assert_eq!(r.kind, base.kind);
            }
        }
    }

    #[test]
    fn two_focus_decoupled_corner() {
        let sys = SystemInstance::two_focus(1.0, 2.0, 0.0, 0.0).unwrap();
        let census = count_focus_focus(&sys, &SearchOptions::default()).unwrap();
        assert_eq!(census.records.len(), 4);
        assert_eq!(census.n_ff, 0);
    }

    #[test]
    fn scan_finds_cam_transitions() {
        let res = transition_scan("t", |t| SystemInstance::cam(1.0, 1.5, t), 0.0, 1.0, 40, Execution::Parallel).unwrap();
        let tt = cam_transition_times(1.0, 1.5).unwrap();
        assert_eq!(res.transitions.len(), 2);
        assert!((res.transitions[0].value - tt.t_minus).abs() < 1e-6);
        assert!((res.transitions[1].value - tt.t_plus).abs() < 1e-6);
        assert!(transition_scan("t", |t| SystemInstance::cam(1.0, 1.5, t), 0.0, 1.0, 8, Execution::Sequential).is_err());
    }
}
