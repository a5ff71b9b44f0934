//! Birkhoff normal form at a focus-focus point and the Eliasson
//! correspondence `j = ϱ₂(l, h)`.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::SystemInstance;
use crate::error::{Error, Result};
use crate::phasespace::{IntegrableSystem, PhasePoint};
use crate::series::{Coeff, TruncatedSeries};
use crate::singularities::{chart_expansion, classify_linearization, omega, SingularityKind, REGULARIZERS};

/// Default truncation degree.
pub const DEFAULT_DEGREE: usize = 6;
/// Homological divisors below this abort the reduction.
pub const SMALL_DIVISOR: f64 = 1e-12;

type Series = TruncatedSeries<f64>;
type CSeries = TruncatedSeries<Complex64>;

/// `J₁ = q₁p₂ − q₂p₁` in four canonical variables.
pub fn j1(degree: usize) -> Series {
    let v = |i| Series::variable(4, degree, i);
    v(0) * v(3) - v(1) * v(2)
}

/// `J₂ = q₁p₁ + q₂p₂` in four canonical variables.
pub fn j2(degree: usize) -> Series {
    let v = |i| Series::variable(4, degree, i);
    v(0) * v(2) + v(1) * v(3)
}

/// Expansions of `L` and `H` in the Darboux chart at a rank-0 point, with
/// constant terms removed.
pub fn taylor_expand_at_point(sys: &SystemInstance, p: &PhasePoint, degree: usize) -> Result<(Series, Series)> {
    if degree < 2 {
        return Err(Error::InvalidParameter(format!("expansion degree must be at least 2, got {degree}")));
    }
    if sys.manifold().factors().len() != 2 {
        return Err(Error::InvalidParameter("normal forms need two degrees of freedom".into()));
    }
    let (_, mut l, mut h) = chart_expansion(sys, p, degree)?;
    let linear = l.homogeneous(1).max_abs().max(h.homogeneous(1).max_abs());
    if linear > 1e-10 {
        return Err(Error::Precondition(format!("point is not rank-0: linear terms of size {linear:e}")));
    }
    l.set(&[0; 4], 0.0);
    h.set(&[0; 4], 0.0);
    Ok((l.degree_slice(2, degree), h.degree_slice(2, degree)))
}

/// Symplectic linear frame in which `L₂ = J₁` and `H₂ = αJ₁ + βJ₂`.
#[derive(Clone, Debug)]
pub struct FocusFocusFrame {
    /// Columns are the images of `(q₁, q₂, p₁, p₂)`.
    pub matrix: Matrix4<f64>,
    pub alpha: f64,
    pub beta: f64,
    /// `‖MᵀΩM − Ω‖`, entrywise maximum.
    pub symplectic_residual: f64,
    /// Largest coefficient of `L₂∘M − J₁` and `H₂∘M − αJ₁ − βJ₂`.
    pub span_residual: f64,
}

fn quadratic_matrix(s: &Series) -> Matrix4<f64> {
    let h = s.hessian();
    Matrix4::from_fn(|i, j| h[i][j])
}

/// Two-dimensional null space of `p`, from its two smallest singular values.
fn null_space_2(p: &Matrix4<f64>) -> nalgebra::Matrix4x2<f64> {
    let svd = p.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    nalgebra::Matrix4x2::from_columns(&[
        v_t.row(order[0]).transpose(),
        v_t.row(order[1]).transpose(),
    ])
}

/// Pulls a series back along the linear map `x = M y`.
pub fn linear_pullback(s: &Series, m: &Matrix4<f64>) -> Series {
    let n = s.max_degree();
    let subs: Vec<Series> = (0..4)
        .map(|v| {
            let mut e = Series::zero(4, n);
            for k in 0..4 {
                let mut ex = [0u8; 4];
                ex[k] = 1;
                e.set(&ex, m[(v, k)]);
            }
            e
        })
        .collect();
    s.compose(&subs)
}

pub fn linear_focus_focus_normalize(l2: &Series, h2: &Series) -> Result<FocusFocusFrame> {
    let j = omega();
    let al = j * quadratic_matrix(l2);
    let ah = j * quadratic_matrix(h2);
    let (kind, _, _) = classify_linearization(&al, &ah, &REGULARIZERS[..3]);
    if kind != SingularityKind::FocusFocus {
        return Err(Error::SingularityType(format!("expected focus-focus, found {}", kind.label())));
    }
    let rot = (al * al + Matrix4::identity()).abs().max();
    if rot > 1e-8 {
        return Err(Error::Precondition(format!("L₂ does not generate a 2π-periodic rotation (residual {rot:e})")));
    }
    let ev = ah.complex_eigenvalues();
    let a = ev.iter().map(|e| e.re.abs()).sum::<f64>() / 4.0;
    let b = ev.iter().map(|e| e.im.abs()).sum::<f64>() / 4.0;
    let id = Matrix4::<f64>::identity();
    let quad = |s: f64| ah * ah - ah * (2.0 * s * a) + id * (a * a + b * b);
    let e_plus = null_space_2(&quad(1.0));
    let e_minus = null_space_2(&quad(-1.0));

    // Project standard basis vectors onto E⁺ along E⁻; keep the largest.
    let basis = Matrix4::from_columns(&[e_plus.column(0), e_plus.column(1), e_minus.column(0), e_minus.column(1)]);
    let inv = basis
        .try_inverse()
        .ok_or(Error::Degeneracy { degree: 2, divisor: 0.0 })?;
    let mut best = Vector4::zeros();
    for k in 0..4 {
        let c = inv.column(k);
        let proj = e_plus.column(0) * c[0] + e_plus.column(1) * c[1];
        if proj.norm() > best.norm() + 1e-12 {
            best = proj;
        }
    }
    let e1 = best;
    let e2 = al * e1;
    let e = nalgebra::Matrix4x2::from_columns(&[e1, e2]);
    let pairing: Matrix2<f64> = e.transpose() * j * e_minus;
    let pinv = pairing
        .try_inverse()
        .ok_or_else(|| Error::Degeneracy { degree: 2, divisor: pairing.determinant().abs() })?;
    let f = e_minus * pinv;
    let m = Matrix4::from_columns(&[e1, e2, f.column(0).into_owned(), f.column(1).into_owned()]);

    let symplectic_residual = (m.transpose() * j * m - j).abs().max();
    let l_new = linear_pullback(&l2.degree_slice(2, 2), &m);
    let h_new = linear_pullback(&h2.degree_slice(2, 2), &m);
    let deg = l_new.max_degree();
    let alpha = h_new.coeff(&[1, 0, 0, 1]);
    let beta = h_new.coeff(&[1, 0, 1, 0]);
    let span_residual = l_new
        .max_abs_diff(&j1(deg))
        .max(h_new.max_abs_diff(&(j1(deg) * alpha + j2(deg) * beta)));
    Ok(FocusFocusFrame { matrix: m, alpha, beta, symplectic_residual, span_residual })
}

/// `exp(ad_W) f = Σ_k (ad_W)^k f / k!` with `ad_W f = scale · {f, W}`.
pub fn lie_transform<T: Coeff>(f: &TruncatedSeries<T>, w: &TruncatedSeries<T>, scale: T) -> TruncatedSeries<T> {
    let mut acc = f.clone();
    let mut term = f.clone();
    for k in 1..=f.max_degree() + 1 {
        term = term.poisson(w).scale(scale * T::from_real(1.0 / k as f64));
        if term.max_abs() == 0.0 {
            break;
        }
        acc = acc + term.clone();
    }
    acc
}

/// Real `(q₁, q₂, p₁, p₂)` in terms of the complex variables
/// `(z, z̄, w̄, w)` with `z = q₁ + iq₂`, `w = p₁ + ip₂`.
fn complexify(s: &Series) -> CSeries {
    let n = s.max_degree();
    let v = |i| CSeries::variable(4, n, i);
    let half = Complex64::new(0.5, 0.0);
    let minus_half_i = Complex64::new(0.0, -0.5);
    let subs = [
        (v(0) + v(1)).scale(half),
        (v(0) - v(1)).scale(minus_half_i),
        (v(3) + v(2)).scale(half),
        (v(3) - v(2)).scale(minus_half_i),
    ];
    s.compose(&subs)
}

/// `{m, αJ₁ + βJ₂} = λ m` for the monomial `z^e₀ z̄^e₁ w̄^e₂ w^e₃`.
fn eigen_divisor(e: &[u8], alpha: f64, beta: f64) -> Complex64 {
    let [a, b, c, d] = [e[0], e[1], e[2], e[3]].map(|x| x as f64);
    Complex64::new(beta * (a + b - c - d), alpha * (a - b - c + d))
}

fn in_kernel(e: &[u8]) -> bool {
    e[0] == e[2] && e[1] == e[3]
}

fn commutes_with_j1(e: &[u8]) -> bool {
    e[0] + e[3] == e[1] + e[2]
}

/// Bracket of the complex variables is twice the canonical one.
const CBRACKET: Complex64 = Complex64::new(2.0, 0.0);

/// One exponent/coefficient pair of a serialized series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponent: Vec<u8>,
    pub coeff: f64,
}

fn terms_of(s: &Series) -> Vec<Term> {
    s.terms().filter(|(_, c)| *c != 0.0).map(|(e, c)| Term { exponent: e.to_vec(), coeff: c }).collect()
}

fn series_of(nvars: usize, degree: usize, terms: &[Term]) -> Series {
    let mut s = Series::zero(nvars, degree);
    for t in terms {
        s.set(&t.exponent, t.coeff);
    }
    s
}

/// Normal form `h(l, j)` and its inverse `j = ϱ₂(l, h)` at a focus-focus
/// point, both series in two variables.
#[derive(Clone, Debug)]
pub struct EliassonMap {
    pub base: Option<PhasePoint>,
    /// Truncation degree in the phase variables.
    pub degree: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `h(l, j)`, degree `N/2` in `(l, j)`.
    pub h: Series,
    /// `ϱ₂(l, h)`, degree `N/2` in `(l, h)`.
    pub rho2: Series,
    /// Largest off-normal coefficient left in the transformed `H`.
    pub off_normal: f64,
    /// Largest imaginary coefficient discarded when returning to real `h`.
    pub imaginary_residual: f64,
    /// Largest coefficient of `h(l, ϱ₂(l, h)) − h`.
    pub round_trip: f64,
    /// Largest coefficient of `{H∘Φ, J₁}` for the transformed `H`.
    pub j1_bracket: f64,
}

#[derive(Serialize, Deserialize)]
struct EliassonDocument {
    degree: usize,
    alpha: f64,
    beta: f64,
    base: Option<PhasePoint>,
    h: Vec<Term>,
    rho2: Vec<Term>,
    off_normal: f64,
    imaginary_residual: f64,
    round_trip: f64,
    j1_bracket: f64,
}

impl EliassonMap {
    /// `h(l, j)`.
    pub fn energy(&self, l: f64, j: f64) -> f64 {
        self.h.eval(&[l, j])
    }

    /// `ϱ₂(l, h)`.
    pub fn eliasson_j(&self, l: f64, h: f64) -> f64 {
        self.rho2.eval(&[l, h])
    }

    /// `∂_h ϱ₂(0, 0)`, positive by construction.
    pub fn orientation(&self) -> f64 {
        self.rho2.coeff(&[0, 1])
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        Ok(serde_json::to_value(EliassonDocument {
            degree: self.degree,
            alpha: self.alpha,
            beta: self.beta,
            base: self.base.clone(),
            h: terms_of(&self.h),
            rho2: terms_of(&self.rho2),
            off_normal: self.off_normal,
            imaginary_residual: self.imaginary_residual,
            round_trip: self.round_trip,
            j1_bracket: self.j1_bracket,
        })?)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let d: EliassonDocument = serde_json::from_value(v.clone())?;
        let k = d.degree / 2;
        Ok(EliassonMap {
            base: d.base,
            degree: d.degree,
            alpha: d.alpha,
            beta: d.beta,
            h: series_of(2, k, &d.h),
            rho2: series_of(2, k, &d.rho2),
            off_normal: d.off_normal,
            imaginary_residual: d.imaginary_residual,
            round_trip: d.round_trip,
            j1_bracket: d.j1_bracket,
        })
    }
}

/// Result of the degree-by-degree reduction in complex variables.
struct Reduced {
    h: CSeries,
    off_normal: f64,
    j1_bracket: f64,
}

fn reduce_complex(h: &CSeries, alpha: f64, beta: f64) -> Result<Reduced> {
    let n = h.max_degree();
    let mut h = h.clone();
    for d in 3..=n {
        let mut w = h.zero_like();
        let mut any = false;
        for (e, c) in h.homogeneous(d).terms() {
            if c == Complex64::new(0.0, 0.0) || in_kernel(e) {
                continue;
            }
            let lambda = eigen_divisor(e, alpha, beta);
            if lambda.norm() < SMALL_DIVISOR {
                return Err(Error::Degeneracy { degree: d, divisor: lambda.norm() });
            }
            w.set(e, c / lambda);
            any = true;
        }
        if any {
            h = lie_transform(&h, &w, CBRACKET);
        }
    }
    let off_normal = h
        .terms()
        .filter(|(e, _)| !in_kernel(e))
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    // J₁ = (z̄w − zw̄) / 2i.
    let v = |i| CSeries::variable(4, n, i);
    let j1c = (v(1) * v(3) - v(0) * v(2)).scale(Complex64::new(0.0, -0.5));
    let j1_bracket = h.poisson(&j1c).scale(CBRACKET).max_abs();
    Ok(Reduced { h, off_normal, j1_bracket })
}

/// Reduces `H` to a function of `(J₁, J₂)` through degree `N` and returns
/// the Eliasson map. `L` must already be `J₁` in the frame.
pub fn birkhoff_reduce(l: &Series, h: &Series, frame: &FocusFocusFrame, degree: usize) -> Result<EliassonMap> {
    if degree < 2 || degree > h.max_degree() {
        return Err(Error::InvalidParameter(format!(
            "reduction degree {degree} must lie in 2..={}",
            h.max_degree()
        )));
    }
    let l = linear_pullback(&l.retruncate(degree), &frame.matrix);
    let h = linear_pullback(&h.retruncate(degree), &frame.matrix);
    let l_err = l.max_abs_diff(&j1(degree));
    if l_err > 1e-9 {
        return Err(Error::Precondition(format!("L is not J₁ in the frame (residual {l_err:e})")));
    }
    let (alpha, beta) = (frame.alpha, frame.beta);

    // Terms not commuting with J₁ are roundoff ({H, L} = 0); drop them so the
    // homological equation never meets a resonant J₁-charge.
    let mut hc = complexify(&h);
    let mut dropped = 0.0f64;
    let exps: Vec<Vec<u8>> = hc.terms().map(|(e, _)| e.to_vec()).collect();
    for e in exps {
        if !commutes_with_j1(&e) {
            dropped = dropped.max(hc.coeff(&e).norm());
            hc.set(&e, Complex64::new(0.0, 0.0));
        }
    }
    if dropped > 1e-8 {
        return Err(Error::Inconsistent(format!("H does not commute with L at the point (residual {dropped:e})")));
    }
    let reduced = reduce_complex(&hc, alpha, beta)?;

    // z w̄ = J₂ − iJ₁ and z̄ w = J₂ + iJ₁.
    let k = degree / 2;
    let lv = CSeries::variable(2, k, 0);
    let jv = CSeries::variable(2, k, 1);
    let i = Complex64::new(0.0, 1.0);
    let u = jv.clone() - lv.clone().scale(i);
    let v = jv + lv.scale(i);
    let mut hlj = CSeries::zero(2, k);
    for (e, c) in reduced.h.terms() {
        if !in_kernel(e) || c == Complex64::new(0.0, 0.0) || e[0] + e[1] < 2 {
            continue;
        }
        hlj = hlj + (u.powi(e[0] as usize) * v.powi(e[1] as usize)).scale(c);
    }
    let (mut hr, imag) = hlj.real_part();
    let scale = hr.max_abs().max(1.0);
    if imag > 1e-10 * scale {
        return Err(Error::Accuracy(format!("normal form is not real (imaginary part {imag:e})")));
    }
    if k >= 1 {
        hr.set(&[1, 0], alpha);
        hr.set(&[0, 1], beta);
    }
    let rho2 = invert_in_j(&hr, alpha, beta);
    let back = hr.compose(&[Series::variable(2, k, 0), rho2.clone()]);
    let round_trip = back.max_abs_diff(&Series::variable(2, k, 1));
    Ok(EliassonMap {
        base: None,
        degree,
        alpha,
        beta,
        h: hr,
        rho2,
        off_normal: reduced.off_normal,
        imaginary_residual: imag,
        round_trip,
        j1_bracket: reduced.j1_bracket,
    })
}

/// Fixed-point inversion of `h = αl + βj + R(l, j)` for `j`.
fn invert_in_j(h: &Series, alpha: f64, beta: f64) -> Series {
    let k = h.max_degree();
    let l = Series::variable(2, k, 0);
    let hv = Series::variable(2, k, 1);
    let rest = h.degree_slice(2, k);
    let linear = (hv - l.clone() * alpha) * (1.0 / beta);
    let mut j = linear.clone();
    for _ in 0..k {
        j = linear.clone() - rest.compose(&[l.clone(), j.clone()]) * (1.0 / beta);
    }
    j
}

/// Expansion, linear frame and reduction in one step at a focus-focus
/// point of a catalog system.
pub fn eliasson_map_at(sys: &SystemInstance, p: &PhasePoint, degree: usize) -> Result<EliassonMap> {
    let (l, h) = taylor_expand_at_point(sys, p, degree)?;
    let frame = linear_focus_focus_normalize(&l.degree_slice(2, 2), &h.degree_slice(2, 2))?;
    let mut map = birkhoff_reduce(&l, &h, &frame, degree)?;
    map.base = Some(p.clone());
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::cam_transition_times;
    use proptest::prelude::*;

    fn cso_ff() -> (SystemInstance, PhasePoint) {
        (SystemInstance::cso(1.0, 1.0).unwrap(), PhasePoint::new(vec![0.0, 0.0, 1.0, 0.0, 0.0]))
    }

    fn cam_ff(r1: f64, r2: f64, t: f64) -> (SystemInstance, PhasePoint) {
        (SystemInstance::cam(r1, r2, t).unwrap(), PhasePoint::new(vec![0.0, 0.0, 1.0, 0.0, 0.0, -1.0]))
    }

    #[test]
    fn identity_frame() {
        let f = linear_focus_focus_normalize(&j1(2), &j2(2)).unwrap();
        assert!((f.matrix - Matrix4::identity()).abs().max() < 1e-12);
        assert!(f.alpha.abs() < 1e-12 && (f.beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recovers_alpha_beta() {
        let f = linear_focus_focus_normalize(&j1(2), &(j1(2) + j2(2) * 2.0)).unwrap();
        assert!((f.alpha - 1.0).abs() < 1e-12 && (f.beta - 2.0).abs() < 1e-12);
        assert!(f.symplectic_residual < 1e-12 && f.span_residual < 1e-12);
    }

    #[test]
    fn cso_frame_certificate() {
        let (sys, p) = cso_ff();
        let (l, h) = taylor_expand_at_point(&sys, &p, 2).unwrap();
        let f = linear_focus_focus_normalize(&l, &h).unwrap();
        assert!(f.symplectic_residual < 1e-10);
        assert!(f.span_residual < 1e-9);
        assert!(f.beta > 0.1);
    }

    #[test]
    fn elliptic_point_is_rejected() {
        let sys = SystemInstance::cso(1.0, 1.0).unwrap();
        let p = PhasePoint::new(vec![0.0, 0.0, -1.0, 0.0, 0.0]);
        let (l, h) = taylor_expand_at_point(&sys, &p, 2).unwrap();
        assert!(matches!(linear_focus_focus_normalize(&l, &h), Err(Error::SingularityType(_))));
    }

    #[test]
    fn cam_momentum_is_quadratic_in_chart() {
        let (sys, p) = cam_ff(1.0, 2.0, 0.5);
        let (l, _) = taylor_expand_at_point(&sys, &p, 6).unwrap();
        assert!(l.degree_slice(3, 6).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_regular_point() {
        let sys = SystemInstance::cam(1.0, 2.0, 0.5).unwrap();
        let p = PhasePoint::new(vec![0.6, 0.0, 0.8, 0.0, 0.0, -1.0]);
        assert!(matches!(taylor_expand_at_point(&sys, &p, 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn normal_form_input_is_a_fixed_point() {
        let n = 6;
        let (a, b) = (j1(n), j2(n));
        let h = a.clone() * 0.3 + b.clone() * 1.5 + a.clone() * b.clone() * 0.2 - b.clone() * b.clone() * 0.7
            + b.clone() * b.clone() * b.clone() * 0.05;
        let frame = linear_focus_focus_normalize(&a.degree_slice(2, 2), &h.degree_slice(2, 2)).unwrap();
        let map = birkhoff_reduce(&a, &h, &frame, n).unwrap();
        let expect = [([1, 0], 0.3), ([0, 1], 1.5), ([1, 1], 0.2), ([0, 2], -0.7), ([0, 3], 0.05), ([2, 0], 0.0)];
        for (e, c) in expect {
            assert!((map.h.coeff(&e) - c).abs() < 1e-12, "{e:?}");
        }
        assert!(map.off_normal < 1e-14);
    }

    #[test]
    fn cso_reduction_residuals() {
        let (sys, p) = cso_ff();
        let map = eliasson_map_at(&sys, &p, 6).unwrap();
        assert!(map.off_normal < 1e-9, "off-normal {}", map.off_normal);
        assert!(map.round_trip < 1e-9);
        assert!(map.imaginary_residual < 1e-10);
        assert!(map.orientation() > 0.0);
        assert!(map.j1_bracket < 1e-9);
    }

    #[test]
    fn cam_reduction_residuals() {
        let (sys, p) = cam_ff(1.0, 2.0, 0.5);
        let map = eliasson_map_at(&sys, &p, 8).unwrap();
        assert!(map.off_normal < 1e-9 && map.round_trip < 1e-9);
        let back = EliassonMap::from_json(&map.to_json().unwrap()).unwrap();
        assert_eq!(back.h.coeffs(), map.h.coeffs());
    }

    #[test]
    fn regularizer_does_not_change_rho2() {
        // Feeding H + cL shifts α by c and leaves ϱ₂(l, h + cl) unchanged.
        let (sys, p) = cam_ff(1.0, 1.5, 0.5);
        let (l, h) = taylor_expand_at_point(&sys, &p, 6).unwrap();
        let run = |c: f64| {
            let hc = h.clone() + l.clone() * c;
            let frame = linear_focus_focus_normalize(&l.degree_slice(2, 2), &hc.degree_slice(2, 2)).unwrap();
            birkhoff_reduce(&l, &hc, &frame, 6).unwrap()
        };
        let (m0, m1) = (run(0.0), run(0.77));
        assert!((m1.alpha - m0.alpha - 0.77).abs() < 1e-10);
        for (lv, hv) in [(0.01, 0.02), (-0.03, 0.01), (0.02, -0.04)] {
            assert!((m0.eliasson_j(lv, hv) - m1.eliasson_j(lv, hv + 0.77 * lv)).abs() < 1e-8);
        }
    }

    #[test]
    fn reduction_fails_outside_focus_focus_range() {
        let tt = cam_transition_times(1.0, 1.5).unwrap();
        let (sys, p) = cam_ff(1.0, 1.5, 0.5 * tt.t_minus);
        assert!(matches!(eliasson_map_at(&sys, &p, 4), Err(Error::SingularityType(_))));
    }

    fn cubic(coeffs: &[f64]) -> Series {
        let mut s = Series::zero(4, 7);
        for (i, idx) in s.basis().degree_range(3).enumerate() {
            let e = s.basis().exponent(idx).to_vec();
            s.set(&e, coeffs[i % coeffs.len()]);
        }
        s
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn lie_transform_preserves_brackets(
            f in prop::collection::vec(-1.0f64..1.0, 20),
            g in prop::collection::vec(-1.0f64..1.0, 20),
            w in prop::collection::vec(-0.5f64..0.5, 20),
        ) {
            let (f, g, w) = (cubic(&f), cubic(&g), cubic(&w));
            let lhs = lie_transform(&f, &w, 1.0).poisson(&lie_transform(&g, &w, 1.0));
            let rhs = lie_transform(&f.poisson(&g), &w, 1.0);
            // Brackets lower the degree by two, so compare below the cut.
            let top = lhs.max_degree() - 2;
            prop_assert!(lhs.degree_slice(0, top).max_abs_diff(&rhs.degree_slice(0, top)) < 1e-9);
        }
    }
}
