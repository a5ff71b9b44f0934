//! Taylor series invariant: the regular part of the second action near a
//! focus-focus value, fitted on an annulus in `z = l + ij`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::invariants::polygon::Cartography;
use crate::normalform::EliassonMap;
use crate::numeric::least_squares;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorOptions {
    /// Inner and outer radius of the sampling annulus in `|z|`.
    pub inner: f64,
    pub outer: f64,
    pub radial: usize,
    pub angular: usize,
    /// Total degree of the polynomial fitted to the regular part. The
    /// reported coefficients stop at degree 2; the extra terms absorb
    /// curvature that would otherwise leak into them.
    pub fit_degree: usize,
    /// Fits with an RMS residual above this fail.
    pub max_residual: f64,
}

impl Default for TaylorOptions {
    fn default() -> Self {
        TaylorOptions { inner: 0.02, outer: 0.2, radial: 24, angular: 24, fit_degree: 3, max_residual: 1e-5 }
    }
}

/// How the logarithm branch was taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    /// Direction of the cut: `+1` up, `-1` down.
    pub sign: i8,
    /// Interval the argument of `z` was taken in.
    pub arg_interval: (f64, f64),
    /// Multiple of `2π` removed from the raw `l` coefficient.
    pub turns: i32,
    /// Set when the raw coefficient sat within [`WRAP_TOL`] turns of a
    /// multiple of `2π` and `s₁₀` was snapped to 0.
    pub snapped: bool,
}

/// Distance in turns below which `s₁₀` is taken to be exactly 0.
pub const WRAP_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorInvariant {
    pub s10: f64,
    pub s01: f64,
    pub s20: f64,
    pub s11: f64,
    pub s02: f64,
    /// `l` coefficient before reduction into `[0, 2π)`.
    pub raw_s10: f64,
    pub branch: Branch,
    /// Fitted constant minus `2π μ₂` at the focus-focus value; zero when
    /// the series has no constant term.
    pub constant_offset: f64,
    pub rms_residual: f64,
    pub max_residual: f64,
    pub samples: usize,
    /// Annulus `(inner, outer)` the accepted fit was sampled on.
    pub annulus: (f64, f64),
    /// Every fitted coefficient as `((p, q), c)` for `l^p j^q`, constant
    /// and unreduced `l` term included.
    #[serde(skip)]
    pub fit: Vec<((usize, usize), f64)>,
}

impl TaylorInvariant {
    /// `∂_l` of the fitted polynomial at `(l, j)`, before reducing `s₁₀`.
    pub fn fit_dl(&self, l: f64, j: f64) -> f64 {
        self.fit
            .iter()
            .filter(|((p, _), _)| *p > 0)
            .map(|&((p, q), c)| c * p as f64 * l.powi(p as i32 - 1) * j.powi(q as i32))
            .sum()
    }
}

/// `arg z` with the cut along the ray `ε · i · ℝ₊`: values in
/// `(π/2, 5π/2)` for `ε = +1` and `(−π/2, 3π/2)` for `ε = −1`.
pub fn arg_branch(l: f64, j: f64, sign: i8) -> f64 {
    let a = j.atan2(l);
    if sign > 0 {
        if a <= PI / 2.0 {
            a + TAU
        } else {
            a
        }
    } else if a <= -PI / 2.0 {
        a + TAU
    } else {
        a
    }
}

fn arg_interval(sign: i8) -> (f64, f64) {
    if sign > 0 {
        (PI / 2.0, 5.0 * PI / 2.0)
    } else {
        (-PI / 2.0, 3.0 * PI / 2.0)
    }
}

/// `Im(z log z − z)` on the chosen branch.
pub fn singular_part(l: f64, j: f64, sign: i8) -> f64 {
    let r = l.hypot(j);
    l * arg_branch(l, j, sign) + j * r.ln() - j
}

fn exponents(degree: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for d in 0..=degree {
        for a in (0..=d).rev() {
            out.push((a, d - a));
        }
    }
    out
}

/// Times the annulus is halved when a fit misses `max_residual`.
pub const MAX_SHRINK: usize = 3;

/// Fits `2πμ₂ + Im(z log z − z) = C + S(l, j)` around cut `cut` of the
/// cartographic map. Near a degeneracy the normal form is good on a smaller
/// disc, so a fit that misses the threshold is retried on the annulus scaled
/// by 1/2, at most [`MAX_SHRINK`] times.
pub fn taylor_invariant(
    cart: &Cartography,
    cut: usize,
    map: &EliassonMap,
    opts: &TaylorOptions,
    mode: Execution,
) -> Result<TaylorInvariant> {
    let mut o = *opts;
    let mut attempt = 0;
    loop {
        match fit_on_annulus(cart, cut, map, &o, mode) {
            Err(Error::Accuracy(m)) if attempt < MAX_SHRINK => {
                log::debug!("{m}; halving the annulus");
                o.inner /= 2.0;
                o.outer /= 2.0;
                attempt += 1;
            }
            r => return r,
        }
    }
}

fn fit_on_annulus(
    cart: &Cartography,
    cut: usize,
    map: &EliassonMap,
    opts: &TaylorOptions,
    mode: Execution,
) -> Result<TaylorInvariant> {
    let c = *cart
        .cuts
        .get(cut)
        .ok_or_else(|| Error::InvalidParameter(format!("no cut with index {cut}")))?;
    if !(opts.inner > 0.0 && opts.outer > opts.inner) || opts.radial < 2 || opts.angular < 4 || opts.fit_degree < 2 {
        return Err(Error::InvalidParameter(format!("bad Taylor fit options {opts:?}")));
    }
    let mut grid = Vec::with_capacity(opts.radial * opts.angular);
    for i in 0..opts.radial {
        let r = opts.inner + (opts.outer - opts.inner) * i as f64 / (opts.radial - 1) as f64;
        for k in 0..opts.angular {
            // Half-step offset keeps samples off the cut directions.
            let th = TAU * (k as f64 + 0.5) / opts.angular as f64;
            grid.push((r * th.cos(), r * th.sin()));
        }
    }
    let values = map_slice(mode, &grid, |&(l, j)| {
        let h = map.energy(l, j);
        cart.mu2(c.lambda + l, c.eta + h).map(|mu| TAU * mu + singular_part(l, j, c.sign))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let exps = exponents(opts.fit_degree);
    let a = DMatrix::from_fn(grid.len(), exps.len(), |row, col| {
        let (l, j) = grid[row];
        let (p, q) = exps[col];
        l.powi(p as i32) * j.powi(q as i32)
    });
    let b = DVector::from_vec(values);
    let (x, rms) = least_squares(&a, &b).ok_or_else(|| Error::Accuracy("singular Taylor fit".into()))?;
    let max_residual = (&a * &x - &b).amax();
    let coeff = |p: usize, q: usize| x[exps.iter().position(|&e| e == (p, q)).expect("fitted")];
    if rms > opts.max_residual {
        return Err(Error::Accuracy(format!(
            "Taylor fit residual {rms:e} exceeds {:e} (max {max_residual:e}); try a higher normal-form degree or a smaller annulus",
            opts.max_residual
        )));
    }
    let raw = coeff(1, 0);
    let nearest = (raw / TAU).round();
    let snapped = (raw / TAU - nearest).abs() < WRAP_TOL;
    let turns = if snapped { nearest } else { (raw / TAU).floor() };
    let mu_ff = cart.mu2(c.lambda, c.eta)?;
    Ok(TaylorInvariant {
        s10: if snapped { 0.0 } else { raw - TAU * turns },
        s01: coeff(0, 1),
        s20: coeff(2, 0),
        s11: coeff(1, 1),
        s02: coeff(0, 2),
        raw_s10: raw,
        branch: Branch { sign: c.sign, arg_interval: arg_interval(c.sign), turns: turns as i32, snapped },
        constant_offset: coeff(0, 0) - TAU * mu_ff,
        rms_residual: rms,
        max_residual,
        samples: grid.len(),
        annulus: (opts.inner, opts.outer),
        fit: exps.iter().copied().zip(x.iter().copied()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_differ_by_a_turn_on_the_right() {
        for (l, j) in [(0.3, 0.1), (0.2, -0.4), (1.0, 0.0)] {
            assert!((arg_branch(l, j, 1) - arg_branch(l, j, -1) - TAU).abs() < 1e-15);
        }
        for (l, j) in [(-0.3, 0.1), (-0.2, -0.4)] {
            assert_eq!(arg_branch(l, j, 1), arg_branch(l, j, -1));
        }
        assert!(arg_branch(0.0, -1.0, 1) > PI && arg_branch(0.0, 1.0, -1) < PI);
    }

    #[test]
    fn singular_part_is_continuous_off_the_cut() {
        // Crossing the negative real axis with the upward cut.
        let a = singular_part(-0.5, 1e-12, 1);
        let b = singular_part(-0.5, -1e-12, 1);
        assert!((a - b).abs() < 1e-9);
    }

    fn cam_fit(opts: &TaylorOptions) -> Result<TaylorInvariant> {
        use crate::catalog::SystemInstance;
        use crate::normalform::{eliasson_map_at, DEFAULT_DEGREE};
        use crate::singularities::{count_focus_focus, SearchOptions};
        let sys = SystemInstance::cam(1.0, 1.5, 0.5).unwrap();
        let c = count_focus_focus(&sys, &SearchOptions::lattice_only()).unwrap();
        let ff = c.focus_focus().next().unwrap();
        let map = eliasson_map_at(&sys, &ff.point, DEFAULT_DEGREE).unwrap();
        let cart = Cartography::new(&sys, &c, &[1], 0).unwrap();
        taylor_invariant(&cart, 0, &map, opts, Execution::default())
    }

    #[test]
    fn fit_leaves_no_log_signature() {
        let opts = TaylorOptions::default();
        let t = cam_fit(&opts).unwrap();
        assert!(t.rms_residual < 1e-4, "{t:?}");
        assert!((0.0..TAU).contains(&t.s10));
        assert!(t.constant_offset.abs() < 1e-5, "{}", t.constant_offset);
        let half = cam_fit(&TaylorOptions { inner: opts.inner / 2.0, ..opts }).unwrap();
        assert!((half.s10 - t.s10).abs() < 1e-3 && (half.s01 - t.s01).abs() < 1e-3);
    }

    #[test]
    fn rejects_a_fit_that_misses_the_threshold() {
        let err = cam_fit(&TaylorOptions { max_residual: 1e-12, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::Accuracy(_)), "{err}");
    }

    #[test]
    fn shrinks_the_annulus_until_the_fit_holds() {
        let opts = TaylorOptions { max_residual: 1e-7, ..Default::default() };
        let t = cam_fit(&opts).unwrap();
        assert!(t.annulus.1 < opts.outer && t.rms_residual < 1e-7, "{t:?}");
        assert_eq!(cam_fit(&TaylorOptions::default()).unwrap().annulus, (0.02, 0.2));
    }

    #[test]
    fn exponent_layout() {
        assert_eq!(exponents(2), vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
    }
}
