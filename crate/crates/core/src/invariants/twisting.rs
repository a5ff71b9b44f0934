//! Twisting index: the vertical shear taking the privileged local momentum
//! map at a focus-focus value to the generalized toric one.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::polygon::Cartography;
use crate::invariants::taylor::{arg_branch, TaylorInvariant};
use crate::normalform::EliassonMap;

/// Probe circle radius as a share of the fit annulus' outer radius, and the
/// number of probe points of the slope comparison.
const PROBE_SHARE: f64 = 0.25;
const PROBES: usize = 8;
const FD_STEP: f64 = 1e-5;
/// Largest distance of the fitted shear from an integer.
pub const SHEAR_TOL: f64 = 0.1;
/// Agreement required of the linear parts once the integer is fixed.
pub const LINEAR_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistingIndex {
    pub k: i32,
    /// Mean measured shear before rounding.
    pub shear: f64,
    /// Largest deviation of a probe from `k`.
    pub residual: f64,
}

/// Compares `∂_l μ₂`, measured by central differences through the normal
/// form, with `∂_l ν₂` of the privileged action `2πν₂ = C + S − Im(z log z − z)`
/// whose `l` coefficient is the reduced `s₁₀`. Their difference is the
/// shear `k` in `μ = T^k ∘ ν`.
pub fn twisting_index(
    cart: &Cartography,
    cut: usize,
    map: &EliassonMap,
    taylor: &TaylorInvariant,
) -> Result<TwistingIndex> {
    let c = *cart
        .cuts
        .get(cut)
        .ok_or_else(|| Error::InvalidParameter(format!("no cut with index {cut}")))?;
    let reduction = taylor.raw_s10 - taylor.s10;
    let mu = |l: f64, j: f64| cart.mu2(c.lambda + l, c.eta + map.energy(l, j));
    let radius = PROBE_SHARE * taylor.annulus.1;
    let mut shears = Vec::with_capacity(PROBES);
    for i in 0..PROBES {
        let th = TAU * (i as f64 + 0.5) / PROBES as f64;
        let (l, j) = (radius * th.cos(), radius * th.sin());
        let dmu = TAU * (mu(l + FD_STEP, j)? - mu(l - FD_STEP, j)?) / (2.0 * FD_STEP);
        let dnu = taylor.fit_dl(l, j) - reduction - arg_branch(l, j, c.sign);
        shears.push((dmu - dnu) / TAU);
    }
    let shear = shears.iter().sum::<f64>() / PROBES as f64;
    let k = shear.round();
    if (shear - k).abs() > SHEAR_TOL {
        return Err(Error::Inconsistent(format!("fitted shear {shear} is not near an integer")));
    }
    let residual = shears.iter().map(|s| (s - k).abs()).fold(0.0, f64::max);
    if residual > LINEAR_TOL {
        return Err(Error::Inconsistent(format!(
            "linear parts differ from T^{k} by {residual:e} (> {LINEAR_TOL:e})"
        )));
    }
    Ok(TwistingIndex { k: k as i32, shear, residual })
}
