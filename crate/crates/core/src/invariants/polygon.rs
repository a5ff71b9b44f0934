//! Generalized toric momentum map and the polygon invariant.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::catalog::SystemInstance;
use crate::error::{Error, Result};
use crate::invariants::action::{area_below, total_area};
use crate::numeric::rational::rationalize;
use crate::singularities::{Census, SingularityKind};

/// Relative step of the one-sided slope differences.
const SLOPE_STEP: f64 = 1e-4;
/// Vertex snapping: tolerance and largest denominator.
pub const SNAP_TOL: f64 = 1e-5;
pub const SNAP_DENOMINATOR: i64 = 64;

/// A focus-focus value with its cut.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub lambda: f64,
    pub eta: f64,
    /// `+1`: the cut runs upward from the value; `-1`: downward.
    pub sign: i8,
    /// Change of `∂_l I` across `l = λ` above the focus-focus value, on top
    /// of the change below it.
    pub monodromy_jump: i32,
}

/// Jump of `∂_l I` across a vertical line through rank-0 values, measured
/// below any focus-focus value on that line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wall {
    pub l: f64,
    pub jump: i32,
}

/// The second component `μ₂` of a generalized toric momentum map
/// `μ = (L, μ₂)` for one choice of cut signs and vertical shear.
#[derive(Clone, Debug)]
pub struct Cartography<'a> {
    sys: &'a SystemInstance,
    pub walls: Vec<Wall>,
    pub cuts: Vec<Cut>,
    /// Exponent `m` of the shear `T^m` applied to the base representative.
    pub shear: i32,
    /// Horizontal extent of the picture; `L` is unbounded for some systems.
    pub window: (f64, f64),
}

fn ramp(x: f64) -> f64 {
    x.max(0.0)
}

/// Window used when `L` is unbounded above: as far right of the last
/// rank-0 value as the left end lies to its left.
fn default_window(sys: &SystemInstance, census: &Census) -> (f64, f64) {
    let (lo, hi) = sys.reduced().l_range();
    let hi = hi.unwrap_or_else(|| {
        let last = census.records.iter().map(|r| r.critical_value.0).fold(lo, f64::max);
        last + (last - lo).max(1.0)
    });
    (lo, hi)
}

impl<'a> Cartography<'a> {
    /// Measures the walls and monodromy jumps and fixes the representative
    /// that equals `I = area / 2π` left of every wall.
    pub fn new(sys: &'a SystemInstance, census: &Census, signs: &[i8], shear: i32) -> Result<Self> {
        let ff: Vec<_> = census.focus_focus().collect();
        if signs.len() != ff.len() {
            return Err(Error::InvalidParameter(format!(
                "{} cut signs given for {} focus-focus values",
                signs.len(),
                ff.len()
            )));
        }
        if let Some(s) = signs.iter().find(|s| s.abs() != 1) {
            return Err(Error::InvalidParameter(format!("cut signs must be ±1, got {s}")));
        }
        let window = default_window(sys, census);
        let span = window.1 - window.0;
        let dl = SLOPE_STEP * span;
        let red = sys.reduced();

        let mut ls: Vec<f64> = census.records.iter().map(|r| r.critical_value.0).collect();
        ls.sort_by(f64::total_cmp);
        ls.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * span.max(1.0));
        let interior: Vec<f64> = ls.into_iter().filter(|&l| l > window.0 + dl && l < window.1 - dl).collect();

        let jump_at = |l: f64, h: f64| -> Result<f64> {
            let mid = area_below(sys, l, h)?;
            let left = (mid - area_below(sys, l - dl, h)?) / dl;
            let right = (area_below(sys, l + dl, h)? - mid) / dl;
            Ok((right - left) / TAU)
        };
        let round = |x: f64, what: &str| -> Result<i32> {
            let r = x.round();
            if (x - r).abs() > 0.05 {
                return Err(Error::Accuracy(format!("{what} jump {x} is not close to an integer")));
            }
            Ok(r as i32)
        };

        let mut walls = Vec::new();
        let mut cuts = Vec::new();
        for l in interior {
            let (h_lo, h_hi) = red
                .h_extent(l)
                .ok_or_else(|| Error::Range(format!("level L = {l} is empty")))?;
            let here: Vec<usize> =
                (0..ff.len()).filter(|&i| (ff[i].critical_value.0 - l).abs() < 1e-9 * span.max(1.0)).collect();
            match here.as_slice() {
                [] => {
                    let j = round(jump_at(l, 0.5 * (h_lo + h_hi))?, "wall")?;
                    walls.push(Wall { l, jump: j });
                }
                [idx] => {
                    let idx = *idx;
                    let eta = ff[idx].critical_value.1;
                    let below = round(jump_at(l, 0.5 * (h_lo + eta))?, "wall")?;
                    let above = round(jump_at(l, 0.5 * (eta + h_hi))?, "monodromy")?;
                    walls.push(Wall { l, jump: below });
                    cuts.push((idx, Cut { lambda: l, eta, sign: signs[idx], monodromy_jump: above - below }));
                }
                _ => {
                    return Err(Error::Precondition(format!(
                        "several focus-focus values on the line L = {l}; cuts would overlap"
                    )))
                }
            }
        }
        cuts.sort_by_key(|(i, _)| *i);
        Ok(Cartography { sys, walls, cuts: cuts.into_iter().map(|(_, c)| c).collect(), shear, window })
    }

    pub fn system(&self) -> &SystemInstance {
        self.sys
    }

    /// The piecewise-linear part added to `I = area / 2π`.
    pub fn correction(&self, l: f64) -> f64 {
        let walls: f64 = self.walls.iter().map(|w| w.jump as f64 * ramp(l - w.l)).sum();
        let cuts: f64 = self
            .cuts
            .iter()
            .filter(|c| c.sign < 0)
            .map(|c| c.monodromy_jump as f64 * ramp(l - c.lambda))
            .sum();
        -walls - cuts + self.shear as f64 * l
    }

    /// `μ₂(l, h)`.
    pub fn mu2(&self, l: f64, h: f64) -> Result<f64> {
        Ok(area_below(self.sys, l, h)? / TAU + self.correction(l))
    }

    /// `μ₂` along the lower boundary of the image.
    pub fn lower(&self, l: f64) -> f64 {
        self.correction(l)
    }

    /// `μ₂` along the upper boundary of the image.
    pub fn upper(&self, l: f64) -> Result<f64> {
        Ok(total_area(self.sys, l)? / TAU + self.correction(l))
    }

    /// The same map with the sign of cut `r` reversed.
    pub fn flipped(&self, r: usize) -> Self {
        let mut out = self.clone();
        out.cuts[r].sign = -out.cuts[r].sign;
        out
    }

    /// The same map composed with `T^k`.
    pub fn sheared(&self, k: i32) -> Self {
        let mut out = self.clone();
        out.shear += k;
        out
    }

    /// Image polygon, with vertices found where the boundary slopes change.
    pub fn polygon(&self) -> Result<SemitoricPolygon> {
        let (lo, hi) = self.window;
        let span = hi - lo;
        let dl = SLOPE_STEP * span;
        let mut candidates: Vec<f64> = vec![lo, hi];
        candidates.extend(self.walls.iter().map(|w| w.l));
        candidates.extend(self.cuts.iter().map(|c| c.lambda));
        candidates.sort_by(f64::total_cmp);
        candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * span);

        let bends = |f: &dyn Fn(f64) -> Result<f64>, x: f64| -> Result<bool> {
            if x <= lo || x >= hi {
                return Ok(true);
            }
            let mid = f(x)?;
            let left = (mid - f(x - dl)?) / dl;
            let right = (f(x + dl)? - mid) / dl;
            Ok((right - left).abs() > 1e-6 * (1.0 + left.abs()))
        };
        let lower = |x: f64| Ok(self.lower(x));
        let upper = |x: f64| self.upper(x);

        let mut bottom = Vec::new();
        let mut top = Vec::new();
        for &x in &candidates {
            if bends(&lower, x)? {
                bottom.push((x, self.lower(x)));
            }
            if bends(&upper, x)? {
                top.push((x, self.upper(x)?));
            }
        }
        // Counterclockwise: along the bottom, then back along the top.
        let mut raw: Vec<(f64, f64)> = bottom;
        raw.extend(top.into_iter().rev());
        let scale = raw.iter().map(|p| p.0.abs().max(p.1.abs())).fold(1.0, f64::max);
        let mut vertices: Vec<(f64, f64)> = Vec::new();
        for p in raw {
            let dup = vertices.last().is_some_and(|q| (q.0 - p.0).abs() + (q.1 - p.1).abs() < 1e-9 * scale);
            if !dup {
                vertices.push(p);
            }
        }
        if vertices.len() > 1 {
            let (a, b) = (vertices[0], vertices[vertices.len() - 1]);
            if (a.0 - b.0).abs() + (a.1 - b.1).abs() < 1e-9 * scale {
                vertices.pop();
            }
        }
        let mut rounded = true;
        let snapped: Vec<(f64, f64)> = vertices
            .iter()
            .map(|&(x, y)| {
                let mut s = |v: f64| match rationalize(v, SNAP_DENOMINATOR, SNAP_TOL) {
                    Some((p, q)) => p as f64 / q as f64,
                    None => {
                        rounded = false;
                        v
                    }
                };
                (s(x), s(y))
            })
            .collect();
        let vertices = if rounded {
            snapped
        } else {
            log::warn!("polygon vertices are not close to rationals with denominator <= {SNAP_DENOMINATOR}; reporting raw values");
            vertices
        };
        let (_, l_max) = self.sys.reduced().l_range();
        let cut_points = self
            .cuts
            .iter()
            .map(|c| Ok((c.lambda, self.mu2(c.lambda, c.eta)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SemitoricPolygon {
            vertices,
            cuts: self.cuts.iter().map(|c| c.lambda).collect(),
            focus_values: cut_points,
            signs: self.cuts.iter().map(|c| c.sign).collect(),
            twisting: Vec::new(),
            shear: self.shear,
            rounded,
            truncated: l_max.is_none(),
        })
    }
}

/// One representative of the polygon invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemitoricPolygon {
    /// Counterclockwise, starting at the lower left.
    pub vertices: Vec<(f64, f64)>,
    /// Abscissas `λ_r` of the cuts.
    pub cuts: Vec<f64>,
    /// Images `μ(m_r)` of the focus-focus points, where the cuts start.
    pub focus_values: Vec<(f64, f64)>,
    pub signs: Vec<i8>,
    pub twisting: Vec<i32>,
    /// Shear exponent relative to the base representative.
    pub shear: i32,
    /// Whether every vertex was snapped to a rational.
    pub rounded: bool,
    /// Whether the polygon was cut off by the horizontal window.
    pub truncated: bool,
}

impl SemitoricPolygon {
    /// `T^k (x, y) = (x, y + kx)`; twisting indices shift by `k`.
    pub fn apply_shear(&self, k: i32) -> Self {
        let kf = k as f64;
        SemitoricPolygon {
            vertices: self.vertices.iter().map(|&(x, y)| (x, y + kf * x)).collect(),
            focus_values: self.focus_values.iter().map(|&(x, y)| (x, y + kf * x)).collect(),
            twisting: self.twisting.iter().map(|t| t + k).collect(),
            shear: self.shear + k,
            ..self.clone()
        }
    }

    /// Lower boundary vertices have strictly increasing abscissas, and the
    /// polygon turns left at every vertex.
    pub fn is_convex(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return true;
        }
        (0..n).all(|i| {
            let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
            (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0) >= -1e-9
        })
    }
}

/// Rank-0 values that are elliptic-elliptic, for plotting.
pub fn elliptic_values(census: &Census) -> Vec<(f64, f64)> {
    census
        .records
        .iter()
        .filter(|r| r.kind == SingularityKind::EllipticElliptic)
        .map(|r| r.critical_value)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singularities::{count_focus_focus, SearchOptions};

    fn census(sys: &SystemInstance) -> Census {
        count_focus_focus(sys, &SearchOptions::lattice_only()).unwrap()
    }

    fn close(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(p, q)| (p.0 - q.0).abs() < tol && (p.1 - q.1).abs() < tol)
    }

    #[test]
    fn toric_limit_is_the_parallelogram() {
        let (r1, r2) = (1.0, 1.5);
        let sys = SystemInstance::cam(r1, r2, 0.0).unwrap();
        let c = census(&sys);
        let poly = Cartography::new(&sys, &c, &[], 0).unwrap().polygon().unwrap();
        let expect = [(-2.0 * r1, 0.0), (2.0 * (r2 - r1), 0.0), (2.0 * r2, 2.0 * r1), (0.0, 2.0 * r1)];
        assert!(close(&poly.vertices, &expect, 1e-4), "{:?}", poly.vertices);
        assert!(poly.rounded && poly.is_convex());
    }

    #[test]
    fn focus_focus_cut_has_unit_monodromy() {
        let sys = SystemInstance::cam(1.0, 1.5, 0.5).unwrap();
        let c = census(&sys);
        let cart = Cartography::new(&sys, &c, &[1], 0).unwrap();
        assert_eq!(cart.cuts.len(), 1);
        assert_eq!(cart.cuts[0].monodromy_jump.abs(), 1);
        let poly = cart.polygon().unwrap();
        assert!(poly.is_convex(), "{:?}", poly.vertices);
        let flipped = cart.flipped(0).polygon().unwrap();
        assert!(flipped.is_convex(), "{:?}", flipped.vertices);
        // Left of the cut both representatives agree.
        for (p, q) in poly.vertices.iter().zip(&flipped.vertices) {
            if p.0 < cart.cuts[0].lambda - 1e-9 && q.0 == p.0 {
                assert!((p.1 - q.1).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn shear_of_cartography_matches_shear_of_polygon() {
        let sys = SystemInstance::cam(1.0, 1.5, 0.5).unwrap();
        let c = census(&sys);
        let cart = Cartography::new(&sys, &c, &[1], 0).unwrap();
        let a = cart.sheared(2).polygon().unwrap();
        let b = cart.polygon().unwrap().apply_shear(2);
        assert!(close(&a.vertices, &b.vertices, 1e-9));
        assert_eq!(a.shear, 2);
    }

    #[test]
    fn rejects_bad_signs() {
        let sys = SystemInstance::cam(1.0, 1.5, 0.5).unwrap();
        let c = census(&sys);
        assert!(Cartography::new(&sys, &c, &[], 0).is_err());
        assert!(Cartography::new(&sys, &c, &[2], 0).is_err());
    }
}
