//! Symplectic invariants: actions, Taylor series, height, polygon and
//! twisting indices.

pub mod action;
pub mod height;
pub mod polygon;
pub mod taylor;
pub mod twisting;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{cam_transition_times, Family, SystemInstance};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::normalform::{eliasson_map_at, DEFAULT_DEGREE};
use crate::singularities::{count_focus_focus, Census, SearchOptions, SingularityRecord};

use height::{height_invariant, HeightInvariant};
use polygon::{Cartography, SemitoricPolygon};
use taylor::{taylor_invariant, TaylorInvariant, TaylorOptions};
use twisting::{twisting_index, TwistingIndex};

pub const SCHEMA: &str = "semitoric-invariants/1";

/// Parameters this close to a degeneracy are refused.
pub const DEGENERACY_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantOptions {
    /// Cut signs, one per focus-focus value; all `+1` when `None`.
    pub signs: Option<Vec<i8>>,
    /// Exponent of the vertical shear applied to the polygon.
    pub shear: i32,
    /// Truncation degree of the normal form used to place samples.
    pub degree: usize,
    pub taylor: TaylorOptions,
    pub search: SearchOptions,
    pub execution: Execution,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions {
            signs: None,
            shear: 0,
            degree: DEFAULT_DEGREE,
            taylor: TaylorOptions::default(),
            search: SearchOptions::lattice_only(),
            execution: Execution::default(),
        }
    }
}

/// Refuses parameters within [`DEGENERACY_MARGIN`] of a change in the
/// singularity census.
pub fn ensure_nondegenerate(sys: &SystemInstance, census: &Census, search: &SearchOptions) -> Result<()> {
    if census.has_degenerate() {
        return Err(Error::NearDegenerate(format!("{} has a degenerate rank-0 point", sys.name())));
    }
    let neighbours: Vec<SystemInstance> = match sys.family {
        Family::Cam(c) => {
            let tt = cam_transition_times(c.r1, c.r2)?;
            for (name, t) in [("t-", tt.t_minus), ("t+", tt.t_plus)] {
                if (c.t - t).abs() <= DEGENERACY_MARGIN {
                    return Err(Error::NearDegenerate(format!("t = {} is within {DEGENERACY_MARGIN:e} of {name} = {t}", c.t)));
                }
            }
            Vec::new()
        }
        Family::Cso(_) => Vec::new(),
        Family::TwoFocus(f) => {
            let d = DEGENERACY_MARGIN;
            [(d, 0.0), (-d, 0.0), (0.0, d), (0.0, -d)]
                .into_iter()
                .map(|(a, b)| {
                    SystemInstance::two_focus(f.r1, f.r2, (f.s1 + a).clamp(0.0, 1.0), (f.s2 + b).clamp(0.0, 1.0))
                })
                .collect::<Result<_>>()?
        }
    };
    for n in &neighbours {
        let other = count_focus_focus(n, search)?;
        if other.n_ff != census.n_ff || other.has_degenerate() {
            return Err(Error::NearDegenerate(format!(
                "focus-focus count changes within {DEGENERACY_MARGIN:e} of {:?}",
                sys.params()
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularitySummary {
    pub kind: String,
    pub point: Vec<f64>,
    pub value: (f64, f64),
}

impl From<&SingularityRecord> for SingularitySummary {
    fn from(r: &SingularityRecord) -> Self {
        SingularitySummary { kind: r.kind.label().to_string(), point: r.point.coords.clone(), value: r.critical_value }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonSection {
    pub vertices: Vec<(f64, f64)>,
    pub cuts: Vec<f64>,
    pub focus_values: Vec<(f64, f64)>,
    pub signs: Vec<i8>,
    pub twisting: Vec<i32>,
    pub shear: i32,
    pub rounded: bool,
    pub truncated: bool,
}

impl From<SemitoricPolygon> for PolygonSection {
    fn from(p: SemitoricPolygon) -> Self {
        PolygonSection {
            vertices: p.vertices,
            cuts: p.cuts,
            focus_values: p.focus_values,
            signs: p.signs,
            twisting: p.twisting,
            shear: p.shear,
            rounded: p.rounded,
            truncated: p.truncated,
        }
    }
}

impl From<PolygonSection> for SemitoricPolygon {
    fn from(p: PolygonSection) -> Self {
        SemitoricPolygon {
            vertices: p.vertices,
            cuts: p.cuts,
            focus_values: p.focus_values,
            signs: p.signs,
            twisting: p.twisting,
            shear: p.shear,
            rounded: p.rounded,
            truncated: p.truncated,
        }
    }
}

/// The serialized invariant list of one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantDocument {
    pub schema: String,
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub n_ff: usize,
    pub singularities: Vec<SingularitySummary>,
    /// One entry per focus-focus value, in cut order; absent without any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taylor: Option<Vec<TaylorInvariant>>,
    pub height: Vec<f64>,
    pub height_details: Vec<HeightInvariant>,
    pub twisting_details: Vec<TwistingIndex>,
    pub polygon: PolygonSection,
}

impl InvariantDocument {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: InvariantDocument = serde_json::from_str(s)?;
        if doc.schema != SCHEMA {
            return Err(Error::InvalidParameter(format!("unknown schema {:?}", doc.schema)));
        }
        Ok(doc)
    }
}

/// Census, polygon and, per focus-focus value, Taylor series, height and
/// twisting index.
pub fn compute_invariants(sys: &SystemInstance, opts: &InvariantOptions) -> Result<InvariantDocument> {
    let census = count_focus_focus(sys, &opts.search)?;
    ensure_nondegenerate(sys, &census, &opts.search)?;
    let signs = opts.signs.clone().unwrap_or_else(|| vec![1; census.n_ff]);
    let cart = Cartography::new(sys, &census, &signs, opts.shear)?;
    let mut polygon = cart.polygon()?;

    let ff: Vec<&SingularityRecord> = census.focus_focus().collect();
    let mut taylor = Vec::new();
    let mut heights = Vec::new();
    let mut twists = Vec::new();
    for (i, cut) in cart.cuts.iter().enumerate() {
        let record = ff
            .iter()
            .find(|r| (r.critical_value.0 - cut.lambda).abs() < 1e-9 && (r.critical_value.1 - cut.eta).abs() < 1e-9)
            .ok_or_else(|| Error::Precondition(format!("cut {i} has no focus-focus record")))?;
        let map = eliasson_map_at(sys, &record.point, opts.degree)?;
        let t = taylor_invariant(&cart, i, &map, &opts.taylor, opts.execution)?;
        twists.push(twisting_index(&cart, i, &map, &t)?);
        heights.push(height_invariant(sys, record)?);
        taylor.push(t);
    }
    polygon.twisting = twists.iter().map(|t| t.k).collect();

    Ok(InvariantDocument {
        schema: SCHEMA.to_string(),
        family: sys.name().to_string(),
        params: sys.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        n_ff: census.n_ff,
        singularities: census.records.iter().map(SingularitySummary::from).collect(),
        taylor: (!taylor.is_empty()).then_some(taylor),
        height: heights.iter().map(|h| h.height).collect(),
        height_details: heights,
        twisting_details: twists,
        polygon: polygon.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_parameters_at_a_transition() {
        let tt = cam_transition_times(1.0, 1.5).unwrap();
        let sys = SystemInstance::cam(1.0, 1.5, tt.t_minus + 5e-7).unwrap();
        let err = compute_invariants(&sys, &InvariantOptions::default()).unwrap_err();
        assert!(err.is_near_degenerate(), "{err}");
    }

    #[test]
    fn no_focus_focus_means_no_taylor_section() {
        let sys = SystemInstance::cam(1.0, 1.5, 0.1).unwrap();
        let doc = compute_invariants(&sys, &InvariantOptions::default()).unwrap();
        assert_eq!(doc.n_ff, 0);
        assert!(doc.taylor.is_none() && doc.height.is_empty());
        assert!(!doc.polygon.vertices.is_empty());
        let json = doc.to_json().unwrap();
        assert!(!json.contains("\"taylor\""));
        assert_eq!(InvariantDocument::from_json(&json).unwrap(), doc);
    }
}
