//! Height invariant: the normalized area below a focus-focus value on its
//! critical level of `L`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::catalog::SystemInstance;
use crate::error::{Error, Result};
use crate::invariants::action::{area_above, area_below, total_area};
use crate::singularities::{SingularityKind, SingularityRecord};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightInvariant {
    pub lambda: f64,
    pub eta: f64,
    /// `area{H < η} / 2π` on the reduced space at `L = λ`.
    pub height: f64,
    /// `area{H > η} / 2π`.
    pub complement: f64,
    /// Total reduced area over `2π`.
    pub fiber_height: f64,
    /// `|height + complement − fiber_height|`.
    pub additivity_residual: f64,
}

pub fn height_invariant(sys: &SystemInstance, record: &SingularityRecord) -> Result<HeightInvariant> {
    if record.kind != SingularityKind::FocusFocus {
        return Err(Error::SingularityType(format!("height needs a focus-focus point, got {}", record.kind.label())));
    }
    let (lambda, eta) = record.critical_value;
    let height = area_below(sys, lambda, eta)? / TAU;
    let complement = area_above(sys, lambda, eta)? / TAU;
    let fiber_height = total_area(sys, lambda)? / TAU;
    if !(height > 0.0 && height < fiber_height) {
        return Err(Error::Quadrature(format!("height {height} outside (0, {fiber_height})")));
    }
    Ok(HeightInvariant {
        lambda,
        eta,
        height,
        complement,
        fiber_height,
        additivity_residual: (height + complement - fiber_height).abs(),
    })
}
