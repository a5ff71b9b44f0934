//! Symplectic invariants of semitoric integrable systems.
//!
//! The crate works with the explicit families in [`catalog`] (coupled
//! spin-oscillator, coupled angular momenta, a two-focus family) and computes
//! the focus-focus census, the Taylor series invariant, the polygon invariant
//! with twisting indices, and the height invariant.

pub mod error;
pub mod exec;
pub mod catalog;
pub mod invariants;
pub mod normalform;
pub mod numeric;
pub mod output;
pub mod phasespace;
pub mod series;
pub mod singularities;

pub use error::{Error, Result};
pub use exec::Execution;
