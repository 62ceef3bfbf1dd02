//! Numerical laboratory for the symmetric two-slit experiment.
//!
//! Stationary one-slit and two-slit fields at fixed energy, their
//! probability current and current lines, the split of the two-slit state
//! into half-plane substates, mirror (image) constructions, mirror-paired
//! one-slit trajectory ensembles with the tangent swap, and which-path /
//! visibility diagnostics.

// `!(x > 0.0)` is used on purpose so NaN is rejected with the bad values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod current;
pub mod decomposition;
pub mod duality;
pub mod ensembles;
pub mod error;
pub mod field;
pub mod interp;
pub mod output;
pub mod params;
pub mod quad;
pub mod slice;
pub mod trajectory;
pub mod verify;

pub use error::{Result, SlitError};
pub use field::{ComplexAmplitude, Field, FieldKind, FieldSample, Side, Slit, WaveField};
pub use params::{Model, PhysicsParams};
