//! Probability current j = Im(ψ* ∇ψ) and the velocity field v = j/|ψ|².

use serde::Serialize;

use crate::error::{Result, SlitError};
use crate::field::{Field, FieldSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurrentVector {
    pub jx: f64,
    pub jy: f64,
}

impl CurrentVector {
    pub fn from_sample(s: &FieldSample) -> Self {
        let conj = s.value.conj();
        CurrentVector {
            jx: (conj * s.d_dx).im,
            jy: (conj * s.d_dy).im,
        }
    }
}

pub fn probability_current<F: Field + ?Sized>(field: &F, x: f64, y: f64) -> Result<CurrentVector> {
    Ok(CurrentVector::from_sample(&field.sample(x, y)?))
}

/// Velocity `(vx, vy)` at `(x, y)`.
///
/// Fails with [`SlitError::Node`] when |ψ|² is below `min_intensity` or is
/// exactly zero.
pub fn bohmian_velocity<F: Field + ?Sized>(
    field: &F,
    x: f64,
    y: f64,
    min_intensity: f64,
) -> Result<(f64, f64)> {
    let s = field.sample(x, y)?;
    velocity_from_sample(&s, x, y, min_intensity)
}

pub(crate) fn velocity_from_sample(s: &FieldSample, x: f64, y: f64, min_intensity: f64) -> Result<(f64, f64)> {
    let rho = s.intensity();
    if rho <= 0.0 || rho < min_intensity || !rho.is_finite() {
        return Err(SlitError::Node {
            x,
            y,
            intensity: rho,
            floor: min_intensity,
        });
    }
    let j = CurrentVector::from_sample(s);
    Ok((j.jx / rho, j.jy / rho))
}
