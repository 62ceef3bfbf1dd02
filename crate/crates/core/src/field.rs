//! Stationary wave fields at fixed energy.
//!
//! A single-slit profile Ψ_one(x, s) is symmetric in the transverse
//! coordinate s. Slit 1 is the profile shifted to y = −a, slit 2 to y = +a,
//! and the two-slit field is their sum Φ = ψ₁ + ψ₂.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SlitError};
use crate::params::{Model, PhysicsParams};

/// Complex amplitude; `re` and `im` are the only fields.
pub type ComplexAmplitude = Complex64;

/// Field value together with its analytic gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub value: Complex64,
    pub d_dx: Complex64,
    pub d_dy: Complex64,
}

impl FieldSample {
    pub const ZERO: FieldSample = FieldSample {
        value: Complex64::new(0.0, 0.0),
        d_dx: Complex64::new(0.0, 0.0),
        d_dy: Complex64::new(0.0, 0.0),
    };

    pub fn intensity(&self) -> f64 {
        self.value.norm_sqr()
    }

    pub fn scale(self, c: Complex64) -> FieldSample {
        FieldSample {
            value: c * self.value,
            d_dx: c * self.d_dx,
            d_dy: c * self.d_dy,
        }
    }
}

impl std::ops::Add for FieldSample {
    type Output = FieldSample;

    fn add(self, rhs: FieldSample) -> FieldSample {
        FieldSample {
            value: self.value + rhs.value,
            d_dx: self.d_dx + rhs.d_dx,
            d_dy: self.d_dy + rhs.d_dy,
        }
    }
}

impl std::ops::Sub for FieldSample {
    type Output = FieldSample;

    fn sub(self, rhs: FieldSample) -> FieldSample {
        FieldSample {
            value: self.value - rhs.value,
            d_dx: self.d_dx - rhs.d_dx,
            d_dy: self.d_dy - rhs.d_dy,
        }
    }
}

/// Anything that can be evaluated as a complex amplitude with gradient.
///
/// Implementations must be pure functions of `(x, y)`.
pub trait Field: Sync {
    fn sample(&self, x: f64, y: f64) -> Result<FieldSample>;

    fn value(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok(self.sample(x, y)?.value)
    }

    /// Transverse positions where the field jumps; quadrature splits there.
    fn breakpoints(&self) -> &[f64] {
        &[]
    }

    /// Length used to scale absolute tolerances at abscissa `x`.
    fn transverse_scale(&self, _x: f64) -> f64 {
        1.0
    }
}

/// Central-difference gradient of any field's value, step 1e-5·max(1, |coord|).
pub fn finite_difference_gradient<F: Field + ?Sized>(
    field: &F,
    x: f64,
    y: f64,
) -> Result<(Complex64, Complex64)> {
    let hx = 1e-5 * x.abs().max(1.0);
    let hy = 1e-5 * y.abs().max(1.0);
    let dx = (field.value(x + hx, y)? - field.value(x - hx, y)?) / (2.0 * hx);
    let dy = (field.value(x, y + hy)? - field.value(x, y - hy)?) / (2.0 * hy);
    Ok((dx, dy))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slit {
    /// Centered on y = −a.
    First,
    /// Centered on y = +a.
    Second,
}

impl Slit {
    pub fn center(self, params: &PhysicsParams) -> f64 {
        match self {
            Slit::First => -params.a(),
            Slit::Second => params.a(),
        }
    }

    fn shifted(self, params: &PhysicsParams, y: f64) -> f64 {
        match self {
            Slit::First => y + params.a(),
            Slit::Second => y - params.a(),
        }
    }
}

/// Half-plane selector used by launches and fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
    Both,
}

impl Side {
    /// Intersect a transverse window with the half-plane. `None` if empty.
    pub fn clip(self, (lo, hi): (f64, f64)) -> Option<(f64, f64)> {
        let (lo, hi) = match self {
            Side::Lower => (lo, hi.min(0.0)),
            Side::Upper => (lo.max(0.0), hi),
            Side::Both => (lo, hi),
        };
        (lo < hi).then_some((lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldKind {
    OneSlit(Slit),
    TwoSlit,
    Weighted { c1: Complex64, c2: Complex64 },
    /// Slit 2 plus its image through y = 0 with even parity (zero normal derivative).
    ImageNeumann,
    /// Slit 2 minus its image through y = 0 (field vanishes on the line).
    ImageDirichlet,
    /// Φ on y < 0, zero on y > 0, Φ/2 on y = 0.
    RestrictedLower,
    /// Φ on y > 0, zero on y < 0, Φ/2 on y = 0.
    RestrictedUpper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveField {
    pub kind: FieldKind,
    pub params: PhysicsParams,
}

impl WaveField {
    pub fn new(kind: FieldKind, params: PhysicsParams) -> Result<Self> {
        if let FieldKind::Weighted { c1, c2 } = kind {
            if c1 == Complex64::new(0.0, 0.0) && c2 == Complex64::new(0.0, 0.0) {
                return Err(SlitError::domain("weights (c1, c2) must not both be zero"));
            }
            if !(c1.is_finite() && c2.is_finite()) {
                return Err(SlitError::domain("weights must be finite"));
            }
        }
        Ok(WaveField { kind, params })
    }

    pub fn one_slit(params: PhysicsParams, slit: Slit) -> Self {
        WaveField {
            kind: FieldKind::OneSlit(slit),
            params,
        }
    }

    pub fn two_slit(params: PhysicsParams) -> Self {
        WaveField {
            kind: FieldKind::TwoSlit,
            params,
        }
    }

    pub fn weighted(params: PhysicsParams, c1: Complex64, c2: Complex64) -> Result<Self> {
        Self::new(FieldKind::Weighted { c1, c2 }, params)
    }
}

impl Field for WaveField {
    fn sample(&self, x: f64, y: f64) -> Result<FieldSample> {
        let p = &self.params;
        match self.kind {
            FieldKind::OneSlit(slit) => one_slit_amplitude(p, slit, x, y),
            FieldKind::TwoSlit => two_slit_amplitude(p, x, y),
            FieldKind::Weighted { c1, c2 } => weighted_amplitude(p, c1, c2, x, y),
            FieldKind::ImageNeumann | FieldKind::ImageDirichlet => {
                if y < 0.0 {
                    return Err(SlitError::domain(format!(
                        "image fields live on y >= 0, got y = {y}"
                    )));
                }
                let physical = one_slit_amplitude(p, Slit::Second, x, y)?;
                let image = one_slit_amplitude(p, Slit::First, x, y)?;
                Ok(if self.kind == FieldKind::ImageNeumann {
                    physical + image
                } else {
                    physical - image
                })
            }
            FieldKind::RestrictedLower | FieldKind::RestrictedUpper => {
                let inside = if self.kind == FieldKind::RestrictedLower {
                    y < 0.0
                } else {
                    y > 0.0
                };
                if y == 0.0 {
                    Ok(two_slit_amplitude(p, x, y)?.scale(Complex64::new(0.5, 0.0)))
                } else if inside {
                    two_slit_amplitude(p, x, y)
                } else {
                    p.check_x(x)?;
                    Ok(FieldSample::ZERO)
                }
            }
        }
    }

    fn breakpoints(&self) -> &[f64] {
        match self.kind {
            FieldKind::RestrictedLower | FieldKind::RestrictedUpper | FieldKind::ImageDirichlet
            | FieldKind::ImageNeumann => &[0.0],
            _ => &[],
        }
    }

    fn transverse_scale(&self, x: f64) -> f64 {
        self.params.transverse_scale(x)
    }
}

/// Single-slit profile Ψ_one(x, s) and its derivatives in x and s.
fn profile(params: &PhysicsParams, x: f64, s: f64) -> Result<FieldSample> {
    params.check_x(x)?;
    if !s.is_finite() {
        return Err(SlitError::domain(format!("y must be finite, got {s}")));
    }
    let k = params.k();
    let i = Complex64::i();
    let carrier = Complex64::from_polar(1.0, k * x);
    match params.model() {
        Model::Gaussian => {
            let s2 = params.sigma() * params.sigma();
            let dq = Complex64::new(0.0, 1.0 / (k * s2));
            let q = Complex64::new(1.0, x / (k * s2));
            let inv_q = q.inv();
            let envelope = (-(s * s) / (2.0 * s2) * inv_q).exp();
            let value = inv_q.sqrt() * carrier * envelope;
            let d_dx = value * (i * k + dq * inv_q * (-0.5 + s * s / (2.0 * s2) * inv_q));
            let d_dy = value * (-s / s2 * inv_q);
            Ok(FieldSample { value, d_dx, d_dy })
        }
        Model::Point => {
            let phase = k * x + k * s * s / (2.0 * x);
            let value = Complex64::from_polar(x.sqrt().recip(), phase);
            let d_dx = value * Complex64::new(-0.5 / x, k - k * s * s / (2.0 * x * x));
            let d_dy = value * (i * (k * s / x));
            Ok(FieldSample { value, d_dx, d_dy })
        }
    }
}

/// ψ_one^(slit)(x, y) with analytic gradient.
pub fn one_slit_amplitude(params: &PhysicsParams, slit: Slit, x: f64, y: f64) -> Result<FieldSample> {
    profile(params, x, slit.shifted(params, y))
}

/// Φ(x, y) = ψ₁ + ψ₂ with analytic gradient.
pub fn two_slit_amplitude(params: &PhysicsParams, x: f64, y: f64) -> Result<FieldSample> {
    Ok(one_slit_amplitude(params, Slit::First, x, y)?
        + one_slit_amplitude(params, Slit::Second, x, y)?)
}

/// c₁ψ₁ + c₂ψ₂ with analytic gradient. The weights are not normalized.
pub fn weighted_amplitude(
    params: &PhysicsParams,
    c1: Complex64,
    c2: Complex64,
    x: f64,
    y: f64,
) -> Result<FieldSample> {
    if c1 == Complex64::new(0.0, 0.0) && c2 == Complex64::new(0.0, 0.0) {
        return Err(SlitError::domain("weights (c1, c2) must not both be zero"));
    }
    Ok(one_slit_amplitude(params, Slit::First, x, y)?.scale(c1)
        + one_slit_amplitude(params, Slit::Second, x, y)?.scale(c2))
}
