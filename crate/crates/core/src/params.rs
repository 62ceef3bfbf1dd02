//! Physical parameters of the symmetric two-slit setting.
//!
//! Units are ħ = m = 1, so the wavenumber is k = √(2E) and the probability
//! current is j = Im(ψ* ∇ψ) without prefactors. Slits sit on the lines
//! y = −a (slit 1) and y = +a (slit 2) of the first screen x = 0.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SlitError};

/// Closed-form single-slit profile used to build every field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Paraxial beam from a Gaussian aperture of width σ.
    Gaussian,
    /// Fresnel point-source kernel, the σ → 0 limit; singular at x = 0.
    Point,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Model::Gaussian => write!(f, "gaussian"),
            Model::Point => write!(f, "point"),
        }
    }
}

impl std::str::FromStr for Model {
    type Err = SlitError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Model::Gaussian),
            "point" => Ok(Model::Point),
            other => Err(SlitError::domain(format!("unknown model {other:?}"))),
        }
    }
}

/// Validated physics parameters. Construct with [`PhysicsParams::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    energy: f64,
    k: f64,
    a: f64,
    sigma: f64,
    model: Model,
    x_min: f64,
}

impl PhysicsParams {
    /// `sigma` is only checked for the Gaussian model and `x_min` only for the
    /// point model; both are stored either way.
    pub fn new(energy: f64, a: f64, sigma: f64, model: Model, x_min: f64) -> Result<Self> {
        for (name, v) in [("E", energy), ("a", a), ("sigma", sigma), ("xMin", x_min)] {
            if !v.is_finite() {
                return Err(SlitError::domain(format!("{name} must be finite, got {v}")));
            }
        }
        if energy <= 0.0 {
            return Err(SlitError::domain(format!("E must be > 0, got {energy}")));
        }
        if a <= 0.0 {
            return Err(SlitError::domain(format!("a must be > 0, got {a}")));
        }
        if model == Model::Gaussian && sigma <= 0.0 {
            return Err(SlitError::domain(format!("sigma must be > 0, got {sigma}")));
        }
        if model == Model::Point && x_min <= 0.0 {
            return Err(SlitError::domain(format!("xMin must be > 0, got {x_min}")));
        }
        Ok(PhysicsParams {
            energy,
            k: (2.0 * energy).sqrt(),
            a,
            sigma,
            model,
            x_min,
        })
    }

    /// Gaussian-model parameters; `x_min` is irrelevant and set to zero.
    pub fn gaussian(energy: f64, a: f64, sigma: f64) -> Result<Self> {
        Self::new(energy, a, sigma, Model::Gaussian, 0.0)
    }

    /// Point-model parameters; `sigma` is kept only as a length scale.
    pub fn point(energy: f64, a: f64, x_min: f64) -> Result<Self> {
        Self::new(energy, a, 0.25, Model::Point, x_min)
    }

    /// Energy for a target wavenumber, E = k²/2.
    pub fn energy_for_wavenumber(k: f64) -> f64 {
        0.5 * k * k
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    /// Smallest abscissa at which the model can be evaluated.
    pub fn domain_start(&self) -> f64 {
        match self.model {
            Model::Gaussian => 0.0,
            Model::Point => self.x_min,
        }
    }

    /// Diffraction length kσ² of the Gaussian aperture.
    pub fn rayleigh_length(&self) -> f64 {
        self.k * self.sigma * self.sigma
    }

    /// Intensity 1/e half-width of a single Gaussian beam at `x`, σ|q(x)|.
    pub fn beam_width(&self, x: f64) -> f64 {
        let z = x / self.rayleigh_length();
        self.sigma * (1.0 + z * z).sqrt()
    }

    /// Two-slit fringe spacing πx/(ka) in the far field.
    pub fn fringe_period(&self, x: f64) -> f64 {
        std::f64::consts::PI * x / (self.k * self.a)
    }

    /// Characteristic transverse length at `x`, used to scale tolerances.
    pub fn transverse_scale(&self, x: f64) -> f64 {
        match self.model {
            Model::Gaussian => self.a.max(self.beam_width(x)),
            Model::Point => self.a.max(self.fringe_period(x)),
        }
    }

    pub(crate) fn check_x(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(SlitError::domain(format!("x must be finite, got {x}")));
        }
        let lo = self.domain_start();
        if x < lo {
            return Err(SlitError::domain(format!(
                "x = {x} outside the {} model domain x >= {lo}",
                self.model
            )));
        }
        Ok(())
    }
}
