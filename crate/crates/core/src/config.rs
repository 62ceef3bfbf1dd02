//! Strict JSON run configuration.
//!
//! Unknown keys are rejected. Omitted optional keys receive defaults that
//! depend on the physics parameters; the resolved configuration serializes
//! back to a canonical JSON document containing every key.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SlitError};
use crate::params::{Model, PhysicsParams};
use crate::trajectory::IntegratorSettings;

/// Keys accepted in `tolerancesOverride`, one per verification criterion.
pub const TOLERANCE_KEYS: [&str; 8] = [
    "zeroCurrent",
    "mirror",
    "additivity",
    "nonAdditivity",
    "integrator",
    "gradient",
    "duality",
    "flux",
];

pub const DEFAULT_SIGMA: f64 = 0.25;
pub const DEFAULT_TRAJECTORIES: usize = 64;
pub const DEFAULT_OUTPUT_DIR: &str = "slitlab-out";
/// Minimum grid points per fringe period when `gridN` is derived.
pub const DEFAULT_POINTS_PER_PERIOD: f64 = 256.0;
pub const DEFAULT_MIN_GRID: usize = 1025;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub c1re: f64,
    pub c1im: f64,
    pub c2re: f64,
    pub c2im: f64,
}

impl Weights {
    pub fn c1(&self) -> Complex64 {
        Complex64::new(self.c1re, self.c1im)
    }

    pub fn c2(&self) -> Complex64 {
        Complex64::new(self.c2re, self.c2im)
    }
}

impl Default for Weights {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Weights { c1re: h, c1im: 0.0, c2re: h, c2im: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct TrajectoryConfig {
    pub n: usize,
    pub x0: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub node_floor: f64,
}

impl TrajectoryConfig {
    pub fn settings(&self) -> IntegratorSettings {
        IntegratorSettings {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            node_floor: self.node_floor,
        }
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: Model,
    #[serde(rename = "E")]
    pub energy: f64,
    pub a: f64,
    pub sigma: f64,
    #[serde(rename = "xMin")]
    pub x_min: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "yWindow")]
    pub y_window: [f64; 2],
    #[serde(rename = "gridN")]
    pub grid_n: usize,
    pub trajectories: TrajectoryConfig,
    pub weights: Weights,
    #[serde(rename = "outputDir")]
    pub output_dir: PathBuf,
    #[serde(rename = "tolerancesOverride")]
    pub tolerances_override: BTreeMap<String, f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawTrajectories {
    n: Option<usize>,
    x0: Option<f64>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_step: Option<f64>,
    node_floor: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<Model>,
    #[serde(rename = "E")]
    energy: Option<f64>,
    a: Option<f64>,
    sigma: Option<f64>,
    #[serde(rename = "xMin")]
    x_min: Option<f64>,
    #[serde(rename = "L")]
    l: Option<f64>,
    #[serde(rename = "yWindow")]
    y_window: Option<[f64; 2]>,
    #[serde(rename = "gridN")]
    grid_n: Option<usize>,
    trajectories: Option<RawTrajectories>,
    weights: Option<Weights>,
    #[serde(rename = "outputDir")]
    output_dir: Option<PathBuf>,
    #[serde(rename = "tolerancesOverride")]
    tolerances_override: Option<BTreeMap<String, f64>>,
}

fn required<T>(v: Option<T>, path: &str) -> Result<T> {
    v.ok_or_else(|| SlitError::config(path, "required key is missing"))
}

fn positive(v: f64, path: &str) -> Result<f64> {
    if !v.is_finite() {
        return Err(SlitError::config(path, format!("must be finite, got {v}")));
    }
    if v <= 0.0 {
        return Err(SlitError::config(path, format!("must be > 0, got {v}")));
    }
    Ok(v)
}

/// Parses and validates a configuration document.
pub fn load_config(text: &[u8]) -> Result<Config> {
    let text = std::str::from_utf8(text).map_err(|e| SlitError::config("", format!("not UTF-8: {e}")))?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        SlitError::config(path, e.into_inner().to_string())
    })?;
    resolve(raw)
}

fn resolve(raw: RawConfig) -> Result<Config> {
    let model = required(raw.model, "model")?;
    let energy = positive(required(raw.energy, "E")?, "E")?;
    let a = positive(required(raw.a, "a")?, "a")?;
    let sigma = positive(raw.sigma.unwrap_or(DEFAULT_SIGMA), "sigma")?;
    let k = (2.0 * energy).sqrt();
    let x_min = positive(raw.x_min.unwrap_or(1e-2 * k * sigma * sigma), "xMin")?;
    let params = PhysicsParams::new(energy, a, sigma, model, x_min).map_err(|e| SlitError::config("", e.to_string()))?;
    let l = required(raw.l, "L")?;
    if !l.is_finite() || l <= params.domain_start() {
        return Err(SlitError::config("L", format!("must be finite and > {}, got {l}", params.domain_start())));
    }

    let y_window = match raw.y_window {
        Some(w) => w,
        None => {
            let h = default_half_window(&params, l);
            [-h, h]
        }
    };
    if !(y_window[0].is_finite() && y_window[1].is_finite()) || y_window[0] >= y_window[1] {
        return Err(SlitError::config("yWindow", "must be two finite values with ymin < ymax"));
    }
    let grid_n = match raw.grid_n {
        Some(n) => n,
        None => default_grid_n(&params, l, y_window),
    };
    if grid_n < 3 {
        return Err(SlitError::config("gridN", format!("must be >= 3, got {grid_n}")));
    }

    let t = raw.trajectories.unwrap_or_default();
    let n = t.n.unwrap_or(DEFAULT_TRAJECTORIES);
    if n == 0 {
        return Err(SlitError::config("trajectories.n", "must be >= 1"));
    }
    let x0 = t.x0.unwrap_or_else(|| default_x0(&params, l));
    if !x0.is_finite() || x0 < params.domain_start() || x0 >= l {
        return Err(SlitError::config(
            "trajectories.x0",
            format!("must lie in [{}, L), got {x0}", params.domain_start()),
        ));
    }
    let rel_tol = positive(t.rel_tol.unwrap_or(1e-8), "trajectories.relTol")?;
    if rel_tol < 1e-12 {
        return Err(SlitError::config("trajectories.relTol", format!("must be >= 1e-12, got {rel_tol}")));
    }
    let trajectories = TrajectoryConfig {
        n,
        x0,
        rel_tol,
        abs_tol: positive(t.abs_tol.unwrap_or(1e-10 * params.transverse_scale(l)), "trajectories.absTol")?,
        max_step: positive(t.max_step.unwrap_or((l - x0) / 100.0), "trajectories.maxStep")?,
        node_floor: positive(t.node_floor.unwrap_or(1e-10), "trajectories.nodeFloor")?,
    };

    let weights = raw.weights.unwrap_or_default();
    for (name, v) in [("c1re", weights.c1re), ("c1im", weights.c1im), ("c2re", weights.c2re), ("c2im", weights.c2im)] {
        if !v.is_finite() {
            return Err(SlitError::config(format!("weights.{name}"), "must be finite"));
        }
    }
    if weights.c1().norm_sqr() + weights.c2().norm_sqr() == 0.0 {
        return Err(SlitError::config("weights", "c1 and c2 must not both be zero"));
    }

    let tolerances_override = raw.tolerances_override.unwrap_or_default();
    for (key, &v) in &tolerances_override {
        if !TOLERANCE_KEYS.contains(&key.as_str()) {
            return Err(SlitError::config(
                format!("tolerancesOverride.{key}"),
                format!("unknown tolerance; expected one of {}", TOLERANCE_KEYS.join(", ")),
            ));
        }
        positive(v, &format!("tolerancesOverride.{key}"))?;
    }

    let output_dir = raw.output_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    if output_dir.as_os_str().is_empty() {
        return Err(SlitError::config("outputDir", "must not be empty"));
    }

    Ok(Config {
        model,
        energy,
        a,
        sigma,
        x_min,
        l,
        y_window,
        grid_n,
        trajectories,
        weights,
        output_dir,
        tolerances_override,
    })
}

/// Detection half-window: six beam widths beyond the slit for the Gaussian
/// model, three fringe periods for the point model.
pub fn default_half_window(params: &PhysicsParams, l: f64) -> f64 {
    match params.model() {
        Model::Gaussian => params.a() + 6.0 * params.beam_width(l),
        Model::Point => 3.0 * params.fringe_period(l),
    }
}

/// Odd grid size with at least [`DEFAULT_POINTS_PER_PERIOD`] samples per
/// fringe period and no fewer than [`DEFAULT_MIN_GRID`].
pub fn default_grid_n(params: &PhysicsParams, l: f64, window: [f64; 2]) -> usize {
    let per_period = (window[1] - window[0]) / params.fringe_period(l) * DEFAULT_POINTS_PER_PERIOD;
    let n = (per_period.ceil() as usize + 1).max(DEFAULT_MIN_GRID);
    n | 1
}

/// Launch abscissa: the aperture for the Gaussian model, x = 4a for the
/// point model.
pub fn default_x0(params: &PhysicsParams, l: f64) -> f64 {
    match params.model() {
        Model::Gaussian => 0.0,
        Model::Point => (4.0 * params.a()).max(params.x_min()).min(0.5 * (params.x_min() + l)),
    }
}

/// Launch window at `x0` for two-slit trajectories. For the point model the
/// window |y| <= x0/4 keeps launch angles small; wider lines turn backwards
/// (v_x = k(1 − (y² + a²)/2x²) for a single kernel).
pub fn launch_window(params: &PhysicsParams, x0: f64) -> (f64, f64) {
    let h = match params.model() {
        Model::Gaussian => params.a() + 6.0 * params.beam_width(x0),
        Model::Point => 0.25 * x0,
    };
    (-h, h)
}

impl Config {
    /// The desk configuration: Gaussian model, E = 0.5, a = 1, σ = 0.25, L = 5.
    pub fn desk_default() -> Config {
        load_config(br#"{"model":"gaussian","E":0.5,"a":1.0,"sigma":0.25,"L":5.0}"#)
            .expect("built-in defaults are valid")
    }

    pub fn params(&self) -> PhysicsParams {
        PhysicsParams::new(self.energy, self.a, self.sigma, self.model, self.x_min)
            .expect("validated at load time")
    }

    pub fn y_grid(&self) -> Vec<f64> {
        let [lo, hi] = self.y_window;
        if lo == -hi {
            crate::slice::symmetric_grid(hi, self.grid_n)
        } else {
            crate::slice::linspace(lo, hi, self.grid_n)
        }
    }

    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances_override.get(key).copied().unwrap_or(default)
    }

    /// Canonical JSON: every key present, keys sorted, two-space indent.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        serde_json::to_string_pretty(&value).expect("value serializes")
    }

    /// SHA-256 of the compact canonical JSON, lowercase hex.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let digest = Sha256::digest(value.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_path(text: &str) -> String {
        match load_config(text.as_bytes()) {
            Err(SlitError::Config { path, .. }) => path,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = load_config(br#"{"model":"gaussian","E":0.5,"a":1.0,"sigma":0.25,"L":5.0}"#).unwrap();
        assert_eq!(c.trajectories.n, DEFAULT_TRAJECTORIES);
        assert_eq!(c.output_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
        assert_eq!(c.y_window[0], -c.y_window[1]);
        assert!(c.grid_n % 2 == 1 && c.grid_n >= DEFAULT_MIN_GRID);
        assert_eq!(c.trajectories.x0, 0.0);
        assert_eq!(c.weights, Weights::default());
    }

    #[test]
    fn negative_energy_reports_path() {
        let text = r#"{"model":"gaussian","E":-1,"a":1.0,"L":5.0}"#;
        assert_eq!(err_path(text), "E");
        match load_config(text.as_bytes()) {
            Err(SlitError::Config { reason, .. }) => assert!(reason.contains("> 0")),
            _ => unreachable!(),
        }
    }

    #[test]
    fn point_model_default_x_min() {
        let c = load_config(br#"{"model":"point","E":50,"a":1.0,"L":5.0}"#).unwrap();
        assert!((c.x_min - 1e-2 * 10.0 * 0.0625).abs() < 1e-15);
        assert_eq!(c.trajectories.x0, 0.5 * (c.x_min + 5.0));
    }

    #[test]
    fn unknown_and_mistyped_keys() {
        assert_eq!(err_path(r#"{"model":"gaussian","E":0.5,"a":1,"L":5,"sigmaa":1}"#), "sigmaa");
        assert_eq!(err_path(r#"{"model":"gaussian","E":0.5,"a":1,"L":5,"trajectories":{"relTl":1}}"#), "trajectories.relTl");
        assert_eq!(err_path(r#"{"model":"gaussian","E":"x","a":1,"L":5}"#), "E");
        assert_eq!(err_path(r#"{"model":"wave","E":0.5,"a":1,"L":5}"#), "model");
        assert_eq!(err_path(r#"{"model":"gaussian","E":0.5,"a":1}"#), "L");
        assert_eq!(
            err_path(r#"{"model":"gaussian","E":0.5,"a":1,"L":5,"tolerancesOverride":{"bogus":1}}"#),
            "tolerancesOverride.bogus"
        );
        assert_eq!(err_path(r#"{"model":"gaussian","E":0.5,"a":1,"L":5,"trajectories":{"x0":6}}"#), "trajectories.x0");
        assert_eq!(err_path(r#"{"model":"gaussian","E":0.5,"a":1,"L":5,"yWindow":[1,0]}"#), "yWindow");
    }

    #[test]
    fn canonical_round_trip() {
        let text = br#"{"model":"point","E":50,"a":1.0,"L":100.0,"weights":{"c1re":0.3,"c1im":0.1,"c2re":0.9,"c2im":0.0},
            "tolerancesOverride":{"gradient":1e-5}}"#;
        let c = load_config(text).unwrap();
        let again = load_config(c.canonical_json().as_bytes()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.canonical_json(), again.canonical_json());
        assert_eq!(c.hash(), again.hash());
        assert_eq!(c.hash().len(), 64);
        assert_ne!(c.hash(), Config::desk_default().hash());
    }

    #[test]
    fn desk_grid_resolves_fringes() {
        let c = Config::desk_default();
        let p = c.params();
        let g = c.y_grid();
        let dy = g[1] - g[0];
        assert!(dy * 16.0 <= p.fringe_period(c.l));
        assert_eq!(g[g.len() / 2], 0.0);
    }
}
