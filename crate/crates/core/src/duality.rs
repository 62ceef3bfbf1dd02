//! Fringe visibility, which-path predictability and the P² + V² ≤ 1 relation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SlitError};
use crate::field::{one_slit_amplitude, Slit, WaveField};
use crate::params::PhysicsParams;
use crate::quad::trapezoid;
use crate::slice::{check_strictly_increasing, intensity_slice, SliceSample};

/// Minimum grid points per expected fringe period.
pub const MIN_POINTS_PER_PERIOD: f64 = 16.0;

/// Weights scaled so that |c1|² + |c2|² = 1.
pub fn normalize_weights(c1: Complex64, c2: Complex64) -> Result<(Complex64, Complex64)> {
    if !(c1.is_finite() && c2.is_finite()) {
        return Err(SlitError::domain("weights must be finite"));
    }
    let n = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
    if n == 0.0 {
        return Err(SlitError::domain("weights (c1, c2) must not both be zero"));
    }
    Ok((c1 / n, c2 / n))
}

/// P = ||c1|² − |c2|²| of the normalized weights.
pub fn predictability(c1: Complex64, c2: Complex64) -> Result<f64> {
    let (c1, c2) = normalize_weights(c1, c2)?;
    Ok((c1.norm_sqr() - c2.norm_sqr()).abs().min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Extremum {
    y: f64,
    value: f64,
    is_max: bool,
}

/// Discrete interior extrema refined by a parabola through three samples.
fn extrema(y: &[f64], v: &[f64]) -> Vec<Extremum> {
    let mut out = Vec::new();
    for i in 1..v.len().saturating_sub(1) {
        let (l, c, r) = (v[i - 1], v[i], v[i + 1]);
        let is_max = c > l && c >= r;
        let is_min = c < l && c <= r;
        if !(is_max || is_min) {
            continue;
        }
        let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
        // vertex of the interpolating parabola on a possibly uneven stencil
        let d1 = (c - l) / (y1 - y0);
        let d2 = (r - c) / (y2 - y1);
        let curv = (d2 - d1) / (y2 - y0);
        let (ye, ve) = if curv != 0.0 {
            let slope_mid = d1 + curv * (y1 - y0);
            let ye = (y1 - slope_mid / (2.0 * curv)).clamp(y0, y2);
            let ve = c + slope_mid * (ye - y1) + curv * (ye - y1) * (ye - y1);
            (ye, ve)
        } else {
            (y1, c)
        };
        let ve = if is_max { ve.max(c) } else { ve.min(c).max(0.0) };
        out.push(Extremum { y: ye, value: ve, is_max });
    }
    out
}

/// Central-fringe visibility of `slice`.
///
/// The minimum of the central (max, min) pair is compared with the maxima
/// on either side of it, interpolated linearly to the minimum's position.
/// This removes the first-order effect of a sloping envelope and is exact
/// for a pure cosine fringe. Without an interior minimum V = 0.
pub fn visibility(slice: &SliceSample, expected_period: f64) -> Result<f64> {
    let y = &slice.y_grid;
    check_strictly_increasing(y)?;
    if !(expected_period.is_finite() && expected_period > 0.0) {
        return Err(SlitError::domain("expected fringe period must be positive"));
    }
    if y.len() < 3 {
        return Err(SlitError::Resolution("slice needs at least three samples".into()));
    }
    let span = y[y.len() - 1] - y[0];
    if span < expected_period {
        return Err(SlitError::Resolution(format!(
            "slice width {span} covers less than one fringe period {expected_period}"
        )));
    }
    let widest = y.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if widest * MIN_POINTS_PER_PERIOD > expected_period * (1.0 + 1e-12) {
        return Err(SlitError::Resolution(format!(
            "grid spacing {widest} exceeds period/{MIN_POINTS_PER_PERIOD} = {}",
            expected_period / MIN_POINTS_PER_PERIOD
        )));
    }
    let ext = extrema(y, &slice.intensity);
    let Some(center) = (0..ext.len()).min_by(|&i, &j| ext[i].y.abs().total_cmp(&ext[j].y.abs())) else {
        return Ok(0.0);
    };
    let min_index = if !ext[center].is_max {
        Some(center)
    } else {
        // adjacent minimum nearer the axis
        let cand = [center.checked_sub(1), Some(center + 1).filter(|&i| i < ext.len())];
        cand.into_iter()
            .flatten()
            .filter(|&i| !ext[i].is_max)
            .min_by(|&i, &j| ext[i].y.abs().total_cmp(&ext[j].y.abs()))
    };
    let Some(m) = min_index else {
        return Ok(0.0);
    };
    let lo = m.checked_sub(1).map(|i| ext[i]).filter(|e| e.is_max);
    let hi = ext.get(m + 1).copied().filter(|e| e.is_max);
    let i_min = ext[m].value;
    let i_max = match (lo, hi) {
        (Some(a), Some(b)) => a.value + (b.value - a.value) * (ext[m].y - a.y) / (b.y - a.y),
        (Some(a), None) | (None, Some(a)) => a.value,
        (None, None) => return Ok(0.0),
    };
    if i_max + i_min <= 0.0 {
        return Ok(0.0);
    }
    Ok(((i_max - i_min) / (i_max + i_min)).clamp(0.0, 1.0))
}

/// [`visibility`] with the period πL/(ka) implied by `params`.
pub fn slice_visibility(params: &PhysicsParams, slice: &SliceSample) -> Result<f64> {
    visibility(slice, params.fringe_period(slice.l))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DualityReport {
    pub c1: [f64; 2],
    pub c2: [f64; 2],
    #[serde(rename = "V")]
    pub visibility: f64,
    #[serde(rename = "P")]
    pub predictability: f64,
    pub duality_sum: f64,
    /// ∫ 2Re(c̄₁ψ̄₁ c₂ψ₂) over the grid, trapezoid rule.
    pub deficit_integral: f64,
}

pub fn duality_report(
    params: &PhysicsParams,
    c1: Complex64,
    c2: Complex64,
    l: f64,
    y_grid: &[f64],
) -> Result<DualityReport> {
    let (c1, c2) = normalize_weights(c1, c2)?;
    let field = WaveField::weighted(*params, c1, c2)?;
    let slice = intensity_slice(&field, l, y_grid)?;
    let v = slice_visibility(params, &slice)?;
    let p = predictability(c1, c2)?;
    let cross = y_grid
        .iter()
        .map(|&y| {
            let a = one_slit_amplitude(params, Slit::First, l, y)?.value * c1;
            let b = one_slit_amplitude(params, Slit::Second, l, y)?.value * c2;
            Ok(2.0 * (a.conj() * b).re)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DualityReport {
        c1: [c1.re, c1.im],
        c2: [c2.re, c2.im],
        visibility: v,
        predictability: p,
        duality_sum: p * p + v * v,
        deficit_integral: trapezoid(y_grid, &cross),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InterferenceDeficit {
    pub l: f64,
    pub y_grid: Vec<f64>,
    /// |Φ|² − |ψ₁|² − |ψ₂|² at each grid point.
    pub pointwise: Vec<f64>,
    pub integral: f64,
}

pub fn interference_deficit(params: &PhysicsParams, l: f64, y_grid: &[f64]) -> Result<InterferenceDeficit> {
    check_strictly_increasing(y_grid)?;
    let pointwise = y_grid
        .iter()
        .map(|&y| {
            let a = one_slit_amplitude(params, Slit::First, l, y)?.value;
            let b = one_slit_amplitude(params, Slit::Second, l, y)?.value;
            Ok((a + b).norm_sqr() - a.norm_sqr() - b.norm_sqr())
        })
        .collect::<Result<Vec<f64>>>()?;
    let integral = trapezoid(y_grid, &pointwise);
    Ok(InterferenceDeficit { l, y_grid: y_grid.to_vec(), pointwise, integral })
}

/// Nine weight pairs from |c1|² = 0.1 to 0.9 with varied relative phase.
pub fn weight_sweep() -> Vec<(Complex64, Complex64)> {
    (1..=9)
        .map(|i| {
            let w = i as f64 / 10.0;
            let phase = 0.37 * (i as f64 - 5.0);
            (Complex64::new(w.sqrt(), 0.0), Complex64::from_polar((1.0 - w).sqrt(), phase))
        })
        .collect()
}
