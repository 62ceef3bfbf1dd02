//! Mirror-paired one-slit trajectory ensembles and the tangent swap.
//!
//! Each pair is a current line of ψ₁ and its reflection through y = 0,
//! which is a current line of ψ₂. Where the pair crosses the symmetry line
//! the swap exchanges the labels, giving two curves that touch y = 0
//! tangentially and never leave their half-planes: ŷ_lower = −|y₁| and
//! ŷ_upper = +|y₁|.

use serde::Serialize;

use crate::error::{Result, SlitError};
use crate::field::{FieldKind, Side, Slit, WaveField};
use crate::interp::MonotoneCubic;
use crate::params::{Model, PhysicsParams};
use crate::slice::linspace;
use crate::trajectory::{integrate_batch, launch_grid, IntegratorSettings, Trajectory};

/// Samples on the common x grid used for resampling.
pub const DEFAULT_GRID_SAMPLES: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MirrorPair {
    pub id: usize,
    /// Current line of ψ₁.
    pub traj1: Trajectory,
    /// Reflection of `traj1`, a current line of ψ₂.
    pub traj2: Trajectory,
    pub x_grid: Vec<f64>,
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    /// Abscissae where `traj1` (and so `traj2`) crosses y = 0.
    pub crossings: Vec<Crossing>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Crossing {
    pub x: f64,
    /// +1 when crossing from y < 0 to y > 0, −1 otherwise.
    pub direction: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SwappedPair {
    pub id: usize,
    pub x_grid: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Swapped polylines with the crossing points (x*, 0) inserted.
    pub lower_polyline: Vec<(f64, f64)>,
    pub upper_polyline: Vec<(f64, f64)>,
    pub crossings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Ensemble {
    pub pairs: Vec<MirrorPair>,
    /// Launch points whose ψ₁ trajectory did not complete, with the status.
    pub excluded: Vec<ExcludedLaunch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExcludedLaunch {
    pub start: (f64, f64),
    pub reason: String,
}

/// Launch window around slit 1 at `x0`.
pub fn slit_launch_window(params: &PhysicsParams, x0: f64) -> (f64, f64) {
    let c = Slit::First.center(params);
    let half = match params.model() {
        Model::Gaussian => 6.0 * params.beam_width(x0),
        // the point kernel has flat intensity; use one fringe spacing
        Model::Point => params.fringe_period(x0),
    };
    (c - half, c + half)
}

/// Builds `n` mirror pairs launched at the ψ₁ intensity quantiles at `x0`.
pub fn hidden_pair_ensemble(
    params: &PhysicsParams,
    n: usize,
    x0: f64,
    x_end: f64,
    settings: &IntegratorSettings,
) -> Result<Ensemble> {
    hidden_pair_ensemble_with(params, n, x0, x_end, settings, slit_launch_window(params, x0), DEFAULT_GRID_SAMPLES)
}

pub fn hidden_pair_ensemble_with(
    params: &PhysicsParams,
    n: usize,
    x0: f64,
    x_end: f64,
    settings: &IntegratorSettings,
    window: (f64, f64),
    grid_samples: usize,
) -> Result<Ensemble> {
    if n == 0 {
        return Ok(Ensemble { pairs: Vec::new(), excluded: Vec::new() });
    }
    if grid_samples < 2 {
        return Err(SlitError::domain("common grid needs at least two samples"));
    }
    let field = WaveField::one_slit(*params, Slit::First);
    let starts = launch_grid(&field, x0, Side::Both, n, window)?;
    let x_grid = linspace(x0, x_end, grid_samples);
    let mut pairs = Vec::with_capacity(n);
    let mut excluded = Vec::new();
    for (start, result) in starts.iter().zip(integrate_batch(&field, &starts, x_end, settings)) {
        let traj1 = match result {
            Ok(t) if t.is_completed() => t,
            Ok(t) => {
                excluded.push(ExcludedLaunch { start: *start, reason: format!("{:?}", t.status) });
                continue;
            }
            Err(e) => {
                excluded.push(ExcludedLaunch { start: *start, reason: e.to_string() });
                continue;
            }
        };
        pairs.push(build_pair(pairs.len(), traj1, &x_grid)?);
    }
    Ok(Ensemble { pairs, excluded })
}

/// Pairs a completed ψ₁ trajectory with its reflection on a common grid.
pub fn build_pair(id: usize, traj1: Trajectory, x_grid: &[f64]) -> Result<MirrorPair> {
    let interp = traj1
        .interpolant()
        .ok_or_else(|| SlitError::domain("trajectory needs at least two points"))?;
    let y1 = x_grid
        .iter()
        .map(|&x| interp.eval(x).ok_or_else(|| SlitError::domain(format!("x = {x} outside trajectory range"))))
        .collect::<Result<Vec<f64>>>()?;
    let y2 = y1.iter().map(|y| -y).collect();
    let crossings = detect_crossings_signed(&traj1);
    let traj2 = traj1.reflected();
    Ok(MirrorPair { id, traj1, traj2, x_grid: x_grid.to_vec(), y1, y2, crossings })
}

/// Refined abscissae of sign changes of y along the trajectory.
pub fn detect_crossings(traj: &Trajectory) -> Vec<f64> {
    detect_crossings_signed(traj).into_iter().map(|c| c.x).collect()
}

/// Like [`detect_crossings`] with the direction of each crossing.
///
/// A vertex lying exactly on y = 0 counts only if the neighbours on either
/// side have opposite signs; touching the line is not a crossing.
pub fn detect_crossings_signed(traj: &Trajectory) -> Vec<Crossing> {
    let pts = &traj.points;
    let Some(interp) = traj.interpolant() else {
        return Vec::new();
    };
    let scale = pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let tol = 1e-10 * scale;
    let mut out = Vec::new();
    // walk over runs of exact zeros between nonzero vertices
    let mut last_nonzero: Option<usize> = None;
    for i in 0..pts.len() {
        let y = pts[i].1;
        if y == 0.0 {
            continue;
        }
        if let Some(j) = last_nonzero {
            let yj = pts[j].1;
            if yj.signum() != y.signum() {
                let direction = if y > 0.0 { 1 } else { -1 };
                let x = if i == j + 1 {
                    bisect(&interp, pts[j].0, pts[i].0, tol)
                } else {
                    // zero vertices in between: the first one is the crossing
                    pts[j + 1].0
                };
                out.push(Crossing { x, direction });
            }
        }
        last_nonzero = Some(i);
    }
    out
}

fn bisect(interp: &MonotoneCubic, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let eval = |x: f64| interp.eval(x).unwrap_or(0.0);
    let s_lo = eval(lo).signum();
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let f_mid = eval(mid);
        if f_mid == 0.0 || (f_mid.abs() <= tol && hi - lo <= 1e-12 * mid.abs().max(1.0)) {
            return mid;
        }
        if f_mid.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Exchanges the pair's labels at every crossing.
pub fn tangent_swap(pair: &MirrorPair) -> SwappedPair {
    let lower: Vec<f64> = pair.y1.iter().map(|y| -y.abs()).collect();
    let upper: Vec<f64> = pair.y1.iter().map(|y| y.abs()).collect();
    let crossings: Vec<f64> = pair.crossings.iter().map(|c| c.x).collect();
    let mut upper_polyline: Vec<(f64, f64)> = pair.x_grid.iter().copied().zip(upper.iter().copied()).collect();
    for &x in &crossings {
        if !pair.x_grid.contains(&x) {
            upper_polyline.push((x, 0.0));
        }
    }
    upper_polyline.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lower_polyline = upper_polyline.iter().map(|&(x, y)| (x, -y)).collect();
    SwappedPair {
        id: pair.id,
        x_grid: pair.x_grid.clone(),
        lower,
        upper,
        lower_polyline,
        upper_polyline,
        crossings,
    }
}

/// |y₁(x)| evaluated on the raw ψ₁ polyline, the swapped upper curve at
/// arbitrary x.
pub fn swapped_upper_at(pair: &MirrorPair, x: f64) -> Option<f64> {
    pair.traj1.interpolant()?.eval(x).map(f64::abs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OccupancyRow {
    pub slice: usize,
    pub lower: usize,
    pub upper: usize,
}

/// y ≤ 0 side, with a signed zero deciding points exactly on the line.
fn is_lower(y: f64) -> bool {
    y < 0.0 || (y == 0.0 && y.is_sign_negative())
}

fn count_rows(curves: &[(Vec<f64>, Vec<f64>)], x_grid: &[f64], x_slices: &[f64]) -> Result<Vec<OccupancyRow>> {
    let interps = curves
        .iter()
        .map(|(a, b)| Ok((MonotoneCubic::new(x_grid, a)?, MonotoneCubic::new(x_grid, b)?)))
        .collect::<Result<Vec<_>>>()?;
    x_slices
        .iter()
        .enumerate()
        .map(|(slice, &x)| {
            let mut row = OccupancyRow { slice, lower: 0, upper: 0 };
            for (a, b) in &interps {
                for c in [a, b] {
                    let y = c
                        .eval(x)
                        .ok_or_else(|| SlitError::domain(format!("slice x = {x} outside the common grid")))?;
                    if is_lower(y) {
                        row.lower += 1;
                    } else {
                        row.upper += 1;
                    }
                }
            }
            Ok(row)
        })
        .collect()
}

/// Per-slice counts of raw pair members in each half-plane.
pub fn ensemble_occupancy(pairs: &[MirrorPair], x_slices: &[f64]) -> Result<Vec<OccupancyRow>> {
    let Some(first) = pairs.first() else {
        return Ok(x_slices.iter().enumerate().map(|(slice, _)| OccupancyRow { slice, lower: 0, upper: 0 }).collect());
    };
    let curves: Vec<_> = pairs.iter().map(|p| (p.y1.clone(), p.y2.clone())).collect();
    count_rows(&curves, &first.x_grid, x_slices)
}

/// Per-slice counts for swapped pairs.
pub fn swapped_occupancy(pairs: &[SwappedPair], x_slices: &[f64]) -> Result<Vec<OccupancyRow>> {
    let Some(first) = pairs.first() else {
        return Ok(x_slices.iter().enumerate().map(|(slice, _)| OccupancyRow { slice, lower: 0, upper: 0 }).collect());
    };
    let curves: Vec<_> = pairs.iter().map(|p| (p.lower.clone(), p.upper.clone())).collect();
    count_rows(&curves, &first.x_grid, x_slices)
}

/// Net signed crossings of y = 0 by both members of the pair, up to `x`.
pub fn net_pair_crossings(pair: &MirrorPair, x: f64) -> i32 {
    let one: i32 = pair.crossings.iter().filter(|c| c.x <= x).map(|c| c.direction as i32).sum();
    let two: i32 = detect_crossings_signed(&pair.traj2)
        .iter()
        .filter(|c| c.x <= x)
        .map(|c| c.direction as i32)
        .sum();
    one + two
}

/// Integrates ψ₂ from the mirrored start and reports the largest deviation
/// from the reflected trajectory on the common grid.
pub fn mirror_cross_check(params: &PhysicsParams, pair: &MirrorPair, settings: &IntegratorSettings) -> Result<f64> {
    let field = WaveField::one_slit(*params, Slit::Second);
    let x_end = *pair.x_grid.last().expect("non-empty grid");
    let t = crate::trajectory::integrate_trajectory(&field, (pair.traj2.start_x, pair.traj2.start_y), x_end, settings)?;
    let interp = t.interpolant().ok_or_else(|| SlitError::domain("independent trajectory too short"))?;
    let mut dev = 0.0f64;
    for (&x, &y2) in pair.x_grid.iter().zip(&pair.y2) {
        match interp.eval(x) {
            Some(y) => dev = dev.max((y - y2).abs()),
            None => return Err(SlitError::domain("independent trajectory did not reach the grid end")),
        }
    }
    Ok(dev)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EndpointComparison {
    pub swapped_count: usize,
    pub bohmian_count: usize,
    pub swapped_mean: f64,
    pub bohmian_mean: f64,
    /// Two-sample Kolmogorov–Smirnov statistic of the endpoint samples.
    pub ks_statistic: f64,
}

/// Compares swapped upper endpoints with Bohmian endpoints of ψ_upper.
///
/// Diagnostic only: the swapped curves carry one-slit densities, which lack
/// the interference term.
pub fn endpoint_comparison(swapped: &[SwappedPair], bohmian: &[Trajectory]) -> EndpointComparison {
    let mut a: Vec<f64> = swapped.iter().filter_map(|p| p.upper.last().copied()).collect();
    let mut b: Vec<f64> = bohmian.iter().filter(|t| t.is_completed()).map(|t| t.end().1).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    EndpointComparison {
        swapped_count: a.len(),
        bohmian_count: b.len(),
        swapped_mean: mean(&a),
        bohmian_mean: mean(&b),
        ks_statistic: ks_two_sample(&a, &b),
    }
}

fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::NAN;
    }
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Bohmian trajectories of ψ_upper (two-slit lines launched in y > 0).
pub fn upper_substate_field(params: PhysicsParams) -> WaveField {
    WaveField { kind: FieldKind::RestrictedUpper, params }
}
