//! Current-line (Bohmian) trajectories y(x) of a stationary field.
//!
//! Trajectories are parametrized by x: dy/dx = v_y / v_x, valid while
//! v_x > 0. The ODE is integrated with the Dormand–Prince 5(4) pair and the
//! accepted steps form the output polyline.

use rayon::prelude::*;
use serde::Serialize;

use crate::current::velocity_from_sample;
use crate::error::{Result, SlitError};
use crate::field::{Field, Side};
use crate::interp::MonotoneCubic;
use crate::quad::trapezoid;
use crate::slice::linspace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Intensity floor as a fraction of the launch intensity.
    pub node_floor: f64,
}

impl IntegratorSettings {
    /// Defaults for integrating `field` over [x0, x_end].
    pub fn for_range<F: Field + ?Sized>(field: &F, x0: f64, x_end: f64) -> Self {
        IntegratorSettings {
            rel_tol: 1e-8,
            abs_tol: 1e-10 * field.transverse_scale(x_end),
            max_step: (x_end - x0) / 100.0,
            node_floor: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.rel_tol, self.abs_tol, self.max_step, self.node_floor];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(SlitError::domain("integrator settings must all be positive and finite"));
        }
        if self.rel_tol < 1e-12 {
            return Err(SlitError::domain(format!("relTol must be >= 1e-12, got {}", self.rel_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum TrajectoryStatus {
    Completed,
    NodeAbort,
    BackflowAbort,
    DomainAbort,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Trajectory {
    pub start_x: f64,
    pub start_y: f64,
    pub points: Vec<(f64, f64)>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn is_completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn end(&self) -> (f64, f64) {
        *self.points.last().expect("trajectory has at least its start point")
    }

    /// Monotone cubic through the polyline; `None` for a single point.
    pub fn interpolant(&self) -> Option<MonotoneCubic> {
        if self.points.len() < 2 {
            return None;
        }
        MonotoneCubic::new(&self.xs(), &self.ys()).ok()
    }

    /// The trajectory reflected through y = 0.
    pub fn reflected(&self) -> Trajectory {
        Trajectory {
            start_x: self.start_x,
            start_y: -self.start_y,
            points: self.points.iter().map(|&(x, y)| (x, -y)).collect(),
            status: self.status,
        }
    }
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 200_000;

struct Slope<'a, F: ?Sized> {
    field: &'a F,
    min_intensity: f64,
}

impl<F: Field + ?Sized> Slope<'_, F> {
    fn eval(&self, x: f64, y: f64) -> std::result::Result<f64, TrajectoryStatus> {
        let s = self.field.sample(x, y).map_err(|_| TrajectoryStatus::DomainAbort)?;
        let (vx, vy) =
            velocity_from_sample(&s, x, y, self.min_intensity).map_err(|_| TrajectoryStatus::NodeAbort)?;
        if !(vx > 0.0) {
            return Err(TrajectoryStatus::BackflowAbort);
        }
        Ok(vy / vx)
    }
}

/// Integrates the current line through `start` up to `x_end`.
///
/// Hard errors are reserved for invalid input (bad settings, start outside
/// the domain or at a node); everything that happens along the way is
/// reported through [`Trajectory::status`].
pub fn integrate_trajectory<F: Field + ?Sized>(
    field: &F,
    start: (f64, f64),
    x_end: f64,
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    let (x0, y0) = start;
    if !(x0 < x_end) || !x_end.is_finite() || !y0.is_finite() {
        return Err(SlitError::domain(format!("need x0 < xEnd, got {x0} and {x_end}")));
    }
    let launch = field.sample(x0, y0)?;
    let launch_intensity = launch.intensity();
    if !(launch_intensity > 0.0) {
        return Err(SlitError::Node { x: x0, y: y0, intensity: launch_intensity, floor: 0.0 });
    }
    let slope = Slope { field, min_intensity: settings.node_floor * launch_intensity };

    let mut points = vec![(x0, y0)];
    let finish = |points: Vec<(f64, f64)>, status| Trajectory { start_x: x0, start_y: y0, points, status };

    let mut k1 = match slope.eval(x0, y0) {
        Ok(v) => v,
        Err(status) => return Err(abort_error(status, x0, y0)),
    };
    let span = x_end - x0;
    let h_min = 1e-13 * span.max(x0.abs());
    let mut h = settings.max_step.min(span) * 0.1;
    let (mut x, mut y) = (x0, y0);
    let mut last_failure = TrajectoryStatus::NodeAbort;

    for _ in 0..MAX_STEPS {
        let remaining = x_end - x;
        let last = h >= remaining * (1.0 - 1e-12);
        if last {
            h = remaining;
        }
        match dopri_step(&slope, x, y, k1, h) {
            Ok((y_new, err, k7)) => {
                let scale = settings.abs_tol + settings.rel_tol * y.abs().max(y_new.abs());
                let ratio = err / scale;
                if ratio <= 1.0 {
                    x = if last { x_end } else { x + h };
                    y = y_new;
                    k1 = k7;
                    points.push((x, y));
                    if last {
                        return Ok(finish(points, TrajectoryStatus::Completed));
                    }
                    let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                    h = (h * grow).min(settings.max_step);
                } else {
                    h *= (0.9 * ratio.powf(-0.2)).clamp(0.2, 1.0);
                }
            }
            Err(status) => {
                last_failure = status;
                h *= 0.25;
            }
        }
        if h < h_min {
            // the step collapsed; the local failure decides the status and a
            // collapse from accuracy alone means a diverging velocity near a node
            return Ok(finish(points, last_failure));
        }
    }
    Ok(finish(points, TrajectoryStatus::NodeAbort))
}

fn abort_error(status: TrajectoryStatus, x: f64, y: f64) -> SlitError {
    match status {
        TrajectoryStatus::NodeAbort => SlitError::Node { x, y, intensity: 0.0, floor: 0.0 },
        TrajectoryStatus::BackflowAbort => SlitError::domain(format!("v_x <= 0 at launch point ({x}, {y})")),
        _ => SlitError::domain(format!("launch point ({x}, {y}) outside the field domain")),
    }
}

fn dopri_step<F: Field + ?Sized>(
    slope: &Slope<'_, F>,
    x: f64,
    y: f64,
    k1: f64,
    h: f64,
) -> std::result::Result<(f64, f64, f64), TrajectoryStatus> {
    let mut k = [0.0; 7];
    k[0] = k1;
    for s in 1..7 {
        let incr: f64 = (0..s).map(|j| A[s][j] * k[j]).sum();
        k[s] = slope.eval(x + C[s] * h, y + h * incr)?;
    }
    let y_new = y + h * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
    let err = (h * (0..7).map(|j| E[j] * k[j]).sum::<f64>()).abs();
    Ok((y_new, err, k[6]))
}

/// Integrates every start independently (in parallel); output order follows `starts`.
pub fn integrate_batch<F: Field + ?Sized>(
    field: &F,
    starts: &[(f64, f64)],
    x_end: f64,
    settings: &IntegratorSettings,
) -> Vec<Result<Trajectory>> {
    starts
        .par_iter()
        .map(|&s| integrate_trajectory(field, s, x_end, settings))
        .collect()
}

const LAUNCH_GRID_POINTS: usize = 4097;

/// Launch points at the intensity quantiles (i + ½)/n of |ψ(x0, ·)|²
/// restricted to `side` ∩ `window`.
pub fn launch_grid<F: Field + ?Sized>(
    field: &F,
    x0: f64,
    side: Side,
    n: usize,
    window: (f64, f64),
) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(SlitError::domain("launch grid needs n >= 1"));
    }
    let q: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    launch_at_quantiles(field, x0, side, &q, window)
}

/// Launch points at arbitrary quantiles in (0, 1) of the windowed density.
pub fn launch_at_quantiles<F: Field + ?Sized>(
    field: &F,
    x0: f64,
    side: Side,
    quantiles: &[f64],
    window: (f64, f64),
) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = side
        .clip(window)
        .ok_or_else(|| SlitError::domain(format!("empty launch window {window:?} on side {side:?}")))?;
    let ys = linspace(lo, hi, LAUNCH_GRID_POINTS);
    let rho = ys
        .iter()
        .map(|&y| Ok(field.value(x0, y)?.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    let mut cdf = Vec::with_capacity(ys.len());
    cdf.push(0.0);
    for i in 1..ys.len() {
        let prev = cdf[i - 1];
        cdf.push(prev + trapezoid(&ys[i - 1..=i], &rho[i - 1..=i]));
    }
    let total = *cdf.last().unwrap();
    let peak = rho.iter().copied().fold(0.0, f64::max);
    if !(total > 0.0) || !(peak > 0.0) || !total.is_finite() {
        return Err(SlitError::Node { x: x0, y: 0.5 * (lo + hi), intensity: peak, floor: 0.0 });
    }
    quantiles
        .iter()
        .map(|&q| {
            if !(q > 0.0 && q < 1.0) {
                return Err(SlitError::domain(format!("quantile {q} outside (0, 1)")));
            }
            let target = q * total;
            let j = cdf.partition_point(|&c| c <= target).clamp(1, cdf.len() - 1) - 1;
            let h = ys[j + 1] - ys[j];
            let r = (target - cdf[j]) / h;
            let d = rho[j + 1] - rho[j];
            // solve rho_j s + d s²/2 = r for s in [0, 1]
            let disc = (rho[j] * rho[j] + 2.0 * d * r).max(0.0);
            let denom = rho[j] + disc.sqrt();
            let s = if denom > 0.0 { 2.0 * r / denom } else { 0.5 };
            Ok((x0, ys[j] + h * s.clamp(0.0, 1.0)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderingViolation {
    pub slice_index: usize,
    pub x: f64,
    /// Indices into the input array; `below` was launched below `above`.
    pub below: usize,
    pub above: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderingReport {
    pub ok: bool,
    pub first_violation: Option<OrderingViolation>,
}

/// Checks that the launch ordering in y is preserved at every slice.
///
/// Inversions smaller than `2 * abs_tol` are ignored. Trajectories not
/// covering a slice are skipped at that slice.
pub fn ordering_check(trajectories: &[Trajectory], x_slices: &[f64], abs_tol: f64) -> OrderingReport {
    let mut order: Vec<usize> = (0..trajectories.len()).collect();
    order.sort_by(|&i, &j| trajectories[i].start_y.total_cmp(&trajectories[j].start_y));
    let interps: Vec<Option<MonotoneCubic>> = trajectories.iter().map(Trajectory::interpolant).collect();
    for (si, &x) in x_slices.iter().enumerate() {
        let mut prev: Option<(usize, f64)> = None;
        for &i in &order {
            let y = match &interps[i] {
                Some(c) => c.eval(x),
                None if trajectories[i].start_x == x => Some(trajectories[i].start_y),
                None => None,
            };
            let Some(y) = y else { continue };
            if let Some((pi, py)) = prev {
                if py - y >= 2.0 * abs_tol {
                    return OrderingReport {
                        ok: false,
                        first_violation: Some(OrderingViolation { slice_index: si, x, below: pi, above: i }),
                    };
                }
            }
            prev = Some((i, y));
        }
    }
    OrderingReport { ok: true, first_violation: None }
}
