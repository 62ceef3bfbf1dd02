//! Self-check of the acceptance criteria at desk scale.
//!
//! Each criterion recomputes its reference values with an independent
//! method (closed forms, dense trapezoid sums, fixed-step RK4, five-point
//! finite differences) and reports the measured discrepancy against its
//! tolerance. The report contains no timings, so it is reproducible.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Config;
use crate::current::CurrentVector;
use crate::decomposition::{compare_patterns, image_field, norm_accounting, transmitted_flux_full, Boundary};
use crate::duality::{duality_report, weight_sweep};
use crate::ensembles::{ensemble_occupancy, hidden_pair_ensemble, swapped_occupancy, tangent_swap};
use crate::error::Result;
use crate::field::{one_slit_amplitude, Field, Side, Slit, WaveField};
use crate::params::{Model, PhysicsParams};
use crate::quad::compensated_sum;
use crate::slice::{linspace, symmetric_grid};
use crate::trajectory::{integrate_batch, integrate_trajectory, launch_at_quantiles, launch_grid, ordering_check};
use crate::trajectory::{IntegratorSettings, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub details: BTreeMap<String, f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub criteria: Vec<CriterionResult>,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
}

struct Outcome {
    measured: f64,
    tolerance: f64,
    passed: bool,
    details: BTreeMap<String, f64>,
}

impl Outcome {
    fn at_most(measured: f64, tolerance: f64) -> Outcome {
        Outcome { measured, tolerance, passed: measured <= tolerance, details: BTreeMap::new() }
    }

    fn detail(mut self, key: &str, v: f64) -> Outcome {
        self.details.insert(key.to_string(), v);
        self
    }
}

/// Desk parameter sets.
pub fn desk_gaussian() -> PhysicsParams {
    PhysicsParams::gaussian(0.5, 1.0, 0.25).expect("valid")
}

/// Gaussian set with k = 10.
pub fn desk_gaussian_fast() -> PhysicsParams {
    PhysicsParams::gaussian(50.0, 1.0, 0.25).expect("valid")
}

/// Gaussian set with k = 20, paraxial across the whole launch window;
/// used wherever trajectories are launched from the aperture.
pub fn desk_gaussian_paraxial() -> PhysicsParams {
    PhysicsParams::gaussian(200.0, 1.0, 0.25).expect("valid")
}

pub fn desk_point() -> PhysicsParams {
    PhysicsParams::point(50.0, 1.0, 1e-2 * 10.0 * 0.0625).expect("valid")
}

/// A trajectory family: field, launch abscissa, end, launch window.
struct Family {
    params: PhysicsParams,
    x0: f64,
    x_end: f64,
    window: (f64, f64),
}

fn families() -> [(&'static str, Family); 2] {
    let g = desk_gaussian_paraxial();
    let p = desk_point();
    // launch windows keep every line at angles where v_x stays positive
    [
        ("gaussian", Family { params: g, x0: 0.0, x_end: 10.0, window: (-2.5, 2.5) }),
        ("point", Family { params: p, x0: 4.0, x_end: 100.0, window: (-1.0, 1.0) }),
    ]
}

impl Family {
    fn field(&self) -> WaveField {
        WaveField::two_slit(self.params)
    }

    fn settings(&self) -> IntegratorSettings {
        IntegratorSettings::for_range(&self.field(), self.x0, self.x_end)
    }

    /// 64 launches per half-plane plus the axis, sorted by start.
    fn launches(&self) -> Result<Vec<(f64, f64)>> {
        let f = self.field();
        let mut s = launch_grid(&f, self.x0, Side::Lower, 64, self.window)?;
        s.push((self.x0, 0.0));
        s.extend(launch_grid(&f, self.x0, Side::Upper, 64, self.window)?);
        Ok(s)
    }

    fn trajectories(&self) -> Result<Vec<Trajectory>> {
        integrate_batch(&self.field(), &self.launches()?, self.x_end, &self.settings())
            .into_iter()
            .collect()
    }
}

/// Independent closed form of the single-slit profile.
fn oracle_profile(p: &PhysicsParams, x: f64, s: f64) -> Complex64 {
    let k = p.k();
    match p.model() {
        Model::Gaussian => {
            let zr = k * p.sigma() * p.sigma();
            let q = Complex64::new(1.0, x / zr);
            let arg = Complex64::new(0.0, k * x) - s * s / (2.0 * p.sigma() * p.sigma() * q);
            arg.exp() / q.sqrt()
        }
        Model::Point => Complex64::from_polar(1.0 / x.sqrt(), k * (x + s * s / (2.0 * x))),
    }
}

fn dense_trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / (n - 1) as f64;
    let terms = (0..n).map(|i| {
        let y = if i == n - 1 { hi } else { lo + h * i as f64 };
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        w * f(y)
    });
    h * compensated_sum(terms)
}

fn c1_zero_current(tol: f64) -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut out = Outcome::at_most(0.0, tol);
    for (name, p) in [("gaussian", desk_gaussian()), ("point", desk_point())] {
        let field = WaveField::two_slit(p);
        let mut model_worst = 0.0f64;
        for x in linspace(p.domain_start().max(1e-3), 100.0, 1000) {
            let s = field.sample(x, 0.0)?;
            let jy = CurrentVector::from_sample(&s).jy.abs();
            let scale = p.k() * s.intensity();
            let r = if scale > 0.0 { jy / scale } else if jy == 0.0 { 0.0 } else { f64::INFINITY };
            model_worst = model_worst.max(r);
        }
        worst = worst.max(model_worst);
        out = out.detail(&format!("{name}MaxRatio"), model_worst);
    }
    out.measured = worst;
    out.passed = worst <= tol;
    Ok(out)
}

fn c2_mirror(tol: f64) -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut worst_dirichlet = 0.0f64;
    let mut out = Outcome::at_most(0.0, tol);
    for (name, p) in [("gaussian", desk_gaussian()), ("point", desk_point())] {
        for l in [5.0, 50.0, 100.0] {
            let half = crate::config::default_half_window(&p, l);
            let grid = linspace(0.0, half, 2001);
            let phi = WaveField::two_slit(p);
            let cmp = compare_patterns(&image_field(p, Boundary::Neumann), &phi, l, &grid)?;
            let r = cmp.max_abs_diff / cmp.peak_intensity;
            worst = worst.max(r);
            out = out.detail(&format!("{name}L{l}Neumann"), r);
            // |Φ|² − |ψ₂ − ψ₁|² at y = 0 against 4|Ψ_one(L, a)|²
            let d = image_field(p, Boundary::Dirichlet).value(l, 0.0)?.norm_sqr();
            let contrast = phi.value(l, 0.0)?.norm_sqr() - d;
            let want = 4.0 * oracle_profile(&p, l, p.a()).norm_sqr();
            let rd = (contrast - want).abs() / want;
            worst_dirichlet = worst_dirichlet.max(rd);
            out = out.detail(&format!("{name}L{l}DirichletContrast"), contrast);
        }
    }
    out.measured = worst;
    out.passed = worst <= tol && worst_dirichlet <= 1e-12;
    Ok(out.detail("dirichletContrastRelErr", worst_dirichlet))
}

fn c3_additivity(tol: f64) -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut out = Outcome::at_most(0.0, tol);
    for (name, p) in [("k1", desk_gaussian()), ("k10", desk_gaussian_fast())] {
        for l in [5.0, 50.0] {
            for (wname, w) in [("full", f64::INFINITY), ("6", 6.0), ("2", 2.0)] {
                let acc = norm_accounting(&p, l, (-w, w))?;
                let r = acc.additivity_residual.abs();
                worst = worst.max(r);
                out = out.detail(&format!("{name}L{l}W{wname}"), r);
            }
        }
    }
    out.measured = worst;
    out.passed = worst <= tol;
    Ok(out)
}

fn c4_non_additivity(tol: f64) -> Result<Outcome> {
    let p = desk_gaussian_fast();
    let (l, w) = (5.0, 6.0);
    let acc = norm_accounting(&p, l, (-w, w))?;
    let oracle = dense_trapezoid(
        |y| {
            let a = oracle_profile(&p, l, y + p.a());
            let b = oracle_profile(&p, l, y - p.a());
            2.0 * (a.conj() * b).re
        },
        -w,
        w,
        1_000_001,
    );
    let rel = (acc.non_additivity - oracle).abs() / oracle.abs();
    let nonzero = oracle.abs() >= 1e-6 * acc.two_slit;
    let mut out = Outcome::at_most(rel, tol)
        .detail("deficit", acc.non_additivity)
        .detail("oracle", oracle)
        .detail("crossTerm", acc.cross_term)
        .detail("aOverSigma", p.a() / p.sigma());
    out.passed &= nonzero;
    Ok(out)
}

fn c5_confinement() -> Result<Outcome> {
    let mut worst = f64::NEG_INFINITY;
    let mut passed = true;
    let mut out = Outcome::at_most(0.0, 0.0);
    for (name, fam) in families() {
        let trajs = fam.trajectories()?;
        let abs_tol = fam.settings().abs_tol;
        let completed = trajs.iter().filter(|t| t.is_completed()).count();
        let mut axis_dev = 0.0f64;
        let mut intrusion = f64::NEG_INFINITY;
        for t in &trajs {
            for &(_, y) in &t.points {
                if t.start_y < 0.0 {
                    intrusion = intrusion.max(y);
                } else if t.start_y > 0.0 {
                    intrusion = intrusion.max(-y);
                } else {
                    axis_dev = axis_dev.max(y.abs());
                }
            }
        }
        passed &= completed == trajs.len() && intrusion <= abs_tol && axis_dev <= abs_tol;
        worst = worst.max(intrusion / abs_tol);
        out = out
            .detail(&format!("{name}Completed"), completed as f64)
            .detail(&format!("{name}MaxIntrusion"), intrusion)
            .detail(&format!("{name}AxisDeviation"), axis_dev)
            .detail(&format!("{name}AbsTol"), abs_tol);
    }
    out.measured = worst;
    out.tolerance = 1.0;
    out.passed = passed;
    Ok(out)
}

fn c6_ordering() -> Result<Outcome> {
    let mut passed = true;
    let mut out = Outcome::at_most(0.0, 0.0);
    for (name, fam) in families() {
        let trajs = fam.trajectories()?;
        let slices = linspace(fam.x0, fam.x_end, 32);
        let rep = ordering_check(&trajs, &slices, fam.settings().abs_tol);
        passed &= rep.ok && trajs.len() == 129;
        out = out
            .detail(&format!("{name}Trajectories"), trajs.len() as f64)
            .detail(&format!("{name}Ok"), if rep.ok { 1.0 } else { 0.0 });
    }
    out.measured = if passed { 0.0 } else { 1.0 };
    out.passed = passed;
    Ok(out)
}

/// Classic RK4 on dy/dx = v_y / v_x with `n` equal steps.
fn rk4_endpoint<F: Field>(field: &F, x0: f64, y0: f64, x_end: f64, n: usize) -> Result<f64> {
    let slope = |x: f64, y: f64| -> Result<f64> {
        let j = CurrentVector::from_sample(&field.sample(x, y)?);
        Ok(j.jy / j.jx)
    };
    let h = (x_end - x0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        let x = x0 + h * i as f64;
        let k1 = slope(x, y)?;
        let k2 = slope(x + 0.5 * h, y + 0.5 * h * k1)?;
        let k3 = slope(x + 0.5 * h, y + 0.5 * h * k2)?;
        let k4 = slope(x + h, y + h * k3)?;
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Ok(y)
}

fn c7_integrator(tol: f64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut out = Outcome::at_most(0.0, tol);
    for (name, fam) in families() {
        let field = fam.field();
        let q: Vec<f64> = (0..16).map(|_| rng.gen_range(0.02..0.98)).collect();
        let starts = launch_at_quantiles(&field, fam.x0, Side::Both, &q, fam.window)?;
        let settings = fam.settings();
        let scale = fam.params.transverse_scale(fam.x_end);
        let mut model_worst = 0.0f64;
        for s in starts {
            let t = integrate_trajectory(&field, s, fam.x_end, &settings)?;
            if !t.is_completed() {
                model_worst = f64::INFINITY;
                continue;
            }
            let n = 10 * (t.points.len() - 1).max(200);
            let y_ref = rk4_endpoint(&field, s.0, s.1, fam.x_end, n)?;
            model_worst = model_worst.max((t.end().1 - y_ref).abs() / scale);
        }
        worst = worst.max(model_worst);
        out = out.detail(&format!("{name}MaxRelErr"), model_worst);
    }
    out.measured = worst;
    out.passed = worst <= tol;
    Ok(out)
}

/// Five-point derivative along one axis.
fn five_point(f: impl Fn(f64) -> Result<Complex64>, t: f64, h: f64) -> Result<Complex64> {
    Ok((f(t - 2.0 * h)? - 8.0 * f(t - h)? + 8.0 * f(t + h)? - f(t + 2.0 * h)?) / (12.0 * h))
}

fn c8_gradient(tol: f64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut out = Outcome::at_most(0.0, tol);
    for (name, p) in [("gaussian", desk_gaussian()), ("point", desk_point())] {
        let fields = [WaveField::two_slit(p), WaveField::one_slit(p, Slit::First)];
        let mut model_worst = 0.0f64;
        for i in 0..5000 {
            let field = &fields[i % 2];
            let x = match p.model() {
                Model::Gaussian => rng.gen_range(1e-3..100.0),
                Model::Point => (2.0 * p.x_min()) * (100.0 / (2.0 * p.x_min())).powf(rng.gen::<f64>()),
            };
            let half = match p.model() {
                Model::Gaussian => p.a() + 6.0 * p.beam_width(x),
                Model::Point => p.a() + 3.0 * p.fringe_period(x),
            };
            let y = rng.gen_range(-half..half);
            // step lengths from the component slopes and the profile curvature
            let u = one_slit_amplitude(&p, Slit::First, x, y)?;
            let v = one_slit_amplitude(&p, Slit::Second, x, y)?;
            let mag = u.value.norm() + v.value.norm();
            let curvature = match p.model() {
                Model::Gaussian => 1.0 / (p.sigma() * (1.0 + (x / p.rayleigh_length()).powi(2)).powf(0.25)),
                Model::Point => (p.k() / x).sqrt(),
            };
            let ky = (u.d_dy.norm() + v.d_dy.norm()) / mag + curvature;
            let kx = (u.d_dx.norm() + v.d_dx.norm()) / mag + ky * ky / p.k() + 1.0 / x;
            let hx = (1e-3 / kx).min((x - p.domain_start()) / 4.0);
            let hy = 1e-3 / ky;
            let s = field.sample(x, y)?;
            let dx = five_point(|t| field.value(t, y), x, hx)?;
            let dy = five_point(|t| field.value(x, t), y, hy)?;
            let norm = (s.d_dx.norm_sqr() + s.d_dy.norm_sqr()).sqrt();
            let err = ((s.d_dx - dx).norm_sqr() + (s.d_dy - dy).norm_sqr()).sqrt() / norm;
            model_worst = model_worst.max(err);
        }
        worst = worst.max(model_worst);
        out = out.detail(&format!("{name}MaxRelErr"), model_worst);
    }
    out.measured = worst;
    out.passed = worst <= tol;
    Ok(out)
}

fn c9_swap() -> Result<Outcome> {
    let p = desk_gaussian_paraxial();
    let (x0, x_end, n) = (0.0, 10.0, 32);
    let settings = IntegratorSettings::for_range(&WaveField::one_slit(p, Slit::First), x0, x_end);
    let ens = hidden_pair_ensemble(&p, n, x0, x_end, &settings)?;
    let mut multiset_ok = true;
    let mut confined = true;
    let mut crossings = 0usize;
    let swapped: Vec<_> = ens.pairs.iter().map(tangent_swap).collect();
    for (pair, sw) in ens.pairs.iter().zip(&swapped) {
        crossings += pair.crossings.len();
        for i in 0..pair.x_grid.len() {
            let mut got = [sw.lower[i], sw.upper[i]];
            let mut want = [pair.y1[i], pair.y2[i]];
            got.sort_by(f64::total_cmp);
            want.sort_by(f64::total_cmp);
            multiset_ok &= got[0].to_bits() == want[0].to_bits() && got[1].to_bits() == want[1].to_bits();
        }
        confined &= sw.lower.iter().all(|&y| y <= 0.0) && sw.upper.iter().all(|&y| y >= 0.0);
        confined &= sw.lower_polyline.iter().all(|q| q.1 <= 0.0) && sw.upper_polyline.iter().all(|q| q.1 >= 0.0);
    }
    let slices = linspace(x0, x_end, 32);
    let count = ens.pairs.len();
    let occ_ok = swapped_occupancy(&swapped, &slices)?
        .iter()
        .chain(ensemble_occupancy(&ens.pairs, &slices)?.iter())
        .all(|r| r.lower == count && r.upper == count);
    let passed = multiset_ok && confined && occ_ok && count == n && ens.excluded.is_empty();
    let mut out = Outcome::at_most(if passed { 0.0 } else { 1.0 }, 0.0)
        .detail("pairs", count as f64)
        .detail("excluded", ens.excluded.len() as f64)
        .detail("crossings", crossings as f64);
    out.passed = passed;
    Ok(out)
}

fn c10_duality(tol: f64) -> Result<Outcome> {
    let point = desk_point();
    let grid_for = |p: &PhysicsParams, l: f64| symmetric_grid(1.5 * p.fringe_period(l), 769);
    let c = |re: f64| Complex64::new(re, 0.0);
    let l = 100.0;
    let grid = grid_for(&point, l);
    let eq = duality_report(&point, c(1.0), c(1.0), l, &grid)?;
    let split = duality_report(&point, c(0.9f64.sqrt()), c(0.1f64.sqrt()), l, &grid)?;
    // closed forms: P = ||c1|² − |c2|²|, V = 2|c1||c2|
    let e1 = [eq.predictability, eq.visibility - 1.0, eq.duality_sum - 1.0];
    let e2 = [split.predictability - 0.8, split.visibility - 0.6, split.duality_sum - 1.0];
    let exact = e1.iter().chain(&e2).map(|v| v.abs()).fold(0.0, f64::max);
    let mut max_sum = 0.0f64;
    for (p, l) in [(desk_gaussian(), 50.0), (point, 100.0)] {
        let grid = grid_for(&p, l);
        for (c1, c2) in weight_sweep() {
            max_sum = max_sum.max(duality_report(&p, c1, c2, l, &grid)?.duality_sum);
        }
    }
    let mut out = Outcome::at_most(exact, tol)
        .detail("equalV", eq.visibility)
        .detail("splitP", split.predictability)
        .detail("splitV", split.visibility)
        .detail("sweepMaxSum", max_sum);
    out.passed &= max_sum <= 1.0 + tol;
    Ok(out)
}

fn c11_flux(tol: f64) -> Result<Outcome> {
    let p = desk_gaussian();
    let phi = WaveField::two_slit(p);
    let window = (f64::NEG_INFINITY, f64::INFINITY);
    let fluxes = [5.0, 10.0, 50.0]
        .iter()
        .map(|&l| transmitted_flux_full(&phi, l, Side::Lower, window))
        .collect::<Result<Vec<f64>>>()?;
    let max = fluxes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = fluxes.iter().copied().fold(f64::INFINITY, f64::min);
    let rel = (max - min) / fluxes[0].abs();
    Ok(Outcome::at_most(rel, tol)
        .detail("fluxL5", fluxes[0])
        .detail("fluxL10", fluxes[1])
        .detail("fluxL50", fluxes[2]))
}

fn c12_determinism() -> Result<Outcome> {
    let (_, fam) = families().into_iter().next().expect("two families");
    let starts = fam.launches()?;
    let run = |threads: usize| -> Result<String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| crate::error::SlitError::domain(e.to_string()))?;
        let trajs: Vec<Trajectory> = pool
            .install(|| integrate_batch(&fam.field(), &starts, fam.x_end, &fam.settings()))
            .into_iter()
            .collect::<Result<_>>()?;
        Ok(serde_json::to_string(&trajs).expect("trajectories serialize"))
    };
    let a = run(1)?;
    let b = run(4)?;
    let c = run(4)?;
    let same = a == b && b == c;
    let mut out = Outcome::at_most(if same { 0.0 } else { 1.0 }, 0.0).detail("bytes", a.len() as f64);
    out.passed = same;
    Ok(out)
}

/// Runs every criterion. Tolerances may be overridden through the config.
pub fn run_verify(config: &Config) -> VerifyReport {
    let t = |key: &str, d: f64| config.tolerance(key, d);
    type Check<'a> = Box<dyn Fn() -> Result<Outcome> + 'a>;
    let checks: Vec<(u8, &str, Check<'_>)> = vec![
        (1, "zero symmetry-line current", Box::new(|| c1_zero_current(t("zeroCurrent", 1e-13)))),
        (2, "mirror equivalence", Box::new(|| c2_mirror(t("mirror", 1e-14)))),
        (3, "half-plane norm additivity", Box::new(|| c3_additivity(t("additivity", 1e-10)))),
        (4, "one-slit norm non-additivity", Box::new(|| c4_non_additivity(t("nonAdditivity", 1e-8)))),
        (5, "trajectory confinement", Box::new(c5_confinement)),
        (6, "trajectory ordering", Box::new(c6_ordering)),
        (7, "integrator accuracy", Box::new(|| c7_integrator(t("integrator", 1e-6)))),
        (8, "gradient consistency", Box::new(|| c8_gradient(t("gradient", 1e-6)))),
        (9, "tangent swap", Box::new(c9_swap)),
        (10, "duality relation", Box::new(|| c10_duality(t("duality", 1e-6)))),
        (11, "per-region flux conservation", Box::new(|| c11_flux(t("flux", 1e-6)))),
        (12, "determinism across worker counts", Box::new(c12_determinism)),
    ];
    let criteria: Vec<CriterionResult> = checks
        .into_iter()
        .map(|(id, name, check)| match check() {
            Ok(o) => CriterionResult {
                id,
                name: name.to_string(),
                passed: o.passed,
                measured: o.measured,
                tolerance: o.tolerance,
                details: o.details,
                error: None,
            },
            Err(e) => CriterionResult {
                id,
                name: name.to_string(),
                passed: false,
                measured: f64::NAN,
                tolerance: f64::NAN,
                details: BTreeMap::new(),
                error: Some(e.to_string()),
            },
        })
        .collect();
    let passed = criteria.iter().filter(|c| c.passed).count();
    VerifyReport { failed: criteria.len() - passed, passed, all_passed: passed == criteria.len(), criteria }
}
