//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};

use common::{dense_quantile, derivative, fd_current, phi, profile, psi1, psi2, rk4, trapezoid, without_timestamp};
use slitlab::current::probability_current;
use slitlab::decomposition::{image_field, norm_accounting, split_two_slit, transmitted_flux_full, windowed_norm, Boundary};
use slitlab::duality::{duality_report, weight_sweep};
use slitlab::ensembles::{ensemble_occupancy, hidden_pair_ensemble, swapped_occupancy, tangent_swap};
use slitlab::field::{one_slit_amplitude, Field, Side, Slit, WaveField};
use slitlab::slice::{linspace, symmetric_grid};
use slitlab::trajectory::{integrate_batch, integrate_trajectory, launch_at_quantiles, launch_grid, ordering_check};
use slitlab::trajectory::{IntegratorSettings, Trajectory};
use slitlab::{Model, PhysicsParams};

struct Verdict {
    passed: bool,
    summary: String,
}

fn verdict(passed: bool, summary: impl Into<String>) -> Verdict {
    Verdict { passed, summary: summary.into() }
}

fn gaussian_k1() -> PhysicsParams {
    PhysicsParams::gaussian(0.5, 1.0, 0.25).unwrap()
}

fn gaussian_k10() -> PhysicsParams {
    PhysicsParams::gaussian(50.0, 1.0, 0.25).unwrap()
}

fn gaussian_k20() -> PhysicsParams {
    PhysicsParams::gaussian(200.0, 1.0, 0.25).unwrap()
}

fn point_k10() -> PhysicsParams {
    PhysicsParams::point(50.0, 1.0, 0.00625).unwrap()
}

struct Family {
    name: &'static str,
    params: PhysicsParams,
    x0: f64,
    x_end: f64,
    half_window: f64,
}

fn families() -> Vec<Family> {
    vec![
        Family { name: "gaussian k=20", params: gaussian_k20(), x0: 0.0, x_end: 10.0, half_window: 2.5 },
        Family { name: "point k=10", params: point_k10(), x0: 4.0, x_end: 100.0, half_window: 1.0 },
    ]
}

impl Family {
    fn field(&self) -> WaveField {
        WaveField::two_slit(self.params)
    }
    fn window(&self) -> (f64, f64) {
        (-self.half_window, self.half_window)
    }
    fn settings(&self) -> IntegratorSettings {
        IntegratorSettings::for_range(&self.field(), self.x0, self.x_end)
    }
    fn starts(&self) -> Vec<(f64, f64)> {
        let f = self.field();
        let mut s = launch_grid(&f, self.x0, Side::Lower, 64, self.window()).unwrap();
        s.push((self.x0, 0.0));
        s.extend(launch_grid(&f, self.x0, Side::Upper, 64, self.window()).unwrap());
        s
    }
    fn trajectories(&self) -> Vec<Trajectory> {
        integrate_batch(&self.field(), &self.starts(), self.x_end, &self.settings())
            .into_iter()
            .map(|t| t.unwrap())
            .collect()
    }
}

fn zero_symmetry_line_current() -> Verdict {
    let mut worst = 0.0f64;
    let mut value_err = 0.0f64;
    for p in [gaussian_k1(), point_k10()] {
        let f = WaveField::two_slit(p);
        for x in linspace(p.domain_start().max(1e-3), 100.0, 1000) {
            let j = probability_current(&f, x, 0.0).unwrap();
            let rho = f.value(x, 0.0).unwrap().norm_sqr();
            worst = worst.max(j.jy.abs() / (p.k() * rho));
            let want = 2.0 * profile(&p, x, p.a());
            value_err = value_err.max((f.value(x, 0.0).unwrap() - want).norm() / want.norm());
        }
    }
    verdict(
        worst <= 1e-13 && value_err <= 1e-12,
        format!("max |jy|/(k|Phi|^2) = {worst:e} (tol 1e-13); Phi(x,0) vs closed form {value_err:e}"),
    )
}

fn mirror_equivalence() -> Verdict {
    let mut worst = 0.0f64;
    let mut contrast_err = 0.0f64;
    for p in [gaussian_k1(), point_k10()] {
        for l in [5.0, 50.0, 100.0] {
            let half = match p.model() {
                Model::Gaussian => p.a() + 6.0 * p.beam_width(l),
                Model::Point => 3.0 * p.fringe_period(l),
            };
            let n = image_field(p, Boundary::Neumann);
            let d = image_field(p, Boundary::Dirichlet);
            let f = WaveField::two_slit(p);
            let grid = linspace(0.0, half, 1001);
            let peak = grid.iter().map(|&y| f.value(l, y).unwrap().norm_sqr()).fold(0.0, f64::max);
            for &y in &grid {
                let diff = (n.value(l, y).unwrap().norm_sqr() - f.value(l, y).unwrap().norm_sqr()).abs();
                worst = worst.max(diff / peak);
            }
            let contrast = f.value(l, 0.0).unwrap().norm_sqr() - d.value(l, 0.0).unwrap().norm_sqr();
            let want = 4.0 * profile(&p, l, p.a()).norm_sqr();
            contrast_err = contrast_err.max((contrast - want).abs() / want);
        }
    }
    verdict(
        worst <= 1e-14 && contrast_err <= 1e-12,
        format!("neumann max diff / peak = {worst:e} (tol 1e-14); dirichlet contrast vs 4|Psi(L,a)|^2 rel {contrast_err:e}"),
    )
}

fn norm_additivity() -> Verdict {
    let p = gaussian_k1();
    let split = split_two_slit(p);
    let phi_f = WaveField::two_slit(p);
    let mut worst = 0.0f64;
    let mut oracle_err = 0.0f64;
    for l in [5.0, 50.0] {
        for w in [f64::INFINITY, 6.0, 1.5] {
            let window = (-w, w);
            let total = windowed_norm(&phi_f, l, window).unwrap();
            let lower = windowed_norm(&split.lower, l, window).unwrap();
            let upper = windowed_norm(&split.upper, l, window).unwrap();
            worst = worst.max((lower + upper - total).abs() / total);
            let span = if w.is_finite() { w } else { p.a() + 10.0 * p.beam_width(l) };
            let oracle = trapezoid(|y| phi(&p, l, y).norm_sqr(), -span, span, 1_000_001);
            oracle_err = oracle_err.max((total - oracle).abs() / oracle);
        }
    }
    verdict(
        worst <= 1e-10 && oracle_err <= 1e-8,
        format!("max relative additivity residual {worst:e} (tol 1e-10); ||Phi||^2 vs trapezoid {oracle_err:e}"),
    )
}

fn norm_non_additivity() -> Verdict {
    let p = gaussian_k10();
    let (l, w) = (5.0, 6.0);
    let acc = norm_accounting(&p, l, (-w, w)).unwrap();
    let oracle = trapezoid(|y| 2.0 * (psi1(&p, l, y).conj() * psi2(&p, l, y)).re, -w, w, 1_000_001);
    let rel = (acc.non_additivity - oracle).abs() / oracle.abs();
    let nonzero = oracle.abs() >= 1e-6 * acc.two_slit;
    verdict(
        rel <= 1e-8 && nonzero && (p.a() / p.sigma() - 4.0).abs() < 1e-15,
        format!("deficit {:e} vs trapezoid 2Re<psi1|psi2> {oracle:e}: rel {rel:e} (tol 1e-8), a = 4 sigma", acc.non_additivity),
    )
}

fn trajectory_confinement() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for fam in families() {
        let starts = fam.starts();
        // launch points against a dense cumulative inversion
        let rho = |y: f64| phi(&fam.params, fam.x0.max(1e-300), y).norm_sqr();
        let mut launch_err = 0.0f64;
        for (i, &(_, y)) in starts[65..].iter().enumerate() {
            let q = (i as f64 + 0.5) / 64.0;
            let want = dense_quantile(rho, 0.0, fam.half_window, 200_001, q);
            launch_err = launch_err.max((y - want).abs());
        }
        let trajs = fam.trajectories();
        let tol = fam.settings().abs_tol;
        let completed = trajs.iter().all(Trajectory::is_completed);
        let mut intrusion = f64::NEG_INFINITY;
        let mut axis = 0.0f64;
        for t in &trajs {
            for &(_, y) in &t.points {
                match t.start_y.partial_cmp(&0.0).unwrap() {
                    std::cmp::Ordering::Less => intrusion = intrusion.max(y),
                    std::cmp::Ordering::Greater => intrusion = intrusion.max(-y),
                    std::cmp::Ordering::Equal => axis = axis.max(y.abs()),
                }
            }
        }
        ok &= completed && trajs.len() == 129 && intrusion <= tol && axis <= tol && launch_err <= 1e-6;
        notes.push(format!(
            "{}: {} lines, completed {completed}, deepest approach {:e} from y=0, axis deviation {axis:e}, launch vs dense CDF {launch_err:e}",
            fam.name,
            trajs.len(),
            -intrusion
        ));
    }
    verdict(ok, notes.join("; "))
}

fn linear_at(t: &Trajectory, x: f64) -> Option<f64> {
    let i = t.points.windows(2).position(|w| w[0].0 <= x && x <= w[1].0)?;
    let (a, b) = (t.points[i], t.points[i + 1]);
    Some(a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0))
}

fn trajectory_ordering() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for fam in families() {
        let trajs = fam.trajectories();
        let slices = linspace(fam.x0, fam.x_end, 32);
        let tol = fam.settings().abs_tol;
        let report = ordering_check(&trajs, &slices, tol);
        // independent pass over linearly interpolated polylines
        let mut direct = true;
        for &x in &slices {
            let ys: Vec<f64> = trajs.iter().map(|t| linear_at(t, x).unwrap()).collect();
            direct &= ys.windows(2).all(|w| w[1] - w[0] > -2.0 * tol);
        }
        ok &= report.ok && direct && trajs.len() == 129;
        notes.push(format!("{}: orderingCheck {} , direct {}", fam.name, report.ok, direct));
    }
    verdict(ok, notes.join("; "))
}

fn integrator_accuracy() -> Verdict {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for fam in families() {
        let p = fam.params;
        let q: Vec<f64> = (0..16).map(|_| rng.gen_range(0.02..0.98)).collect();
        let starts = launch_at_quantiles(&fam.field(), fam.x0, Side::Both, &q, fam.window()).unwrap();
        let scale = p.transverse_scale(fam.x_end);
        let slope = |x: f64, y: f64| {
            let (jx, jy) = fd_current(|a, b| phi(&p, a, b), x, y, 1e-4);
            jy / jx
        };
        for s in starts {
            let t = integrate_trajectory(&fam.field(), s, fam.x_end, &fam.settings()).unwrap();
            assert!(t.is_completed());
            let steps = 10 * (t.points.len() - 1).max(200);
            let y_ref = rk4(slope, s.0.max(2e-4), s.1, fam.x_end, steps);
            worst = worst.max((t.end().1 - y_ref).abs() / scale);
        }
    }
    verdict(worst <= 1e-6, format!("max endpoint deviation vs refined RK4 / transverse scale = {worst:e} (tol 1e-6)"))
}

/// Inverse length scales for the finite-difference steps: slope of the
/// components plus the curvature length of the transverse profile.
fn local_wavenumbers(p: &PhysicsParams, x: f64, y: f64) -> (f64, f64) {
    let u = one_slit_amplitude(p, Slit::First, x, y).unwrap();
    let v = one_slit_amplitude(p, Slit::Second, x, y).unwrap();
    let m = u.value.norm() + v.value.norm();
    let curvature = match p.model() {
        Model::Gaussian => 1.0 / (p.sigma() * (1.0 + (x / p.rayleigh_length()).powi(2)).powf(0.25)),
        Model::Point => (p.k() / x).sqrt(),
    };
    let ky = (u.d_dy.norm() + v.d_dy.norm()) / m + curvature;
    let kx = (u.d_dx.norm() + v.d_dx.norm()) / m + ky * ky / p.k() + 1.0 / x;
    (kx, ky)
}

fn gradient_consistency() -> Verdict {
    let mut rng = StdRng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for p in [gaussian_k1(), point_k10()] {
        for i in 0..5000 {
            let x = match p.model() {
                Model::Gaussian => rng.gen_range(1e-3..100.0),
                Model::Point => 0.0125 * (100.0f64 / 0.0125).powf(rng.gen::<f64>()),
            };
            let half = match p.model() {
                Model::Gaussian => p.a() + 6.0 * p.beam_width(x),
                Model::Point => p.a() + 3.0 * p.fringe_period(x),
            };
            let y = rng.gen_range(-half..half);
            let (field, oracle): (WaveField, Box<dyn Fn(f64, f64) -> Complex64>) = if i % 2 == 0 {
                (WaveField::two_slit(p), Box::new(move |a, b| phi(&p, a, b)))
            } else {
                (WaveField::one_slit(p, Slit::First), Box::new(move |a, b| psi1(&p, a, b)))
            };
            let (kx, ky) = local_wavenumbers(&p, x, y);
            let hx = (1e-3 / kx).min((x - p.domain_start()) / 4.0);
            let hy = 1e-3 / ky;
            let s = field.sample(x, y).unwrap();
            let dx = derivative(|t| oracle(t, y), x, hx);
            let dy = derivative(|t| oracle(x, t), y, hy);
            let norm = (s.d_dx.norm_sqr() + s.d_dy.norm_sqr()).sqrt();
            worst = worst.max(((s.d_dx - dx).norm_sqr() + (s.d_dy - dy).norm_sqr()).sqrt() / norm);
        }
    }
    verdict(worst <= 1e-6, format!("max relative gradient error at 10^4 points = {worst:e} (tol 1e-6)"))
}

fn tangent_swap_invariants() -> Verdict {
    let p = gaussian_k20();
    let n = 32;
    let settings = IntegratorSettings::for_range(&WaveField::one_slit(p, Slit::First), 0.0, 10.0);
    let ens = hidden_pair_ensemble(&p, n, 0.0, 10.0, &settings).unwrap();
    let swapped: Vec<_> = ens.pairs.iter().map(tangent_swap).collect();
    let mut rng = StdRng::seed_from_u64(5);
    let mut multiset = true;
    let mut confined = true;
    for (pair, sw) in ens.pairs.iter().zip(&swapped) {
        for _ in 0..100 {
            let i = rng.gen_range(0..pair.x_grid.len());
            let mut a = [sw.lower[i], sw.upper[i]];
            let mut b = [pair.y1[i], pair.y2[i]];
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            multiset &= a == b;
        }
        confined &= sw.lower.iter().all(|&y| y <= 0.0) && sw.upper.iter().all(|&y| y >= 0.0);
    }
    let slices = linspace(0.0, 10.0, 32);
    let occupancy = swapped_occupancy(&swapped, &slices).unwrap();
    let raw = ensemble_occupancy(&ens.pairs, &slices).unwrap();
    let occ_ok = occupancy.iter().chain(&raw).all(|r| (r.lower, r.upper) == (n, n));
    // direct counting on the common grid at the grid samples
    let direct = (0..ens.pairs[0].x_grid.len()).all(|i| {
        let lower = swapped.iter().filter(|s| s.lower[i] <= 0.0).count();
        let upper = swapped.iter().filter(|s| s.upper[i] >= 0.0).count();
        lower == n && upper == n
    });
    let crossings: usize = ens.pairs.iter().map(|p| p.crossings.len()).sum();
    verdict(
        multiset && confined && occ_ok && direct && ens.pairs.len() == n && crossings > 0,
        format!("{} pairs, {crossings} crossings; multisets exact {multiset}, confined {confined}, occupancy (n, n) {occ_ok}", ens.pairs.len()),
    )
}

fn duality_relation() -> Verdict {
    let p = point_k10();
    let l = 100.0;
    let grid = symmetric_grid(1.5 * p.fringe_period(l), 769);
    let c = |v: f64| Complex64::new(v, 0.0);
    let eq = duality_report(&p, c(1.0), c(1.0), l, &grid).unwrap();
    let split = duality_report(&p, c(0.9f64.sqrt()), c(0.1f64.sqrt()), l, &grid).unwrap();
    // contrast of the closed-form pattern on a dense scan of one period
    let scan = |c1: f64, c2: f64| {
        let per = p.fringe_period(l);
        let vals: Vec<f64> = linspace(-per, per, 400_001)
            .iter()
            .map(|&y| (c1 * psi1(&p, l, y) + c2 * psi2(&p, l, y)).norm_sqr())
            .collect();
        let (mx, mn) = vals.iter().fold((0.0f64, f64::INFINITY), |(a, b), &v| (a.max(v), b.min(v)));
        (mx - mn) / (mx + mn)
    };
    let v_eq = scan(1.0, 1.0);
    let v_split = scan(0.9f64.sqrt(), 0.1f64.sqrt());
    let errs = [
        eq.predictability,
        eq.visibility - 1.0,
        eq.duality_sum - 1.0,
        split.predictability - 0.8,
        split.visibility - 0.6,
        split.duality_sum - 1.0,
        eq.visibility - v_eq,
        split.visibility - v_split,
    ];
    let exact = errs.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let mut max_sum = 0.0f64;
    for (params, l) in [(gaussian_k1(), 50.0), (point_k10(), 100.0)] {
        let g = symmetric_grid(1.5 * params.fringe_period(l), 769);
        for (c1, c2) in weight_sweep() {
            max_sum = max_sum.max(duality_report(&params, c1, c2, l, &g).unwrap().duality_sum);
        }
    }
    verdict(
        exact <= 1e-6 && max_sum <= 1.0 + 1e-6,
        format!(
            "equal: (P, V) = ({}, {}); 0.9/0.1: ({}, {}); max deviation {exact:e}; sweep max P^2+V^2 = {max_sum}",
            eq.predictability, eq.visibility, split.predictability, split.visibility
        ),
    )
}

fn region_flux_conservation() -> Verdict {
    let p = gaussian_k1();
    let f = WaveField::two_slit(p);
    let ls = [5.0, 10.0, 50.0];
    let fluxes: Vec<f64> = ls
        .iter()
        .map(|&l| transmitted_flux_full(&f, l, Side::Lower, (f64::NEG_INFINITY, f64::INFINITY)).unwrap())
        .collect();
    let spread = fluxes.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - fluxes.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let rel = spread / fluxes[0].abs();
    let l = 5.0;
    let cut = p.a() + 10.0 * p.beam_width(l);
    let oracle = trapezoid(|y| fd_current(|a, b| phi(&p, a, b), l, y, 1e-4).0, -cut, 0.0, 1_000_001);
    let oracle_rel = (fluxes[0] - oracle).abs() / oracle.abs();
    verdict(
        rel <= 1e-6 && oracle_rel <= 1e-6,
        format!("lower flux {fluxes:?}: relative spread {rel:e} (tol 1e-6); vs trapezoid oracle {oracle_rel:e}"),
    )
}

fn verify_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, threads: &str| {
        let out = dir.path().join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_slitlab"))
            .args(["verify", "--out"])
            .arg(&out)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        let text = std::fs::read_to_string(out.join("verify.json")).unwrap();
        (status.status.code(), text)
    };
    let (c1, a) = run("one", "1");
    let (c2, b) = run("two", "4");
    let same = without_timestamp(&a) == without_timestamp(&b);
    verdict(
        same && c1 == Some(0) && c2 == Some(0),
        format!("two verify runs (1 and 4 workers): identical modulo timestamp {same}, exit codes {c1:?} {c2:?}"),
    )
}

type Criterion = (u8, &'static str, fn() -> Verdict);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "zero symmetry-line current", zero_symmetry_line_current),
        (2, "mirror equivalence", mirror_equivalence),
        (3, "half-plane norm additivity", norm_additivity),
        (4, "one-slit norm non-additivity", norm_non_additivity),
        (5, "trajectory confinement", trajectory_confinement),
        (6, "no crossing / ordering", trajectory_ordering),
        (7, "integrator accuracy", integrator_accuracy),
        (8, "gradient consistency", gradient_consistency),
        (9, "tangent swap", tangent_swap_invariants),
        (10, "duality relation", duality_relation),
        (11, "per-region flux conservation", region_flux_conservation),
        (12, "determinism", verify_determinism),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let v = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| verdict(false, format!("panicked: {:?}", e.downcast_ref::<String>())));
        let mark = if v.passed { "PASS" } else { "FAIL" };
        if !v.passed {
            failed += 1;
        }
        println!("criterion {id:>2} {mark} {name}: {}", v.summary);
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
