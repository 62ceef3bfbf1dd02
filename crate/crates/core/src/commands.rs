//! Subcommand implementations: compute, then write CSV/JSON/SVG files.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{launch_window, Config};
use crate::decomposition::{compare_patterns, flux_report, image_field, norm_accounting, Boundary};
use crate::duality::{duality_report, weight_sweep};
use crate::ensembles::{
    endpoint_comparison, ensemble_occupancy, hidden_pair_ensemble, net_pair_crossings, swapped_occupancy,
    tangent_swap,
};
use crate::error::Result;
use crate::field::{Field, Side, Slit, WaveField};
use crate::output::{envelope, render_csv, render_json, render_svg, write_file, Cell, Series};
use crate::params::Model;
use crate::slice::{intensity_slice, linspace};
use crate::trajectory::{integrate_batch, launch_grid, ordering_check, Trajectory};
use crate::verify::{run_verify, VerifyReport};

/// Slices used for ordering and occupancy tables.
pub const REPORT_SLICES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Pattern,
    Trajectories,
    Decompose,
    Mirror,
    Swap,
    Duality,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pattern => "pattern",
            Command::Trajectories => "trajectories",
            Command::Decompose => "decompose",
            Command::Mirror => "mirror",
            Command::Swap => "swap",
            Command::Duality => "duality",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// False only when `verify` found a failing criterion.
    pub passed: bool,
    pub verify: Option<VerifyReport>,
}

struct Writer<'a> {
    dir: &'a Path,
    command: Command,
    hash: String,
    timestamp: &'a str,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
        let text = render_csv(self.command.name(), &self.hash, columns, rows)?;
        self.files.push(write_file(self.dir, name, &text)?);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, payload: &T) -> Result<()> {
        let v = envelope(self.command.name(), &self.hash, self.timestamp, payload)?;
        self.files.push(write_file(self.dir, name, &render_json(&v))?);
        Ok(())
    }

    fn svg(&mut self, name: &str, text: &str) -> Result<()> {
        self.files.push(write_file(self.dir, name, text)?);
        Ok(())
    }
}

/// Runs `command` and writes its files into `out_dir`.
pub fn run_command(command: Command, config: &Config, out_dir: &Path, timestamp: &str) -> Result<Outcome> {
    let mut w = Writer { dir: out_dir, command, hash: config.hash(), timestamp, files: Vec::new() };
    let mut passed = true;
    let mut verify = None;
    match command {
        Command::Pattern => pattern(config, &mut w)?,
        Command::Trajectories => trajectories(config, &mut w)?,
        Command::Decompose => decompose(config, &mut w)?,
        Command::Mirror => mirror(config, &mut w)?,
        Command::Swap => swap(config, &mut w)?,
        Command::Duality => duality(config, &mut w)?,
        Command::Verify => {
            let report = run_verify(config);
            passed = report.all_passed;
            w.json("verify.json", &report)?;
            verify = Some(report);
        }
    }
    Ok(Outcome { files: w.files, passed, verify })
}

fn pattern(config: &Config, w: &mut Writer<'_>) -> Result<()> {
    let p = config.params();
    let fields = [
        ("oneSlit1", WaveField::one_slit(p, Slit::First)),
        ("oneSlit2", WaveField::one_slit(p, Slit::Second)),
        ("twoSlit", WaveField::two_slit(p)),
        ("weighted", WaveField::weighted(p, config.weights.c1(), config.weights.c2())?),
    ];
    let grid = config.y_grid();
    let mut series = Vec::new();
    for (name, field) in fields {
        let s = intensity_slice(&field, config.l, &grid)?;
        let rows: Vec<Vec<Cell>> = s
            .y_grid
            .iter()
            .zip(&s.intensity)
            .zip(&s.amplitude)
            .map(|((&y, &i), a)| vec![y.into(), i.into(), a.re.into(), a.im.into()])
            .collect();
        w.csv(&format!("pattern_{name}.csv"), &["y", "intensity", "re", "im"], &rows)?;
        series.push((name, s.y_grid.iter().copied().zip(s.intensity.iter().copied()).collect::<Vec<_>>()));
    }
    let series: Vec<Series<'_>> = series.into_iter().map(|(label, points)| Series { label, points }).collect();
    w.svg("pattern.svg", &render_svg(&format!("intensity at x = {}", config.l), "y", "|psi|^2", &series))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TrajectorySummary {
    traj_id: usize,
    start_y: f64,
    end_x: f64,
    end_y: f64,
    points: usize,
    status: crate::trajectory::TrajectoryStatus,
}

fn summarize(trajs: &[Trajectory]) -> Vec<TrajectorySummary> {
    trajs
        .iter()
        .enumerate()
        .map(|(traj_id, t)| TrajectorySummary {
            traj_id,
            start_y: t.start_y,
            end_x: t.end().0,
            end_y: t.end().1,
            points: t.points.len(),
            status: t.status,
        })
        .collect()
}

/// n launches per half-plane plus the axis, in increasing y.
fn two_slit_family(config: &Config) -> Result<Vec<Trajectory>> {
    let p = config.params();
    let field = WaveField::two_slit(p);
    let t = &config.trajectories;
    let window = launch_window(&p, t.x0);
    let mut starts = launch_grid(&field, t.x0, Side::Lower, t.n, window)?;
    starts.push((t.x0, 0.0));
    starts.extend(launch_grid(&field, t.x0, Side::Upper, t.n, window)?);
    integrate_batch(&field, &starts, config.l, &t.settings()).into_iter().collect()
}

fn trajectories(config: &Config, w: &mut Writer<'_>) -> Result<()> {
    let trajs = two_slit_family(config)?;
    let t = &config.trajectories;
    let rows: Vec<Vec<Cell>> = trajs
        .iter()
        .enumerate()
        .flat_map(|(id, tr)| tr.points.iter().map(move |&(x, y)| vec![id.into(), x.into(), y.into()]))
        .collect();
    w.csv("trajectories.csv", &["trajId", "x", "y"], &rows)?;
    let slices = linspace(t.x0, config.l, REPORT_SLICES);
    let ordering = ordering_check(&trajs, &slices, t.abs_tol);
    let completed = trajs.iter().filter(|t| t.is_completed()).count();
    w.json(
        "trajectories.json",
        &json!({
            "count": trajs.len(),
            "completed": completed,
            "ordering": ordering,
            "trajectories": summarize(&trajs),
        }),
    )?;
    let series: Vec<Series<'_>> = trajs.iter().map(|t| Series { label: "trajectory", points: t.points.clone() }).collect();
    w.svg("trajectories.svg", &render_svg("current lines of the two-slit field", "x", "y", &series))
}

fn decompose(config: &Config, w: &mut Writer<'_>) -> Result<()> {
    let p = config.params();
    let window = (config.y_window[0], config.y_window[1]);
    let windowed = norm_accounting(&p, config.l, window)?;
    let full_line = match p.model() {
        Model::Gaussian => Some(norm_accounting(&p, config.l, (f64::NEG_INFINITY, f64::INFINITY))?),
        Model::Point => None,
    };
    let flux = flux_report(&WaveField::two_slit(p), config.l, window, (p.domain_start(), config.l), 64)?;
    let one_slit_flux = flux_report(&WaveField::one_slit(p, Slit::First), config.l, window, (p.domain_start(), config.l), 64)?;
    w.json(
        "decompose.json",
        &json!({
            "windowed": windowed,
            "fullLine": full_line,
            "flux": flux,
            "oneSlit1Flux": one_slit_flux,
        }),
    )
}

fn mirror(config: &Config, w: &mut Writer<'_>) -> Result<()> {
    let p = config.params();
    let hi = config.y_window[1];
    if hi <= 0.0 {
        return Err(crate::error::SlitError::domain("mirror needs a window reaching into y > 0"));
    }
    let grid = linspace(config.y_window[0].max(0.0), hi, config.grid_n);
    let phi = WaveField::two_slit(p);
    let neumann = image_field(p, Boundary::Neumann);
    let dirichlet = image_field(p, Boundary::Dirichlet);
    let l = config.l;
    let n_cmp = compare_patterns(&neumann, &phi, l, &grid)?;
    let d_cmp = compare_patterns(&dirichlet, &phi, l, &grid)?;
    let axis_contrast = if grid[0] == 0.0 {
        Some(phi.value(l, 0.0)?.norm_sqr() - dirichlet.value(l, 0.0)?.norm_sqr())
    } else {
        None
    };
    w.json(
        "mirror.json",
        &json!({
            "l": l,
            "neumann": n_cmp,
            "dirichlet": d_cmp,
            "axisContrast": axis_contrast,
        }),
    )?;
    let rows = grid
        .iter()
        .map(|&y| {
            Ok(vec![
                y.into(),
                phi.value(l, y)?.norm_sqr().into(),
                neumann.value(l, y)?.norm_sqr().into(),
                dirichlet.value(l, y)?.norm_sqr().into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    w.csv("mirror.csv", &["y", "twoSlit", "neumann", "dirichlet"], &rows)
}

fn swap(config: &Config, w: &mut Writer<'_>) -> Result<()> {
    let p = config.params();
    let t = &config.trajectories;
    let ens = hidden_pair_ensemble(&p, t.n, t.x0, config.l, &t.settings())?;
    let swapped: Vec<_> = ens.pairs.iter().map(tangent_swap).collect();
    let mut rows = Vec::new();
    for (pair, sw) in ens.pairs.iter().zip(&swapped) {
        for i in 0..pair.x_grid.len() {
            rows.push(vec![
                pair.id.into(),
                pair.x_grid[i].into(),
                pair.y1[i].into(),
                pair.y2[i].into(),
                sw.lower[i].into(),
                sw.upper[i].into(),
            ]);
        }
    }
    w.csv("swap.csv", &["pairId", "x", "y1", "y2", "yLowerSwapped", "yUpperSwapped"], &rows)?;
    let slices = linspace(t.x0, config.l, REPORT_SLICES);
    let field = WaveField::two_slit(p);
    let upper_starts = launch_grid(&field, t.x0, Side::Upper, t.n, launch_window(&p, t.x0))?;
    let bohmian: Vec<Trajectory> = integrate_batch(&field, &upper_starts, config.l, &t.settings())
        .into_iter()
        .collect::<Result<_>>()?;
    let pairs: Vec<Value> = ens
        .pairs
        .iter()
        .map(|pair| {
            json!({
                "pairId": pair.id,
                "startY": pair.traj1.start_y,
                "crossings": pair.crossings,
                "netSignedCrossings": net_pair_crossings(pair, config.l),
            })
        })
        .collect();
    w.json(
        "swap.json",
        &json!({
            "pairs": pairs,
            "excluded": ens.excluded,
            "occupancyRaw": ensemble_occupancy(&ens.pairs, &slices)?,
            "occupancySwapped": swapped_occupancy(&swapped, &slices)?,
            "endpointComparison": endpoint_comparison(&swapped, &bohmian),
        }),
    )
}

fn duality(config: &Config, w: &mut Writer<'_>) -> Result<()> {
    let p = config.params();
    let grid = config.y_grid();
    let configured = duality_report(&p, config.weights.c1(), config.weights.c2(), config.l, &grid)?;
    let sweep = weight_sweep()
        .into_iter()
        .map(|(c1, c2)| duality_report(&p, c1, c2, config.l, &grid))
        .collect::<Result<Vec<_>>>()?;
    let max_sum = sweep.iter().map(|r| r.duality_sum).fold(configured.duality_sum, f64::max);
    w.json(
        "duality.json",
        &json!({
            "relation": "P^2 + V^2 <= 1",
            "configured": configured,
            "sweep": sweep,
            "maxDualitySum": max_sum,
        }),
    )
}
