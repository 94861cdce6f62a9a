use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{
    fit_growth, norm_dx, norm_l2, norm_x2_l1_tabulated, norm_xweighted, time_integrate, GrowthFit,
    NormLabel, NormSeries, UniformGrid,
};
use crate::reference::{fv_reference, steepest_front};
use crate::solver::{integrate, Trajectory};
use crate::transform::BasisTable;
use crate::CoeffVec;

use super::config::{FluxChoice, RunConfig};
use super::output::{csv_table, csv_text, ensure_dir, fmt_f64, write_json, write_text};
use super::CliError;

/// Half width of the window around the reference front used for the
/// front-region error.
const FRONT_HALF_WIDTH: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct IntegratedNorms {
    /// `∫_0^T ‖u‖² dt`
    pub l2_sq: f64,
    /// `∫_0^T ‖D_x u‖² dt`
    pub dx_sq: f64,
    /// `∫_0^T ‖x u‖² dt`
    pub x_sq: f64,
    /// `∫_0^T ‖x² u‖_{L¹} dt`
    pub x2_l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "state", content = "message")]
pub enum RunStatus {
    Completed,
    Aborted(String),
}

/// One run, self-describing: the embedded config reproduces it.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub status: RunStatus,
    pub epsilon: f64,
    pub cutoff: Option<usize>,
    pub final_time: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
    pub integrated: IntegratedNorms,
    pub final_coefficients: Vec<f64>,
    /// `(t, h)` per accepted step.
    pub step_sizes: Vec<(f64, f64)>,
    /// `‖u‖`, `‖D_x u‖`, `‖x u‖`, `‖x² u‖_{L¹}` at every accepted time.
    #[serde(skip)]
    pub series: Vec<NormSeries>,
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

impl RunRecord {
    pub fn final_state(&self) -> CoeffVec {
        CoeffVec::from_slice(self.config.alpha, &self.final_coefficients)
            .expect("accepted states are finite")
    }

    pub fn series(&self, label: NormLabel) -> &NormSeries {
        self.series
            .iter()
            .find(|s| s.label == label)
            .expect("every label is recorded")
    }
}

fn norm_series(
    traj: &Trajectory,
    grid: &UniformGrid,
    table: &BasisTable,
) -> crate::Result<Vec<NormSeries>> {
    let mut cols = [vec![], vec![], vec![], vec![]];
    for (i, raw) in traj.states.iter().enumerate() {
        let u = traj.state(i);
        cols[0].push(norm_l2(&u));
        cols[1].push(norm_dx(&u));
        cols[2].push(norm_xweighted(&u));
        cols[3].push(norm_x2_l1_tabulated(raw, grid, table));
    }
    let labels = [
        NormLabel::L2,
        NormLabel::DxL2,
        NormLabel::XL2,
        NormLabel::X2L1,
    ];
    labels
        .into_iter()
        .zip(cols)
        .map(|(label, values)| NormSeries::new(label, traj.times.clone(), values))
        .collect()
}

fn integrated(series: &[NormSeries]) -> crate::Result<IntegratedNorms> {
    if series[0].times.len() < 2 {
        return Ok(IntegratedNorms::default());
    }
    let v: Vec<f64> = series
        .iter()
        .map(time_integrate)
        .collect::<crate::Result<_>>()?;
    Ok(IntegratedNorms {
        l2_sq: v[0],
        dx_sq: v[1],
        x_sq: v[2],
        x2_l1: v[3],
    })
}

fn record_from(
    cfg: &RunConfig,
    traj: &Trajectory,
    status: RunStatus,
    started: Instant,
) -> Result<RunRecord, CliError> {
    let grid = UniformGrid::new(cfg.grid_l, cfg.grid_dx)?;
    let table = BasisTable::new(&traj.spec, grid.points());
    let series = norm_series(traj, &grid, &table)?;
    Ok(RunRecord {
        config: cfg.resolved(),
        status,
        epsilon: traj.epsilon,
        cutoff: traj.cutoff,
        final_time: traj.final_time(),
        accepted_steps: traj.step_sizes.len(),
        rejected_steps: traj.stats.rejected,
        rhs_evals: traj.stats.rhs_evals,
        integrated: integrated(&series)?,
        final_coefficients: traj.states.last().expect("nonempty").clone(),
        step_sizes: traj.step_sizes.clone(),
        series,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Validates, integrates and computes the norm diagnostics; writes nothing.
pub fn simulate(cfg: &RunConfig) -> Result<RunRecord, CliError> {
    cfg.validate()?;
    let started = Instant::now();
    match integrate(&cfg.scheme_config()?) {
        Ok(traj) => record_from(cfg, &traj, RunStatus::Completed, started),
        Err(aborted) => match &aborted.partial {
            Some(partial) => {
                let record = record_from(
                    cfg,
                    partial,
                    RunStatus::Aborted(aborted.error.to_string()),
                    started,
                )?;
                Err(CliError::Aborted {
                    message: aborted.to_string(),
                    record: Box::new(record),
                })
            }
            None => Err(aborted.error.into()),
        },
    }
}

/// The exact inviscid solution for the stationary problem, the
/// finite-volume oracle for Burgers.
fn reference_on(cfg: &RunConfig, t: f64, xs: &[f64]) -> Result<Vec<f64>, CliError> {
    Ok(match cfg.flux {
        FluxChoice::Zero => xs.iter().map(|x| (-x * x).exp()).collect(),
        FluxChoice::Burgers => {
            let profile = fv_reference(t, &cfg.oracle())?;
            xs.iter().map(|&x| profile.interpolate(x)).collect()
        }
    })
}

fn profile_csv(xs: &[f64], u: &[f64], reference: &[f64]) -> String {
    csv_table(
        &["x", "u_n", "u_ref"],
        xs.iter()
            .zip(u)
            .zip(reference)
            .map(|((x, u), r)| vec![fmt_f64(*x), fmt_f64(*u), fmt_f64(*r)]),
    )
}

fn norms_csv(record: &RunRecord) -> String {
    let s = &record.series;
    csv_table(
        &["t", "norm_l2", "norm_dx", "norm_x", "norm_x2_l1"],
        (0..s[0].times.len()).map(|i| {
            std::iter::once(s[0].times[i])
                .chain(s.iter().map(|c| c.values[i]))
                .map(fmt_f64)
                .collect()
        }),
    )
}

#[derive(Serialize)]
struct Timing {
    wall_clock_seconds: f64,
}

fn write_run_files(record: &RunRecord) -> Result<(), CliError> {
    let cfg = &record.config;
    let dir = &cfg.output_dir;
    ensure_dir(dir)?;
    let grid = UniformGrid::new(cfg.grid_l, cfg.grid_dx)?;
    let u = record.final_state();
    let table = BasisTable::new(&u.spec(), grid.points());
    let u_grid = table.synthesize(u.values());
    let reference = reference_on(cfg, record.final_time, grid.points())?;
    write_text(
        dir,
        "profile.csv",
        &profile_csv(grid.points(), &u_grid, &reference),
    )?;
    write_text(dir, "norms.csv", &norms_csv(record))?;
    write_json(dir, "summary.json", record)?;
    write_json(
        dir,
        "timing.json",
        &Timing {
            wall_clock_seconds: record.wall_clock_seconds,
        },
    )?;
    Ok(())
}

/// Runs one configuration and writes `profile.csv`, `norms.csv`,
/// `summary.json` and `timing.json` into `output_dir`. An aborted run still
/// writes its partial record before the error is returned.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunRecord, CliError> {
    match simulate(cfg) {
        Ok(record) => {
            write_run_files(&record)?;
            Ok(record)
        }
        Err(CliError::Aborted { message, record }) => {
            write_run_files(&record)?;
            Err(CliError::Aborted { message, record })
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub result: Result<IntegratedNorms, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepGrowth {
    pub ns: Vec<usize>,
    pub l2_sq: Option<GrowthFit>,
    pub dx_sq: Option<GrowthFit>,
    pub x_sq: Option<GrowthFit>,
    pub x2_l1: Option<GrowthFit>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub growth: SweepGrowth,
}

fn growth_of(rows: &[SweepRow]) -> SweepGrowth {
    let ok: Vec<(usize, IntegratedNorms)> = rows
        .iter()
        .filter_map(|r| r.result.as_ref().ok().map(|v| (r.n, *v)))
        .collect();
    let fit = |pick: fn(&IntegratedNorms) -> f64| {
        let pts: Vec<(f64, f64)> = ok.iter().map(|(n, v)| (*n as f64, pick(v))).collect();
        fit_growth(&pts).ok()
    };
    SweepGrowth {
        ns: ok.iter().map(|(n, _)| *n).collect(),
        l2_sq: fit(|v| v.l2_sq),
        dx_sq: fit(|v| v.dx_sq),
        x_sq: fit(|v| v.x_sq),
        x2_l1: fit(|v| v.x2_l1),
    }
}

/// Runs every `N` in `sweep_ns` concurrently; a failed row is recorded and
/// the sweep carries on. Writes `table.csv` and `growth.json`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepReport, CliError> {
    let ns = match &cfg.sweep_ns {
        Some(ns) if ns.len() >= 2 => ns.clone(),
        _ => {
            return Err(CliError::Config(
                "sweep needs at least two sweep_ns values".into(),
            ))
        }
    };
    cfg.validate()?;
    let rows: Vec<SweepRow> = ns
        .par_iter()
        .map(|&n| SweepRow {
            n,
            result: simulate(&cfg.with_n(n))
                .map(|r| r.integrated)
                .map_err(|e| e.to_string()),
        })
        .collect();
    let growth = growth_of(&rows);

    let dir = &cfg.output_dir;
    ensure_dir(dir)?;
    let table = csv_table(
        &["N", "status", "l2_sq", "dx_sq", "x_sq", "x2_l1", "error"],
        rows.iter().map(|r| {
            let mut line = vec![r.n.to_string()];
            match &r.result {
                Ok(v) => {
                    line.push("ok".into());
                    line.extend([v.l2_sq, v.dx_sq, v.x_sq, v.x2_l1].map(fmt_f64));
                    line.push(String::new());
                }
                Err(msg) => {
                    line.push("failed".into());
                    line.extend(std::iter::repeat_n(String::new(), 4));
                    line.push(csv_text(msg));
                }
            }
            line
        }),
    );
    write_text(dir, "table.csv", &table)?;
    write_json(dir, "growth.json", &growth)?;
    Ok(SweepReport { rows, growth })
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub config: RunConfig,
    pub final_time: f64,
    /// `∫ |u_N − u_ref| dx` over the grid.
    pub l1: f64,
    /// `(∫ |u_N − u_ref|² dx)^{1/2}` over the grid.
    pub l2: f64,
    /// Location of the steepest descent of the reference.
    pub front_location: f64,
    pub front_half_width: f64,
    /// L¹ error restricted to `|x − front_location| ≤ front_half_width`.
    pub front_l1: f64,
    pub total_variation: f64,
    pub reference_total_variation: f64,
    /// `total_variation − reference_total_variation`.
    pub oscillation: f64,
}

fn total_variation(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Compares the final state with the reference on the output grid and
/// writes `errors.json`.
pub fn cmd_compare(cfg: &RunConfig) -> Result<CompareReport, CliError> {
    let record = simulate(cfg)?;
    let grid = UniformGrid::new(cfg.grid_l, cfg.grid_dx)?;
    let xs = grid.points();
    let u = record.final_state();
    let u_grid = BasisTable::new(&u.spec(), xs).synthesize(u.values());
    let reference = reference_on(cfg, record.final_time, xs)?;
    let diff: Vec<f64> = u_grid
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .collect();
    let sq: Vec<f64> = diff.iter().map(|d| d * d).collect();
    let (_, front) = steepest_front(xs, &reference);
    let front_l1 = xs
        .iter()
        .zip(&diff)
        .filter(|(x, _)| (*x - front).abs() <= FRONT_HALF_WIDTH)
        .map(|(_, d)| d)
        .sum::<f64>()
        * grid.dx;
    let tv = total_variation(&u_grid);
    let tv_ref = total_variation(&reference);
    let report = CompareReport {
        config: record.config.clone(),
        final_time: record.final_time,
        l1: grid.trapezoid(&diff),
        l2: grid.trapezoid(&sq).sqrt(),
        front_location: front,
        front_half_width: FRONT_HALF_WIDTH,
        front_l1,
        total_variation: tv,
        reference_total_variation: tv_ref,
        oscillation: tv - tv_ref,
    };
    ensure_dir(&cfg.output_dir)?;
    write_json(&cfg.output_dir, "errors.json", &report)?;
    Ok(report)
}
