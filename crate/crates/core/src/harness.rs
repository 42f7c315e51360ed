//! Experiments: waypoint tracking, the penalty sweep, the (MTE, RCME)
//! sensitivity grid and spectral diagnostics, with CSV/JSON output.
//!
//! CSV files start with a `# seed=` comment line and have fixed column orders
//! (the field order of the row structs below). Wall-clock times only appear in
//! the JSON summaries, so CSVs from identical runs are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::Vector3;
use rand::Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{read_trajectory, Experiment, RhoSweepSpec, SensitivitySpec};
use crate::controller::{step_problem, track_trajectory, ControllerConfig, SystemState, TrackingLog, StepRecord};
use crate::error::{Error, Result};
use crate::instances::{log_uniform, random_problem, seeded, synthetic_lesion_path};
use crate::solver::{convergence_diagnostics, resolve_rho, solve, AdmmReport, Rho};

/// Waypoints in a synthesized lesion loop.
pub const LESION_WAYPOINTS: usize = 36;

/// Largest bounding-box side of a synthesized lesion loop (mm).
pub const LESION_EXTENT: f64 = 60.0;

/// Picks the path to track: an explicit file, else a loop synthesized from an
/// explicit seed, else the experiment's trajectory file, else a loop from the
/// experiment seed. Returns the waypoints and the seed recorded in outputs: for a
/// file, its `# seed=` header unless a seed is given explicitly.
pub fn resolve_waypoints(
    exp: &Experiment,
    trajectory: Option<&Path>,
    seed: Option<u64>,
) -> Result<(Vec<Vector3<f64>>, u64)> {
    let synth = |seed: u64| -> Result<Vec<Vector3<f64>>> {
        let start = SystemState::new(&exp.model, exp.initial)?.tip();
        Ok(synthetic_lesion_path(&mut seeded(seed), &start, LESION_WAYPOINTS, LESION_EXTENT))
    };
    match (trajectory, seed, &exp.trajectory_path) {
        (Some(path), seed, _) => Ok((read_trajectory(path)?, seed.or(read_seed(path)?).unwrap_or(exp.seed))),
        (None, Some(seed), _) => Ok((synth(seed)?, seed)),
        (None, None, Some(path)) => Ok((read_trajectory(path)?, read_seed(path)?.unwrap_or(exp.seed))),
        (None, None, None) => Ok((synth(exp.seed)?, exp.seed)),
    }
}

/// Counts of accepted steps that break a feasibility invariant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub steps: usize,
    /// Radial offset above `ε_RCM · sec(π/m) + ε_pri`.
    pub rcm_violations: usize,
    /// Cable outside `[0, cable_max]` by more than `ε_pri` before clamping.
    pub cable_violations: usize,
    /// `A Δθ > b + ε_pri` somewhere.
    pub feasibility_violations: usize,
    pub negative_slack: usize,
    /// Not an invariant; reported alongside.
    pub unconverged_steps: usize,
}

impl InvariantReport {
    pub fn check(steps: &[(usize, StepRecord)], config: &ControllerConfig, cable_max: f64) -> Self {
        let bound = config.rcm.polygon_circumradius();
        let mut r = Self {
            steps: steps.len(),
            ..Self::default()
        };
        for (_, s) in steps {
            r.rcm_violations += usize::from(s.rcm_offset > bound + s.eps_pri_mm);
            r.cable_violations +=
                usize::from(s.cable_unclamped < -s.eps_pri_mm || s.cable_unclamped > cable_max + s.eps_pri_mm);
            r.feasibility_violations += usize::from(s.max_violation > s.eps_pri);
            r.negative_slack += usize::from(s.min_slack < 0.0);
            r.unconverged_steps += usize::from(!s.converged);
        }
        r
    }

    pub fn passed(&self) -> bool {
        self.rcm_violations == 0 && self.cable_violations == 0 && self.feasibility_violations == 0 && self.negative_slack == 0
    }
}

/// One line of `waypoints.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointRow {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub reached: bool,
    pub inner_steps: usize,
    pub final_tip_error: f64,
    pub max_rcm_offset: f64,
    pub max_admm_iterations: usize,
    pub total_admm_iterations: usize,
}

/// One line of `steps.csv`: the state after an accepted step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub waypoint: usize,
    pub theta_1: f64,
    pub theta_2: f64,
    pub theta_3: f64,
    pub theta_4: f64,
    pub theta_5: f64,
    pub theta_6: f64,
    pub cable: f64,
    pub cable_unclamped: f64,
    pub tip_error: f64,
    pub rcm_offset: f64,
    pub admm_iterations: usize,
    pub converged: bool,
    pub rho: f64,
    pub max_violation: f64,
    pub eps_pri: f64,
    pub eps_pri_mm: f64,
    pub min_slack: f64,
}

impl StepRow {
    pub fn new(waypoint: usize, s: &StepRecord) -> Self {
        let t = &s.theta;
        Self {
            waypoint,
            theta_1: t[0],
            theta_2: t[1],
            theta_3: t[2],
            theta_4: t[3],
            theta_5: t[4],
            theta_6: t[5],
            cable: t[6],
            cable_unclamped: s.cable_unclamped,
            tip_error: s.tip_error,
            rcm_offset: s.rcm_offset,
            admm_iterations: s.admm_iterations,
            converged: s.converged,
            rho: s.rho,
            max_violation: s.max_violation,
            eps_pri: s.eps_pri,
            eps_pri_mm: s.eps_pri_mm,
            min_slack: s.min_slack,
        }
    }

    pub fn theta(&self) -> crate::kinematics::Joints {
        crate::kinematics::Joints::from([
            self.theta_1, self.theta_2, self.theta_3, self.theta_4, self.theta_5, self.theta_6, self.cable,
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackSummary {
    pub seed: u64,
    pub waypoints: usize,
    pub reached: usize,
    pub mte: f64,
    pub rcme: f64,
    pub lambda: f64,
    pub max_tip_error: f64,
    pub max_rcm_offset: f64,
    /// `ε_RCM · sec(π/m)`.
    pub rcm_bound: f64,
    pub max_admm_iterations: usize,
    pub invariants: InvariantReport,
    pub total_time_s: f64,
    pub mean_waypoint_time_s: f64,
    pub waypoint_time_s: Vec<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct TrackRun {
    pub log: TrackingLog,
    pub summary: TrackSummary,
}

impl TrackRun {
    pub fn waypoint_rows(&self) -> Vec<WaypointRow> {
        self.log
            .waypoints
            .iter()
            .map(|w| WaypointRow {
                index: w.index,
                x: w.target.x,
                y: w.target.y,
                z: w.target.z,
                reached: w.reached,
                inner_steps: w.inner_steps,
                final_tip_error: w.final_tip_error,
                max_rcm_offset: w.max_rcm_offset,
                max_admm_iterations: w.admm_iterations.iter().copied().max().unwrap_or(0),
                total_admm_iterations: w.admm_iterations.iter().sum(),
            })
            .collect()
    }

    pub fn step_rows(&self) -> Vec<StepRow> {
        self.log.steps.iter().map(|(w, s)| StepRow::new(*w, s)).collect()
    }

    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    /// Writes `waypoints.csv`, `steps.csv` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        let seed = Some(self.summary.seed);
        write_csv(&dir.join("waypoints.csv"), seed, &self.waypoint_rows())?;
        write_csv(&dir.join("steps.csv"), seed, &self.step_rows())?;
        write_json(&dir.join("summary.json"), &self.summary)
    }
}

/// Tracks `waypoints` from the experiment's initial state under `config`.
pub fn run_track(exp: &Experiment, config: &ControllerConfig, waypoints: &[Vector3<f64>], seed: u64) -> Result<TrackRun> {
    let initial = SystemState::new(&exp.model, exp.initial)?;
    let log = track_trajectory(&exp.model, &initial, waypoints, config)?;
    let invariants = InvariantReport::check(&log.steps, config, exp.model.cdm.cable_max());
    let waypoint_time_s: Vec<f64> = log.waypoints.iter().map(|w| w.wall_time.as_secs_f64()).collect();
    let summary = TrackSummary {
        seed,
        waypoints: log.waypoints.len(),
        reached: log.reached(),
        mte: config.mte,
        rcme: config.rcm.epsilon_rcm,
        lambda: config.lambda,
        max_tip_error: log.max_tip_error(),
        max_rcm_offset: log.max_rcm_offset(),
        rcm_bound: config.rcm.polygon_circumradius(),
        max_admm_iterations: log.max_admm_iterations(),
        invariants,
        total_time_s: log.wall_time.as_secs_f64(),
        mean_waypoint_time_s: waypoint_time_s.iter().sum::<f64>() / waypoint_time_s.len() as f64,
        waypoint_time_s,
        passed: log.all_reached() && invariants.passed(),
    };
    Ok(TrackRun { log, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Grid,
    /// ρ recomputed as ρ* at every step; `rho` holds its value at the first step.
    Optimal,
}

/// One line of `rho_sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: SweepKind,
    pub rho: f64,
    /// Largest ADMM iteration count over the controller steps.
    pub max_iterations: usize,
    pub total_iterations: usize,
    pub steps: usize,
    /// Every step converged.
    pub converged: bool,
    pub reached: bool,
    pub invariants_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoSweepSummary {
    pub seed: u64,
    pub target: [f64; 3],
    pub grid_points: usize,
    pub grid_converged: usize,
    /// ρ* at the initial state.
    pub rho_star: f64,
    /// Grid value with the fewest iterations (smallest ρ on ties).
    pub rho_sharp: f64,
    pub min_grid_iterations: usize,
    pub optimal_iterations: usize,
    /// `optimal_iterations / min_grid_iterations`.
    pub ratio: f64,
    pub total_time_s: f64,
    pub passed: bool,
}

/// Allowed ratio between iterations at ρ* and the best grid value.
pub const RHO_STAR_RATIO_LIMIT: f64 = 1.5;

#[derive(Debug, Clone)]
pub struct RhoSweep {
    /// Grid rows in grid order, then the optimal row.
    pub rows: Vec<SweepRow>,
    pub summary: RhoSweepSummary,
}

impl RhoSweep {
    pub fn grid_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.kind == SweepKind::Grid)
    }

    pub fn optimal_row(&self) -> &SweepRow {
        self.rows.iter().find(|r| r.kind == SweepKind::Optimal).expect("sweep has an optimal row")
    }

    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        write_csv(&dir.join("rho_sweep.csv"), Some(self.summary.seed), &self.rows)?;
        write_json(&dir.join("summary.json"), &self.summary)
    }
}

/// The base controller with the sweep's tolerances and damping.
pub fn sweep_config(base: &ControllerConfig, spec: &RhoSweepSpec) -> ControllerConfig {
    let mut c = base.clone();
    c.mte = spec.mte;
    c.rcm.epsilon_rcm = spec.rcme;
    c.lambda = spec.lambda;
    c
}

fn sweep_target(exp: &Experiment, spec: &RhoSweepSpec) -> Result<Vector3<f64>> {
    Ok(SystemState::new(&exp.model, exp.initial)?.tip() + Vector3::from(spec.target_offset))
}

/// Single-target convergence runs at every grid penalty (in parallel) and at
/// ρ*. `config` should already carry the sweep tolerances, see [`sweep_config`].
pub fn run_rho_sweep(exp: &Experiment, config: &ControllerConfig, spec: &RhoSweepSpec, seed: u64) -> Result<RhoSweep> {
    spec.validate()?;
    let started = Instant::now();
    let initial = SystemState::new(&exp.model, exp.initial)?;
    let target = sweep_target(exp, spec)?;
    let cable_max = exp.model.cdm.cable_max();

    let run = |kind: SweepKind, rho: Rho| -> Result<SweepRow> {
        let mut c = config.clone();
        c.admm.rho = rho;
        let log = track_trajectory(&exp.model, &initial, &[target], &c)?;
        let checks = InvariantReport::check(&log.steps, &c, cable_max);
        let first_rho = log.steps.first().map(|(_, s)| s.rho).unwrap_or(f64::NAN);
        Ok(SweepRow {
            kind,
            rho: match rho {
                Rho::Fixed(r) => r,
                Rho::Auto => first_rho,
            },
            max_iterations: log.max_admm_iterations(),
            total_iterations: log.steps.iter().map(|(_, s)| s.admm_iterations).sum(),
            steps: log.steps.len(),
            converged: checks.unconverged_steps == 0,
            reached: log.all_reached(),
            invariants_ok: checks.passed(),
        })
    };

    let mut rows: Vec<SweepRow> = spec
        .grid()
        .into_par_iter()
        .map(|rho| run(SweepKind::Grid, Rho::Fixed(rho)))
        .collect::<Result<_>>()?;
    let optimal = run(SweepKind::Optimal, Rho::Auto)?;

    let problem = step_problem(&exp.model, &initial, &target, None, config)?;
    let rho_star = resolve_rho(&problem, Rho::Auto)?;
    let best = rows
        .iter()
        .min_by(|a, b| a.max_iterations.cmp(&b.max_iterations).then(a.rho.total_cmp(&b.rho)))
        .expect("grid is nonempty");
    let (rho_sharp, min_grid_iterations) = (best.rho, best.max_iterations);
    let grid_converged = rows.iter().filter(|r| r.converged && r.reached).count();
    let ratio = optimal.max_iterations as f64 / min_grid_iterations.max(1) as f64;
    let passed = grid_converged == rows.len()
        && rows.iter().all(|r| r.invariants_ok)
        && optimal.converged
        && optimal.reached
        && ratio <= RHO_STAR_RATIO_LIMIT;
    let summary = RhoSweepSummary {
        seed,
        target: target.into(),
        grid_points: rows.len(),
        grid_converged,
        rho_star,
        rho_sharp,
        min_grid_iterations,
        optimal_iterations: optimal.max_iterations,
        ratio,
        total_time_s: started.elapsed().as_secs_f64(),
        passed,
    };
    rows.push(optimal);
    Ok(RhoSweep { rows, summary })
}

/// One line of `sensitivity.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub mte: f64,
    pub rcme: f64,
    pub runtime_s: f64,
    pub reached: usize,
    pub waypoints: usize,
    pub max_tip_error: f64,
    pub max_rcm_offset: f64,
    pub max_admm_iterations: usize,
    pub invariants_ok: bool,
}

impl SensitivityRow {
    pub fn passed(&self) -> bool {
        self.reached == self.waypoints && self.invariants_ok
    }
}

#[derive(Debug, Clone)]
pub struct Sensitivity {
    pub seed: u64,
    pub rows: Vec<SensitivityRow>,
    pub runs: Vec<TrackRun>,
}

impl Sensitivity {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(SensitivityRow::passed)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        write_csv(&dir.join("sensitivity.csv"), Some(self.seed), &self.rows)
    }
}

/// Tracks the path once per `(mte, rcme)` row of the grid.
///
/// Rows run one after another so the reported runtimes are not skewed by
/// contention.
pub fn run_sensitivity(
    exp: &Experiment,
    base: &ControllerConfig,
    spec: &SensitivitySpec,
    waypoints: &[Vector3<f64>],
    seed: u64,
) -> Result<Sensitivity> {
    let mut rows = Vec::with_capacity(spec.grid.len());
    let mut runs = Vec::with_capacity(spec.grid.len());
    for &(mte, rcme) in &spec.grid {
        let mut c = base.clone();
        c.mte = mte;
        c.rcm.epsilon_rcm = rcme;
        c.lambda = spec.lambda;
        let run = run_track(exp, &c, waypoints, seed)?;
        let s = &run.summary;
        rows.push(SensitivityRow {
            mte,
            rcme,
            runtime_s: s.total_time_s,
            reached: s.reached,
            waypoints: s.waypoints,
            max_tip_error: s.max_tip_error,
            max_rcm_offset: s.max_rcm_offset,
            max_admm_iterations: s.max_admm_iterations,
            invariants_ok: s.invariants.passed(),
        });
        runs.push(run);
    }
    Ok(Sensitivity { seed, rows, runs })
}

/// One line of a residual history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub iteration: usize,
    pub primal: f64,
    pub dual: f64,
    pub objective: f64,
}

pub fn residual_rows(report: &AdmmReport) -> Vec<ResidualRow> {
    report
        .history
        .iter()
        .enumerate()
        .map(|(k, h)| ResidualRow {
            iteration: k + 1,
            primal: h.primal,
            dual: h.dual,
            objective: h.objective,
        })
        .collect()
}

/// Writes `iteration,primal,dual,objective` for every ADMM iteration.
pub fn emit_residual_history(report: &AdmmReport, path: &Path) -> Result<()> {
    write_csv(path, None, &residual_rows(report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistorySummary {
    pub label: String,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseSummary {
    pub seed: u64,
    /// Random `(J, λ, A, ρ)` draws with full-row-rank `A`.
    pub draws: usize,
    pub max_map_discrepancy: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    /// Robot problem at the initial state toward the sweep target.
    pub robot_constraint_rows: usize,
    pub robot_rho_star: f64,
    pub robot_gamma: f64,
    pub robot_map_discrepancy: f64,
    pub histories: Vec<HistorySummary>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct Diagnosis {
    pub summary: DiagnoseSummary,
    /// `(label, report)` per penalty, in the order 0.1, ρ*, 1, 5.
    pub reports: Vec<(String, AdmmReport)>,
}

impl Diagnosis {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        ensure_dir(dir)?;
        for ((_, report), h) in self.reports.iter().zip(&self.summary.histories) {
            emit_residual_history(report, &dir.join(&h.file))?;
        }
        write_json(&dir.join("diagnose.json"), &self.summary)
    }
}

/// Tolerance for the mapped-versus-direct spectrum comparison.
pub const MAP_TOLERANCE: f64 = 1e-8;

/// Spectral checks on `draws` seeded random problems, then cold solves of the
/// robot problem at ρ ∈ {0.1, ρ*, 1, 5}.
pub fn run_diagnose(exp: &Experiment, config: &ControllerConfig, spec: &RhoSweepSpec, seed: u64, draws: usize) -> Result<Diagnosis> {
    let mut rng = seeded(seed);
    let (mut max_map, mut gamma_min, mut gamma_max) = (0.0_f64, f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..draws {
        let n = rng.random_range(2..=7);
        let r = rng.random_range(1..=n);
        let m = rng.random_range(1..=n);
        let lambda = log_uniform(&mut rng, 1e-4, 1.0);
        let rho = log_uniform(&mut rng, 0.05, 10.0);
        let p = random_problem(&mut rng, m, n, r, lambda);
        let d = convergence_diagnostics(p.jacobian(), lambda, p.constraints_a(), rho)?;
        max_map = max_map.max(d.map_discrepancy);
        gamma_min = gamma_min.min(d.gamma);
        gamma_max = gamma_max.max(d.gamma);
    }

    let initial = SystemState::new(&exp.model, exp.initial)?;
    let target = sweep_target(exp, spec)?;
    let problem = step_problem(&exp.model, &initial, &target, None, config)?;
    let rho_star = resolve_rho(&problem, Rho::Auto)?;
    let robot = convergence_diagnostics(problem.jacobian(), problem.lambda(), problem.constraints_a(), rho_star)?;

    let penalties = [("0.1", 0.1), ("star", rho_star), ("1", 1.0), ("5", 5.0)];
    let mut reports = Vec::new();
    let mut histories = Vec::new();
    for (label, rho) in penalties {
        let report = solve(&problem, &config.admm.with_rho(Rho::Fixed(rho)), None)?;
        histories.push(HistorySummary {
            label: label.to_string(),
            rho,
            iterations: report.iterations,
            converged: report.converged(),
            file: format!("residuals_rho_{label}.csv"),
        });
        reports.push((label.to_string(), report));
    }

    let passed = max_map <= MAP_TOLERANCE
        && (draws == 0 || (gamma_min >= 0.5 && gamma_max < 1.0))
        && robot.map_discrepancy <= MAP_TOLERANCE
        && histories.iter().all(|h| h.converged);
    Ok(Diagnosis {
        summary: DiagnoseSummary {
            seed,
            draws,
            max_map_discrepancy: max_map,
            gamma_min,
            gamma_max,
            robot_constraint_rows: problem.num_constraints(),
            robot_rho_star: rho_star,
            robot_gamma: robot.gamma,
            robot_map_discrepancy: robot.map_discrepancy,
            histories,
            passed,
        },
        reports,
    })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes rows with a header line, preceded by `# seed=` when given.
pub fn write_csv<T: Serialize>(path: &Path, seed: Option<u64>, rows: &[T]) -> Result<()> {
    let mut out = Vec::new();
    if let Some(seed) = seed {
        out.extend_from_slice(format!("# seed={seed}\n").as_bytes());
    }
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    let out = writer.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads rows written by [`write_csv`], skipping `#` comment lines.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|row| {
            row.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                message: format!("line {}: {e}", e.position().map(|p| p.line()).unwrap_or(0)),
            })
        })
        .collect()
}

/// The `# seed=` header of a CSV, if present.
pub fn read_seed(path: &Path) -> Result<Option<u64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# seed="))
        .and_then(|s| s.trim().parse().ok()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Default output directory for a subcommand.
pub fn default_out_dir(kind: &str) -> PathBuf {
    Path::new("out").join(kind)
}
