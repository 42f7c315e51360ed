//! Concurrent arm + continuum-segment tracking loop.
//!
//! Each inner step linearizes the tip map, stacks the RCM tube and increment
//! limits, solves the constrained DLS problem with ADMM and applies the full
//! increment. Waypoints that do not reach the tip tolerance within the step
//! budget are logged and skipped.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::constraints::{build_joint_limits, build_rcm, stack, JointLimitConfig, RcmConfig, RowLabel};
use crate::error::{Error, Result};
use crate::kinematics::{arm_part, Joints, Pose, SystemModel};
use crate::solver::{
    compute_tolerances, resolve_rho, solve, AdmmReport, AdmmSettings, AdmmState, DlmProblem, Rho,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskMode {
    /// Tip position only (3 rows).
    #[default]
    Position,
    /// Tip position plus orientation held at its value on entry (6 rows).
    Pose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    /// Tip tolerance (mm).
    pub mte: f64,
    pub rcm: RcmConfig,
    /// Increment bounds; `current_cable` is replaced by the live value each step.
    pub limits: JointLimitConfig,
    pub lambda: f64,
    pub admm: AdmmSettings,
    pub max_inner_steps: usize,
    #[serde(default)]
    pub task: TaskMode,
    /// Millimetres per length unit of the QP handed to the solver.
    #[serde(default = "default_qp_length_unit")]
    pub qp_length_unit: f64,
}

fn default_qp_length_unit() -> f64 {
    1000.0
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mte > 0.0) {
            return Err(Error::param(format!("mte must be > 0, got {}", self.mte)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::param(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.qp_length_unit > 0.0) || !self.qp_length_unit.is_finite() {
            return Err(Error::param(format!("qp_length_unit must be > 0, got {}", self.qp_length_unit)));
        }
        if self.max_inner_steps == 0 {
            return Err(Error::param("max_inner_steps must be positive"));
        }
        self.rcm.validate()?;
        self.limits.validate()?;
        self.admm.validate()
    }
}

/// Joint values with the poses they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub theta: Joints,
    pub cdm_base_pose: Pose,
    pub tip_pose: Pose,
}

impl SystemState {
    pub fn new(model: &SystemModel, theta: Joints) -> Result<Self> {
        Ok(Self {
            cdm_base_pose: model.cdm_base_pose(&theta),
            tip_pose: model.tip_pose(&theta)?,
            theta,
        })
    }

    pub fn tip(&self) -> Vector3<f64> {
        self.tip_pose.translation
    }

    pub fn cable(&self) -> f64 {
        self.theta[6]
    }
}

pub fn tip_error(state: &SystemState, target: &Vector3<f64>) -> f64 {
    (target - state.tip()).norm()
}

/// Rotation vector taking `current` to `target`, in the base frame.
fn orientation_error(current: &Matrix3<f64>, target: &Matrix3<f64>) -> Vector3<f64> {
    Rotation3::from_matrix(&(target * current.transpose())).scaled_axis()
}

/// Everything checked about one accepted step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Joint values after the step.
    pub theta: Joints,
    pub admm_iterations: usize,
    pub converged: bool,
    pub rho: f64,
    pub tip_error: f64,
    pub rcm_offset: f64,
    pub cable: f64,
    /// Cable length before the numerical clamp to `[0, cable_max]`.
    pub cable_unclamped: f64,
    /// Largest positive part of `A Δθ − b`.
    pub max_violation: f64,
    /// Primal tolerance, in QP units.
    pub eps_pri: f64,
    /// Primal tolerance of the RCM rows converted to millimetres.
    pub eps_pri_mm: f64,
    pub min_slack: f64,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: SystemState,
    pub report: AdmmReport,
    pub problem: DlmProblem,
    pub record: StepRecord,
}

/// Current `(J, Δx)` for the task rows.
fn task_system(
    model: &SystemModel,
    state: &SystemState,
    target: &Vector3<f64>,
    target_rotation: Option<&Matrix3<f64>>,
    task: TaskMode,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let jac = model.combined_jacobian(&state.theta)?;
    let dp = target - state.tip();
    Ok(match task {
        TaskMode::Position => (
            DMatrix::from_fn(3, 7, |i, j| jac[(i, j)]),
            DVector::from_column_slice(dp.as_slice()),
        ),
        TaskMode::Pose => {
            let rot = target_rotation.copied().unwrap_or(state.tip_pose.rotation);
            let dw = orientation_error(&state.tip_pose.rotation, &rot);
            (
                DMatrix::from_fn(6, 7, |i, j| jac[(i, j)]),
                DVector::from_column_slice(&[dp.x, dp.y, dp.z, dw.x, dw.y, dw.z]),
            )
        }
    })
}

/// The constrained DLS problem for one step: task rows at the current state,
/// RCM rows stacked over the increment limits.
///
/// Lengths (tip displacement, RCM rows, cable travel) are expressed in units of
/// `qp_length_unit` mm; angles stay in radians. The solution's cable entry is
/// in the same unit.
pub fn step_problem(
    model: &SystemModel,
    state: &SystemState,
    target: &Vector3<f64>,
    target_rotation: Option<&Matrix3<f64>>,
    config: &ControllerConfig,
) -> Result<DlmProblem> {
    let arm = arm_part(&state.theta);
    let rcm = build_rcm(&config.rcm, &model.robot, &arm, &state.cdm_base_pose)?;
    let limits = build_joint_limits(&config.limits.with_cable(state.cable()))?;
    let (mut a, mut b, labels) = stack(&[rcm, limits]).into_parts();
    let (mut jac, mut dx) = task_system(model, state, target, target_rotation, config.task)?;

    // Δθ_mm = diag(1, …, 1, s) Δθ_qp, then rescale rows carrying lengths by 1/s
    let s = config.qp_length_unit;
    jac.column_mut(6).scale_mut(s);
    a.column_mut(6).scale_mut(s);
    for r in 0..3 {
        jac.row_mut(r).scale_mut(1.0 / s);
        dx[r] /= s;
    }
    for (r, label) in labels.iter().enumerate() {
        if !matches!(label, RowLabel::ArmUpper | RowLabel::ArmLower) {
            a.row_mut(r).scale_mut(1.0 / s);
            b[r] /= s;
        }
    }
    DlmProblem::new(jac, dx, config.lambda, a, b)
}

/// One linearize–solve–integrate step toward `target`.
pub fn control_step(
    model: &SystemModel,
    state: &SystemState,
    target: &Vector3<f64>,
    config: &ControllerConfig,
    warm: Option<&AdmmState>,
) -> Result<StepOutcome> {
    let problem = step_problem(model, state, target, None, config)?;
    finish_step(model, state, target, config, problem, &config.admm, warm)
}

fn finish_step(
    model: &SystemModel,
    state: &SystemState,
    target: &Vector3<f64>,
    config: &ControllerConfig,
    problem: DlmProblem,
    settings: &AdmmSettings,
    warm: Option<&AdmmState>,
) -> Result<StepOutcome> {
    let report = solve(&problem, settings, warm)?;
    let step = &report.solution;
    let (eps_pri, _) = compute_tolerances(&report.final_state, &problem, report.rho_used, settings)?;

    let mut theta = state.theta + Joints::from_column_slice(step.as_slice());
    let cable_unclamped = state.theta[6] + step[6] * config.qp_length_unit;
    theta[6] = cable_unclamped.clamp(0.0, model.cdm.cable_max());
    let next = SystemState::new(model, theta)?;

    let record = StepRecord {
        theta,
        admm_iterations: report.iterations,
        converged: report.converged(),
        rho: report.rho_used,
        tip_error: tip_error(&next, target),
        rcm_offset: config.rcm.radial_offset(&next.cdm_base_pose),
        cable: next.cable(),
        cable_unclamped,
        max_violation: problem.max_violation(step),
        eps_pri,
        eps_pri_mm: eps_pri * config.qp_length_unit,
        min_slack: report.final_state.z.iter().copied().fold(f64::INFINITY, f64::min),
    };
    Ok(StepOutcome {
        state: next,
        report,
        problem,
        record,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointLog {
    pub index: usize,
    pub target: Vector3<f64>,
    pub reached: bool,
    pub inner_steps: usize,
    pub final_tip_error: f64,
    pub max_rcm_offset: f64,
    pub admm_iterations: Vec<usize>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingLog {
    pub waypoints: Vec<WaypointLog>,
    /// Every accepted step, in order, paired with its waypoint index.
    pub steps: Vec<(usize, StepRecord)>,
    pub final_theta: Joints,
    pub wall_time: Duration,
}

impl TrackingLog {
    pub fn reached(&self) -> usize {
        self.waypoints.iter().filter(|w| w.reached).count()
    }

    pub fn all_reached(&self) -> bool {
        self.reached() == self.waypoints.len()
    }

    pub fn max_tip_error(&self) -> f64 {
        self.waypoints.iter().map(|w| w.final_tip_error).fold(0.0, f64::max)
    }

    pub fn max_rcm_offset(&self) -> f64 {
        self.waypoints.iter().map(|w| w.max_rcm_offset).fold(0.0, f64::max)
    }

    pub fn max_admm_iterations(&self) -> usize {
        self.steps.iter().map(|(_, s)| s.admm_iterations).max().unwrap_or(0)
    }
}

/// Rescales a scaled dual iterate for a new penalty (`y = ρu` is kept).
fn carry_warm_start(state: &AdmmState, rho_old: f64, rho_new: f64) -> AdmmState {
    let mut warm = state.warm();
    warm.u *= rho_old / rho_new;
    warm
}

/// Visits every waypoint in order, warm-starting each solve from the last.
pub fn track_trajectory(
    model: &SystemModel,
    initial: &SystemState,
    waypoints: &[Vector3<f64>],
    config: &ControllerConfig,
) -> Result<TrackingLog> {
    if waypoints.is_empty() {
        return Err(Error::param("trajectory has no waypoints"));
    }
    config.validate()?;
    let started = Instant::now();
    let target_rotation = initial.tip_pose.rotation;
    let mut state = initial.clone();
    let mut warm: Option<(AdmmState, f64)> = None;
    let mut logs = Vec::with_capacity(waypoints.len());
    let mut steps = Vec::new();

    for (index, target) in waypoints.iter().enumerate() {
        let t0 = Instant::now();
        let mut admm_iterations = Vec::new();
        let mut max_rcm_offset = config.rcm.radial_offset(&state.cdm_base_pose);
        let mut inner = 0;
        while tip_error(&state, target) > config.mte && inner < config.max_inner_steps {
            let problem = step_problem(model, &state, target, Some(&target_rotation), config)?;
            let rho = resolve_rho(&problem, config.admm.rho)?;
            let settings = config.admm.with_rho(Rho::Fixed(rho));
            let carried = warm.as_ref().map(|(s, prev)| carry_warm_start(s, *prev, rho));
            let outcome = finish_step(model, &state, target, config, problem, &settings, carried.as_ref())?;
            admm_iterations.push(outcome.record.admm_iterations);
            max_rcm_offset = max_rcm_offset.max(outcome.record.rcm_offset);
            steps.push((index, outcome.record));
            warm = Some((outcome.report.final_state, rho));
            state = outcome.state;
            inner += 1;
        }
        let final_tip_error = tip_error(&state, target);
        logs.push(WaypointLog {
            index,
            target: *target,
            reached: final_tip_error <= config.mte,
            inner_steps: inner,
            final_tip_error,
            max_rcm_offset,
            admm_iterations,
            wall_time: t0.elapsed(),
        });
    }
    Ok(TrackingLog {
        waypoints: logs,
        steps,
        final_theta: state.theta,
        wall_time: started.elapsed(),
    })
}
