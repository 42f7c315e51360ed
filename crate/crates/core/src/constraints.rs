//! Linear inequality rows `A Δθ ≤ b` over the 7 joint increments: the
//! polygonal remote-centre-of-motion tube and the per-step increment limits.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{closest_point_jacobian, closest_point_on_tool_axis, Pose, RobotModel};

/// Columns of every constraint row: six arm joints and the cable.
pub const COLUMNS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowLabel {
    Rcm,
    ArmUpper,
    CableUpper,
    ArmLower,
    CableLower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraints {
    a: DMatrix<f64>,
    b: DVector<f64>,
    labels: Vec<RowLabel>,
}

impl LinearConstraints {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, labels: Vec<RowLabel>) -> Result<Self> {
        if a.ncols() != COLUMNS {
            return Err(Error::dim(format!("constraint rows must have {COLUMNS} columns, got {}", a.ncols())));
        }
        if a.nrows() != b.len() || b.len() != labels.len() {
            return Err(Error::dim(format!(
                "row counts disagree: A has {}, b has {}, labels has {}",
                a.nrows(),
                b.len(),
                labels.len()
            )));
        }
        Ok(Self { a, b, labels })
    }

    pub fn empty() -> Self {
        Self {
            a: DMatrix::zeros(0, COLUMNS),
            b: DVector::zeros(0),
            labels: Vec::new(),
        }
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn labels(&self) -> &[RowLabel] {
        &self.labels
    }

    pub fn rows(&self) -> usize {
        self.b.len()
    }

    pub fn into_parts(self) -> (DMatrix<f64>, DVector<f64>, Vec<RowLabel>) {
        (self.a, self.b, self.labels)
    }

    /// Largest positive part of `A Δθ − b`.
    pub fn max_violation(&self, delta_theta: &DVector<f64>) -> f64 {
        (&self.a * delta_theta - &self.b)
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(*v))
    }
}

/// Vertical concatenation, order and labels preserved.
pub fn stack(parts: &[LinearConstraints]) -> LinearConstraints {
    let rows: usize = parts.iter().map(LinearConstraints::rows).sum();
    let mut a = DMatrix::zeros(rows, COLUMNS);
    let mut b = DVector::zeros(rows);
    let mut labels = Vec::with_capacity(rows);
    let mut at = 0;
    for p in parts {
        a.rows_mut(at, p.rows()).copy_from(&p.a);
        b.rows_mut(at, p.rows()).copy_from(&p.b);
        labels.extend_from_slice(&p.labels);
        at += p.rows();
    }
    LinearConstraints { a, b, labels }
}

/// Screw-hole tube the tool shaft must keep passing through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcmConfig {
    pub center: Vector3<f64>,
    pub axis: Vector3<f64>,
    pub epsilon_rcm: f64,
    pub polygon_sides: usize,
}

impl RcmConfig {
    pub fn validate(&self) -> Result<()> {
        if (self.axis.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::param(format!("RCM axis must be a unit vector, got norm {}", self.axis.norm())));
        }
        if !(self.epsilon_rcm > 0.0) {
            return Err(Error::param(format!("epsilon_rcm must be > 0, got {}", self.epsilon_rcm)));
        }
        if self.polygon_sides < 3 {
            return Err(Error::param(format!("polygon needs at least 3 sides, got {}", self.polygon_sides)));
        }
        Ok(())
    }

    /// Distance from the hole axis of the tool-axis point closest to the centre.
    pub fn radial_offset(&self, cdm_base_pose: &Pose) -> f64 {
        let (xc, _) = closest_point_on_tool_axis(cdm_base_pose, &self.center);
        let d = xc - self.center;
        (d - self.axis * d.dot(&self.axis)).norm()
    }

    /// Worst radial offset still inside the polygon.
    pub fn polygon_circumradius(&self) -> f64 {
        self.epsilon_rcm / (PI / self.polygon_sides as f64).cos()
    }
}

/// Per-step increment bounds and the cable travel left at the current state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointLimitConfig {
    pub arm_upper: Vector6<f64>,
    pub arm_lower: Vector6<f64>,
    pub cable_max: f64,
    pub current_cable: f64,
}

impl JointLimitConfig {
    pub fn symmetric(bound: f64, cable_max: f64, current_cable: f64) -> Self {
        Self {
            arm_upper: Vector6::repeat(bound),
            arm_lower: Vector6::repeat(-bound),
            cable_max,
            current_cable,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.arm_lower.iter().zip(self.arm_upper.iter()).any(|(l, u)| !(*l <= 0.0 && 0.0 <= *u)) {
            return Err(Error::param("arm increment bounds must satisfy lower <= 0 <= upper"));
        }
        if !(0.0..=self.cable_max).contains(&self.current_cable) {
            return Err(Error::CableOutOfRange(self.current_cable, self.cable_max));
        }
        Ok(())
    }

    pub fn with_cable(&self, current_cable: f64) -> Self {
        Self {
            current_cable,
            ..self.clone()
        }
    }
}

/// `m` unit normals perpendicular to `axis`, spaced by `2π/m`.
pub fn polygon_normals(axis: &Vector3<f64>, sides: usize) -> Vec<Vector3<f64>> {
    let axis = axis.normalize();
    // seed with the coordinate direction least aligned with the axis
    let seed = (0..3)
        .map(|i| Vector3::ith(i, 1.0))
        .min_by(|a, b| a.dot(&axis).abs().total_cmp(&b.dot(&axis).abs()))
        .expect("three candidates");
    let e1 = (seed - axis * seed.dot(&axis)).normalize();
    let e2 = axis.cross(&e1);
    (0..sides)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / sides as f64;
            e1 * t.cos() + e2 * t.sin()
        })
        .collect()
}

/// `(vᵢ·J_cp) Δθ_arm ≤ ε + vᵢ·u`, `u = center − x_c`; zero cable column.
///
/// `J_cp` is the Jacobian of the closest point itself, so each row is the
/// first-order model of the post-step offset even when the shaft is tilted
/// against the hole axis and slides through it.
pub fn build_rcm(
    config: &RcmConfig,
    robot: &RobotModel,
    theta: &Vector6<f64>,
    cdm_base_pose: &Pose,
) -> Result<LinearConstraints> {
    config.validate()?;
    let (xc, _) = closest_point_on_tool_axis(cdm_base_pose, &config.center);
    let jcp = closest_point_jacobian(robot, theta, &config.center);
    let u = config.center - xc;
    let normals = polygon_normals(&config.axis, config.polygon_sides);
    let m = normals.len();
    let mut a = DMatrix::zeros(m, COLUMNS);
    let mut b = DVector::zeros(m);
    for (i, v) in normals.iter().enumerate() {
        let row = v.transpose() * jcp;
        a.view_mut((i, 0), (1, 6)).copy_from(&row);
        b[i] = config.epsilon_rcm + v.dot(&u);
    }
    LinearConstraints::new(a, b, vec![RowLabel::Rcm; m])
}

/// 14 rows: `[I 0; 0 1; −I 0; 0 −1] Δθ ≤ [upper; c_max − c; −lower; c]`.
pub fn build_joint_limits(config: &JointLimitConfig) -> Result<LinearConstraints> {
    config.validate()?;
    let mut a = DMatrix::zeros(14, COLUMNS);
    let mut b = DVector::zeros(14);
    let mut labels = Vec::with_capacity(14);
    for j in 0..6 {
        a[(j, j)] = 1.0;
        b[j] = config.arm_upper[j];
        labels.push(RowLabel::ArmUpper);
    }
    a[(6, 6)] = 1.0;
    b[6] = config.cable_max - config.current_cable;
    labels.push(RowLabel::CableUpper);
    for j in 0..6 {
        a[(7 + j, j)] = -1.0;
        b[7 + j] = -config.arm_lower[j];
        labels.push(RowLabel::ArmLower);
    }
    a[(13, 6)] = -1.0;
    b[13] = config.current_cable;
    labels.push(RowLabel::CableLower);
    LinearConstraints::new(a, b, labels)
}
