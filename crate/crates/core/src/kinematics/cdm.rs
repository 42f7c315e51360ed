use nalgebra::{Matrix3, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use super::Pose;
use crate::error::{Error, Result};

/// Step for the central differences of polynomial tip maps (mm).
const FD_STEP: f64 = 1e-4;

/// Bend angles below this use the Taylor series of the arc map.
const SMALL_ANGLE: f64 = 1e-3;

/// Cable length to tip pose of the planar continuum segment, in its base frame.
///
/// The segment bends in the base x–z plane about the base y-axis; the
/// straight configuration points along +z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CdmModel {
    /// Constant-curvature arc; bend angle grows linearly with cable length and
    /// reaches `max_bend` (rad) at `cable_max`.
    Arc {
        length: f64,
        cable_max: f64,
        max_bend: f64,
    },
    /// Ascending-power polynomials in the cable length for tip x, tip z and the
    /// bend angle (rad). Derivatives by central differences.
    Polynomial {
        cable_max: f64,
        x: Vec<f64>,
        z: Vec<f64>,
        angle: Vec<f64>,
    },
}

impl Default for CdmModel {
    fn default() -> Self {
        CdmModel::Arc {
            length: 35.0,
            cable_max: 9.0,
            max_bend: std::f64::consts::FRAC_PI_2,
        }
    }
}

fn horner(coeffs: &[f64], l: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * l + c)
}

fn rot_y(phi: f64) -> Matrix3<f64> {
    let (s, c) = phi.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Arc tip `(x, z)` and its derivative in the bend angle.
fn arc_point(length: f64, phi: f64) -> ([f64; 2], [f64; 2]) {
    if phi.abs() < SMALL_ANGLE {
        let p2 = phi * phi;
        let x = length * phi * (0.5 - p2 / 24.0 + p2 * p2 / 720.0);
        let z = length * (1.0 - p2 / 6.0 + p2 * p2 / 120.0);
        let dx = length * (0.5 - p2 / 8.0 + p2 * p2 / 144.0);
        let dz = length * phi * (-1.0 / 3.0 + p2 / 30.0);
        return ([x, z], [dx, dz]);
    }
    let (s, c) = phi.sin_cos();
    let x = length * (1.0 - c) / phi;
    let z = length * s / phi;
    let dx = length * (phi * s - (1.0 - c)) / (phi * phi);
    let dz = length * (phi * c - s) / (phi * phi);
    ([x, z], [dx, dz])
}

impl CdmModel {
    pub fn cable_max(&self) -> f64 {
        match self {
            CdmModel::Arc { cable_max, .. } | CdmModel::Polynomial { cable_max, .. } => *cable_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CdmModel::Arc {
                length,
                cable_max,
                max_bend,
            } => {
                if !(*length > 0.0) || !(*cable_max > 0.0) || !max_bend.is_finite() {
                    return Err(Error::param(format!(
                        "arc model needs length > 0, cable_max > 0 and finite max_bend \
                         (got {length}, {cable_max}, {max_bend})"
                    )));
                }
            }
            CdmModel::Polynomial {
                cable_max, x, z, angle,
            } => {
                if !(*cable_max > 0.0) {
                    return Err(Error::param(format!("cable_max must be > 0, got {cable_max}")));
                }
                if x.is_empty() || z.is_empty() || angle.is_empty() {
                    return Err(Error::param("polynomial model needs at least one coefficient per curve"));
                }
                if x.iter().chain(z).chain(angle).any(|c| !c.is_finite()) {
                    return Err(Error::param("polynomial coefficients must be finite"));
                }
            }
        }
        Ok(())
    }

    fn check_range(&self, l: f64) -> Result<()> {
        let max = self.cable_max();
        if !(0.0..=max).contains(&l) {
            return Err(Error::CableOutOfRange(l, max));
        }
        Ok(())
    }

    /// Bend angle (rad) at cable length `l`.
    pub fn bend_angle(&self, l: f64) -> Result<f64> {
        self.check_range(l)?;
        Ok(match self {
            CdmModel::Arc {
                cable_max, max_bend, ..
            } => max_bend * l / cable_max,
            CdmModel::Polynomial { angle, .. } => horner(angle, l),
        })
    }

    /// Tip position in the CDM base frame (mm).
    pub fn tip_position(&self, l: f64) -> Result<Vector3<f64>> {
        self.check_range(l)?;
        Ok(match self {
            CdmModel::Arc { length, .. } => {
                let ([x, z], _) = arc_point(*length, self.bend_angle(l)?);
                Vector3::new(x, 0.0, z)
            }
            CdmModel::Polynomial { x, z, .. } => Vector3::new(horner(x, l), 0.0, horner(z, l)),
        })
    }

    pub fn tip_pose(&self, l: f64) -> Result<Pose> {
        Ok(Pose {
            rotation: rot_y(self.bend_angle(l)?),
            translation: self.tip_position(l)?,
        })
    }

    /// `(∂p/∂l, ∂φ/∂l)` in the CDM base frame.
    pub fn derivative(&self, l: f64) -> Result<(Vector3<f64>, f64)> {
        self.check_range(l)?;
        match self {
            CdmModel::Arc {
                length,
                cable_max,
                max_bend,
            } => {
                let rate = max_bend / cable_max;
                let (_, [dx, dz]) = arc_point(*length, rate * l);
                Ok((Vector3::new(dx, 0.0, dz) * rate, rate))
            }
            CdmModel::Polynomial { x, z, angle, cable_max } => {
                let lo = (l - FD_STEP).max(0.0);
                let hi = (l + FD_STEP).min(*cable_max);
                let h = hi - lo;
                let d = |c: &[f64]| (horner(c, hi) - horner(c, lo)) / h;
                Ok((Vector3::new(d(x), 0.0, d(z)), d(angle)))
            }
        }
    }
}

/// `[R ∂p/∂l; R ŷ ∂φ/∂l]`: tip twist per unit cable length, in the arm base frame.
pub fn cdm_tip_jacobian(model: &CdmModel, l: f64, cdm_base_pose: &Pose) -> Result<Vector6<f64>> {
    let (dp, dphi) = model.derivative(l)?;
    let lin = cdm_base_pose.rotation * dp;
    let ang = cdm_base_pose.rotation.column(1) * dphi;
    Ok(Vector6::new(lin.x, lin.y, lin.z, ang.x, ang.y, ang.z))
}
