//! Screw-theory kinematics of the arm, the continuum segment mounted on its
//! flange, and the two combined.
//!
//! Twists are 6-vectors `[v; ω]` with `v = −ω × q`; Jacobian rows follow the
//! same order (linear rows first). Lengths are millimetres, arm joints radians,
//! the cable coordinate millimetres.

mod cdm;
mod screw;

pub use cdm::{cdm_tip_jacobian, CdmModel};
pub use screw::{
    adjoint, exp_twist, forward_kinematics, point_jacobian, skew, spatial_jacobian, Pose, RobotModel,
    Twist,
};

use nalgebra::{Matrix3x6, SMatrix, SVector, Vector3, Vector6};

use crate::error::Result;

/// Joint vector of the combined system: six arm angles then the cable length.
pub type Joints = SVector<f64, 7>;

pub type CombinedJacobian = SMatrix<f64, 6, 7>;

/// The arm and the continuum segment as one 7-DoF chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub robot: RobotModel,
    pub cdm: CdmModel,
}

pub fn arm_part(theta: &Joints) -> Vector6<f64> {
    theta.fixed_rows::<6>(0).into_owned()
}

impl SystemModel {
    pub fn new(robot: RobotModel, cdm: CdmModel) -> Self {
        Self { robot, cdm }
    }

    /// Pose of the CDM base (the arm's tool frame).
    pub fn cdm_base_pose(&self, theta: &Joints) -> Pose {
        forward_kinematics(&self.robot, &arm_part(theta))
    }

    pub fn tip_pose(&self, theta: &Joints) -> Result<Pose> {
        let base = self.cdm_base_pose(theta);
        Ok(base.compose(&self.cdm.tip_pose(theta[6])?))
    }

    pub fn tip_position(&self, theta: &Joints) -> Result<Vector3<f64>> {
        Ok(self.tip_pose(theta)?.translation)
    }

    /// `[J_arm | J_cdm]`: spatial arm columns transferred to the CDM tip point,
    /// then the cable column.
    pub fn combined_jacobian(&self, theta: &Joints) -> Result<CombinedJacobian> {
        combined_jacobian(&self.robot, &self.cdm, theta)
    }
}

pub fn combined_jacobian(robot: &RobotModel, cdm: &CdmModel, theta: &Joints) -> Result<CombinedJacobian> {
    let arm = arm_part(theta);
    let base = forward_kinematics(robot, &arm);
    let tip = base.compose(&cdm.tip_pose(theta[6])?).translation;
    let spatial = spatial_jacobian(robot, &arm);

    let mut out = CombinedJacobian::zeros();
    out.fixed_view_mut::<3, 6>(0, 0)
        .copy_from(&transfer_to_point(&spatial, &tip));
    out.fixed_view_mut::<3, 6>(3, 0)
        .copy_from(&spatial.fixed_view::<3, 6>(3, 0));
    out.fixed_view_mut::<6, 1>(0, 6)
        .copy_from(&cdm_tip_jacobian(cdm, theta[6], &base)?);
    Ok(out)
}

/// Linear velocity rows `v + ω × p` of a point rigidly attached to the last link.
pub(crate) fn transfer_to_point(spatial: &nalgebra::Matrix6<f64>, point: &Vector3<f64>) -> Matrix3x6<f64> {
    spatial.fixed_view::<3, 6>(0, 0) - skew(point) * spatial.fixed_view::<3, 6>(3, 0)
}

/// Foot of the perpendicular from `rcm_center` onto the CDM base axis (the
/// base frame's z-axis), with its signed distance from the base origin.
pub fn closest_point_on_tool_axis(cdm_base_pose: &Pose, rcm_center: &Vector3<f64>) -> (Vector3<f64>, f64) {
    let axis = cdm_base_pose.rotation.column(2).into_owned();
    let origin = cdm_base_pose.translation;
    let t = (rcm_center - origin).dot(&axis);
    (origin + axis * t, t)
}

/// Jacobian of the closest-point map `θ ↦ x_c(θ)`: the material-point velocity
/// plus the slide of the foot point along the axis as the shaft moves.
pub fn closest_point_jacobian(robot: &RobotModel, theta: &Vector6<f64>, rcm_center: &Vector3<f64>) -> Matrix3x6<f64> {
    let pose = forward_kinematics(robot, theta);
    let (xc, _) = closest_point_on_tool_axis(&pose, rcm_center);
    let d = pose.rotation.column(2).into_owned();
    let u = rcm_center - xc;
    let spatial = spatial_jacobian(robot, theta);
    let material = transfer_to_point(&spatial, &xc);
    let mut out = material;
    for j in 0..6 {
        let w = spatial.fixed_view::<3, 1>(3, j).into_owned();
        // t = (c − x_m)·d, with t = 0 at the current foot point
        let dt = -d.dot(&material.column(j)) + u.dot(&w.cross(&d));
        out.set_column(j, &(material.column(j) + d * dt));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::seeded;
    use nalgebra::Matrix3;
    use rand::Rng;

    pub(crate) fn ur5_system() -> SystemModel {
        SystemModel::new(RobotModel::ur5(), CdmModel::default())
    }

    fn random_joints<R: Rng>(rng: &mut R) -> Joints {
        let mut q = Joints::zeros();
        for i in 0..6 {
            q[i] = rng.random_range(-3.0..3.0);
        }
        q[6] = rng.random_range(0.5..8.5);
        q
    }

    /// Spatial angular velocity from central differences of a rotation.
    fn fd_angular(r_plus: &Matrix3<f64>, r_minus: &Matrix3<f64>, r: &Matrix3<f64>, h: f64) -> Vector3<f64> {
        let w = (r_plus - r_minus) / (2.0 * h) * r.transpose();
        Vector3::new(w[(2, 1)] - w[(1, 2)], w[(0, 2)] - w[(2, 0)], w[(1, 0)] - w[(0, 1)]) * 0.5
    }

    fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
        (a - b).abs() / scale.max(1.0)
    }

    #[test]
    fn combined_jacobian_matches_finite_differences() {
        let sys = ur5_system();
        let mut rng = seeded(21);
        let h = 1e-6;
        for _ in 0..100 {
            let q = random_joints(&mut rng);
            let jac = sys.combined_jacobian(&q).unwrap();
            let pose = sys.tip_pose(&q).unwrap();
            let scale = jac.abs().max();
            for c in 0..7 {
                let mut qp = q;
                let mut qm = q;
                qp[c] += h;
                qm[c] -= h;
                let pp = sys.tip_pose(&qp).unwrap();
                let pm = sys.tip_pose(&qm).unwrap();
                let lin = (pp.translation - pm.translation) / (2.0 * h);
                let ang = fd_angular(&pp.rotation, &pm.rotation, &pose.rotation, h);
                for r in 0..3 {
                    assert!(rel_err(jac[(r, c)], lin[r], scale) <= 1e-5, "lin ({r},{c})");
                    assert!(rel_err(jac[(r + 3, c)], ang[r], scale) <= 1e-5, "ang ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn combined_shape_and_cable_column() {
        let sys = ur5_system();
        let q = Joints::from_column_slice(&[0.1, -1.2, 1.5, -1.9, -1.57, 0.3, 4.0]);
        let jac = sys.combined_jacobian(&q).unwrap();
        assert_eq!(jac.shape(), (6, 7));
        let base = sys.cdm_base_pose(&q);
        let col = cdm_tip_jacobian(&sys.cdm, 4.0, &base).unwrap();
        assert_eq!(jac.column(6).into_owned(), col);
    }

    #[test]
    fn cable_column_vanishes_with_flat_tip_map() {
        // a polynomial with constant position and angle has ∂p/∂l = 0 everywhere
        let flat = CdmModel::Polynomial {
            cable_max: 9.0,
            x: vec![0.0],
            z: vec![35.0],
            angle: vec![0.0],
        };
        let q = Joints::from_column_slice(&[0.1, -1.2, 1.5, -1.9, -1.57, 0.3, 4.0]);
        let jac = combined_jacobian(&RobotModel::ur5(), &flat, &q).unwrap();
        assert!(jac.column(6).norm() < 1e-12);
        let jac = combined_jacobian(&RobotModel::ur5(), &CdmModel::default(), &q).unwrap();
        assert!(jac.column(6).norm() > 1e-3);
    }

    #[test]
    fn arm_columns_agree_with_point_jacobian_at_tip() {
        let sys = ur5_system();
        let mut rng = seeded(22);
        for _ in 0..20 {
            let q = random_joints(&mut rng);
            let jac = sys.combined_jacobian(&q).unwrap();
            let tip = sys.tip_position(&q).unwrap();
            let pj = point_jacobian(&sys.robot, &arm_part(&q), &tip);
            let lifted = jac.fixed_view::<3, 6>(0, 0).into_owned();
            assert!((lifted - pj).abs().max() < 1e-9);
            let ang = jac.fixed_view::<3, 6>(3, 0).into_owned();
            let spatial = spatial_jacobian(&sys.robot, &arm_part(&q));
            assert!((ang - spatial.fixed_view::<3, 6>(3, 0)).abs().max() < 1e-12);
        }
    }

    #[test]
    fn cable_out_of_range_propagates() {
        let sys = ur5_system();
        let mut q = Joints::zeros();
        q[6] = 9.5;
        assert!(sys.combined_jacobian(&q).is_err());
        q[6] = -0.1;
        assert!(sys.tip_pose(&q).is_err());
    }

    #[test]
    fn closest_point_cases() {
        let pose = Pose::identity();
        let on_axis = Vector3::new(0.0, 0.0, -40.0);
        let (p, t) = closest_point_on_tool_axis(&pose, &on_axis);
        assert!((p - on_axis).norm() < 1e-15);
        assert_eq!(t, -40.0);
        let off = Vector3::new(1.0, 0.0, 5.0);
        let (p, t) = closest_point_on_tool_axis(&pose, &off);
        assert!((p - Vector3::new(0.0, 0.0, 5.0)).norm() < 1e-15);
        assert!(((p - off).norm() - 1.0).abs() < 1e-15);
        assert_eq!(t, 5.0);
    }

    #[test]
    fn closest_point_jacobian_matches_finite_differences() {
        let robot = RobotModel::ur5();
        let mut rng = seeded(24);
        let h = 1e-6;
        for _ in 0..100 {
            let q = arm_part(&random_joints(&mut rng));
            let pose = robot.forward(&q);
            let c = pose.transform_point(&Vector3::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-60.0..0.0),
            ));
            let jac = closest_point_jacobian(&robot, &q, &c);
            let scale = jac.abs().max().max(1.0);
            for col in 0..6 {
                let mut qp = q;
                let mut qm = q;
                qp[col] += h;
                qm[col] -= h;
                let fd = (closest_point_on_tool_axis(&robot.forward(&qp), &c).0
                    - closest_point_on_tool_axis(&robot.forward(&qm), &c).0)
                    / (2.0 * h);
                for r in 0..3 {
                    assert!(rel_err(jac[(r, col)], fd[r], scale) <= 1e-5);
                }
            }
        }
    }

    #[test]
    fn closest_point_jacobian_drops_axial_sliding() {
        // moving the foot point along the shaft does not move the closest point
        let robot = RobotModel::ur5();
        let q = Vector6::new(0.1, -1.2, 1.5, -1.9, -1.57, 0.3);
        let pose = robot.forward(&q);
        let c = pose.translation - pose.rotation.column(2) * 30.0;
        let jac = closest_point_jacobian(&robot, &q, &c);
        let material = point_jacobian(&robot, &q, &c);
        let d = pose.rotation.column(2).into_owned();
        assert!((d.transpose() * jac).norm() < 1e-9);
        assert!((d.transpose() * material).norm() > 1.0);
    }

    #[test]
    fn closest_point_beats_dense_sampling() {
        let mut rng = seeded(23);
        for _ in 0..20 {
            let q = random_joints(&mut rng);
            let pose = RobotModel::ur5().forward(&arm_part(&q));
            let c = pose.translation
                + Vector3::new(
                    rng.random_range(-50.0..50.0),
                    rng.random_range(-50.0..50.0),
                    rng.random_range(-50.0..50.0),
                );
            let (p, t) = closest_point_on_tool_axis(&pose, &c);
            let axis = pose.rotation.column(2).into_owned();
            let best = (p - c).norm();
            // dense sweep around the claimed parameter
            for k in -10_000..=10_000 {
                let s = t + k as f64 * 1e-3;
                let d = (pose.translation + axis * s - c).norm();
                assert!(best <= d + 1e-8);
            }
        }
    }
}
