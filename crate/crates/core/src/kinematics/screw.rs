use std::ops::Mul;

use nalgebra::{Matrix3, Matrix3x6, Matrix4, Matrix6, Vector3, Vector6};

use crate::error::{Error, Result};

pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Rigid transform; translation in millimetres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Checks orthonormality and `det = +1` to 1e−9.
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let gram_err = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
        let det = rotation.determinant();
        if gram_err > 1e-9 || (det - 1.0).abs() > 1e-9 {
            return Err(Error::param(format!(
                "rotation is not proper orthonormal (‖RᵀR − I‖max = {gram_err:.3e}, det = {det})"
            )));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn from_rotation(rotation: Matrix3<f64>) -> Self {
        Self {
            rotation,
            translation: Vector3::zeros(),
        }
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    pub fn from_homogeneous(m: &Matrix4<f64>) -> Self {
        Pose {
            rotation: m.fixed_view::<3, 3>(0, 0).into_owned(),
            translation: m.fixed_view::<3, 1>(0, 3).into_owned(),
        }
    }
}

impl Mul for Pose {
    type Output = Pose;

    fn mul(self, rhs: Pose) -> Pose {
        self.compose(&rhs)
    }
}

/// Revolute joint axis: unit direction `omega` through `point`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    omega: Vector3<f64>,
    point: Vector3<f64>,
}

impl Twist {
    pub fn revolute(omega: Vector3<f64>, point: Vector3<f64>) -> Result<Self> {
        let norm = omega.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!(
                "revolute axis must be a unit vector, got norm {norm}"
            )));
        }
        Ok(Self { omega, point })
    }

    pub fn omega(&self) -> &Vector3<f64> {
        &self.omega
    }

    pub fn point(&self) -> &Vector3<f64> {
        &self.point
    }

    /// `[−ω × q; ω]`.
    pub fn as_vector(&self) -> Vector6<f64> {
        let v = -self.omega.cross(&self.point);
        Vector6::new(v.x, v.y, v.z, self.omega.x, self.omega.y, self.omega.z)
    }

    /// The 4×4 matrix `ξ̂`.
    pub fn hat(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(&self.omega));
        m.fixed_view_mut::<3, 1>(0, 3)
            .copy_from(&(-self.omega.cross(&self.point)));
        m
    }
}

/// `exp(ξ̂ θ)` for a unit-axis twist: Rodrigues for the rotation, `(I − R) q`
/// for the translation (the pitch term vanishes for revolute joints).
pub fn exp_twist(twist: &Twist, theta: f64) -> Pose {
    let w = skew(&twist.omega);
    let rotation = Matrix3::identity() + w * theta.sin() + w * w * (1.0 - theta.cos());
    let translation = (Matrix3::identity() - rotation) * twist.point;
    Pose {
        rotation,
        translation,
    }
}

/// `Ad_g = [[R, p̂R], [0, R]]`.
pub fn adjoint(pose: &Pose) -> Matrix6<f64> {
    let mut ad = Matrix6::zeros();
    let r = pose.rotation;
    ad.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    ad.fixed_view_mut::<3, 3>(0, 3)
        .copy_from(&(skew(&pose.translation) * r));
    ad.fixed_view_mut::<3, 3>(3, 3).copy_from(&r);
    ad
}

/// Six revolute twists in the base frame plus the tool pose at zero joints.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    pub twists: [Twist; 6],
    pub home_pose: Pose,
    pub increment_lower: Vector6<f64>,
    pub increment_upper: Vector6<f64>,
}

/// UR5 link dimensions (mm).
const UR5_D1: f64 = 89.159;
const UR5_A2: f64 = 425.0;
const UR5_A3: f64 = 392.25;
const UR5_D4: f64 = 109.15;
const UR5_D5: f64 = 94.65;
const UR5_D6: f64 = 82.3;

/// Rigid shaft from the UR5 flange to the CDM base, along the flange z-axis (mm).
pub const DEFAULT_SHAFT_LENGTH: f64 = 150.0;

impl RobotModel {
    pub fn new(
        twists: [Twist; 6],
        home_pose: Pose,
        increment_lower: Vector6<f64>,
        increment_upper: Vector6<f64>,
    ) -> Result<Self> {
        if increment_lower.iter().zip(increment_upper.iter()).any(|(l, u)| !(*l <= 0.0 && 0.0 <= *u)) {
            return Err(Error::param("joint increment bounds must satisfy lower <= 0 <= upper"));
        }
        Ok(Self {
            twists,
            home_pose,
            increment_lower,
            increment_upper,
        })
    }

    /// UR5 with a straight shaft of [`DEFAULT_SHAFT_LENGTH`] ending at the CDM base,
    /// and ±0.05 rad increment bounds.
    pub fn ur5() -> Self {
        Self::ur5_with_shaft(DEFAULT_SHAFT_LENGTH)
    }

    pub fn ur5_with_shaft(shaft: f64) -> Self {
        let (h1, l1, l2, w1, h2, w2) = (UR5_D1, UR5_A2, UR5_A3, UR5_D4, UR5_D5, UR5_D6);
        let y = Vector3::y();
        let joint = |omega: Vector3<f64>, q: Vector3<f64>| Twist::revolute(omega, q).expect("unit axis");
        let twists = [
            joint(Vector3::z(), Vector3::zeros()),
            joint(y, Vector3::new(0.0, 0.0, h1)),
            joint(y, Vector3::new(l1, 0.0, h1)),
            joint(y, Vector3::new(l1 + l2, 0.0, h1)),
            joint(-Vector3::z(), Vector3::new(l1 + l2, w1, 0.0)),
            joint(y, Vector3::new(l1 + l2, 0.0, h1 - h2)),
        ];
        // flange frame at zero: x = −x₀, y = z₀, z = y₀; the shaft extends along z
        let rotation = Matrix3::new(-1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0);
        let flange = Vector3::new(l1 + l2, w1 + w2, h1 - h2);
        let home_pose = Pose {
            rotation,
            translation: flange + rotation.column(2) * shaft,
        };
        let bound = Vector6::repeat(0.05);
        Self {
            twists,
            home_pose,
            increment_lower: -bound,
            increment_upper: bound,
        }
    }

    pub fn forward(&self, theta: &Vector6<f64>) -> Pose {
        forward_kinematics(self, theta)
    }
}

/// `exp(ξ̂₁θ₁)···exp(ξ̂₆θ₆) g(0)`.
pub fn forward_kinematics(model: &RobotModel, theta: &Vector6<f64>) -> Pose {
    let chain = model
        .twists
        .iter()
        .zip(theta.iter())
        .fold(Pose::identity(), |acc, (tw, &q)| acc.compose(&exp_twist(tw, q)));
    chain.compose(&model.home_pose)
}

/// Columns `Ad(exp(ξ̂₁θ₁)···exp(ξ̂ᵢ₋₁θᵢ₋₁)) ξᵢ`.
pub fn spatial_jacobian(model: &RobotModel, theta: &Vector6<f64>) -> Matrix6<f64> {
    let mut jac = Matrix6::zeros();
    let mut prefix = Pose::identity();
    for (i, (tw, &q)) in model.twists.iter().zip(theta.iter()).enumerate() {
        jac.set_column(i, &(adjoint(&prefix) * tw.as_vector()));
        prefix = prefix.compose(&exp_twist(tw, q));
    }
    jac
}

/// Velocity Jacobian of a point (base frame) rigidly attached to the last link.
pub fn point_jacobian(robot: &RobotModel, theta: &Vector6<f64>, point: &Vector3<f64>) -> Matrix3x6<f64> {
    super::transfer_to_point(&spatial_jacobian(robot, theta), point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::seeded;
    use rand::Rng;
    use std::f64::consts::FRAC_PI_2;

    fn random_unit<R: Rng>(rng: &mut R) -> Vector3<f64> {
        loop {
            let v = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                return v / n;
            }
        }
    }

    fn random_pose<R: Rng>(rng: &mut R) -> Pose {
        let tw = Twist::revolute(
            random_unit(rng),
            Vector3::new(rng.random_range(-300.0..300.0), rng.random_range(-300.0..300.0), 0.0),
        )
        .unwrap();
        let mut p = exp_twist(&tw, rng.random_range(-3.0..3.0));
        p.translation += Vector3::new(rng.random_range(-100.0..100.0), 5.0, -7.0);
        p
    }

    fn random_theta<R: Rng>(rng: &mut R) -> Vector6<f64> {
        Vector6::from_fn(|_, _| rng.random_range(-3.0..3.0))
    }

    /// Generic matrix exponential by scaling and squaring with a Taylor core.
    fn expm(x: &Matrix4<f64>) -> Matrix4<f64> {
        let norm = x.abs().max() * 4.0;
        let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let scaled = x / 2f64.powi(s);
        let mut term = Matrix4::identity();
        let mut sum = Matrix4::identity();
        for k in 1..30 {
            term = term * scaled / k as f64;
            sum += term;
        }
        for _ in 0..s {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn zero_angle_is_identity() {
        let tw = Twist::revolute(Vector3::x(), Vector3::new(1.0, 2.0, 3.0)).unwrap();
        let p = exp_twist(&tw, 0.0);
        assert_eq!(p.rotation, Matrix3::identity());
        assert!(p.translation.norm() < 1e-15);
    }

    #[test]
    fn quarter_turn_about_z() {
        let tw = Twist::revolute(Vector3::z(), Vector3::zeros()).unwrap();
        let p = exp_twist(&tw, FRAC_PI_2);
        assert!((p.rotation * Vector3::x() - Vector3::y()).norm() < 1e-15);
        assert!(p.translation.norm() < 1e-15);
    }

    #[test]
    fn rodrigues_matches_generic_exponential() {
        let mut rng = seeded(31);
        for _ in 0..200 {
            let tw = Twist::revolute(
                random_unit(&mut rng),
                Vector3::new(
                    rng.random_range(-500.0..500.0),
                    rng.random_range(-500.0..500.0),
                    rng.random_range(-500.0..500.0),
                ),
            )
            .unwrap();
            let theta = rng.random_range(-3.0..3.0);
            let closed = exp_twist(&tw, theta).to_homogeneous();
            let generic = expm(&(tw.hat() * theta));
            let scale = generic.abs().max().max(1.0);
            assert!((closed - generic).abs().max() / scale < 1e-10);
        }
    }

    #[test]
    fn rejects_non_unit_axis() {
        assert!(Twist::revolute(Vector3::new(0.0, 0.0, 2.0), Vector3::zeros()).is_err());
        assert!(Twist::revolute(Vector3::zeros(), Vector3::zeros()).is_err());
    }

    #[test]
    fn pose_validation() {
        assert!(Pose::new(Matrix3::identity() * 2.0, Vector3::zeros()).is_err());
        let reflect = Matrix3::new(-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(Pose::new(reflect, Vector3::zeros()).is_err());
        assert!(Pose::new(Matrix3::identity(), Vector3::zeros()).is_ok());
    }

    #[test]
    fn home_configuration() {
        let robot = RobotModel::ur5();
        assert_eq!(robot.forward(&Vector6::zeros()), robot.home_pose);
    }

    #[test]
    fn base_joint_rotates_home_pose() {
        let robot = RobotModel::ur5();
        let alpha = 0.7;
        let mut theta = Vector6::zeros();
        theta[0] = alpha;
        let g = robot.forward(&theta);
        let rz = exp_twist(&robot.twists[0], alpha);
        let expected = rz.compose(&robot.home_pose);
        assert!((g.rotation - expected.rotation).abs().max() < 1e-14);
        assert!((g.translation - expected.translation).norm() < 1e-10);
    }

    #[test]
    fn rotations_stay_orthonormal() {
        let robot = RobotModel::ur5();
        let mut rng = seeded(32);
        for _ in 0..100 {
            let g = robot.forward(&random_theta(&mut rng));
            assert!(Pose::new(g.rotation, g.translation).is_ok());
        }
    }

    #[test]
    fn adjoint_identity_and_pure_rotation() {
        assert_eq!(adjoint(&Pose::identity()), Matrix6::identity());
        let r = exp_twist(&Twist::revolute(Vector3::y(), Vector3::zeros()).unwrap(), 0.4).rotation;
        let ad = adjoint(&Pose::from_rotation(r));
        assert_eq!(ad.fixed_view::<3, 3>(0, 0).into_owned(), r);
        assert_eq!(ad.fixed_view::<3, 3>(3, 3).into_owned(), r);
        assert!(ad.fixed_view::<3, 3>(0, 3).abs().max() < 1e-15);
        assert_eq!(ad.fixed_view::<3, 3>(3, 0).into_owned(), Matrix3::zeros());
    }

    #[test]
    fn adjoint_is_a_homomorphism() {
        let mut rng = seeded(33);
        for _ in 0..100 {
            let g1 = random_pose(&mut rng);
            let g2 = random_pose(&mut rng);
            let lhs = adjoint(&(g1 * g2));
            let rhs = adjoint(&g1) * adjoint(&g2);
            let scale = lhs.abs().max();
            assert!((lhs - rhs).abs().max() / scale < 1e-10);
        }
    }

    #[test]
    fn spatial_jacobian_at_zero_is_reference_twists() {
        let robot = RobotModel::ur5();
        let jac = spatial_jacobian(&robot, &Vector6::zeros());
        for (i, tw) in robot.twists.iter().enumerate() {
            assert_eq!(jac.column(i).into_owned(), tw.as_vector());
        }
    }

    #[test]
    fn first_column_ignores_configuration() {
        let robot = RobotModel::ur5();
        let mut rng = seeded(34);
        let a = random_theta(&mut rng);
        let mut b = random_theta(&mut rng);
        b[0] = a[0];
        assert_eq!(
            spatial_jacobian(&robot, &a).column(0),
            spatial_jacobian(&robot, &b).column(0)
        );
    }

    #[test]
    fn point_jacobian_matches_finite_differences() {
        let robot = RobotModel::ur5();
        let mut rng = seeded(35);
        let h = 1e-6;
        for _ in 0..100 {
            let theta = random_theta(&mut rng);
            let g = robot.forward(&theta);
            // a material point expressed in the tool frame
            let local = Vector3::new(
                rng.random_range(-50.0..50.0),
                rng.random_range(-50.0..50.0),
                rng.random_range(-100.0..50.0),
            );
            let jac = point_jacobian(&robot, &theta, &g.transform_point(&local));
            let scale = jac.abs().max();
            for c in 0..6 {
                let mut tp = theta;
                let mut tm = theta;
                tp[c] += h;
                tm[c] -= h;
                let fd = (robot.forward(&tp).transform_point(&local)
                    - robot.forward(&tm).transform_point(&local))
                    / (2.0 * h);
                for r in 0..3 {
                    assert!((jac[(r, c)] - fd[r]).abs() / scale <= 1e-5);
                }
            }
        }
    }

    #[test]
    fn spatial_jacobian_matches_finite_differences() {
        // point-velocity rows: v + ω × p for the tool origin p
        let robot = RobotModel::ur5();
        let mut rng = seeded(36);
        let h = 1e-6;
        for _ in 0..100 {
            let theta = random_theta(&mut rng);
            let jac = spatial_jacobian(&robot, &theta);
            let p = robot.forward(&theta).translation;
            let lin = jac.fixed_view::<3, 6>(0, 0) - skew(&p) * jac.fixed_view::<3, 6>(3, 0);
            let scale = lin.abs().max();
            for c in 0..6 {
                let mut tp = theta;
                let mut tm = theta;
                tp[c] += h;
                tm[c] -= h;
                let fd = (robot.forward(&tp).translation - robot.forward(&tm).translation) / (2.0 * h);
                for r in 0..3 {
                    assert!((lin[(r, c)] - fd[r]).abs() / scale <= 1e-5);
                }
            }
        }
    }

    #[test]
    fn point_jacobian_at_tool_origin_matches_body_jacobian() {
        // body Jacobian Ad(g⁻¹) J_s rotated back into the base frame
        let robot = RobotModel::ur5();
        let mut rng = seeded(37);
        for _ in 0..20 {
            let theta = random_theta(&mut rng);
            let g = robot.forward(&theta);
            let body = adjoint(&g.inverse()) * spatial_jacobian(&robot, &theta);
            let expected = g.rotation * body.fixed_view::<3, 6>(0, 0);
            let pj = point_jacobian(&robot, &theta, &g.translation);
            assert!((pj - expected).abs().max() < 1e-8);
        }
    }

    #[test]
    fn sliding_point_along_joint_axis_keeps_that_column() {
        let robot = RobotModel::ur5();
        let mut rng = seeded(38);
        for _ in 0..20 {
            let theta = random_theta(&mut rng);
            let jac = spatial_jacobian(&robot, &theta);
            let p = robot.forward(&theta).translation;
            for c in 0..6 {
                let axis = jac.fixed_view::<3, 1>(3, c).into_owned();
                let moved = p + axis * rng.random_range(-200.0..200.0);
                let a = point_jacobian(&robot, &theta, &p);
                let b = point_jacobian(&robot, &theta, &moved);
                assert!((a.column(c) - b.column(c)).norm() < 1e-9);
            }
        }
    }
}
