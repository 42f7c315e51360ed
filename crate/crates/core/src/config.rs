//! On-disk formats: robot, CDM, controller and experiment files (TOML) and
//! trajectory files (CSV).
//!
//! Lengths are millimetres and angles radians throughout. Relative paths inside
//! an experiment file are resolved against the file's own directory.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3, Vector6};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constraints::{JointLimitConfig, RcmConfig};
use crate::controller::{ControllerConfig, TaskMode};
use crate::error::{Error, Result};
use crate::kinematics::{CdmModel, Joints, Pose, RobotModel, SystemModel, Twist};
use crate::solver::{AdmmSettings, Rho};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_toml<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    toml::from_str(text).map_err(|e| {
        let location = e
            .span()
            .map(|s| format!("line {}: ", text[..s.start].matches('\n').count() + 1))
            .unwrap_or_default();
        Error::Parse {
            path: path.to_path_buf(),
            message: format!("{location}{}", e.message()),
        }
    })
}

pub fn load_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_toml(&read_text(path)?, path)
}

fn invalid(path: &Path, err: Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: err.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    pub omega: [f64; 3],
    pub point: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomeFile {
    /// Row-major rotation.
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsFile {
    pub lower: [f64; 6],
    pub upper: [f64; 6],
}

/// Robot model file: six revolute joints at the reference configuration, the
/// tool pose there, and per-step joint increment bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotFile {
    pub joint: Vec<JointFile>,
    pub home: HomeFile,
    pub increment_bounds: BoundsFile,
}

impl RobotFile {
    pub fn into_model(self) -> Result<RobotModel> {
        if self.joint.len() != 6 {
            return Err(Error::param(format!("robot needs exactly 6 joints, got {}", self.joint.len())));
        }
        let twists: Vec<Twist> = self
            .joint
            .iter()
            .map(|j| Twist::revolute(Vector3::from(j.omega), Vector3::from(j.point)))
            .collect::<Result<_>>()?;
        let r = self.home.rotation;
        let rotation = Matrix3::from_fn(|i, j| r[i][j]);
        let home = Pose::new(rotation, Vector3::from(self.home.translation))?;
        RobotModel::new(
            twists.try_into().expect("six twists"),
            home,
            Vector6::from(self.increment_bounds.lower),
            Vector6::from(self.increment_bounds.upper),
        )
    }

    pub fn from_model(model: &RobotModel) -> Self {
        let rot = model.home_pose.rotation;
        Self {
            joint: model
                .twists
                .iter()
                .map(|t| JointFile {
                    omega: (*t.omega()).into(),
                    point: (*t.point()).into(),
                })
                .collect(),
            home: HomeFile {
                rotation: [0, 1, 2].map(|i| [rot[(i, 0)], rot[(i, 1)], rot[(i, 2)]]),
                translation: model.home_pose.translation.into(),
            },
            increment_bounds: BoundsFile {
                lower: model.increment_lower.into(),
                upper: model.increment_upper.into(),
            },
        }
    }
}

pub fn load_robot(path: &Path) -> Result<RobotModel> {
    load_toml::<RobotFile>(path)?.into_model().map_err(|e| invalid(path, e))
}

pub fn load_cdm(path: &Path) -> Result<CdmModel> {
    let model: CdmModel = load_toml(path)?;
    model.validate().map_err(|e| invalid(path, e))?;
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcmFile {
    pub epsilon: f64,
    pub polygon_sides: usize,
}

/// Optional increment-bound override; the robot file's bounds apply otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsFile {
    pub arm_lower: [f64; 6],
    pub arm_upper: [f64; 6],
}

/// Controller file: tolerances, damping, ADMM settings and step budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerFile {
    pub mte: f64,
    pub lambda: f64,
    pub max_inner_steps: usize,
    #[serde(default)]
    pub task: TaskMode,
    #[serde(default = "default_qp_length_unit")]
    pub qp_length_unit: f64,
    pub rcm: RcmFile,
    #[serde(default)]
    pub admm: AdmmSettings,
    #[serde(default)]
    pub limits: Option<LimitsFile>,
}

fn default_qp_length_unit() -> f64 {
    1000.0
}

/// Where the screw hole sits and where the system starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Six arm angles (rad) then the cable length (mm).
    pub initial_joints: [f64; 7],
    pub rcm_center: [f64; 3],
    pub rcm_axis: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoSweepSpec {
    pub rho_min: f64,
    pub rho_max: f64,
    pub count: usize,
    /// Target relative to the initial tip (mm).
    pub target_offset: [f64; 3],
    pub mte: f64,
    pub rcme: f64,
    pub lambda: f64,
}

impl Default for RhoSweepSpec {
    fn default() -> Self {
        Self {
            rho_min: 0.05,
            rho_max: 10.0,
            count: 50,
            target_offset: [8.0, 6.0, -10.0],
            mte: 0.8,
            rcme: 1.0,
            lambda: 2e-4,
        }
    }
}

impl RhoSweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_min > 0.0) || !(self.rho_max >= self.rho_min) || self.count == 0 {
            return Err(Error::param(format!(
                "sweep grid needs 0 < rho_min <= rho_max and count > 0 (got {}, {}, {})",
                self.rho_min, self.rho_max, self.count
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        crate::instances::log_space(self.rho_min, self.rho_max, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySpec {
    pub lambda: f64,
    /// `(mte, rcme)` pairs in mm.
    pub grid: Vec<(f64, f64)>,
}

impl Default for SensitivitySpec {
    fn default() -> Self {
        let grid = [0.1, 0.2, 0.5, 0.8, 1.0]
            .map(|m| (m, 0.5))
            .into_iter()
            .chain([0.1, 0.5, 0.8, 1.0, 1.2].map(|m| (m, 1.0)))
            .collect();
        Self { lambda: 2e-4, grid }
    }
}

/// Experiment file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub robot: PathBuf,
    pub cdm: PathBuf,
    pub controller: PathBuf,
    #[serde(default)]
    pub trajectory: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub scenario: ScenarioFile,
    #[serde(default)]
    pub rho_sweep: RhoSweepSpec,
    #[serde(default)]
    pub sensitivity: SensitivitySpec,
}

fn default_seed() -> u64 {
    7
}

/// A fully loaded experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub source: PathBuf,
    pub model: SystemModel,
    pub controller: ControllerConfig,
    pub initial: Joints,
    pub trajectory_path: Option<PathBuf>,
    pub seed: u64,
    pub rho_sweep: RhoSweepSpec,
    pub sensitivity: SensitivitySpec,
}

impl Experiment {
    pub fn load(path: &Path) -> Result<Self> {
        let file: ExperimentFile = load_toml(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { dir.join(p) };

        let robot = load_robot(&resolve(&file.robot))?;
        let cdm = load_cdm(&resolve(&file.cdm))?;
        let controller_path = resolve(&file.controller);
        let controller_file: ControllerFile = load_toml(&controller_path)?;

        let initial = Joints::from(file.scenario.initial_joints);
        let rcm = RcmConfig {
            center: Vector3::from(file.scenario.rcm_center),
            axis: Vector3::from(file.scenario.rcm_axis),
            epsilon_rcm: controller_file.rcm.epsilon,
            polygon_sides: controller_file.rcm.polygon_sides,
        };
        let (arm_lower, arm_upper) = match &controller_file.limits {
            Some(l) => (Vector6::from(l.arm_lower), Vector6::from(l.arm_upper)),
            None => (robot.increment_lower, robot.increment_upper),
        };
        let controller = ControllerConfig {
            mte: controller_file.mte,
            rcm,
            limits: JointLimitConfig {
                arm_upper,
                arm_lower,
                cable_max: cdm.cable_max(),
                current_cable: initial[6],
            },
            lambda: controller_file.lambda,
            admm: controller_file.admm,
            max_inner_steps: controller_file.max_inner_steps,
            task: controller_file.task,
            qp_length_unit: controller_file.qp_length_unit,
        };
        controller.validate().map_err(|e| invalid(&controller_path, e))?;
        file.rho_sweep.validate().map_err(|e| invalid(path, e))?;

        Ok(Self {
            source: path.to_path_buf(),
            model: SystemModel::new(robot, cdm),
            controller,
            initial,
            trajectory_path: file.trajectory.as_deref().map(resolve),
            seed: file.seed,
            rho_sweep: file.rho_sweep,
            sensitivity: file.sensitivity,
        })
    }
}

/// Command-line overrides applied on top of a loaded controller config.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub rho: Option<Rho>,
    pub lambda: Option<f64>,
    pub mte: Option<f64>,
    pub rcme: Option<f64>,
    pub eps_abs: Option<f64>,
    pub eps_rel: Option<f64>,
    pub max_iterations: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &ControllerConfig) -> Result<ControllerConfig> {
        let mut c = config.clone();
        if let Some(rho) = self.rho {
            c.admm.rho = rho;
        }
        if let Some(v) = self.lambda {
            c.lambda = v;
        }
        if let Some(v) = self.mte {
            c.mte = v;
        }
        if let Some(v) = self.rcme {
            c.rcm.epsilon_rcm = v;
        }
        if let Some(v) = self.eps_abs {
            c.admm.eps_abs = v;
        }
        if let Some(v) = self.eps_rel {
            c.admm.eps_rel = v;
        }
        if let Some(v) = self.max_iterations {
            c.admm.max_iterations = v;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct WaypointRow {
    x: f64,
    y: f64,
    z: f64,
}

/// Reads `x,y,z` waypoints (mm, arm base frame); `#` starts a comment line.
pub fn read_trajectory(path: &Path) -> Result<Vec<Vector3<f64>>> {
    let text = read_text(path)?;
    parse_trajectory(&text, path)
}

pub fn parse_trajectory(text: &str, path: &Path) -> Result<Vec<Vector3<f64>>> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for record in reader.deserialize::<WaypointRow>() {
        let row = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let p = Vector3::new(row.x, row.y, row.z);
        if !p.iter().all(|v| v.is_finite()) {
            return Err(parse_err(points.len() as u64 + 2, "non-finite coordinate".into()));
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: "trajectory has no waypoints".into(),
        });
    }
    Ok(points)
}

/// Writes waypoints with an optional `# seed=` header line.
pub fn write_trajectory(path: &Path, points: &[Vector3<f64>], seed: Option<u64>) -> Result<()> {
    let mut out = String::new();
    if let Some(seed) = seed {
        out.push_str(&format!("# seed={seed}\n"));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    for p in points {
        writer.serialize(WaypointRow { x: p.x, y: p.y, z: p.z })?;
    }
    let body = writer.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
    }

    #[test]
    fn bundled_robot_file_matches_builtin_ur5() {
        let loaded = load_robot(&data_dir().join("ur5.toml")).unwrap();
        let builtin = RobotModel::ur5();
        for (a, b) in loaded.twists.iter().zip(builtin.twists.iter()) {
            assert!((a.as_vector() - b.as_vector()).norm() < 1e-12);
        }
        assert!((loaded.home_pose.rotation - builtin.home_pose.rotation).norm() < 1e-12);
        assert!((loaded.home_pose.translation - builtin.home_pose.translation).norm() < 1e-9);
        assert_eq!(loaded.increment_upper, builtin.increment_upper);
        assert_eq!(loaded.increment_lower, builtin.increment_lower);
    }

    #[test]
    fn robot_file_round_trip() {
        let file = RobotFile::from_model(&RobotModel::ur5());
        let text = toml::to_string(&file).unwrap();
        let back: RobotFile = toml::from_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.into_model().unwrap(), RobotModel::ur5());
    }

    #[test]
    fn robot_file_needs_six_joints() {
        let mut file = RobotFile::from_model(&RobotModel::ur5());
        file.joint.pop();
        assert!(file.into_model().is_err());
    }

    #[test]
    fn bundled_experiment_loads() {
        let exp = Experiment::load(&data_dir().join("experiment.toml")).unwrap();
        assert_eq!(exp.controller.rcm.polygon_sides, 16);
        assert_eq!(exp.controller.lambda, 2e-4);
        assert_eq!(exp.model.cdm, CdmModel::default());
        assert_eq!(exp.sensitivity.grid.len(), 10);
        assert_eq!(exp.rho_sweep.grid().len(), 50);
        // the screw hole lies on the initial tool axis
        let base = exp.model.cdm_base_pose(&exp.initial);
        let rcm = &exp.controller.rcm;
        assert!(rcm.radial_offset(&base) < 1e-6);
        assert!((rcm.axis - base.rotation.column(2)).norm() < 1e-6);
        let path = read_trajectory(exp.trajectory_path.as_ref().unwrap()).unwrap();
        assert_eq!(path.len(), 36);
    }

    #[test]
    fn toml_errors_carry_line_numbers() {
        let text = "mte = 0.5\nlambda = \"oops\"\n";
        let err = parse_toml::<ControllerFile>(text, Path::new("c.toml")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("c.toml"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn trajectory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let pts = vec![Vector3::new(1.0, 2.5, -3.0), Vector3::new(0.1, 0.2, 1e-7)];
        write_trajectory(&path, &pts, Some(42)).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# seed=42\nx,y,z\n"));
        assert_eq!(read_trajectory(&path).unwrap(), pts);
    }

    #[test]
    fn trajectory_errors() {
        let p = Path::new("t.csv");
        let err = parse_trajectory("x,y,z\n1,2,3\n4,five,6\n", p).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(parse_trajectory("x,y,z\n", p).is_err());
        assert!(parse_trajectory("x,y,z\n1,2,inf\n", p).is_err());
        assert!(parse_trajectory("x,y\n1,2\n", p).is_err());
        let ok = parse_trajectory("# comment\nx,y,z\n 1, 2, 3\n", p).unwrap();
        assert_eq!(ok, vec![Vector3::new(1.0, 2.0, 3.0)]);
    }

    #[test]
    fn overrides_apply_and_validate() {
        let exp = Experiment::load(&data_dir().join("experiment.toml")).unwrap();
        let o = Overrides {
            rho: Some(Rho::Fixed(0.3)),
            mte: Some(0.1),
            rcme: Some(1.0),
            max_iterations: Some(50),
            ..Overrides::default()
        };
        let c = o.apply(&exp.controller).unwrap();
        assert_eq!(c.admm.rho, Rho::Fixed(0.3));
        assert_eq!(c.mte, 0.1);
        assert_eq!(c.rcm.epsilon_rcm, 1.0);
        assert_eq!(c.admm.max_iterations, 50);
        let bad = Overrides {
            lambda: Some(-1.0),
            ..Overrides::default()
        };
        assert!(bad.apply(&exp.controller).is_err());
    }
}
