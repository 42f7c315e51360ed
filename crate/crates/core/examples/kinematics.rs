//! Forward kinematics of the arm and CDM at the bundled initial configuration,
//! the combined Jacobian, and a finite-difference spot check.
//!
//! ```text
//! cargo run --example kinematics
//! ```

use std::path::Path;

use rcm_admm::config::Experiment;
use rcm_admm::kinematics::Joints;

fn main() -> rcm_admm::Result<()> {
    let exp = Experiment::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/experiment.toml"))?;
    let model = &exp.model;
    let mut theta: Joints = exp.initial;
    theta[6] = 4.5;

    let base = model.cdm_base_pose(&theta);
    let tip = model.tip_pose(&theta)?;
    println!("CDM base  {:?}", base.translation.as_slice());
    println!("tip       {:?}", tip.translation.as_slice());
    println!("bend      {:.4} rad at cable {}", model.cdm.bend_angle(theta[6])?, theta[6]);

    let jac = model.combined_jacobian(&theta)?;
    println!("combined Jacobian (rows: tip velocity, angular velocity){jac:.4}");

    let h = 1e-6;
    let mut worst = 0.0_f64;
    for j in 0..7 {
        let mut e = Joints::zeros();
        e[j] = h;
        let fd = (model.tip_position(&(theta + e))? - model.tip_position(&(theta - e))?) / (2.0 * h);
        worst = worst.max((fd - jac.fixed_view::<3, 1>(0, j)).norm());
    }
    println!("max finite-difference gap in the position rows: {worst:.2e}");
    Ok(())
}
