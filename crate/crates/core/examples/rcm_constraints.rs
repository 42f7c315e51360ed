//! Builds the polygonal RCM rows and the increment limits for the bundled
//! scenario and shows which rows the unconstrained DLS step would break.
//!
//! ```text
//! cargo run --example rcm_constraints
//! ```

use std::path::Path;

use nalgebra::Vector3;
use rcm_admm::config::Experiment;
use rcm_admm::constraints::{build_joint_limits, build_rcm, stack};
use rcm_admm::controller::{step_problem, SystemState};
use rcm_admm::kinematics::arm_part;
use rcm_admm::solver::closed_form_dlm;

fn main() -> rcm_admm::Result<()> {
    let exp = Experiment::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/experiment.toml"))?;
    let c = &exp.controller;
    let state = SystemState::new(&exp.model, exp.initial)?;
    println!(
        "RCM: {}-gon of inradius {} mm (circumradius {:.4}), current offset {:.2e} mm",
        c.rcm.polygon_sides,
        c.rcm.epsilon_rcm,
        c.rcm.polygon_circumradius(),
        c.rcm.radial_offset(&state.cdm_base_pose)
    );

    // a lateral target pulls the shaft sideways through the port
    let target = state.tip() + Vector3::new(20.0, 0.0, 0.0);
    let problem = step_problem(&exp.model, &state, &target, None, c)?;
    let rcm = build_rcm(&c.rcm, &exp.model.robot, &arm_part(&state.theta), &state.cdm_base_pose)?;
    let limits = build_joint_limits(&c.limits.with_cable(state.cable()))?;
    let stacked = stack(&[rcm, limits]);
    let labels = stacked.labels();
    let free = closed_form_dlm(problem.jacobian(), problem.delta_x(), problem.lambda())?;
    let excess = problem.constraints_a() * &free - problem.constraints_b();
    println!("{} rows; rows broken by the unconstrained step:", labels.len());
    for (i, (label, e)) in labels.iter().zip(excess.iter()).enumerate() {
        if *e > 0.0 {
            println!("  row {i:>2} {label:?}: exceeds by {e:.3e}");
        }
    }
    Ok(())
}
