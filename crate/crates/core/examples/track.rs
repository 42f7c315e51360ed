//! Tracks the bundled 36-waypoint path and prints per-waypoint statistics.
//!
//! ```text
//! cargo run --release --example track
//! ```

use std::path::Path;

use rcm_admm::config::Experiment;
use rcm_admm::harness::{resolve_waypoints, run_track};

fn main() -> rcm_admm::Result<()> {
    let exp = Experiment::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/experiment.toml"))?;
    let (path, seed) = resolve_waypoints(&exp, None, None)?;
    let run = run_track(&exp, &exp.controller, &path, seed)?;

    println!("{:>3} {:>6} {:>10} {:>10} {:>9}", "wp", "steps", "tip err", "rcm off", "max iter");
    for w in &run.log.waypoints {
        println!(
            "{:>3} {:>6} {:>10.4} {:>10.4} {:>9}",
            w.index,
            w.inner_steps,
            w.final_tip_error,
            w.max_rcm_offset,
            w.admm_iterations.iter().max().unwrap_or(&0)
        );
    }
    let s = &run.summary;
    println!("reached {}/{} in {:.2} s; invariants {:?}", s.reached, s.waypoints, s.total_time_s, s.invariants);
    Ok(())
}
