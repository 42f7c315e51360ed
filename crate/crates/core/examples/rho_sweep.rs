//! Iteration counts of the single-target experiment over a penalty grid,
//! against the count at ρ*.
//!
//! ```text
//! cargo run --release --example rho_sweep
//! ```

use std::path::Path;

use rcm_admm::config::Experiment;
use rcm_admm::harness::{run_rho_sweep, sweep_config};

fn main() -> rcm_admm::Result<()> {
    let exp = Experiment::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/experiment.toml"))?;
    let config = sweep_config(&exp.controller, &exp.rho_sweep);
    let sweep = run_rho_sweep(&exp, &config, &exp.rho_sweep, exp.seed)?;
    for row in sweep.grid_rows() {
        println!("{:>8.4} {:>6} {}", row.rho, row.max_iterations, "#".repeat((row.max_iterations as f64).log2().max(0.0) as usize * 4));
    }
    let s = &sweep.summary;
    println!("rho* {:.4}: {} iterations; best grid rho {:.4}: {} iterations", s.rho_star, s.optimal_iterations, s.rho_sharp, s.min_grid_iterations);
    Ok(())
}
