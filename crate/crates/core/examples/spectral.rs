//! Spectrum of the ADMM iteration: the contraction factor γ across penalties
//! and the eigenvalue map checked against a direct eigendecomposition.
//!
//! ```text
//! cargo run --example spectral
//! ```

use rcm_admm::instances::{log_space, random_problem, seeded};
use rcm_admm::solver::{convergence_diagnostics, optimal_rho};

fn main() -> rcm_admm::Result<()> {
    // square A: full row rank, so gamma < 1 for every rho
    let p = random_problem(&mut seeded(11), 2, 4, 4, 0.05);
    let star = optimal_rho(p.jacobian(), p.lambda(), p.constraints_a())?;
    println!("rho* = {star:.4}");
    println!("{:>9} {:>10} {:>12}", "rho", "gamma", "map err");
    for rho in log_space(0.05, 10.0, 9).into_iter().chain([star]) {
        let d = convergence_diagnostics(p.jacobian(), p.lambda(), p.constraints_a(), rho)?;
        println!("{rho:>9.4} {:>10.6} {:>12.2e}", d.gamma, d.map_discrepancy);
    }
    Ok(())
}
