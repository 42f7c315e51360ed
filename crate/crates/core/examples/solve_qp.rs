//! Solves a small random constrained DLS problem with ADMM at ρ* and at a few
//! fixed penalties, and compares against the exact active-set solution.
//!
//! ```text
//! cargo run --example solve_qp -- [seed]
//! ```

use rcm_admm::instances::{random_feasible_problem, seeded};
use rcm_admm::oracle::oracle_solve;
use rcm_admm::solver::{closed_form_dlm, resolve_rho, solve, AdmmSettings, Rho};

fn main() -> rcm_admm::Result<()> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse().expect("seed must be an integer")).unwrap_or(3);
    let problem = random_feasible_problem(&mut seeded(seed), 6, 10, 1e-2);
    println!("n = {}, m = {}, r = {}, lambda = {}", problem.dim(), problem.task_dim(), problem.num_constraints(), problem.lambda());

    let exact = oracle_solve(&problem)?;
    let free = closed_form_dlm(problem.jacobian(), problem.delta_x(), problem.lambda())?;
    println!("oracle objective {:.6}, active rows {:?}", exact.objective, exact.active_set);
    println!("unconstrained step violates by {:.3e}", problem.max_violation(&free));

    for rho in [Rho::Auto, Rho::Fixed(0.1), Rho::Fixed(1.0), Rho::Fixed(10.0)] {
        let report = solve(&problem, &AdmmSettings::default().with_rho(rho), None)?;
        println!(
            "rho {:>8.4}{}: {:>5} iterations, {:?}, |x - x*| = {:.2e}",
            resolve_rho(&problem, rho)?,
            if rho == Rho::Auto { " (rho*)" } else { "        " },
            report.iterations,
            report.status,
            (&report.solution - &exact.delta_theta).norm()
        );
    }
    Ok(())
}
