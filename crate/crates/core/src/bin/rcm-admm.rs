use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rcm_admm::config::{Experiment, Overrides};
use rcm_admm::harness::{
    default_out_dir, resolve_waypoints, run_diagnose, run_rho_sweep, run_sensitivity, run_track, sweep_config,
};
use rcm_admm::solver::Rho;

/// Arm + continuum-segment tracking under a remote center of motion, solved with ADMM.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Track the waypoint path and check every step's invariants.
    Track,
    /// Single-target iteration counts over a penalty grid and at ρ*.
    RhoSweep,
    /// Track the path for every (MTE, RCME) row of the grid.
    Sensitivity,
    /// Spectral checks and residual histories at ρ ∈ {0.1, ρ*, 1, 5}.
    Diagnose,
}

#[derive(Args)]
struct Opts {
    /// Experiment file (defaults to the bundled scenario).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Waypoint CSV overriding the experiment's path.
    #[arg(long, global = true)]
    trajectory: Option<PathBuf>,
    /// Penalty: a positive number or "auto".
    #[arg(long, global = true, value_parser = parse_rho)]
    rho: Option<Rho>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Max tip error (mm).
    #[arg(long, global = true)]
    mte: Option<f64>,
    /// RCM tube radius (mm).
    #[arg(long, global = true)]
    rcme: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Output directory (defaults to out/<subcommand>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for synthesized paths and random draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

fn parse_rho(s: &str) -> Result<Rho, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Rho::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Rho::Fixed(v)),
        _ => Err(format!("expected a positive number or \"auto\", got {s:?}")),
    }
}

const DIAGNOSE_DRAWS: usize = 50;

fn run(cli: Cli) -> rcm_admm::Result<bool> {
    let o = &cli.opts;
    let config_path = o
        .config
        .clone()
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/experiment.toml"));
    let exp = Experiment::load(&config_path)?;
    let solver_overrides = Overrides {
        rho: o.rho,
        lambda: None,
        mte: None,
        rcme: None,
        eps_abs: o.abs_tol,
        eps_rel: o.rel_tol,
        max_iterations: o.max_iter,
    };
    let all_overrides = Overrides {
        lambda: o.lambda,
        mte: o.mte,
        rcme: o.rcme,
        ..solver_overrides
    };

    let (name, passed) = match cli.command {
        Command::Track => {
            let config = all_overrides.apply(&exp.controller)?;
            let (path, seed) = resolve_waypoints(&exp, o.trajectory.as_deref(), o.seed)?;
            let run = run_track(&exp, &config, &path, seed)?;
            let out = o.out.clone().unwrap_or_else(|| default_out_dir("track"));
            run.write(&out)?;
            let s = &run.summary;
            println!(
                "reached {}/{}  max tip error {:.4} mm  max RCM offset {:.4} mm (bound {:.4})  max ADMM iterations {}  time {:.2} s",
                s.reached, s.waypoints, s.max_tip_error, s.max_rcm_offset, s.rcm_bound, s.max_admm_iterations, s.total_time_s
            );
            println!("invariants {:?}", s.invariants);
            println!("wrote {}", out.display());
            ("track", run.passed())
        }
        Command::RhoSweep => {
            let mut spec = exp.rho_sweep.clone();
            spec.lambda = o.lambda.unwrap_or(spec.lambda);
            spec.mte = o.mte.unwrap_or(spec.mte);
            spec.rcme = o.rcme.unwrap_or(spec.rcme);
            if let Some(Rho::Fixed(r)) = o.rho {
                (spec.rho_min, spec.rho_max, spec.count) = (r, r, 1);
            }
            let base = Overrides { rho: None, ..solver_overrides }.apply(&exp.controller)?;
            let config = sweep_config(&base, &spec);
            let sweep = run_rho_sweep(&exp, &config, &spec, o.seed.unwrap_or(exp.seed))?;
            let out = o.out.clone().unwrap_or_else(|| default_out_dir("rho-sweep"));
            sweep.write(&out)?;
            let s = &sweep.summary;
            println!(
                "grid {}/{} converged  rho* {:.4} ({} it)  rho# {:.4} ({} it)  ratio {:.3}  time {:.2} s",
                s.grid_converged, s.grid_points, s.rho_star, s.optimal_iterations, s.rho_sharp, s.min_grid_iterations, s.ratio, s.total_time_s
            );
            println!("wrote {}", out.display());
            ("rho-sweep", sweep.passed())
        }
        Command::Sensitivity => {
            let mut spec = exp.sensitivity.clone();
            spec.lambda = o.lambda.unwrap_or(spec.lambda);
            if o.mte.is_some() || o.rcme.is_some() {
                spec.grid = vec![(o.mte.unwrap_or(exp.controller.mte), o.rcme.unwrap_or(exp.controller.rcm.epsilon_rcm))];
            }
            let config = solver_overrides.apply(&exp.controller)?;
            let (path, seed) = resolve_waypoints(&exp, o.trajectory.as_deref(), o.seed)?;
            let result = run_sensitivity(&exp, &config, &spec, &path, seed)?;
            let out = o.out.clone().unwrap_or_else(|| default_out_dir("sensitivity"));
            result.write(&out)?;
            println!("{:>6} {:>6} {:>10} {:>8} {:>10}", "mte", "rcme", "runtime_s", "reached", "invariants");
            for r in &result.rows {
                println!(
                    "{:>6} {:>6} {:>10.3} {:>5}/{:<2} {:>10}",
                    r.mte, r.rcme, r.runtime_s, r.reached, r.waypoints, if r.invariants_ok { "ok" } else { "FAIL" }
                );
            }
            println!("wrote {}", out.display());
            ("sensitivity", result.passed())
        }
        Command::Diagnose => {
            let mut spec = exp.rho_sweep.clone();
            spec.lambda = o.lambda.unwrap_or(spec.lambda);
            spec.mte = o.mte.unwrap_or(spec.mte);
            spec.rcme = o.rcme.unwrap_or(spec.rcme);
            let base = Overrides { rho: None, ..solver_overrides }.apply(&exp.controller)?;
            let config = sweep_config(&base, &spec);
            let d = run_diagnose(&exp, &config, &spec, o.seed.unwrap_or(exp.seed), DIAGNOSE_DRAWS)?;
            let out = o.out.clone().unwrap_or_else(|| default_out_dir("diagnose"));
            d.write(&out)?;
            let s = &d.summary;
            println!(
                "{} draws: gamma in [{:.4}, {:.4}], max map discrepancy {:.2e}",
                s.draws, s.gamma_min, s.gamma_max, s.max_map_discrepancy
            );
            println!(
                "robot problem: {} rows, rho* {:.4}, gamma {:.6}, map discrepancy {:.2e}",
                s.robot_constraint_rows, s.robot_rho_star, s.robot_gamma, s.robot_map_discrepancy
            );
            for h in &s.histories {
                println!("  rho {:<8.4} {:>6} iterations  converged {}", h.rho, h.iterations, h.converged);
            }
            println!("wrote {}", out.display());
            ("diagnose", d.passed())
        }
    };
    println!("{name}: {}", if passed { "PASS" } else { "FAIL" });
    Ok(passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
