//! Exact reference solver for small constrained DLS problems.
//!
//! Enumerates active sets, solves each equality-constrained subproblem through
//! its KKT system and keeps the best candidate that satisfies every KKT
//! condition. Exponential in the number of rows, so it refuses `r > 20`; it
//! exists to check [`crate::solver`], not to replace it.

use nalgebra::{linalg::Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::solver::DlmProblem;

pub const MAX_ORACLE_ROWS: usize = 20;

/// Absolute tolerance for feasibility and multiplier sign checks.
const KKT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub delta_theta: DVector<f64>,
    /// Ascending row indices of the binding constraints.
    pub active_set: Vec<usize>,
    /// One multiplier per constraint row (zero off the active set).
    pub multipliers: DVector<f64>,
    pub objective: f64,
}

pub fn oracle_solve(problem: &DlmProblem) -> Result<OracleSolution> {
    let n = problem.dim();
    let r = problem.num_constraints();
    if r > MAX_ORACLE_ROWS {
        return Err(Error::OracleTooLarge {
            rows: r,
            limit: MAX_ORACLE_ROWS,
        });
    }
    let a = problem.constraints_a();
    let b = problem.constraints_b();

    let q = Cholesky::new(problem.hessian())
        .ok_or_else(|| Error::param("JᵀJ + λI is not positive definite"))?;
    let free = q.solve(&(problem.jacobian().transpose() * problem.delta_x()));
    let q_inv_at = q.solve(&a.transpose());
    let gram = a * &q_inv_at;
    let excess = a * &free - b;

    // Some optimal multiplier vector is supported on linearly independent rows,
    // so subsets larger than n never need a visit.
    let max_active = n.min(r);
    let mut best: Option<OracleSolution> = None;
    for mask in 0u32..(1u32 << r) {
        let k = mask.count_ones() as usize;
        if k > max_active {
            continue;
        }
        let rows: Vec<usize> = (0..r).filter(|i| mask & (1 << i) != 0).collect();
        let Some((x, mu)) = solve_active_set(&rows, &free, &q_inv_at, &gram, &excess) else {
            continue;
        };
        if mu.iter().any(|&m| m < -KKT_TOL) {
            continue;
        }
        if (a * &x - b).iter().any(|&v| v > KKT_TOL) {
            continue;
        }
        let objective = problem.objective(&x);
        if best.as_ref().is_some_and(|s| s.objective <= objective) {
            continue;
        }
        let mut multipliers = DVector::zeros(r);
        for (&row, &m) in rows.iter().zip(mu.iter()) {
            multipliers[row] = m.max(0.0);
        }
        best = Some(OracleSolution {
            delta_theta: x,
            active_set: rows,
            multipliers,
            objective,
        });
    }
    best.ok_or(Error::Infeasible)
}

/// Solves `M_WW μ = (A x_free − b)_W` and `x = x_free − Q⁻¹ A_Wᵀ μ`; `None` when
/// the rows in `W` are linearly dependent.
fn solve_active_set(
    rows: &[usize],
    free: &DVector<f64>,
    q_inv_at: &DMatrix<f64>,
    gram: &DMatrix<f64>,
    excess: &DVector<f64>,
) -> Option<(DVector<f64>, DVector<f64>)> {
    if rows.is_empty() {
        return Some((free.clone(), DVector::zeros(0)));
    }
    let k = rows.len();
    let sub = DMatrix::from_fn(k, k, |i, j| gram[(rows[i], rows[j])]);
    let diag_max = (0..k).map(|i| sub[(i, i)]).fold(0.0, f64::max);
    let chol = Cholesky::new(sub)?;
    // reject numerically dependent row sets
    let l = chol.l_dirty();
    if (0..k).any(|i| l[(i, i)] * l[(i, i)] <= 1e-12 * diag_max) {
        return None;
    }
    let rhs = DVector::from_fn(k, |i, _| excess[rows[i]]);
    let mu = chol.solve(&rhs);
    let mut x = free.clone();
    for (idx, &row) in rows.iter().enumerate() {
        x -= q_inv_at.column(row) * mu[idx];
    }
    Some((x, mu))
}

/// Per-condition KKT residuals at a candidate point.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub stationarity: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub complementarity: f64,
    pub multipliers: DVector<f64>,
    pub satisfied: bool,
}

/// Checks the KKT conditions at `delta_theta`, reconstructing multipliers by
/// least squares over rows whose slack is at most `√tol`.
pub fn verify_kkt(problem: &DlmProblem, delta_theta: &DVector<f64>, tol: f64) -> Result<KktReport> {
    let n = problem.dim();
    let r = problem.num_constraints();
    if delta_theta.len() != n {
        return Err(Error::dim(format!(
            "candidate has length {}, problem has n = {n}",
            delta_theta.len()
        )));
    }
    let a = problem.constraints_a();
    let slack = problem.constraints_b() - a * delta_theta;
    let gradient = problem.hessian() * delta_theta
        - problem.jacobian().transpose() * problem.delta_x();

    let near: Vec<usize> = (0..r).filter(|&i| slack[i] <= tol.sqrt()).collect();
    let mut multipliers = DVector::zeros(r);
    let stationarity = if near.is_empty() {
        gradient.norm()
    } else {
        // min ‖g + A_Nᵀ μ‖
        let a_nt = DMatrix::from_fn(n, near.len(), |j, c| a[(near[c], j)]);
        let mu = a_nt
            .clone()
            .svd(true, true)
            .solve(&(-&gradient), 1e-12)
            .map_err(|e| Error::param(format!("multiplier least squares failed: {e}")))?;
        for (c, &row) in near.iter().enumerate() {
            multipliers[row] = mu[c];
        }
        (&gradient + a_nt * mu).norm()
    };

    let primal_infeasibility = slack.iter().fold(0.0_f64, |acc, s| acc.max(-s));
    let dual_infeasibility = multipliers.iter().fold(0.0_f64, |acc, m| acc.max(-m));
    let complementarity = multipliers
        .iter()
        .zip(slack.iter())
        .fold(0.0_f64, |acc, (m, s)| acc.max((m * s).abs()));
    let satisfied = stationarity <= tol
        && primal_infeasibility <= tol
        && dual_infeasibility <= tol
        && complementarity <= tol;
    Ok(KktReport {
        stationarity,
        primal_infeasibility,
        dual_infeasibility,
        complementarity,
        multipliers,
        satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_feasible_problem, seeded};
    use crate::solver::{closed_form_dlm, solve, AdmmSettings};
    use rand::Rng;

    #[test]
    fn no_constraints_gives_closed_form() {
        let mut rng = seeded(2);
        let p = random_feasible_problem(&mut rng, 5, 0, 0.1);
        let sol = oracle_solve(&p).unwrap();
        let closed = closed_form_dlm(p.jacobian(), p.delta_x(), 0.1).unwrap();
        assert!(sol.active_set.is_empty());
        assert!((sol.delta_theta - closed).norm() < 1e-12);
    }

    #[test]
    fn scalar_bound_binds() {
        // unconstrained optimum JᵀΔx / (1 + λ) = 1 violates Δθ ≤ 0.5
        let p = DlmProblem::new(
            DMatrix::identity(1, 1),
            DVector::from_vec(vec![2.0]),
            1.0,
            DMatrix::from_row_slice(1, 1, &[1.0]),
            DVector::from_vec(vec![0.5]),
        )
        .unwrap();
        let sol = oracle_solve(&p).unwrap();
        assert!((sol.delta_theta[0] - 0.5).abs() < 1e-12);
        assert_eq!(sol.active_set, vec![0]);
        // stationarity: 2·0.5 − 2 + μ = 0
        assert!((sol.multipliers[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refuses_large_instances() {
        let mut rng = seeded(3);
        let p = random_feasible_problem(&mut rng, 3, 21, 0.1);
        assert!(matches!(
            oracle_solve(&p),
            Err(Error::OracleTooLarge { rows: 21, .. })
        ));
    }

    #[test]
    fn infeasible_instance_is_reported() {
        let p = DlmProblem::new(
            DMatrix::identity(1, 1),
            DVector::from_vec(vec![0.0]),
            1.0,
            DMatrix::from_row_slice(2, 1, &[1.0, -1.0]),
            DVector::from_vec(vec![-1.0, -1.0]),
        )
        .unwrap();
        assert!(matches!(oracle_solve(&p), Err(Error::Infeasible)));
    }

    #[test]
    fn beats_random_feasible_points() {
        let mut rng = seeded(4);
        let p = random_feasible_problem(&mut rng, 5, 8, 0.05);
        let sol = oracle_solve(&p).unwrap();
        // sample a box around the optimum, keep the feasible draws
        let mut feasible = 0usize;
        for _ in 0..1_000_000 {
            let x = DVector::from_fn(5, |i, _| sol.delta_theta[i] + rng.random_range(-1.0..1.0));
            if p.max_violation(&x) > 0.0 {
                continue;
            }
            feasible += 1;
            assert!(sol.objective <= p.objective(&x) + 1e-12);
        }
        assert!(feasible > 1000);
    }

    #[test]
    fn deterministic() {
        let mut rng = seeded(5);
        let p = random_feasible_problem(&mut rng, 6, 10, 0.01);
        assert_eq!(oracle_solve(&p).unwrap(), oracle_solve(&p).unwrap());
    }

    #[test]
    fn kkt_holds_at_oracle_solution() {
        let mut rng = seeded(6);
        for _ in 0..10 {
            let p = random_feasible_problem(&mut rng, 7, 12, 0.01);
            let sol = oracle_solve(&p).unwrap();
            let report = verify_kkt(&p, &sol.delta_theta, 1e-6).unwrap();
            assert!(report.satisfied, "{report:?}");
        }
    }

    #[test]
    fn kkt_fails_at_violating_unconstrained_optimum() {
        let p = DlmProblem::new(
            DMatrix::identity(1, 1),
            DVector::from_vec(vec![2.0]),
            1.0,
            DMatrix::from_row_slice(1, 1, &[1.0]),
            DVector::from_vec(vec![0.5]),
        )
        .unwrap();
        let report = verify_kkt(&p, &DVector::from_vec(vec![1.0]), 1e-6).unwrap();
        assert!(!report.satisfied);
        assert!((report.primal_infeasibility - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kkt_holds_at_converged_admm_solution() {
        let mut rng = seeded(7);
        let p = random_feasible_problem(&mut rng, 7, 14, 0.05);
        let settings = AdmmSettings {
            eps_abs: 1e-10,
            eps_rel: 1e-10,
            ..AdmmSettings::default()
        };
        let report = solve(&p, &settings, None).unwrap();
        assert!(report.converged());
        let kkt = verify_kkt(&p, &report.solution, 1e-4).unwrap();
        assert!(kkt.satisfied, "{kkt:?}");
    }
}
