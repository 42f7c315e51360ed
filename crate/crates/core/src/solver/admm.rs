use nalgebra::{linalg::Cholesky, DMatrix, DVector, Dyn};

use super::{
    optimal_rho, AdmmReport, AdmmSettings, AdmmState, DlmProblem, IterationRecord, Rho,
    SolveStatus,
};
use crate::error::{Error, Result};

/// Unconstrained minimizer `(JᵀJ + λI)⁻¹ JᵀΔx`.
pub fn closed_form_dlm(jacobian: &DMatrix<f64>, delta_x: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::param(format!("lambda must be > 0, got {lambda}")));
    }
    if jacobian.nrows() != delta_x.len() {
        return Err(Error::dim(format!(
            "jacobian has {} rows, delta_x has length {}",
            jacobian.nrows(),
            delta_x.len()
        )));
    }
    let n = jacobian.ncols();
    let q = jacobian.transpose() * jacobian + DMatrix::identity(n, n) * lambda;
    let chol = Cholesky::new(q).ok_or_else(|| Error::param("JᵀJ + λI is not positive definite"))?;
    Ok(chol.solve(&(jacobian.transpose() * delta_x)))
}

/// The Δθ-update system `JᵀJ + λI + ρAᵀA`, factored once for fixed `(J, λ, A, ρ)`.
pub struct StepOperator<'p> {
    problem: &'p DlmProblem,
    rho: f64,
    chol: Cholesky<f64, Dyn>,
    jt_dx: DVector<f64>,
    a_t: DMatrix<f64>,
}

impl<'p> StepOperator<'p> {
    pub fn new(problem: &'p DlmProblem, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::param(format!("rho must be > 0, got {rho}")));
        }
        let a_t = problem.constraints_a().transpose();
        let system = problem.hessian() + (&a_t * problem.constraints_a()) * rho;
        let chol = Cholesky::new(system)
            .ok_or_else(|| Error::param("ADMM normal matrix is not positive definite"))?;
        let jt_dx = problem.jacobian().transpose() * problem.delta_x();
        Ok(Self {
            problem,
            rho,
            chol,
            jt_dx,
            a_t,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// One pass of the Δθ, z, u updates, in that order.
    pub fn step(&self, state: &AdmmState) -> Result<AdmmState> {
        state.check_dims(self.problem)?;
        let b = self.problem.constraints_b();
        let a = self.problem.constraints_a();

        let shift = &state.z - b + &state.u;
        let rhs = &self.jt_dx - (&self.a_t * shift) * self.rho;
        let delta_theta = self.chol.solve(&rhs);

        let a_dtheta = a * &delta_theta;
        let z = (b - &a_dtheta - &state.u).map(|v| v.max(0.0));
        let u = &state.u + &a_dtheta - b + &z;
        Ok(AdmmState { delta_theta, z, u })
    }
}

/// Next scaled-ADMM iterate:
///
/// ```text
/// Δθ⁺ = (JᵀJ + λI + ρAᵀA)⁻¹ (JᵀΔx − ρAᵀ(z − b + u))
/// z⁺  = max{0, −AΔθ⁺ + b − u}
/// u⁺  = u + AΔθ⁺ − b + z⁺
/// ```
///
/// Factors the normal matrix on every call; [`solve`] keeps one [`StepOperator`]
/// for the whole run instead.
pub fn admm_step(state: &AdmmState, problem: &DlmProblem, rho: f64) -> Result<AdmmState> {
    StepOperator::new(problem, rho)?.step(state)
}

/// `(‖AΔθ + z − b‖, ‖ρAᵀ(z − z_prev)‖)`.
pub fn compute_residuals(
    prev_z: &DVector<f64>,
    state: &AdmmState,
    problem: &DlmProblem,
    rho: f64,
) -> Result<(f64, f64)> {
    state.check_dims(problem)?;
    if prev_z.len() != state.z.len() {
        return Err(Error::dim(format!(
            "prev_z has length {}, z has length {}",
            prev_z.len(),
            state.z.len()
        )));
    }
    let a = problem.constraints_a();
    let primal = (a * &state.delta_theta + &state.z - problem.constraints_b()).norm();
    let dual = (a.transpose() * (&state.z - prev_z)).norm() * rho;
    Ok((primal, dual))
}

/// `(ε_pri, ε_dual)` with `p = r` and `B = I, c = b`:
///
/// ```text
/// ε_pri  = √p ε_abs + ε_rel max{‖AΔθ‖, ‖z‖, ‖b‖}
/// ε_dual = √n ε_abs + ε_rel ‖ρAᵀu‖
/// ```
pub fn compute_tolerances(
    state: &AdmmState,
    problem: &DlmProblem,
    rho: f64,
    settings: &AdmmSettings,
) -> Result<(f64, f64)> {
    state.check_dims(problem)?;
    let a = problem.constraints_a();
    let p = problem.num_constraints() as f64;
    let n = problem.dim() as f64;
    let scale = (a * &state.delta_theta)
        .norm()
        .max(state.z.norm())
        .max(problem.constraints_b().norm());
    let eps_pri = p.sqrt() * settings.eps_abs + settings.eps_rel * scale;
    let eps_dual =
        n.sqrt() * settings.eps_abs + settings.eps_rel * (a.transpose() * &state.u).norm() * rho;
    Ok((eps_pri, eps_dual))
}

/// Resolves the penalty for one solve. `Auto` falls back to ρ = 1 when there is
/// nothing to tune against (r = 0 or A = 0).
/// The penalty `solve` will use for `problem` under `rho`.
pub fn resolve_rho(problem: &DlmProblem, rho: Rho) -> Result<f64> {
    match rho {
        Rho::Fixed(r) => Ok(r),
        Rho::Auto if problem.num_constraints() == 0 => Ok(1.0),
        Rho::Auto => match optimal_rho(problem.jacobian(), problem.lambda(), problem.constraints_a()) {
            Ok(r) => Ok(r),
            Err(Error::DegenerateConstraints) => Ok(1.0),
            Err(e) => Err(e),
        },
    }
}

/// Runs scaled ADMM from `warm_start` (or zeros) until both residuals fall below
/// their tolerances or the iteration budget runs out.
///
/// Running out of budget is reported through [`SolveStatus::MaxIterations`], not
/// as an error.
pub fn solve(
    problem: &DlmProblem,
    settings: &AdmmSettings,
    warm_start: Option<&AdmmState>,
) -> Result<AdmmReport> {
    settings.validate()?;
    let rho = resolve_rho(problem, settings.rho)?;
    let op = StepOperator::new(problem, rho)?;

    let mut state = match warm_start {
        Some(s) => {
            s.check_dims(problem)?;
            s.clone()
        }
        None => AdmmState::zeros(problem.dim(), problem.num_constraints()),
    };

    let mut history = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    for _ in 0..settings.max_iterations {
        let next = op.step(&state)?;
        let (primal, dual) = compute_residuals(&state.z, &next, problem, rho)?;
        let (eps_pri, eps_dual) = compute_tolerances(&next, problem, rho, settings)?;
        let record = IterationRecord {
            primal,
            dual,
            objective: problem.objective(&next.delta_theta),
            eps_pri,
            eps_dual,
        };
        history.push(record);
        state = next;
        if record.meets_tolerance() {
            status = SolveStatus::Converged;
            break;
        }
    }

    Ok(AdmmReport {
        solution: state.delta_theta.clone(),
        iterations: history.len(),
        history,
        status,
        rho_used: rho,
        final_state: state,
    })
}
