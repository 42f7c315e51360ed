//! Constrained damped-least-squares (DLS) problems and their scaled ADMM solver.
//!
//! The problem solved here is
//!
//! ```text
//! minimize    ½‖J Δθ − Δx‖² + (λ/2)‖Δθ‖²
//! subject to  A Δθ ≤ b
//! ```
//!
//! rewritten with a nonnegative slack `z` as `A Δθ − b + z = 0`, `z ≥ 0`, and
//! iterated in scaled form (`u = y / ρ`). See [`admm_step`] for the exact update
//! order and [`optimal_rho`] for the penalty selection rule.

mod admm;
mod penalty;

pub use admm::{
    admm_step, closed_form_dlm, compute_residuals, compute_tolerances, resolve_rho, solve, StepOperator,
};
pub use penalty::{
    constraint_gram_eigenvalues, convergence_diagnostics, gamma_from_scaled_eigenvalues,
    log_linear_slope, optimal_rho, ConvergenceDiagnostics, ZERO_EIGENVALUE_RATIO,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One instance of the constrained ℓ2-regularized least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DlmProblem {
    jacobian: DMatrix<f64>,
    delta_x: DVector<f64>,
    lambda: f64,
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl DlmProblem {
    pub fn new(
        jacobian: DMatrix<f64>,
        delta_x: DVector<f64>,
        lambda: f64,
        a: DMatrix<f64>,
        b: DVector<f64>,
    ) -> Result<Self> {
        let (m, n) = jacobian.shape();
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::param(format!("lambda must be > 0, got {lambda}")));
        }
        if m > n {
            return Err(Error::dim(format!(
                "jacobian is {m}x{n}; the system must be redundant or square (m <= n)"
            )));
        }
        if delta_x.len() != m {
            return Err(Error::dim(format!(
                "delta_x has length {}, jacobian has {m} rows",
                delta_x.len()
            )));
        }
        if a.ncols() != n {
            return Err(Error::dim(format!(
                "constraint matrix has {} columns, expected {n}",
                a.ncols()
            )));
        }
        if a.nrows() != b.len() {
            return Err(Error::dim(format!(
                "constraint matrix has {} rows but b has length {}",
                a.nrows(),
                b.len()
            )));
        }
        Ok(Self {
            jacobian,
            delta_x,
            lambda,
            a,
            b,
        })
    }

    /// A problem with no inequality rows (r = 0).
    pub fn unconstrained(jacobian: DMatrix<f64>, delta_x: DVector<f64>, lambda: f64) -> Result<Self> {
        let n = jacobian.ncols();
        Self::new(
            jacobian,
            delta_x,
            lambda,
            DMatrix::zeros(0, n),
            DVector::zeros(0),
        )
    }

    pub fn jacobian(&self) -> &DMatrix<f64> {
        &self.jacobian
    }

    pub fn delta_x(&self) -> &DVector<f64> {
        &self.delta_x
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn constraints_a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn constraints_b(&self) -> &DVector<f64> {
        &self.b
    }

    /// Task dimension m.
    pub fn task_dim(&self) -> usize {
        self.jacobian.nrows()
    }

    /// Primal dimension n.
    pub fn dim(&self) -> usize {
        self.jacobian.ncols()
    }

    /// Number of inequality rows r.
    pub fn num_constraints(&self) -> usize {
        self.a.nrows()
    }

    /// ½‖JΔθ − Δx‖² + (λ/2)‖Δθ‖².
    pub fn objective(&self, delta_theta: &DVector<f64>) -> f64 {
        let fit = &self.jacobian * delta_theta - &self.delta_x;
        0.5 * fit.norm_squared() + 0.5 * self.lambda * delta_theta.norm_squared()
    }

    /// Largest positive part of `A Δθ − b`.
    pub fn max_violation(&self, delta_theta: &DVector<f64>) -> f64 {
        (&self.a * delta_theta - &self.b)
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(*v))
    }

    /// `JᵀJ + λI`, the Hessian of the objective.
    pub fn hessian(&self) -> DMatrix<f64> {
        let n = self.dim();
        self.jacobian.transpose() * &self.jacobian + DMatrix::identity(n, n) * self.lambda
    }
}

/// Augmented Lagrangian penalty: fixed, or resolved to ρ* on every solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho {
    Auto,
    Fixed(f64),
}

impl Serialize for Rho {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rho::Auto => s.serialize_str("auto"),
            Rho::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Rho {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Rho::Fixed(v)),
            Raw::Text(t) if t.eq_ignore_ascii_case("auto") => Ok(Rho::Auto),
            Raw::Text(t) => t
                .parse::<f64>()
                .map(Rho::Fixed)
                .map_err(|_| serde::de::Error::custom(format!("rho must be a number or \"auto\", got {t:?}"))),
        }
    }
}

impl std::str::FromStr for Rho {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Rho::Auto);
        }
        s.parse::<f64>()
            .map(Rho::Fixed)
            .map_err(|_| Error::param(format!("rho must be a number or \"auto\", got {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmmSettings {
    pub rho: Rho,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iterations: usize,
}

impl Default for AdmmSettings {
    fn default() -> Self {
        Self {
            rho: Rho::Auto,
            eps_abs: 1e-5,
            eps_rel: 1e-3,
            max_iterations: 10_000,
        }
    }
}

impl AdmmSettings {
    pub fn with_rho(mut self, rho: Rho) -> Self {
        self.rho = rho;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Rho::Fixed(r) = self.rho {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::param(format!("rho must be > 0, got {r}")));
            }
        }
        if !(self.eps_abs > 0.0) || !(self.eps_rel > 0.0) {
            return Err(Error::param(format!(
                "tolerances must be > 0 (eps_abs = {}, eps_rel = {})",
                self.eps_abs, self.eps_rel
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations must be positive"));
        }
        Ok(())
    }
}

/// Iterate of the scaled ADMM: primal Δθ, slack z ≥ 0, scaled dual u = y/ρ.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub delta_theta: DVector<f64>,
    pub z: DVector<f64>,
    pub u: DVector<f64>,
}

impl AdmmState {
    pub fn zeros(n: usize, r: usize) -> Self {
        Self {
            delta_theta: DVector::zeros(n),
            z: DVector::zeros(r),
            u: DVector::zeros(r),
        }
    }

    /// Keeps `z` and `u`, resets the primal to zero.
    pub fn warm(&self) -> Self {
        Self {
            delta_theta: DVector::zeros(self.delta_theta.len()),
            z: self.z.clone(),
            u: self.u.clone(),
        }
    }

    pub(crate) fn check_dims(&self, problem: &DlmProblem) -> Result<()> {
        let (n, r) = (problem.dim(), problem.num_constraints());
        if self.delta_theta.len() != n || self.z.len() != r || self.u.len() != r {
            return Err(Error::dim(format!(
                "state has (Δθ, z, u) lengths ({}, {}, {}), problem needs ({n}, {r}, {r})",
                self.delta_theta.len(),
                self.z.len(),
                self.u.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub primal: f64,
    pub dual: f64,
    pub objective: f64,
    pub eps_pri: f64,
    pub eps_dual: f64,
}

impl IterationRecord {
    pub fn meets_tolerance(&self) -> bool {
        self.primal <= self.eps_pri && self.dual <= self.eps_dual
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct AdmmReport {
    pub solution: DVector<f64>,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    pub status: SolveStatus,
    pub rho_used: f64,
    /// Last iterate; its `(z, u)` is the warm start for a neighbouring problem.
    pub final_state: AdmmState,
}

impl AdmmReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.history.last()
    }
}
