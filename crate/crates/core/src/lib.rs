//! Constrained redundancy resolution for a 6-DoF arm carrying a 1-DoF continuum
//! manipulator (CDM), solved with optimally tuned scaled ADMM.
//!
//! - [`solver`]: the constrained damped-least-squares problem, scaled ADMM,
//!   the optimal penalty ρ* and spectral convergence diagnostics.
//! - [`oracle`]: exact active-set enumeration for small instances.
//! - [`kinematics`]: product-of-exponentials arm kinematics, the CDM tip model
//!   and the combined 6×7 Jacobian.
//! - [`constraints`]: polygonal remote-center-of-motion rows and increment limits.
//! - [`controller`]: the waypoint-tracking loop.
//! - [`harness`]: the tracking, ρ-sweep and sensitivity experiments with CSV output.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod constraints;
pub mod controller;
pub mod error;
pub mod harness;
pub mod instances;
pub mod kinematics;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testutil {
    pub use crate::instances::{gaussian_matrix, gaussian_vector, random_feasible_problem};

    pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        crate::instances::seeded(seed)
    }
}
