use nalgebra::{linalg::Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues of `A Q⁻¹ Aᵀ` below this fraction of the largest are treated as zero.
pub const ZERO_EIGENVALUE_RATIO: f64 = 1e-10;

fn check_inputs(jacobian: &DMatrix<f64>, lambda: f64, a: &DMatrix<f64>) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(Error::param(format!("lambda must be > 0, got {lambda}")));
    }
    if a.ncols() != jacobian.ncols() {
        return Err(Error::dim(format!(
            "constraint matrix has {} columns, jacobian has {}",
            a.ncols(),
            jacobian.ncols()
        )));
    }
    Ok(())
}

fn hessian(jacobian: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let n = jacobian.ncols();
    jacobian.transpose() * jacobian + DMatrix::identity(n, n) * lambda
}

fn sorted_symmetric_eigenvalues(mut m: DMatrix<f64>) -> Vec<f64> {
    // symmetrize away round-off before the eigensolver sees it
    let mt = m.transpose();
    m = (m + mt) * 0.5;
    let mut eig: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Ascending eigenvalues of `A Q⁻¹ Aᵀ`, `Q = JᵀJ + λI`.
pub fn constraint_gram_eigenvalues(
    jacobian: &DMatrix<f64>,
    lambda: f64,
    a: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    check_inputs(jacobian, lambda, a)?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let chol = Cholesky::new(hessian(jacobian, lambda))
        .ok_or_else(|| Error::param("JᵀJ + λI is not positive definite"))?;
    let q_inv_at = chol.solve(&a.transpose());
    Ok(sorted_symmetric_eigenvalues(a * q_inv_at))
}

/// Penalty `ρ* = 1 / √(σ_min σ_max)` over the eigenvalues of `A Q⁻¹ Aᵀ`.
///
/// When `A` is rank deficient, `σ_min` is the smallest eigenvalue above
/// [`ZERO_EIGENVALUE_RATIO`]` · σ_max`.
pub fn optimal_rho(jacobian: &DMatrix<f64>, lambda: f64, a: &DMatrix<f64>) -> Result<f64> {
    if a.nrows() == 0 {
        return Err(Error::param("optimal_rho needs at least one constraint row"));
    }
    let eig = constraint_gram_eigenvalues(jacobian, lambda, a)?;
    let sigma_max = *eig.last().expect("nonempty");
    if !(sigma_max > f64::MIN_POSITIVE) {
        return Err(Error::DegenerateConstraints);
    }
    let threshold = ZERO_EIGENVALUE_RATIO * sigma_max;
    let sigma_min = eig
        .iter()
        .copied()
        .find(|&s| s > threshold)
        .expect("sigma_max itself is above the threshold");
    Ok(1.0 / (sigma_min * sigma_max).sqrt())
}

/// Spectral view of the ADMM iteration for one `(J, λ, A, ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceDiagnostics {
    /// `max_i ½|1 − 2σ_i(P)| + ½`; `½` when there are no constraint rows.
    pub gamma: f64,
    /// `σ_i(P)` from the map `σ ↦ σ / (1 + σ)` over `σ_i(ρ A Q⁻¹ Aᵀ)`, ascending.
    pub p_eigenvalues: Vec<f64>,
    /// Eigenvalues of `P = A (Q + ρAᵀA)⁻¹ ρ Aᵀ` computed directly, ascending.
    pub p_eigenvalues_direct: Vec<f64>,
    /// Largest absolute gap between the mapped and direct spectra.
    pub map_discrepancy: f64,
    /// ρ* for the same `(J, λ, A)`; `None` when `A` is empty or zero.
    pub rho_star: Option<f64>,
}

/// Maps `σ(ρ A Q⁻¹ Aᵀ)` to `σ(P)` and returns the contraction factor γ.
pub fn gamma_from_scaled_eigenvalues(scaled: &[f64]) -> (f64, Vec<f64>) {
    let p: Vec<f64> = scaled
        .iter()
        .map(|&s| {
            let s = s.max(0.0);
            s / (1.0 + s)
        })
        .collect();
    let gamma = p
        .iter()
        .map(|&sp| 0.5 * (1.0 - 2.0 * sp).abs() + 0.5)
        .fold(0.5, f64::max);
    (gamma, p)
}

pub fn convergence_diagnostics(
    jacobian: &DMatrix<f64>,
    lambda: f64,
    a: &DMatrix<f64>,
    rho: f64,
) -> Result<ConvergenceDiagnostics> {
    if !(rho > 0.0) {
        return Err(Error::param(format!("rho must be > 0, got {rho}")));
    }
    let scaled: Vec<f64> = constraint_gram_eigenvalues(jacobian, lambda, a)?
        .into_iter()
        .map(|s| s * rho)
        .collect();
    let (gamma, p_eigenvalues) = gamma_from_scaled_eigenvalues(&scaled);

    let p_eigenvalues_direct = if a.nrows() == 0 {
        Vec::new()
    } else {
        let system = hessian(jacobian, lambda) + a.transpose() * a * rho;
        let chol = Cholesky::new(system)
            .ok_or_else(|| Error::param("Q + ρAᵀA is not positive definite"))?;
        let p = a * chol.solve(&a.transpose()) * rho;
        sorted_symmetric_eigenvalues(p)
    };
    let map_discrepancy = p_eigenvalues
        .iter()
        .zip(&p_eigenvalues_direct)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let rho_star = if a.nrows() == 0 {
        None
    } else {
        match optimal_rho(jacobian, lambda, a) {
            Ok(r) => Some(r),
            Err(Error::DegenerateConstraints) => None,
            Err(e) => return Err(e),
        }
    };

    Ok(ConvergenceDiagnostics {
        gamma,
        p_eigenvalues,
        p_eigenvalues_direct,
        map_discrepancy,
        rho_star,
    })
}

/// Least-squares slope of `ln(values)` against the iteration index.
pub fn log_linear_slope(values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(i, v)| (i as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{gaussian_matrix, rng};

    #[test]
    fn orthonormal_rows_with_zero_jacobian_give_unit_rho() {
        // Q = I, A Aᵀ = I
        let j = DMatrix::zeros(3, 4);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = DMatrix::from_row_slice(2, 4, &[s, s, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let rho = optimal_rho(&j, 1.0, &a).unwrap();
        assert!((rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_rows_match_reweighted_deduplicated_rho() {
        // [a0; a1; a2; a3; a1] has the same Gram AᵀA as [a0; √2·a1; a2; a3], so the
        // nonzero spectra agree once the zero eigenvalue is dropped
        let mut r = rng(7);
        let j = gaussian_matrix(&mut r, 3, 7);
        let a = gaussian_matrix(&mut r, 4, 7);
        let mut dup = DMatrix::zeros(5, 7);
        dup.rows_mut(0, 4).copy_from(&a);
        dup.row_mut(4).copy_from(&a.row(1));
        let mut dedup = a.clone();
        dedup.row_mut(1).scale_mut(std::f64::consts::SQRT_2);

        let eig = constraint_gram_eigenvalues(&j, 0.1, &dup).unwrap();
        assert!(eig[0].abs() < ZERO_EIGENVALUE_RATIO * eig[4]);
        let with_dup = optimal_rho(&j, 0.1, &dup).unwrap();
        let reference = optimal_rho(&j, 0.1, &dedup).unwrap();
        assert!((with_dup - reference).abs() < 1e-9 * reference);
    }

    #[test]
    fn stacked_copy_matches_deduplicated_rho() {
        let mut r = rng(8);
        let j = gaussian_matrix(&mut r, 3, 7);
        let a = gaussian_matrix(&mut r, 4, 7);
        let mut stacked = DMatrix::zeros(8, 7);
        stacked.rows_mut(0, 4).copy_from(&(&a * std::f64::consts::FRAC_1_SQRT_2));
        stacked.rows_mut(4, 4).copy_from(&(&a * std::f64::consts::FRAC_1_SQRT_2));
        let base = optimal_rho(&j, 0.1, &a).unwrap();
        let stacked_rho = optimal_rho(&j, 0.1, &stacked).unwrap();
        assert!((base - stacked_rho).abs() < 1e-9 * base);
    }

    #[test]
    fn zero_constraint_matrix_is_degenerate() {
        let j = DMatrix::identity(3, 3);
        let a = DMatrix::zeros(2, 3);
        assert!(matches!(
            optimal_rho(&j, 1.0, &a),
            Err(Error::DegenerateConstraints)
        ));
    }

    #[test]
    fn optimal_rho_requires_rows_and_positive_lambda() {
        let j = DMatrix::identity(3, 3);
        assert!(optimal_rho(&j, 1.0, &DMatrix::zeros(0, 3)).is_err());
        assert!(optimal_rho(&j, 0.0, &DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn unit_eigenvalue_gives_half_gamma() {
        let (gamma, p) = gamma_from_scaled_eigenvalues(&[1.0]);
        assert_eq!(p, vec![0.5]);
        assert_eq!(gamma, 0.5);
    }

    #[test]
    fn zero_eigenvalue_gives_unit_gamma() {
        let (gamma, p) = gamma_from_scaled_eigenvalues(&[0.0]);
        assert_eq!(p, vec![0.0]);
        assert_eq!(gamma, 1.0);
    }

    #[test]
    fn mapped_spectrum_matches_direct_p() {
        let mut r = rng(13);
        let j = gaussian_matrix(&mut r, 4, 7);
        let a = gaussian_matrix(&mut r, 5, 7);
        let d = convergence_diagnostics(&j, 0.1, &a, 1.0).unwrap();
        assert_eq!(d.p_eigenvalues.len(), 5);
        assert!(d.map_discrepancy < 1e-8);
        assert!(d.gamma < 1.0 && d.gamma >= 0.5);
        assert!(d.p_eigenvalues.iter().all(|&s| (0.0..1.0).contains(&s)));
    }

    #[test]
    fn diagnostics_on_empty_constraints() {
        let j = DMatrix::identity(2, 3);
        let d = convergence_diagnostics(&j, 0.5, &DMatrix::zeros(0, 3), 1.0).unwrap();
        assert_eq!(d.gamma, 0.5);
        assert!(d.p_eigenvalues.is_empty());
        assert_eq!(d.rho_star, None);
    }

    #[test]
    fn slope_of_geometric_sequence() {
        let v: Vec<f64> = (0..20).map(|k| 3.0 * 0.5f64.powi(k)).collect();
        let s = log_linear_slope(&v).unwrap();
        assert!((s - 0.5f64.ln()).abs() < 1e-12);
        assert_eq!(log_linear_slope(&[1.0]), None);
    }
}
