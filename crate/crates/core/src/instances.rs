//! Seeded random problem instances for experiments and verification.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::solver::DlmProblem;

/// The generator every seeded routine in this crate uses.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

/// Random `m × n` problem with `r` unit-norm constraint rows around a strictly
/// feasible point, with a target far enough out that some rows bind.
pub fn random_problem<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    r: usize,
    lambda: f64,
) -> DlmProblem {
    let jacobian = gaussian_matrix(rng, m, n);
    let delta_x = gaussian_vector(rng, m) * 3.0;
    let mut a = gaussian_matrix(rng, r, n);
    for mut row in a.row_iter_mut() {
        let norm = row.norm();
        row /= norm;
    }
    let interior = gaussian_vector(rng, n) * 0.1;
    let slack = DVector::from_fn(r, |_, _| 0.05 + 0.5 * rng.random::<f64>());
    let b = &a * interior + slack;
    DlmProblem::new(jacobian, delta_x, lambda, a, b).expect("shapes are consistent")
}

/// [`random_problem`] with `m = ⌈n/2⌉`.
pub fn random_feasible_problem<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    r: usize,
    lambda: f64,
) -> DlmProblem {
    random_problem(rng, n.div_ceil(2), n, r, lambda)
}

/// λ drawn log-uniformly from `[lo, hi]`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}

/// `count` values log-spaced over `[lo, hi]`, endpoints included.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                let t = i as f64 / (count - 1) as f64;
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            })
            .collect(),
    }
}

/// Smooth closed loop of `count` waypoints starting at `start`.
///
/// Three Fourier harmonics with seeded Gaussian coefficients (amplitude falling
/// as 1/k), scaled so the largest bounding-box side equals `extent` (mm).
pub fn synthetic_lesion_path<R: Rng + ?Sized>(
    rng: &mut R,
    start: &Vector3<f64>,
    count: usize,
    extent: f64,
) -> Vec<Vector3<f64>> {
    const HARMONICS: usize = 3;
    let coeffs: Vec<(Vector3<f64>, Vector3<f64>)> = (1..=HARMONICS)
        .map(|k| {
            let mut draw = || Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal) / k as f64);
            (draw(), draw())
        })
        .collect();
    let raw: Vec<Vector3<f64>> = (0..count)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / count as f64;
            coeffs.iter().enumerate().fold(Vector3::zeros(), |acc, (k, (c, s))| {
                let kt = (k + 1) as f64 * t;
                acc + c * kt.cos() + s * kt.sin()
            })
        })
        .collect();
    let (lo, hi) = raw.iter().fold(
        (Vector3::repeat(f64::INFINITY), Vector3::repeat(f64::NEG_INFINITY)),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let scale = extent / (hi - lo).max();
    raw.iter().map(|p| start + (p - raw[0]) * scale).collect()
}
