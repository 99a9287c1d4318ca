//! Closed-form reference laws used to check the numerics.

use std::f64::consts::PI;

use crate::error::Result;
use crate::measures::DiscreteMeasure;

/// Distribution function of the free-Laplacian spectral measure at a site,
/// `1/2 + arcsin(x/2)/pi` on `[-2, 2]`.
pub fn arcsine_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + (x / 2.0).asin() / PI
    }
}

/// `1 / (pi sqrt(4 - x^2))` on `(-2, 2)`.
pub fn arcsine_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        1.0 / (PI * (4.0 - x * x).sqrt())
    }
}

/// Arcsine mass of the open ball `B(x, eps)`.
pub fn arcsine_ball_mass(x: f64, eps: f64) -> f64 {
    arcsine_cdf(x + eps) - arcsine_cdf(x - eps)
}

/// Eigenvalues `c + 2 cos(k pi / (N + 1))`, `k = 1..=N`, of the constant
/// potential truncation, ascending.
pub fn constant_truncation_spectrum(c: f64, n: usize) -> Vec<f64> {
    (1..=n).rev().map(|k| c + 2.0 * (k as f64 * PI / (n + 1) as f64).cos()).collect()
}

/// `n` equal atoms at the cell midpoints `(k + 1/2) / n`; every local
/// dimension is zero.
pub fn separated_atoms(n: usize) -> Result<DiscreteMeasure> {
    DiscreteMeasure::new((0..n).map(|k| ((k as f64 + 0.5) / n as f64, 1.0 / n as f64)).collect())
}

/// `log 2 / log 3`.
pub fn cantor_dimension() -> f64 {
    2f64.ln() / 3f64.ln()
}
