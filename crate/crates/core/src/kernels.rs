//! Tent-kernel smoothing of ball masses.
//!
//! `f_{t,x}` equals one on `|x - y| <= 1/t`, vanishes for `|x - y| >= 2/t`
//! and is linear in between. Its integral `V_t(mu, x)` is squeezed between
//! the open-ball masses at radii `1/t` and `2/t`; the implementation clamps
//! into that band so the inequality holds in floating point too.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::measures::DiscreteMeasure;

/// Largest number of grid points a profile may hold.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Default multiplicative step of the `t` grid.
pub const DEFAULT_RATIO: f64 = 1.189_207_115_002_721; // 2^(1/4)

// Ramps with more atoms than this use prefix moments instead of a direct sum.
const DIRECT_RAMP_LIMIT: usize = 48;

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("kernel parameter t must be positive, got {t}")))
    }
}

#[inline]
fn tent_at_distance(t: f64, d: f64) -> f64 {
    if d <= 1.0 / t {
        1.0
    } else if d >= 2.0 / t {
        0.0
    } else {
        (2.0 - t * d).clamp(0.0, 1.0)
    }
}

/// The tent kernel `f_{t,x}(y)`.
pub fn tent_eval(t: f64, x: f64, y: f64) -> Result<f64> {
    check_t(t)?;
    Ok(tent_at_distance(t, (y - x).abs()))
}

/// `V_t(mu, x) = ∫ f_{t,x} dmu`.
pub fn v_t(mu: &DiscreteMeasure, t: f64, x: f64) -> Result<f64> {
    check_t(t)?;
    Ok(v_t_unchecked(mu, t, x))
}

pub(crate) fn v_t_unchecked(mu: &DiscreteMeasure, t: f64, x: f64) -> f64 {
    let inner = 1.0 / t;
    let outer = 2.0 / t;
    let (lo2, hi2) = mu.open_range(x, outer);
    if lo2 == hi2 {
        return 0.0;
    }
    let (lo1, hi1) = mu.open_range(x, inner);
    let lower = mu.mass_between(lo1, hi1);
    let upper = mu.mass_between(lo2, hi2);
    // closed plateau |p - x| <= 1/t, clipped to the open outer ball
    let (plo, phi) = mu.closed_range(x, inner);
    let (plo, phi) = (plo.max(lo2), phi.min(hi2));
    let plateau = mu.mass_between(plo, phi);
    let pos = mu.positions();
    let w = mu.weights();

    let ramp = |a: usize, b: usize, left: bool| -> f64 {
        if b <= a {
            return 0.0;
        }
        if b - a <= DIRECT_RAMP_LIMIT {
            (a..b).map(|k| w[k] * tent_at_distance(t, (pos[k] - x).abs())).sum()
        } else {
            // sum w (2 - t|p - x|) = 2W - t * sum w |p - x|
            let mass = mu.mass_between(a, b);
            let first = mu.moment_between(a, b) - x * mass;
            let abs_first = if left { -first } else { first };
            (2.0 * mass - t * abs_first).clamp(0.0, mass)
        }
    };
    let v = plateau + ramp(lo2, plo, true) + ramp(phi, hi2, false);
    v.clamp(lower, upper)
}

/// `t_j = s * ratio^j` for `t_j <= t_max`, built by repeated multiplication so
/// that the grid started from any of its points is a suffix of it.
pub fn geometric_grid(s: f64, t_max: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(s > 0.0 && s.is_finite()) || !(t_max > s) || !t_max.is_finite() {
        return Err(domain(format!("need 0 < s < t_max, got s={s}, t_max={t_max}")));
    }
    if !(ratio > 1.0) || !ratio.is_finite() {
        return Err(domain(format!("grid ratio must exceed one, got {ratio}")));
    }
    let expected = ((t_max / s).ln() / ratio.ln()).floor() + 1.0;
    if expected > MAX_GRID_POINTS as f64 {
        return Err(Error::Resource(format!("t grid would hold {expected} points (limit {MAX_GRID_POINTS})")));
    }
    let limit = t_max * (1.0 + 1e-12);
    let mut grid = Vec::with_capacity(expected as usize + 1);
    let mut t = s;
    while t <= limit {
        grid.push(t);
        t *= ratio;
    }
    Ok(grid)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub t: f64,
    pub v: f64,
    pub scaled: f64,
}

/// Finite-horizon table of `t^alpha V_t(mu, x)` with its extreme values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingProfile {
    pub x: f64,
    pub alpha: f64,
    pub s_min: f64,
    pub t_max: f64,
    pub rows: Vec<ProfileRow>,
    pub gamma_h: f64,
    pub gamma_p: f64,
    /// `t` at which `gamma_h` is attained.
    pub t_gamma_h: f64,
    /// `t` at which `gamma_p` is attained.
    pub t_gamma_p: f64,
}

impl ScalingProfile {
    pub(crate) fn from_values(x: f64, alpha: f64, t_max: f64, grid: &[f64], values: &[f64]) -> Self {
        let rows: Vec<ProfileRow> =
            grid.iter().zip(values).map(|(&t, &v)| ProfileRow { t, v, scaled: t.powf(alpha) * v }).collect();
        let (mut gamma_h, mut t_gamma_h) = (f64::NEG_INFINITY, f64::NAN);
        let (mut gamma_p, mut t_gamma_p) = (f64::INFINITY, f64::NAN);
        for row in &rows {
            if row.scaled > gamma_h {
                gamma_h = row.scaled;
                t_gamma_h = row.t;
            }
            if row.scaled < gamma_p {
                gamma_p = row.scaled;
                t_gamma_p = row.t;
            }
        }
        Self { x, alpha, s_min: grid[0], t_max, rows, gamma_h, gamma_p, t_gamma_h, t_gamma_p }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "# format=1,x={:e},alpha={:e},s={:e},t_max={:e},gamma_h={:e},gamma_p={:e}",
            self.x, self.alpha, self.s_min, self.t_max, self.gamma_h, self.gamma_p
        )
        .unwrap();
        writeln!(out, "t,v,scaled").unwrap();
        for r in &self.rows {
            writeln!(out, "{:e},{:e},{:e}", r.t, r.v, r.scaled).unwrap();
        }
        out
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(domain(format!("alpha must lie in [0, 1], got {alpha}")))
    }
}

/// `V_t(mu, x)` on every grid point.
pub fn v_table(mu: &DiscreteMeasure, x: f64, grid: &[f64]) -> Vec<f64> {
    grid.iter().map(|&t| v_t_unchecked(mu, t, x)).collect()
}

/// Scaled tent integrals on the grid `s * ratio^j <= t_max`; `gamma_h` and
/// `gamma_p` are the max and min of `t^alpha V_t` over the grid.
pub fn scaling_profile(
    mu: &DiscreteMeasure,
    alpha: f64,
    x: f64,
    s: f64,
    t_max: f64,
    ratio: f64,
) -> Result<ScalingProfile> {
    check_alpha(alpha)?;
    let grid = geometric_grid(s, t_max, ratio)?;
    let values = v_table(mu, x, &grid);
    Ok(ScalingProfile::from_values(x, alpha, t_max, &grid, &values))
}

/// Largest horizon trusted for a measure resolved to `resolution`.
pub fn t_max_for_resolution(resolution: f64) -> f64 {
    1.0 / (5.0 * resolution)
}
