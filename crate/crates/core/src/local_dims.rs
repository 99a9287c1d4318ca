//! Local scaling exponents and measure-level dimension estimates.
//!
//! Pointwise exponents are slopes of `log mu(B(x, eps))` against `log eps`
//! on a geometric grid of radii. The liminf side is the smallest slope over
//! sliding windows, the limsup side the largest. Each window covers half of
//! the grid and the slope is a least-squares fit, which averages out the
//! log-periodic wobble of self-similar measures.
//!
//! Measure dimensions take a mu-weighted quantile of the pointwise values:
//! the upper Hausdorff dimension is a high quantile of the liminf exponents,
//! the lower packing dimension a low quantile of the limsup exponents.

use std::fmt::Write as _;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::{geometric_grid, v_table, DEFAULT_RATIO};
use crate::measures::{from_fixed, DiscreteMeasure};
use crate::par;

pub const MIN_SCALES: usize = 4;

/// Relative slack in the `gamma_H <= r` test. A lattice measure reproduces
/// the tent integral `3/t` only up to a relative error of order
/// `(t * spacing)^2`, so thresholds sitting exactly on a plateau value would
/// otherwise be decided by rounding.
pub const CLASSIFY_RTOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalDimEstimate {
    pub x: f64,
    /// Liminf-side exponent (Hausdorff side).
    pub d_lower: f64,
    /// Limsup-side exponent (packing side); `+inf` when some ball in the
    /// window is empty.
    pub d_upper: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub n_scales: usize,
}

/// Radii `eps_min * (eps_max / eps_min)^(j / (n - 1))`, ending exactly at
/// `eps_max`.
pub fn radius_grid(eps_min: f64, eps_max: f64, n_scales: usize) -> Result<Vec<f64>> {
    if !(eps_min > 0.0 && eps_min < eps_max && eps_max.is_finite()) {
        return Err(domain(format!("need 0 < eps_min < eps_max, got [{eps_min}, {eps_max}]")));
    }
    if n_scales < MIN_SCALES {
        return Err(domain(format!("need at least {MIN_SCALES} scales, got {n_scales}")));
    }
    let span = (eps_max / eps_min).ln();
    let last = n_scales - 1;
    Ok((0..n_scales)
        .map(|j| if j == last { eps_max } else { eps_min * (span * j as f64 / last as f64).exp() })
        .collect())
}

/// Window length in grid steps for `n_scales` radii.
pub fn window_steps(n_scales: usize) -> usize {
    ((n_scales - 1) / 2).max(1)
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Liminf/limsup exponents of `eps -> mu(B(x, eps))` over `[eps_min, eps_max]`.
pub fn local_dim_bounds(
    mu: &DiscreteMeasure,
    x: f64,
    eps_min: f64,
    eps_max: f64,
    n_scales: usize,
) -> Result<LocalDimEstimate> {
    let radii = radius_grid(eps_min, eps_max, n_scales)?;
    local_dim_on_grid(mu, x, &radii)
}

fn local_dim_on_grid(mu: &DiscreteMeasure, x: f64, radii: &[f64]) -> Result<LocalDimEstimate> {
    let n = radii.len();
    let eps_max = radii[n - 1];
    let masses: Vec<f64> = radii.iter().map(|&e| mu.ball_mass_unchecked(x, e)).collect();
    if masses[n - 1] <= 0.0 {
        return Err(Error::OutsideSupport { x, eps: eps_max });
    }
    let log_r: Vec<f64> = radii.iter().map(|e| e.ln()).collect();
    let log_m: Vec<f64> = masses.iter().map(|m| m.ln()).collect();
    let width = window_steps(n);
    let (mut lower, mut upper) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut saw_empty = false;
    for start in 0..n - width {
        let end = start + width + 1;
        if masses[start..end].iter().any(|&m| m <= 0.0) {
            saw_empty = true;
            continue;
        }
        // masses are nondecreasing, so the fitted slope is >= 0 up to rounding
        let slope = ls_slope(&log_r[start..end], &log_m[start..end]).max(0.0);
        lower = lower.min(slope);
        upper = upper.max(slope);
    }
    if saw_empty || !upper.is_finite() {
        upper = f64::INFINITY;
    }
    Ok(LocalDimEstimate { x, d_lower: lower, d_upper: upper, eps_min: radii[0], eps_max, n_scales: n })
}

/// Parameters of [`measure_dims`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureDimParams {
    pub n_sample: usize,
    pub quantile: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub n_scales: usize,
    pub seed: u64,
}

impl MeasureDimParams {
    pub fn new(eps_min: f64, eps_max: f64) -> Self {
        Self { n_sample: 400, quantile: 0.95, eps_min, eps_max, n_scales: 11, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.quantile > 0.5 && self.quantile < 1.0) {
            return Err(domain(format!("quantile must lie in (0.5, 1), got {}", self.quantile)));
        }
        if self.n_sample == 0 {
            return Err(domain("n_sample must be positive"));
        }
        radius_grid(self.eps_min, self.eps_max, self.n_scales).map(|_| ())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointDim {
    pub x: f64,
    pub weight: f64,
    pub d_lower: f64,
    pub d_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureDimReport {
    pub format: u32,
    /// Estimate of the upper Hausdorff dimension, clamped to `[0, 1]`.
    pub dim_h_upper: f64,
    /// Estimate of the lower packing dimension, clamped to `[0, 1]`.
    pub dim_p_lower: f64,
    pub quantile: f64,
    pub sample_points: usize,
    pub window: (f64, f64),
    pub n_scales: usize,
    pub n_sample: usize,
    pub seed: u64,
    #[serde(skip)]
    pub points: Vec<PointDim>,
}

impl MeasureDimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-point detail: `x,weight,d_lower,d_upper`.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("# format=1\nx,weight,d_lower,d_upper\n");
        for p in &self.points {
            writeln!(out, "{:e},{:e},{:e},{:e}", p.x, p.weight, p.d_lower, p.d_upper).unwrap();
        }
        out
    }
}

/// Deterministic per-index random stream.
pub(crate) fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn unit_draw(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Lower empirical quantile of already sorted values.
fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let idx = ((q * n as f64).ceil() as usize).clamp(1, n) - 1;
    sorted[idx]
}

/// Estimates `dim_H^+(mu)` and `dim_P^-(mu)` from mu-distributed sample
/// points.
pub fn measure_dims(mu: &DiscreteMeasure, params: &MeasureDimParams) -> Result<MeasureDimReport> {
    if mu.is_empty() {
        return Err(domain("cannot estimate dimensions of the zero measure"));
    }
    params.validate()?;
    let radii = radius_grid(params.eps_min, params.eps_max, params.n_scales)?;
    let sampled = par::map_range(params.n_sample, |i| {
        let mut rng = stream_rng(params.seed, i as u64);
        let k = mu.atom_for_fraction(unit_draw(&mut rng));
        let x = mu.positions()[k];
        local_dim_on_grid(mu, x, &radii).map(|est| PointDim {
            x,
            weight: mu.weights()[k],
            d_lower: est.d_lower,
            d_upper: est.d_upper,
        })
    });
    let mut points = Vec::with_capacity(sampled.len());
    for item in sampled {
        match item {
            Ok(p) => points.push(p),
            Err(Error::OutsideSupport { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if points.is_empty() {
        return Err(domain("no sample point carries mass at eps_max"));
    }
    let mut lows: Vec<f64> = points.iter().map(|p| p.d_lower).collect();
    let mut highs: Vec<f64> = points.iter().map(|p| p.d_upper).collect();
    lows.sort_by(f64::total_cmp);
    highs.sort_by(f64::total_cmp);
    let q = params.quantile;
    Ok(MeasureDimReport {
        format: 1,
        dim_h_upper: sorted_quantile(&lows, q).clamp(0.0, 1.0),
        dim_p_lower: sorted_quantile(&highs, 1.0 - q).clamp(0.0, 1.0),
        quantile: q,
        sample_points: points.len(),
        window: (params.eps_min, params.eps_max),
        n_scales: params.n_scales,
        n_sample: params.n_sample,
        seed: params.seed,
        points,
    })
}

/// Finite-horizon mass of `Z_mu(r, s)`: atoms whose `gamma_H` over the grid
/// `[s, t_max]` stays at or below `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub alpha: f64,
    pub threshold_r: f64,
    pub s: f64,
    pub t_max: f64,
    pub ratio: f64,
    /// Mass of atoms with `gamma_H <= r`.
    pub kc_mass: f64,
    /// Remaining mass.
    pub ks_mass: f64,
    pub total_mass: f64,
    pub kc_atoms: usize,
    pub ks_atoms: usize,
}

fn check_classify(r: f64, s: f64, t_max: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(domain(format!("threshold r must be positive, got {r}")));
    }
    if !(s > 0.0 && t_max > s) {
        return Err(domain(format!("need 0 < s < t_max, got s={s}, t_max={t_max}")));
    }
    Ok(())
}

/// Splits the mass of `mu` into the part where `t^alpha V_t` stays below `r`
/// on `[s, t_max]` and the rest.
pub fn classify_mass(mu: &DiscreteMeasure, alpha: f64, r: f64, s: f64, t_max: f64) -> Result<ClassificationReport> {
    let mut reports = classify_sweep(mu, &[alpha], r, s, t_max, DEFAULT_RATIO)?;
    Ok(reports.remove(0))
}

/// [`classify_mass`] for several exponents, sharing one `V_t` table per atom.
pub fn classify_sweep(
    mu: &DiscreteMeasure,
    alphas: &[f64],
    r: f64,
    s: f64,
    t_max: f64,
    ratio: f64,
) -> Result<Vec<ClassificationReport>> {
    check_classify(r, s, t_max)?;
    for &a in alphas {
        if !(0.0..=1.0).contains(&a) {
            return Err(domain(format!("alpha must lie in [0, 1], got {a}")));
        }
    }
    let grid = geometric_grid(s, t_max, ratio)?;
    let powers: Vec<Vec<f64>> = alphas.iter().map(|&a| grid.iter().map(|t| t.powf(a)).collect()).collect();
    // below[k][a] = atom k has gamma_H <= r at alphas[a]
    let below: Vec<Vec<bool>> = par::map_range(mu.len(), |k| {
        let values = v_table(mu, mu.positions()[k], &grid);
        powers
            .iter()
            .map(|pw| {
                let gamma_h = pw.iter().zip(&values).map(|(p, v)| p * v).fold(f64::NEG_INFINITY, f64::max);
                gamma_h <= r * (1.0 + CLASSIFY_RTOL)
            })
            .collect()
    });
    let total = mu.fixed_between(0, mu.len());
    let to_f64 = from_fixed;
    Ok(alphas
        .iter()
        .enumerate()
        .map(|(a, &alpha)| {
            let (mut kc, mut kc_atoms) = (0i128, 0usize);
            for (k, flags) in below.iter().enumerate() {
                if flags[a] {
                    kc += mu.fixed_between(k, k + 1);
                    kc_atoms += 1;
                }
            }
            ClassificationReport {
                alpha,
                threshold_r: r,
                s,
                t_max,
                ratio,
                kc_mass: to_f64(kc),
                ks_mass: to_f64(total - kc),
                total_mass: to_f64(total),
                kc_atoms,
                ks_atoms: mu.len() - kc_atoms,
            }
        })
        .collect())
}

/// Exponents `1/k` and `1 - 1/k` for `k = 2..=10`, ascending.
pub fn decomposition_alpha_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (2..=10).flat_map(|k| [1.0 / k as f64, 1.0 - 1.0 / k as f64]).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{cantor_measure, uniform_measure};

    const CANTOR_DIM: f64 = 0.630_929_753_571_457_4;

    #[test]
    fn atom_has_zero_exponents() {
        let mu = DiscreteMeasure::dirac(0.25).unwrap();
        let est = local_dim_bounds(&mu, 0.25, 1e-4, 1e-1, 8).unwrap();
        assert_eq!(est.d_lower, 0.0);
        assert_eq!(est.d_upper, 0.0);
    }

    #[test]
    fn lebesgue_exponent_one() {
        let mu = uniform_measure(0.0, 1.0, 100_000).unwrap();
        let est = local_dim_bounds(&mu, 0.5, 1e-3, 1e-1, 11).unwrap();
        // closed form: mu(B(0.5, eps)) = 2 eps up to one atom
        assert!((est.d_lower - 1.0).abs() < 0.05, "{est:?}");
        assert!((est.d_upper - 1.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn cantor_exponent_at_origin() {
        let mu = cantor_measure(14).unwrap();
        let est = local_dim_bounds(&mu, 0.0, 3f64.powi(-12), 3f64.powi(-2), 11).unwrap();
        assert!((est.d_lower - CANTOR_DIM).abs() < 0.05, "{est:?}");
        assert!((est.d_upper - CANTOR_DIM).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn outside_support_and_bad_windows() {
        let mu = DiscreteMeasure::dirac(0.0).unwrap();
        assert!(matches!(local_dim_bounds(&mu, 5.0, 1e-3, 1e-1, 6), Err(Error::OutsideSupport { .. })));
        assert!(local_dim_bounds(&mu, 0.0, 1e-1, 1e-3, 6).is_err());
        assert!(local_dim_bounds(&mu, 0.0, 1e-3, 1e-1, 3).is_err());
    }

    #[test]
    fn empty_inner_ball_gives_infinite_upper() {
        let mu = DiscreteMeasure::dirac(0.0).unwrap();
        let est = local_dim_bounds(&mu, 0.05, 1e-3, 1.0, 8).unwrap();
        assert_eq!(est.d_upper, f64::INFINITY);
    }

    #[test]
    fn separated_atoms_report_zero() {
        let atoms: Vec<(f64, f64)> = (0..10).map(|k| (k as f64, 0.1)).collect();
        let mu = DiscreteMeasure::new(atoms).unwrap();
        let report = measure_dims(&mu, &MeasureDimParams::new(1e-3, 0.5)).unwrap();
        assert_eq!((report.dim_h_upper, report.dim_p_lower), (0.0, 0.0));
        assert!(measure_dims(&DiscreteMeasure::empty(), &MeasureDimParams::new(1e-3, 0.5)).is_err());
    }

    #[test]
    fn measure_dims_validates_params() {
        let mu = DiscreteMeasure::dirac(0.0).unwrap();
        let mut p = MeasureDimParams::new(1e-3, 0.5);
        p.quantile = 0.4;
        assert!(measure_dims(&mu, &p).is_err());
        p.quantile = 0.9;
        p.n_sample = 0;
        assert!(measure_dims(&mu, &p).is_err());
    }

    #[test]
    fn sampling_is_proportional_to_weight() {
        let mu = DiscreteMeasure::new(vec![(0.0, 0.9), (1.0, 0.1)]).unwrap();
        let mut p = MeasureDimParams::new(1e-3, 0.1);
        p.n_sample = 4000;
        p.seed = 7;
        let report = measure_dims(&mu, &p).unwrap();
        let heavy = report.points.iter().filter(|q| q.x == 0.0).count() as f64;
        let share = heavy / report.sample_points as f64;
        assert!((share - 0.9).abs() < 0.03, "share {share}");
    }

    #[test]
    fn classify_atom_examples() {
        let mu = DiscreteMeasure::dirac(0.0).unwrap();
        let (s, t_max) = (1.0, 1024.0);
        let grid = geometric_grid(s, t_max, DEFAULT_RATIO).unwrap();
        let top = *grid.last().unwrap();
        // gamma_H on an atom is the largest grid value of t^alpha
        let rep = classify_mass(&mu, 0.5, top.powf(0.5), s, t_max).unwrap();
        assert_eq!(rep.kc_mass, 1.0);
        let rep = classify_mass(&mu, 0.5, 0.5 * s.powf(0.5), s, t_max).unwrap();
        assert_eq!(rep.kc_mass, 0.0);
        assert_eq!(rep.ks_mass, 1.0);
    }

    #[test]
    fn classify_lebesgue_alpha_one() {
        let mu = uniform_measure(0.0, 1.0, 100_000).unwrap();
        let rep = classify_mass(&mu, 1.0, 3.0, 10.0, 1e3).unwrap();
        assert!(rep.kc_mass >= 0.95, "{rep:?}");
        assert!((rep.kc_mass + rep.ks_mass - rep.total_mass).abs() < 1e-9);
    }

    #[test]
    fn alpha_grid_shape() {
        let g = decomposition_alpha_grid();
        assert_eq!(g.len(), 17);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[g.len() - 1], 0.9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
