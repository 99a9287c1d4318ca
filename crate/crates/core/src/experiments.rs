//! End-to-end recipes: dimension profiles along a path of potentials, depth
//! scans of limit-periodic series, and alpha sweeps of the classification.
//!
//! Every table is a finite-scale profile of truncated operators. Truncations
//! are always atomic, so nothing here certifies a property of the whole-line
//! operator.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::{geometric_grid, v_table, DEFAULT_RATIO};
use crate::local_dims::{classify_sweep, measure_dims, MeasureDimParams, MeasureDimReport};
use crate::measures::{levy_distance, DiscreteMeasure};
use crate::operators::{build_truncation, potential_distance, JacobiTruncation, PotentialKind, PotentialSpec};
use crate::par;
use crate::spectral::{spectral_measure_of, Psi, SpectralResult};

pub const WONDERLAND_LABEL: &str = "finite-scale profile;pure-point pole=strong-coupling random surrogate";
pub const LIMIT_PERIODIC_LABEL: &str = "finite-scale profile;periodic truncations of the sampling series";

/// Parses JSON, reporting failures with their line number.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
}

/// SplitMix64 of `seed` and `index`: independent seeds per grid point.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn default_format() -> u32 {
    1
}
fn default_n_sample() -> usize {
    400
}
fn default_quantile() -> f64 {
    0.8
}
fn default_n_scales() -> usize {
    11
}
fn default_eps_max() -> f64 {
    0.5
}
fn default_floor_factor() -> f64 {
    10.0
}

/// Dimension-estimator settings for spectral measures. The lower radius is
/// floored at `floor_factor` times the median eigenvalue spacing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimConfig {
    #[serde(default = "default_n_sample")]
    pub n_sample: usize,
    #[serde(default = "default_quantile")]
    pub quantile: f64,
    #[serde(default = "default_n_scales")]
    pub n_scales: usize,
    #[serde(default = "default_eps_max")]
    pub eps_max: f64,
    #[serde(default)]
    pub eps_min: Option<f64>,
    #[serde(default = "default_floor_factor")]
    pub floor_factor: f64,
}

impl Default for DimConfig {
    fn default() -> Self {
        Self {
            n_sample: default_n_sample(),
            quantile: default_quantile(),
            n_scales: default_n_scales(),
            eps_max: default_eps_max(),
            eps_min: None,
            floor_factor: default_floor_factor(),
        }
    }
}

impl DimConfig {
    /// Estimator parameters for a computed spectral measure.
    pub fn params_for(&self, result: &SpectralResult, seed: u64) -> Result<MeasureDimParams> {
        let spacing = result.eigen_median_spacing().ok_or_else(|| domain("need at least two eigenvalues"))?;
        let floor = self.floor_factor * spacing;
        let eps_min = self.eps_min.unwrap_or(0.0).max(floor);
        if eps_min >= self.eps_max {
            return Err(domain(format!(
                "radius floor {eps_min:e} reaches eps_max {}; increase N or eps_max",
                self.eps_max
            )));
        }
        let params = MeasureDimParams {
            n_sample: self.n_sample,
            quantile: self.quantile,
            eps_min,
            eps_max: self.eps_max,
            n_scales: self.n_scales,
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<()> {
        if !(self.floor_factor >= 0.0 && self.floor_factor.is_finite()) {
            return Err(domain("floor_factor must be nonnegative"));
        }
        MeasureDimParams {
            n_sample: self.n_sample,
            quantile: self.quantile,
            eps_min: self.eps_min.unwrap_or(self.eps_max * 1e-3),
            eps_max: self.eps_max,
            n_scales: self.n_scales,
            seed: 0,
        }
        .validate()
    }
}

fn default_table(name: &str) -> String {
    format!("{name}.csv")
}
fn wonderland_table() -> String {
    default_table("wonderland")
}
fn limit_periodic_table() -> String {
    default_table("limit_periodic")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WonderlandConfig {
    #[serde(default = "default_format")]
    pub format: u32,
    /// Potential at lambda = 0.
    pub ac_endpoint: PotentialSpec,
    /// Potential at lambda = 1.
    pub pp_endpoint: PotentialSpec,
    pub lambdas: Vec<f64>,
    pub n: usize,
    #[serde(default)]
    pub psi: Psi,
    #[serde(default)]
    pub dims: DimConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "wonderland_table")]
    pub table: String,
}

impl WonderlandConfig {
    /// Free operator to the random potential of bound 10 at `N = 2001`.
    pub fn canonical(seed: u64) -> Self {
        Self {
            format: 1,
            ac_endpoint: PotentialSpec::zero(),
            pp_endpoint: PotentialSpec::random(seed, 10.0).expect("positive bound"),
            lambdas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            n: 2001,
            psi: Psi::Delta0,
            dims: DimConfig::default(),
            seed,
            table: wonderland_table(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = parse_json(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format != 1 {
            return Err(domain(format!("unsupported config format {}", self.format)));
        }
        self.ac_endpoint.validate()?;
        self.pp_endpoint.validate()?;
        check_lambdas(&self.lambdas)?;
        if self.n < 2 {
            return Err(domain("n must be at least 2"));
        }
        self.dims.validate()
    }
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(domain("lambda grid is empty"));
    }
    if lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(domain("lambda values must lie in [0, 1]"));
    }
    if lambdas.windows(2).any(|w| w[0] > w[1]) {
        return Err(domain("lambda grid must be sorted"));
    }
    Ok(())
}

/// `(1 - lambda) V_a + lambda V_b` on the `N`-site window, as an explicit
/// potential with bound `(1 - lambda) r_a + lambda r_b`.
pub fn interpolate(a: &PotentialSpec, b: &PotentialSpec, lambda: f64, n: usize) -> Result<JacobiTruncation> {
    let ta = build_truncation(a, n)?;
    let tb = build_truncation(b, n)?;
    let values: Vec<f64> = ta.diagonal.iter().zip(&tb.diagonal).map(|(x, y)| (1.0 - lambda) * x + lambda * y).collect();
    let bound = (1.0 - lambda) * a.bound + lambda * b.bound;
    let spec = PotentialSpec::new(PotentialKind::Explicit { values, origin: ta.window_start }, bound)?;
    build_truncation(&spec, n)
}

/// Shared columns of experiment rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimColumns {
    pub dim_h_upper: f64,
    pub dim_p_lower: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub n_scales: usize,
    pub quantile: f64,
    pub n_sample: usize,
    pub sample_seed: u64,
    pub atoms: usize,
}

impl DimColumns {
    fn new(report: &MeasureDimReport, atoms: usize) -> Self {
        Self {
            dim_h_upper: report.dim_h_upper,
            dim_p_lower: report.dim_p_lower,
            eps_min: report.window.0,
            eps_max: report.window.1,
            n_scales: report.n_scales,
            quantile: report.quantile,
            n_sample: report.n_sample,
            sample_seed: report.seed,
            atoms,
        }
    }

    const HEADER: &'static str = "dim_h_upper,dim_p_lower,eps_min,eps_max,n_scales,quantile,n_sample,sample_seed,atoms";

    fn write(&self, out: &mut String) {
        write!(
            out,
            "{:e},{:e},{:e},{:e},{},{:e},{},{},{}",
            self.dim_h_upper,
            self.dim_p_lower,
            self.eps_min,
            self.eps_max,
            self.n_scales,
            self.quantile,
            self.n_sample,
            self.sample_seed,
            self.atoms
        )
        .unwrap();
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WonderlandRow {
    pub lambda: f64,
    pub support_width: f64,
    pub n: usize,
    pub psi: String,
    #[serde(flatten)]
    pub dims: DimColumns,
    pub label: String,
}

pub fn wonderland_scan(cfg: &WonderlandConfig) -> Result<Vec<WonderlandRow>> {
    cfg.validate()?;
    par::try_map_range(cfg.lambdas.len(), |i| {
        let lambda = cfg.lambdas[i];
        let m = interpolate(&cfg.ac_endpoint, &cfg.pp_endpoint, lambda, cfg.n)?;
        let result = spectral_measure_of(&m, &cfg.psi)?;
        let params = cfg.dims.params_for(&result, derive_seed(cfg.seed, i as u64))?;
        let report = measure_dims(&result.measure, &params)?;
        Ok(WonderlandRow {
            lambda,
            support_width: result.eigenvalues.last().unwrap() - result.eigenvalues[0],
            n: cfg.n,
            psi: cfg.psi.to_string(),
            dims: DimColumns::new(&report, result.measure.len()),
            label: WONDERLAND_LABEL.to_string(),
        })
    })
}

pub fn wonderland_csv(rows: &[WonderlandRow]) -> String {
    let mut out = format!("# format=1\nlambda,support_width,n,psi,{},label\n", DimColumns::HEADER);
    for r in rows {
        write!(out, "{:e},{:e},{},{},", r.lambda, r.support_width, r.n, r.psi).unwrap();
        r.dims.write(&mut out);
        writeln!(out, ",{}", r.label).unwrap();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitPeriodicConfig {
    #[serde(default = "default_format")]
    pub format: u32,
    /// A limit-periodic potential; row `k` keeps its terms of depth `<= k`.
    pub spec: PotentialSpec,
    pub depths: Vec<u32>,
    pub n: usize,
    #[serde(default)]
    pub psi: Psi,
    #[serde(default)]
    pub dims: DimConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "limit_periodic_table")]
    pub table: String,
}

impl LimitPeriodicConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = parse_json(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format != 1 {
            return Err(domain(format!("unsupported config format {}", self.format)));
        }
        self.spec.validate()?;
        if !matches!(self.spec.kind, PotentialKind::LimitPeriodic { .. }) {
            return Err(domain("limit-periodic scan needs a limit_periodic spec"));
        }
        if self.depths.is_empty() || self.depths.iter().any(|&k| k == 0 || k > 30) {
            return Err(domain("depths must be a nonempty list in 1..=30"));
        }
        if self.n < 2 {
            return Err(domain("n must be at least 2"));
        }
        self.dims.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitPeriodicRow {
    pub depth: u32,
    /// `2^depth`; the potential's period divides it.
    pub period: u64,
    /// `||g - g_depth||_inf`.
    pub tail_sup_norm: f64,
    /// Lévy distance to the spectral measure of the full series.
    pub levy_to_full: f64,
    pub n: usize,
    pub psi: String,
    #[serde(flatten)]
    pub dims: DimColumns,
    pub label: String,
}

pub fn limit_periodic_scan(cfg: &LimitPeriodicConfig) -> Result<Vec<LimitPeriodicRow>> {
    cfg.validate()?;
    let full = spectral_measure_of(&build_truncation(&cfg.spec, cfg.n)?, &cfg.psi)?;
    let window = build_truncation(&cfg.spec, cfg.n)?.window();
    par::try_map_range(cfg.depths.len(), |i| {
        let depth = cfg.depths[i];
        let spec = cfg.spec.truncated(depth);
        let result = spectral_measure_of(&build_truncation(&spec, cfg.n)?, &cfg.psi)?;
        let params = cfg.dims.params_for(&result, derive_seed(cfg.seed, i as u64))?;
        let report = measure_dims(&result.measure, &params)?;
        Ok(LimitPeriodicRow {
            depth,
            period: 1u64 << depth,
            tail_sup_norm: potential_distance(&cfg.spec, &spec, window.clone())?,
            levy_to_full: levy_distance(&result.measure, &full.measure),
            n: cfg.n,
            psi: cfg.psi.to_string(),
            dims: DimColumns::new(&report, result.measure.len()),
            label: LIMIT_PERIODIC_LABEL.to_string(),
        })
    })
}

pub fn limit_periodic_csv(rows: &[LimitPeriodicRow]) -> String {
    let mut out = format!("# format=1\ndepth,period,tail_sup_norm,levy_to_full,n,psi,{},label\n", DimColumns::HEADER);
    for r in rows {
        write!(out, "{},{},{:e},{:e},{},{},", r.depth, r.period, r.tail_sup_norm, r.levy_to_full, r.n, r.psi).unwrap();
        r.dims.write(&mut out);
        writeln!(out, ",{}", r.label).unwrap();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub kc_mass: f64,
    pub ks_mass: f64,
    pub threshold_r: f64,
    pub s: f64,
    pub t_max: f64,
}

pub fn alpha_sweep(mu: &DiscreteMeasure, alphas: &[f64], r: f64, s: f64, t_max: f64) -> Result<Vec<SweepRow>> {
    Ok(classify_sweep(mu, alphas, r, s, t_max, DEFAULT_RATIO)?
        .into_iter()
        .map(|c| SweepRow { alpha: c.alpha, kc_mass: c.kc_mass, ks_mass: c.ks_mass, threshold_r: r, s, t_max })
        .collect())
}

/// Exponent at which the `kc` share of the mass first falls below one half,
/// linearly interpolated between the bracketing grid values.
pub fn crossover_alpha(rows: &[SweepRow]) -> Option<f64> {
    let share = |r: &SweepRow| r.kc_mass / (r.kc_mass + r.ks_mass);
    let first = rows.iter().position(|r| share(r) < 0.5)?;
    if first == 0 {
        return Some(rows[0].alpha);
    }
    let (a, b) = (&rows[first - 1], &rows[first]);
    let (fa, fb) = (share(a), share(b));
    Some(a.alpha + (fa - 0.5) / (fa - fb) * (b.alpha - a.alpha))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("# format=1\nalpha,kc_mass,ks_mass,threshold_r,s,t_max\n");
    for r in rows {
        writeln!(out, "{:e},{:e},{:e},{:e},{:e},{:e}", r.alpha, r.kc_mass, r.ks_mass, r.threshold_r, r.s, r.t_max)
            .unwrap();
    }
    out
}

/// Spread of `gamma_H` over the atoms of `mu` at exponent `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaBand {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

pub fn gamma_band(mu: &DiscreteMeasure, alpha: f64, s: f64, t_max: f64) -> Result<GammaBand> {
    if mu.is_empty() {
        return Err(domain("gamma band of the zero measure"));
    }
    let grid = geometric_grid(s, t_max, DEFAULT_RATIO)?;
    let powers: Vec<f64> = grid.iter().map(|t| t.powf(alpha)).collect();
    let mut gammas = par::map_range(mu.len(), |k| {
        let v = v_table(mu, mu.positions()[k], &grid);
        powers.iter().zip(&v).map(|(p, v)| p * v).fold(f64::NEG_INFINITY, f64::max)
    });
    gammas.sort_by(f64::total_cmp);
    Ok(GammaBand { min: gammas[0], median: gammas[(gammas.len() - 1) / 2], max: *gammas.last().unwrap() })
}

/// Record of one run: what was asked, what was written, how long it took.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: u32,
    pub command: String,
    pub version: String,
    pub parallel: bool,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    /// Wall-clock seconds per stage. The only field that varies between
    /// identical runs.
    pub timings: Vec<(String, f64)>,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Self {
            format: 1,
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            parallel: par::is_parallel(),
            seed,
            config,
            outputs: Vec::new(),
            timings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
