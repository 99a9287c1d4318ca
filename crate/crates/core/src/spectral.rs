//! Spectral measures of Jacobi truncations.
//!
//! Eigenvalues come from implicit QL with Wilkinson shifts. Only the rows of
//! the eigenvector matrix that meet the support of `psi` are carried through
//! the rotations, so a spectral measure costs `O(N^2)` rather than `O(N^3)`.
//! Every eigenvalue is then certified by one inverse-iteration residual.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::measures::{levy_distance, median_gap, DiscreteMeasure};
use crate::operators::{build_truncation, JacobiTruncation, PotentialSpec};
use crate::par;

/// Atoms lighter than this are dropped from spectral measures.
pub const WEIGHT_FLOOR: f64 = 1e-16;
/// Required bound on `residual_max / (2 + r)`.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MIN_ETA: f64 = 1e-12;
const MAX_QL_ITERATIONS: usize = 100;

/// Eigenvalues in ascending order, with the components of each eigenvector on
/// a chosen set of rows.
#[derive(Clone, Debug)]
pub struct PartialEigen {
    pub values: Vec<f64>,
    /// `rows[j][k]` is component `tracked[j]` of eigenvector `k`.
    pub rows: Vec<Vec<f64>>,
    pub tracked: Vec<usize>,
}

/// Implicit QL on the tridiagonal matrix with diagonal `diag` and unit
/// off-diagonals, carrying rows `tracked` of the accumulated rotations.
pub fn ql_tracked(diag: &[f64], tracked: &[usize]) -> Result<PartialEigen> {
    let n = diag.len();
    if n == 0 {
        return Err(domain("empty matrix"));
    }
    if let Some(&r) = tracked.iter().find(|&&r| r >= n) {
        return Err(domain(format!("tracked row {r} outside a matrix of size {n}")));
    }
    let mut d = diag.to_vec();
    let mut e = vec![1.0f64; n];
    e[n - 1] = 0.0;
    let mut z: Vec<Vec<f64>> = tracked
        .iter()
        .map(|&r| {
            let mut row = vec![0.0; n];
            row[r] = 1.0;
            row
        })
        .collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::Convergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in &mut z {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(PartialEigen {
        values: order.iter().map(|&k| d[k]).collect(),
        rows: z.iter().map(|row| order.iter().map(|&k| row[k]).collect()).collect(),
        tracked: tracked.to_vec(),
    })
}

/// Eigenvalues of the truncation, ascending.
pub fn eigenvalues(m: &JacobiTruncation) -> Result<Vec<f64>> {
    Ok(ql_tracked(&m.diagonal, &[])?.values)
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Full orthonormal eigendecomposition, ascending. Costs `O(N^3)`; spectral
/// measures use [`ql_tracked`] instead.
pub fn tridiag_eigen(m: &JacobiTruncation) -> Result<Vec<EigenPair>> {
    let n = m.n();
    let all: Vec<usize> = (0..n).collect();
    let pe = ql_tracked(&m.diagonal, &all)?;
    Ok((0..n).map(|k| EigenPair { value: pe.values[k], vector: (0..n).map(|i| pe.rows[i][k]).collect() }).collect())
}

/// `||T v - lambda v||` for the truncation with diagonal `diag`.
pub fn residual(diag: &[f64], lambda: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut tv = diag[i] * v[i];
            if i > 0 {
                tv += v[i - 1];
            }
            if i + 1 < n {
                tv += v[i + 1];
            }
            (tv - lambda * v[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
pub fn sturm_count(diag: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - x } else { d - x - 1.0 / q };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// `||T|| <= 2 + max |V_n|`.
pub fn gershgorin_radius(diag: &[f64]) -> f64 {
    2.0 + diag.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Three steps of inverse iteration at `lambda`; returns the residual of the
/// normalized iterate, an upper bound on the distance from `lambda` to the
/// spectrum.
pub fn inverse_iteration_residual(diag: &[f64], lambda: f64) -> f64 {
    let n = diag.len();
    let tiny = f64::EPSILON * gershgorin_radius(diag);
    // LU with partial pivoting of T - lambda I
    let mut dl = vec![1.0f64; n.saturating_sub(1)];
    let mut dd: Vec<f64> = diag.iter().map(|v| v - lambda).collect();
    let mut du = vec![1.0; n.saturating_sub(1)];
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n.saturating_sub(1)];
    for i in 0..n.saturating_sub(1) {
        if dd[i].abs() >= dl[i].abs() {
            if dd[i] != 0.0 {
                let fact = dl[i] / dd[i];
                dl[i] = fact;
                dd[i + 1] -= fact * du[i];
            }
        } else {
            let fact = dd[i] / dl[i];
            dd[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = dd[i + 1];
            dd[i + 1] = temp - fact * dd[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    for p in &mut dd {
        if p.abs() < tiny {
            *p = if *p < 0.0 { -tiny } else { tiny };
        }
    }
    let solve = |b: &mut Vec<f64>| {
        for i in 0..n.saturating_sub(1) {
            if swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= dl[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= du[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= du2[i] * b[i + 2];
            }
            b[i] = v / dd[i];
        }
    };
    let normalize = |b: &mut Vec<f64>| {
        let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        b.iter_mut().for_each(|v| *v /= norm);
    };
    // Weyl sequence: no symmetry, so no eigenvector is missed by construction
    let mut x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.618_033_988_749_894_9).fract() - 0.5).collect();
    normalize(&mut x);
    for _ in 0..3 {
        solve(&mut x);
        normalize(&mut x);
    }
    residual(diag, lambda, &x)
}

/// Cyclic vector choice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[derive(Default)]
pub enum Psi {
    #[default]
    Delta0,
    Delta1,
    /// `values[i]` sits at site `origin + i`; normalized before use.
    Explicit {
        origin: i64,
        values: Vec<f64>,
    },
}

impl fmt::Display for Psi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psi::Delta0 => write!(f, "delta0"),
            Psi::Delta1 => write!(f, "delta1"),
            Psi::Explicit { origin, values } => write!(f, "explicit(origin={origin},len={})", values.len()),
        }
    }
}

impl FromStr for Psi {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta0" | "delta_0" => Ok(Psi::Delta0),
            "delta1" | "delta_1" => Ok(Psi::Delta1),
            other => Err(domain(format!("unknown psi `{other}`; expected delta0 or delta1"))),
        }
    }
}

impl Psi {
    /// `(row, coefficient)` pairs of the normalized vector in `m`.
    pub fn rows_in(&self, m: &JacobiTruncation) -> Result<Vec<(usize, f64)>> {
        let outside =
            |site: i64| domain(format!("psi site {site} outside the window {}..{}", m.window().start, m.window().end));
        match self {
            Psi::Delta0 => Ok(vec![(m.row_of(0).ok_or_else(|| outside(0))?, 1.0)]),
            Psi::Delta1 => Ok(vec![(m.row_of(1).ok_or_else(|| outside(1))?, 1.0)]),
            Psi::Explicit { origin, values } => {
                let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(domain("psi must be a nonzero finite vector"));
                }
                let mut out = Vec::new();
                for (i, &v) in values.iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    let site = origin + i as i64;
                    out.push((m.row_of(site).ok_or_else(|| outside(site))?, v / norm));
                }
                Ok(out)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralRequest {
    pub spec: PotentialSpec,
    pub n: usize,
    #[serde(default)]
    pub psi: Psi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralResult {
    pub measure: DiscreteMeasure,
    pub n: usize,
    pub bound: f64,
    pub psi: Psi,
    pub method: &'static str,
    /// Largest inverse-iteration residual over all eigenvalues.
    pub residual_max: f64,
    pub dropped_mass: f64,
    pub dropped_atoms: usize,
    /// All eigenvalues, ascending, including those carrying no weight.
    pub eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct SpectralSidecar<'a> {
    format: u32,
    n: usize,
    bound: f64,
    spec_hash: String,
    psi: &'a Psi,
    method: &'a str,
    residual_max: f64,
    dropped_mass: f64,
    dropped_atoms: usize,
    atoms: usize,
    total_mass: f64,
    eigen_min: f64,
    eigen_max: f64,
    eigen_median_spacing: Option<f64>,
}

/// FNV-1a of the spec's JSON form.
pub fn spec_hash(spec: &PotentialSpec) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in spec.to_json().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

impl SpectralResult {
    /// Median gap between consecutive eigenvalues, weighted or not.
    pub fn eigen_median_spacing(&self) -> Option<f64> {
        median_gap(&self.eigenvalues)
    }

    pub fn sidecar_json(&self, spec: &PotentialSpec) -> String {
        let doc = SpectralSidecar {
            format: 1,
            n: self.n,
            bound: self.bound,
            spec_hash: spec_hash(spec),
            psi: &self.psi,
            method: self.method,
            residual_max: self.residual_max,
            dropped_mass: self.dropped_mass,
            dropped_atoms: self.dropped_atoms,
            atoms: self.measure.len(),
            total_mass: self.measure.total_mass(),
            eigen_min: self.eigenvalues[0],
            eigen_max: *self.eigenvalues.last().unwrap(),
            eigen_median_spacing: self.eigen_median_spacing(),
        };
        serde_json::to_string_pretty(&doc).expect("sidecar serializes")
    }
}

/// Spectral measure of `psi` for an already built truncation.
pub fn spectral_measure_of(m: &JacobiTruncation, psi: &Psi) -> Result<SpectralResult> {
    let coeffs = psi.rows_in(m)?;
    let rows: Vec<usize> = coeffs.iter().map(|&(r, _)| r).collect();
    let pe = ql_tracked(&m.diagonal, &rows)?;
    let n = m.n();
    let scale = 2.0 + m.bound;
    let mut atoms = Vec::with_capacity(n);
    let (mut dropped_mass, mut dropped_atoms) = (0.0, 0usize);
    for k in 0..n {
        let amplitude: f64 = coeffs.iter().enumerate().map(|(j, &(_, c))| c * pe.rows[j][k]).sum();
        let w = amplitude * amplitude;
        if w < WEIGHT_FLOOR {
            dropped_mass += w;
            dropped_atoms += 1;
        } else {
            atoms.push((pe.values[k], w));
        }
    }
    for &lambda in &pe.values {
        if lambda.abs() > scale {
            return Err(Error::Invariant(format!("eigenvalue {lambda} outside [-{scale}, {scale}]")));
        }
    }
    let residual_max =
        pe.values.iter().map(|&lambda| inverse_iteration_residual(&m.diagonal, lambda)).fold(0.0, f64::max);
    if residual_max > RESIDUAL_TOL * scale {
        return Err(Error::Invariant(format!("eigen residual {residual_max:e} exceeds {:e}", RESIDUAL_TOL * scale)));
    }
    let measure = DiscreteMeasure::new(atoms)?;
    let total = measure.total_mass() + dropped_mass;
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Invariant(format!("spectral mass {total} differs from one")));
    }
    Ok(SpectralResult {
        measure,
        n,
        bound: m.bound,
        psi: psi.clone(),
        method: "implicit-ql-tracked-rows",
        residual_max,
        dropped_mass,
        dropped_atoms,
        eigenvalues: pe.values,
    })
}

pub fn spectral_measure(req: &SpectralRequest) -> Result<SpectralResult> {
    spectral_measure_of(&build_truncation(&req.spec, req.n)?, &req.psi)
}

/// Diagonal entry `<delta_0, (T - z)^-1 delta_0>` by the two one-sided
/// continued fractions meeting at site 0.
pub fn green_function(m: &JacobiTruncation, z: Complex64) -> Result<Complex64> {
    let c = m.center_index().ok_or_else(|| domain("site 0 outside the window"))?;
    let d = &m.diagonal;
    let mut right = Complex64::new(0.0, 0.0);
    for i in (c + 1..m.n()).rev() {
        right = 1.0 / (d[i] - z - right);
    }
    let mut left = Complex64::new(0.0, 0.0);
    for &v in &d[..c] {
        left = 1.0 / (v - z - left);
    }
    Ok(1.0 / (d[c] - z - left - right))
}

/// `Im <delta_0, (T - x - i eta)^-1 delta_0> / pi`: the spectral measure of
/// `delta_0` smoothed by the Poisson kernel of width `eta`.
pub fn green_density(spec: &PotentialSpec, n: usize, x: f64, eta: f64) -> Result<f64> {
    green_density_of(&build_truncation(spec, n)?, x, eta)
}

pub fn green_density_of(m: &JacobiTruncation, x: f64, eta: f64) -> Result<f64> {
    if !(eta >= MIN_ETA && eta.is_finite()) {
        return Err(domain(format!("eta must be at least {MIN_ETA:e}, got {eta}")));
    }
    let g = green_function(m, Complex64::new(x, eta))?;
    Ok((g.im / std::f64::consts::PI).max(0.0))
}

/// Smallest and largest eigenvalue, located by Sturm bisection.
pub fn spectrum_support(spec: &PotentialSpec, n: usize) -> Result<(f64, f64)> {
    let m = build_truncation(spec, n)?;
    Ok(support_of(&m.diagonal))
}

pub fn support_of(diag: &[f64]) -> (f64, f64) {
    let r = gershgorin_radius(diag);
    let n = diag.len();
    let kth = |k: usize| {
        // smallest x with at least k + 1 eigenvalues <= x
        let (mut lo, mut hi) = (-r - 1.0, r + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(diag, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    (kth(0), kth(n - 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub levy_to_finest: f64,
}

/// Lévy distance of each truncation's spectral measure to that of the
/// largest size.
pub fn resolvent_convergence_scan(spec: &PotentialSpec, sizes: &[usize], psi: &Psi) -> Result<Vec<ConvergenceRow>> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain("need at least two strictly increasing sizes"));
    }
    let results = par::try_map_range(sizes.len(), |i| {
        spectral_measure(&SpectralRequest { spec: spec.clone(), n: sizes[i], psi: psi.clone() })
    })?;
    let finest = &results.last().unwrap().measure;
    Ok(results.iter().map(|r| ConvergenceRow { n: r.n, levy_to_finest: levy_distance(&r.measure, finest) }).collect())
}
