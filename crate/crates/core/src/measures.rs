//! Finite atomic measures on the real line.
//!
//! A [`DiscreteMeasure`] stands in for a finite Borel measure of total mass at
//! most one. Cumulative masses are kept in 2^-100 fixed point so that every
//! ball mass and distribution-function value is an exact partial sum rounded
//! once; in particular ball masses are exactly monotone in the radius.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Atoms closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-12;

/// Slack allowed above unit total mass (rounding in eigenvector norms).
pub const MASS_TOL: f64 = 1e-9;

/// Largest depth accepted by the Cantor generators.
pub const MAX_CANTOR_DEPTH: u32 = 24;

const FIXED_SCALE: f64 = 1.2676506002282294e30; // 2^100
const FIXED_INV: f64 = 7.888609052210118e-31; // 2^-100

fn to_fixed(w: f64) -> i128 {
    (w * FIXED_SCALE) as i128
}

pub(crate) fn from_fixed(v: i128) -> f64 {
    v as f64 * FIXED_INV
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    positions: Vec<f64>,
    weights: Vec<f64>,
    // cum[i] = sum of weights[..i] in fixed point
    cum: Vec<i128>,
    // double-double prefix sums of weight * position
    moment_hi: Vec<f64>,
    moment_lo: Vec<f64>,
}

impl PartialEq for DiscreteMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.positions == other.positions && self.weights == other.weights
    }
}

impl DiscreteMeasure {
    /// Builds a measure from unordered `(position, weight)` pairs.
    ///
    /// Atoms are sorted, atoms within [`DEDUP_TOL`] of the previous kept atom
    /// are merged into it, and the total mass must not exceed one (up to
    /// [`MASS_TOL`]).
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(p, w) in &atoms {
            if !p.is_finite() {
                return Err(domain(format!("atom position {p} is not finite")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(domain(format!("atom weight {w} at {p} is not positive")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut positions: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut weights: Vec<f64> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            match positions.last() {
                Some(&last) if p - last <= DEDUP_TOL => {
                    *weights.last_mut().unwrap() += w;
                }
                _ => {
                    positions.push(p);
                    weights.push(w);
                }
            }
        }
        let measure = Self::from_sorted(positions, weights);
        if measure.total_mass() > 1.0 + MASS_TOL {
            return Err(domain(format!("total mass {} exceeds one", measure.total_mass())));
        }
        Ok(measure)
    }

    /// The zero measure.
    pub fn empty() -> Self {
        Self::from_sorted(Vec::new(), Vec::new())
    }

    /// Unit point mass at `x`.
    pub fn dirac(x: f64) -> Result<Self> {
        Self::new(vec![(x, 1.0)])
    }

    fn from_sorted(positions: Vec<f64>, weights: Vec<f64>) -> Self {
        let n = positions.len();
        let mut cum = Vec::with_capacity(n + 1);
        let mut moment_hi = Vec::with_capacity(n + 1);
        let mut moment_lo = Vec::with_capacity(n + 1);
        cum.push(0i128);
        moment_hi.push(0.0);
        moment_lo.push(0.0);
        let (mut acc, mut hi, mut lo) = (0i128, 0.0f64, 0.0f64);
        for (&p, &w) in positions.iter().zip(&weights) {
            acc += to_fixed(w);
            let (s, e) = two_sum(hi, w * p);
            hi = s;
            lo += e;
            cum.push(acc);
            moment_hi.push(hi);
            moment_lo.push(lo);
        }
        Self { positions, weights, cum, moment_hi, moment_lo }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.positions.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        from_fixed(*self.cum.last().unwrap())
    }

    /// Smallest closed interval containing every atom.
    pub fn support_hull(&self) -> Option<(f64, f64)> {
        Some((*self.positions.first()?, *self.positions.last()?))
    }

    /// Median gap between consecutive atoms.
    pub fn median_spacing(&self) -> Option<f64> {
        median_gap(&self.positions)
    }

    /// Indices `[lo, hi)` of atoms with `|p - x| < r`.
    pub(crate) fn open_range(&self, x: f64, r: f64) -> (usize, usize) {
        let lo = self.positions.partition_point(|&p| p < x && x - p >= r);
        let hi = self.positions.partition_point(|&p| p <= x || p - x < r);
        (lo, hi.max(lo))
    }

    /// Indices `[lo, hi)` of atoms with `|p - x| <= r`.
    pub(crate) fn closed_range(&self, x: f64, r: f64) -> (usize, usize) {
        let lo = self.positions.partition_point(|&p| p < x && x - p > r);
        let hi = self.positions.partition_point(|&p| p <= x || p - x <= r);
        (lo, hi.max(lo))
    }

    pub(crate) fn mass_between(&self, lo: usize, hi: usize) -> f64 {
        from_fixed(self.cum[hi] - self.cum[lo])
    }

    pub(crate) fn fixed_between(&self, lo: usize, hi: usize) -> i128 {
        self.cum[hi] - self.cum[lo]
    }

    /// `sum_{lo <= k < hi} w_k p_k`, accurate to a few ulps of the result.
    pub(crate) fn moment_between(&self, lo: usize, hi: usize) -> f64 {
        let (s, e) = two_sum(self.moment_hi[hi], -self.moment_hi[lo]);
        s + (e + (self.moment_lo[hi] - self.moment_lo[lo]))
    }

    /// Mass of the open ball `{y : |y - x| < eps}`.
    pub fn ball_mass(&self, x: f64, eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(domain(format!("ball radius must be positive, got {eps}")));
        }
        Ok(self.ball_mass_unchecked(x, eps))
    }

    pub(crate) fn ball_mass_unchecked(&self, x: f64, eps: f64) -> f64 {
        let (lo, hi) = self.open_range(x, eps);
        self.mass_between(lo, hi)
    }

    /// Index of the atom hit by a uniform draw `r` in `[0, 1)` when atoms are
    /// chosen with probability proportional to weight.
    pub(crate) fn atom_for_fraction(&self, r: f64) -> usize {
        let total = *self.cum.last().unwrap();
        let target = ((r * from_fixed(total)) * FIXED_SCALE) as i128;
        let k = self.cum[1..].partition_point(|&c| c <= target);
        k.min(self.len().saturating_sub(1))
    }

    fn cdf_fixed(&self, x: f64) -> i128 {
        self.cum[self.positions.partition_point(|&p| p <= x)]
    }

    /// Distribution function `mu((-inf, x])`, not renormalized.
    pub fn cdf(&self, x: f64) -> f64 {
        from_fixed(self.cdf_fixed(x))
    }

    /// Keeps the atoms lying in the restriction set.
    pub fn restrict(&self, set: &RestrictionSet) -> DiscreteMeasure {
        let (positions, weights) = self.atoms().filter(|&(p, _)| set.contains(p)).unzip();
        Self::from_sorted(positions, weights)
    }

    /// Translates every atom by `shift`.
    pub fn translated(&self, shift: f64) -> DiscreteMeasure {
        let positions = self.positions.iter().map(|p| p + shift).collect();
        Self::from_sorted(positions, self.weights.clone())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# format=1").unwrap();
        writeln!(out, "# total_mass={:e}", self.total_mass()).unwrap();
        writeln!(out, "position,weight").unwrap();
        for (p, w) in self.atoms() {
            writeln!(out, "{p:e},{w:e}").unwrap();
        }
        out
    }

    /// Parses the CSV layout written by [`to_csv`](Self::to_csv). Comment
    /// lines and an optional column header are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line == "position,weight" {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: idx + 1, message };
            let mut fields = line.split(',');
            let (Some(p), Some(w), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(parse_err(format!("expected `position,weight`, got `{line}`")));
            };
            let p: f64 = p.trim().parse().map_err(|e| parse_err(format!("bad position `{p}`: {e}")))?;
            let w: f64 = w.trim().parse().map_err(|e| parse_err(format!("bad weight `{w}`: {e}")))?;
            atoms.push((p, w));
        }
        Self::new(atoms)
    }

    pub fn to_json(&self) -> String {
        let doc = MeasureDoc { format: 1, atoms: self.atoms().map(|(p, w)| [p, w]).collect() };
        serde_json::to_string(&doc).expect("measure serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MeasureDoc = serde_json::from_str(text)?;
        if doc.format != 1 {
            return Err(domain(format!("unsupported measure format {}", doc.format)));
        }
        Self::new(doc.atoms.into_iter().map(|[p, w]| (p, w)).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureDoc {
    #[serde(default = "format_one")]
    format: u32,
    atoms: Vec<[f64; 2]>,
}

fn format_one() -> u32 {
    1
}

pub(crate) fn median_gap(sorted: &[f64]) -> Option<f64> {
    if sorted.len() < 2 {
        return None;
    }
    let mut gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(f64::total_cmp);
    Some(gaps[(gaps.len() - 1) / 2])
}

/// A finite union of disjoint closed intervals.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RestrictionSet {
    intervals: Vec<(f64, f64)>,
}

impl RestrictionSet {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a <= b) {
                return Err(domain(format!("interval [{a}, {b}] is empty or invalid")));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in intervals.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(domain(format!("intervals [{}, {}] and [{}, {}] overlap", w[0].0, w[0].1, w[1].0, w[1].1)));
            }
        }
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.intervals.partition_point(|&(_, b)| b < x);
        self.intervals.get(i).is_some_and(|&(a, _)| a <= x)
    }
}

/// Restriction `mu(A ∩ ·)`.
pub fn restrict(mu: &DiscreteMeasure, set: &RestrictionSet) -> DiscreteMeasure {
    mu.restrict(set)
}

/// Tests `F_a(x - h) - h <= F_b(x)` for all real `x`.
///
/// The left side only jumps at `x = p_i + h`, so checking those points (and
/// `x -> -inf`, where both sides vanish) suffices.
fn levy_side_holds(a: &DiscreteMeasure, b: &DiscreteMeasure, h: f64) -> bool {
    let mut j = 0usize;
    for i in 0..a.len() {
        let shifted = a.positions[i] + h;
        while j < b.len() && b.positions[j] <= shifted {
            j += 1;
        }
        let gap = a.cum[i + 1] - b.cum[j];
        if gap > 0 && from_fixed(gap) > h {
            return false;
        }
    }
    true
}

fn bisect_levy(mut feasible: impl FnMut(f64) -> bool, upper: f64) -> f64 {
    if feasible(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, upper);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// One-dimensional Lévy distance between the sub-distribution functions of
/// two measures:
/// `inf{h > 0 : F_mu(x-h) - h <= F_nu(x) <= F_mu(x+h) + h for all x}`.
pub fn levy_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let upper = mu.total_mass().max(nu.total_mass()).max(1.0);
    bisect_levy(|h| levy_side_holds(mu, nu, h) && levy_side_holds(nu, mu, h), upper)
}

/// Lévy distance between an atomic measure and a continuous distribution
/// function `cdf` whose limit at `+inf` is `cdf_total`.
pub fn levy_distance_to_cdf(mu: &DiscreteMeasure, cdf: impl Fn(f64) -> f64, cdf_total: f64) -> f64 {
    let n = mu.len();
    let upper = mu.total_mass().max(cdf_total).max(1.0);
    let feasible = |h: f64| {
        // F(x - h) - h <= G(x): G is constant on [p_i, p_{i+1}), F continuous.
        if n == 0 {
            return cdf_total - h <= 0.0;
        }
        if cdf(mu.positions[0] - h) - h > 0.0 {
            return false;
        }
        for i in 0..n {
            let g = from_fixed(mu.cum[i + 1]);
            let right = if i + 1 < n { cdf(mu.positions[i + 1] - h) } else { cdf_total };
            if right - h > g {
                return false;
            }
            // G(x - h) - h <= F(x): G(x - h) = g on [p_i + h, p_{i+1} + h).
            if g - h > cdf(mu.positions[i] + h) {
                return false;
            }
        }
        true
    };
    bisect_levy(feasible, upper)
}

/// Cantor measure at finite depth: `2^depth` equal atoms at the left
/// endpoints of the depth-level middle-thirds intervals.
pub fn cantor_measure(depth: u32) -> Result<DiscreteMeasure> {
    if depth == 0 || depth > MAX_CANTOR_DEPTH {
        return Err(Error::Resource(format!("cantor depth must be in 1..={MAX_CANTOR_DEPTH}, got {depth}")));
    }
    let denom = 3u64.pow(depth) as f64;
    let weight = 0.5f64.powi(depth as i32);
    let count = 1usize << depth;
    let positions: Vec<f64> = (0..count).map(|m| cantor_numerator(m as u64, depth) as f64 / denom).collect();
    Ok(DiscreteMeasure::from_sorted(positions, vec![weight; count]))
}

/// Left endpoint of the `m`-th depth-level Cantor interval, in units of
/// `3^-depth`.
pub(crate) fn cantor_numerator(m: u64, depth: u32) -> u64 {
    (0..depth).filter(|&bit| m >> bit & 1 == 1).map(|bit| 2 * 3u64.pow(bit)).sum()
}

/// `n_atoms` equally weighted atoms at the cell midpoints of `[a, b]`.
pub fn uniform_measure(a: f64, b: f64, n_atoms: usize) -> Result<DiscreteMeasure> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!("uniform measure needs a < b, got [{a}, {b}]")));
    }
    if n_atoms == 0 {
        return Err(domain("uniform measure needs at least one atom"));
    }
    let n = n_atoms as f64;
    let positions = (0..n_atoms).map(|k| a + (b - a) * (k as f64 + 0.5) / n).collect();
    Ok(DiscreteMeasure::from_sorted(positions, vec![1.0 / n; n_atoms]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_merges_close_atoms() {
        let mu = DiscreteMeasure::new(vec![(1.0, 0.25), (0.0, 0.25), (1.0 + 1e-13, 0.5)]).unwrap();
        assert_eq!(mu.positions(), &[0.0, 1.0]);
        assert_eq!(mu.weights(), &[0.25, 0.75]);
        assert_eq!(mu.total_mass(), 1.0);
    }

    #[test]
    fn rejects_bad_atoms() {
        assert!(DiscreteMeasure::new(vec![(0.0, 0.0)]).is_err());
        assert!(DiscreteMeasure::new(vec![(f64::NAN, 0.5)]).is_err());
        assert!(DiscreteMeasure::new(vec![(0.0, 0.7), (1.0, 0.7)]).is_err());
    }

    #[test]
    fn ball_mass_basics() {
        let mu = DiscreteMeasure::dirac(0.0).unwrap();
        assert_eq!(mu.ball_mass(0.0, 0.5).unwrap(), 1.0);
        // open ball: the boundary atom is excluded
        assert_eq!(mu.ball_mass(0.5, 0.5).unwrap(), 0.0);
        assert!(mu.ball_mass(0.0, 0.0).is_err());
        assert!(mu.ball_mass(0.0, -1.0).is_err());
    }

    #[test]
    fn cantor_gap_is_empty() {
        let mu = cantor_measure(8).unwrap();
        let direct: f64 = mu.atoms().filter(|(p, _)| (p - 0.5).abs() < 0.1).map(|(_, w)| w).sum();
        assert_eq!(direct, 0.0);
        assert_eq!(mu.ball_mass(0.5, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn cantor_self_similar_balls() {
        let depth = 12;
        let mu = cantor_measure(depth).unwrap();
        for j in 0..depth as i32 {
            let eps = 3f64.powi(-j) + 1e-15;
            let direct: f64 = mu.atoms().filter(|(p, _)| p.abs() < eps).map(|(_, w)| w).sum();
            let expected = 0.5f64.powi(j);
            assert_eq!(direct, expected, "direct sum at j={j}");
            assert_eq!(mu.ball_mass(0.0, eps).unwrap(), expected, "j={j}");
        }
    }

    #[test]
    fn cantor_depth_one_and_caps() {
        let mu = cantor_measure(1).unwrap();
        let atoms: Vec<_> = mu.atoms().collect();
        assert_eq!(atoms, vec![(0.0, 0.5), (2.0 / 3.0, 0.5)]);
        let mu = cantor_measure(5).unwrap();
        assert_eq!(mu.len(), 32);
        assert!(mu.weights().iter().all(|&w| w == 1.0 / 32.0));
        assert!(matches!(cantor_measure(25), Err(Error::Resource(_))));
        assert!(cantor_measure(0).is_err());
    }

    #[test]
    fn restriction_examples() {
        let mu = DiscreteMeasure::new(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let r = RestrictionSet::new(vec![(-0.1, 0.1)]).unwrap();
        let kept: Vec<_> = restrict(&mu, &r).atoms().collect();
        assert_eq!(kept, vec![(0.0, 0.5)]);
        let none = restrict(&mu, &RestrictionSet::empty());
        assert!(none.is_empty());
        assert_eq!(none.total_mass(), 0.0);

        let cantor = cantor_measure(8).unwrap();
        let left = restrict(&cantor, &RestrictionSet::new(vec![(0.0, 1.0 / 3.0)]).unwrap());
        assert_eq!(left.total_mass(), 0.5);
    }

    #[test]
    fn restriction_set_validation() {
        assert!(RestrictionSet::new(vec![(0.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(RestrictionSet::new(vec![(1.0, 0.0)]).is_err());
        let r = RestrictionSet::new(vec![(2.0, 3.0), (0.0, 1.0)]).unwrap();
        assert!(r.contains(0.0) && r.contains(1.0) && r.contains(2.5));
        assert!(!r.contains(1.5) && !r.contains(3.1));
    }

    #[test]
    fn uniform_examples() {
        let one = uniform_measure(0.0, 1.0, 1).unwrap();
        assert_eq!(one.atoms().collect::<Vec<_>>(), vec![(0.5, 1.0)]);
        let four = uniform_measure(0.0, 1.0, 4).unwrap();
        assert_eq!(four.positions(), &[0.125, 0.375, 0.625, 0.875]);
        assert!(four.weights().iter().all(|&w| w == 0.25));
        let n = 1000;
        let fine = uniform_measure(0.0, 1.0, n).unwrap();
        let m = fine.ball_mass(0.5, 0.25).unwrap();
        assert!((m - 0.5).abs() <= 2.0 / n as f64);
        assert!(uniform_measure(1.0, 1.0, 3).is_err());
    }

    /// Grid search over `h` straight from the definition.
    fn levy_grid(mu: &DiscreteMeasure, nu: &DiscreteMeasure, step: f64) -> f64 {
        let mut xs: Vec<f64> = Vec::new();
        for &p in mu.positions().iter().chain(nu.positions()) {
            xs.extend([p - 3.0, p - 1e-9, p, p + 1e-9]);
        }
        let mut h = 0.0;
        loop {
            let ok = xs.iter().all(|&x| {
                let probe = [x, x - h, x + h];
                probe.iter().all(|&y| mu.cdf(y - h) - h <= nu.cdf(y) + 1e-15 && nu.cdf(y) <= mu.cdf(y + h) + h + 1e-15)
            });
            if ok || h > 2.0 {
                return h;
            }
            h += step;
        }
    }

    #[test]
    fn levy_examples() {
        let zero = DiscreteMeasure::dirac(0.0).unwrap();
        assert_eq!(levy_distance(&zero, &zero), 0.0);
        for a in [0.1, 0.37, 0.8] {
            let other = DiscreteMeasure::dirac(a).unwrap();
            let d = levy_distance(&zero, &other);
            let grid = levy_grid(&zero, &other, 1e-3);
            assert!((d - a).abs() < 1e-12, "a={a} d={d}");
            assert!((grid - a).abs() <= 1.1e-3, "a={a} grid={grid}");
        }
        let far = DiscreteMeasure::dirac(5.0).unwrap();
        assert!((levy_distance(&zero, &far) - 1.0).abs() < 1e-12);
        assert!((levy_grid(&zero, &far, 1e-3) - 1.0).abs() <= 1.1e-3);
    }

    #[test]
    fn levy_sub_probability() {
        let half = DiscreteMeasure::new(vec![(0.0, 0.5)]).unwrap();
        let full = DiscreteMeasure::dirac(0.0).unwrap();
        assert!((levy_distance(&half, &full) - 0.5).abs() < 1e-12);
        assert!((levy_distance(&DiscreteMeasure::empty(), &full) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn levy_to_cdf_matches_fine_discretization() {
        let mu = DiscreteMeasure::new(vec![(-0.5, 0.3), (0.2, 0.7)]).unwrap();
        let cdf = |x: f64| x.clamp(0.0, 1.0);
        let n = 20000;
        let fine = uniform_measure(0.0, 1.0, n).unwrap();
        let a = levy_distance_to_cdf(&mu, cdf, 1.0);
        let b = levy_distance(&mu, &fine);
        assert!((a - b).abs() < 2.0 / n as f64, "{a} vs {b}");
    }

    #[test]
    fn cantor_levels_are_levy_close() {
        for k in 1..10 {
            let a = cantor_measure(k).unwrap();
            let b = cantor_measure(k + 1).unwrap();
            assert!(levy_distance(&a, &b) <= 3f64.powi(-(k as i32)));
        }
    }

    #[test]
    fn csv_and_json_round_trip() {
        let mu = cantor_measure(4).unwrap();
        let csv = mu.to_csv();
        assert!(csv.starts_with("# format=1\n# total_mass=1e0\n"));
        assert_eq!(DiscreteMeasure::from_csv(&csv).unwrap(), mu);
        assert_eq!(DiscreteMeasure::from_json(&mu.to_json()).unwrap(), mu);
    }

    #[test]
    fn csv_errors_carry_line() {
        let err = DiscreteMeasure::from_csv("# c\n0.0,0.5\nnope\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }
}
