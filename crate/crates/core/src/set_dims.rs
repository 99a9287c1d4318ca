//! Hausdorff and packing premeasures of subsets of the line.
//!
//! Neither the infimum over all δ-coverings nor the supremum over all
//! δ-packings is computable, so [`hausdorff_value`] returns the best of a few
//! grid-aligned covers (an upper bound on the infimum) and [`packing_value`]
//! a greedy packing (a lower bound on the supremum).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::measures::{cantor_numerator, MAX_CANTOR_DEPTH};
use crate::par;

/// Number of grid offsets tried by [`hausdorff_value`].
pub const COVER_SHIFTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetKind {
    Points { points: Vec<f64> },
    Intervals { intervals: Vec<(f64, f64)> },
}

/// A finite point set or a finite union of disjoint closed intervals, with
/// the smallest scale at which it is meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct SetRep {
    kind: SetKind,
    resolution: f64,
    // closed segments, points as degenerate ones
    segments: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct SetDoc {
    #[serde(default = "format_one")]
    format: u32,
    #[serde(flatten)]
    kind: SetKind,
    resolution: f64,
}

fn format_one() -> u32 {
    1
}

fn check_resolution(resolution: f64) -> Result<()> {
    if resolution > 0.0 && resolution.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("resolution must be positive, got {resolution}")))
    }
}

impl SetRep {
    pub fn points(mut points: Vec<f64>, resolution: f64) -> Result<Self> {
        check_resolution(resolution)?;
        if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
            return Err(domain(format!("point {bad} is not finite")));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        let segments = points.iter().map(|&p| (p, p)).collect();
        Ok(Self { kind: SetKind::Points { points }, resolution, segments })
    }

    pub fn intervals(mut intervals: Vec<(f64, f64)>, resolution: f64) -> Result<Self> {
        check_resolution(resolution)?;
        for &(a, b) in &intervals {
            if !(a <= b && a.is_finite() && b.is_finite()) {
                return Err(domain(format!("invalid interval [{a}, {b}]")));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in intervals.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(domain(format!(
                    "intervals [{}, {}] and [{}, {}] are not disjoint",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(Self { segments: intervals.clone(), kind: SetKind::Intervals { intervals }, resolution })
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn to_json(&self) -> String {
        let doc = SetDoc { format: 1, kind: self.kind.clone(), resolution: self.resolution };
        serde_json::to_string(&doc).expect("set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SetDoc = serde_json::from_str(text)?;
        if doc.format != 1 {
            return Err(domain(format!("unsupported set format {}", doc.format)));
        }
        match doc.kind {
            SetKind::Points { points } => Self::points(points, doc.resolution),
            SetKind::Intervals { intervals } => Self::intervals(intervals, doc.resolution),
        }
    }
}

fn check_scale(set: &SetRep, alpha: f64, delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain(format!("delta must be positive, got {delta}")));
    }
    if delta < set.resolution {
        return Err(domain(format!("delta {delta} is below the set resolution {}", set.resolution)));
    }
    Ok(())
}

/// `sum diam^alpha` of the cover by cells `[offset + k delta, offset + (k+1) delta)`,
/// each cell contributing the hull of its intersection with the set.
fn grid_cover_sum(segments: &[(f64, f64)], alpha: f64, delta: f64, offset: f64) -> f64 {
    let mut total = 0.0;
    let mut current: Option<(i64, f64, f64)> = None;
    let mut flush = |cell: Option<(i64, f64, f64)>| {
        if let Some((_, lo, hi)) = cell {
            total += (hi - lo).max(0.0).powf(alpha);
        }
    };
    for &(a, b) in segments {
        let first = ((a - offset) / delta).floor() as i64;
        let last = ((b - offset) / delta).floor() as i64;
        for cell in first..=last {
            let cell_lo = offset + cell as f64 * delta;
            let lo = a.max(cell_lo);
            let hi = b.min(cell_lo + delta);
            match current {
                Some((c, clo, chi)) if c == cell => current = Some((c, clo.min(lo), chi.max(hi))),
                _ => {
                    flush(current);
                    current = Some((cell, lo, hi));
                }
            }
        }
    }
    flush(current);
    total
}

/// Upper estimate of `inf sum diam(E_k)^alpha` over δ-coverings: the best of
/// [`COVER_SHIFTS`] shifted grid covers with cell size `delta`.
pub fn hausdorff_value(set: &SetRep, alpha: f64, delta: f64) -> Result<f64> {
    check_scale(set, alpha, delta)?;
    let sums = par::map_range(COVER_SHIFTS, |k| {
        let offset = k as f64 * delta / COVER_SHIFTS as f64;
        grid_cover_sum(&set.segments, alpha, delta, offset)
    });
    Ok(sums.into_iter().fold(f64::INFINITY, f64::min))
}

/// Number of closed balls of radius `delta / 2` placed by the leftmost
/// greedy rule: each center is the smallest point of the set strictly more
/// than `delta` to the right of the previous one.
pub fn greedy_packing_count(set: &SetRep, delta: f64) -> usize {
    let mut count = 0usize;
    let mut last: Option<f64> = None;
    for &(a, b) in &set.segments {
        let mut c = match last {
            None => a,
            Some(prev) => {
                let next = (prev + delta).next_up();
                if next > b {
                    continue;
                }
                next.max(a)
            }
        };
        loop {
            count += 1;
            last = Some(c);
            let next = (c + delta).next_up();
            if next > b {
                break;
            }
            c = next;
        }
    }
    count
}

/// Lower estimate of the δ-packing premeasure: the greedy packing by balls of
/// diameter `delta`, each contributing `delta^alpha`.
pub fn packing_value(set: &SetRep, alpha: f64, delta: f64) -> Result<f64> {
    check_scale(set, alpha, delta)?;
    Ok(greedy_packing_count(set, delta) as f64 * delta.powf(alpha))
}

const BOX_TOL: f64 = 1e-9;

/// Cells of the grid `eps * Z` met by the set.
pub fn box_count(set: &SetRep, eps: f64) -> usize {
    let mut count = 0usize;
    let mut last: Option<i64> = None;
    for &(a, b) in &set.segments {
        let first = (a / eps + BOX_TOL).floor() as i64;
        let end = ((b / eps - BOX_TOL).ceil() as i64 - 1).max(first);
        let start = match last {
            Some(l) if l >= first => l + 1,
            _ => first,
        };
        if end >= start {
            count += (end - start + 1) as usize;
            last = Some(end);
        }
    }
    count
}

/// Least-squares slope of `log N(eps)` against `log(1/eps)`.
pub fn box_dimension(set: &SetRep, scales: &[f64]) -> Result<f64> {
    if scales.len() < 4 {
        return Err(domain(format!("need at least 4 scales, got {}", scales.len())));
    }
    if set.is_empty() {
        return Err(domain("box dimension of the empty set"));
    }
    for &e in scales {
        if !(e >= set.resolution && e.is_finite()) {
            return Err(domain(format!("scale {e} is below the set resolution {}", set.resolution)));
        }
    }
    let xs: Vec<f64> = scales.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = scales.iter().map(|&e| (box_count(set, e) as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(domain("scales must not all coincide"));
    }
    Ok(sxy / sxx)
}

/// Union of the `2^depth` closed middle-thirds intervals of length `3^-depth`.
pub fn cantor_set(depth: u32) -> Result<SetRep> {
    if depth == 0 || depth > MAX_CANTOR_DEPTH {
        return Err(Error::Resource(format!("cantor depth must be in 1..={MAX_CANTOR_DEPTH}, got {depth}")));
    }
    let denom = 3u64.pow(depth) as f64;
    let intervals = (0..1u64 << depth)
        .map(|m| {
            let left = cantor_numerator(m, depth);
            (left as f64 / denom, (left + 1) as f64 / denom)
        })
        .collect();
    SetRep::intervals(intervals, 1.0 / denom)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub value: f64,
}

pub fn hausdorff_scan(set: &SetRep, alphas: &[f64], delta: f64) -> Result<Vec<ScanRow>> {
    alphas.iter().map(|&alpha| Ok(ScanRow { alpha, value: hausdorff_value(set, alpha, delta)? })).collect()
}

pub fn packing_scan(set: &SetRep, alphas: &[f64], delta: f64) -> Result<Vec<ScanRow>> {
    alphas.iter().map(|&alpha| Ok(ScanRow { alpha, value: packing_value(set, alpha, delta)? })).collect()
}

/// Relative slack on the unit threshold. A set of exact dimension `d` and
/// unit measure sits on the threshold at `alpha = d`, up to rounding.
pub const TRANSITION_RTOL: f64 = 1e-9;

/// First exponent of an ascending scan at which the premeasure has dropped to
/// one or below.
pub fn transition_alpha(scan: &[ScanRow]) -> Option<f64> {
    scan.iter().find(|r| r.value <= 1.0 + TRANSITION_RTOL).map(|r| r.alpha)
}

pub fn scan_csv(scan: &[ScanRow]) -> String {
    let mut out = String::from("# format=1\nalpha,value\n");
    for r in scan {
        writeln!(out, "{:e},{:e}", r.alpha, r.value).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANTOR_DIM: f64 = 0.630_929_753_571_457_4;

    fn unit_interval() -> SetRep {
        SetRep::intervals(vec![(0.0, 1.0)], 1e-6).unwrap()
    }

    #[test]
    fn hausdorff_of_unit_interval_is_length() {
        let s = unit_interval();
        for delta in [0.5, 0.1, 0.013, 1e-3] {
            let h = hausdorff_value(&s, 1.0, delta).unwrap();
            assert!((h - 1.0).abs() <= delta, "delta={delta} h={h}");
        }
    }

    #[test]
    fn single_point_values() {
        let s = SetRep::points(vec![0.3], 1e-9).unwrap();
        for (alpha, delta) in [(0.5, 0.1), (1.0, 1e-3), (0.2, 0.5)] {
            assert!(hausdorff_value(&s, alpha, delta).unwrap() <= f64::powf(delta, alpha));
            assert_eq!(packing_value(&s, alpha, delta).unwrap(), f64::powf(delta, alpha));
        }
        assert_eq!(hausdorff_value(&s, 0.0, 0.1).unwrap(), 1.0);
    }

    #[test]
    fn cantor_cover_and_packing_bands() {
        let s = cantor_set(10).unwrap();
        for j in 1..=10 {
            let delta = 3f64.powi(-j);
            // canonical cover / packing by the 2^j level-j intervals gives 1
            let canonical = 2f64.powi(j) * delta.powf(CANTOR_DIM);
            assert!((canonical - 1.0).abs() < 1e-9);
            let h = hausdorff_value(&s, CANTOR_DIM, delta).unwrap();
            let p = packing_value(&s, CANTOR_DIM, delta).unwrap();
            assert!((0.5..=4.0).contains(&h), "j={j} h={h}");
            assert!((0.25..=2.0).contains(&p), "j={j} p={p}");
        }
    }

    #[test]
    fn packing_unit_interval() {
        let s = unit_interval();
        for n in [3usize, 10, 97, 1000] {
            let delta = 1.0 / n as f64;
            let p = packing_value(&s, 1.0, delta).unwrap();
            assert!(p >= 1.0 - delta, "n={n} p={p}");
        }
    }

    #[test]
    fn packing_centers_are_separated() {
        let s = SetRep::intervals(vec![(0.0, 0.25), (0.3, 0.31), (0.5, 1.0)], 1e-6).unwrap();
        // brute force over a fine lattice of candidate centers
        let delta = 0.1;
        let lattice: Vec<f64> = (0..=100_000).map(|k| k as f64 * 1e-5).collect();
        let mut centers: Vec<f64> = Vec::new();
        for &x in &lattice {
            let inside = s.segments.iter().any(|&(a, b)| a <= x && x <= b);
            if inside && centers.last().is_none_or(|&c| x > c + delta) {
                centers.push(x);
            }
        }
        assert_eq!(greedy_packing_count(&s, delta), centers.len());
    }

    #[test]
    fn scale_below_resolution_rejected() {
        let s = cantor_set(4).unwrap();
        assert!(hausdorff_value(&s, 0.5, 1e-3).is_err());
        assert!(packing_value(&s, 0.5, 1e-3).is_err());
        assert!(box_dimension(&s, &[1e-3, 1e-2, 1e-1, 0.5]).is_err());
        assert!(box_dimension(&s, &[0.1, 0.2, 0.3]).is_err());
    }

    #[test]
    fn box_dimension_examples() {
        let scales: Vec<f64> = (2..=8).map(|j| 3f64.powi(-j)).collect();
        let d = box_dimension(&unit_interval(), &scales).unwrap();
        assert!((d - 1.0).abs() < 0.02, "{d}");
        let pt = SetRep::points(vec![0.123], 1e-9).unwrap();
        assert!(box_dimension(&pt, &scales).unwrap().abs() < 0.02);
        let c = cantor_set(10).unwrap();
        // N(3^-j) = 2^j cells exactly
        for j in 2..=8 {
            assert_eq!(box_count(&c, 3f64.powi(-j)), 1 << j);
        }
        let d = box_dimension(&c, &scales).unwrap();
        assert!((d - CANTOR_DIM).abs() < 0.03, "{d}");
    }

    #[test]
    fn cantor_set_construction() {
        let c = cantor_set(1).unwrap();
        assert_eq!(c.kind(), &SetKind::Intervals { intervals: vec![(0.0, 1.0 / 3.0), (2.0 / 3.0, 1.0)] });
        for k in [3u32, 7] {
            let c = cantor_set(k).unwrap();
            let SetKind::Intervals { intervals } = c.kind() else { unreachable!() };
            let length: f64 = intervals.iter().map(|(a, b)| b - a).sum();
            assert!((length - (2.0f64 / 3.0).powi(k as i32)).abs() < 1e-12);
        }
        let c = cantor_set(10).unwrap();
        let SetKind::Intervals { intervals } = c.kind() else { unreachable!() };
        let unit = 3f64.powi(10);
        for &(a, b) in intervals {
            assert_eq!((a * unit).round() / unit, a);
            assert_eq!((b * unit).round() / unit, b);
        }
        assert!(cantor_set(25).is_err());
    }

    #[test]
    fn zero_exponent_counts_pieces() {
        let s = SetRep::points(vec![0.0, 0.5, 0.9], 1e-9).unwrap();
        assert!(hausdorff_value(&s, 0.0, 0.1).unwrap() >= 1.0);
        assert_eq!(hausdorff_value(&s, 0.0, 0.1).unwrap(), 3.0);
    }

    #[test]
    fn json_round_trip_and_overlap_rejection() {
        let s = cantor_set(3).unwrap();
        assert_eq!(SetRep::from_json(&s.to_json()).unwrap(), s);
        let p = SetRep::from_json(r#"{"format":1,"kind":"points","points":[0.5,0.1],"resolution":1e-6}"#).unwrap();
        assert_eq!(p.kind(), &SetKind::Points { points: vec![0.1, 0.5] });
        assert!(SetRep::intervals(vec![(0.0, 1.0), (1.0, 2.0)], 1e-3).is_err());
    }

    #[test]
    fn transition_ordering_on_cantor() {
        let s = cantor_set(10).unwrap();
        let alphas: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0).collect();
        let delta = 3f64.powi(-8);
        let h = transition_alpha(&hausdorff_scan(&s, &alphas, delta).unwrap()).unwrap();
        let p = transition_alpha(&packing_scan(&s, &alphas, delta).unwrap()).unwrap();
        assert!(h <= p + 1.0 / 50.0 + 1e-12, "h={h} p={p}");
    }
}
