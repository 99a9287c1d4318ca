//! Potentials and finite Dirichlet truncations of the discrete Schrödinger
//! operator `(H psi)_n = psi_{n+1} + psi_{n-1} + V_n psi_n`.
//!
//! Limit-periodic potentials live on the dyadic odometer: `kappa` is a binary
//! word, the translation adds one with carry, and a sampling function is a
//! finite sum of cylinder functions of the first `k` digits.

use std::fmt::Write as _;
use std::ops::Range;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest cylinder depth enumerated exhaustively.
pub const MAX_ENUMERATION_DEPTH: u32 = 20;

/// Relative slack of the `|V_n| <= r` check.
pub const BOUND_RTOL: f64 = 1e-12;

/// Mixed into the seed for the stream that serves negative sites.
pub const NEGATIVE_STREAM_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// A point of `{0,1}^L`; `digits[0]` is the coordinate that flips on every
/// translation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct OdometerState {
    digits: Vec<u8>,
}

impl TryFrom<Vec<u8>> for OdometerState {
    type Error = Error;
    fn try_from(digits: Vec<u8>) -> Result<Self> {
        Self::new(digits)
    }
}

impl From<OdometerState> for Vec<u8> {
    fn from(s: OdometerState) -> Self {
        s.digits
    }
}

impl OdometerState {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if digits.is_empty() {
            return Err(domain("odometer state needs at least one digit"));
        }
        if let Some(d) = digits.iter().find(|&&d| d > 1) {
            return Err(domain(format!("odometer digit {d} is not binary")));
        }
        Ok(Self { digits })
    }

    pub fn zeros(depth: usize) -> Result<Self> {
        Self::new(vec![0; depth])
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Add one with carry. The flag is set when the carry runs off the end
    /// and the word wraps to all zeros.
    pub fn translate(&self) -> (Self, bool) {
        let mut next = self.clone();
        let wrapped = next.step_up();
        (next, wrapped)
    }

    /// Subtract one with borrow; the flag reports a wrap to all ones.
    pub fn inverse_translate(&self) -> (Self, bool) {
        let mut next = self.clone();
        let wrapped = next.step_down();
        (next, wrapped)
    }

    fn step_up(&mut self) -> bool {
        for d in &mut self.digits {
            if *d == 0 {
                *d = 1;
                return false;
            }
            *d = 0;
        }
        true
    }

    fn step_down(&mut self) -> bool {
        for d in &mut self.digits {
            if *d == 1 {
                *d = 0;
                return false;
            }
            *d = 1;
        }
        true
    }

    /// `tau^n` applied to the state, `n` of either sign; the flag reports
    /// whether any wrap occurred.
    pub fn advance(&self, n: i64) -> (Self, bool) {
        let mut out = self.clone();
        let magnitude = n.unsigned_abs();
        let mut carry = 0u8;
        let mut wrapped = false;
        for (bit, d) in out.digits.iter_mut().enumerate() {
            let b = if bit < 64 { (magnitude >> bit & 1) as u8 } else { 0 };
            if n >= 0 {
                let sum = *d + b + carry;
                *d = sum & 1;
                carry = sum >> 1;
            } else {
                let diff = *d as i8 - b as i8 - carry as i8;
                *d = diff.rem_euclid(2) as u8;
                carry = u8::from(diff < 0);
            }
        }
        if carry != 0 {
            wrapped = true;
        }
        if self.digits.len() < 64 && magnitude >> self.digits.len() != 0 {
            wrapped = true;
        }
        (out, wrapped)
    }

    /// Index of the depth-`k` cylinder containing the state: the first `k`
    /// digits read as a binary number, `digits[0]` least significant.
    pub fn cylinder(&self, k: u32) -> usize {
        self.digits[..k as usize].iter().rev().fold(0usize, |acc, &d| acc << 1 | d as usize)
    }
}

/// One cylinder function: `table[c]` on the depth-`depth` cylinder `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingTerm {
    pub depth: u32,
    pub table: Vec<f64>,
}

/// A continuous function on the odometer given as a finite sum of cylinder
/// functions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplingFunction {
    pub terms: Vec<SamplingTerm>,
}

impl SamplingFunction {
    pub fn new(terms: Vec<SamplingTerm>) -> Result<Self> {
        let g = Self { terms };
        g.validate()?;
        Ok(g)
    }

    pub fn single(depth: u32, table: Vec<f64>) -> Result<Self> {
        Self::new(vec![SamplingTerm { depth, table }])
    }

    pub fn validate(&self) -> Result<()> {
        for term in &self.terms {
            if term.depth == 0 || term.depth >= usize::BITS {
                return Err(domain(format!("term depth {} must be at least 1", term.depth)));
            }
            if term.table.len() != 1usize << term.depth {
                return Err(domain(format!(
                    "term of depth {} needs {} table values, got {}",
                    term.depth,
                    1usize << term.depth,
                    term.table.len()
                )));
            }
            if let Some(v) = term.table.iter().find(|v| !v.is_finite()) {
                return Err(domain(format!("table value {v} is not finite")));
            }
        }
        Ok(())
    }

    pub fn max_depth(&self) -> u32 {
        self.terms.iter().map(|t| t.depth).max().unwrap_or(0)
    }

    /// Value on the cylinder of depth `max_depth` with index `c`.
    pub fn eval_cylinder(&self, c: usize) -> f64 {
        self.terms.iter().map(|t| t.table[c & ((1usize << t.depth) - 1)]).sum()
    }

    pub fn eval(&self, kappa: &OdometerState) -> f64 {
        self.terms.iter().map(|t| t.table[kappa.cylinder(t.depth)]).sum()
    }

    /// Keeps the terms of depth at most `k`.
    pub fn truncated(&self, k: u32) -> Self {
        Self { terms: self.terms.iter().filter(|t| t.depth <= k).cloned().collect() }
    }

    /// `g - other` as a sampling function.
    pub fn difference(&self, other: &Self) -> Self {
        let negated =
            other.terms.iter().map(|t| SamplingTerm { depth: t.depth, table: t.table.iter().map(|v| -v).collect() });
        Self { terms: self.terms.iter().cloned().chain(negated).collect() }
    }
}

/// Exact `sup |g|` over the `2^K` cylinders of depth `K = max_depth`.
pub fn sampling_sup_norm(g: &SamplingFunction) -> Result<f64> {
    let k = g.max_depth();
    if k > MAX_ENUMERATION_DEPTH {
        return Err(Error::Resource(format!(
            "sup norm enumerates 2^{k} cylinders; the cap is depth {MAX_ENUMERATION_DEPTH}"
        )));
    }
    Ok((0..1usize << k).map(|c| g.eval_cylinder(c).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum PotentialKind {
    /// `values[i]` sits at site `origin + i`; the potential vanishes elsewhere.
    Explicit {
        values: Vec<f64>,
        #[serde(default)]
        origin: i64,
    },
    Periodic {
        cell: Vec<f64>,
    },
    /// I.i.d. uniform on `[-bound, bound]`.
    Random {
        seed: u64,
    },
    LimitPeriodic {
        g: SamplingFunction,
        kappa: OdometerState,
    },
}

/// A bounded potential together with its declared sup bound `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub kind: PotentialKind,
    pub bound: f64,
}

#[derive(Serialize, Deserialize)]
struct SpecDoc {
    #[serde(default = "format_one")]
    format: u32,
    #[serde(flatten)]
    spec: PotentialSpec,
}

fn format_one() -> u32 {
    1
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, bound: f64) -> Result<Self> {
        let spec = Self { kind, bound };
        spec.validate()?;
        Ok(spec)
    }

    pub fn zero() -> Self {
        Self { kind: PotentialKind::Periodic { cell: vec![0.0] }, bound: 0.0 }
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(PotentialKind::Periodic { cell: vec![c] }, c.abs())
    }

    pub fn random(seed: u64, bound: f64) -> Result<Self> {
        Self::new(PotentialKind::Random { seed }, bound)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bound >= 0.0 && self.bound.is_finite()) {
            return Err(domain(format!("bound must be finite and nonnegative, got {}", self.bound)));
        }
        match &self.kind {
            PotentialKind::Explicit { values, .. } => {
                if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                    return Err(domain(format!("potential value {v} is not finite")));
                }
            }
            PotentialKind::Periodic { cell } => {
                if cell.is_empty() {
                    return Err(domain("periodic cell is empty"));
                }
                if let Some(v) = cell.iter().find(|v| !v.is_finite()) {
                    return Err(domain(format!("potential value {v} is not finite")));
                }
            }
            PotentialKind::Random { .. } => {
                if self.bound == 0.0 {
                    return Err(domain("random potential needs a positive bound"));
                }
            }
            PotentialKind::LimitPeriodic { g, kappa } => {
                g.validate()?;
                if (kappa.depth() as u32) < g.max_depth() {
                    return Err(domain(format!(
                        "odometer depth {} is below the sampling depth {}",
                        kappa.depth(),
                        g.max_depth()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = SpecDoc { format: 1, spec: self.clone() };
        serde_json::to_string_pretty(&doc).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDoc = serde_json::from_str(text)?;
        if doc.format != 1 {
            return Err(domain(format!("unsupported potential format {}", doc.format)));
        }
        doc.spec.validate()?;
        Ok(doc.spec)
    }

    /// Keeps sampling terms of depth at most `k`; other variants unchanged.
    pub fn truncated(&self, k: u32) -> Self {
        match &self.kind {
            PotentialKind::LimitPeriodic { g, kappa } => Self {
                kind: PotentialKind::LimitPeriodic { g: g.truncated(k), kappa: kappa.clone() },
                bound: self.bound,
            },
            _ => self.clone(),
        }
    }
}

fn unit_to_symmetric(word: u64, bound: f64) -> f64 {
    // top 53 bits give a uniform double in [0, 1)
    let u = (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    bound * (2.0 * u - 1.0)
}

fn random_values(seed: u64, bound: f64, window: &Range<i64>) -> Vec<f64> {
    let mut forward = ChaCha8Rng::seed_from_u64(seed);
    let mut backward = ChaCha8Rng::seed_from_u64(seed ^ NEGATIVE_STREAM_SALT);
    window
        .clone()
        .map(|n| {
            let (rng, index) = if n >= 0 { (&mut forward, n as u128) } else { (&mut backward, (-(n + 1)) as u128) };
            rng.set_word_pos(2 * index);
            unit_to_symmetric(rng.next_u64(), bound)
        })
        .collect()
}

/// `V_n` for `n` in `window`, checked against the declared bound.
pub fn sample_potential(spec: &PotentialSpec, window: Range<i64>) -> Result<Vec<f64>> {
    spec.validate()?;
    let values: Vec<f64> = match &spec.kind {
        PotentialKind::Explicit { values, origin } => window
            .clone()
            .map(|n| usize::try_from(n - origin).ok().and_then(|i| values.get(i).copied()).unwrap_or(0.0))
            .collect(),
        PotentialKind::Periodic { cell } => {
            let p = cell.len() as i64;
            window.clone().map(|n| cell[n.rem_euclid(p) as usize]).collect()
        }
        PotentialKind::Random { seed } => random_values(*seed, spec.bound, &window),
        PotentialKind::LimitPeriodic { g, kappa } => {
            let (mut state, _) = kappa.advance(window.start);
            let mut out = Vec::with_capacity(window.clone().count());
            for _ in window.clone() {
                out.push(g.eval(&state));
                state.step_up();
            }
            out
        }
    };
    // summed sampling terms can land a few ulps above a bound equal to their exact sum
    let limit = spec.bound * (1.0 + BOUND_RTOL);
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.abs() > limit) {
        return Err(Error::Invariant(format!(
            "|V_{}| = {} exceeds the declared bound {}",
            window.start + i as i64,
            v.abs(),
            spec.bound
        )));
    }
    Ok(values)
}

/// Dirichlet restriction of the operator to `N` consecutive sites. The
/// off-diagonal entries are all one.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiTruncation {
    pub diagonal: Vec<f64>,
    /// Site number of the first row.
    pub window_start: i64,
    pub bound: f64,
}

impl JacobiTruncation {
    pub fn new(diagonal: Vec<f64>, window_start: i64, bound: f64) -> Result<Self> {
        if diagonal.len() < 2 {
            return Err(domain(format!("truncation needs N >= 2, got {}", diagonal.len())));
        }
        Ok(Self { diagonal, window_start, bound })
    }

    pub fn n(&self) -> usize {
        self.diagonal.len()
    }

    pub fn window(&self) -> Range<i64> {
        self.window_start..self.window_start + self.n() as i64
    }

    /// Row of site `n`, if it lies in the window.
    pub fn row_of(&self, site: i64) -> Option<usize> {
        usize::try_from(site - self.window_start).ok().filter(|&i| i < self.n())
    }

    /// Row of site 0.
    pub fn center_index(&self) -> Option<usize> {
        self.row_of(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            format!("# format=1,n={},window_start={},off_diagonal=1\nsite,diagonal\n", self.n(), self.window_start);
        for (i, v) in self.diagonal.iter().enumerate() {
            writeln!(out, "{},{v:e}", self.window_start + i as i64).unwrap();
        }
        out
    }
}

/// Sites `-floor(N/2) ..` of the operator defined by `spec`.
pub fn build_truncation(spec: &PotentialSpec, n: usize) -> Result<JacobiTruncation> {
    if n < 2 {
        return Err(domain(format!("truncation needs N >= 2, got {n}")));
    }
    let start = -((n / 2) as i64);
    let diagonal = sample_potential(spec, start..start + n as i64)?;
    JacobiTruncation::new(diagonal, start, spec.bound)
}

fn kappa_prefix_equal(a: &OdometerState, b: &OdometerState, k: u32) -> bool {
    a.digits()[..k as usize] == b.digits()[..k as usize]
}

/// `sup |V_n - V'_n|`. Two limit-periodic specs on the same odometer point
/// give the exact `||g - g'||_inf`; anything else is the sup over `window`,
/// a lower approximation of the whole-line sup.
pub fn potential_distance(a: &PotentialSpec, b: &PotentialSpec, window: Range<i64>) -> Result<f64> {
    if let (PotentialKind::LimitPeriodic { g: ga, kappa: ka }, PotentialKind::LimitPeriodic { g: gb, kappa: kb }) =
        (&a.kind, &b.kind)
    {
        let k = ga.max_depth().max(gb.max_depth());
        if kappa_prefix_equal(ka, kb, k) {
            if k > MAX_ENUMERATION_DEPTH {
                return Err(Error::Resource(format!(
                    "distance enumerates 2^{k} cylinders; the cap is depth {MAX_ENUMERATION_DEPTH}"
                )));
            }
            return Ok((0..1usize << k).map(|c| (ga.eval_cylinder(c) - gb.eval_cylinder(c)).abs()).fold(0.0, f64::max));
        }
    }
    let va = sample_potential(a, window.clone())?;
    let vb = sample_potential(b, window)?;
    Ok(va.iter().zip(&vb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Site visited `l`-th in the enumeration `0, 1, -1, 2, -2, ...`, `l >= 1`.
pub fn basis_site(l: usize) -> i64 {
    let half = (l / 2) as i64;
    if l.is_multiple_of(2) {
        half
    } else {
        -half
    }
}

/// `sum_l min(2^-l, ||(T - T') xi_l||)` with `xi_l` the basis vectors in the
/// order `delta_0, delta_1, delta_-1, ...`, over the sites both windows hold.
pub fn basis_metric(a: &JacobiTruncation, b: &JacobiTruncation) -> Result<f64> {
    if a.window() != b.window() {
        return Err(domain("basis metric needs truncations on the same window"));
    }
    let mut total = 0.0;
    for l in 1..=a.n().min(1100) {
        // 2^-l underflows long before l = 1100
        let Some(i) = a.row_of(basis_site(l)) else { continue };
        total += (0.5f64).powi(l as i32).min((a.diagonal[i] - b.diagonal[i]).abs());
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(g: SamplingFunction, depth: usize) -> PotentialSpec {
        let bound = sampling_sup_norm(&g).unwrap();
        PotentialSpec::new(PotentialKind::LimitPeriodic { g, kappa: OdometerState::zeros(depth).unwrap() }, bound)
            .unwrap()
    }

    fn minimal_period(values: &[f64]) -> usize {
        (1..=values.len()).find(|&p| values.iter().zip(&values[p..]).all(|(a, b)| a == b)).unwrap()
    }

    #[test]
    fn odometer_examples() {
        let s = OdometerState::zeros(4).unwrap();
        let (s1, w) = s.translate();
        assert_eq!((s1.digits(), w), (&[1, 0, 0, 0][..], false));
        let (s2, _) = s1.translate();
        assert_eq!(s2.digits(), &[0, 1, 0, 0]);
        let s3 = OdometerState::new(vec![1, 1, 0, 0]).unwrap().translate().0;
        assert_eq!(s3.digits(), &[0, 0, 1, 0]);
        let top = OdometerState::new(vec![1, 1, 1]).unwrap();
        let (wrapped, flag) = top.translate();
        assert_eq!((wrapped.digits(), flag), (&[0, 0, 0][..], true));
        assert_eq!(wrapped.inverse_translate(), (top, true));
    }

    #[test]
    fn advance_matches_iteration() {
        let start = OdometerState::new(vec![1, 0, 1, 1, 0, 0, 1]).unwrap();
        for n in -300i64..300 {
            let mut s = start.clone();
            for _ in 0..n.unsigned_abs() {
                s = if n > 0 { s.translate().0 } else { s.inverse_translate().0 };
            }
            assert_eq!(start.advance(n).0, s, "n={n}");
        }
        assert!(!start.advance(1).1);
        assert!(start.advance(200).1);
    }

    #[test]
    fn cylinder_visits_once_per_period() {
        for k in 1..=12u32 {
            let mut state = OdometerState::new(vec![1, 0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1, 0]).unwrap();
            let mut seen = vec![0u32; 1 << k];
            for _ in 0..1usize << k {
                seen[state.cylinder(k)] += 1;
                state = state.translate().0;
            }
            assert!(seen.iter().all(|&c| c == 1), "k={k}");
        }
    }

    #[test]
    fn limit_periodic_alternates() {
        let spec = lp(SamplingFunction::single(1, vec![0.0, 2.5]).unwrap(), 8);
        let v = sample_potential(&spec, 0..6).unwrap();
        assert_eq!(v, vec![0.0, 2.5, 0.0, 2.5, 0.0, 2.5]);
        let neg = sample_potential(&spec, -3..0).unwrap();
        assert_eq!(neg, vec![2.5, 0.0, 2.5]);
    }

    #[test]
    fn single_term_period_is_two_to_the_depth() {
        for k in 1..=10u32 {
            let table: Vec<f64> = (0..1usize << k).map(|c| c as f64 / (1 << k) as f64).collect();
            let spec = lp(SamplingFunction::single(k, table).unwrap(), 12);
            let v = sample_potential(&spec, -5..(3 << k) as i64).unwrap();
            assert_eq!(minimal_period(&v), 1 << k, "k={k}");
        }
    }

    #[test]
    fn matches_closed_form_addition() {
        let g = SamplingFunction::new(vec![
            SamplingTerm { depth: 1, table: vec![0.5, -0.5] },
            SamplingTerm { depth: 3, table: (0..8).map(|c| c as f64 * 0.1).collect() },
        ])
        .unwrap();
        let kappa = OdometerState::new(vec![1, 1, 0, 1, 0]).unwrap();
        let spec = PotentialSpec::new(
            PotentialKind::LimitPeriodic { g: g.clone(), kappa: kappa.clone() },
            sampling_sup_norm(&g).unwrap(),
        )
        .unwrap();
        let base = kappa.cylinder(3) as i64;
        let v = sample_potential(&spec, -20..20).unwrap();
        for (i, n) in (-20i64..20).enumerate() {
            assert_eq!(v[i], g.eval_cylinder((base + n).rem_euclid(8) as usize));
        }
    }

    #[test]
    fn sup_norm_examples() {
        let g = SamplingFunction::single(1, vec![-1.0, 2.0]).unwrap();
        assert_eq!(sampling_sup_norm(&g).unwrap(), 2.0);
        assert_eq!(sampling_sup_norm(&SamplingFunction::default()).unwrap(), 0.0);
        let two = SamplingFunction::new(vec![
            SamplingTerm { depth: 1, table: vec![1.0, -0.25] },
            SamplingTerm { depth: 2, table: vec![0.5, 0.25, -2.0, 0.0] },
        ])
        .unwrap();
        let brute = [1.0 + 0.5, -0.25 + 0.25, 1.0 - 2.0, -0.25 + 0.0].iter().map(|v: &f64| v.abs()).fold(0.0, f64::max);
        assert_eq!(sampling_sup_norm(&two).unwrap(), brute);
        let deep = SamplingFunction::single(21, vec![0.0; 1 << 21]).unwrap();
        assert!(matches!(sampling_sup_norm(&deep), Err(Error::Resource(_))));
    }

    #[test]
    fn truncation_examples() {
        let t = build_truncation(&PotentialSpec::zero(), 2).unwrap();
        assert_eq!(t.diagonal, vec![0.0, 0.0]);
        assert_eq!(t.window(), -1..1);
        assert_eq!(t.center_index(), Some(1));
        let t = build_truncation(&PotentialSpec::constant(0.7).unwrap(), 3).unwrap();
        assert_eq!(t.diagonal, vec![0.7; 3]);
        assert_eq!(t.window(), -1..2);
        let t = build_truncation(&PotentialSpec::random(9, 2.0).unwrap(), 100).unwrap();
        assert!(t.diagonal.iter().all(|v| v.abs() <= 2.0));
        assert!(build_truncation(&PotentialSpec::zero(), 1).is_err());
        assert!(t.to_csv().starts_with("# format=1,n=100,window_start=-50"));
    }

    #[test]
    fn random_potential_is_reproducible_and_windowed() {
        let spec = PotentialSpec::random(42, 1.5).unwrap();
        let a = sample_potential(&spec, -10..10).unwrap();
        let b = sample_potential(&spec, -10..10).unwrap();
        assert_eq!(a, b);
        let inner = sample_potential(&spec, -3..4).unwrap();
        assert_eq!(&a[7..14], &inner[..]);
        let other = sample_potential(&PotentialSpec::random(43, 1.5).unwrap(), -10..10).unwrap();
        assert_ne!(a, other);
        // mirrored stream is distinct from the forward one
        assert_ne!(a[9], a[10]);
        let mean = sample_potential(&spec, 0..20_000).unwrap().iter().sum::<f64>() / 20_000.0;
        assert!(mean.abs() < 0.05);
    }

    #[test]
    fn bound_violation_is_an_invariant_error() {
        let spec = PotentialSpec { kind: PotentialKind::Explicit { values: vec![0.5, 3.0], origin: 0 }, bound: 1.0 };
        assert!(matches!(sample_potential(&spec, 0..2), Err(Error::Invariant(_))));
        assert!(build_truncation(&spec, 4).is_err());
    }

    #[test]
    fn distance_examples() {
        let a = lp(SamplingFunction::single(1, vec![0.0, 1.0]).unwrap(), 4);
        let b = lp(SamplingFunction::single(1, vec![0.0, 2.0]).unwrap(), 4);
        assert_eq!(potential_distance(&a, &a, -5..5).unwrap(), 0.0);
        assert_eq!(potential_distance(&a, &b, -5..5).unwrap(), 1.0);
        let zeros = PotentialSpec::new(PotentialKind::Explicit { values: vec![0.0; 4], origin: -2 }, 0.0).unwrap();
        let c = PotentialSpec::constant(0.3).unwrap();
        assert_eq!(potential_distance(&zeros, &c, -2..2).unwrap(), 0.3);
    }

    #[test]
    fn truncating_the_series_moves_by_the_tail_norm() {
        let g = SamplingFunction::new(
            (1..=6u32)
                .map(|k| SamplingTerm {
                    depth: k,
                    table: (0..1usize << k).map(|c| ((c * 7 + 3) % 5) as f64 / 4.0 * 0.5f64.powi(k as i32)).collect(),
                })
                .collect(),
        )
        .unwrap();
        let full = lp(g.clone(), 8);
        for k in 1..6 {
            let cut = full.truncated(k);
            let tail = SamplingFunction { terms: g.terms[k as usize..].to_vec() };
            let d = potential_distance(&full, &cut, -100..100).unwrap();
            assert!(d <= sampling_sup_norm(&tail).unwrap() + 1e-15);
        }
    }

    #[test]
    fn basis_metric_weights_sites() {
        assert_eq!((1..6).map(basis_site).collect::<Vec<_>>(), vec![0, 1, -1, 2, -2]);
        let a = build_truncation(&PotentialSpec::zero(), 5).unwrap();
        let mut b = a.clone();
        assert_eq!(basis_metric(&a, &b).unwrap(), 0.0);
        b.diagonal[a.row_of(1).unwrap()] = 0.01;
        assert_eq!(basis_metric(&a, &b).unwrap(), 0.01);
        b.diagonal[a.row_of(0).unwrap()] = 5.0;
        assert_eq!(basis_metric(&a, &b).unwrap(), 0.5 + 0.01);
    }

    #[test]
    fn json_round_trip() {
        let specs = [
            PotentialSpec::zero(),
            PotentialSpec::random(7, 10.0).unwrap(),
            lp(SamplingFunction::single(2, vec![0.0, 0.1, 0.2, 0.3]).unwrap(), 5),
            PotentialSpec::new(PotentialKind::Explicit { values: vec![0.1, -0.2], origin: -1 }, 0.2).unwrap(),
        ];
        for s in specs {
            let text = s.to_json();
            assert!(text.contains("\"format\": 1"));
            assert_eq!(PotentialSpec::from_json(&text).unwrap(), s);
        }
        let parsed = PotentialSpec::from_json(r#"{"variant":"random","seed":3,"bound":1.0}"#).unwrap();
        assert_eq!(parsed, PotentialSpec::random(3, 1.0).unwrap());
        assert!(PotentialSpec::from_json(
            r#"{"variant":"limit_periodic","g":{"terms":[{"depth":2,"table":[0,0,0,0]}]},"kappa":[0],"bound":1}"#
        )
        .is_err());
        assert!(
            PotentialSpec::from_json(r#"{"variant":"limit_periodic","g":{"terms":[]},"kappa":[2],"bound":1}"#).is_err()
        );
    }
}
