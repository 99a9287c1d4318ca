//! The acceptance suite: twelve checks against closed-form oracles, each with
//! a wall-clock budget. Shared by the `acceptance` test target and the CLI.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::Result;
use crate::experiments::{
    alpha_sweep, crossover_alpha, gamma_band, sweep_csv, wonderland_csv, wonderland_scan, WonderlandConfig,
    WONDERLAND_LABEL,
};
use crate::kernels::{geometric_grid, scaling_profile, v_t, DEFAULT_RATIO};
use crate::local_dims::{local_dim_bounds, measure_dims, stream_rng, unit_draw, MeasureDimParams};
use crate::measures::{cantor_measure, levy_distance, levy_distance_to_cdf, uniform_measure, DiscreteMeasure};
use crate::operators::{
    build_truncation, sample_potential, OdometerState, PotentialKind, PotentialSpec, SamplingFunction, SamplingTerm,
};
use crate::oracles::{arcsine_cdf, cantor_dimension, separated_atoms};
use crate::set_dims::{
    box_dimension, cantor_set, hausdorff_scan, hausdorff_value, packing_scan, scan_csv, transition_alpha, SetRep,
};
use crate::spectral::{eigenvalues, spectral_measure, spectral_measure_of, spectrum_support, Psi, SpectralRequest};

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    /// Wall-clock budget in seconds; `None` for the determinism re-run.
    pub budget: Option<f64>,
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, name: "tent-kernel sandwich", budget: Some(5.0) },
    Criterion { id: 2, name: "gamma monotonicity on nested grids", budget: Some(5.0) },
    Criterion { id: 3, name: "Cantor measure dimensions", budget: Some(30.0) },
    Criterion { id: 4, name: "pure-point and Lebesgue extremes", budget: Some(30.0) },
    Criterion { id: 5, name: "set dimensions", budget: Some(30.0) },
    Criterion { id: 6, name: "arcsine law of the free operator", budget: Some(60.0) },
    Criterion { id: 7, name: "spectrum support", budget: Some(60.0) },
    Criterion { id: 8, name: "continuity under potential perturbation", budget: Some(60.0) },
    Criterion { id: 9, name: "odometer periods and cylinder visits", budget: Some(5.0) },
    Criterion { id: 10, name: "alpha-sweep crossovers", budget: Some(60.0) },
    Criterion { id: 11, name: "Wonderland poles", budget: Some(300.0) },
    Criterion { id: 12, name: "determinism", budget: None },
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget: Option<f64>,
    /// Named CSV/JSON outputs of the run; compared byte for byte by the
    /// determinism check.
    pub artifacts: Vec<(String, String)>,
}

impl Outcome {
    pub fn line(&self) -> String {
        let budget = match self.budget {
            Some(b) => format!("{:.2} s / {b} s", self.seconds),
            None => format!("{:.2} s", self.seconds),
        };
        format!(
            "[{}] {:>2} {} ({budget}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

struct Check {
    passed: bool,
    detail: String,
    artifacts: Vec<(String, String)>,
}

impl Check {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail, artifacts: Vec::new() }
    }

    fn with(mut self, name: &str, content: String) -> Self {
        self.artifacts.push((name.to_string(), content));
        self
    }
}

/// Runs criteria 1 to 11 by id.
fn run_check(id: u8, seed: u64) -> Result<Check> {
    match id {
        1 => sandwich(seed),
        2 => gamma_monotonicity(seed),
        3 => cantor_dims(seed),
        4 => extremes(seed),
        5 => set_dimensions(),
        6 => arcsine(seed),
        7 => support(seed),
        8 => continuity(seed),
        9 => odometer(seed),
        10 => sweeps(),
        11 => wonderland(seed),
        _ => unreachable!("criterion {id}"),
    }
}

fn timed(criterion: &Criterion, seed: u64) -> Outcome {
    let start = Instant::now();
    let check = run_check(criterion.id, seed).unwrap_or_else(|e| Check::new(false, format!("error: {e}")));
    finish(criterion, start, check)
}

fn finish(criterion: &Criterion, start: Instant, check: Check) -> Outcome {
    let seconds = start.elapsed().as_secs_f64();
    let over = criterion.budget.is_some_and(|b| seconds > b);
    let detail = if over { format!("{} [over budget]", check.detail) } else { check.detail };
    Outcome {
        id: criterion.id,
        name: criterion.name,
        passed: check.passed && !over,
        detail,
        seconds,
        budget: criterion.budget,
        artifacts: check.artifacts,
    }
}

/// Runs one criterion. Criterion 12 re-runs 1 to 11 twice.
pub fn run_one(id: u8, seed: u64) -> Option<Outcome> {
    let criterion = CRITERIA.iter().find(|c| c.id == id)?;
    if id == 12 {
        let start = Instant::now();
        let first: Vec<Outcome> = CRITERIA[..11].iter().map(|c| timed(c, seed)).collect();
        return Some(finish(criterion, start, determinism(&first, seed)));
    }
    Some(timed(criterion, seed))
}

/// Runs all twelve criteria, calling `report` after each.
pub fn run_all(seed: u64, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    let mut outcomes = Vec::with_capacity(12);
    for c in &CRITERIA[..11] {
        let o = timed(c, seed);
        report(&o);
        outcomes.push(o);
    }
    let start = Instant::now();
    let o = finish(&CRITERIA[11], start, determinism(&outcomes, seed));
    report(&o);
    outcomes.push(o);
    outcomes
}

/// Re-runs 1 to 11 and compares artifacts byte for byte. With the parallel
/// feature the re-run uses a three-thread pool, so scheduling differs too.
fn determinism(first: &[Outcome], seed: u64) -> Check {
    let rerun = || -> Vec<Outcome> { CRITERIA[..11].iter().map(|c| timed(c, seed)).collect() };
    #[cfg(feature = "parallel")]
    let second = match rayon::ThreadPoolBuilder::new().num_threads(3).build() {
        Ok(pool) => pool.install(rerun),
        Err(_) => rerun(),
    };
    #[cfg(not(feature = "parallel"))]
    let second = rerun();
    let mut compared = 0;
    let mut mismatched = Vec::new();
    for (a, b) in first.iter().zip(&second) {
        if a.artifacts.is_empty() {
            mismatched.push(format!("{}: no artifacts", a.id));
        }
        if a.artifacts != b.artifacts {
            mismatched.push(a.id.to_string());
        }
        compared += a.artifacts.len();
    }
    Check::new(
        mismatched.is_empty(),
        format!("{compared} artifacts from criteria 1-11 re-run; mismatches: [{}]", mismatched.join(", ")),
    )
}

/// Atomic measure with 1 to 40 atoms in `[0, 1]`, total mass in `(0, 1]`.
fn random_measure(seed: u64, index: u64) -> DiscreteMeasure {
    let mut rng = stream_rng(seed, index);
    let n = 1 + (unit_draw(&mut rng) * 40.0) as usize;
    let total = 0.2 + 0.8 * unit_draw(&mut rng);
    let raw: Vec<(f64, f64)> = (0..n).map(|_| (unit_draw(&mut rng), 0.05 + unit_draw(&mut rng))).collect();
    let sum: f64 = raw.iter().map(|a| a.1).sum();
    DiscreteMeasure::new(raw.into_iter().map(|(p, w)| (p, w / sum * total * (1.0 - 1e-12))).collect())
        .expect("valid random measure")
}

fn sandwich(seed: u64) -> Result<Check> {
    let (mut checks, mut violations) = (0usize, 0usize);
    let mut sum = 0.0;
    for m in 0..1000u64 {
        let mu = random_measure(seed, m);
        let mut rng = stream_rng(seed ^ 0x5A4D, m);
        for j in 0..20 {
            let t = 10f64.powf(4.0 * unit_draw(&mut rng));
            let atom = mu.positions()[(unit_draw(&mut rng) * mu.len() as f64) as usize];
            // boundary cases: exactly on the inner and outer radii
            let x = match j % 4 {
                0 => atom,
                1 => atom + 1.0 / t,
                2 => atom - 2.0 / t,
                _ => unit_draw(&mut rng),
            };
            let v = v_t(&mu, t, x)?;
            let inner = mu.ball_mass(x, 1.0 / t)?;
            let outer = mu.ball_mass(x, 2.0 / t)?;
            checks += 1;
            if !(inner <= v && v <= outer) {
                violations += 1;
            }
            sum += v;
        }
    }
    Ok(Check::new(violations == 0, format!("{checks} (t, x) checks, {violations} violations"))
        .with("sandwich.csv", format!("# format=1\nchecks,violations,sum_v\n{checks},{violations},{sum:e}\n")))
}

fn gamma_monotonicity(seed: u64) -> Result<Check> {
    let mut violations = 0usize;
    let mut out = String::from("# format=1\ncase,s,gamma_h,gamma_p\n");
    for case in 0..200u64 {
        let mu = random_measure(seed.wrapping_add(1), case);
        let mut rng = stream_rng(seed ^ 0x6A6D, case);
        let alpha = unit_draw(&mut rng);
        let x = mu.positions()[(unit_draw(&mut rng) * mu.len() as f64) as usize] + 0.01 * (unit_draw(&mut rng) - 0.5);
        let t_max = 1e4;
        // suffixes of one geometric grid are nested grids
        let base = geometric_grid(1.0, t_max, DEFAULT_RATIO)?;
        let mut prev: Option<(f64, f64)> = None;
        for &s in base.iter().step_by(6) {
            let p = scaling_profile(&mu, alpha, x, s, t_max, DEFAULT_RATIO)?;
            writeln!(out, "{case},{s:e},{:e},{:e}", p.gamma_h, p.gamma_p).unwrap();
            if let Some((h, g)) = prev {
                if p.gamma_h > h || p.gamma_p < g {
                    violations += 1;
                }
            }
            prev = Some((p.gamma_h, p.gamma_p));
        }
    }
    Ok(Check::new(violations == 0, format!("200 (mu, alpha, x) cases, {violations} violations"))
        .with("gamma_monotonicity.csv", out))
}

fn cantor_dims(seed: u64) -> Result<Check> {
    let mu = cantor_measure(14)?;
    let params = MeasureDimParams { seed, ..MeasureDimParams::new(1e-5, 0.1) };
    let report = measure_dims(&mu, &params)?;
    let d = cantor_dimension();
    let ok = (report.dim_h_upper - d).abs() <= 0.05 && (report.dim_p_lower - d).abs() <= 0.05;
    Ok(Check::new(
        ok,
        format!("dim_H_upper {:.4}, dim_P_lower {:.4}, target {d:.5} +/- 0.05", report.dim_h_upper, report.dim_p_lower),
    )
    .with("cantor_dims.json", report.to_json()))
}

fn extremes(seed: u64) -> Result<Check> {
    let atoms = separated_atoms(10)?;
    let pp = measure_dims(&atoms, &MeasureDimParams { seed, ..MeasureDimParams::new(1e-4, 1e-2) })?;
    let leb = uniform_measure(0.0, 1.0, 100_000)?;
    let ac = measure_dims(&leb, &MeasureDimParams { seed, ..MeasureDimParams::new(1e-3, 1e-1) })?;
    let ok = pp.dim_h_upper <= 0.05 && pp.dim_p_lower <= 0.05 && ac.dim_h_upper >= 0.95 && ac.dim_p_lower >= 0.95;
    Ok(Check::new(
        ok,
        format!(
            "10 atoms ({:.3}, {:.3}) <= 0.05; uniform 1e5 ({:.3}, {:.3}) >= 0.95",
            pp.dim_h_upper, pp.dim_p_lower, ac.dim_h_upper, ac.dim_p_lower
        ),
    )
    .with("pure_point_dims.json", pp.to_json())
    .with("lebesgue_dims.json", ac.to_json()))
}

fn set_dimensions() -> Result<Check> {
    let d = cantor_dimension();
    let cantor = cantor_set(10)?;
    let scales: Vec<f64> = (2..=8).map(|j| 3f64.powi(-j)).collect();
    let box_dim = box_dimension(&cantor, &scales)?;
    let unit = SetRep::intervals(vec![(0.0, 1.0)], 1e-6)?;
    let mut worst_unit = 0.0f64;
    let mut unit_ok = true;
    for delta in [0.3, 0.1, 0.037, 1e-2, 1e-3] {
        let h = hausdorff_value(&unit, 1.0, delta)?;
        worst_unit = worst_unit.max((h - 1.0).abs() / delta);
        unit_ok &= (h - 1.0).abs() <= delta;
    }
    let step = 0.02;
    let alphas: Vec<f64> = (0..=50).map(|k| k as f64 * step).collect();
    let oracles = [
        ("cantor", cantor.clone(), 3f64.powi(-8)),
        ("interval", unit, 1e-3),
        ("points", SetRep::points(vec![0.1, 0.35, 0.8], 1e-9)?, 1e-3),
    ];
    let mut order_ok = true;
    let mut scans = String::new();
    let mut summary = Vec::new();
    for (name, set, delta) in &oracles {
        let hs = hausdorff_scan(set, &alphas, *delta)?;
        let ps = packing_scan(set, &alphas, *delta)?;
        let h = transition_alpha(&hs).unwrap_or(f64::INFINITY);
        let p = transition_alpha(&ps).unwrap_or(f64::INFINITY);
        order_ok &= h <= p + step + 1e-12;
        summary.push(format!("{name} H {h:.2} <= P {p:.2}"));
        writeln!(scans, "# set={name},delta={delta:e},kind=hausdorff").unwrap();
        scans.push_str(&scan_csv(&hs));
        writeln!(scans, "# set={name},delta={delta:e},kind=packing").unwrap();
        scans.push_str(&scan_csv(&ps));
    }
    let ok = (box_dim - d).abs() <= 0.03 && unit_ok && order_ok;
    Ok(Check::new(
        ok,
        format!(
            "box dim {box_dim:.4} (target {d:.4} +/- 0.03); |h([0,1]) - 1| <= {worst_unit:.3} delta; {}",
            summary.join(", ")
        ),
    )
    .with("set_scans.csv", scans)
    .with("box_dimension.csv", format!("# format=1\nset,box_dimension\ncantor10,{box_dim:e}\n")))
}

fn arcsine(seed: u64) -> Result<Check> {
    let res = spectral_measure(&SpectralRequest { spec: PotentialSpec::zero(), n: 2001, psi: Psi::Delta0 })?;
    let mu = &res.measure;
    let levy = levy_distance_to_cdf(mu, arcsine_cdf, 1.0);
    // only even eigenvectors charge the center site, so the atoms are twice
    // as sparse as the eigenvalues
    let eps_min = 10.0 * mu.median_spacing().unwrap_or(0.0);
    let interior = mu.restrict(&crate::measures::RestrictionSet::new(vec![(-1.5, 1.5)])?);
    let mut rng = stream_rng(seed, 6);
    let mut worst = 0.0f64;
    let mut rows = String::from("# format=1\nx,d_lower,d_upper\n");
    for _ in 0..20 {
        let k = interior.atom_for_fraction(unit_draw(&mut rng));
        let x = interior.positions()[k];
        let est = local_dim_bounds(mu, x, eps_min, 0.2, 11)?;
        worst = worst.max((est.d_lower - 1.0).abs()).max((est.d_upper - 1.0).abs());
        writeln!(rows, "{x:e},{:e},{:e}", est.d_lower, est.d_upper).unwrap();
    }
    let ok = levy <= 1e-2 && worst <= 0.1;
    Ok(Check::new(
        ok,
        format!("Levy distance {levy:.2e} <= 1e-2; 20 interior local dims within {worst:.3} of 1 (<= 0.1)"),
    )
    .with("free_measure.csv", mu.to_csv())
    .with("free_local_dims.csv", rows))
}

/// Fifty specs of bound 1 across the four potential kinds.
fn random_specs(seed: u64) -> Result<Vec<(PotentialSpec, usize)>> {
    let mut specs = Vec::with_capacity(50);
    for i in 0..50u64 {
        let mut rng = stream_rng(seed ^ 0x7370, i);
        let n = 50 + (unit_draw(&mut rng) * 400.0) as usize;
        let draw = |rng: &mut _| 2.0 * unit_draw(rng) - 1.0;
        let kind = match i % 4 {
            0 => PotentialKind::Random { seed: seed.wrapping_add(i) },
            1 => PotentialKind::Periodic { cell: (0..1 + i as usize % 7).map(|_| draw(&mut rng)).collect() },
            2 => {
                let depth = 1 + (i % 5) as u32;
                let g = SamplingFunction::single(depth, (0..1usize << depth).map(|_| draw(&mut rng)).collect())?;
                let kappa = OdometerState::new((0..8).map(|_| u8::from(unit_draw(&mut rng) < 0.5)).collect())?;
                PotentialKind::LimitPeriodic { g, kappa }
            }
            _ => {
                PotentialKind::Explicit { values: (0..n).map(|_| draw(&mut rng)).collect(), origin: -((n / 2) as i64) }
            }
        };
        specs.push((PotentialSpec::new(kind, 1.0)?, n));
    }
    Ok(specs)
}

fn support(seed: u64) -> Result<Check> {
    let mut outside = 0usize;
    let mut out = String::from("# format=1\nspec,n,min,max\n");
    for (i, (spec, n)) in random_specs(seed)?.iter().enumerate() {
        let vals = eigenvalues(&build_truncation(spec, *n)?)?;
        outside += vals.iter().filter(|v| v.abs() > 3.0).count();
        writeln!(out, "{i},{n},{:e},{:e}", vals[0], vals[vals.len() - 1]).unwrap();
    }
    let (lo, hi) = spectrum_support(&PotentialSpec::zero(), 2001)?;
    writeln!(out, "free,2001,{lo:e},{hi:e}").unwrap();
    let ok = outside == 0 && (lo + 2.0).abs() <= 1e-3 && (hi - 2.0).abs() <= 1e-3;
    Ok(Check::new(
        ok,
        format!("50 specs with r = 1: {outside} eigenvalues outside [-3, 3]; free N=2001 support [{lo:.6}, {hi:.6}]"),
    )
    .with("supports.csv", out))
}

fn continuity(seed: u64) -> Result<Check> {
    let n = 501;
    let (mut worst_levy, mut weyl_violations) = (0.0f64, 0usize);
    let mut out = String::from("# format=1\npair,sup_dv,levy,max_eigen_shift\n");
    for pair in 0..20u64 {
        let base = build_truncation(&PotentialSpec::random(seed.wrapping_add(pair), 1.0)?, n)?;
        let mut rng = stream_rng(seed ^ 0x636F, pair);
        let mut perturbed = base.clone();
        for v in &mut perturbed.diagonal {
            *v += 1e-3 * (2.0 * unit_draw(&mut rng) - 1.0);
        }
        // one site at the full perturbation size
        let c = perturbed.center_index().unwrap();
        perturbed.diagonal[c] = base.diagonal[c] + 1e-3;
        perturbed.bound = 1.0 + 1e-3;
        let sup = base.diagonal.iter().zip(&perturbed.diagonal).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let a = spectral_measure_of(&base, &Psi::Delta0)?;
        let b = spectral_measure_of(&perturbed, &Psi::Delta0)?;
        let levy = levy_distance(&a.measure, &b.measure);
        let shift = a.eigenvalues.iter().zip(&b.eigenvalues).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if shift > sup {
            weyl_violations += 1;
        }
        worst_levy = worst_levy.max(levy);
        writeln!(out, "{pair},{sup:e},{levy:e},{shift:e}").unwrap();
    }
    let ok = worst_levy <= 1e-2 && weyl_violations == 0;
    Ok(Check::new(
        ok,
        format!("20 pairs at sup 1e-3: max Levy {worst_levy:.2e} <= 1e-2; {weyl_violations} Weyl violations"),
    )
    .with("continuity.csv", out))
}

fn minimal_period(values: &[f64]) -> usize {
    (1..=values.len()).find(|&p| values.iter().zip(&values[p..]).all(|(a, b)| a == b)).unwrap_or(values.len())
}

fn odometer(seed: u64) -> Result<Check> {
    let mut bad = Vec::new();
    let mut out = String::from("# format=1\ndepth,period,cylinders_visited_once\n");
    for k in 1..=10u32 {
        let mut rng = stream_rng(seed ^ 0x6F64, k as u64);
        let kappa = OdometerState::new((0..12).map(|_| u8::from(unit_draw(&mut rng) < 0.5)).collect())?;
        let table: Vec<f64> = (0..1usize << k).map(|c| (c as f64 + 1.0) / (1usize << k) as f64).collect();
        let g = SamplingFunction::new(vec![SamplingTerm { depth: k, table }])?;
        let spec = PotentialSpec::new(PotentialKind::LimitPeriodic { g, kappa: kappa.clone() }, 1.0)?;
        let start = -((unit_draw(&mut rng) * 1000.0) as i64);
        let v = sample_potential(&spec, start..start + (3i64 << k))?;
        let period = minimal_period(&v);
        let mut visits = vec![0u32; 1 << k];
        let mut state = kappa;
        for _ in 0..1usize << k {
            visits[state.cylinder(k)] += 1;
            state = state.translate().0;
        }
        let once = visits.iter().all(|&c| c == 1);
        if period != 1 << k || !once {
            bad.push(k);
        }
        writeln!(out, "{k},{period},{once}").unwrap();
    }
    Ok(Check::new(
        bad.is_empty(),
        format!("depths 1-10: period 2^k and one visit per cylinder; failing depths {bad:?}"),
    )
    .with("odometer.csv", out))
}

fn sweeps() -> Result<Check> {
    let d = cantor_dimension();
    let cantor = cantor_measure(14)?;
    let t_max = 3f64.powi(10);
    let band = gamma_band(&cantor, d, 1.0, t_max)?;
    let alphas: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    let cantor_rows = alpha_sweep(&cantor, &alphas, band.max, 1.0, t_max)?;
    let crossover = crossover_alpha(&cantor_rows);
    let cantor_ok = crossover.is_some_and(|a| (a - d).abs() <= 0.05);

    let high: Vec<f64> = (10..=100).step_by(5).map(|k| k as f64 / 100.0).collect();
    let pp_rows = alpha_sweep(&separated_atoms(10)?, &high, 0.25, 10.0, 1e6)?;
    let pp_min = pp_rows.iter().map(|r| r.ks_mass).fold(f64::INFINITY, f64::min);

    let low: Vec<f64> = (0..=90).step_by(5).map(|k| k as f64 / 100.0).collect();
    let leb_rows = alpha_sweep(&uniform_measure(0.0, 1.0, 100_000)?, &low, 3.0, 1.0, 1e4)?;
    let leb_min = leb_rows.iter().map(|r| r.kc_mass).fold(f64::INFINITY, f64::min);

    let ok = cantor_ok && pp_min >= 0.99 && leb_min >= 0.99;
    let shown = crossover.map_or("none".to_string(), |a| format!("{a:.4}"));
    Ok(Check::new(
        ok,
        format!(
            "Cantor crossover {shown} (target {d:.4} +/- 0.05, r = band max {:.4}); pure point min ks {pp_min:.3} for alpha >= 0.1; Lebesgue min kc {leb_min:.3} for alpha <= 0.9",
            band.max
        ),
    )
    .with("sweep_cantor.csv", sweep_csv(&cantor_rows))
    .with("sweep_pure_point.csv", sweep_csv(&pp_rows))
    .with("sweep_lebesgue.csv", sweep_csv(&leb_rows)))
}

fn wonderland(seed: u64) -> Result<Check> {
    let cfg = WonderlandConfig::canonical(seed);
    let rows = wonderland_scan(&cfg)?;
    let first = rows.first().expect("nonempty grid");
    let last = rows.last().expect("nonempty grid");
    let labeled = rows.iter().all(|r| r.label == WONDERLAND_LABEL);
    let ok = first.lambda == 0.0
        && last.lambda == 1.0
        && first.dims.dim_p_lower >= 0.9
        && last.dims.dim_h_upper <= 0.2
        && labeled;
    Ok(Check::new(
        ok,
        format!(
            "lambda=0 dim_P_lower {:.3} >= 0.9; lambda=1 dim_H_upper {:.3} <= 0.2; finite-scale label {}",
            first.dims.dim_p_lower,
            last.dims.dim_h_upper,
            if labeled { "present" } else { "missing" }
        ),
    )
    .with("wonderland.csv", wonderland_csv(&rows)))
}
