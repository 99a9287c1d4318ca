use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use spectrafrac::experiments::{
    limit_periodic_csv, limit_periodic_scan, wonderland_csv, wonderland_scan, LimitPeriodicConfig, RunManifest,
    WonderlandConfig,
};
use spectrafrac::kernels::{scaling_profile, t_max_for_resolution, DEFAULT_RATIO};
use spectrafrac::local_dims::{classify_mass, measure_dims, MeasureDimParams};
use spectrafrac::measures::{cantor_measure, DiscreteMeasure};
use spectrafrac::operators::PotentialSpec;
use spectrafrac::oracles::arcsine_cdf;
use spectrafrac::set_dims::{
    box_dimension, cantor_set, hausdorff_scan, packing_scan, scan_csv, transition_alpha, SetRep,
};
use spectrafrac::spectral::{spectral_measure, Psi, SpectralRequest};
use spectrafrac::validation;
use spectrafrac::Error;

#[derive(Parser)]
#[command(name = "spectrafrac", version, about = "Fractal dimensions of spectral measures")]
struct Cli {
    /// Seed for every stochastic step; overrides config files.
    #[arg(long, global = true, env = "SPECTRAFRAC_SEED")]
    seed: Option<u64>,
    /// Worker threads for the parallel core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for outputs and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Upper Hausdorff and lower packing dimensions of a measure.
    MeasureDim(MeasureDimArgs),
    /// Hausdorff and packing scans and box dimension of a set.
    SetDim(SetDimArgs),
    /// Spectral measure of a truncated operator.
    Spectral(SpectralArgs),
    /// Scaled tent integrals `t^alpha V_t` at one point.
    Profile(ProfileArgs),
    /// Split a measure into its alpha-continuous and alpha-singular parts.
    Classify(ClassifyArgs),
    /// Parameter scans over families of operators.
    Experiment { kind: ExperimentKind, config: PathBuf },
    /// Run the acceptance suite.
    Validate {
        /// Run a single criterion.
        #[arg(long)]
        criterion: Option<u8>,
    },
    /// Write reference measures and sets.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct MeasureDimArgs {
    measure: PathBuf,
    /// Smallest radius; defaults to ten times the median atom spacing.
    #[arg(long)]
    eps_min: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    eps_max: f64,
    #[arg(long, default_value_t = 0.95)]
    quantile: f64,
    #[arg(long, default_value_t = 11)]
    n_scales: usize,
    #[arg(long, default_value_t = 400)]
    n_sample: usize,
}

#[derive(Args)]
struct SetDimArgs {
    set: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    #[arg(long, default_value_t = 0.02)]
    alpha_step: f64,
    /// Box-counting scales `delta * 2^j`, `j = 0..box_scales`.
    #[arg(long, default_value_t = 8)]
    box_scales: u32,
}

#[derive(Args)]
struct SpectralArgs {
    spec: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "delta0")]
    psi: Psi,
}

#[derive(Args)]
struct ProfileArgs {
    measure: PathBuf,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Defaults to the horizon trusted at the measure's atom spacing.
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_RATIO)]
    ratio: f64,
}

#[derive(Args)]
struct ClassifyArgs {
    measure: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    s: f64,
    #[arg(long)]
    t_max: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Wonderland,
    LimitPeriodic,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    CantorMeasure,
    CantorSet,
    ArcsineCdf,
}

#[derive(Args)]
struct OracleArgs {
    kind: OracleKind,
    #[arg(long, default_value_t = 10)]
    depth: u32,
    /// Number of evaluation points for the arcsine CDF.
    #[arg(long, default_value_t = 401)]
    points: usize,
}

/// A failed run: exit code and message.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    /// Core errors about inputs map to usage errors, the rest to numeric
    /// failures. `context` names the file or stage.
    fn from_core(context: &str, e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Resource(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 2,
            Error::Invariant(_) | Error::Convergence { .. } | Error::OutsideSupport { .. } => 1,
        };
        Self { code, message: format!("{context}: {e}") }
    }
}

type Run<T> = Result<T, Failure>;

struct Session {
    out_dir: PathBuf,
    manifest: RunManifest,
    clock: Instant,
}

impl Session {
    fn new(out_dir: &Path, command: &str, seed: Option<u64>, config: serde_json::Value) -> Run<Self> {
        fs::create_dir_all(out_dir)
            .map_err(|e| Failure::usage(format!("{}: cannot create output directory: {e}", out_dir.display())))?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            manifest: RunManifest::new(command, seed, config),
            clock: Instant::now(),
        })
    }

    fn lap(&mut self, stage: &str) {
        self.manifest.timings.push((stage.to_string(), self.clock.elapsed().as_secs_f64()));
        self.clock = Instant::now();
    }

    fn write(&mut self, name: &str, content: &str) -> Run<PathBuf> {
        let path = self.out_dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Failure::numeric(format!("{}: {e}", parent.display())))?;
        }
        fs::write(&path, content).map_err(|e| Failure::numeric(format!("{}: {e}", path.display())))?;
        self.manifest.outputs.push(name.to_string());
        Ok(path)
    }

    fn finish(mut self) -> Run<()> {
        let name = format!("{}.manifest.json", self.manifest.command.replace(' ', "-"));
        self.manifest.outputs.push(name.clone());
        let text = self.manifest.to_json();
        self.write(&name, &text)?;
        Ok(())
    }
}

fn read(path: &Path) -> Run<String> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn core<T>(context: &Path, r: spectrafrac::Result<T>) -> Run<T> {
    r.map_err(|e| Failure::from_core(&context.display().to_string(), e))
}

fn load_measure(path: &Path) -> Run<DiscreteMeasure> {
    let text = read(path)?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        DiscreteMeasure::from_json(&text)
    } else {
        DiscreteMeasure::from_csv(&text)
    };
    core(path, parsed)
}

fn horizon(mu: &DiscreteMeasure, t_max: Option<f64>) -> f64 {
    t_max.unwrap_or_else(|| mu.median_spacing().map_or(1e4, t_max_for_resolution))
}

fn measure_dim(cli: &Cli, a: &MeasureDimArgs) -> Run<()> {
    let mu = load_measure(&a.measure)?;
    let eps_min = a.eps_min.unwrap_or_else(|| 10.0 * mu.median_spacing().unwrap_or(1e-4));
    let params = MeasureDimParams {
        n_sample: a.n_sample,
        quantile: a.quantile,
        eps_min,
        eps_max: a.eps_max,
        n_scales: a.n_scales,
        seed: cli.seed.unwrap_or(0),
    };
    let config = serde_json::to_value(&params).expect("params serialize");
    let mut session = Session::new(
        &cli.out_dir,
        "measure-dim",
        Some(params.seed),
        json!({
            "measure": a.measure, "params": config,
        }),
    )?;
    let report = core(&a.measure, measure_dims(&mu, &params))?;
    session.lap("measure_dims");
    session.write("measure_dims.json", &report.to_json())?;
    session.write("measure_dims_points.csv", &report.points_csv())?;
    println!("dim_H_upper {:.6}\ndim_P_lower {:.6}", report.dim_h_upper, report.dim_p_lower);
    session.finish()
}

fn set_dim(cli: &Cli, a: &SetDimArgs) -> Run<()> {
    let set = core(&a.set, SetRep::from_json(&read(&a.set)?))?;
    if !(a.alpha_step > 0.0 && a.alpha_step <= 1.0) {
        return Err(Failure::usage(format!("--alpha-step must lie in (0, 1], got {}", a.alpha_step)));
    }
    let steps = (1.0 / a.alpha_step).round() as usize;
    let alphas: Vec<f64> = (0..=steps).map(|k| (k as f64 * a.alpha_step).min(1.0)).collect();
    let scales: Vec<f64> = (0..a.box_scales).map(|j| a.delta * 2f64.powi(j as i32)).filter(|&e| e < 1.0).collect();
    let mut session = Session::new(
        &cli.out_dir,
        "set-dim",
        None,
        json!({
            "set": a.set, "delta": a.delta, "alpha_step": a.alpha_step, "box_scales": scales,
        }),
    )?;
    let h = core(&a.set, hausdorff_scan(&set, &alphas, a.delta))?;
    let p = core(&a.set, packing_scan(&set, &alphas, a.delta))?;
    let box_dim = core(&a.set, box_dimension(&set, &scales))?;
    session.lap("scans");
    let summary = json!({
        "format": 1,
        "delta": a.delta,
        "hausdorff_transition": transition_alpha(&h),
        "packing_transition": transition_alpha(&p),
        "box_dimension": box_dim,
    });
    session.write("set_dims.json", &serde_json::to_string_pretty(&summary).unwrap())?;
    session.write("hausdorff_scan.csv", &scan_csv(&h))?;
    session.write("packing_scan.csv", &scan_csv(&p))?;
    let show = |t: Option<f64>| t.map_or("none".to_string(), |a| format!("{a:.4}"));
    println!(
        "hausdorff transition {}\npacking transition {}\nbox dimension {box_dim:.6}",
        show(transition_alpha(&h)),
        show(transition_alpha(&p))
    );
    session.finish()
}

fn spectral(cli: &Cli, a: &SpectralArgs) -> Run<()> {
    let spec = core(&a.spec, PotentialSpec::from_json(&read(&a.spec)?))?;
    let mut session = Session::new(
        &cli.out_dir,
        "spectral",
        None,
        json!({
            "spec": a.spec, "n": a.n, "psi": a.psi.to_string(),
        }),
    )?;
    let result = core(&a.spec, spectral_measure(&SpectralRequest { spec: spec.clone(), n: a.n, psi: a.psi.clone() }))?;
    session.lap("spectral_measure");
    session.write("spectral_measure.csv", &result.measure.to_csv())?;
    session.write("spectral_measure.meta.json", &result.sidecar_json(&spec))?;
    println!(
        "atoms {}\nresidual_max {:e}\ndropped_mass {:e}",
        result.measure.len(),
        result.residual_max,
        result.dropped_mass
    );
    session.finish()
}

fn profile(cli: &Cli, a: &ProfileArgs) -> Run<()> {
    let mu = load_measure(&a.measure)?;
    let t_max = horizon(&mu, a.t_max);
    let mut session = Session::new(
        &cli.out_dir,
        "profile",
        None,
        json!({
            "measure": a.measure, "x": a.x, "alpha": a.alpha, "s": a.s, "t_max": t_max, "ratio": a.ratio,
        }),
    )?;
    let p = core(&a.measure, scaling_profile(&mu, a.alpha, a.x, a.s, t_max, a.ratio))?;
    session.lap("profile");
    session.write("profile.csv", &p.to_csv())?;
    println!("gamma_H {:e}\ngamma_P {:e}", p.gamma_h, p.gamma_p);
    session.finish()
}

fn classify(cli: &Cli, a: &ClassifyArgs) -> Run<()> {
    let mu = load_measure(&a.measure)?;
    let t_max = horizon(&mu, a.t_max);
    let mut session = Session::new(
        &cli.out_dir,
        "classify",
        None,
        json!({
            "measure": a.measure, "alpha": a.alpha, "r": a.r, "s": a.s, "t_max": t_max,
        }),
    )?;
    let report = core(&a.measure, classify_mass(&mu, a.alpha, a.r, a.s, t_max))?;
    session.lap("classify");
    session.write("classification.json", &serde_json::to_string_pretty(&report).unwrap())?;
    println!("kc_mass {:e}\nks_mass {:e}", report.kc_mass, report.ks_mass);
    session.finish()
}

fn experiment(cli: &Cli, kind: ExperimentKind, path: &Path) -> Run<()> {
    let text = read(path)?;
    match kind {
        ExperimentKind::Wonderland => {
            let mut cfg = core(path, WonderlandConfig::from_json(&text))?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            let config = serde_json::to_value(&cfg).expect("config serializes");
            let mut session = Session::new(&cli.out_dir, "experiment wonderland", Some(cfg.seed), config)?;
            let rows = core(path, wonderland_scan(&cfg))?;
            session.lap("scan");
            session.write(&cfg.table, &wonderland_csv(&rows))?;
            for r in &rows {
                println!(
                    "lambda {:.4} dim_H_upper {:.4} dim_P_lower {:.4}",
                    r.lambda, r.dims.dim_h_upper, r.dims.dim_p_lower
                );
            }
            session.finish()
        }
        ExperimentKind::LimitPeriodic => {
            let mut cfg = core(path, LimitPeriodicConfig::from_json(&text))?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            let config = serde_json::to_value(&cfg).expect("config serializes");
            let mut session = Session::new(&cli.out_dir, "experiment limit-periodic", Some(cfg.seed), config)?;
            let rows = core(path, limit_periodic_scan(&cfg))?;
            session.lap("scan");
            session.write(&cfg.table, &limit_periodic_csv(&rows))?;
            for r in &rows {
                println!(
                    "depth {} tail {:.3e} levy {:.3e} dim_H_upper {:.4} dim_P_lower {:.4}",
                    r.depth, r.tail_sup_norm, r.levy_to_full, r.dims.dim_h_upper, r.dims.dim_p_lower
                );
            }
            session.finish()
        }
    }
}

fn validate(cli: &Cli, criterion: Option<u8>) -> Run<()> {
    let seed = cli.seed.unwrap_or(0);
    let mut session = Session::new(&cli.out_dir, "validate", Some(seed), json!({ "criterion": criterion }))?;
    let outcomes = match criterion {
        Some(id) => {
            let o = validation::run_one(id, seed)
                .ok_or_else(|| Failure::usage(format!("no criterion {id}; valid ids are 1 to 12")))?;
            println!("{}", o.line());
            vec![o]
        }
        None => validation::run_all(seed, |o| println!("{}", o.line())),
    };
    session.lap("criteria");
    for o in &outcomes {
        for (name, content) in &o.artifacts {
            session.write(&format!("validation/{:02}/{name}", o.id), content)?;
        }
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("{}/{} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    session.finish()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::numeric(format!("failed criteria: {failed:?}")))
    }
}

fn oracle(cli: &Cli, a: &OracleArgs) -> Run<()> {
    let context = Path::new("oracle");
    match a.kind {
        OracleKind::CantorMeasure => {
            let mu = core(context, cantor_measure(a.depth))?;
            let mut session = Session::new(&cli.out_dir, "oracle cantor-measure", None, json!({ "depth": a.depth }))?;
            session.write(&format!("cantor_measure_{}.csv", a.depth), &mu.to_csv())?;
            println!("atoms {}", mu.len());
            session.finish()
        }
        OracleKind::CantorSet => {
            let set = core(context, cantor_set(a.depth))?;
            let mut session = Session::new(&cli.out_dir, "oracle cantor-set", None, json!({ "depth": a.depth }))?;
            session.write(&format!("cantor_set_{}.json", a.depth), &set.to_json())?;
            session.finish()
        }
        OracleKind::ArcsineCdf => {
            if a.points < 2 {
                return Err(Failure::usage("--points must be at least 2"));
            }
            let mut session = Session::new(&cli.out_dir, "oracle arcsine-cdf", None, json!({ "points": a.points }))?;
            let mut out = String::from("# format=1\nx,cdf\n");
            for i in 0..a.points {
                let x = -2.0 + 4.0 * i as f64 / (a.points - 1) as f64;
                out.push_str(&format!("{x:e},{:e}\n", arcsine_cdf(x)));
            }
            session.write("arcsine_cdf.csv", &out)?;
            session.finish()
        }
    }
}

fn run(cli: &Cli) -> Run<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::usage(format!("--jobs: {e}")))?;
    }
    match &cli.command {
        Command::MeasureDim(a) => measure_dim(cli, a),
        Command::SetDim(a) => set_dim(cli, a),
        Command::Spectral(a) => spectral(cli, a),
        Command::Profile(a) => profile(cli, a),
        Command::Classify(a) => classify(cli, a),
        Command::Experiment { kind, config } => experiment(cli, *kind, config),
        Command::Validate { criterion } => validate(cli, *criterion),
        Command::Oracle(a) => oracle(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
