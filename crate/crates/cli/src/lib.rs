//! Command-line front end: experiments from TOML configs, analytic tables,
//! density checks and SVG plots.

pub mod config;
pub mod plot;
pub mod table;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netsim::asymptotics::{
    beta_large_c, cell_edge_rate, fixed_point_oracle, optimal_reuse, predicted_rate, rate_approx,
    solve_beta_fixed_point, AsymptoticParams,
};
use netsim::montecarlo::{density_estimate, run_experiment_with_progress, DensityEstimate};
use netsim::pointproc::{HexLattice, SUPPORTED_REUSE};
use netsim::{ActivationModel, Error, ExperimentReport, NetworkConfig};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "netsim", version, about = "MMSE-receiver rates in networks with correlated interferers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo sweep described by a config file; writes the CSV report.
    Simulate(SimulateArgs),
    /// Fixed-point, large-c and quadrature values of the normalized SIR limit.
    Asymptote(AsymptoteArgs),
    /// Simulated vs predicted density of active interferers.
    Density(DensityArgs),
    /// SVG chart from a CSV written by `simulate`.
    Plot(PlotArgs),
    /// Reuse factor maximizing the reuse-normalized cell-edge rate.
    ReuseOpt(ReuseArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV destination; stdout when omitted and the config names none.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Also render the report as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AsymptoteArgs {
    /// Evaluate every sweep point of a config instead of the flags below.
    #[arg(long, conflicts_with_all = ["alpha", "rho_p", "nu", "c"])]
    pub config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    pub alpha: Option<f64>,
    #[arg(long, required_unless_present = "config")]
    pub rho_p: Option<f64>,
    /// Limiting fraction of potential interferers that transmit.
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    #[arg(long, required_unless_present = "config")]
    pub c: Option<f64>,
    /// Receive branches for the rate lines.
    #[arg(long = "branches", default_value_t = 8)]
    pub n_branches: usize,
    /// Link length; defaults to `pi rho_p r_t^2 = 1`.
    #[arg(long)]
    pub r_t: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub seeds: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Width of the edge strip excluded from counting; by default two
    /// hard-core or cluster radii, or three lattice spacings.
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV produced by `simulate`.
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReuseArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "branches")]
    pub n_branches: usize,
    #[arg(long)]
    pub rho_p: f64,
    #[arg(long)]
    pub rho_c: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    fn io(context: &Path, e: io::Error) -> Self {
        Self::new(1, format!("{}: {e}", context.display()))
    }
}

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_NO_BRACKET: u8 = 3;

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoBracket { .. } => EXIT_NO_BRACKET,
            Error::InvalidConfig(_) | Error::UnsupportedReuse { .. } | Error::Domain(_) => EXIT_INVALID_INPUT,
            _ => EXIT_FAILURE,
        };
        Self::new(code, e.to_string())
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Asymptote(args) => asymptote(args),
        Command::Density(args) => density(args),
        Command::Plot(args) => plot_cmd(args),
        Command::ReuseOpt(args) => reuse_opt(args),
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    RunConfig::load(path).map_err(|e| CliError::new(EXIT_INVALID_INPUT, format!("{}: {e}", path.display())))
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::new(EXIT_INVALID_INPUT, "--threads must be >= 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::new(EXIT_FAILURE, e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => io::stdout().write_all(bytes).map_err(|e| CliError::new(EXIT_FAILURE, e.to_string())),
    }
}

pub fn report_csv(report: &ExperimentReport) -> Vec<u8> {
    let mut buf = Vec::new();
    table::write_report(report, &mut buf).expect("writing to memory");
    buf
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let Format::Csv = args.format;
    let cfg = load_config(&args.config)?;
    if args.replications == Some(0) {
        return Err(CliError::new(EXIT_INVALID_INPUT, "--replications must be >= 1"));
    }
    let spec = cfg.experiment(args.seed, args.replications);
    eprintln!(
        "simulate: {} points x {} replications, seed {}",
        spec.points.len(),
        spec.replications,
        spec.master_seed
    );
    let report = with_threads(args.threads, || {
        run_experiment_with_progress(&spec, |done, total| {
            let p = &spec.points[done - 1];
            eprintln!("  [{done}/{total}] {} N={} {}", p.model.tag(), p.n_branches, p.model.params_label());
        })
    })??;
    for p in report.points.iter().filter(|p| p.failed()) {
        eprintln!(
            "warning: point {} ({} N={}) failed: {}",
            p.index,
            p.config.model.tag(),
            p.config.n_branches,
            p.failure.as_deref().unwrap_or_default()
        );
    }
    eprintln!("simulate: done in {:.1} s (netsim {})", report.wall_time_secs, report.code_version);

    let csv = report_csv(&report);
    let out = args.out.or(cfg.output.csv.clone());
    write_output(out.as_deref(), &csv)?;
    if out.is_some() {
        let mut summary = String::from("model   N   mean_rate  asymptote  rel_gap\n");
        for p in &report.points {
            summary.push_str(&format!(
                "{:<8}{:<4}{:<11}{:<11}{}\n",
                p.config.model.tag(),
                p.config.n_branches,
                p.rate.map(|r| format!("{:.4}", r.mean)).unwrap_or_else(|| "failed".into()),
                format!("{:.4}", p.asymptote),
                p.rel_gap.map(|g| format!("{:.4}", g)).unwrap_or_default()
            ));
        }
        print!("{summary}");
    }
    if let Some(svg_path) = args.svg.or(cfg.output.svg) {
        let rows = table::parse(std::str::from_utf8(&csv).expect("ascii csv"))
            .map_err(|e| CliError::new(EXIT_FAILURE, e.to_string()))?;
        let svg = plot::render(&rows).ok_or_else(|| CliError::new(EXIT_FAILURE, "nothing to plot"))?;
        fs::write(&svg_path, svg).map_err(|e| CliError::io(&svg_path, e))?;
    }
    Ok(())
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn asymptote_block(params: &AsymptoticParams, n_branches: usize, r_t: f64) -> Result<String, CliError> {
    let load = params.load();
    if load <= 1.0 {
        eprintln!("warning: c nu = {load} <= 1; the fixed point has no positive solution");
    }
    let fp = solve_beta_fixed_point(params)?;
    let oracle = fixed_point_oracle(params)?;
    let lc = beta_large_c(params.rho(), params.alpha);
    let rate = |beta: f64| {
        let n = n_branches as f64;
        (n.powf(params.alpha / 2.0) * r_t.powf(-params.alpha) * beta).ln_1p() / std::f64::consts::LN_2
    };
    Ok(format!(
        "alpha={} rho_p={} nu={} c={} rho={} c_nu={}\n\
         beta fixed-point  {:.10e}  (residual {:.1e})\n\
         beta large-c      {:.10e}\n\
         beta quadrature   {:.10e}\n\
         rel diff fixed-point/large-c    {:.3e}\n\
         rel diff fixed-point/quadrature {:.3e}\n\
         rel diff large-c/quadrature     {:.3e}\n\
         rate N={} r_t={:.6}: fixed-point {:.6}  large-c {:.6}  closed-form {:.6}\n",
        params.alpha,
        params.rho_p,
        params.nu,
        params.c,
        params.rho(),
        load,
        fp.beta,
        fp.residual,
        lc,
        oracle.beta,
        rel_diff(fp.beta, lc),
        rel_diff(fp.beta, oracle.beta),
        rel_diff(lc, oracle.beta),
        n_branches,
        r_t,
        rate(fp.beta),
        rate(lc),
        rate_approx(n_branches, params.rho(), params.alpha, r_t),
    ))
}

fn asymptote(args: AsymptoteArgs) -> Result<(), CliError> {
    let mut out = String::new();
    if let Some(path) = &args.config {
        let cfg = load_config(path)?;
        for point in cfg.points() {
            let params = AsymptoticParams::for_config(&point);
            out.push_str(&format!("# {} {}\n", point.model.tag(), point.model.params_label()));
            out.push_str(&asymptote_block(&params, point.n_branches, point.r_t)?);
            out.push_str(&format!("predicted mean rate {:.6}\n\n", predicted_rate(&point)));
        }
    } else {
        let (alpha, rho_p, c) = (args.alpha.unwrap_or_default(), args.rho_p.unwrap_or_default(), args.c.unwrap_or_default());
        let params = AsymptoticParams::new(rho_p, args.nu, c, alpha)?;
        let r_t = args.r_t.unwrap_or_else(|| (1.0 / (std::f64::consts::PI * rho_p)).sqrt());
        out.push_str(&asymptote_block(&params, args.n_branches, r_t)?);
    }
    write_output(args.out.as_deref(), out.as_bytes())
}

fn default_margin(model: &ActivationModel) -> Result<f64, CliError> {
    Ok(match *model {
        ActivationModel::Independent => 0.0,
        ActivationModel::HardCoreI { h } | ActivationModel::HardCoreII { h } | ActivationModel::Boolean { h, .. } => {
            2.0 * h
        }
        ActivationModel::Cellular { rho_c, kappa, .. } => 3.0 * HexLattice::new(rho_c, kappa)?.spacing(),
    })
}

fn density_line(cfg: &NetworkConfig, est: &DensityEstimate) -> String {
    let band = 3.0 * est.sigma;
    format!(
        "{:<11} {:<40} R={:<10.2} predicted={:.9e} simulated={:.9e} rel_err={:+.3e} 3sigma=[{:.9e}, {:.9e}] z={:+.2} {}\n",
        cfg.model.tag(),
        cfg.model.params_label(),
        cfg.radius(),
        est.predicted,
        est.empirical,
        est.rel_error(),
        est.predicted - band,
        est.predicted + band,
        est.z_score(),
        if est.within(3.0) { "ok" } else { "OUTSIDE" }
    )
}

fn density(args: DensityArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let seed = args.seed.unwrap_or(cfg.experiment.seed);
    // the largest network of each model
    let mut targets: Vec<NetworkConfig> = Vec::new();
    for point in cfg.points() {
        match targets.iter_mut().find(|t| t.model == point.model) {
            Some(t) if t.radius() < point.radius() => *t = point,
            Some(_) => {}
            None => targets.push(point),
        }
    }
    let mut out = String::new();
    let mut outside = 0;
    for target in &targets {
        let margin = match args.margin {
            Some(m) => m,
            None => default_margin(&target.model)?,
        };
        eprintln!("density: {} R={:.1} over {} seeds", target.model.tag(), target.radius(), args.seeds);
        let est = with_threads(args.threads, || density_estimate(target, args.seeds, seed, margin))??;
        if !est.within(3.0) {
            outside += 1;
        }
        out.push_str(&density_line(target, &est));
    }
    write_output(args.out.as_deref(), out.as_bytes())?;
    if outside > 0 {
        return Err(CliError::new(EXIT_FAILURE, format!("{outside} density estimate(s) outside the 3-sigma band")));
    }
    Ok(())
}

fn plot_cmd(args: PlotArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let rows = table::parse(&text)
        .map_err(|e| CliError::new(EXIT_INVALID_INPUT, format!("{}: {e}", args.input.display())))?;
    let svg = plot::render(&rows)
        .ok_or_else(|| CliError::new(EXIT_INVALID_INPUT, format!("{}: no plottable values", args.input.display())))?;
    fs::write(&args.out, svg).map_err(|e| CliError::io(&args.out, e))
}

fn reuse_opt(args: ReuseArgs) -> Result<(), CliError> {
    let kappa_star = optimal_reuse(args.alpha, args.n_branches, args.rho_p, args.rho_c)?;
    let mut out = format!(
        "alpha={} N={} rho_p={} rho_c={}\nkappa* = {:.6}\n",
        args.alpha, args.n_branches, args.rho_p, args.rho_c, kappa_star
    );
    let mut best = (0, f64::NEG_INFINITY);
    for kappa in SUPPORTED_REUSE {
        let k = f64::from(kappa);
        let normalized = cell_edge_rate(args.n_branches, k, args.alpha, args.rho_p, args.rho_c, true) / k;
        out.push_str(&format!("kappa={kappa} reuse-normalized power-controlled cell-edge rate {normalized:.6}\n"));
        if normalized > best.1 {
            best = (kappa, normalized);
        }
    }
    out.push_str(&format!("best supported kappa = {}\n", best.0));
    write_output(args.out.as_deref(), out.as_bytes())
}
