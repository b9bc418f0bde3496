//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Exits 0 after reporting so that known, documented shortfalls do not hide
//! the rest of the workspace tests; set `ACCEPTANCE_STRICT=1` to turn any
//! FAIL into a nonzero exit. Plot and CSV artifacts of the figure runs are
//! written to `target/acceptance/`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use netsim::asymptotics::{
    beta_large_c, fixed_point_oracle, gauss_2f1, lambert_w0, optimal_reuse, solve_beta_fixed_point,
    AsymptoticParams,
};
use netsim::montecarlo::{
    aip_statistic, density_estimate, edf_ks_distance, min_eigenvalue_bound, normalized_min_eigenvalue,
    run_experiment, stream_rng, summarize, ExperimentSpec,
};
use netsim::{ActivationModel, ExperimentReport, NetworkConfig, PointReport};
use netsim_cli::config::RunConfig;
use netsim_cli::{plot, report_csv, table};

const FP_ORACLE_REL_TOL: f64 = 1e-6;
const FP_GRID_SECONDS: f64 = 10.0;
const LARGE_C: f64 = 1e6;
const LARGE_C_REL_TOL: f64 = 0.005;
const LARGE_C_SECONDS: f64 = 1.0;
const HC_GAP_TOL: f64 = 0.06;
const CELL_GAP_TOL: f64 = 0.03;
const CELL_GAP_MIN_N: usize = 6;
const CELL_STD_TOL: f64 = 0.05;
const CELL_STD_MIN_N: usize = 10;
const PC_GAIN_RANGE: (f64, f64) = (0.25, 0.55);
const REUSE_MIN_N: usize = 8;
const BOOL_GAP_TOL_6: f64 = 0.05;
const BOOL_GAP_TOL_8: f64 = 0.03;
const BOOL_STD_TOL: f64 = 0.10;
const BOOL_STD_MIN_N: usize = 12;
const DENSITY_K_SIGMA: f64 = 3.0;
const DENSITY_SEEDS: usize = 200;
const DENSITY_R_OVER_H: f64 = 100.0;
const DENSITY_SECONDS: f64 = 60.0;
const PFAFF_TOL: f64 = 1e-10;
const LAMBERT_TOL: f64 = 1e-12;
const KAPPA_STAR_TOL: f64 = 0.15;
const EIGEN_SEEDS: usize = 500;
const EIGEN_N: usize = 2000;
const EIGEN_PASS_FRACTION: f64 = 0.99;
const EIGEN_DELTA: f64 = 2.0;
const AIP_SHRINK: f64 = 2.0;

const SEED: u64 = 1;
const RHO_P: f64 = 0.01;

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    details: Vec<String>,
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().expect("workspace root")
}

fn artifacts() -> PathBuf {
    let dir = workspace_root().join("target/acceptance");
    std::fs::create_dir_all(&dir).expect("artifact dir");
    dir
}

fn load(name: &str) -> RunConfig {
    RunConfig::load(&workspace_root().join("configs").join(name)).expect("shipped config parses")
}

fn r_t() -> f64 {
    (1.0 / (PI * RHO_P)).sqrt()
}

fn run(points: Vec<NetworkConfig>, replications: usize, seed: u64) -> ExperimentReport {
    run_experiment(&ExperimentSpec { points, replications, master_seed: seed }).expect("valid experiment")
}

fn save(report: &ExperimentReport, stem: &str) {
    let csv = report_csv(report);
    let dir = artifacts();
    std::fs::write(dir.join(format!("{stem}.csv")), &csv).expect("write csv");
    let rows = table::parse(std::str::from_utf8(&csv).unwrap()).expect("own csv parses");
    if let Some(svg) = plot::render(&rows) {
        std::fs::write(dir.join(format!("{stem}.svg")), svg).expect("write svg");
    }
}

fn signed_gap(p: &PointReport) -> f64 {
    (p.rate.expect("point ran").mean - p.asymptote) / p.asymptote
}

fn std_frac(p: &PointReport) -> f64 {
    p.rate.and_then(|r| r.std).unwrap_or(f64::NAN) / p.asymptote
}

fn point_line(p: &PointReport) -> String {
    let r = p.rate.expect("point ran");
    format!(
        "{} {} N={:<2} mean={:.4} sem={:.4} asymptote={:.4} gap={:+.4} ({:+.1} sem) std/asym={:.4}",
        p.config.model.tag(),
        p.config.model.params_label(),
        p.config.n_branches,
        r.mean,
        r.sem(),
        p.asymptote,
        signed_gap(p),
        (r.mean - p.asymptote) / r.sem(),
        std_frac(p)
    )
}

fn c1_fixed_point_grid() -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0f64, String::new());
    let mut errors = Vec::new();
    for alpha in [2.5, 3.0, 4.0, 6.0] {
        for nu in [0.3, 0.6, 1.0] {
            for c in [5.0, 50.0, 500.0] {
                let params = AsymptoticParams::new(RHO_P, nu, c, alpha).unwrap();
                match (solve_beta_fixed_point(&params), fixed_point_oracle(&params)) {
                    (Ok(fp), Ok(or)) => {
                        let rel = (fp.beta - or.beta).abs() / or.beta;
                        if rel >= worst.0 {
                            worst = (rel, format!("alpha={alpha} nu={nu} c={c}: {:.10e} vs {:.10e}", fp.beta, or.beta));
                        }
                    }
                    (a, b) => errors.push(format!("alpha={alpha} nu={nu} c={c}: {:?} / {:?}", a.err(), b.err())),
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mut details = vec![
        format!("worst relative difference {:.2e} (tolerance {FP_ORACLE_REL_TOL:e}) at {}", worst.0, worst.1),
        format!("36 grid points in {secs:.2} s (limit {FP_GRID_SECONDS} s)"),
    ];
    details.extend(errors.iter().cloned());
    Outcome {
        id: "1",
        title: "fixed point agrees with the quadrature oracle",
        pass: errors.is_empty() && worst.0 <= FP_ORACLE_REL_TOL && secs < FP_GRID_SECONDS,
        details,
    }
}

fn c2_large_c() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    for alpha in [2.5, 3.0, 4.0, 6.0] {
        for nu in [0.3, 0.6, 1.0] {
            let params = AsymptoticParams::new(RHO_P, nu, LARGE_C, alpha).unwrap();
            let fp = solve_beta_fixed_point(&params).map(|s| s.beta).unwrap_or(f64::NAN);
            let lc = beta_large_c(params.rho(), alpha);
            let rel = (fp - lc).abs() / lc;
            pass &= rel <= LARGE_C_REL_TOL;
            if nu == 1.0 {
                details.push(format!("alpha={alpha} nu={nu}: fixed point {fp:.6e}, large-c {lc:.6e}, rel {rel:.2e}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < LARGE_C_SECONDS;
    details.push(format!("tolerance {LARGE_C_REL_TOL}, all nu in {{0.3, 0.6, 1}} checked; {secs:.3} s (limit {LARGE_C_SECONDS} s)"));
    Outcome { id: "2", title: "large-c limit of the fixed point", pass, details }
}

fn hc_figure(id: &'static str, title: &'static str, config: &str, stem: &str) -> (Outcome, ExperimentReport) {
    let cfg = load(config);
    let report = run(cfg.points(), cfg.experiment.replications, SEED);
    save(&report, stem);
    let mut pass = true;
    let mut details = Vec::new();
    for p in &report.points {
        let ok = !p.failed() && signed_gap(p).abs() <= HC_GAP_TOL;
        pass &= ok;
        details.push(format!("{} {}", if ok { "ok  " } else { "MISS" }, point_line(p)));
    }
    details.push(format!("tolerance {HC_GAP_TOL} for every N >= 2, {} replications, seed {SEED}", cfg.experiment.replications));
    (Outcome { id, title, pass, details }, report)
}

fn c4_hc2() -> Outcome {
    let (mut outcome, _) = hc_figure("4", "HC-II mean rate within tolerance; scatter concentrates", "hc2_sweep.toml", "hc2_sweep");
    for h_over_rt in [0.5, 1.0] {
        let base = NetworkConfig {
            rho_p: RHO_P,
            alpha: 4.0,
            n_branches: 4,
            c: 50.0,
            r_t: r_t(),
            model: ActivationModel::HardCoreII { h: h_over_rt * r_t() },
        };
        let report = run(vec![base.with_branches(4), base.with_branches(16)], 100, SEED);
        let s4 = report.points[0].rate.unwrap().std.unwrap();
        let s16 = report.points[1].rate.unwrap().std.unwrap();
        outcome.pass &= s16 < s4;
        outcome.details.push(format!("scatter over 100 seeds, h={h_over_rt} r_t: std N=4 {s4:.4}, N=16 {s16:.4}"));
    }
    outcome
}

fn c5_cellular() -> Outcome {
    let cfg = load("cellular_sweep.toml");
    let points: Vec<NetworkConfig> = cfg
        .points()
        .into_iter()
        .filter(|p| matches!(p.model, ActivationModel::Cellular { rho_c, .. } if (rho_c - 0.1 * RHO_P).abs() < 1e-12))
        .collect();
    let report = run(points, cfg.experiment.replications, SEED);
    save(&report, "cellular_sweep_rho_c_0.1");
    let mut pass = true;
    let mut details = Vec::new();
    for p in &report.points {
        let n = p.config.n_branches;
        let gap_ok = n < CELL_GAP_MIN_N || signed_gap(p).abs() <= CELL_GAP_TOL;
        let std_ok = n < CELL_STD_MIN_N || std_frac(p) <= CELL_STD_TOL;
        pass &= !p.failed() && gap_ok && std_ok && p.redraw_total == 0;
        details.push(format!("{} {} redraws={}", if gap_ok && std_ok { "ok  " } else { "MISS" }, point_line(p), p.redraw_total));
    }
    details.push(format!(
        "gap tolerance {CELL_GAP_TOL} for N >= {CELL_GAP_MIN_N}; std <= {CELL_STD_TOL} of asymptote for N >= {CELL_STD_MIN_N}; c = {}",
        report.points[0].config.c
    ));
    Outcome { id: "5", title: "cellular uplink mean and spread", pass, details }
}

fn c6_cell_edge() -> Outcome {
    let cfg = load("cell_edge.toml");
    let report = run(cfg.points(), cfg.experiment.replications, SEED);
    save(&report, "cell_edge");
    let find = |kappa: u32, pc: bool, n: usize| -> f64 {
        report
            .points
            .iter()
            .find(|p| {
                p.config.n_branches == n
                    && matches!(p.config.model, ActivationModel::Cellular { kappa: k, power_control, .. } if k == kappa && power_control == pc)
            })
            .and_then(|p| p.rate.map(|r| r.mean))
            .expect("point present")
    };
    let mut pass = true;
    let mut details = Vec::new();
    for kappa in [1, 3] {
        let gain = find(kappa, true, 16) / find(kappa, false, 16) - 1.0;
        let ok = (PC_GAIN_RANGE.0..=PC_GAIN_RANGE.1).contains(&gain);
        pass &= ok;
        details.push(format!(
            "kappa={kappa} N=16: power control {:.4} vs {:.4}, gain {:+.1}% (range {:.0}-{:.0}%)",
            find(kappa, true, 16),
            find(kappa, false, 16),
            100.0 * gain,
            100.0 * PC_GAIN_RANGE.0,
            100.0 * PC_GAIN_RANGE.1
        ));
    }
    for n in cfg.network.branches.iter().copied().filter(|&n| n >= REUSE_MIN_N) {
        let (k1, k3) = (find(1, true, n), find(3, true, n) / 3.0);
        pass &= k1 > k3;
        details.push(format!("N={n}: reuse-normalized power-controlled rate kappa=1 {k1:.4} vs kappa=3 {k3:.4}"));
    }
    Outcome { id: "6", title: "cell-edge power-control gain and reuse ordering", pass, details }
}

fn c7_boolean() -> Outcome {
    let cfg = load("boolean_sweep.toml");
    let points: Vec<NetworkConfig> = cfg
        .points()
        .into_iter()
        .filter(|p| matches!(p.model, ActivationModel::Boolean { rho_b, h } if (rho_b * PI * h * h - 1.0).abs() < 1e-9))
        .collect();
    let report = run(points, cfg.experiment.replications, SEED);
    save(&report, "boolean_sweep_coverage_1");
    let mut pass = true;
    let mut details = Vec::new();
    for p in &report.points {
        let n = p.config.n_branches;
        let gap = signed_gap(p).abs();
        let gap_ok = match n {
            n if n >= 8 => gap <= BOOL_GAP_TOL_8,
            n if n >= 6 => gap <= BOOL_GAP_TOL_6,
            _ => true,
        };
        let std_ok = n < BOOL_STD_MIN_N || std_frac(p) <= BOOL_STD_TOL;
        pass &= !p.failed() && gap_ok && std_ok;
        details.push(format!("{} {}", if gap_ok && std_ok { "ok  " } else { "MISS" }, point_line(p)));
    }
    details.push(format!(
        "gap tolerance {BOOL_GAP_TOL_6} for N >= 6, {BOOL_GAP_TOL_8} for N >= 8; std <= {BOOL_STD_TOL} of asymptote for N >= {BOOL_STD_MIN_N}"
    ));
    Outcome { id: "7", title: "Boolean cluster mean and spread", pass, details }
}

fn c8_densities() -> Outcome {
    let start = Instant::now();
    let h = r_t();
    let rho_c = 0.1 * RHO_P;
    let spacing = netsim::pointproc::HexLattice::new(rho_c, 3).unwrap().spacing();
    // network sized so that R >= 100 times the model's length scale
    let sized = |model: ActivationModel, scale: f64| {
        let n_branches = 20;
        let c = (PI * RHO_P * (DENSITY_R_OVER_H * scale).powi(2) / n_branches as f64).ceil();
        NetworkConfig { rho_p: RHO_P, alpha: 4.0, n_branches, c, r_t: h, model }
    };
    let cases = [
        ("HC-I", sized(ActivationModel::HardCoreI { h }, h), 2.0 * h),
        ("HC-II", sized(ActivationModel::HardCoreII { h }, h), 2.0 * h),
        ("cellular", sized(ActivationModel::Cellular { rho_c, kappa: 3, power_control: false }, spacing), 3.0 * spacing),
        ("Boolean", sized(ActivationModel::Boolean { rho_b: RHO_P, h }, h), 2.0 * h),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (label, cfg, margin) in cases {
        let est = density_estimate(&cfg, DENSITY_SEEDS, SEED, margin).expect("density estimate");
        let ok = est.within(DENSITY_K_SIGMA);
        pass &= ok;
        details.push(format!(
            "{} {label}: R={:.0} simulated {:.6e} predicted {:.6e} sigma {:.2e} z={:+.2}",
            if ok { "ok  " } else { "MISS" },
            cfg.radius(),
            est.empirical,
            est.predicted,
            est.sigma,
            est.z_score()
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < DENSITY_SECONDS;
    details.push(format!("{DENSITY_SEEDS} seeds per model, {DENSITY_K_SIGMA} sigma band, {secs:.1} s (limit {DENSITY_SECONDS} s)"));
    Outcome { id: "8", title: "limiting densities of active interferers", pass, details }
}

fn c9_special() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();

    let z0 = gauss_2f1(0.3, 0.7, 1.9, 0.0).unwrap();
    pass &= z0 == 1.0;
    let mut log_err = 0.0f64;
    for z in [-3.0, -0.7, -0.2, 0.3, 0.5, 0.75, 0.95, 0.999] {
        let expect = -(1.0f64 - z).ln() / z;
        log_err = log_err.max((gauss_2f1(1.0, 1.0, 2.0, z).unwrap() - expect).abs() / expect);
    }
    pass &= log_err <= PFAFF_TOL;
    let gauss = gauss_2f1(0.5, 0.5, 1.5, 1.0).unwrap();
    let gauss_err = (gauss - PI / 2.0).abs() / (PI / 2.0);
    pass &= gauss_err <= PFAFF_TOL;
    details.push(format!("z=0 gives {z0}; log identity max rel error {log_err:.1e}; 2F1 at z=1 (alpha=4) - pi/2 rel {gauss_err:.1e}"));

    let mut pfaff_err = 0.0f64;
    for alpha in [2.5, 3.0, 4.0, 6.0] {
        let (a, b, c) = (1.0 - 2.0 / alpha, 1.0 - 2.0 / alpha, 2.0 - 2.0 / alpha);
        for z in [-5.0, -1.0, -0.3, 0.2, 0.45, 0.7, 0.9, 0.99] {
            let direct = gauss_2f1(a, b, c, z).unwrap();
            let pfaff = (1.0f64 - z).powf(-a) * gauss_2f1(a, c - b, c, z / (z - 1.0)).unwrap();
            pfaff_err = pfaff_err.max((direct - pfaff).abs() / direct.abs());
        }
    }
    pass &= pfaff_err <= PFAFF_TOL;
    details.push(format!("Pfaff round trip on the fixed-point family: max rel error {pfaff_err:.1e} (tolerance {PFAFF_TOL:e})"));

    let mut w_err = 0.0f64;
    let branch = -(-1.0f64).exp();
    for z in [branch * 0.999_999, -0.3, -0.1, 1e-6, 0.5, 1.0, 3.0, 10.0, 1e3, 1e8] {
        let w = lambert_w0(z).unwrap();
        w_err = w_err.max((w * w.exp() - z).abs() / z.abs());
    }
    pass &= w_err <= LAMBERT_TOL;
    details.push(format!("Lambert W0 round trip max rel error {w_err:.1e} (tolerance {LAMBERT_TOL:e})"));

    let kappa = optimal_reuse(2.5, 4, RHO_P, 0.1 * RHO_P).unwrap();
    pass &= (kappa - 1.0).abs() <= KAPPA_STAR_TOL;
    details.push(format!("optimal reuse at alpha=2.5, N=4, rho_c/rho_p=0.1: {kappa:.4} (target 1 +- {KAPPA_STAR_TOL})"));
    Outcome { id: "9", title: "special functions and optimal reuse", pass, details }
}

fn c10_properties() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    let h = r_t();
    let hc2 = NetworkConfig { rho_p: RHO_P, alpha: 4.0, n_branches: 4, c: 50.0, r_t: h, model: ActivationModel::HardCoreII { h } };

    // R doubles when N quadruples at fixed c
    let mut ks = Vec::new();
    for n in [4, 16, 64] {
        let cfg = hc2.with_branches(n);
        let d: Vec<f64> = (0..50).map(|s| edf_ks_distance(&cfg, &mut stream_rng(SEED, 0, s)).unwrap()).collect();
        ks.push((cfg.radius(), summarize(&d).unwrap().mean));
    }
    let ks_ok = ks.windows(2).all(|w| w[1].1 < w[0].1);
    pass &= ks_ok;
    details.push(format!(
        "(a) HC-II mean KS distance over 50 seeds: {}",
        ks.iter().map(|(r, d)| format!("R={r:.1}: {d:.5}")).collect::<Vec<_>>().join(", ")
    ));

    let cfg = NetworkConfig { n_branches: 40, ..hc2.clone() };
    assert_eq!(cfg.potential_count(), EIGEN_N);
    let bound = min_eigenvalue_bound(&AsymptoticParams::for_config(&cfg), EIGEN_DELTA).unwrap();
    let above = (0..EIGEN_SEEDS as u32)
        .filter(|&s| normalized_min_eigenvalue(&cfg, &mut stream_rng(SEED, 1, s)).unwrap() > bound)
        .count();
    let frac = above as f64 / EIGEN_SEEDS as f64;
    pass &= frac >= EIGEN_PASS_FRACTION;
    details.push(format!(
        "(b) HC-II n={EIGEN_N}, N=40: lambda_min above bound {bound:.3e} (delta={EIGEN_DELTA}) in {above}/{EIGEN_SEEDS} seeds"
    ));

    let hc1 = NetworkConfig { model: ActivationModel::HardCoreI { h: 0.5 * h }, ..hc2 };
    let (x0, s0) = aip_statistic(&hc1.with_branches(4), 200, SEED).unwrap();
    let (x1, s1) = aip_statistic(&hc1.with_branches(64), 200, SEED).unwrap();
    let shrink = s0 / s1;
    pass &= shrink >= AIP_SHRINK;
    details.push(format!(
        "(c) HC-I AIP statistic at the median: R0 {s0:.3e} (x={x0:.3e}), 4R0 {s1:.3e} (x={x1:.3e}), shrink {shrink:.1}x (need {AIP_SHRINK}x)"
    ));
    Outcome { id: "10", title: "limit-theorem property checks", pass, details }
}

fn c11_determinism(in_process: &ExperimentReport) -> Outcome {
    let exe = env!("CARGO_BIN_EXE_netsim");
    let dir = artifacts();
    let config = workspace_root().join("configs/hc1_sweep.toml");
    let mut outputs = Vec::new();
    let mut details = Vec::new();
    for threads in [1, 4] {
        let csv = dir.join(format!("determinism_threads_{threads}.csv"));
        let svg = dir.join(format!("determinism_threads_{threads}.svg"));
        let status = Command::new(exe)
            .args(["simulate", "--config"])
            .arg(&config)
            .args(["--seed", &SEED.to_string(), "--threads", &threads.to_string(), "--out"])
            .arg(&csv)
            .arg("--svg")
            .arg(&svg)
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .expect("run netsim");
        details.push(format!("--threads {threads}: exit {:?}", status.code()));
        outputs.push(std::fs::read(&csv).unwrap_or_default());
    }
    let library = report_csv(in_process);
    let pass = !outputs[0].is_empty() && outputs[0] == outputs[1] && outputs[0] == library;
    details.push(format!(
        "CSV bytes: threads 1 = threads 4: {}; CLI = in-process run: {} ({} bytes)",
        outputs[0] == outputs[1],
        outputs[0] == library,
        outputs[0].len()
    ));
    Outcome { id: "11", title: "byte-identical CSV regardless of thread count", pass, details }
}

fn main() {
    let start = Instant::now();
    let mut outcomes = Vec::new();
    let mut emit = |o: Outcome| {
        println!("{} criterion {:>2}: {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.title);
        for d in &o.details {
            println!("      {d}");
        }
        outcomes.push(o.pass);
    };
    emit(c1_fixed_point_grid());
    emit(c2_large_c());
    let (c3, hc1_report) = hc_figure("3", "HC-I mean rate within tolerance of the asymptote", "hc1_sweep.toml", "hc1_sweep");
    emit(c3);
    emit(c4_hc2());
    emit(c5_cellular());
    emit(c6_cell_edge());
    emit(c7_boolean());
    emit(c8_densities());
    emit(c9_special());
    emit(c10_properties());
    emit(c11_determinism(&hc1_report));

    let failed = outcomes.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        outcomes.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
