//! Batch front end: invariance checks, stability certificates, nominal
//! trajectories, simulations, parameter sweeps, and Floquet analysis over
//! network files.
//!
//! Exit codes: 0 success / certified, 1 failed check or no certificate,
//! 2 malformed input or unsupported request.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};

use cluster_sync::graph::build_spanning_structure;
use cluster_sync::io::NetworkFile;
use cluster_sync::network::{run_checks, Network, Partition};
use cluster_sync::nominal::NominalTrajectory;
use cluster_sync::simulate::{
    floquet_two_cluster, integrate, monte_carlo_stability, SimConfig,
};
use cluster_sync::stability::{
    frequency_certificate, homogeneous_intra_certificate, jacobian_intra, m_matrix_certificate,
    Regime,
};
use cluster_sync::{scenarios, Error, Tolerances};

#[derive(Parser)]
#[command(
    name = "cluster-sync",
    version,
    about = "Certify and simulate cluster synchronization in Kuramoto networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct CommonOpts {
    /// Seed for all random draws.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Fixed integration step in seconds.
    #[arg(long, global = true, default_value_t = 1e-3)]
    dt: f64,
    /// Integration horizon in seconds.
    #[arg(long, global = true, default_value_t = 30.0)]
    horizon: f64,
    /// Relative tolerance of the inter-cluster weight balance check.
    #[arg(long, global = true)]
    tol_weights: Option<f64>,
    /// Absolute tolerance of within-cluster frequency equality.
    #[arg(long, global = true)]
    tol_freq: Option<f64>,
    /// Hurwitz margin on eigenvalue real parts.
    #[arg(long, global = true)]
    tol_hurwitz: Option<f64>,
    /// Floquet multiplier margin (stable below 1 - tol).
    #[arg(long, global = true)]
    tol_floquet: Option<f64>,
    /// Relative tolerance for detecting the critical regime.
    #[arg(long, global = true)]
    tol_critical: Option<f64>,
    /// Relative tolerance of the homogeneous-intra test.
    #[arg(long, global = true)]
    tol_homogeneous: Option<f64>,
    /// Monte Carlo contraction factor required for a "stable" verdict.
    #[arg(long, global = true, default_value_t = 0.1)]
    mc_contraction: f64,
}

impl CommonOpts {
    fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(v) = self.tol_weights {
            t.weights_rel = v;
        }
        if let Some(v) = self.tol_freq {
            t.freq = v;
        }
        if let Some(v) = self.tol_hurwitz {
            t.hurwitz = v;
        }
        if let Some(v) = self.tol_floquet {
            t.floquet = v;
        }
        if let Some(v) = self.tol_critical {
            t.critical_rel = v;
        }
        if let Some(v) = self.tol_homogeneous {
            t.homogeneous_rel = v;
        }
        t
    }

    fn sim_config(&self) -> SimConfig {
        SimConfig {
            dt: self.dt,
            horizon: self.horizon,
            seed: self.seed,
            contraction: self.mc_contraction,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a network file and run the invariance checks.
    Check {
        input: PathBuf,
    },
    /// Run the stability certificates and print a report.
    Analyze {
        input: PathBuf,
        /// Scale all intra-cluster weights by this factor.
        #[arg(long)]
        alpha: Option<f64>,
        /// Scale all inter-cluster weights by this factor.
        #[arg(long)]
        beta: Option<f64>,
        /// Write the incidence and intra-map matrices as CSV into this
        /// directory.
        #[arg(long, value_name = "DIR")]
        dump_structure: Option<PathBuf>,
        /// Write a machine-readable JSON report.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Emit the closed-form nominal inter-cluster trajectory as CSV.
    Nominal {
        /// Two-cluster network file supplying omega_bar and a_bar.
        input: Option<PathBuf>,
        /// Frequency difference (overrides the input file).
        #[arg(long)]
        omega_bar: Option<f64>,
        /// Total inter-cluster coupling (overrides the input file).
        #[arg(long)]
        a_bar: Option<f64>,
        /// Initial inter-cluster difference in radians.
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Integrate the network and emit the trajectory as CSV.
    Simulate {
        input: PathBuf,
        /// Half-width of the uniform random perturbation of the
        /// synchronized initial state, in radians.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        /// Keep every k-th sample.
        #[arg(long, default_value_t = 1)]
        record_every: usize,
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Sweep a parameter and emit certificate / Floquet verdicts as CSV.
    Sweep {
        input: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        points: usize,
        /// Space the grid geometrically instead of linearly.
        #[arg(long)]
        log: bool,
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Floquet multipliers of the two-cluster transverse dynamics.
    Floquet {
        input: PathBuf,
    },
    /// Write the bundled benchmark networks as input files.
    Scenarios {
        #[arg(long, default_value = "scenarios")]
        dir: PathBuf,
    },
    /// Monte Carlo perturbation experiment; emits the distance envelope.
    MonteCarlo {
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Half-width of the uniform initial perturbation in radians.
        #[arg(long, default_value_t = 0.01)]
        perturb: f64,
        /// Keep every k-th sample.
        #[arg(long, default_value_t = 100)]
        record_every: usize,
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    /// Scale factor on intra-cluster weights.
    #[value(alias = "intra")]
    Alpha,
    /// Scale factor on inter-cluster weights.
    #[value(alias = "inter")]
    Beta,
    /// Frequency difference between the two clusters.
    #[value(alias = "wbar")]
    OmegaBar,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::AssumptionViolated(_) => 1,
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

fn load(path: &Path) -> Result<(Network, Partition), Error> {
    NetworkFile::load(path)?.to_model()
}

fn run(cli: &Cli) -> Result<i32, Error> {
    let tols = cli.common.tolerances();
    match &cli.command {
        Command::Check { input } => cmd_check(input, &tols),
        Command::Analyze { input, alpha, beta, dump_structure, report } => {
            cmd_analyze(input, *alpha, *beta, dump_structure.as_deref(), report.as_deref(), &tols)
        }
        Command::Nominal { input, omega_bar, a_bar, x0, output } => cmd_nominal(
            input.as_deref(),
            *omega_bar,
            *a_bar,
            *x0,
            output.as_deref(),
            &cli.common,
            &tols,
        ),
        Command::Simulate { input, perturb, record_every, output } => {
            cmd_simulate(input, *perturb, *record_every, output.as_deref(), &cli.common)
        }
        Command::Sweep { input, param, from, to, points, log, output } => cmd_sweep(
            input,
            *param,
            *from,
            *to,
            *points,
            *log,
            output.as_deref(),
            &tols,
        ),
        Command::Floquet { input } => cmd_floquet(input, &tols),
        Command::Scenarios { dir } => {
            let paths = scenarios::write_all(dir)?;
            for p in &paths {
                println!("wrote {}", p.display());
            }
            Ok(0)
        }
        Command::MonteCarlo { input, trials, perturb, record_every, output } => cmd_monte_carlo(
            input,
            *trials,
            *perturb,
            *record_every,
            output.as_deref(),
            &cli.common,
        ),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_check(input: &Path, tols: &Tolerances) -> Result<i32, Error> {
    let (net, part) = load(input)?;
    let violations = net.validate();
    for v in &violations {
        println!("network violation: {v}");
    }
    let report = run_checks(&net, &part, tols)?;
    println!("uniform cluster frequencies: {}", yes_no(report.uniform_frequencies));
    println!(
        "equitable inter-cluster weights: {} (worst violation {:e})",
        yes_no(report.equitable_weights),
        report.weight_worst_violation
    );
    println!("submanifold exclusion margins:");
    for p in &report.pair_margins {
        println!(
            "  clusters ({}, {}): margin {:.6} ({})",
            p.a + 1,
            p.b + 1,
            p.margin,
            if p.margin > 0.0 { "excluded" } else { "inconclusive" }
        );
    }
    let ok = violations.is_empty() && report.uniform_frequencies && report.equitable_weights;
    println!("check: {}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { 0 } else { 1 })
}

fn apply_scaling(
    net: &Network,
    part: &Partition,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> Network {
    match (alpha, beta) {
        (None, None) => net.clone(),
        (a, b) => net.scale_weights(part, a.unwrap_or(1.0), b.unwrap_or(1.0)),
    }
}

fn cmd_analyze(
    input: &Path,
    alpha: Option<f64>,
    beta: Option<f64>,
    dump: Option<&Path>,
    report_path: Option<&Path>,
    tols: &Tolerances,
) -> Result<i32, Error> {
    let (net0, part) = load(input)?;
    let net = apply_scaling(&net0, &part, alpha, beta);
    let structure = build_spanning_structure(&net, &part)?;
    if let Some(dir) = dump {
        dump_structure(dir, &structure)?;
        println!("structure matrices written to {}", dir.display());
    }

    let checks = run_checks(&net, &part, tols)?;
    println!(
        "network: {} nodes, {} edges, {} clusters",
        net.n(),
        structure.edges().len(),
        part.m()
    );
    println!(
        "checks: frequencies uniform: {} | weights equitable: {} (worst {:e})",
        yes_no(checks.uniform_frequencies),
        yes_no(checks.equitable_weights),
        checks.weight_worst_violation
    );

    let mm = m_matrix_certificate(&net, &part, tols)?;
    println!("M-matrix certificate:");
    let inv_lmax: Vec<f64> = mm.lambda_max.iter().map(|l| 1.0 / l).collect();
    println!("  1/lambda_max(X_k): {}", fmt_vec(&inv_lmax));
    println!("  S = {}", fmt_matrix(&mm.s));
    println!("  leading principal minors: {}", fmt_vec(&mm.leading_minors));
    println!("  M-matrix: {}", yes_no(mm.is_m_matrix));

    let mut certified = mm.is_m_matrix;
    let mut freq = None;
    let mut homog = None;
    if part.m() == 2 {
        let cert = frequency_certificate(&net, &part, tols)?;
        println!("two-cluster analysis:");
        println!(
            "  omega_bar = {}, a_bar = {}, regime: {}",
            cert.omega_bar, cert.a_bar, cert.regime
        );
        match cert.regime {
            Regime::LimitCycle => println!(
                "  frequency certificate: lhs {:.6e} vs rhs {:.6e}: {}",
                cert.lhs,
                cert.rhs,
                if cert.holds { "holds" } else { "does not hold" }
            ),
            _ => println!("  frequency certificate: not applicable in this regime"),
        }
        let intra = jacobian_intra(&net, &part, &structure, tols)?;
        let h = homogeneous_intra_certificate(&intra, tols);
        println!(
            "  homogeneous intra test: alpha = {:.6}, deviation {:.3e}: {}",
            h.alpha,
            h.deviation,
            yes_no(h.holds)
        );
        certified = certified || cert.holds || h.holds;
        freq = Some(cert);
        homog = Some(h);
    }
    println!(
        "verdict: {}",
        if certified { "certified locally exponentially stable" } else { "inconclusive" }
    );

    if let Some(path) = report_path {
        let json = serde_json::json!({
            "input": input.display().to_string(),
            "intra_scale": alpha,
            "inter_scale": beta,
            "checks": checks,
            "m_matrix": {
                "lambda_max": mm.lambda_max,
                "s": matrix_rows(&mm.s),
                "leading_minors": mm.leading_minors,
                "holds": mm.is_m_matrix,
            },
            "frequency": freq.as_ref().map(|c| serde_json::json!({
                "omega_bar": c.omega_bar,
                "a_bar": c.a_bar,
                "regime": c.regime.to_string(),
                "j_inter_norm": c.j_inter_norm,
                "j_intra_norm": c.j_intra_norm,
                "lambda_max_x": c.lambda_max_x,
                "lhs": c.lhs,
                "rhs": c.rhs,
                "holds": c.holds,
            })),
            "homogeneous_intra": homog,
            "certified": certified,
        });
        std::fs::write(path, format!("{:#}\n", json))?;
        println!("report written to {}", path.display());
    }
    Ok(if certified { 0 } else { 1 })
}

fn cmd_nominal(
    input: Option<&Path>,
    omega_bar: Option<f64>,
    a_bar: Option<f64>,
    x0: f64,
    output: Option<&Path>,
    common: &CommonOpts,
    tols: &Tolerances,
) -> Result<i32, Error> {
    let (omega_bar, a_bar) = match (omega_bar, a_bar) {
        (Some(w), Some(a)) => (w, a),
        _ => {
            let path = input.ok_or_else(|| {
                Error::Unsupported(
                    "give --omega-bar and --a-bar, or an input file to take them from".into(),
                )
            })?;
            let (net, part) = load(path)?;
            let (w, a) = cluster_sync::stability::two_cluster_rates(&net, &part)?;
            (omega_bar.unwrap_or(w), a_bar.unwrap_or(a))
        }
    };
    let nom = NominalTrajectory::fit(omega_bar, a_bar, x0, tols)?;
    eprintln!(
        "omega_bar = {omega_bar}, a_bar = {a_bar}, regime: {}{}",
        nom.regime(),
        nom.period().map(|t| format!(", period {t:.6} s")).unwrap_or_default()
    );
    let mut rows = String::from("t,x_nom\n");
    let steps = (common.horizon / common.dt).round() as usize;
    for k in 0..=steps {
        let t = k as f64 * common.dt;
        rows.push_str(&format!("{},{}\n", t, nom.x_at(t)));
    }
    write_text(output, &rows)?;
    Ok(0)
}

fn cmd_simulate(
    input: &Path,
    perturb: f64,
    record_every: usize,
    output: Option<&Path>,
    common: &CommonOpts,
) -> Result<i32, Error> {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let (net, part) = load(input)?;
    let structure = build_spanning_structure(&net, &part)?;
    let mut cfg = common.sim_config();
    cfg.record_every = record_every;
    cfg.perturbation = perturb;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let theta0 = DVector::from_fn(net.n(), |_, _| {
        if perturb > 0.0 {
            rng.gen_range(-perturb..=perturb)
        } else {
            0.0
        }
    });
    let traj = integrate(&net, &theta0, &cfg, Some(&structure))?;
    let wrapped = traj.phases_wrapped();
    let dist = traj.intra_distance.as_ref().expect("structure supplied");

    let mut csv = String::from("t");
    for i in 1..=net.n() {
        csv.push_str(&format!(",theta_{i}"));
    }
    csv.push_str(",dist_intra\n");
    for (r, &t) in traj.times.iter().enumerate() {
        csv.push_str(&format!("{t}"));
        for c in 0..net.n() {
            csv.push_str(&format!(",{}", wrapped[(r, c)]));
        }
        csv.push_str(&format!(",{}\n", dist[r]));
    }
    write_text(output, &csv)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    input: &Path,
    param: SweepParam,
    from: f64,
    to: f64,
    points: usize,
    log: bool,
    output: Option<&Path>,
    tols: &Tolerances,
) -> Result<i32, Error> {
    if points < 2 {
        return Err(Error::Unsupported("sweep needs at least 2 points".into()));
    }
    if log && (from <= 0.0 || to <= 0.0) {
        return Err(Error::Unsupported("geometric grid needs positive bounds".into()));
    }
    let (net, part) = load(input)?;
    let name = match param {
        SweepParam::Alpha => "intra_scale",
        SweepParam::Beta => "inter_scale",
        SweepParam::OmegaBar => "omega_bar",
    };
    let mut csv = format!(
        "{name},m_matrix,regime,freq_lhs,freq_rhs,freq_holds,floquet_max_multiplier,floquet_stable\n"
    );
    for k in 0..points {
        let s = k as f64 / (points - 1) as f64;
        let value = if log { from * (to / from).powf(s) } else { from + (to - from) * s };
        let candidate = match param {
            SweepParam::Alpha => net.scale_weights(&part, value, 1.0),
            SweepParam::Beta => net.scale_weights(&part, 1.0, value),
            SweepParam::OmegaBar => {
                if part.m() != 2 {
                    return Err(Error::Unsupported(
                        "omega-bar sweeps need exactly two clusters".into(),
                    ));
                }
                let base = net.omega()[part.cluster(0)[0]];
                net.with_cluster_frequencies(&part, &[base, base + value])?
            }
        };
        let mm = m_matrix_certificate(&candidate, &part, tols)?;
        let mut regime = String::new();
        let (mut lhs, mut rhs, mut fholds) = (String::new(), String::new(), String::new());
        if part.m() == 2 {
            let cert = frequency_certificate(&candidate, &part, tols)?;
            regime = cert.regime.to_string();
            if cert.regime == Regime::LimitCycle {
                lhs = format!("{}", cert.lhs);
                rhs = format!("{}", cert.rhs);
                fholds = format!("{}", cert.holds);
            }
        }
        let (mut fmax, mut fstable) = (String::new(), String::new());
        if part.m() == 2 {
            if let Ok(fl) = floquet_two_cluster(&candidate, &part, tols) {
                if !fl.equilibrium_fallback {
                    let max = fl.multiplier_magnitudes.iter().copied().fold(0.0, f64::max);
                    fmax = format!("{max}");
                    fstable = format!("{}", fl.stable);
                }
            }
        }
        csv.push_str(&format!(
            "{value},{},{regime},{lhs},{rhs},{fholds},{fmax},{fstable}\n",
            mm.is_m_matrix
        ));
    }
    write_text(output, &csv)?;
    Ok(0)
}

fn cmd_floquet(input: &Path, tols: &Tolerances) -> Result<i32, Error> {
    let (net, part) = load(input)?;
    let fl = floquet_two_cluster(&net, &part, tols)?;
    println!("regime: {}", fl.regime);
    if fl.equilibrium_fallback {
        println!("phase-locked fallback: eigenvalues of the frozen linearization");
        for l in &fl.multipliers {
            println!("  lambda = {:+.9e} {:+.9e}i", l.re, l.im);
        }
    } else {
        println!("multipliers of the monodromy matrix:");
        for l in &fl.multipliers {
            println!("  mu = {:+.9e} {:+.9e}i  |mu| = {:.9}", l.re, l.im, l.norm());
        }
    }
    println!("stable: {}", yes_no(fl.stable));
    Ok(if fl.stable { 0 } else { 1 })
}

fn cmd_monte_carlo(
    input: &Path,
    trials: usize,
    perturb: f64,
    record_every: usize,
    output: Option<&Path>,
    common: &CommonOpts,
) -> Result<i32, Error> {
    let (net, part) = load(input)?;
    let mut cfg = common.sim_config();
    cfg.perturbation = perturb;
    cfg.record_every = record_every;
    let summary = monte_carlo_stability(&net, &part, &cfg, trials)?;
    let mut csv = String::from("t,mean,min,max\n");
    for (k, &t) in summary.times.iter().enumerate() {
        csv.push_str(&format!("{t},{},{},{}\n", summary.mean[k], summary.min[k], summary.max[k]));
    }
    write_text(output, &csv)?;
    eprintln!(
        "initial mean {:.6e}, final mean {:.6e}, peak {:.6e}",
        summary.initial_mean, summary.final_mean, summary.peak
    );
    println!("monte carlo verdict: {}", if summary.stable { "stable" } else { "unstable" });
    Ok(if summary.stable { 0 } else { 1 })
}

fn dump_structure(dir: &Path, s: &cluster_sync::graph::SpanningStructure) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    write_matrix_csv(&dir.join("incidence_full.csv"), s.incidence_full())?;
    for k in 0..s.m() {
        write_matrix_csv(&dir.join(format!("incidence_cluster_{}.csv", k + 1)), s.incidence_cluster(k))?;
        write_matrix_csv(&dir.join(format!("incidence_span_{}.csv", k + 1)), s.incidence_span(k))?;
        write_matrix_csv(&dir.join(format!("t_intra_{}.csv", k + 1)), s.t_intra(k))?;
    }
    Ok(())
}

fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<(), Error> {
    let mut text = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{}", m[(r, c)])).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn fmt_vec(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", items.join(", "))
}

fn fmt_matrix(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|r| {
            let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:.6}", m[(r, c)])).collect();
            format!("[{}]", row.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}
