//! Ground-truth machinery: nonlinear integration of the oscillator
//! dynamics, manifold-distance metrics, Monte Carlo perturbation
//! experiments, and Floquet analysis of the linearized two-cluster system.
//!
//! Integration is fixed-step (classic RK4 by default) so every result is
//! reproducible bit for bit from the configuration and seed. Phases are
//! kept unwrapped internally and wrapped only for output and distance
//! computations.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{build_spanning_structure, SpanningStructure};
use crate::network::{Network, Partition};
use crate::nominal::NominalTrajectory;
use crate::stability::{jacobian_inter_coefficient, jacobian_intra, two_cluster_rates, Regime};
use crate::tolerances::Tolerances;
use crate::wrap_angle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    Euler,
}

/// Simulation configuration. `record_every` thins the stored samples; the
/// integration step itself is always `dt`.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub integrator: Integrator,
    pub seed: u64,
    /// Half-width of the uniform initial perturbation (radians).
    pub perturbation: f64,
    pub record_every: usize,
    /// Monte Carlo verdict: stable when the mean final distance is below
    /// `contraction` times the mean initial distance.
    pub contraction: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 10.0,
            integrator: Integrator::Rk4,
            seed: 0,
            perturbation: 0.01,
            record_every: 1,
            contraction: 0.1,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::Unsupported(format!("dt must be positive, got {}", self.dt)));
        }
        if self.horizon < 0.0 {
            return Err(Error::Unsupported(format!(
                "horizon must be nonnegative, got {}",
                self.horizon
            )));
        }
        if self.record_every == 0 {
            return Err(Error::Unsupported("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// A sampled solution. Phases are stored unwrapped, one row per sample.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub phases: DMatrix<f64>,
    /// Distance to the cluster synchronization manifold per sample, when a
    /// spanning structure was supplied.
    pub intra_distance: Option<Vec<f64>>,
}

impl Trajectory {
    /// Phases wrapped to `(-pi, pi]`.
    pub fn phases_wrapped(&self) -> DMatrix<f64> {
        self.phases.map(wrap_angle)
    }

    /// Wrapped inter-cluster coordinate series.
    pub fn x_inter_series(&self, structure: &SpanningStructure) -> Vec<DVector<f64>> {
        (0..self.times.len())
            .map(|r| structure.x_inter_of(&self.phases.row(r).transpose()))
            .collect()
    }
}

fn kuramoto_rhs(net: &Network) -> impl Fn(&DVector<f64>) -> DVector<f64> + '_ {
    // Precompute nonzero couplings once; the closure is hot.
    let n = net.n();
    let mut terms: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && net.weight(i, j) != 0.0 {
                terms.push((i, j, net.weight(i, j)));
            }
        }
    }
    move |theta: &DVector<f64>| {
        let mut dot = net.omega().clone();
        for &(i, j, w) in &terms {
            dot[i] += w * (theta[j] - theta[i]).sin();
        }
        dot
    }
}

/// Integrates the oscillator network from `theta0` with fixed steps. The
/// horizon is rounded to a whole number of steps. Supplying a structure
/// attaches the per-sample manifold distance.
pub fn integrate(
    net: &Network,
    theta0: &DVector<f64>,
    cfg: &SimConfig,
    structure: Option<&SpanningStructure>,
) -> Result<Trajectory> {
    cfg.validate()?;
    if theta0.len() != net.n() {
        return Err(Error::InvalidNetwork(format!(
            "initial condition has {} entries for {} nodes",
            theta0.len(),
            net.n()
        )));
    }
    let rhs = kuramoto_rhs(net);
    let steps = (cfg.horizon / cfg.dt).round() as usize;
    let mut theta = theta0.clone();
    let samples = steps / cfg.record_every + 1;
    let mut times = Vec::with_capacity(samples);
    let mut rows: Vec<DVector<f64>> = Vec::with_capacity(samples);
    let mut dist = structure.map(|_| Vec::with_capacity(samples));

    let mut record = |k: usize, theta: &DVector<f64>, dist: &mut Option<Vec<f64>>| {
        times.push(k as f64 * cfg.dt);
        rows.push(theta.clone());
        if let (Some(d), Some(s)) = (dist.as_mut(), structure) {
            d.push(s.x_intra_of(theta).norm());
        }
    };
    record(0, &theta, &mut dist);

    for k in 0..steps {
        theta = match cfg.integrator {
            Integrator::Rk4 => rk4_step_vec(&rhs, &theta, cfg.dt),
            Integrator::Euler => &theta + rhs(&theta) * cfg.dt,
        };
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { step: k + 1, what: "non-finite phase".into() });
        }
        if (k + 1) % cfg.record_every == 0 || k + 1 == steps {
            record(k + 1, &theta, &mut dist);
        }
    }

    let n = net.n();
    let phases = DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]);
    Ok(Trajectory { times, phases, intra_distance: dist })
}

fn rk4_step_vec(
    rhs: &impl Fn(&DVector<f64>) -> DVector<f64>,
    y: &DVector<f64>,
    dt: f64,
) -> DVector<f64> {
    let k1 = rhs(y);
    let k2 = rhs(&(y + &k1 * (dt / 2.0)));
    let k3 = rhs(&(y + &k2 * (dt / 2.0)));
    let k4 = rhs(&(y + &k3 * dt));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Euclidean norm of the wrapped spanning-forest intra coordinates: zero
/// exactly on the cluster synchronization manifold, invariant under a
/// common phase shift.
pub fn intra_distance(theta: &DVector<f64>, structure: &SpanningStructure) -> f64 {
    structure.x_intra_of(theta).norm()
}

/// Mean/min/max distance envelope over repeated perturbed runs.
#[derive(Debug, Clone)]
pub struct MonteCarloSummary {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub initial_mean: f64,
    pub final_mean: f64,
    pub initial_max: f64,
    pub final_max: f64,
    /// Largest distance seen at any integration step of any trial.
    pub peak: f64,
    pub stable: bool,
}

/// Runs `trials` independent simulations from the synchronized state
/// perturbed uniformly by `±cfg.perturbation` per coordinate, and reports
/// the distance envelope. Stable means the mean final distance contracted
/// below `cfg.contraction` times the initial one and the worst final
/// distance stayed below the worst initial one.
pub fn monte_carlo_stability(
    net: &Network,
    part: &Partition,
    cfg: &SimConfig,
    trials: usize,
) -> Result<MonteCarloSummary> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::Unsupported("need at least one trial".into()));
    }
    let structure = build_spanning_structure(net, part)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut series: Vec<Vec<f64>> = Vec::with_capacity(trials);
    let mut peak = 0.0_f64;
    let mut times = Vec::new();
    for _ in 0..trials {
        let theta0 = DVector::from_fn(net.n(), |_, _| {
            rng.gen_range(-cfg.perturbation..=cfg.perturbation)
        });
        let traj = integrate(net, &theta0, cfg, Some(&structure))?;
        let dist = traj.intra_distance.expect("structure supplied");
        peak = dist.iter().fold(peak, |m, &d| m.max(d));
        if times.is_empty() {
            times = traj.times;
        }
        series.push(dist);
    }

    let samples = times.len();
    let mut mean = Vec::with_capacity(samples);
    let mut min = Vec::with_capacity(samples);
    let mut max = Vec::with_capacity(samples);
    let mut column = vec![0.0; trials];
    for s in 0..samples {
        for (t, row) in series.iter().enumerate() {
            column[t] = row[s];
        }
        mean.push(pairwise_mean(&column));
        min.push(column.iter().copied().fold(f64::INFINITY, f64::min));
        max.push(column.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }

    let stable = mean[samples - 1] < cfg.contraction * mean[0] && max[samples - 1] < max[0];
    Ok(MonteCarloSummary {
        initial_mean: mean[0],
        final_mean: mean[samples - 1],
        initial_max: max[0],
        final_max: max[samples - 1],
        times,
        mean,
        min,
        max,
        peak,
        stable,
    })
}

/// Order-independent sum by pairwise splitting, so concurrent aggregation
/// orders cannot change the result.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

pub fn pairwise_mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Staircase pattern residuals on the band-ring network: component `i` is
/// the wrapped deviation of `theta_{i+2} - theta_i` from the nominal offset
/// `2 pi / n_half`.
pub fn band_pattern_residual(theta: &DVector<f64>, n_half: usize) -> DVector<f64> {
    let n = theta.len();
    let offset = std::f64::consts::TAU / n_half as f64;
    DVector::from_fn(n - 2, |i, _| wrap_angle(theta[i + 2] - theta[i] - offset))
}

/// Integrates the band-ring network from the staircase pattern itself and
/// returns the largest pattern deviation seen over the horizon. The pattern
/// is an invariant set distinct from the cluster synchronization manifold,
/// so the deviation stays at integrator-error level.
pub fn band_invariance_deviation(n_half: usize, cfg: &SimConfig) -> Result<f64> {
    let (net, _part) = crate::scenarios::band_ring(n_half, 1.0, 3.0);
    let theta0 = crate::scenarios::band_ring_pattern_point(n_half);
    run_band_max_residual(&net, &theta0, n_half, cfg)
}

/// Perturbed variant: `trials` runs started within `±cfg.perturbation` of
/// the staircase pattern; returns the largest residual 2-norm seen across
/// all trials and times.
pub fn band_perturbed_peak(n_half: usize, cfg: &SimConfig, trials: usize) -> Result<f64> {
    let (net, _part) = crate::scenarios::band_ring(n_half, 1.0, 3.0);
    let base = crate::scenarios::band_ring_pattern_point(n_half);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut peak = 0.0_f64;
    for _ in 0..trials {
        let theta0 = DVector::from_fn(net.n(), |i, _| {
            base[i] + rng.gen_range(-cfg.perturbation..=cfg.perturbation)
        });
        peak = peak.max(run_band_max_residual(&net, &theta0, n_half, cfg)?);
    }
    Ok(peak)
}

fn run_band_max_residual(
    net: &Network,
    theta0: &DVector<f64>,
    n_half: usize,
    cfg: &SimConfig,
) -> Result<f64> {
    let rhs = kuramoto_rhs(net);
    let steps = (cfg.horizon / cfg.dt).round() as usize;
    let mut theta = theta0.clone();
    let mut worst = band_pattern_residual(&theta, n_half).norm();
    for k in 0..steps {
        theta = match cfg.integrator {
            Integrator::Rk4 => rk4_step_vec(&rhs, &theta, cfg.dt),
            Integrator::Euler => &theta + rhs(&theta) * cfg.dt,
        };
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { step: k + 1, what: "non-finite phase".into() });
        }
        worst = worst.max(band_pattern_residual(&theta, n_half).norm());
    }
    Ok(worst)
}

/// Floquet analysis outcome for the transverse (intra) dynamics.
#[derive(Debug, Clone)]
pub struct FloquetResult {
    /// State transition matrix over one period (limit-cycle regime).
    pub monodromy: DMatrix<f64>,
    pub multipliers: Vec<Complex<f64>>,
    pub multiplier_magnitudes: Vec<f64>,
    pub regime: Regime,
    /// Set when the phase-locked fallback (frozen-equilibrium eigenvalue
    /// test) was used instead of a periodic-orbit analysis.
    pub equilibrium_fallback: bool,
    pub stable: bool,
}

/// Floquet stability of the synchronized two-cluster state: integrates the
/// variational system
///
/// ```text
/// M' = (J_intra + cos(x_nom(t)) K) M,   M(0) = I
/// ```
///
/// over one period of the nominal inter-cluster trajectory with RK4 at
/// `dt = T / 10^4`, and tests all monodromy eigenvalues against
/// `1 - tols.floquet`. In the phase-locked regime there is no periodic
/// orbit; the frozen linearization at the locked offset is used instead and
/// flagged as a fallback.
pub fn floquet_two_cluster(
    net: &Network,
    part: &Partition,
    tols: &Tolerances,
) -> Result<FloquetResult> {
    let (omega_bar, a_bar) = two_cluster_rates(net, part)?;
    let structure = build_spanning_structure(net, part)?;
    let intra = jacobian_intra(net, part, &structure, tols)?;
    let coeff = jacobian_inter_coefficient(net, part, &structure)?;
    let dim = intra.assembled.nrows();
    let regime = crate::stability::classify_regime(omega_bar, a_bar, tols);

    match regime {
        Regime::Critical => Err(Error::Unsupported(
            "critical regime has no finite period; no Floquet analysis".into(),
        )),
        Regime::PhaseLocked => {
            let nom = NominalTrajectory::fit(omega_bar, a_bar, 0.0, tols)?;
            let x_lock = nom.limit_value().expect("phase-locked limit exists");
            let frozen = &intra.assembled + &coeff * x_lock.cos();
            let eig: Vec<Complex<f64>> = if dim == 0 {
                Vec::new()
            } else {
                frozen.complex_eigenvalues().iter().copied().collect()
            };
            let stable = eig.iter().all(|l| l.re < -tols.hurwitz);
            Ok(FloquetResult {
                monodromy: DMatrix::identity(dim, dim),
                multiplier_magnitudes: eig.iter().map(|l| l.norm()).collect(),
                multipliers: eig,
                regime,
                equilibrium_fallback: true,
                stable,
            })
        }
        Regime::LimitCycle => {
            let nom = NominalTrajectory::fit(omega_bar, a_bar, 0.0, tols)?;
            let period = nom.period().expect("limit cycle has a period");
            let steps = 10_000usize;
            let dt = period / steps as f64;
            let mut m = DMatrix::<f64>::identity(dim, dim);
            let rhs = |t: f64, m: &DMatrix<f64>| -> DMatrix<f64> {
                (&intra.assembled + &coeff * nom.x_at(t).cos()) * m
            };
            for k in 0..steps {
                let t = k as f64 * dt;
                let k1 = rhs(t, &m);
                let k2 = rhs(t + dt / 2.0, &(&m + &k1 * (dt / 2.0)));
                let k3 = rhs(t + dt / 2.0, &(&m + &k2 * (dt / 2.0)));
                let k4 = rhs(t + dt, &(&m + &k3 * dt));
                m += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::Diverged { step: steps, what: "non-finite monodromy".into() });
            }
            if dim > 0 && m.determinant() == 0.0 {
                return Err(Error::Internal("monodromy matrix is singular".into()));
            }
            let multipliers: Vec<Complex<f64>> = if dim == 0 {
                Vec::new()
            } else {
                m.complex_eigenvalues().iter().copied().collect()
            };
            let magnitudes: Vec<f64> = multipliers.iter().map(|l| l.norm()).collect();
            let stable = magnitudes.iter().all(|&r| r < 1.0 - tols.floquet);
            Ok(FloquetResult {
                monodromy: m,
                multipliers,
                multiplier_magnitudes: magnitudes,
                regime,
                equilibrium_fallback: false,
                stable,
            })
        }
    }
}
