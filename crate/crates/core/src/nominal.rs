//! Closed-form inter-cluster difference for two clusters.
//!
//! On the synchronization manifold the inter-cluster phase difference obeys
//! the scalar equation
//!
//! ```text
//! x' = omega_bar - a_bar * sin(x)
//! ```
//!
//! whose solution splits into three regimes:
//!
//! * `omega_bar > a_bar` — a limit cycle of period
//!   `T = 2 pi / sqrt(omega_bar^2 - a_bar^2)`:
//!   `x(t) = 2 atan((a_bar + s tan(s (t + tau) / 2)) / omega_bar)` with
//!   `s = sqrt(omega_bar^2 - a_bar^2)`, taking the value `pi` at the tangent
//!   poles `t = t0 + k T`;
//! * `omega_bar < a_bar` — phase locking: the tangent turns into a
//!   hyperbolic tangent (or cotangent, depending on the starting branch)
//!   and `x` converges to
//!   `2 atan((a_bar - sqrt(a_bar^2 - omega_bar^2)) / omega_bar)`;
//! * `omega_bar = a_bar` — the marginal case
//!   `tan(x/2) = 1 - 2 / (a_bar t + c)`, converging to `pi/2`.
//!
//! Evaluation is by the Weierstrass substitution `u = tan(x/2)` throughout,
//! which handles the wrap through `pi` uniformly: a pole of `u` is exactly a
//! crossing of the angle `pi`.

use crate::error::{Error, Result};
use crate::wrap_angle;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Form {
    /// `u(t) = (a_bar + s tan(s (t + tau) / 2)) / omega_bar`.
    LimitCycle { s: f64, tau: f64 },
    /// `u(t) = 1 - 2 / (a_bar t + c)`.
    Critical { c: f64 },
    /// `u(t) = (a_bar - r f(r (t + tau) / 2)) / omega_bar`, `f` = tanh/coth.
    Locked { r: f64, tau: f64, coth: bool },
    /// `omega_bar = 0`: `u(t) = u0 exp(-a_bar t)`.
    Decay { u0: f64 },
    /// Equilibrium (or fully degenerate input): `x(t) = x0`.
    Constant,
}

pub use crate::stability::Regime;

/// The nominal inter-cluster trajectory fitted to an initial value.
#[derive(Debug, Clone, Copy)]
pub struct NominalTrajectory {
    omega_bar: f64,
    a_bar: f64,
    /// Initial value, wrapped to `(-pi, pi]`.
    x0: f64,
    regime: Regime,
    form: Form,
}

impl NominalTrajectory {
    /// Fits the phase constant so that `x(0) = x0` (`x0` is wrapped first).
    /// Requires `omega_bar >= 0` and `a_bar >= 0`; callers order the
    /// clusters so the frequency difference is nonnegative.
    pub fn fit(omega_bar: f64, a_bar: f64, x0: f64, tols: &crate::Tolerances) -> Result<Self> {
        if !omega_bar.is_finite() || !a_bar.is_finite() || omega_bar < 0.0 || a_bar < 0.0 {
            return Err(Error::Unsupported(format!(
                "nominal trajectory needs finite nonnegative rates, got omega_bar = \
                 {omega_bar}, a_bar = {a_bar}"
            )));
        }
        let x0 = wrap_angle(x0);
        let regime = crate::stability::classify_regime(omega_bar, a_bar, tols);
        let form = match regime {
            Regime::Critical => {
                if a_bar == 0.0 {
                    // omega_bar = a_bar = 0: nothing moves.
                    Form::Constant
                } else {
                    let u0 = (x0 / 2.0).tan();
                    if x0 == std::f64::consts::PI {
                        Form::Critical { c: 0.0 }
                    } else if (u0 - 1.0).abs() == 0.0 {
                        Form::Constant
                    } else {
                        Form::Critical { c: 2.0 / (1.0 - u0) }
                    }
                }
            }
            Regime::LimitCycle => {
                let s = (omega_bar * omega_bar - a_bar * a_bar).sqrt();
                let tau = if x0 == std::f64::consts::PI {
                    std::f64::consts::PI / s
                } else {
                    (2.0 / s) * ((omega_bar * (x0 / 2.0).tan() - a_bar) / s).atan()
                };
                Form::LimitCycle { s, tau }
            }
            Regime::PhaseLocked => {
                let r = (a_bar * a_bar - omega_bar * omega_bar).sqrt();
                if omega_bar == 0.0 {
                    if x0 == std::f64::consts::PI {
                        Form::Constant
                    } else {
                        Form::Decay { u0: (x0 / 2.0).tan() }
                    }
                } else if x0 == std::f64::consts::PI {
                    Form::Locked { r, tau: 0.0, coth: true }
                } else {
                    let w0 = (a_bar - omega_bar * (x0 / 2.0).tan()) / r;
                    if w0.abs() == 1.0 {
                        Form::Constant
                    } else if w0.abs() < 1.0 {
                        Form::Locked { r, tau: (2.0 / r) * w0.atanh(), coth: false }
                    } else {
                        Form::Locked { r, tau: (2.0 / r) * w0.recip().atanh(), coth: true }
                    }
                }
            }
        };
        Ok(Self { omega_bar, a_bar, x0, regime, form })
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    pub fn a_bar(&self) -> f64 {
        self.a_bar
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// The fitted phase constant of the limit-cycle / phase-locked forms.
    pub fn tau(&self) -> Option<f64> {
        match self.form {
            Form::LimitCycle { tau, .. } | Form::Locked { tau, .. } => Some(tau),
            _ => None,
        }
    }

    /// Period of the limit cycle.
    pub fn period(&self) -> Option<f64> {
        match self.form {
            Form::LimitCycle { s, .. } => Some(std::f64::consts::TAU / s),
            _ => None,
        }
    }

    /// First nonnegative crossing of the angle `pi` (limit cycle only).
    pub fn first_pi_crossing(&self) -> Option<f64> {
        match self.form {
            Form::LimitCycle { s, tau } => {
                let period = std::f64::consts::TAU / s;
                let t0 = -tau + std::f64::consts::PI / s;
                Some(t0.rem_euclid(period))
            }
            _ => None,
        }
    }

    /// Limit of `x(t)` as `t` grows (phase-locked and critical regimes).
    pub fn limit_value(&self) -> Option<f64> {
        match self.regime {
            Regime::LimitCycle => None,
            Regime::Critical => {
                if self.a_bar == 0.0 || matches!(self.form, Form::Constant) {
                    Some(self.x0)
                } else {
                    Some(std::f64::consts::FRAC_PI_2)
                }
            }
            Regime::PhaseLocked => match self.form {
                Form::Constant => Some(self.x0),
                Form::Decay { .. } => Some(0.0),
                _ => {
                    let r = (self.a_bar * self.a_bar - self.omega_bar * self.omega_bar).sqrt();
                    Some(2.0 * ((self.a_bar - r) / self.omega_bar).atan())
                }
            },
        }
    }

    /// Value at time `t`, wrapped to `(-pi, pi]`.
    pub fn x_at(&self, t: f64) -> f64 {
        let u = match self.form {
            Form::Constant => return self.x0,
            Form::LimitCycle { s, tau } => {
                (self.a_bar + s * (0.5 * s * (t + tau)).tan()) / self.omega_bar
            }
            Form::Critical { c } => 1.0 - 2.0 / (self.a_bar * t + c),
            Form::Locked { r, tau, coth } => {
                let f = (0.5 * r * (t + tau)).tanh();
                let f = if coth { f.recip() } else { f };
                (self.a_bar - r * f) / self.omega_bar
            }
            Form::Decay { u0 } => u0 * (-self.a_bar * t).exp(),
        };
        wrap_angle(2.0 * u.atan())
    }

    /// Closed form of `int_0^t cos(x(s)) ds`. Defined in the limit-cycle
    /// regime, where `omega_bar - a_bar sin x` never vanishes:
    ///
    /// ```text
    /// (1 / a_bar) * ln( (omega_bar - a_bar sin x(0))
    ///                 / (omega_bar - a_bar sin x(t)) )
    /// ```
    ///
    /// with the oscillatory `a_bar = 0` limit handled directly.
    pub fn cos_integral(&self, t: f64) -> Result<f64> {
        if self.regime != Regime::LimitCycle {
            return Err(Error::Unsupported(format!(
                "cosine integral requires the limit-cycle regime, got {}",
                self.regime
            )));
        }
        if self.a_bar == 0.0 {
            Ok(((self.omega_bar * t + self.x0).sin() - self.x0.sin()) / self.omega_bar)
        } else {
            let num = self.omega_bar - self.a_bar * self.x0.sin();
            let den = self.omega_bar - self.a_bar * self.x_at(t).sin();
            Ok((num / den).ln() / self.a_bar)
        }
    }

    /// Uniform bound on `|int_0^t cos(x(s)) ds|` over all `t`:
    /// `(1 / a_bar) ln((omega_bar + a_bar) / (omega_bar - a_bar))`, with the
    /// continuous `a_bar -> 0` limit `2 / omega_bar`.
    pub fn cos_integral_bound(&self) -> Result<f64> {
        if self.regime != Regime::LimitCycle {
            return Err(Error::Unsupported(format!(
                "cosine integral bound requires the limit-cycle regime, got {}",
                self.regime
            )));
        }
        if self.a_bar == 0.0 {
            Ok(2.0 / self.omega_bar)
        } else {
            Ok(((self.omega_bar + self.a_bar) / (self.omega_bar - self.a_bar)).ln() / self.a_bar)
        }
    }
}
