//! Numerical tolerances used by the checks and certificates.
//!
//! The balance conditions on weights and frequencies are exact statements;
//! floating point inputs need explicit slack. Every threshold here is
//! overridable from the CLI.

/// Tolerance bundle. `Default` gives the documented values.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative tolerance for the inter-cluster weight balance check.
    /// The absolute tolerance is `weights_rel * (1 + max |a_ij|)`.
    pub weights_rel: f64,
    /// Absolute tolerance for frequency equality within a cluster.
    pub freq: f64,
    /// A matrix is Hurwitz when every eigenvalue real part is below
    /// `-hurwitz`.
    pub hurwitz: f64,
    /// Floquet stability margin: stable when all multiplier magnitudes are
    /// below `1 - floquet`.
    pub floquet: f64,
    /// Relative tolerance for detecting the critical regime
    /// (frequency difference equal to coupling `a_bar`).
    pub critical_rel: f64,
    /// Relative tolerance for the homogeneous intra-cluster test
    /// (`J_intra` close to a negative multiple of the identity).
    pub homogeneous_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            weights_rel: 1e-9,
            freq: 1e-12,
            hurwitz: 1e-10,
            floquet: 1e-6,
            critical_rel: 1e-12,
            homogeneous_rel: 1e-9,
        }
    }
}

impl Tolerances {
    /// Absolute weight-balance tolerance scaled by the largest coupling.
    pub fn weights_abs(&self, max_abs_weight: f64) -> f64 {
        self.weights_rel * (1.0 + max_abs_weight)
    }
}
