//! Stability certificates and numerical validation for cluster
//! synchronization in weighted networks of heterogeneous Kuramoto
//! oscillators.
//!
//! The library answers one question: given a weighted oscillator network
//! and a grouping of its nodes into clusters, is the state where each
//! cluster moves in lockstep locally exponentially stable? It provides
//!
//! * invariance checks on the input ([`network`]): frequency uniformity
//!   within clusters, external equitability of the inter-cluster weights,
//!   and exclusion margins for merged-cluster submanifolds;
//! * the spanning-tree phase-difference coordinates and incidence algebra
//!   the analysis runs in ([`graph`]);
//! * three analytical sufficient conditions ([`stability`]): an M-matrix
//!   certificate on intra/inter coupling strengths, a two-cluster bound on
//!   the frequency difference, and a two-cluster homogeneity test;
//! * the closed-form inter-cluster trajectory for two clusters
//!   ([`nominal`]);
//! * ground truth via nonlinear simulation, Monte Carlo perturbation
//!   experiments, and Floquet analysis ([`simulate`]).
//!
//! All types are immutable after construction and every operation is a
//! pure function of its inputs (plus an explicit seed where randomness is
//! involved), so values can be shared freely across threads.

pub mod error;
pub mod graph;
pub mod io;
pub mod network;
pub mod nominal;
pub mod scenarios;
pub mod simulate;
pub mod stability;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(std::f64::consts::TAU);
    if y > std::f64::consts::PI {
        y - std::f64::consts::TAU
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::wrap_angle;
    use std::f64::consts::PI;

    #[test]
    fn wrap_lands_in_half_open_interval() {
        for k in -20..20 {
            let x = k as f64 * 0.7;
            let w = wrap_angle(x);
            assert!(w > -PI && w <= PI, "{x} wrapped to {w}");
            assert!(((x - w) / std::f64::consts::TAU).round() * std::f64::consts::TAU + w - x < 1e-12);
        }
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(3.0 * PI), PI);
    }
}
