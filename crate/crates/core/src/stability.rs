//! Analytical stability certificates for the cluster synchronization
//! manifold.
//!
//! Three sufficient conditions are implemented:
//!
//! * an M-matrix test on a comparison matrix built from per-cluster
//!   Lyapunov solutions and inter-cluster gain bounds (strong intra
//!   coupling relative to inter coupling);
//! * for two clusters, a bound coupling the frequency difference, the total
//!   inter-cluster weight, and the norms of the intra/inter Jacobians;
//! * for two clusters, homogeneity of the intra dynamics (`J_intra` a
//!   negative multiple of the identity).
//!
//! All certificates are sufficient, never necessary: a failing certificate
//! is inconclusive, and ground truth comes from the simulation module.

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_spanning_structure, SpanningStructure};
use crate::network::{equitable_weights, uniform_frequencies, Network, Partition};
use crate::tolerances::Tolerances;

/// Largest singular value (the l2-induced operator norm).
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().max()
}

/// All eigenvalue real parts below `-tol`.
pub fn is_hurwitz(m: &DMatrix<f64>, tol: f64) -> bool {
    if m.nrows() == 0 {
        return true;
    }
    m.complex_eigenvalues().iter().all(|l| l.re < -tol)
}

/// M-matrix test: nonpositive off-diagonal entries and positive leading
/// principal minors. Returns the verdict and the minors.
pub fn is_m_matrix(s: &DMatrix<f64>) -> (bool, Vec<f64>) {
    let p = s.nrows();
    let mut minors = Vec::with_capacity(p);
    for i in 1..=p {
        minors.push(s.view((0, 0), (i, i)).clone_owned().determinant());
    }
    let off_diag_ok =
        (0..p).all(|i| (0..p).all(|j| i == j || s[(i, j)] <= 0.0));
    let ok = off_diag_ok && minors.iter().all(|&d| d > 0.0);
    (ok, minors)
}

/// Block-diagonal intra-cluster Jacobian at the synchronized state.
#[derive(Debug, Clone)]
pub struct IntraJacobian {
    /// One block per cluster; singleton clusters give 0x0 blocks.
    pub blocks: Vec<DMatrix<f64>>,
    /// The assembled block diagonal, `(n - m)` square.
    pub assembled: DMatrix<f64>,
    /// Eigenvalues per block.
    pub eigenvalues: Vec<Vec<Complex<f64>>>,
    /// Spectral norm of the assembled matrix.
    pub norm: f64,
}

/// Builds the per-cluster Jacobian blocks
/// `J_k = -B_span_k^T B_k diag(weights) T_intra_k`.
///
/// For a symmetric network every block is Hurwitz whenever the cluster
/// subgraph is connected; a non-Hurwitz block is reported as an internal
/// invariant failure. With the asymmetric flag the blocks are computed from
/// the cluster Laplacian and the Hurwitz check becomes a hard requirement
/// on the input.
pub fn jacobian_intra(
    net: &Network,
    part: &Partition,
    structure: &SpanningStructure,
    tols: &Tolerances,
) -> Result<IntraJacobian> {
    let mut blocks = Vec::with_capacity(part.m());
    for k in 0..part.m() {
        let b_span = structure.incidence_span(k);
        let jk = if !net.allow_asymmetric() {
            let b_k = structure.incidence_cluster(k);
            let w = DMatrix::from_diagonal(&DVector::from_row_slice(
                structure.cluster_edge_weights(k),
            ));
            -(b_span.transpose() * b_k * w * structure.t_intra(k))
        } else {
            // Directed cluster Laplacian restricted to the tree coordinates.
            let nodes = structure.cluster_nodes(k);
            let nk = nodes.len();
            let mut lap = DMatrix::zeros(nk, nk);
            for (a, &i) in nodes.iter().enumerate() {
                for (b, &j) in nodes.iter().enumerate() {
                    if a != b {
                        lap[(a, b)] = -net.weight(i, j);
                        lap[(a, a)] += net.weight(i, j);
                    }
                }
            }
            if nk <= 1 {
                DMatrix::zeros(0, 0)
            } else {
                let gram = b_span.transpose() * b_span;
                let gram_inv = gram.try_inverse().ok_or_else(|| {
                    Error::Internal("singular Gram matrix for spanning tree".into())
                })?;
                -(b_span.transpose() * lap * b_span * gram_inv)
            }
        };
        blocks.push(jk);
    }

    let dim: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut assembled = DMatrix::zeros(dim, dim);
    let mut off = 0;
    for b in &blocks {
        assembled.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }

    let mut eigenvalues = Vec::with_capacity(blocks.len());
    for (k, b) in blocks.iter().enumerate() {
        let eig: Vec<Complex<f64>> = if b.nrows() == 0 {
            Vec::new()
        } else {
            b.complex_eigenvalues().iter().copied().collect()
        };
        if eig.iter().any(|l| l.re >= -tols.hurwitz) {
            if net.allow_asymmetric() {
                return Err(Error::AssumptionViolated(format!(
                    "intra-cluster Jacobian of cluster {} is not Hurwitz; required for \
                     asymmetric networks",
                    k + 1
                )));
            }
            return Err(Error::Internal(format!(
                "intra-cluster Jacobian of cluster {} is not Hurwitz for a symmetric \
                 connected cluster",
                k + 1
            )));
        }
        eigenvalues.push(eig);
    }

    let norm = spectral_norm(&assembled);
    Ok(IntraJacobian { blocks, assembled, eigenvalues, norm })
}

/// Solves `J^T X + X J = -Q` for symmetric positive definite `X` via the
/// Kronecker vectorization `(I ⊗ J^T + J^T ⊗ I) vec(X) = -vec(Q)`.
/// Requires `J` Hurwitz; the blocks here are tiny, so a dense solve is fine.
pub fn lyapunov_solve(j: &DMatrix<f64>, q: &DMatrix<f64>, tols: &Tolerances) -> Result<DMatrix<f64>> {
    let d = j.nrows();
    if j.ncols() != d || q.nrows() != d || q.ncols() != d {
        return Err(Error::Internal("Lyapunov solve needs square J and Q of equal size".into()));
    }
    if d == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if !is_hurwitz(j, tols.hurwitz) {
        return Err(Error::LyapunovUnstable("coefficient matrix is not Hurwitz".into()));
    }
    let jt = j.transpose();
    let eye = DMatrix::<f64>::identity(d, d);
    let system = eye.kronecker(&jt) + jt.kronecker(&eye);
    let rhs = DVector::from_column_slice(q.as_slice()) * -1.0;
    let sol = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("singular Lyapunov system for a Hurwitz matrix".into()))?;
    let x = DMatrix::from_column_slice(d, d, sol.as_slice());
    // Symmetrize away roundoff and verify definiteness.
    let x = (&x + x.transpose()) * 0.5;
    let min_eig = x.clone().symmetric_eigen().eigenvalues.min();
    if min_eig <= 0.0 {
        return Err(Error::LyapunovUnstable(format!(
            "solution not positive definite (min eigenvalue {min_eig:.3e})"
        )));
    }
    Ok(x)
}

/// Gain bounds on the inter-cluster interaction terms.
///
/// `tilde[(k, l)]` is the per-node quotient weight of cluster `k` into
/// cluster `l` (well defined under the equitability condition), with the
/// diagonal holding the row sums. `gamma = 2 * max_r (|P_r| - 1) * tilde`.
#[derive(Debug, Clone, Serialize)]
pub struct GammaTable {
    pub tilde: DMatrix<f64>,
    pub gamma: DMatrix<f64>,
    pub n_intra: Vec<usize>,
}

pub fn gamma_constants(net: &Network, part: &Partition, tols: &Tolerances) -> Result<GammaTable> {
    let (ok, worst) = equitable_weights(net, part, tols.weights_abs(net.max_abs_weight()))?;
    if !ok {
        return Err(Error::AssumptionViolated(format!(
            "inter-cluster weights are not equitable (worst mismatch {worst:.3e}); \
             the gain constants are ill-defined"
        )));
    }
    let m = part.m();
    let mut tilde = DMatrix::zeros(m, m);
    for k in 0..m {
        let rep = part.cluster(k)[0];
        for l in 0..m {
            if l != k {
                tilde[(k, l)] = crate::network::quotient_weight(net, part, rep, l);
            }
        }
        tilde[(k, k)] = (0..m).filter(|&l| l != k).map(|l| tilde[(k, l)]).sum();
    }
    let n_intra: Vec<usize> = part.clusters().iter().map(|c| c.len() - 1).collect();
    let max_intra = n_intra.iter().copied().max().unwrap_or(0) as f64;
    let gamma = &tilde * (2.0 * max_intra);
    Ok(GammaTable { tilde, gamma, n_intra })
}

/// Result of the M-matrix certificate.
#[derive(Debug, Clone)]
pub struct MMatrixCertificate {
    /// Lyapunov solutions per cluster (`Q = I`), singleton clusters give
    /// empty blocks.
    pub x_blocks: Vec<DMatrix<f64>>,
    /// Largest eigenvalue of each nonempty `X_k`, indexed like `s_clusters`.
    pub lambda_max: Vec<f64>,
    pub gamma: GammaTable,
    /// Comparison matrix over the clusters with intra coordinates.
    pub s: DMatrix<f64>,
    /// Clusters contributing rows of `s` (singletons carry no intra state).
    pub s_clusters: Vec<usize>,
    pub leading_minors: Vec<f64>,
    pub is_m_matrix: bool,
}

/// Sufficient condition on the weights: build
/// `s_kk = 1/lambda_max(X_k) - gamma_kk`, `s_kl = -gamma_kl`, with
/// `J_k^T X_k + X_k J_k = -I`, and test whether `S` is an M-matrix.
/// `Q = I` gives the tightest bound in this family.
pub fn m_matrix_certificate(
    net: &Network,
    part: &Partition,
    tols: &Tolerances,
) -> Result<MMatrixCertificate> {
    require_invariance(net, part, tols)?;
    let structure = build_spanning_structure(net, part)?;
    let intra = jacobian_intra(net, part, &structure, tols)?;
    let gamma = gamma_constants(net, part, tols)?;

    let mut x_blocks = Vec::with_capacity(part.m());
    for jk in &intra.blocks {
        let q = DMatrix::identity(jk.nrows(), jk.ncols());
        x_blocks.push(lyapunov_solve(jk, &q, tols)?);
    }

    let s_clusters: Vec<usize> =
        (0..part.m()).filter(|&k| part.cluster(k).len() > 1).collect();
    let p = s_clusters.len();
    let mut lambda_max = Vec::with_capacity(p);
    let mut s = DMatrix::zeros(p, p);
    for (a, &k) in s_clusters.iter().enumerate() {
        let lmax = x_blocks[k].clone().symmetric_eigen().eigenvalues.max();
        lambda_max.push(lmax);
        for (b, &l) in s_clusters.iter().enumerate() {
            s[(a, b)] = if a == b {
                1.0 / lmax - gamma.gamma[(k, k)]
            } else {
                -gamma.gamma[(k, l)]
            };
        }
    }
    let (ok, leading_minors) = is_m_matrix(&s);
    Ok(MMatrixCertificate {
        x_blocks,
        lambda_max,
        gamma,
        s,
        s_clusters,
        leading_minors,
        is_m_matrix: ok,
    })
}

fn require_invariance(net: &Network, part: &Partition, tols: &Tolerances) -> Result<()> {
    part.validate_for(net)?;
    if !uniform_frequencies(net, part, tols.freq)? {
        return Err(Error::AssumptionViolated(
            "natural frequencies are not uniform within every cluster".into(),
        ));
    }
    let (ok, worst) = equitable_weights(net, part, tols.weights_abs(net.max_abs_weight()))?;
    if !ok {
        return Err(Error::AssumptionViolated(format!(
            "inter-cluster weights are not equitable (worst mismatch {worst:.3e})"
        )));
    }
    Ok(())
}

/// Frequency difference and total inter-cluster coupling of a two-cluster
/// partition: `omega_bar = |omega_2 - omega_1|` and
/// `a_bar = w(1 -> 2) + w(2 -> 1)` (per-node quotient weights).
pub fn two_cluster_rates(net: &Network, part: &Partition) -> Result<(f64, f64)> {
    if part.m() != 2 {
        return Err(Error::Unsupported(format!(
            "two-cluster analysis on {} clusters",
            part.m()
        )));
    }
    let i = part.cluster(0)[0];
    let j = part.cluster(1)[0];
    let omega_bar = (net.omega()[j] - net.omega()[i]).abs();
    let a_bar = crate::network::quotient_weight(net, part, i, 1)
        + crate::network::quotient_weight(net, part, j, 0);
    Ok((omega_bar, a_bar))
}

/// Constant coefficient matrix `K` of the inter-cluster perturbation: the
/// Jacobian of the interaction terms with respect to the intra coordinates
/// along the synchronized trajectory equals `cos(x_inter) * K`.
///
/// Differentiating each `a * sin(tree-path sum)` term at zero intra
/// coordinates leaves `cos(x_inter)` times the path's coefficient pattern;
/// the cosine is even, so the matrix does not depend on the inter edge
/// orientation. Defined here for two clusters only.
pub fn jacobian_inter_coefficient(
    net: &Network,
    part: &Partition,
    structure: &SpanningStructure,
) -> Result<DMatrix<f64>> {
    if part.m() != 2 {
        return Err(Error::Unsupported(
            "inter-cluster Jacobian coefficient requires exactly two clusters".into(),
        ));
    }
    let dim = structure.intra_dim();
    let coeff = structure.potential_coefficients();
    let mut out = DMatrix::zeros(dim, dim);
    let mut row = 0;
    for k in 0..part.m() {
        for e in structure.span_edges(k) {
            let (i, j) = (e.source, e.target);
            for z in 0..net.n() {
                if structure.cluster_of(z) == k {
                    continue;
                }
                let a_jz = net.weight(j, z);
                let a_iz = net.weight(i, z);
                if a_jz == 0.0 && a_iz == 0.0 {
                    continue;
                }
                for c in 0..dim {
                    out[(row, c)] += a_jz * (coeff[(z, c)] - coeff[(j, c)])
                        - a_iz * (coeff[(z, c)] - coeff[(i, c)]);
                }
            }
            row += 1;
        }
    }
    Ok(out)
}

/// Nonlinear inter-cluster interaction terms `G` of the intra dynamics,
/// evaluated at the given tree coordinates. Row order matches the intra
/// coordinate layout.
pub fn g_inter(
    net: &Network,
    structure: &SpanningStructure,
    x_intra: &DVector<f64>,
    x_inter: &DVector<f64>,
) -> DVector<f64> {
    let phi = structure.potentials(x_intra, x_inter);
    let mut out = DVector::zeros(structure.intra_dim());
    let mut row = 0;
    for k in 0..structure.m() {
        for e in structure.span_edges(k) {
            let (i, j) = (e.source, e.target);
            let mut acc = 0.0;
            for z in 0..net.n() {
                if structure.cluster_of(z) == k {
                    continue;
                }
                acc += net.weight(j, z) * (phi[z] - phi[j]).sin()
                    - net.weight(i, z) * (phi[z] - phi[i]).sin();
            }
            out[row] = acc;
            row += 1;
        }
    }
    out
}

/// Dynamical regime of the inter-cluster difference for two clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `omega_bar > a_bar`: the difference follows a limit cycle.
    LimitCycle,
    /// `omega_bar = a_bar` (within tolerance).
    Critical,
    /// `omega_bar < a_bar`: the clusters phase lock.
    PhaseLocked,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::LimitCycle => write!(f, "limit-cycle"),
            Regime::Critical => write!(f, "critical"),
            Regime::PhaseLocked => write!(f, "phase-locked"),
        }
    }
}

pub fn classify_regime(omega_bar: f64, a_bar: f64, tols: &Tolerances) -> Regime {
    let scale = omega_bar.abs().max(a_bar.abs()).max(1.0);
    if (omega_bar - a_bar).abs() <= tols.critical_rel * scale {
        Regime::Critical
    } else if omega_bar > a_bar {
        Regime::LimitCycle
    } else {
        Regime::PhaseLocked
    }
}

/// Result of the two-cluster frequency-difference certificate.
#[derive(Debug, Clone)]
pub struct FrequencyCertificate {
    pub omega_bar: f64,
    pub a_bar: f64,
    pub regime: Regime,
    /// Constant coefficient matrix of the inter perturbation.
    pub j_inter: DMatrix<f64>,
    pub j_inter_norm: f64,
    pub j_intra_norm: f64,
    pub lambda_max_x: f64,
    /// `((omega_bar + a_bar) / (omega_bar - a_bar))^(2 |J_inter| / a_bar)`.
    pub lhs: f64,
    /// `1 + 1 / (2 lambda_max(X) |J_intra|)`.
    pub rhs: f64,
    /// Certificate verdict; only meaningful in the limit-cycle regime.
    pub holds: bool,
}

/// Sufficient condition on weights and frequencies for two clusters. Only
/// the limit-cycle regime (`omega_bar > a_bar`) admits the certificate; the
/// other regimes are reported without one.
pub fn frequency_certificate(
    net: &Network,
    part: &Partition,
    tols: &Tolerances,
) -> Result<FrequencyCertificate> {
    require_invariance(net, part, tols)?;
    let (omega_bar, a_bar) = two_cluster_rates(net, part)?;
    let structure = build_spanning_structure(net, part)?;
    let intra = jacobian_intra(net, part, &structure, tols)?;
    let j_inter = jacobian_inter_coefficient(net, part, &structure)?;
    let j_inter_norm = spectral_norm(&j_inter);
    let j_intra_norm = intra.norm;

    let regime = classify_regime(omega_bar, a_bar, tols);
    let dim = intra.assembled.nrows();
    let (lambda_max_x, rhs) = if dim == 0 {
        (0.0, f64::INFINITY)
    } else {
        let x = lyapunov_solve(&intra.assembled, &DMatrix::identity(dim, dim), tols)?;
        let lmax = x.symmetric_eigen().eigenvalues.max();
        (lmax, 1.0 + 1.0 / (2.0 * lmax * j_intra_norm))
    };

    let lhs = if regime != Regime::LimitCycle {
        f64::NAN
    } else if a_bar == 0.0 {
        // No inter-cluster coupling: the perturbation vanishes.
        1.0
    } else {
        ((omega_bar + a_bar) / (omega_bar - a_bar)).powf(2.0 * j_inter_norm / a_bar)
    };
    let holds = regime == Regime::LimitCycle && lhs < rhs;

    Ok(FrequencyCertificate {
        omega_bar,
        a_bar,
        regime,
        j_inter,
        j_inter_norm,
        j_intra_norm,
        lambda_max_x,
        lhs,
        rhs,
        holds,
    })
}

/// Homogeneity test on the intra dynamics.
#[derive(Debug, Clone, Serialize)]
pub struct HomogeneityCheck {
    /// `trace(J_intra) / dim`.
    pub alpha: f64,
    /// `|J_intra - alpha I|` (spectral).
    pub deviation: f64,
    pub holds: bool,
}

/// Two-cluster sufficient condition: the manifold is stable whenever
/// `J_intra = alpha I` with `alpha < 0`, independently of the inter weights
/// and frequencies.
pub fn homogeneous_intra_certificate(intra: &IntraJacobian, tols: &Tolerances) -> HomogeneityCheck {
    let dim = intra.assembled.nrows();
    if dim == 0 {
        return HomogeneityCheck { alpha: 0.0, deviation: 0.0, holds: false };
    }
    let alpha = intra.assembled.trace() / dim as f64;
    let deviation =
        spectral_norm(&(&intra.assembled - DMatrix::identity(dim, dim) * alpha));
    let tol = tols.homogeneous_rel * (1.0 + intra.norm);
    HomogeneityCheck { alpha, deviation, holds: alpha < 0.0 && deviation <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn example_structure(
        net: &Network,
        part: &Partition,
    ) -> (SpanningStructure, IntraJacobian) {
        let s = build_spanning_structure(net, part).unwrap();
        let j = jacobian_intra(net, part, &s, &tols()).unwrap();
        (s, j)
    }

    #[test]
    fn two_node_cluster_block_is_minus_twice_weight() {
        let a = 0.8;
        let net = Network::from_edges(
            4,
            &[(0, 1, a), (2, 3, a), (0, 2, 0.1), (1, 3, 0.1)],
            vec![1.0, 1.0, 2.0, 2.0],
        )
        .unwrap();
        let part = Partition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let (_, intra) = example_structure(&net, &part);
        assert_eq!(intra.blocks[0].nrows(), 1);
        assert!((intra.blocks[0][(0, 0)] + 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn path_cluster_spectrum_is_one_and_three_times_weight() {
        let alpha = 0.6;
        let (net, part) = scenarios::two_path_clusters(alpha, alpha, 0.2, 1.0, 6.0);
        let (_, intra) = example_structure(&net, &part);
        let mut eigs: Vec<f64> = intra.eigenvalues[0].iter().map(|l| l.re).collect();
        eigs.sort_by(f64::total_cmp);
        assert!((eigs[0] + 3.0 * alpha).abs() < 1e-10);
        assert!((eigs[1] + alpha).abs() < 1e-10);
    }

    #[test]
    fn triangle_cluster_block_is_scalar_matrix() {
        let alpha = 0.9;
        let (net, part) = scenarios::two_triangle_clusters(alpha, alpha, 0.1, 1.0, 6.0);
        let (_, intra) = example_structure(&net, &part);
        let expected = DMatrix::identity(2, 2) * (-3.0 * alpha);
        assert!((intra.blocks[0].clone() - expected).abs().max() < 1e-12);
    }

    #[test]
    fn scalar_lyapunov_solution() {
        let a = 1.7;
        let j = DMatrix::from_element(1, 1, -2.0 * a);
        let q = DMatrix::identity(1, 1);
        let x = lyapunov_solve(&j, &q, &tols()).unwrap();
        assert!((x[(0, 0)] - 1.0 / (4.0 * a)).abs() < 1e-14);
    }

    #[test]
    fn lyapunov_rejects_unstable_coefficient() {
        let j = DMatrix::from_element(1, 1, 0.5);
        let q = DMatrix::identity(1, 1);
        assert!(matches!(
            lyapunov_solve(&j, &q, &tols()),
            Err(Error::LyapunovUnstable(_))
        ));
    }

    #[test]
    fn path_cluster_lyapunov_lambda_max_inverse_is_twice_weight() {
        let alpha = 1.3;
        let (net, part) = scenarios::two_path_clusters(alpha, alpha, 0.2, 1.0, 6.0);
        let report = m_matrix_certificate(&net, &part, &tols()).unwrap();
        for lmax in &report.lambda_max {
            assert!((1.0 / lmax - 2.0 * alpha).abs() < 1e-9);
        }
    }

    #[test]
    fn gamma_table_of_path_scenario_is_four_beta() {
        let beta = 0.35;
        let (net, part) = scenarios::two_path_clusters(1.0, 1.0, beta, 1.0, 6.0);
        let g = gamma_constants(&net, &part, &tols()).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                assert!((g.gamma[(k, l)] - 4.0 * beta).abs() < 1e-12, "({k}, {l})");
            }
        }
        // With equal cluster sizes the table is symmetric.
        assert!((g.gamma[(0, 1)] - g.gamma[(1, 0)]).abs() < 1e-15);
    }

    #[test]
    fn gamma_vanishes_without_inter_edges() {
        // Balance holds trivially (all quotient weights zero), so the gain
        // table is defined and identically zero even though the network is
        // disconnected.
        let net = Network::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)], vec![1.0, 1.0, 2.0, 2.0])
            .unwrap();
        let part = Partition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let g = gamma_constants(&net, &part, &tols()).unwrap();
        assert_eq!(g.gamma.abs().max(), 0.0);
    }

    #[test]
    fn gamma_requires_equitable_weights() {
        let net = Network::from_edges(
            3,
            &[(0, 1, 1.0), (0, 2, 1.0)],
            vec![1.0, 1.0, 5.0],
        )
        .unwrap();
        let part = Partition::new(vec![vec![0, 1], vec![2]]).unwrap();
        assert!(matches!(
            gamma_constants(&net, &part, &tols()),
            Err(Error::AssumptionViolated(_))
        ));
    }

    #[test]
    fn comparison_matrix_matches_hand_formula() {
        let (alpha, beta) = (1.0, 0.1);
        let (net, part) = scenarios::two_path_clusters(alpha, alpha, beta, 1.0, 6.0);
        let report = m_matrix_certificate(&net, &part, &tols()).unwrap();
        let expected = DMatrix::from_row_slice(
            2,
            2,
            &[
                2.0 * alpha - 4.0 * beta,
                -4.0 * beta,
                -4.0 * beta,
                2.0 * alpha - 4.0 * beta,
            ],
        );
        assert!((report.s.clone() - expected).abs().max() < 1e-9);
        assert!(report.is_m_matrix);
    }

    #[test]
    fn m_matrix_threshold_is_alpha_over_beta_four() {
        for &(alpha, beta, expect) in
            &[(1.0, 0.2, true), (1.0, 0.26, false), (2.0, 0.49, true), (2.0, 0.51, false)]
        {
            let (net, part) = scenarios::two_path_clusters(alpha, alpha, beta, 1.0, 6.0);
            let report = m_matrix_certificate(&net, &part, &tols()).unwrap();
            assert_eq!(report.is_m_matrix, expect, "alpha={alpha} beta={beta}");
        }
    }

    #[test]
    fn diagonal_positive_matrix_passes_m_test() {
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 2.0, 1.0]));
        let (ok, minors) = is_m_matrix(&s);
        assert!(ok);
        assert_eq!(minors.len(), 3);
    }

    #[test]
    fn m_matrix_survives_nonnegative_diagonal_perturbation() {
        let (net, part) = scenarios::two_path_clusters(1.0, 1.0, 0.1, 1.0, 6.0);
        let report = m_matrix_certificate(&net, &part, &tols()).unwrap();
        assert!(report.is_m_matrix);
        let mut s = report.s.clone();
        s[(0, 0)] += 0.7;
        s[(1, 1)] += 0.01;
        assert!(is_m_matrix(&s).0);
    }

    #[test]
    fn inter_coefficient_matches_hand_pattern_for_path_scenario() {
        let beta = 0.4;
        let (net, part) = scenarios::two_path_clusters(1.0, 1.0, beta, 1.0, 6.0);
        let s = build_spanning_structure(&net, &part).unwrap();
        let j = jacobian_inter_coefficient(&net, &part, &s).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                -1.0, 0.0, 1.0, 0.0, //
                0.0, -1.0, 0.0, 1.0, //
                1.0, 0.0, -1.0, 0.0, //
                0.0, 1.0, 0.0, -1.0,
            ],
        ) * beta;
        assert!((j - expected).abs().max() < 1e-12);
    }

    #[test]
    fn inter_coefficient_scales_linearly_with_inter_weight() {
        let (net1, part) = scenarios::two_path_clusters(1.0, 1.0, 1.0, 1.0, 6.0);
        let (net2, _) = scenarios::two_path_clusters(1.0, 1.0, 0.5, 1.0, 6.0);
        let s1 = build_spanning_structure(&net1, &part).unwrap();
        let s2 = build_spanning_structure(&net2, &part).unwrap();
        let j1 = jacobian_inter_coefficient(&net1, &part, &s1).unwrap();
        let j2 = jacobian_inter_coefficient(&net2, &part, &s2).unwrap();
        assert!((j1 * 0.5 - j2).abs().max() < 1e-12);
    }

    #[test]
    fn frequency_certificate_on_strong_frequency_gap() {
        // alpha1 = alpha2 = beta = 1, omega = (1, 47): hand-computed
        // lhs = (48/44)^2 and rhs = 4/3.
        let (net, part) = scenarios::two_path_clusters(1.0, 1.0, 1.0, 1.0, 47.0);
        let cert = frequency_certificate(&net, &part, &tols()).unwrap();
        assert_eq!(cert.regime, Regime::LimitCycle);
        assert!((cert.omega_bar - 46.0).abs() < 1e-12);
        assert!((cert.a_bar - 2.0).abs() < 1e-12);
        assert!((cert.j_inter_norm - 2.0).abs() < 1e-9);
        assert!((cert.j_intra_norm - 3.0).abs() < 1e-9);
        assert!((cert.lambda_max_x - 0.5).abs() < 1e-9);
        assert!((cert.lhs - (48.0_f64 / 44.0).powi(2)).abs() < 1e-9);
        assert!((cert.rhs - 4.0 / 3.0).abs() < 1e-9);
        assert!(cert.holds);
    }

    #[test]
    fn frequency_certificate_vanishing_inter_coupling_holds() {
        let (net, part) = scenarios::two_path_clusters(1.0, 1.0, 1e-9, 1.0, 6.0);
        let cert = frequency_certificate(&net, &part, &tols()).unwrap();
        assert!(cert.lhs < cert.rhs);
        assert!(cert.holds);
    }

    #[test]
    fn frequency_certificate_large_gap_holds() {
        let (net, part) = scenarios::two_path_clusters(1.0, 1.0, 1.0, 1.0, 1.0e4);
        let cert = frequency_certificate(&net, &part, &tols()).unwrap();
        assert!(cert.holds);
        assert!(cert.lhs < 1.01);
    }

    #[test]
    fn phase_locked_regime_reports_no_certificate() {
        let (net, part) = scenarios::two_path_clusters(1.0, 1.0, 1.0, 1.0, 2.0);
        let cert = frequency_certificate(&net, &part, &tols()).unwrap();
        assert_eq!(cert.regime, Regime::PhaseLocked);
        assert!(!cert.holds);
    }

    #[test]
    fn critical_rate_balance_is_detected() {
        // omega_bar = 2 = a_bar (beta = 1).
        let (net, part) = scenarios::two_path_clusters(1.0, 1.0, 1.0, 1.0, 3.0);
        let cert = frequency_certificate(&net, &part, &tols()).unwrap();
        assert_eq!(cert.regime, Regime::Critical);
        assert!(!cert.holds);
    }

    #[test]
    fn asymmetric_flag_reproduces_symmetric_blocks_and_demands_hurwitz() {
        use nalgebra::{DMatrix, DVector};
        // The same symmetric network through both construction paths.
        let (sym, part) = scenarios::two_path_clusters(1.0, 0.5, 0.2, 1.0, 6.0);
        let asym =
            Network::new_asymmetric(sym.adjacency().clone(), sym.omega().clone()).unwrap();
        let s_sym = build_spanning_structure(&sym, &part).unwrap();
        let s_asym = build_spanning_structure(&asym, &part).unwrap();
        let a = jacobian_intra(&sym, &part, &s_sym, &tols()).unwrap();
        let b = jacobian_intra(&asym, &part, &s_asym, &tols()).unwrap();
        assert!((a.assembled.clone() - b.assembled.clone()).abs().max() < 1e-10);

        // Two leaders that listen to nobody inside their cluster: the
        // cluster Laplacian gains a second zero eigenvalue, the block is
        // only marginally stable, and the analysis must refuse.
        let mut adj = DMatrix::zeros(5, 5);
        adj[(2, 0)] = 1.0; // node 3 listens to both leaders
        adj[(2, 1)] = 1.0;
        adj[(3, 4)] = 0.5;
        adj[(4, 3)] = 0.5;
        adj[(0, 3)] = 0.1;
        adj[(3, 0)] = 0.1;
        let bad = Network::new_asymmetric(
            adj,
            DVector::from_vec(vec![1.0, 1.0, 1.0, 2.0, 2.0]),
        )
        .unwrap();
        let part = Partition::new(vec![vec![0, 1, 2], vec![3, 4]]).unwrap();
        let s = build_spanning_structure(&bad, &part).unwrap();
        assert!(matches!(
            jacobian_intra(&bad, &part, &s, &tols()),
            Err(Error::AssumptionViolated(_))
        ));
    }

    #[test]
    fn homogeneity_holds_for_pair_clusters() {
        let a = 0.8;
        let net = Network::from_edges(
            4,
            &[(0, 1, a), (2, 3, a), (0, 2, 0.3), (1, 3, 0.3)],
            vec![1.0, 1.0, 2.0, 2.0],
        )
        .unwrap();
        let part = Partition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let (_, intra) = example_structure(&net, &part);
        let check = homogeneous_intra_certificate(&intra, &tols());
        assert!(check.holds);
        assert!((check.alpha + 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn homogeneity_holds_for_equal_triangle_clusters() {
        let (net, part) = scenarios::two_triangle_clusters(1.0, 1.0, 0.1, 1.0, 6.0);
        let (_, intra) = example_structure(&net, &part);
        assert!(homogeneous_intra_certificate(&intra, &tols()).holds);
    }

    #[test]
    fn homogeneity_fails_for_path_clusters_and_mixed_weights() {
        // Path-cluster blocks are not scalar even with equal weights.
        let (net, part) = scenarios::two_path_clusters(1.0, 1.0, 0.1, 1.0, 6.0);
        let (_, intra) = example_structure(&net, &part);
        assert!(!homogeneous_intra_certificate(&intra, &tols()).holds);

        let (net, part) = scenarios::two_triangle_clusters(1.0, 0.5, 0.1, 1.0, 6.0);
        let (_, intra) = example_structure(&net, &part);
        assert!(!homogeneous_intra_certificate(&intra, &tols()).holds);
    }

    #[test]
    fn certificate_verdict_invariant_under_tree_choice() {
        use crate::graph::{build_with_trees, Edge};
        let (net, part) = scenarios::two_triangle_clusters(1.0, 1.0, 0.1, 1.0, 6.0);
        let default_report = m_matrix_certificate(&net, &part, &tols()).unwrap();

        // Alternative trees: paths instead of the BFS stars.
        let trees = vec![
            vec![Edge::new(0, 1), Edge::new(1, 2)],
            vec![Edge::new(3, 4), Edge::new(4, 5)],
        ];
        let inter = vec![Edge::new(2, 5)];
        let alt = build_with_trees(&net, &part, &trees, &inter).unwrap();
        let intra_alt = jacobian_intra(&net, &part, &alt, &tols()).unwrap();
        let gamma = gamma_constants(&net, &part, &tols()).unwrap();
        let mut s = DMatrix::zeros(2, 2);
        for k in 0..2 {
            let q = DMatrix::identity(2, 2);
            let x = lyapunov_solve(&intra_alt.blocks[k], &q, &tols()).unwrap();
            let lmax = x.symmetric_eigen().eigenvalues.max();
            assert!((lmax - default_report.lambda_max[k]).abs() < 1e-8);
            for l in 0..2 {
                s[(k, l)] = if k == l {
                    1.0 / lmax - gamma.gamma[(k, k)]
                } else {
                    -gamma.gamma[(k, l)]
                };
            }
        }
        assert_eq!(is_m_matrix(&s).0, default_report.is_m_matrix);
    }
}
