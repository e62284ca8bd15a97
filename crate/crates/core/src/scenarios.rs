//! Bundled benchmark networks.
//!
//! Each builder returns a network/partition pair used across the test
//! suites and shipped as an input file by `write_all`. Weights follow the
//! parameter names used throughout: `alpha` for intra-cluster coupling,
//! `beta` for inter-cluster coupling.

use nalgebra::DVector;

use crate::error::Result;
use crate::io::NetworkFile;
use crate::network::{Network, Partition};

fn build(n: usize, edges: &[(usize, usize, f64)], omega: Vec<f64>, clusters: Vec<Vec<usize>>) -> (Network, Partition) {
    let net = Network::from_edges(n, edges, omega).expect("scenario network is well formed");
    let part = Partition::new(clusters).expect("scenario partition is well formed");
    (net, part)
}

/// Two 3-node path clusters bridged by a perfect matching: cluster
/// `{1,2,3}` is the path `1-2-3` with weight `alpha1`, cluster `{4,5,6}`
/// the path `4-5-6` with weight `alpha2`, and the matching
/// `{(1,4), (2,5), (3,6)}` carries weight `beta`. Every node sends total
/// weight `beta` into the other cluster, so the partition is equitable for
/// any parameter values.
pub fn two_path_clusters(
    alpha1: f64,
    alpha2: f64,
    beta: f64,
    omega1: f64,
    omega2: f64,
) -> (Network, Partition) {
    build(
        6,
        &[
            (0, 1, alpha1),
            (1, 2, alpha1),
            (3, 4, alpha2),
            (4, 5, alpha2),
            (0, 3, beta),
            (1, 4, beta),
            (2, 5, beta),
        ],
        vec![omega1, omega1, omega1, omega2, omega2, omega2],
        vec![vec![0, 1, 2], vec![3, 4, 5]],
    )
}

/// Variant with triangle clusters instead of paths; with `alpha1 = alpha2`
/// the intra Jacobian is a negative multiple of the identity.
pub fn two_triangle_clusters(
    alpha1: f64,
    alpha2: f64,
    beta: f64,
    omega1: f64,
    omega2: f64,
) -> (Network, Partition) {
    build(
        6,
        &[
            (0, 1, alpha1),
            (0, 2, alpha1),
            (1, 2, alpha1),
            (3, 4, alpha2),
            (3, 5, alpha2),
            (4, 5, alpha2),
            (0, 3, beta),
            (1, 4, beta),
            (2, 5, beta),
        ],
        vec![omega1, omega1, omega1, omega2, omega2, omega2],
        vec![vec![0, 1, 2], vec![3, 4, 5]],
    )
}

/// Six oscillators in two path clusters joined by two rotated matchings
/// with independent weights `beta1`, `beta2`. The weight balance holds for
/// every positive draw of the six parameters, while the graph has no
/// nontrivial automorphism for generic values.
pub fn automorphism_free(alphas: [f64; 4], betas: [f64; 2]) -> (Network, Partition) {
    let [a1, a2, a3, a4] = alphas;
    let [b1, b2] = betas;
    build(
        6,
        &[
            (0, 1, a1),
            (1, 2, a2),
            (3, 4, a3),
            (4, 5, a4),
            (0, 3, b1),
            (1, 4, b1),
            (2, 5, b1),
            (0, 4, b2),
            (1, 5, b2),
            (2, 3, b2),
        ],
        vec![1.0, 1.0, 1.0, 6.0, 6.0, 6.0],
        vec![vec![0, 1, 2], vec![3, 4, 5]],
    )
}

/// Nine oscillators in three clusters with unequal frequencies. The
/// matching between clusters 1 and 2 (weight 3) and between 2 and 3
/// (weight 5) keeps the partition equitable; the frequency gaps are small
/// relative to the couplings, so pairs of clusters can lock to a common
/// trajectory even while the partition synchronizes.
pub fn submanifold_demo() -> (Network, Partition) {
    build(
        9,
        &[
            // Cluster {1,2,3}: triangle.
            (0, 1, 1.0),
            (0, 2, 1.0),
            (1, 2, 1.0),
            // Cluster {4,5,6}: path.
            (3, 4, 1.0),
            (4, 5, 1.0),
            // Cluster {7,8,9}: star from 7.
            (6, 7, 1.0),
            (6, 8, 1.0),
            // Matchings.
            (0, 3, 3.0),
            (1, 4, 3.0),
            (2, 5, 3.0),
            (3, 6, 5.0),
            (4, 7, 5.0),
            (5, 8, 5.0),
        ],
        vec![4.0, 4.0, 4.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0],
        vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]],
    )
}

/// Nine-node network for exercising the spanning-tree coordinates: a
/// triangle, a path, and a star cluster joined by the two bridges `(3,6)`
/// and `(4,7)` (1-based). The bridges tie only single nodes, so the weight
/// balance intentionally fails here; the file documents coordinate layout,
/// not invariance.
pub fn structure_demo() -> (Network, Partition) {
    build(
        9,
        &[
            (0, 1, 1.0),
            (0, 2, 1.0),
            (1, 2, 1.0),
            (3, 4, 1.0),
            (4, 5, 1.0),
            (6, 7, 1.0),
            (6, 8, 1.0),
            (2, 5, 1.0),
            (3, 6, 1.0),
        ],
        vec![1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0, 3.0, 3.0],
        vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]],
    )
}

/// Circulant band ring on `2 * n_half` nodes: unit edges between nodes at
/// circular distance 1 and 2. Odd 1-based positions form one cluster with
/// frequency `omega1`, even positions the other with `omega2`. Besides the
/// synchronization manifold, the staircase pattern
/// `theta_{i+2} = theta_i + 2 pi / n_half` is invariant.
pub fn band_ring(n_half: usize, omega1: f64, omega2: f64) -> (Network, Partition) {
    assert!(n_half >= 2, "band ring needs at least 4 nodes");
    let n = 2 * n_half;
    let mut edges = std::collections::BTreeSet::new();
    for i in 0..n {
        for d in 1..=2usize {
            let j = (i + d) % n;
            let (a, b) = (i.min(j), i.max(j));
            if a != b {
                edges.insert((a, b));
            }
        }
    }
    let edges: Vec<(usize, usize, f64)> =
        edges.into_iter().map(|(a, b)| (a, b, 1.0)).collect();
    let omega = (0..n).map(|i| if i % 2 == 0 { omega1 } else { omega2 }).collect();
    let clusters = vec![
        (0..n).step_by(2).collect::<Vec<_>>(),
        (1..n).step_by(2).collect::<Vec<_>>(),
    ];
    build(n, &edges, omega, clusters)
}

/// A point on the staircase pattern of the band ring.
pub fn band_ring_pattern_point(n_half: usize) -> DVector<f64> {
    let n = 2 * n_half;
    let offset = std::f64::consts::TAU / n_half as f64;
    DVector::from_fn(n, |i, _| (i / 2) as f64 * offset)
}

/// Ten identical oscillators (frequency 3, unit weights) in five pair
/// clusters arranged on a ring: each cluster couples to its two ring
/// neighbors through a perfect matching. Cluster synchronization arises
/// here without any frequency or weight heterogeneity, which puts the
/// configuration outside the reach of the certificates; shipped as a
/// simulation scenario only.
pub fn identical_oscillators() -> (Network, Partition) {
    let mut edges = Vec::new();
    for k in 0..5usize {
        let (a, b) = (2 * k, 2 * k + 1);
        edges.push((a, b, 1.0));
        let (na, nb) = ((2 * k + 2) % 10, (2 * k + 3) % 10);
        edges.push((a.min(na), a.max(na), 1.0));
        edges.push((b.min(nb), b.max(nb), 1.0));
    }
    build(
        10,
        &edges,
        vec![3.0; 10],
        (0..5).map(|k| vec![2 * k, 2 * k + 1]).collect(),
    )
}

/// Writes every bundled scenario into `dir` and returns the paths.
pub fn write_all(dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    let entries: Vec<(&str, (Network, Partition), &str)> = vec![
        (
            "two_path_clusters.json",
            two_path_clusters(1.0, 1.0, 1.0, 1.0, 6.0),
            "Two 3-node path clusters (alpha1 = alpha2 = 1) bridged by a unit matching \
             (beta = 1); cluster frequencies 1 and 6. Scale the weights to explore the \
             alpha/beta stability tradeoff.",
        ),
        (
            "automorphism_free.json",
            automorphism_free([0.7, 1.3, 0.9, 1.1], [0.4, 0.6]),
            "Two path clusters joined by two rotated matchings. The inter-cluster \
             weight balance holds for every positive choice of the six weights even \
             though the graph has no nontrivial automorphism.",
        ),
        (
            "submanifold_demo.json",
            submanifold_demo(),
            "Three clusters with frequencies 4, 2, 6 and strong matchings (weights 3 \
             and 5). The frequency gaps are too small for the pair-exclusion margins, \
             and simulations show two clusters locking onto a common trajectory.",
        ),
        (
            "structure_demo.json",
            structure_demo(),
            "Triangle, path, and star clusters tied by the bridges (3,6) and (4,7); \
             illustrates the spanning-tree coordinate layout. The bridges attach to \
             single nodes, so the inter-cluster weight balance fails by design.",
        ),
        (
            "band_ring.json",
            band_ring(5, 1.0, 3.0),
            "Ten-node circulant ring coupling neighbors at distance 1 and 2 with unit \
             weight; odd positions run at frequency 1, even at 3. The staircase \
             pattern theta_{i+2} = theta_i + 2 pi / 5 is invariant alongside the \
             synchronization manifold.",
        ),
        (
            "identical_oscillators.json",
            identical_oscillators(),
            "Five pair clusters of identical oscillators (frequency 3, unit weights) \
             on a matching ring. Cluster synchronization without heterogeneity; not \
             covered by the certificates, simulation only.",
        ),
    ];
    for (name, (net, part), comment) in entries {
        let path = dir.join(name);
        NetworkFile::from_model(&net, &part, Some(comment.to_string())).save(&path)?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{equitable_weights, run_checks, uniform_frequencies};
    use crate::Tolerances;

    #[test]
    fn path_scenario_satisfies_invariance_conditions() {
        let (net, part) = two_path_clusters(1.0, 0.5, 0.3, 1.0, 6.0);
        assert!(net.validate().is_empty());
        assert!(uniform_frequencies(&net, &part, 1e-12).unwrap());
        assert!(equitable_weights(&net, &part, 1e-9).unwrap().0);
    }

    #[test]
    fn submanifold_demo_is_equitable_but_not_excluded() {
        let (net, part) = submanifold_demo();
        let report = run_checks(&net, &part, &Tolerances::default()).unwrap();
        assert!(report.uniform_frequencies);
        assert!(report.equitable_weights);
        assert!(!report.submanifold_excluded);
        // The 4-vs-2 pair margin: |4 - 2| - 2 * max(0, 5) = -8.
        let pair = report.pair_margins.iter().find(|p| (p.a, p.b) == (0, 1)).unwrap();
        assert!((pair.margin + 8.0).abs() < 1e-12);
    }

    #[test]
    fn band_ring_is_equitable_for_any_size() {
        for n_half in 2..=6 {
            let (net, part) = band_ring(n_half, 1.0, 3.0);
            assert!(net.validate().is_empty(), "n_half = {n_half}");
            assert!(equitable_weights(&net, &part, 1e-9).unwrap().0);
        }
    }

    #[test]
    fn identical_oscillator_ring_is_equitable() {
        let (net, part) = identical_oscillators();
        assert!(net.validate().is_empty());
        assert!(uniform_frequencies(&net, &part, 1e-12).unwrap());
        assert!(equitable_weights(&net, &part, 1e-9).unwrap().0);
    }

    #[test]
    fn files_round_trip() {
        let dir = std::env::temp_dir().join(format!("scenarios-{}", std::process::id()));
        let paths = write_all(&dir).unwrap();
        assert_eq!(paths.len(), 6);
        for path in &paths {
            let file = NetworkFile::load(path).unwrap();
            file.to_model().unwrap();
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
