//! Shared helpers for the integration suites.

use cluster_sync::network::{Network, Partition};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected weighted graph on `n` nodes: a random tree plus extra
/// edges with the given probability, weights uniform in `[0.5, 2]`.
pub fn random_connected_graph(
    n: usize,
    extra_edge_prob: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    let mut present = std::collections::BTreeSet::new();
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        present.insert((parent, v));
        edges.push((parent, v, rng.gen_range(0.5..2.0)));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !present.contains(&(i, j)) && rng.gen_bool(extra_edge_prob) {
                edges.push((i, j, rng.gen_range(0.5..2.0)));
            }
        }
    }
    edges
}

/// Wraps a random cluster graph into a two-cluster network (the second
/// cluster is a dummy pair tied to node 0) so the structure machinery can
/// run on it. The partition is `[0..n, {n, n+1}]`.
pub fn cluster_under_test(
    cluster_edges: &[(usize, usize, f64)],
    n: usize,
) -> (Network, Partition) {
    let mut edges = cluster_edges.to_vec();
    edges.push((n, n + 1, 1.0));
    edges.push((0, n, 0.1));
    let mut omega = vec![1.0; n];
    omega.extend_from_slice(&[5.0, 5.0]);
    let net = Network::from_edges(n + 2, &edges, omega).unwrap();
    let part = Partition::new(vec![(0..n).collect(), vec![n, n + 1]]).unwrap();
    (net, part)
}
