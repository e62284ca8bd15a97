//! Networks of Kuramoto oscillators, cluster partitions, and the standing
//! invariance checks.
//!
//! An oscillator network is a weighted graph with per-node natural
//! frequencies; the dynamics of node `i` are
//!
//! ```text
//! theta_i' = omega_i + sum_j a_ij * sin(theta_j - theta_i)
//! ```
//!
//! A partition of the nodes into clusters defines the cluster
//! synchronization manifold (all phases equal within each cluster). The
//! manifold is invariant when
//!
//! * frequencies are uniform within each cluster, and
//! * the weights are externally equitable: every node of a cluster carries
//!   the same total weight into each other cluster.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// A weighted oscillator network.
///
/// Weights are nonnegative with zero diagonal; the adjacency is symmetric
/// unless the network was built with [`Network::new_asymmetric`].
#[derive(Debug, Clone)]
pub struct Network {
    adjacency: DMatrix<f64>,
    omega: DVector<f64>,
    allow_asymmetric: bool,
}

impl Network {
    pub fn new(adjacency: DMatrix<f64>, omega: DVector<f64>) -> Result<Self> {
        Self::build(adjacency, omega, false)
    }

    /// Accepts a non-symmetric adjacency (bidirected couplings). Stability
    /// certificates then require the intra-cluster Jacobian to be verified
    /// Hurwitz instead of relying on symmetry.
    pub fn new_asymmetric(adjacency: DMatrix<f64>, omega: DVector<f64>) -> Result<Self> {
        Self::build(adjacency, omega, true)
    }

    fn build(adjacency: DMatrix<f64>, omega: DVector<f64>, allow_asymmetric: bool) -> Result<Self> {
        if adjacency.nrows() != adjacency.ncols() {
            return Err(Error::InvalidNetwork(format!(
                "adjacency must be square, got {}x{}",
                adjacency.nrows(),
                adjacency.ncols()
            )));
        }
        if adjacency.nrows() == 0 {
            return Err(Error::InvalidNetwork("network has no nodes".into()));
        }
        if omega.len() != adjacency.nrows() {
            return Err(Error::InvalidNetwork(format!(
                "omega has {} entries for {} nodes",
                omega.len(),
                adjacency.nrows()
            )));
        }
        Ok(Self { adjacency, omega, allow_asymmetric })
    }

    /// Builds a symmetric network from an undirected edge list (0-based).
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)], omega: Vec<f64>) -> Result<Self> {
        let mut a = DMatrix::zeros(n, n);
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidNetwork(format!("self-loop at node {i}")));
            }
            if a[(i, j)] != 0.0 {
                return Err(Error::InvalidNetwork(format!("duplicate edge ({i}, {j})")));
            }
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        Self::new(a, DVector::from_vec(omega))
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn omega(&self) -> &DVector<f64> {
        &self.omega
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency[(i, j)]
    }

    pub fn allow_asymmetric(&self) -> bool {
        self.allow_asymmetric
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.adjacency.iter().fold(0.0_f64, |m, &w| m.max(w.abs()))
    }

    /// Reports every violated network invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.n();
        let mut out = Vec::new();
        if n < 2 {
            out.push(Violation::TooSmall { n });
        }
        for i in 0..n {
            if self.adjacency[(i, i)] != 0.0 {
                out.push(Violation::SelfLoop { i, weight: self.adjacency[(i, i)] });
            }
            if self.omega[i] <= 0.0 {
                out.push(Violation::NonPositiveFrequency { i, omega: self.omega[i] });
            }
            for j in 0..n {
                if self.adjacency[(i, j)] < 0.0 {
                    out.push(Violation::NegativeWeight { i, j, weight: self.adjacency[(i, j)] });
                }
            }
        }
        if !self.allow_asymmetric {
            for i in 0..n {
                for j in (i + 1)..n {
                    let (aij, aji) = (self.adjacency[(i, j)], self.adjacency[(j, i)]);
                    if aij != aji {
                        out.push(Violation::Asymmetric { i, j, a_ij: aij, a_ji: aji });
                    }
                }
            }
        }
        if !self.is_connected() {
            out.push(Violation::Disconnected { component: self.component_of(0) });
        }
        out
    }

    /// Connectivity of the graph induced by nonzero entries (either
    /// direction counts as an edge).
    pub fn is_connected(&self) -> bool {
        self.component_of(0).len() == self.n()
    }

    fn component_of(&self, start: usize) -> Vec<usize> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for (v, visited) in seen.iter_mut().enumerate() {
                if !*visited && (self.adjacency[(u, v)] != 0.0 || self.adjacency[(v, u)] != 0.0) {
                    *visited = true;
                    queue.push_back(v);
                }
            }
        }
        (0..n).filter(|&v| seen[v]).collect()
    }

    /// Copy with all intra-cluster weights scaled by `intra_factor` and all
    /// inter-cluster weights by `inter_factor`. Used by parameter sweeps.
    pub fn scale_weights(&self, part: &Partition, intra_factor: f64, inter_factor: f64) -> Network {
        let cluster_of = part.cluster_index_map(self.n());
        let mut a = self.adjacency.clone();
        for i in 0..self.n() {
            for j in 0..self.n() {
                if i == j {
                    continue;
                }
                let f = if cluster_of[i] == cluster_of[j] { intra_factor } else { inter_factor };
                a[(i, j)] *= f;
            }
        }
        Network { adjacency: a, omega: self.omega.clone(), allow_asymmetric: self.allow_asymmetric }
    }

    /// Copy with the per-cluster frequencies replaced (cluster order).
    pub fn with_cluster_frequencies(&self, part: &Partition, freqs: &[f64]) -> Result<Network> {
        if freqs.len() != part.m() {
            return Err(Error::InvalidPartition(format!(
                "{} frequencies for {} clusters",
                freqs.len(),
                part.m()
            )));
        }
        let mut omega = self.omega.clone();
        for (k, cluster) in part.clusters().iter().enumerate() {
            for &i in cluster {
                omega[i] = freqs[k];
            }
        }
        Ok(Network { adjacency: self.adjacency.clone(), omega, allow_asymmetric: self.allow_asymmetric })
    }
}

/// A single violated network invariant. Indices are 0-based; `Display`
/// prints them 1-based to match the file format.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooSmall { n: usize },
    SelfLoop { i: usize, weight: f64 },
    Asymmetric { i: usize, j: usize, a_ij: f64, a_ji: f64 },
    NegativeWeight { i: usize, j: usize, weight: f64 },
    NonPositiveFrequency { i: usize, omega: f64 },
    Disconnected { component: Vec<usize> },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::TooSmall { n } => write!(f, "network has {n} node(s); at least 2 required"),
            Violation::SelfLoop { i, weight } => {
                write!(f, "self-loop at node {} (weight {})", i + 1, weight)
            }
            Violation::Asymmetric { i, j, a_ij, a_ji } => write!(
                f,
                "asymmetric weights at ({}, {}): a_ij = {}, a_ji = {}",
                i + 1,
                j + 1,
                a_ij,
                a_ji
            ),
            Violation::NegativeWeight { i, j, weight } => {
                write!(f, "negative weight {} at ({}, {})", weight, i + 1, j + 1)
            }
            Violation::NonPositiveFrequency { i, omega } => {
                write!(f, "non-positive natural frequency {} at node {}", omega, i + 1)
            }
            Violation::Disconnected { component } => write!(
                f,
                "graph is disconnected; component of node 1 has {} of the nodes",
                component.len()
            ),
        }
    }
}

/// An ordered partition of the nodes into `m >= 2` disjoint clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    clusters: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from 0-based node index sets. Clusters are kept in
    /// the given order; nodes within each cluster are sorted.
    pub fn new(clusters: Vec<Vec<usize>>) -> Result<Self> {
        if clusters.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "need at least 2 clusters, got {}",
                clusters.len()
            )));
        }
        let mut sorted = Vec::with_capacity(clusters.len());
        let mut seen = std::collections::BTreeSet::new();
        for (k, mut cluster) in clusters.into_iter().enumerate() {
            if cluster.is_empty() {
                return Err(Error::InvalidPartition(format!("cluster {} is empty", k + 1)));
            }
            cluster.sort_unstable();
            cluster.dedup();
            for &i in &cluster {
                if !seen.insert(i) {
                    return Err(Error::InvalidPartition(format!(
                        "node {} appears in more than one cluster",
                        i + 1
                    )));
                }
            }
            sorted.push(cluster);
        }
        Ok(Self { clusters: sorted })
    }

    pub fn m(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster(&self, k: usize) -> &[usize] {
        &self.clusters[k]
    }

    /// Map node index -> cluster index. Nodes not covered map to
    /// `usize::MAX`; `validate_for` rejects that case.
    pub fn cluster_index_map(&self, n: usize) -> Vec<usize> {
        let mut map = vec![usize::MAX; n];
        for (k, cluster) in self.clusters.iter().enumerate() {
            for &i in cluster {
                if i < n {
                    map[i] = k;
                }
            }
        }
        map
    }

    /// Full validation against a network: coverage of all nodes and
    /// connectivity of every induced subgraph.
    pub fn validate_for(&self, net: &Network) -> Result<()> {
        let n = net.n();
        let covered: usize = self.clusters.iter().map(|c| c.len()).sum();
        for cluster in &self.clusters {
            for &i in cluster {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "node {} out of range for {} nodes",
                        i + 1,
                        n
                    )));
                }
            }
        }
        if covered != n {
            return Err(Error::InvalidPartition(format!(
                "clusters cover {covered} of {n} nodes"
            )));
        }
        for (k, cluster) in self.clusters.iter().enumerate() {
            if !induced_connected(net, cluster) {
                return Err(Error::InvalidPartition(format!(
                    "cluster {} induces a disconnected subgraph",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

fn induced_connected(net: &Network, nodes: &[usize]) -> bool {
    if nodes.len() <= 1 {
        return true;
    }
    let set: std::collections::BTreeSet<usize> = nodes.iter().copied().collect();
    let mut seen = std::collections::BTreeSet::from([nodes[0]]);
    let mut queue = std::collections::VecDeque::from([nodes[0]]);
    while let Some(u) = queue.pop_front() {
        for &v in &set {
            if !seen.contains(&v) && (net.weight(u, v) != 0.0 || net.weight(v, u) != 0.0) {
                seen.insert(v);
                queue.push_back(v);
            }
        }
    }
    seen.len() == nodes.len()
}

/// Frequency uniformity within every cluster, to absolute tolerance.
pub fn uniform_frequencies(net: &Network, part: &Partition, tol_freq: f64) -> Result<bool> {
    check_indices(net, part)?;
    for cluster in part.clusters() {
        let w0 = net.omega()[cluster[0]];
        if cluster.iter().any(|&i| (net.omega()[i] - w0).abs() > tol_freq) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Total coupling weight from node `i` into the given cluster.
pub fn quotient_weight(net: &Network, part: &Partition, i: usize, cluster: usize) -> f64 {
    part.cluster(cluster).iter().map(|&r| net.weight(i, r)).sum()
}

/// External-equitability check: within every cluster, all nodes must carry
/// the same total weight into each other cluster. Returns the pass flag and
/// the largest absolute discrepancy found.
pub fn equitable_weights(net: &Network, part: &Partition, tol_weights: f64) -> Result<(bool, f64)> {
    check_indices(net, part)?;
    let mut worst = 0.0_f64;
    for z in 0..part.m() {
        for l in 0..part.m() {
            if z == l {
                continue;
            }
            let nodes = part.cluster(z);
            let w0 = quotient_weight(net, part, nodes[0], l);
            for &i in &nodes[1..] {
                worst = worst.max((quotient_weight(net, part, i, l) - w0).abs());
            }
        }
    }
    Ok((worst <= tol_weights, worst))
}

fn check_indices(net: &Network, part: &Partition) -> Result<()> {
    let n = net.n();
    for cluster in part.clusters() {
        if let Some(&bad) = cluster.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidPartition(format!(
                "node {} out of range for {} nodes",
                bad + 1,
                n
            )));
        }
    }
    Ok(())
}

/// Margin of a pair of clusters in the submanifold-exclusion condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMargin {
    /// 0-based cluster indices, `a < b`.
    pub a: usize,
    pub b: usize,
    pub margin: f64,
}

/// For each cluster pair `(l, z)` evaluates
///
/// ```text
/// margin = |omega_l - omega_z|
///          - 2 (m - 2) max_{k != l, z} max( w(l -> k), w(z -> k) )
/// ```
///
/// where `w(l -> k)` is the per-node quotient weight of cluster `l` into
/// cluster `k`. A positive margin rules out an invariant submanifold where
/// the pair evolves with equal phases; a nonpositive margin is only
/// inconclusive.
pub fn submanifold_margins(net: &Network, part: &Partition) -> Vec<PairMargin> {
    let m = part.m();
    let rep: Vec<usize> = part.clusters().iter().map(|c| c[0]).collect();
    let mut out = Vec::new();
    for l in 0..m {
        for z in (l + 1)..m {
            let freq_gap = (net.omega()[rep[l]] - net.omega()[rep[z]]).abs();
            let mut coupling = 0.0_f64;
            for k in 0..m {
                if k == l || k == z {
                    continue;
                }
                coupling = coupling
                    .max(quotient_weight(net, part, rep[l], k))
                    .max(quotient_weight(net, part, rep[z], k));
            }
            let margin = freq_gap - 2.0 * (m as f64 - 2.0) * coupling;
            out.push(PairMargin { a: l, b: z, margin });
        }
    }
    out
}

/// Outcome of the invariance checks for a network/partition pair.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    /// Frequencies uniform within every cluster.
    pub uniform_frequencies: bool,
    /// Inter-cluster weights externally equitable.
    pub equitable_weights: bool,
    /// Largest weight-balance discrepancy found.
    pub weight_worst_violation: f64,
    /// All pairs have positive submanifold-exclusion margin.
    pub submanifold_excluded: bool,
    /// Per-pair margins (inconclusive when nonpositive, never "exists").
    pub pair_margins: Vec<PairMargin>,
}

/// Runs the invariance checks and the submanifold-exclusion margins.
pub fn run_checks(net: &Network, part: &Partition, tols: &Tolerances) -> Result<CheckReport> {
    part.validate_for(net)?;
    let freq_ok = uniform_frequencies(net, part, tols.freq)?;
    let (weights_ok, worst) = equitable_weights(net, part, tols.weights_abs(net.max_abs_weight()))?;
    let margins = submanifold_margins(net, part);
    let excluded = margins.iter().all(|p| p.margin > 0.0);
    Ok(CheckReport {
        uniform_frequencies: freq_ok,
        equitable_weights: weights_ok,
        weight_worst_violation: worst,
        submanifold_excluded: excluded,
        pair_margins: margins,
    })
}
