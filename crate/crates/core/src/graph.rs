//! Incidence and spanning-tree scaffolding for phase-difference coordinates.
//!
//! Given a partitioned network this module fixes:
//!
//! * a lexicographic order on the undirected edges, each oriented from the
//!   lower to the higher node index;
//! * one spanning tree per cluster (deterministic BFS from the lowest-index
//!   node, neighbors in ascending order);
//! * `m - 1` inter-cluster edges forming a spanning tree of the quotient
//!   graph whose nodes are the clusters;
//! * the oriented incidence matrices `B` (whole graph), `B_k` (cluster
//!   subgraph) and `B_span_k` (cluster tree), and the maps
//!   `T_intra_k = B_k^T (B_span_k^T)^+` taking spanning-tree differences to
//!   all intra-cluster differences.
//!
//! The union of the cluster trees and the inter-cluster edges is a spanning
//! tree of the whole graph, so the `n - m` intra coordinates plus the
//! `m - 1` inter coordinates determine every pairwise phase difference via
//! signed sums along tree paths.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::network::{Network, Partition};

/// An undirected edge stored with `source < target`. The source carries the
/// `-1` entry of its incidence column, the target the `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "self-loop edge ({a}, {b})");
        if a < b {
            Self { source: a, target: b }
        } else {
            Self { source: b, target: a }
        }
    }
}

impl std::fmt::Display for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // 1-based, matching the file format.
        write!(f, "({}, {})", self.source + 1, self.target + 1)
    }
}

/// All edges of the graph induced by nonzero adjacency entries, in
/// lexicographic order.
pub fn edge_order(adjacency: &DMatrix<f64>) -> Vec<Edge> {
    let n = adjacency.nrows();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if adjacency[(i, j)] != 0.0 || adjacency[(j, i)] != 0.0 {
                edges.push(Edge::new(i, j));
            }
        }
    }
    edges
}

/// Oriented incidence matrix over the given node set: column `l` for edge
/// `(i, j)` has `-1` at the row of `i` and `+1` at the row of `j`.
pub fn oriented_incidence(nodes: &[usize], edges: &[Edge]) -> Result<DMatrix<f64>> {
    let row_of = |v: usize| -> Result<usize> {
        nodes
            .iter()
            .position(|&u| u == v)
            .ok_or_else(|| Error::Internal(format!("node {} not in node set", v + 1)))
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut b = DMatrix::zeros(nodes.len(), edges.len());
    for (l, e) in edges.iter().enumerate() {
        if !seen.insert(*e) {
            return Err(Error::InvalidNetwork(format!("duplicate edge {e}")));
        }
        b[(row_of(e.source)?, l)] = -1.0;
        b[(row_of(e.target)?, l)] = 1.0;
    }
    Ok(b)
}

/// Deterministic spanning tree: BFS from the lowest-index node, visiting
/// neighbors in ascending order. Returns the tree edges in lexicographic
/// order.
pub fn bfs_spanning_tree(nodes: &[usize], edges: &[Edge]) -> Result<Vec<Edge>> {
    if nodes.len() <= 1 {
        return Ok(Vec::new());
    }
    let mut adj: std::collections::BTreeMap<usize, Vec<usize>> =
        nodes.iter().map(|&v| (v, Vec::new())).collect();
    for e in edges {
        adj.get_mut(&e.source)
            .ok_or_else(|| Error::Internal(format!("edge {e} leaves the node set")))?
            .push(e.target);
        adj.get_mut(&e.target)
            .ok_or_else(|| Error::Internal(format!("edge {e} leaves the node set")))?
            .push(e.source);
    }
    for nbrs in adj.values_mut() {
        nbrs.sort_unstable();
    }
    let root = *nodes.iter().min().unwrap();
    let mut seen = std::collections::BTreeSet::from([root]);
    let mut queue = std::collections::VecDeque::from([root]);
    let mut tree = Vec::new();
    while let Some(u) = queue.pop_front() {
        for &v in &adj[&u] {
            if seen.insert(v) {
                tree.push(Edge::new(u, v));
                queue.push_back(v);
            }
        }
    }
    if tree.len() != nodes.len() - 1 {
        return Err(Error::InvalidNetwork(format!(
            "subgraph on {} nodes is disconnected ({} tree edges found)",
            nodes.len(),
            tree.len()
        )));
    }
    tree.sort_unstable();
    Ok(tree)
}

/// The spanning-tree coordinate system of a partitioned network.
///
/// Coordinate layout: intra coordinates first (clusters in partition order,
/// tree edges lexicographic within each cluster), then the inter
/// coordinates (quotient-tree edges in lexicographic cluster-pair order).
#[derive(Debug, Clone)]
pub struct SpanningStructure {
    n: usize,
    m: usize,
    cluster_of: Vec<usize>,
    cluster_nodes: Vec<Vec<usize>>,
    /// All edges of the graph, lexicographic.
    edges: Vec<Edge>,
    /// Per-cluster edge lists (lexicographic) and their weights.
    cluster_edges: Vec<Vec<Edge>>,
    cluster_weights: Vec<Vec<f64>>,
    /// Per-cluster spanning-tree edges (lexicographic).
    span_edges: Vec<Vec<Edge>>,
    /// Chosen inter-cluster tree edges with their quotient pair, ordered by
    /// pair.
    inter_edges: Vec<(Edge, (usize, usize))>,
    b_full: DMatrix<f64>,
    b_cluster: Vec<DMatrix<f64>>,
    b_span: Vec<DMatrix<f64>>,
    t_intra: Vec<DMatrix<f64>>,
    /// Start of each cluster's block in the intra coordinate vector.
    intra_offset: Vec<usize>,
    /// Row `u` holds the coefficients of node `u`'s tree potential over the
    /// `n - 1` tree coordinates (intra then inter).
    potential_coeff: DMatrix<f64>,
}

/// Builds the structure with the default deterministic tree policy.
pub fn build_spanning_structure(net: &Network, part: &Partition) -> Result<SpanningStructure> {
    build_with_policy(net, part, None, None)
}

/// Builds the structure from explicitly chosen trees. `trees[k]` must be a
/// spanning tree of cluster `k`'s subgraph and `inter` must hold `m - 1`
/// inter-cluster edges forming a quotient spanning tree.
pub fn build_with_trees(
    net: &Network,
    part: &Partition,
    trees: &[Vec<Edge>],
    inter: &[Edge],
) -> Result<SpanningStructure> {
    build_with_policy(net, part, Some(trees), Some(inter))
}

fn build_with_policy(
    net: &Network,
    part: &Partition,
    forced_trees: Option<&[Vec<Edge>]>,
    forced_inter: Option<&[Edge]>,
) -> Result<SpanningStructure> {
    part.validate_for(net)?;
    let n = net.n();
    let m = part.m();
    let cluster_of = part.cluster_index_map(n);
    let edges = edge_order(net.adjacency());

    let mut cluster_edges = vec![Vec::new(); m];
    let mut inter_candidates: std::collections::BTreeMap<(usize, usize), Vec<Edge>> =
        std::collections::BTreeMap::new();
    for &e in &edges {
        let (ka, kb) = (cluster_of[e.source], cluster_of[e.target]);
        if ka == kb {
            cluster_edges[ka].push(e);
        } else {
            let pair = (ka.min(kb), ka.max(kb));
            inter_candidates.entry(pair).or_default().push(e);
        }
    }

    let span_edges: Vec<Vec<Edge>> = match forced_trees {
        Some(trees) => {
            if trees.len() != m {
                return Err(Error::InvalidPartition(format!(
                    "{} trees given for {} clusters",
                    trees.len(),
                    m
                )));
            }
            for (k, tree) in trees.iter().enumerate() {
                validate_forced_tree(part.cluster(k), &cluster_edges[k], tree)
                    .map_err(|e| Error::InvalidNetwork(format!("cluster {}: {e}", k + 1)))?;
            }
            trees
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    t.sort_unstable();
                    t
                })
                .collect()
        }
        None => {
            let mut out = Vec::with_capacity(m);
            for (k, edges_k) in cluster_edges.iter().enumerate() {
                let tree = bfs_spanning_tree(part.cluster(k), edges_k).map_err(|_| {
                    Error::InvalidNetwork(format!("cluster {} is disconnected", k + 1))
                })?;
                out.push(tree);
            }
            out
        }
    };

    // Quotient spanning tree over clusters. Candidates per quotient pair are
    // represented by their lexicographically smallest network edge.
    let inter_edges: Vec<(Edge, (usize, usize))> = match forced_inter {
        Some(edges) => {
            let mut chosen = Vec::new();
            for &e in edges {
                let (ka, kb) = (cluster_of[e.source], cluster_of[e.target]);
                if ka == kb {
                    return Err(Error::InvalidNetwork(format!("edge {e} is not inter-cluster")));
                }
                let pair = (ka.min(kb), ka.max(kb));
                if !inter_candidates.get(&pair).is_some_and(|v| v.contains(&e)) {
                    return Err(Error::InvalidNetwork(format!("edge {e} is not in the graph")));
                }
                chosen.push((e, pair));
            }
            chosen.sort_by_key(|&(_, pair)| pair);
            let pairs: Vec<_> = chosen.iter().map(|&(_, p)| p).collect();
            if !is_quotient_tree(m, &pairs) {
                return Err(Error::InvalidNetwork(
                    "chosen inter-cluster edges do not form a quotient spanning tree".into(),
                ));
            }
            chosen
        }
        None => {
            let quotient_pairs: Vec<(usize, usize)> = inter_candidates.keys().copied().collect();
            let quotient_edges: Vec<Edge> =
                quotient_pairs.iter().map(|&(a, b)| Edge::new(a, b)).collect();
            let cluster_ids: Vec<usize> = (0..m).collect();
            let quotient_tree =
                bfs_spanning_tree(&cluster_ids, &quotient_edges).map_err(|_| {
                    Error::InvalidNetwork("quotient graph over clusters is disconnected".into())
                })?;
            quotient_tree
                .into_iter()
                .map(|qe| {
                    let pair = (qe.source, qe.target);
                    (inter_candidates[&pair][0], pair)
                })
                .collect()
        }
    };

    // Incidence matrices and the intra maps.
    let node_ids: Vec<usize> = (0..n).collect();
    let b_full = oriented_incidence(&node_ids, &edges)?;
    let mut b_cluster = Vec::with_capacity(m);
    let mut b_span = Vec::with_capacity(m);
    let mut t_intra = Vec::with_capacity(m);
    let mut cluster_weights = Vec::with_capacity(m);
    for k in 0..m {
        let bk = oriented_incidence(part.cluster(k), &cluster_edges[k])?;
        let bs = oriented_incidence(part.cluster(k), &span_edges[k])?;
        t_intra.push(t_intra_matrix(&bk, &bs)?);
        b_cluster.push(bk);
        b_span.push(bs);
        cluster_weights
            .push(cluster_edges[k].iter().map(|e| net.weight(e.source, e.target)).collect());
    }

    let mut intra_offset = Vec::with_capacity(m);
    let mut acc = 0;
    for tree in &span_edges {
        intra_offset.push(acc);
        acc += tree.len();
    }

    let mut structure = SpanningStructure {
        n,
        m,
        cluster_of,
        cluster_nodes: part.clusters().to_vec(),
        edges,
        cluster_edges,
        cluster_weights,
        span_edges,
        inter_edges,
        b_full,
        b_cluster,
        b_span,
        t_intra,
        intra_offset,
        potential_coeff: DMatrix::zeros(0, 0),
    };
    structure.potential_coeff = structure.build_potentials()?;
    Ok(structure)
}

fn validate_forced_tree(nodes: &[usize], cluster_edges: &[Edge], tree: &[Edge]) -> Result<()> {
    for e in tree {
        if !cluster_edges.contains(e) {
            return Err(Error::InvalidNetwork(format!("tree edge {e} is not a cluster edge")));
        }
    }
    if tree.len() != nodes.len().saturating_sub(1) {
        return Err(Error::InvalidNetwork(format!(
            "{} tree edges for {} nodes",
            tree.len(),
            nodes.len()
        )));
    }
    // Acyclicity + coverage: BFS over the forced edges must reach everything.
    bfs_spanning_tree(nodes, tree).map(|_| ())
}

fn is_quotient_tree(m: usize, pairs: &[(usize, usize)]) -> bool {
    if pairs.len() != m - 1 {
        return false;
    }
    let edges: Vec<Edge> = pairs.iter().map(|&(a, b)| Edge::new(a, b)).collect();
    let ids: Vec<usize> = (0..m).collect();
    bfs_spanning_tree(&ids, &edges).is_ok()
}

/// `T_intra = B^T (B_span^T)^+` with the pseudoinverse computed through the
/// normal equations: `(B_span^T)^+ = B_span (B_span^T B_span)^{ -1 }`.
pub fn t_intra_matrix(b_cluster: &DMatrix<f64>, b_span: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if b_span.ncols() == 0 {
        return Ok(DMatrix::zeros(b_cluster.ncols(), 0));
    }
    let gram = b_span.transpose() * b_span;
    let gram_inv = gram.try_inverse().ok_or_else(|| {
        Error::Internal("singular Gram matrix: spanning tree incidence lost rank".into())
    })?;
    Ok(b_cluster.transpose() * b_span * gram_inv)
}

impl SpanningStructure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of intra coordinates, `n - m`.
    pub fn intra_dim(&self) -> usize {
        self.n - self.m
    }

    /// Number of inter coordinates, `m - 1`.
    pub fn inter_dim(&self) -> usize {
        self.m - 1
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.cluster_of[node]
    }

    pub fn cluster_nodes(&self, k: usize) -> &[usize] {
        &self.cluster_nodes[k]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cluster_edges(&self, k: usize) -> &[Edge] {
        &self.cluster_edges[k]
    }

    /// Weights of cluster `k`'s edges, aligned with `cluster_edges(k)`.
    pub fn cluster_edge_weights(&self, k: usize) -> &[f64] {
        &self.cluster_weights[k]
    }

    pub fn span_edges(&self, k: usize) -> &[Edge] {
        &self.span_edges[k]
    }

    /// The chosen inter-cluster tree edges, ordered by quotient pair.
    pub fn inter_edges(&self) -> Vec<Edge> {
        self.inter_edges.iter().map(|&(e, _)| e).collect()
    }

    pub fn inter_pairs(&self) -> Vec<(usize, usize)> {
        self.inter_edges.iter().map(|&(_, p)| p).collect()
    }

    pub fn incidence_full(&self) -> &DMatrix<f64> {
        &self.b_full
    }

    pub fn incidence_cluster(&self, k: usize) -> &DMatrix<f64> {
        &self.b_cluster[k]
    }

    pub fn incidence_span(&self, k: usize) -> &DMatrix<f64> {
        &self.b_span[k]
    }

    pub fn t_intra(&self, k: usize) -> &DMatrix<f64> {
        &self.t_intra[k]
    }

    /// Index range of cluster `k`'s block in the intra coordinate vector.
    pub fn intra_range(&self, k: usize) -> std::ops::Range<usize> {
        self.intra_offset[k]..self.intra_offset[k] + self.span_edges[k].len()
    }

    /// Coefficients of every node's tree potential over the `n - 1` tree
    /// coordinates; the difference of two rows gives the signed tree-path
    /// sum between the nodes.
    pub fn potential_coefficients(&self) -> &DMatrix<f64> {
        &self.potential_coeff
    }

    fn build_potentials(&self) -> Result<DMatrix<f64>> {
        let dim = self.intra_dim() + self.inter_dim();
        // Tree adjacency: node -> (neighbor, coordinate index, sign when
        // crossing source -> target).
        let mut adj: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); self.n];
        for k in 0..self.m {
            for (idx, e) in self.span_edges[k].iter().enumerate() {
                let c = self.intra_offset[k] + idx;
                adj[e.source].push((e.target, c, 1.0));
                adj[e.target].push((e.source, c, -1.0));
            }
        }
        for (q, &(e, _)) in self.inter_edges.iter().enumerate() {
            let c = self.intra_dim() + q;
            adj[e.source].push((e.target, c, 1.0));
            adj[e.target].push((e.source, c, -1.0));
        }
        let mut coeff = DMatrix::zeros(self.n, dim);
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, c, sign) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    let row = coeff.row(u).clone_owned();
                    coeff.set_row(v, &row);
                    coeff[(v, c)] += sign;
                    queue.push_back(v);
                }
            }
        }
        if reached != self.n {
            return Err(Error::Internal(
                "cluster trees plus inter edges do not span the graph".into(),
            ));
        }
        Ok(coeff)
    }

    /// Signed sum of tree coordinates along the unique tree path from `i`
    /// to `j`.
    pub fn path_difference(
        &self,
        i: usize,
        j: usize,
        x_intra: &DVector<f64>,
        x_inter: &DVector<f64>,
    ) -> f64 {
        let mut acc = 0.0;
        for c in 0..self.intra_dim() {
            acc += (self.potential_coeff[(j, c)] - self.potential_coeff[(i, c)]) * x_intra[c];
        }
        for q in 0..self.inter_dim() {
            let c = self.intra_dim() + q;
            acc += (self.potential_coeff[(j, c)] - self.potential_coeff[(i, c)]) * x_inter[q];
        }
        acc
    }

    /// Node potentials for the given tree coordinates (potential of node 0
    /// is zero); pairwise differences of the result are the tree-path sums.
    pub fn potentials(&self, x_intra: &DVector<f64>, x_inter: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.intra_dim() + self.inter_dim());
        x.rows_mut(0, self.intra_dim()).copy_from(x_intra);
        x.rows_mut(self.intra_dim(), self.inter_dim()).copy_from(x_inter);
        &self.potential_coeff * x
    }

    /// Intra coordinates of a phase vector, each wrapped to `(-pi, pi]`.
    pub fn x_intra_of(&self, theta: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.intra_dim());
        for k in 0..self.m {
            for (idx, e) in self.span_edges[k].iter().enumerate() {
                x[self.intra_offset[k] + idx] = crate::wrap_angle(theta[e.target] - theta[e.source]);
            }
        }
        x
    }

    /// Inter coordinates of a phase vector, each wrapped to `(-pi, pi]`.
    pub fn x_inter_of(&self, theta: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.inter_dim());
        for (q, &(e, _)) in self.inter_edges.iter().enumerate() {
            x[q] = crate::wrap_angle(theta[e.target] - theta[e.source]);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    fn triangle_edges() -> Vec<Edge> {
        vec![Edge::new(0, 1), Edge::new(0, 2), Edge::new(1, 2)]
    }

    #[test]
    fn incidence_of_triangle() {
        let b = oriented_incidence(&[0, 1, 2], &triangle_edges()).unwrap();
        let expected = DMatrix::from_row_slice(
            3,
            3,
            &[-1.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 1.0],
        );
        assert_eq!(b, expected);
    }

    #[test]
    fn incidence_of_single_edge() {
        let b = oriented_incidence(&[0, 1], &[Edge::new(0, 1)]).unwrap();
        assert_eq!(b, DMatrix::from_row_slice(2, 1, &[-1.0, 1.0]));
    }

    #[test]
    fn incidence_of_path_tree() {
        let b = oriented_incidence(&[0, 1, 2], &[Edge::new(0, 1), Edge::new(1, 2)]).unwrap();
        let expected =
            DMatrix::from_row_slice(3, 2, &[-1.0, 0.0, 1.0, -1.0, 0.0, 1.0]);
        assert_eq!(b, expected);
    }

    #[test]
    fn duplicate_edge_is_rejected() {
        let edges = vec![Edge::new(0, 1), Edge::new(1, 0)];
        assert!(oriented_incidence(&[0, 1], &edges).is_err());
    }

    #[test]
    fn bfs_tree_on_triangle_takes_both_root_edges() {
        let tree = bfs_spanning_tree(&[0, 1, 2], &triangle_edges()).unwrap();
        assert_eq!(tree, vec![Edge::new(0, 1), Edge::new(0, 2)]);
    }

    #[test]
    fn bfs_tree_of_a_tree_is_itself() {
        let edges = vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(1, 3)];
        let tree = bfs_spanning_tree(&[0, 1, 2, 3], &edges).unwrap();
        assert_eq!(tree, edges);
    }

    #[test]
    fn bfs_tree_of_single_node_is_empty() {
        assert!(bfs_spanning_tree(&[4], &[]).unwrap().is_empty());
    }

    #[test]
    fn bfs_rejects_disconnected_input() {
        assert!(bfs_spanning_tree(&[0, 1, 2], &[Edge::new(0, 1)]).is_err());
    }

    #[test]
    fn t_intra_for_triangle_with_path_tree() {
        // Tree {(1,2), (2,3)} in 1-based labels.
        let b_cluster = oriented_incidence(&[0, 1, 2], &triangle_edges()).unwrap();
        let b_span =
            oriented_incidence(&[0, 1, 2], &[Edge::new(0, 1), Edge::new(1, 2)]).unwrap();
        let t = t_intra_matrix(&b_cluster, &b_span).unwrap();
        let expected =
            DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        assert!((t - expected).abs().max() < 1e-12);
    }

    #[test]
    fn t_intra_of_tree_cluster_is_identity() {
        let edges = vec![Edge::new(0, 1), Edge::new(1, 2)];
        let b = oriented_incidence(&[0, 1, 2], &edges).unwrap();
        let t = t_intra_matrix(&b, &b).unwrap();
        assert!((t - DMatrix::identity(2, 2)).abs().max() < 1e-12);
    }

    #[test]
    fn structure_demo_inter_edges_match_expected_choice() {
        let (net, part) = scenarios::structure_demo();
        let s = build_spanning_structure(&net, &part).unwrap();
        // 1-based (3,6) and (4,7).
        assert_eq!(s.inter_edges(), vec![Edge::new(2, 5), Edge::new(3, 6)]);
        assert_eq!(s.inter_pairs(), vec![(0, 1), (1, 2)]);
        assert_eq!(s.span_edges(1), &[Edge::new(3, 4), Edge::new(4, 5)]);
        assert_eq!(s.span_edges(2), &[Edge::new(6, 7), Edge::new(6, 8)]);
        assert_eq!(s.intra_dim(), 6);
        assert_eq!(s.inter_dim(), 2);
    }

    #[test]
    fn two_pair_clusters_use_their_single_bridge() {
        let net = Network::from_edges(
            4,
            &[(0, 1, 1.0), (2, 3, 1.0), (1, 2, 0.5)],
            vec![1.0, 1.0, 2.0, 2.0],
        )
        .unwrap();
        let part = Partition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let s = build_spanning_structure(&net, &part).unwrap();
        assert_eq!(s.inter_edges(), vec![Edge::new(1, 2)]);
    }

    #[test]
    fn span_incidence_has_zero_column_sums_and_full_rank() {
        let (net, part) = scenarios::structure_demo();
        let s = build_spanning_structure(&net, &part).unwrap();
        for k in 0..part.m() {
            let b = s.incidence_span(k);
            let ones = DVector::from_element(b.nrows(), 1.0);
            assert_eq!((b.transpose() * ones).abs().max(), 0.0);
            if b.ncols() > 0 {
                let gram = b.transpose() * b;
                assert!(gram.determinant().abs() > 1e-12);
            }
        }
    }

    #[test]
    fn path_difference_of_adjacent_tree_edge_is_the_coordinate() {
        let (net, part) = scenarios::two_path_clusters(1.0, 1.0, 1.0, 1.0, 6.0);
        let s = build_spanning_structure(&net, &part).unwrap();
        let x_intra = DVector::from_vec(vec![0.3, -0.2, 0.1, 0.4]);
        let x_inter = DVector::from_vec(vec![0.7]);
        assert!((s.path_difference(0, 1, &x_intra, &x_inter) - 0.3).abs() < 1e-15);
        assert!(
            (s.path_difference(1, 0, &x_intra, &x_inter)
                + s.path_difference(0, 1, &x_intra, &x_inter))
            .abs()


                < 1e-15
        );
    }

    #[test]
    fn tree_coordinates_reproduce_all_phase_differences() {
        let (net, part) = scenarios::structure_demo();
        let s = build_spanning_structure(&net, &part).unwrap();
        let theta = DVector::from_fn(net.n(), |i, _| (i as f64 * 0.37).sin() * 2.0);
        // Tree coordinates straight from the phases (no wrapping: values are
        // small enough).
        let mut x_intra = DVector::zeros(s.intra_dim());
        for k in 0..part.m() {
            for (idx, e) in s.span_edges(k).iter().enumerate() {
                x_intra[s.intra_range(k).start + idx] = theta[e.target] - theta[e.source];
            }
        }
        let mut x_inter = DVector::zeros(s.inter_dim());
        for (q, e) in s.inter_edges().into_iter().enumerate() {
            x_inter[q] = theta[e.target] - theta[e.source];
        }
        for i in 0..net.n() {
            for j in 0..net.n() {
                let expected = theta[j] - theta[i];
                let got = s.path_difference(i, j, &x_intra, &x_inter);
                assert!((got - expected).abs() < 1e-12, "pair ({i}, {j})");
            }
        }
    }
}
