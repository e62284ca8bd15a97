//! Network + partition input files.
//!
//! The on-disk format is a single JSON object with 1-based node indices:
//!
//! ```json
//! {
//!   "comment": "optional free-form note on where the data comes from",
//!   "n": 6,
//!   "edges": [[1, 2, 1.0], [2, 3, 1.0]],
//!   "omega": [1.0, 1.0, 1.0, 6.0, 6.0, 6.0],
//!   "clusters": [[1, 2, 3], [4, 5, 6]],
//!   "allow_asymmetric": false
//! }
//! ```
//!
//! `edges` lists undirected weighted edges unless `allow_asymmetric` is
//! set, in which case each entry assigns the directed weight `a_ij` only.
//! Unknown fields are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, Partition};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub n: usize,
    /// 1-based `[i, j, weight]` entries.
    pub edges: Vec<(usize, usize, f64)>,
    pub omega: Vec<f64>,
    /// 1-based node index sets.
    pub clusters: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_asymmetric: bool,
}

impl NetworkFile {
    pub fn parse_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Parse(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// Converts the 1-based file data into model types.
    pub fn to_model(&self) -> Result<(Network, Partition)> {
        if self.omega.len() != self.n {
            return Err(Error::Parse(format!(
                "field `omega` has {} entries but `n` is {}",
                self.omega.len(),
                self.n
            )));
        }
        let to_index = |field: &str, pos: usize, v: usize| -> Result<usize> {
            if v == 0 || v > self.n {
                Err(Error::Parse(format!(
                    "field `{field}`[{pos}]: node index {v} out of range 1..={}",
                    self.n
                )))
            } else {
                Ok(v - 1)
            }
        };

        let mut adjacency = nalgebra::DMatrix::zeros(self.n, self.n);
        for (pos, &(i, j, w)) in self.edges.iter().enumerate() {
            let (i, j) = (to_index("edges", pos, i)?, to_index("edges", pos, j)?);
            if i == j {
                return Err(Error::Parse(format!("field `edges`[{pos}]: self-loop at node {}", i + 1)));
            }
            if self.allow_asymmetric {
                if adjacency[(i, j)] != 0.0 {
                    return Err(Error::Parse(format!(
                        "field `edges`[{pos}]: duplicate directed edge ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                adjacency[(i, j)] = w;
            } else {
                if adjacency[(i, j)] != 0.0 {
                    return Err(Error::Parse(format!(
                        "field `edges`[{pos}]: duplicate edge ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                adjacency[(i, j)] = w;
                adjacency[(j, i)] = w;
            }
        }

        let omega = nalgebra::DVector::from_vec(self.omega.clone());
        let net = if self.allow_asymmetric {
            Network::new_asymmetric(adjacency, omega)?
        } else {
            Network::new(adjacency, omega)?
        };

        let mut clusters = Vec::with_capacity(self.clusters.len());
        for (k, cluster) in self.clusters.iter().enumerate() {
            let mut c = Vec::with_capacity(cluster.len());
            for (pos, &v) in cluster.iter().enumerate() {
                c.push(to_index(&format!("clusters[{k}]"), pos, v)?);
            }
            clusters.push(c);
        }
        let part = Partition::new(clusters)?;
        part.validate_for(&net)?;
        Ok((net, part))
    }

    /// Produces file data (1-based) from model types.
    pub fn from_model(net: &Network, part: &Partition, comment: Option<String>) -> Self {
        let n = net.n();
        let mut edges = Vec::new();
        if net.allow_asymmetric() {
            for i in 0..n {
                for j in 0..n {
                    if i != j && net.weight(i, j) != 0.0 {
                        edges.push((i + 1, j + 1, net.weight(i, j)));
                    }
                }
            }
        } else {
            for i in 0..n {
                for j in (i + 1)..n {
                    if net.weight(i, j) != 0.0 {
                        edges.push((i + 1, j + 1, net.weight(i, j)));
                    }
                }
            }
        }
        NetworkFile {
            comment,
            n,
            edges,
            omega: net.omega().iter().copied().collect(),
            clusters: part
                .clusters()
                .iter()
                .map(|c| c.iter().map(|&i| i + 1).collect())
                .collect(),
            allow_asymmetric: net.allow_asymmetric(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "n": 4,
        "edges": [[1, 2, 1.0], [3, 4, 1.0], [2, 3, 0.5], [1, 4, 0.5]],
        "omega": [1.0, 1.0, 2.0, 2.0],
        "clusters": [[1, 2], [3, 4]]
    }"#;

    #[test]
    fn parses_and_converts() {
        let file = NetworkFile::parse_str(SAMPLE).unwrap();
        let (net, part) = file.to_model().unwrap();
        assert_eq!(net.n(), 4);
        assert_eq!(part.m(), 2);
        assert_eq!(net.weight(0, 1), 1.0);
        assert_eq!(net.weight(1, 0), 1.0);
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = SAMPLE.replacen("\"n\"", "\"extra\": 1, \"n\"", 1);
        let err = NetworkFile::parse_str(&text).unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }

    #[test]
    fn rejects_out_of_range_index_with_field_diagnostics() {
        let text = SAMPLE.replace("[2, 3, 0.5]", "[2, 9, 0.5]");
        let err = NetworkFile::parse_str(&text).unwrap().to_model().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("edges") && msg.contains('9'), "{msg}");
    }

    #[test]
    fn round_trips_through_model() {
        let file = NetworkFile::parse_str(SAMPLE).unwrap();
        let (net, part) = file.to_model().unwrap();
        let back = NetworkFile::from_model(&net, &part, None);
        let (net2, part2) = back.to_model().unwrap();
        assert_eq!(net.adjacency(), net2.adjacency());
        assert_eq!(part.clusters(), part2.clusters());
    }
}
