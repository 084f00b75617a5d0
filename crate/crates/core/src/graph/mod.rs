//! Merged undirected actor graph and its network properties.

mod export;
mod louvain;
mod metrics;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Interaction;

pub use export::{write_edge_csv, write_gexf, GexfAttribute};
pub use louvain::{louvain_partition, louvain_with, LouvainConfig, DEFAULT_RESTARTS};
pub use metrics::{
    average_degree, basic_metrics, connected_components, density, diameter_lcc, modularity_score, network_metrics,
    network_metrics_with_partition, top_degree_actors, ActorDegree, MetricsOptions, NetworkMetrics,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("{metric} is undefined: {reason}")]
    UndefinedMetric { metric: &'static str, reason: String },
    #[error("partition labels {labels} nodes, graph has {nodes}")]
    PartitionMismatch { labels: usize, nodes: usize },
}

impl GraphError {
    pub(crate) fn undefined(metric: &'static str, reason: impl Into<String>) -> Self {
        GraphError::UndefinedMetric {
            metric,
            reason: reason.into(),
        }
    }
}

/// Undirected simple graph with labelled nodes and merged edge weights.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SocialGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// Per node, neighbours sorted by index with the merged weight.
    adjacency: Vec<Vec<(usize, u64)>>,
    edges: usize,
}

impl SocialGraph {
    /// Merges interactions into an undirected graph. Nodes are sorted by
    /// handle; `a→b`, `b→a` and repeats collapse into one edge whose weight
    /// is the number of interactions.
    pub fn from_interactions(interactions: &[Interaction]) -> Self {
        let labels: Vec<String> = interactions
            .iter()
            .flat_map(|i| [i.source.as_str(), i.target.as_str()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(str::to_string)
            .collect();
        let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let edges: Vec<(usize, usize, u64)> = interactions
            .iter()
            .map(|i| (index[i.source.as_str()], index[i.target.as_str()], 1))
            .collect();
        drop(index);
        SocialGraph::from_edges(labels, edges)
    }

    /// Builds a graph over `labels` from weighted edges; parallel edges are
    /// summed and self-loops ignored.
    pub fn from_edges<I>(labels: Vec<String>, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        let n = labels.len();
        let mut merged: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (u, v, w) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u == v || w == 0 {
                continue;
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0) += w;
        }
        let mut adjacency = vec![Vec::new(); n];
        for (&(u, v), &w) in &merged {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        SocialGraph {
            labels,
            index,
            adjacency,
            edges: merged.len(),
        }
    }

    /// Unlabelled graph on `n` nodes named `0..n`.
    pub fn with_nodes<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        SocialGraph::from_edges((0..n).map(|i| i.to_string()).collect(), edges.into_iter().map(|(u, v)| (u, v, 1)))
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, u64)] {
        &self.adjacency[node]
    }

    /// Unweighted degree.
    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn weighted_degree(&self, node: usize) -> u64 {
        self.adjacency[node].iter().map(|&(_, w)| w).sum()
    }

    pub fn total_weight(&self) -> u64 {
        self.adjacency.iter().flatten().map(|&(_, w)| w).sum::<u64>() / 2
    }

    /// Each undirected edge once, `u < v`, in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&(v, _)| v > u).map(move |&(v, w)| (u, v, w)))
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<u64> {
        let list = &self.adjacency[u];
        list.binary_search_by_key(&v, |&(n, _)| n).ok().map(|i| list[i].1)
    }
}

pub fn build_graph(interactions: &[Interaction]) -> SocialGraph {
    SocialGraph::from_interactions(interactions)
}

/// A community label for every node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Relabels arbitrary ids to `0..C` in order of first appearance.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut map: HashMap<usize, usize> = HashMap::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|r| {
                let next = map.len();
                *map.entry(*r).or_insert(next)
            })
            .collect();
        Partition { labels, count: map.len() }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            labels: (0..n).collect(),
            count: n,
        }
    }

    pub fn single(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    pub fn community(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Community sizes indexed by community id.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &c in &self.labels {
            sizes[c] += 1;
        }
        sizes
    }
}
