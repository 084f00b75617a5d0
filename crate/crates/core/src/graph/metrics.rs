use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{louvain_partition, GraphError, Partition, SocialGraph};

/// 2E / N.
pub fn average_degree(g: &SocialGraph) -> Result<f64, GraphError> {
    let n = g.node_count();
    if n == 0 {
        return Err(GraphError::undefined("average_degree", "graph has no nodes"));
    }
    Ok(2.0 * g.edge_count() as f64 / n as f64)
}

/// 2E / (N (N − 1)).
pub fn density(g: &SocialGraph) -> Result<f64, GraphError> {
    let n = g.node_count();
    if n < 2 {
        return Err(GraphError::undefined("density", format!("needs at least 2 nodes, graph has {n}")));
    }
    Ok(2.0 * g.edge_count() as f64 / (n as f64 * (n as f64 - 1.0)))
}

/// Unweighted average degree and density.
pub fn basic_metrics(g: &SocialGraph) -> Result<(f64, f64), GraphError> {
    Ok((average_degree(g)?, density(g)?))
}

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &SocialGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn eccentricity(g: &SocialGraph, source: usize, dist: &mut [usize]) -> usize {
    dist.iter_mut().for_each(|d| *d = usize::MAX);
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    let mut far = 0;
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        far = far.max(du);
        for &(v, _) in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = du + 1;
                queue.push_back(v);
            }
        }
    }
    far
}

/// Exact hop diameter of the largest connected component (ties on size go
/// to the component holding the smallest node index).
pub fn diameter_lcc(g: &SocialGraph) -> Result<usize, GraphError> {
    if g.edge_count() == 0 {
        return Err(GraphError::undefined("diameter", "graph has no edges"));
    }
    let components = connected_components(g);
    let mut lcc = &components[0];
    for c in &components[1..] {
        if c.len() > lcc.len() {
            lcc = c;
        }
    }
    let n = g.node_count();
    let diameter = lcc
        .par_iter()
        .map_init(|| vec![usize::MAX; n], |dist, &s| eccentricity(g, s, dist))
        .max()
        .unwrap_or(0);
    Ok(diameter)
}

/// Newman modularity, `Σ_c [e_c/m − (d_c/2m)²]`. Unweighted counts every
/// edge once; weighted uses the merged edge weights.
pub fn modularity_score(g: &SocialGraph, partition: &Partition, weighted: bool) -> Result<f64, GraphError> {
    if partition.len() != g.node_count() {
        return Err(GraphError::PartitionMismatch {
            labels: partition.len(),
            nodes: g.node_count(),
        });
    }
    let m = if weighted { g.total_weight() as f64 } else { g.edge_count() as f64 };
    if m == 0.0 {
        return Err(GraphError::undefined("modularity", "graph has no edges"));
    }
    let c = partition.community_count();
    let mut internal = vec![0.0; c];
    let mut degree = vec![0.0; c];
    for (u, v, w) in g.edges() {
        let w = if weighted { w as f64 } else { 1.0 };
        let (cu, cv) = (partition.community(u), partition.community(v));
        degree[cu] += w;
        degree[cv] += w;
        if cu == cv {
            internal[cu] += w;
        }
    }
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(e, d)| e / m - (d / (2.0 * m)).powi(2))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActorDegree {
    pub handle: String,
    pub degree: usize,
}

/// Actors by unweighted degree, highest first, ties by handle.
pub fn top_degree_actors(g: &SocialGraph, n: usize) -> Vec<ActorDegree> {
    let mut nodes: Vec<usize> = (0..g.node_count()).collect();
    nodes.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then_with(|| g.label(a).cmp(g.label(b))));
    nodes
        .into_iter()
        .take(n)
        .map(|u| ActorDegree {
            handle: g.label(u).to_string(),
            degree: g.degree(u),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricsOptions {
    /// Use merged edge weights for Louvain and modularity.
    pub weighted_modularity: bool,
    pub top_actors: usize,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions {
            weighted_modularity: false,
            top_actors: 10,
        }
    }
}

/// The network property block reported per graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    pub nodes: usize,
    pub edges: usize,
    pub average_degree: f64,
    /// Hop diameter of the largest connected component.
    pub diameter: usize,
    pub density: f64,
    pub modularity: f64,
    pub communities: usize,
    pub top_actors: Vec<ActorDegree>,
}

pub fn network_metrics(g: &SocialGraph, seed: u64, opts: &MetricsOptions) -> Result<NetworkMetrics, GraphError> {
    Ok(network_metrics_with_partition(g, seed, opts)?.0)
}

/// Metrics together with the Louvain partition they were computed from.
pub fn network_metrics_with_partition(
    g: &SocialGraph,
    seed: u64,
    opts: &MetricsOptions,
) -> Result<(NetworkMetrics, Partition), GraphError> {
    let (average_degree, density) = basic_metrics(g)?;
    let diameter = diameter_lcc(g)?;
    let partition = louvain_partition(g, seed, opts.weighted_modularity)?;
    let modularity = modularity_score(g, &partition, opts.weighted_modularity)?;
    let metrics = NetworkMetrics {
        nodes: g.node_count(),
        edges: g.edge_count(),
        average_degree,
        diameter,
        density,
        modularity,
        communities: partition.community_count(),
        top_actors: top_degree_actors(g, opts.top_actors),
    };
    Ok((metrics, partition))
}
