use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{modularity_score, GraphError, Partition, SocialGraph};

/// Gains closer than this are treated as equal.
const GAIN_EPS: f64 = 1e-10;

/// One aggregation level: a weighted graph whose nodes may carry self-loops.
struct Level {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    /// Weighted degree, self-loops counted twice.
    degree: Vec<f64>,
}

impl Level {
    fn from_graph(g: &SocialGraph, weighted: bool) -> Self {
        let adjacency: Vec<Vec<(usize, f64)>> = (0..g.node_count())
            .map(|u| {
                g.neighbors(u)
                    .iter()
                    .map(|&(v, w)| (v, if weighted { w as f64 } else { 1.0 }))
                    .collect()
            })
            .collect();
        let degree = adjacency.iter().map(|l| l.iter().map(|&(_, w)| w).sum()).collect();
        Level {
            self_loops: vec![0.0; adjacency.len()],
            adjacency,
            degree,
        }
    }

    fn len(&self) -> usize {
        self.adjacency.len()
    }

    /// Collapses each community into one node. `community` must be dense.
    fn aggregate(&self, community: &[usize], count: usize) -> Level {
        let mut self_loops = vec![0.0; count];
        let mut degree = vec![0.0; count];
        let mut links: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
        for u in 0..self.len() {
            let cu = community[u];
            self_loops[cu] += self.self_loops[u];
            degree[cu] += self.degree[u];
            for &(v, w) in &self.adjacency[u] {
                let cv = community[v];
                if cu == cv {
                    // Each internal edge is seen from both ends.
                    self_loops[cu] += w / 2.0;
                } else {
                    *links[cu].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        Level {
            adjacency: links.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
            degree,
        }
    }

    /// Local moving phase. Returns the dense community of every node and
    /// whether any node moved.
    fn local_moves(&self, two_m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, usize, bool) {
        let n = self.len();
        // Community ids start as a seeded permutation so that the lowest-id
        // tie-break differs between runs.
        let mut community: Vec<usize> = (0..n).collect();
        community.shuffle(rng);
        let mut total = vec![0.0; n];
        for u in 0..n {
            total[community[u]] = self.degree[u];
        }
        let mut link = vec![0.0; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut moved_any = false;
        loop {
            let mut moves = 0;
            for &u in &order {
                let own = community[u];
                let ku = self.degree[u];
                for &c in &touched {
                    link[c] = 0.0;
                    seen[c] = false;
                }
                touched.clear();
                touched.push(own);
                seen[own] = true;
                for &(v, w) in &self.adjacency[u] {
                    let c = community[v];
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    link[c] += w;
                }

                total[own] -= ku;
                let gain = |c: usize| link[c] - total[c] * ku / two_m;
                let stay = gain(own);
                let mut best = own;
                let mut best_gain = f64::NEG_INFINITY;
                touched.sort_unstable();
                for &c in &touched {
                    if c == own {
                        continue;
                    }
                    let g = gain(c);
                    if g > best_gain + GAIN_EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                if best != own && best_gain > stay + GAIN_EPS {
                    community[u] = best;
                    moves += 1;
                } else {
                    best = own;
                }
                total[best] += ku;
            }
            if moves == 0 {
                break;
            }
            moved_any = true;
        }

        let dense = Partition::from_labels(&community);
        let count = dense.community_count();
        (dense.labels().to_vec(), count, moved_any)
    }
}

/// Independent seeded runs whose best partition is kept.
pub const DEFAULT_RESTARTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LouvainConfig {
    pub seed: u64,
    pub weighted: bool,
    /// Runs with visit orders drawn from one seeded stream; the highest
    /// modularity wins, earlier runs on ties.
    pub restarts: usize,
}

/// Louvain modularity maximization with [`DEFAULT_RESTARTS`] runs.
pub fn louvain_partition(g: &SocialGraph, seed: u64, weighted: bool) -> Result<Partition, GraphError> {
    louvain_with(
        g,
        &LouvainConfig {
            seed,
            weighted,
            restarts: DEFAULT_RESTARTS,
        },
    )
}

/// Repeated local moving and aggregation until no node changes community.
/// Visit orders are shuffled from the seed; among equal-gain moves the
/// lowest community id wins.
pub fn louvain_with(g: &SocialGraph, cfg: &LouvainConfig) -> Result<Partition, GraphError> {
    if g.edge_count() == 0 {
        return Err(GraphError::undefined("modularity", "graph has no edges"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(f64, Partition)> = None;
    for _ in 0..cfg.restarts.max(1) {
        let partition = single_run(g, cfg.weighted, &mut rng);
        let q = modularity_score(g, &partition, cfg.weighted)?;
        if best.as_ref().is_none_or(|(bq, _)| q > bq + 1e-12) {
            best = Some((q, partition));
        }
    }
    Ok(best.expect("at least one run").1)
}

fn single_run(g: &SocialGraph, weighted: bool, rng: &mut ChaCha8Rng) -> Partition {
    let base = Level::from_graph(g, weighted);
    let two_m: f64 = base.degree.iter().sum();
    let mut level = Level::from_graph(g, weighted);
    let mut membership: Vec<usize> = (0..g.node_count()).collect();
    loop {
        let (community, count, moved) = level.local_moves(two_m, rng);
        if !moved {
            break;
        }
        for m in membership.iter_mut() {
            *m = community[*m];
        }
        level = level.aggregate(&community, count);
        if count == 1 {
            break;
        }
    }
    if g.node_count().saturating_mul(g.edge_count()) <= REFINE_BUDGET {
        refine(&base, &mut membership, two_m);
    }
    Partition::from_labels(&membership)
}

/// Upper bound on `nodes * edges` for the node-level refinement pass.
const REFINE_BUDGET: usize = 20_000_000;

/// Kernighan–Lin style refinement on the original nodes: each pass moves
/// every node once to its best community (or a fresh one) even when the
/// move loses modularity, then keeps the best prefix of the move sequence.
/// Escapes the local optima that greedy moving cannot leave.
fn refine(level: &Level, community: &mut [usize], two_m: f64) {
    let n = level.len();
    let mut total = vec![0.0; n];
    let mut members = vec![0usize; n];
    for u in 0..n {
        total[community[u]] += level.degree[u];
        members[community[u]] += 1;
    }
    let mut link = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    loop {
        let mut locked: Vec<bool> = level.degree.iter().map(|&k| k == 0.0).collect();
        let mut history: Vec<(usize, usize)> = Vec::new();
        let (mut cum, mut best_cum, mut best_len) = (0.0, 0.0, 0);
        loop {
            let fresh = members.iter().position(|&m| m == 0);
            let mut best: Option<(f64, usize, usize)> = None;
            for u in 0..n {
                if locked[u] {
                    continue;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
                for &(v, w) in &level.adjacency[u] {
                    let c = community[v];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                let (own, ku) = (community[u], level.degree[u]);
                let stay = link[own] - (total[own] - ku) * ku / two_m;
                let mut consider = |c: usize, gain: f64| {
                    let delta = gain - stay;
                    if best.is_none_or(|(d, _, _)| delta > d + GAIN_EPS) {
                        best = Some((delta, u, c));
                    }
                };
                touched.sort_unstable();
                for &c in &touched {
                    if c != own {
                        consider(c, link[c] - total[c] * ku / two_m);
                    }
                }
                if let Some(f) = fresh {
                    if members[own] > 1 {
                        consider(f, 0.0);
                    }
                }
            }
            let Some((delta, u, c)) = best else { break };
            let own = community[u];
            history.push((u, own));
            total[own] -= level.degree[u];
            members[own] -= 1;
            total[c] += level.degree[u];
            members[c] += 1;
            community[u] = c;
            locked[u] = true;
            cum += delta;
            if cum > best_cum + GAIN_EPS {
                best_cum = cum;
                best_len = history.len();
            }
        }
        for &(u, from) in history[best_len..].iter().rev() {
            let c = community[u];
            total[c] -= level.degree[u];
            members[c] -= 1;
            total[from] += level.degree[u];
            members[from] += 1;
            community[u] = from;
        }
        if best_len == 0 {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangles_split() {
        let g = SocialGraph::with_nodes(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        for seed in 0..10 {
            let p = louvain_partition(&g, seed, false).unwrap();
            assert_eq!(p.community_count(), 2);
            assert!((modularity_score(&g, &p, false).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_graph_stays_whole() {
        let edges: Vec<(usize, usize)> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        let g = SocialGraph::with_nodes(4, edges);
        for seed in 0..10 {
            assert_eq!(louvain_partition(&g, seed, false).unwrap().community_count(), 1);
        }
    }

    #[test]
    fn deterministic_and_not_worse_than_singletons() {
        let g = SocialGraph::with_nodes(
            10,
            [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 4), (3, 4), (7, 8), (8, 9), (9, 7), (6, 7)],
        );
        let a = louvain_partition(&g, 3, false).unwrap();
        assert_eq!(a, louvain_partition(&g, 3, false).unwrap());
        let q = modularity_score(&g, &a, false).unwrap();
        let q0 = modularity_score(&g, &Partition::singletons(10), false).unwrap();
        assert!(q >= q0);
        assert_eq!(a.community_count(), 3);
    }

    #[test]
    fn weighted_mode_follows_heavy_edges() {
        // A 4-cycle whose two heavy edges define the communities.
        let labels = (0..4).map(|i| i.to_string()).collect();
        let g = SocialGraph::from_edges(labels, [(0, 1, 10), (1, 2, 1), (2, 3, 10), (3, 0, 1)]);
        let p = louvain_partition(&g, 0, true).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn restarts_never_hurt() {
        // Path on six nodes: one greedy order locks into three pairs (Q = 0.26).
        let g = SocialGraph::with_nodes(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        for seed in 0..20 {
            let one = louvain_with(&g, &LouvainConfig { seed, weighted: false, restarts: 1 }).unwrap();
            let many = louvain_with(&g, &LouvainConfig { seed, weighted: false, restarts: 8 }).unwrap();
            let (q1, q8) = (modularity_score(&g, &one, false).unwrap(), modularity_score(&g, &many, false).unwrap());
            assert!(q8 >= q1);
        }
    }

    #[test]
    fn edgeless_is_error() {
        assert!(louvain_partition(&SocialGraph::with_nodes(3, []), 0, false).is_err());
    }
}
