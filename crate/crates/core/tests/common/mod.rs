//! Independent oracles and fixture generators shared by integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use polarscope::graph::SocialGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Erdős–Rényi graph with `min_n..=max_n` nodes and at least one edge.
pub fn random_graph(seed: u64, min_n: usize, max_n: usize) -> (usize, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(min_n..=max_n);
        let p: f64 = rng.gen_range(0.05..0.7);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        if !edges.is_empty() {
            return (n, edges);
        }
    }
}

/// All-pairs shortest paths by Floyd–Warshall; returns the largest finite
/// distance within the largest component (ties: component of the smallest
/// node), found from the distance matrix alone.
pub fn floyd_warshall_lcc_diameter(n: usize, edges: &[(usize, usize)]) -> usize {
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v) in edges {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    // Component of i = nodes at finite distance.
    let mut best: Option<(usize, usize)> = None; // (size, representative)
    for row in &d {
        let size = row.iter().filter(|&&x| x < INF).count();
        let rep = row.iter().position(|&x| x < INF).unwrap();
        if best.is_none_or(|(s, r)| size > s || (size == s && rep < r)) {
            best = Some((size, rep));
        }
    }
    let (_, rep) = best.unwrap();
    let members: Vec<usize> = (0..n).filter(|&j| d[rep][j] < INF).collect();
    members
        .iter()
        .flat_map(|&i| members.iter().map(move |&j| (i, j)))
        .map(|(i, j)| d[i][j])
        .max()
        .unwrap()
}

/// Modularity by the pairwise definition
/// Q = 1/2m Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j).
pub fn pairwise_modularity(n: usize, edges: &[(usize, usize)], labels: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v) in edges {
        a[u][v] = 1.0;
        a[v][u] = 1.0;
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `n` nodes as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=max + 1 {
            cur.push(c);
            rec(pos + 1, n, max.max(c), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur = vec![0];
    rec(1, n, 0, &mut cur, &mut out);
    out
}

/// Best modularity over all partitions, with one optimal labelling.
pub fn brute_force_best_modularity(n: usize, edges: &[(usize, usize)]) -> (f64, Vec<usize>) {
    all_partitions(n)
        .into_iter()
        .map(|p| (pairwise_modularity(n, edges, &p), p))
        .fold((f64::NEG_INFINITY, Vec::new()), |best, cur| if cur.0 > best.0 { cur } else { best })
}

/// Documents containing both terms, by scanning every document for every
/// pair of its distinct tokens.
pub fn brute_force_pair_counts(docs: &[Vec<String>]) -> BTreeMap<(String, String), u64> {
    let mut out = BTreeMap::new();
    for doc in docs {
        let distinct: Vec<&String> = doc.iter().collect::<BTreeSet<_>>().into_iter().collect();
        for i in 0..distinct.len() {
            for j in 0..distinct.len() {
                if distinct[i] < distinct[j] {
                    *out.entry((distinct[i].clone(), distinct[j].clone())).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

pub fn graph_of(n: usize, edges: &[(usize, usize)]) -> SocialGraph {
    SocialGraph::with_nodes(n, edges.iter().copied())
}

/// Same partition up to relabelling.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

/// The three-document corpus `[a a b] [b c d] [c d d]`: 9 tokens, V = 4.
pub fn tiny_corpus() -> polarscope::topics::Corpus {
    let docs: Vec<polarscope::textprep::TokenList> = [["a", "a", "b"], ["b", "c", "d"], ["c", "d", "d"]]
        .iter()
        .enumerate()
        .map(|(i, d)| polarscope::textprep::TokenList {
            doc_id: i.to_string(),
            tokens: d.iter().map(|s| s.to_string()).collect(),
        })
        .collect();
    polarscope::topics::build_corpus(&docs).unwrap()
}

/// Empirical distribution of `samples` post-burn-in Gibbs states over the
/// oracle's state index, and its total variation distance to the oracle.
pub fn gibbs_total_variation(
    corpus: &polarscope::topics::Corpus,
    k: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
    samples: usize,
) -> f64 {
    use polarscope::topics::{exact_posterior_oracle, GibbsSampler, LdaParams};
    let exact = exact_posterior_oracle(corpus, k, alpha, beta).unwrap();
    let burn_in = 1_000;
    let params = LdaParams {
        topics: k,
        alpha,
        beta,
        iters: burn_in + samples,
        burn_in,
        seed,
    };
    let mut counts = vec![0u64; exact.probs.len()];
    let mut sampler = GibbsSampler::new(corpus, &params).unwrap();
    sampler.run(&params, |_, st| counts[exact.index_of(&st.flat_assignment())] += 1);
    let total = counts.iter().sum::<u64>() as f64;
    0.5 * counts
        .iter()
        .zip(&exact.probs)
        .map(|(&c, &p)| (c as f64 / total - p).abs())
        .sum::<f64>()
}

/// Whether the top-`n` terms of every topic come from a single planted
/// vocabulary and different topics use different vocabularies.
pub fn topics_recover_planting(seed: u64) -> bool {
    use polarscope::synthetic::planted_topic_corpus;
    use polarscope::topics::{build_corpus, fit_lda, top_terms, LdaParams};
    let planted = planted_topic_corpus(seed, 200, 2, 10, 12);
    let corpus = build_corpus(&planted.docs).unwrap();
    let params = LdaParams {
        topics: 2,
        alpha: 0.1,
        beta: 0.01,
        iters: 300,
        burn_in: 100,
        seed,
    };
    let state = fit_lda(&corpus, &params).unwrap();
    let mut used = BTreeSet::new();
    for topic in 0..2 {
        let terms = top_terms(&state, &corpus, topic, 5).unwrap();
        let owners: BTreeSet<usize> = terms
            .iter()
            .map(|(t, _)| planted.vocabularies.iter().position(|v| v.contains(t)).unwrap())
            .collect();
        if owners.len() != 1 || !used.insert(*owners.iter().next().unwrap()) {
            return false;
        }
    }
    true
}

/// Ten days of morning interactions (local time) with day 4 silent.
pub fn ten_day_interactions() -> Vec<polarscope::ingest::Interaction> {
    use chrono::{TimeZone, Utc};
    use polarscope::ingest::{time::default_offset, Interaction, InteractionKind};
    let mut out = Vec::new();
    for day in (1..=10u32).filter(|&d| d != 4) {
        for k in 0..(day % 3 + 2) {
            let at = default_offset()
                .with_ymd_and_hms(2018, 4, day, 8 + k, 30, 0)
                .unwrap()
                .with_timezone(&Utc);
            let s = (day + k) % 6;
            out.push(Interaction {
                source: format!("u{s}"),
                target: format!("u{}", (s + 1 + (day * k) % 5) % 7),
                at,
                kind: InteractionKind::Mention,
            });
        }
    }
    out
}
