//! Term co-occurrence network: terms weighted by frequency, pairs weighted by
//! the number of documents containing both.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{louvain_partition, write_gexf, GexfAttribute, GraphError, Partition, SocialGraph};
use crate::textprep::TokenList;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TermNetworkOptions {
    /// Terms with fewer total occurrences are dropped before pairing.
    pub min_term_freq: u64,
    /// At most this many of the most frequent terms are kept.
    pub max_terms: usize,
}

impl Default for TermNetworkOptions {
    fn default() -> Self {
        TermNetworkOptions {
            min_term_freq: 5,
            max_terms: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermNetwork {
    /// Kept terms in lexicographic order; node `i` of `graph` is `terms[i]`.
    terms: Vec<String>,
    frequency: Vec<u64>,
    doc_frequency: Vec<u64>,
    graph: SocialGraph,
}

impl TermNetwork {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Total occurrences of each term, aligned with [`terms`](Self::terms).
    pub fn frequencies(&self) -> &[u64] {
        &self.frequency
    }

    /// Number of documents containing each term.
    pub fn doc_frequencies(&self) -> &[u64] {
        &self.doc_frequency
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn weight(&self, a: &str, b: &str) -> Option<u64> {
        self.graph.weight(self.index_of(a)?, self.index_of(b)?)
    }

    /// `(source, target, weight)` with source lexicographically smaller.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.graph
            .edges()
            .map(|(u, v, w)| (self.terms[u].as_str(), self.terms[v].as_str(), w))
    }
}

/// Builds the co-occurrence network. Each document adds 1 to every unordered
/// pair of distinct kept terms it contains, however often they repeat.
/// Panics if `min_term_freq` is 0.
pub fn build_term_network(docs: &[TokenList], opts: &TermNetworkOptions) -> TermNetwork {
    assert!(opts.min_term_freq >= 1, "min_term_freq must be at least 1");
    let mut freq: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for doc in docs {
        let mut distinct: Vec<&str> = doc.tokens.iter().map(String::as_str).collect();
        for t in &distinct {
            freq.entry(t).or_default().0 += 1;
        }
        distinct.sort_unstable();
        distinct.dedup();
        for t in distinct {
            freq.get_mut(t).expect("counted above").1 += 1;
        }
    }
    let mut kept: Vec<(&str, u64, u64)> = freq
        .into_iter()
        .filter(|&(_, (f, _))| f >= opts.min_term_freq)
        .map(|(t, (f, df))| (t, f, df))
        .collect();
    if kept.len() > opts.max_terms {
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        kept.truncate(opts.max_terms);
        kept.sort_by(|a, b| a.0.cmp(b.0));
    }
    let index: HashMap<&str, usize> = kept.iter().enumerate().map(|(i, &(t, _, _))| (t, i)).collect();

    let pairs = docs
        .par_iter()
        .fold(HashMap::<(usize, usize), u64>::new, |mut acc, doc| {
            let mut ids: Vec<usize> = doc.tokens.iter().filter_map(|t| index.get(t.as_str()).copied()).collect();
            ids.sort_unstable();
            ids.dedup();
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    *acc.entry((a, b)).or_insert(0) += 1;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    let terms: Vec<String> = kept.iter().map(|&(t, _, _)| t.to_string()).collect();
    TermNetwork {
        graph: SocialGraph::from_edges(terms.clone(), pairs.into_iter().map(|((a, b), w)| (a, b, w))),
        frequency: kept.iter().map(|k| k.1).collect(),
        doc_frequency: kept.iter().map(|k| k.2).collect(),
        terms,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRelation {
    pub source: String,
    pub target: String,
    pub weight: u64,
}

/// The `n` heaviest pairs, ties broken by the (source, target) pair.
pub fn top_relations(net: &TermNetwork, n: usize) -> Vec<TermRelation> {
    let mut rows: Vec<(&str, &str, u64)> = net.edges().collect();
    rows.sort_by(|a, b| b.2.cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    rows.into_iter()
        .take(n)
        .map(|(s, t, w)| TermRelation {
            source: s.to_string(),
            target: t.to_string(),
            weight: w,
        })
        .collect()
}

/// Weighted Louvain over the term graph.
pub fn term_communities(net: &TermNetwork, seed: u64) -> Result<Partition, GraphError> {
    louvain_partition(&net.graph, seed, true)
}

/// `source,target,weight` rows in graph order.
pub fn write_term_edges_csv<W: Write>(net: &TermNetwork, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["source", "target", "weight"])?;
    for (s, t, weight) in net.edges() {
        w.write_record([s, t, &weight.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `term,frequency,community` rows; the community cell is empty without a
/// partition.
pub fn write_term_nodes_csv<W: Write>(net: &TermNetwork, communities: Option<&Partition>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["term", "frequency", "community"])?;
    for (i, term) in net.terms.iter().enumerate() {
        let community = communities.map(|p| p.community(i).to_string()).unwrap_or_default();
        w.write_record([term.as_str(), &net.frequency[i].to_string(), &community])?;
    }
    w.flush()?;
    Ok(())
}

/// GEXF with `community` and `frequency` node attributes.
pub fn write_term_gexf<W: Write>(net: &TermNetwork, communities: Option<&Partition>, out: W) -> io::Result<()> {
    let freq = GexfAttribute {
        title: "frequency",
        values: &net.frequency,
    };
    write_gexf(&net.graph, communities, &[freq], out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn docs(raw: &[&[&str]]) -> Vec<TokenList> {
        raw.iter()
            .enumerate()
            .map(|(i, d)| TokenList {
                doc_id: i.to_string(),
                tokens: d.iter().map(|s| s.to_string()).collect(),
            })
            .collect()
    }

    fn all() -> TermNetworkOptions {
        TermNetworkOptions {
            min_term_freq: 1,
            max_terms: usize::MAX,
        }
    }

    #[test]
    fn repeats_count_once_per_doc() {
        let net = build_term_network(&docs(&[&["ganti", "presiden", "ganti"]]), &all());
        assert_eq!(net.frequencies(), &[2, 1]);
        assert_eq!(net.weight("ganti", "presiden"), Some(1));
        assert_eq!(
            top_relations(&net, 5),
            [TermRelation {
                source: "ganti".into(),
                target: "presiden".into(),
                weight: 1
            }]
        );
    }

    #[test]
    fn weights_sum_over_docs() {
        let net = build_term_network(&docs(&[&["kaos", "cfd"], &["cfd", "kaos", "x"]]), &all());
        assert_eq!(net.weight("cfd", "kaos"), Some(2));
        assert_eq!(net.weight("kaos", "x"), Some(1));
    }

    #[test]
    fn thresholds() {
        let d = docs(&[&["a", "b", "c"], &["a", "b"], &["a"]]);
        let net = build_term_network(&d, &TermNetworkOptions { min_term_freq: 2, max_terms: 10 });
        assert_eq!(net.terms(), &["a", "b"]);
        let net = build_term_network(&d, &TermNetworkOptions { min_term_freq: 1, max_terms: 2 });
        assert_eq!(net.terms(), &["a", "b"]);
        // Ties on frequency keep the lexicographically smaller term.
        let net = build_term_network(&docs(&[&["z", "y", "x"]]), &TermNetworkOptions { min_term_freq: 1, max_terms: 2 });
        assert_eq!(net.terms(), &["x", "y"]);
    }

    #[test]
    fn ties_ordered_lexicographically() {
        let net = build_term_network(&docs(&[&["d", "c"], &["a", "b"]]), &all());
        let rows: Vec<_> = top_relations(&net, 10).into_iter().map(|r| (r.source, r.target)).collect();
        assert_eq!(rows, [("a".to_string(), "b".to_string()), ("c".into(), "d".into())]);
    }

    #[test]
    fn communities_of_two_triangles() {
        let net = build_term_network(&docs(&[&["a", "b", "c"], &["x", "y", "z"]]), &all());
        let p = term_communities(&net, 0).unwrap();
        assert_eq!(p.community_count(), 2);
        assert_eq!(p.community(0), p.community(2));
        assert_ne!(p.community(0), p.community(3));
    }

    #[test]
    fn clique_stays_whole_and_edgeless_errors() {
        let net = build_term_network(&docs(&[&["a", "b", "c", "d", "e"]]), &all());
        assert_eq!(term_communities(&net, 1).unwrap().community_count(), 1);
        let lonely = build_term_network(&docs(&[&["a"], &["b"]]), &all());
        assert!(matches!(term_communities(&lonely, 0), Err(GraphError::UndefinedMetric { .. })));
    }

    #[test]
    fn exports() {
        let net = build_term_network(&docs(&[&["a", "b"], &["a", "b"], &["b", "c"]]), &all());
        let p = term_communities(&net, 0).unwrap();
        let mut edges = Vec::new();
        write_term_edges_csv(&net, &mut edges).unwrap();
        assert_eq!(String::from_utf8(edges).unwrap(), "source,target,weight\na,b,2\nb,c,1\n");
        let mut nodes = Vec::new();
        write_term_nodes_csv(&net, None, &mut nodes).unwrap();
        assert_eq!(String::from_utf8(nodes).unwrap(), "term,frequency,community\na,2,\nb,3,\nc,1,\n");
        let mut xml = Vec::new();
        write_term_gexf(&net, Some(&p), &mut xml).unwrap();
        assert!(String::from_utf8(xml).unwrap().contains(r#"title="frequency""#));
    }

    proptest! {
        #[test]
        fn weight_bounded_by_doc_frequency(
            raw in prop::collection::vec(prop::collection::vec(0u8..12, 0..8), 1..40),
            min in 1u64..4,
        ) {
            let d: Vec<TokenList> = raw.iter().enumerate().map(|(i, toks)| TokenList {
                doc_id: i.to_string(),
                tokens: toks.iter().map(|t| format!("t{t}")).collect(),
            }).collect();
            let full = build_term_network(&d, &all());
            let cut = build_term_network(&d, &TermNetworkOptions { min_term_freq: min, max_terms: usize::MAX });
            let df = full.doc_frequencies();
            for (a, b, w) in full.edges() {
                let (ia, ib) = (full.index_of(a).unwrap(), full.index_of(b).unwrap());
                prop_assert!(w >= 1 && w <= df[ia].min(df[ib]));
                prop_assert_eq!(full.weight(b, a), Some(w));
                if let (Some(_), Some(_)) = (cut.index_of(a), cut.index_of(b)) {
                    prop_assert_eq!(cut.weight(a, b), Some(w));
                }
            }
            prop_assert_eq!(cut.edges().filter(|(a, b, _)| full.weight(a, b).is_none()).count(), 0);
        }
    }
}
