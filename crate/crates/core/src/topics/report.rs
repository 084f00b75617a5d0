use serde::{Deserialize, Serialize};

use super::{Corpus, TopicError, TopicModelState};

/// The `n` most frequent terms of `topic` with their posterior
/// probabilities. Ties are broken by term.
pub fn top_terms(state: &TopicModelState, corpus: &Corpus, topic: usize, n: usize) -> Result<Vec<(String, f64)>, TopicError> {
    if topic >= state.k {
        return Err(TopicError::TopicOutOfRange { topic, k: state.k });
    }
    Ok(ranked_terms(state, topic)
        .into_iter()
        .take(n)
        .map(|w| (corpus.vocab[w].clone(), state.phi(topic, w)))
        .collect())
}

/// Word indices by descending count; the vocabulary is sorted, so index
/// order is lexicographic order.
fn ranked_terms(state: &TopicModelState, topic: usize) -> Vec<usize> {
    let counts = &state.topic_word_counts[topic];
    let mut idx: Vec<usize> = (0..counts.len()).collect();
    idx.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    idx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermStat {
    pub term: String,
    pub prob: f64,
    /// Occurrences in the whole corpus.
    pub overall_freq: u64,
    /// Occurrences assigned to this topic.
    pub within_freq: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic: usize,
    /// Share of all tokens assigned to the topic.
    pub weight: f64,
    pub terms: Vec<TermStat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicReport {
    /// Biggest topic first.
    pub topics: Vec<TopicSummary>,
}

/// Per-topic weights and top terms, biggest topics first. `max_topics`
/// limits how many topics are listed.
pub fn topic_report(state: &TopicModelState, corpus: &Corpus, terms_per_topic: usize, max_topics: Option<usize>) -> TopicReport {
    let freq = corpus.term_frequencies();
    let total = state.topic_totals.iter().sum::<u64>().max(1) as f64;
    let mut order: Vec<usize> = (0..state.k).collect();
    order.sort_by(|&a, &b| state.topic_totals[b].cmp(&state.topic_totals[a]).then(a.cmp(&b)));
    let topics = order
        .into_iter()
        .take(max_topics.unwrap_or(state.k))
        .map(|k| TopicSummary {
            topic: k,
            weight: state.topic_totals[k] as f64 / total,
            terms: ranked_terms(state, k)
                .into_iter()
                .take(terms_per_topic)
                .map(|w| TermStat {
                    term: corpus.vocab[w].clone(),
                    prob: state.phi(k, w),
                    overall_freq: freq[w],
                    within_freq: state.topic_word_counts[k][w] as u64,
                })
                .collect(),
        })
        .collect();
    TopicReport { topics }
}

#[cfg(test)]
mod tests {
    use super::super::tests::lists;
    use super::super::{build_corpus, fit_lda, LdaParams};
    use super::*;

    fn one_topic(docs: &[&[&str]]) -> (Corpus, TopicModelState) {
        let c = build_corpus(&lists(docs)).unwrap();
        let p = LdaParams { topics: 1, alpha: 1.0, beta: 0.5, iters: 2, burn_in: 0, seed: 0 };
        let st = fit_lda(&c, &p).unwrap();
        (c, st)
    }

    #[test]
    fn single_topic_ordering_and_weights() {
        let (c, st) = one_topic(&[&["b", "a", "a"]]);
        let top = top_terms(&st, &c, 0, 10).unwrap();
        assert_eq!(top.iter().map(|(t, _)| t.as_str()).collect::<Vec<_>>(), ["a", "b"]);
        // (count + beta) / (total + V * beta)
        assert!((top[0].1 - 2.5 / 4.0).abs() < 1e-12);
        assert!((top[1].1 - 1.5 / 4.0).abs() < 1e-12);
        assert!(top_terms(&st, &c, 1, 3).is_err());

        let report = topic_report(&st, &c, 5, None);
        assert_eq!(report.topics.len(), 1);
        assert_eq!(report.topics[0].weight, 1.0);
        assert_eq!(report.topics[0].terms[0].within_freq, 2);
    }

    #[test]
    fn ties_are_lexicographic() {
        let (c, st) = one_topic(&[&["z", "m", "a", "m"]]);
        let top = top_terms(&st, &c, 0, 2).unwrap();
        assert_eq!(top.iter().map(|(t, _)| t.as_str()).collect::<Vec<_>>(), ["m", "a"]);
    }

    #[test]
    fn report_invariants_multi_topic() {
        let c = build_corpus(&lists(&[&["a", "b", "c", "a"], &["d", "e", "d"], &["a", "e", "b", "c"]])).unwrap();
        let st = fit_lda(&c, &LdaParams { topics: 3, alpha: 0.3, beta: 0.1, iters: 20, burn_in: 5, seed: 2 }).unwrap();
        let r = topic_report(&st, &c, 10, None);
        assert!((r.topics.iter().map(|t| t.weight).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r.topics.windows(2).all(|w| w[0].weight >= w[1].weight));
        for t in &r.topics {
            for term in &t.terms {
                assert!(term.within_freq <= term.overall_freq);
            }
        }
        assert_eq!(topic_report(&st, &c, 2, Some(2)).topics.len(), 2);
    }
}
