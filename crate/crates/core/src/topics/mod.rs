//! LDA topic modeling with collapsed Gibbs sampling.

mod gibbs;
mod oracle;
mod report;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::TokenList;

pub use gibbs::{fit_lda, GibbsSampler, LdaParams, TopicModelState};
pub use oracle::{exact_posterior_oracle, ExactPosterior, MAX_ORACLE_STATES};
pub use report::{top_terms, topic_report, TermStat, TopicReport, TopicSummary};

#[derive(Debug, Error, PartialEq)]
pub enum TopicError {
    #[error("corpus is empty: every document has zero tokens")]
    EmptyCorpus,
    #[error("invalid LDA parameter: {0}")]
    InvalidParameter(String),
    #[error("topic {topic} out of range for K = {k}")]
    TopicOutOfRange { topic: usize, k: usize },
    #[error("exact posterior needs {states} states, limit is {limit}")]
    TooLarge { states: f64, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    /// Indices into [`Corpus::vocab`].
    pub terms: Vec<usize>,
}

/// Documents over an indexed vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    /// Sorted, distinct.
    pub vocab: Vec<String>,
    pub docs: Vec<Document>,
    pub total_tokens: usize,
    /// Empty token lists skipped while building.
    pub dropped_empty: usize,
}

impl Corpus {
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    /// Occurrences of each vocabulary entry over the whole corpus.
    pub fn term_frequencies(&self) -> Vec<u64> {
        let mut freq = vec![0u64; self.vocab.len()];
        for doc in &self.docs {
            for &w in &doc.terms {
                freq[w] += 1;
            }
        }
        freq
    }
}

/// Indexes token lists. The vocabulary is sorted so that indices, and any
/// tie broken by index, follow lexicographic term order.
pub fn build_corpus(token_lists: &[TokenList]) -> Result<Corpus, TopicError> {
    let vocab: Vec<String> = token_lists
        .iter()
        .flat_map(|d| d.tokens.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: HashMap<&str, usize> = vocab.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let mut docs = Vec::with_capacity(token_lists.len());
    let mut dropped_empty = 0;
    let mut total_tokens = 0;
    for list in token_lists {
        if list.tokens.is_empty() {
            dropped_empty += 1;
            continue;
        }
        total_tokens += list.tokens.len();
        docs.push(Document {
            id: list.doc_id.clone(),
            terms: list.tokens.iter().map(|t| index[t.as_str()]).collect(),
        });
    }
    if docs.is_empty() {
        return Err(TopicError::EmptyCorpus);
    }
    Ok(Corpus {
        vocab,
        docs,
        total_tokens,
        dropped_empty,
    })
}
