use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Corpus, TopicError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    pub topics: usize,
    /// Symmetric document-topic prior.
    pub alpha: f64,
    /// Symmetric topic-word prior.
    pub beta: f64,
    /// Total sweeps, burn-in included.
    pub iters: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for LdaParams {
    fn default() -> Self {
        LdaParams::with_topics(5)
    }
}

impl LdaParams {
    /// Defaults for `k` topics: alpha = 50/k, beta = 0.01, 1000 sweeps of
    /// which 200 are burn-in.
    pub fn with_topics(k: usize) -> Self {
        LdaParams {
            topics: k,
            alpha: 50.0 / k.max(1) as f64,
            beta: 0.01,
            iters: 1000,
            burn_in: 200,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), TopicError> {
        let bad = |m: String| Err(TopicError::InvalidParameter(m));
        if self.topics < 1 {
            return bad("K must be ≥ 1".into());
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad(format!("beta must be > 0, got {}", self.beta));
        }
        if self.iters <= self.burn_in {
            return bad(format!("iters ({}) must exceed burn_in ({})", self.iters, self.burn_in));
        }
        Ok(())
    }
}

/// Count matrices and topic assignments of a collapsed Gibbs chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModelState {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub vocab_size: usize,
    /// Topic of every token, per document.
    pub z: Vec<Vec<usize>>,
    /// D × K.
    pub doc_topic_counts: Vec<Vec<u32>>,
    /// K × V.
    pub topic_word_counts: Vec<Vec<u32>>,
    pub topic_totals: Vec<u64>,
    pub rng_seed: u64,
}

impl TopicModelState {
    /// Posterior mean of document `d`'s topic mixture.
    pub fn theta(&self, d: usize) -> Vec<f64> {
        let counts = &self.doc_topic_counts[d];
        let len: u32 = counts.iter().sum();
        let denom = len as f64 + self.k as f64 * self.alpha;
        counts.iter().map(|&c| (c as f64 + self.alpha) / denom).collect()
    }

    /// Posterior mean probability of word `w` under topic `k`.
    pub fn phi(&self, k: usize, w: usize) -> f64 {
        (self.topic_word_counts[k][w] as f64 + self.beta)
            / (self.topic_totals[k] as f64 + self.vocab_size as f64 * self.beta)
    }

    /// Assignments of all tokens concatenated in document order.
    pub fn flat_assignment(&self) -> Vec<usize> {
        self.z.iter().flatten().copied().collect()
    }

    /// Checks every count against the assignments and the corpus.
    pub fn check_invariants(&self, corpus: &Corpus) -> Result<(), String> {
        let v = corpus.vocab_size();
        let mut dt = vec![vec![0u32; self.k]; corpus.docs.len()];
        let mut tw = vec![vec![0u32; v]; self.k];
        let mut tt = vec![0u64; self.k];
        for (d, doc) in corpus.docs.iter().enumerate() {
            if self.z[d].len() != doc.terms.len() {
                return Err(format!("doc {d}: {} assignments for {} tokens", self.z[d].len(), doc.terms.len()));
            }
            for (&w, &k) in doc.terms.iter().zip(&self.z[d]) {
                if k >= self.k {
                    return Err(format!("doc {d}: topic {k} out of range"));
                }
                dt[d][k] += 1;
                tw[k][w] += 1;
                tt[k] += 1;
            }
        }
        if dt != self.doc_topic_counts {
            return Err("doc_topic_counts disagree with assignments".into());
        }
        if tw != self.topic_word_counts {
            return Err("topic_word_counts disagree with assignments".into());
        }
        if tt != self.topic_totals {
            return Err("topic_totals disagree with assignments".into());
        }
        let freq = corpus.term_frequencies();
        for (w, f) in freq.iter().enumerate() {
            let col: u64 = (0..self.k).map(|k| self.topic_word_counts[k][w] as u64).sum();
            if col != *f {
                return Err(format!("word {w}: topic counts sum to {col}, frequency is {f}"));
            }
        }
        if tt.iter().sum::<u64>() != corpus.total_tokens as u64 {
            return Err("topic_totals do not sum to total_tokens".into());
        }
        Ok(())
    }
}

/// A single sequential collapsed Gibbs chain over one corpus.
pub struct GibbsSampler<'a> {
    corpus: &'a Corpus,
    state: TopicModelState,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl<'a> GibbsSampler<'a> {
    /// Draws the initial assignment uniformly at random from `params.seed`.
    pub fn new(corpus: &'a Corpus, params: &LdaParams) -> Result<Self, TopicError> {
        params.validate()?;
        let k = params.topics;
        let v = corpus.vocab_size();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut state = TopicModelState {
            k,
            alpha: params.alpha,
            beta: params.beta,
            vocab_size: v,
            z: Vec::with_capacity(corpus.docs.len()),
            doc_topic_counts: vec![vec![0; k]; corpus.docs.len()],
            topic_word_counts: vec![vec![0; v]; k],
            topic_totals: vec![0; k],
            rng_seed: params.seed,
        };
        for (d, doc) in corpus.docs.iter().enumerate() {
            let mut zd = Vec::with_capacity(doc.terms.len());
            for &w in &doc.terms {
                let t = rng.gen_range(0..k);
                zd.push(t);
                state.doc_topic_counts[d][t] += 1;
                state.topic_word_counts[t][w] += 1;
                state.topic_totals[t] += 1;
            }
            state.z.push(zd);
        }
        Ok(GibbsSampler {
            corpus,
            state,
            rng,
            weights: vec![0.0; k],
        })
    }

    pub fn state(&self) -> &TopicModelState {
        &self.state
    }

    pub fn into_state(self) -> TopicModelState {
        self.state
    }

    /// Resamples every token once, in document order.
    pub fn sweep(&mut self) {
        let st = &mut self.state;
        let v_beta = st.vocab_size as f64 * st.beta;
        for (d, doc) in self.corpus.docs.iter().enumerate() {
            for (n, &w) in doc.terms.iter().enumerate() {
                let old = st.z[d][n];
                st.doc_topic_counts[d][old] -= 1;
                st.topic_word_counts[old][w] -= 1;
                st.topic_totals[old] -= 1;

                let mut total = 0.0;
                for k in 0..st.k {
                    let p = (st.doc_topic_counts[d][k] as f64 + st.alpha)
                        * (st.topic_word_counts[k][w] as f64 + st.beta)
                        / (st.topic_totals[k] as f64 + v_beta);
                    total += p;
                    self.weights[k] = total;
                }
                let u = self.rng.gen::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(st.k - 1);

                st.z[d][n] = new;
                st.doc_topic_counts[d][new] += 1;
                st.topic_word_counts[new][w] += 1;
                st.topic_totals[new] += 1;
            }
        }
    }

    /// Runs `params.iters` sweeps and calls `on_sample` with the sweep index
    /// and state after every sweep past the burn-in.
    pub fn run<F>(&mut self, params: &LdaParams, mut on_sample: F)
    where
        F: FnMut(usize, &TopicModelState),
    {
        for it in 0..params.iters {
            self.sweep();
            if it >= params.burn_in {
                on_sample(it, &self.state);
            }
        }
    }
}

/// Fits LDA and returns the state after the final sweep.
pub fn fit_lda(corpus: &Corpus, params: &LdaParams) -> Result<TopicModelState, TopicError> {
    let mut sampler = GibbsSampler::new(corpus, params)?;
    sampler.run(params, |_, _| {});
    Ok(sampler.into_state())
}
