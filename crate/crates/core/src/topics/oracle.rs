use super::{Corpus, TopicError};

/// Largest assignment space the exact enumeration accepts (2^20).
pub const MAX_ORACLE_STATES: usize = 1 << 20;

/// The exact collapsed posterior P(z | w) over every topic assignment of a
/// tiny corpus. Assignments are indexed as base-K numbers whose digit `i`
/// is the topic of token `i` (tokens concatenated in document order).
#[derive(Debug, Clone)]
pub struct ExactPosterior {
    pub k: usize,
    pub tokens: usize,
    pub probs: Vec<f64>,
}

impl ExactPosterior {
    pub fn index_of(&self, assignment: &[usize]) -> usize {
        assignment.iter().rev().fold(0, |acc, &t| acc * self.k + t)
    }

    pub fn assignment(&self, mut index: usize) -> Vec<usize> {
        (0..self.tokens)
            .map(|_| {
                let t = index % self.k;
                index /= self.k;
                t
            })
            .collect()
    }

    pub fn probability(&self, assignment: &[usize]) -> f64 {
        self.probs[self.index_of(assignment)]
    }

    /// Most probable assignment index; the lowest index wins ties.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }
}

/// ln(Γ(a + n) / Γ(a)) as a sum of logs of the rising factorial.
fn ln_rising(a: f64, n: u32) -> f64 {
    (0..n).map(|i| (a + i as f64).ln()).sum()
}

/// Enumerates every assignment and evaluates the Dirichlet-multinomial
/// joint P(z, w) in closed form, then normalizes.
pub fn exact_posterior_oracle(corpus: &Corpus, k: usize, alpha: f64, beta: f64) -> Result<ExactPosterior, TopicError> {
    if k < 1 || alpha.is_nan() || alpha <= 0.0 || beta.is_nan() || beta <= 0.0 {
        return Err(TopicError::InvalidParameter("K ≥ 1, alpha > 0 and beta > 0 required".into()));
    }
    let tokens = corpus.total_tokens;
    let states = (k as f64).powi(tokens as i32);
    if states > MAX_ORACLE_STATES as f64 {
        return Err(TopicError::TooLarge { states, limit: MAX_ORACLE_STATES });
    }
    let states = states as usize;
    let v = corpus.vocab_size();
    let words: Vec<usize> = corpus.docs.iter().flat_map(|d| d.terms.iter().copied()).collect();
    let doc_of: Vec<usize> = corpus
        .docs
        .iter()
        .enumerate()
        .flat_map(|(d, doc)| std::iter::repeat_n(d, doc.terms.len()))
        .collect();

    let k_alpha = k as f64 * alpha;
    let v_beta = v as f64 * beta;
    let doc_norm: f64 = corpus.docs.iter().map(|d| ln_rising(k_alpha, d.terms.len() as u32)).sum();

    let mut log_joint = Vec::with_capacity(states);
    let mut dt = vec![0u32; corpus.docs.len() * k];
    let mut tw = vec![0u32; k * v];
    let mut tt = vec![0u32; k];
    let mut z = vec![0usize; tokens];
    for index in 0..states {
        let mut rest = index;
        for zi in z.iter_mut() {
            *zi = rest % k;
            rest /= k;
        }
        dt.iter_mut().for_each(|c| *c = 0);
        tw.iter_mut().for_each(|c| *c = 0);
        tt.iter_mut().for_each(|c| *c = 0);
        for i in 0..tokens {
            dt[doc_of[i] * k + z[i]] += 1;
            tw[z[i] * v + words[i]] += 1;
            tt[z[i]] += 1;
        }
        let mut lp = -doc_norm;
        lp += dt.iter().map(|&c| ln_rising(alpha, c)).sum::<f64>();
        lp += tw.iter().map(|&c| ln_rising(beta, c)).sum::<f64>();
        lp -= tt.iter().map(|&c| ln_rising(v_beta, c)).sum::<f64>();
        log_joint.push(lp);
    }
    let max = log_joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = log_joint.iter().map(|&lp| (lp - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(ExactPosterior { k, tokens, probs })
}
