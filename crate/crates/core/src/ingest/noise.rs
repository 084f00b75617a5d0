use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::TweetRecord;

/// Thresholds for the bot/spam heuristics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseConfig {
    /// Copies of one exact text an author may keep.
    pub repeat_threshold: usize,
    /// Minimum tweets before an author can be judged a bot.
    pub min_activity: usize,
    /// Share of templated repeats above which an active author is dropped.
    pub duplicate_ratio: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            repeat_threshold: 5,
            min_activity: 20,
            duplicate_ratio: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorRemoval {
    pub author: String,
    /// Exact repeats beyond the threshold.
    pub repeats_dropped: usize,
    /// Whole author removed as templated spam.
    pub author_dropped: bool,
    pub removed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub input: usize,
    pub kept: usize,
    pub removed: usize,
    /// Sorted by author.
    pub authors: Vec<AuthorRemoval>,
}

/// Text with URLs and mentions removed, lowercased, whitespace collapsed.
/// Bots typically vary only those parts between posts.
fn template_of(text: &str) -> String {
    text.split_whitespace()
        .filter(|w| {
            let lw = w.to_ascii_lowercase();
            !(lw.starts_with('@') || lw.starts_with("http://") || lw.starts_with("https://") || lw.starts_with("www."))
        })
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Removes bot-like noise in two passes:
///
/// 1. each author keeps at most `repeat_threshold` copies of an exact text;
/// 2. on what survives, an author with at least `min_activity` tweets whose
///    share of templated repeats exceeds `duplicate_ratio` is dropped.
///
/// The result is idempotent and preserves input order.
pub fn filter_noise(records: &[TweetRecord], cfg: &NoiseConfig) -> (Vec<TweetRecord>, NoiseReport) {
    let mut copies: HashMap<(&str, &str), usize> = HashMap::new();
    let mut keep = vec![true; records.len()];
    let mut repeats: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let n = copies.entry((r.author.as_str(), r.text.as_str())).or_insert(0);
        *n += 1;
        if *n > cfg.repeat_threshold {
            keep[i] = false;
            *repeats.entry(r.author.as_str()).or_insert(0) += 1;
        }
    }

    let mut activity: HashMap<&str, (usize, HashSet<String>)> = HashMap::new();
    for (r, _) in records.iter().zip(&keep).filter(|(_, k)| **k) {
        let entry = activity.entry(r.author.as_str()).or_default();
        entry.0 += 1;
        entry.1.insert(template_of(&r.text));
    }
    let bots: HashSet<&str> = activity
        .iter()
        .filter(|(_, (n, templates))| {
            *n >= cfg.min_activity && (*n - templates.len()) as f64 / *n as f64 > cfg.duplicate_ratio
        })
        .map(|(a, _)| *a)
        .collect();

    let mut removed_by_author: BTreeMap<&str, usize> = BTreeMap::new();
    let mut kept = Vec::with_capacity(records.len());
    for (r, k) in records.iter().zip(&keep) {
        if *k && !bots.contains(r.author.as_str()) {
            kept.push(r.clone());
        } else {
            *removed_by_author.entry(r.author.as_str()).or_insert(0) += 1;
        }
    }
    let authors = removed_by_author
        .into_iter()
        .map(|(author, removed)| AuthorRemoval {
            author: author.to_string(),
            repeats_dropped: repeats.get(author).copied().unwrap_or(0),
            author_dropped: bots.contains(author),
            removed,
        })
        .collect();
    let report = NoiseReport {
        input: records.len(),
        kept: kept.len(),
        removed: records.len() - kept.len(),
        authors,
    };
    (kept, report)
}
