//! Seeded generators with known ground truth, used by fixtures, tests and
//! the demo command.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::time::default_offset;
use crate::ingest::{CampConfig, CampSpec, TweetRecord};
use crate::textprep::TokenList;

/// Documents drawn from disjoint planted vocabularies, one topic per doc.
#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub docs: Vec<TokenList>,
    /// Planted topic of each document.
    pub labels: Vec<usize>,
    pub vocabularies: Vec<Vec<String>>,
}

/// `docs` documents of `doc_len` tokens; topic `k` uses words `t{k}w{i}`.
pub fn planted_topic_corpus(seed: u64, docs: usize, topics: usize, vocab_per_topic: usize, doc_len: usize) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocabularies: Vec<Vec<String>> = (0..topics)
        .map(|k| (0..vocab_per_topic).map(|i| format!("t{k}w{i:02}")).collect())
        .collect();
    let mut labels = Vec::with_capacity(docs);
    let docs = (0..docs)
        .map(|d| {
            let k = rng.gen_range(0..topics);
            labels.push(k);
            TokenList {
                doc_id: format!("doc-{d:05}"),
                tokens: (0..doc_len).map(|_| vocabularies[k].choose(&mut rng).unwrap().clone()).collect(),
            }
        })
        .collect();
    PlantedCorpus {
        docs,
        labels,
        vocabularies,
    }
}

/// Documents of 0..=`max_len` tokens over `vocab` words with a skewed
/// (roughly Zipfian) word distribution and frequent repeats.
pub fn random_token_lists(seed: u64, docs: usize, vocab: usize, max_len: usize) -> Vec<TokenList> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..docs)
        .map(|d| {
            let len = rng.gen_range(0..=max_len);
            TokenList {
                doc_id: format!("doc-{d:05}"),
                tokens: (0..len)
                    .map(|_| {
                        let u: f64 = rng.gen();
                        format!("w{:03}", ((u * u * u) * vocab as f64) as usize)
                    })
                    .collect(),
            }
        })
        .collect()
}

const PRO_WORDS: &[&str] = &[
    "jokowi", "widodo", "kerja", "bangun", "jalan", "maju", "sejahtera", "dukung", "periode", "relawan", "selamat",
    "semangat", "percaya", "hasil", "usaha", "tanam",
];

const CONTRA_WORDS: &[&str] = &[
    "ganti", "presiden", "prabowo", "sandiaga", "ubah", "oposisi", "ekonomi", "rakyat", "korupsi", "curang", "tolak",
    "lawan", "turun", "janji", "tipu", "rusak",
];

#[derive(Debug, Clone)]
pub struct PolarizedConfig {
    pub seed: u64,
    pub tweets_per_camp: usize,
    pub actors_per_camp: usize,
    /// Probability that an interaction targets the other camp.
    pub cross_camp_rate: f64,
    pub days: u32,
    pub start: DateTime<Utc>,
}

impl Default for PolarizedConfig {
    fn default() -> Self {
        PolarizedConfig {
            seed: 2019,
            tweets_per_camp: 500,
            actors_per_camp: 50,
            cross_camp_rate: 0.05,
            days: 10,
            start: default_offset()
                .with_ymd_and_hms(2018, 4, 20, 0, 0, 0)
                .unwrap()
                .with_timezone(&Utc),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    /// Sorted by timestamp, then id.
    pub records: Vec<TweetRecord>,
    /// Camps `pro` (`#jokowi2periode`) and `contra` (`#2019gantipresiden`).
    pub camps: CampConfig,
    /// Planted camp of every actor handle.
    pub planted: BTreeMap<String, String>,
}

/// Two camps of actors who mostly mention, reply to and quote their own
/// side. Every tweet carries its camp's hashtag and a few camp-specific
/// words; a share of tweets end with a link.
pub fn polarized_dataset(cfg: &PolarizedConfig) -> SyntheticDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sides = [("pro", "jokowi2periode", PRO_WORDS), ("contra", "2019gantipresiden", CONTRA_WORDS)];
    let actors: Vec<Vec<String>> = sides
        .iter()
        .map(|(label, _, _)| (0..cfg.actors_per_camp).map(|i| format!("{}{i:03}", &label[..3])).collect())
        .collect();
    let mut planted = BTreeMap::new();
    for (side, handles) in actors.iter().enumerate() {
        for h in handles {
            planted.insert(h.clone(), sides[side].0.to_string());
        }
    }
    let span = i64::from(cfg.days.max(1)) * 86_400;

    let mut records = Vec::with_capacity(2 * cfg.tweets_per_camp);
    for (side, &(label, tag, words)) in sides.iter().enumerate() {
        for i in 0..cfg.tweets_per_camp {
            let author = actors[side].choose(&mut rng).unwrap().clone();
            let pick_target = |rng: &mut ChaCha8Rng| loop {
                let camp = if rng.gen_bool(cfg.cross_camp_rate) { 1 - side } else { side };
                let t = actors[camp].choose(rng).unwrap();
                if *t != author {
                    return t.clone();
                }
            };
            let mentions: Vec<String> = (0..rng.gen_range(1..=2)).map(|_| pick_target(&mut rng)).collect();
            let reply_to = rng.gen_bool(0.3).then(|| pick_target(&mut rng));
            let is_quote = reply_to.is_none() && rng.gen_bool(0.1);
            let reply_to = if is_quote { Some(pick_target(&mut rng)) } else { reply_to };

            let mut text: Vec<String> = mentions.iter().map(|m| format!("@{m}")).collect();
            text.extend((0..rng.gen_range(3..=6)).map(|_| words.choose(&mut rng).unwrap().to_string()));
            text.push(format!("#{tag}"));
            if rng.gen_bool(0.2) {
                text.push(format!("https://t.co/{:08x}", rng.gen::<u32>()));
            }
            records.push(TweetRecord {
                tweet_id: format!("{label}-{i:05}"),
                author,
                text: text.join(" "),
                created_at: cfg.start + Duration::seconds(rng.gen_range(0..span)),
                is_reply: reply_to.is_some() && !is_quote,
                is_quote,
                reply_to,
            });
        }
    }
    records.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.tweet_id.cmp(&b.tweet_id)));
    SyntheticDataset {
        records,
        camps: CampConfig {
            camps: sides.iter().map(|&(label, tag, _)| CampSpec::new(label, [tag])).collect(),
            allow_overlap: false,
        },
        planted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{interactions_of, partition_by_camp};
    use crate::textprep::Preprocessor;

    #[test]
    fn seeded_and_balanced() {
        let a = polarized_dataset(&PolarizedConfig::default());
        let b = polarized_dataset(&PolarizedConfig::default());
        assert_eq!(a.records, b.records);
        assert_eq!(a.records.len(), 1000);
        let parts = partition_by_camp(&a.records, &a.camps.camps);
        assert_eq!(parts.get("pro").unwrap().len(), 500);
        assert_eq!(parts.get("contra").unwrap().len(), 500);
        assert!(parts.unassigned.is_empty());
    }

    #[test]
    fn cross_camp_share_is_small() {
        let d = polarized_dataset(&PolarizedConfig::default());
        let xs = interactions_of(&d.records);
        let cross = xs.iter().filter(|i| d.planted[&i.source] != d.planted[&i.target]).count();
        let share = cross as f64 / xs.len() as f64;
        assert!(share > 0.02 && share < 0.09, "{share}");
    }

    #[test]
    fn camp_words_survive_preprocessing() {
        let pre = Preprocessor::default();
        for w in PRO_WORDS.iter().chain(CONTRA_WORDS) {
            assert_eq!(pre.tokens(w), [w.to_string()], "{w}");
        }
    }

    #[test]
    fn planted_docs_use_one_vocabulary() {
        let c = planted_topic_corpus(1, 50, 2, 10, 12);
        for (doc, &k) in c.docs.iter().zip(&c.labels) {
            assert!(doc.tokens.iter().all(|t| c.vocabularies[k].contains(t)));
        }
        assert_eq!(random_token_lists(3, 20, 30, 8), random_token_lists(3, 20, 30, 8));
    }
}
