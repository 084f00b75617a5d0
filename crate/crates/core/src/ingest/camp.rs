use std::collections::{BTreeSet, HashSet};
use std::io::Read;

use serde::{Deserialize, Deserializer, Serialize};

use super::{IngestError, TweetRecord};

/// Bucket label for records that match no camp.
pub const UNASSIGNED: &str = "unassigned";

/// One side of the conversation, defined by its hashtags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampSpec {
    pub label: String,
    /// Lowercase tags without `#`.
    #[serde(deserialize_with = "normalized_tags")]
    pub hashtags: BTreeSet<String>,
}

fn normalize_tag(tag: &str) -> String {
    tag.trim().trim_start_matches('#').to_lowercase()
}

fn normalized_tags<'de, D: Deserializer<'de>>(de: D) -> Result<BTreeSet<String>, D::Error> {
    let raw = Vec::<String>::deserialize(de)?;
    Ok(raw.iter().map(|t| normalize_tag(t)).filter(|t| !t.is_empty()).collect())
}

impl CampSpec {
    pub fn new<I, S>(label: &str, hashtags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        CampSpec {
            label: label.to_string(),
            hashtags: hashtags
                .into_iter()
                .map(|t| normalize_tag(t.as_ref()))
                .filter(|t| !t.is_empty())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampConfig {
    pub camps: Vec<CampSpec>,
    #[serde(default)]
    pub allow_overlap: bool,
}

impl CampConfig {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, IngestError> {
        let cfg: CampConfig = serde_json::from_reader(reader)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Both Indonesian 2018 camps with their collection hashtags.
    pub fn indonesia_2019() -> Self {
        CampConfig {
            camps: vec![
                CampSpec::new(
                    "pro",
                    [
                        "jokowi2periode",
                        "JKW2P",
                        "jokowipresiden2019",
                        "2019tetapjokowi",
                        "jokowisekalilagi",
                        "rakyatmaujokowi2019",
                        "jokowiduaperiode",
                        "salam2jari",
                        "ogah2019gantipresiden",
                        "diasibukkerja",
                    ],
                ),
                CampSpec::new(
                    "contra",
                    [
                        "2019gantipresiden",
                        "2019presidenbaru",
                        "gantipresidenyuk",
                        "gantipresiden",
                        "gantipresiden2019",
                        "asalbukanjkw",
                        "2019gantirezim",
                        "2019wajibgantipresiden",
                        "2019asalbukanjokowi",
                    ],
                ),
            ],
            allow_overlap: false,
        }
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        self.problems().into_iter().next().map_or(Ok(()), |p| Err(IngestError::InvalidCamps(p)))
    }

    /// Every configuration problem, in a stable order.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.camps.is_empty() {
            out.push("at least one camp is required".to_string());
        }
        let mut labels = HashSet::new();
        for camp in &self.camps {
            if camp.label.trim().is_empty() {
                out.push("camp label must not be empty".to_string());
            } else if camp.label == UNASSIGNED {
                out.push(format!("camp label `{UNASSIGNED}` is reserved"));
            } else if !labels.insert(camp.label.as_str()) {
                out.push(format!("duplicate camp label `{}`", camp.label));
            }
            if camp.hashtags.is_empty() {
                out.push(format!("camp `{}` has no hashtags", camp.label));
            }
        }
        if !self.allow_overlap {
            for (i, a) in self.camps.iter().enumerate() {
                for b in &self.camps[i + 1..] {
                    if let Some(tag) = a.hashtags.intersection(&b.hashtags).next() {
                        out.push(format!("camps `{}` and `{}` share hashtag `{tag}`", a.label, b.label));
                    }
                }
            }
        }
        out
    }
}

/// Hashtag bodies in `text`, lowercased, in order of appearance.
pub fn hashtags_in(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(pos) = rest.find('#') {
        let after = &rest[pos + 1..];
        let end = after
            .char_indices()
            .find(|&(_, c)| !(c.is_alphanumeric() || c == '_'))
            .map_or(after.len(), |(i, _)| i);
        if end > 0 {
            out.push(after[..end].to_lowercase());
        }
        rest = &after[end..];
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    /// Records assigned to two or more camps.
    pub count: usize,
    pub tweet_ids: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct CampPartition {
    /// One bucket per camp, in configuration order.
    pub camps: Vec<(String, Vec<TweetRecord>)>,
    pub unassigned: Vec<TweetRecord>,
    pub overlap: OverlapReport,
}

impl CampPartition {
    pub fn get(&self, label: &str) -> Option<&[TweetRecord]> {
        if label == UNASSIGNED {
            return Some(&self.unassigned);
        }
        self.camps.iter().find(|(l, _)| l == label).map(|(_, r)| r.as_slice())
    }
}

/// Assigns every record to each camp whose hashtag it carries. Records
/// carrying tags of several camps go to all of them and are counted as
/// overlap; records with none go to [`UNASSIGNED`].
pub fn partition_by_camp(records: &[TweetRecord], camps: &[CampSpec]) -> CampPartition {
    let mut out = CampPartition {
        camps: camps.iter().map(|c| (c.label.clone(), Vec::new())).collect(),
        ..Default::default()
    };
    for record in records {
        let tags: HashSet<String> = hashtags_in(&record.text).into_iter().collect();
        let mut hits = 0;
        for (camp, (_, bucket)) in camps.iter().zip(out.camps.iter_mut()) {
            if camp.hashtags.iter().any(|t| tags.contains(t)) {
                bucket.push(record.clone());
                hits += 1;
            }
        }
        match hits {
            0 => out.unassigned.push(record.clone()),
            1 => {}
            _ => {
                out.overlap.count += 1;
                out.overlap.tweet_ids.push(record.tweet_id.clone());
            }
        }
    }
    out
}
