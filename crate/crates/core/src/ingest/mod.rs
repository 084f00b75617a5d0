//! Record ingestion: parsing, camp partitioning, interaction extraction and
//! noise filtering.

mod camp;
mod noise;
mod parse;
pub mod time;

use std::collections::HashSet;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use camp::{hashtags_in, partition_by_camp, CampConfig, CampPartition, CampSpec, OverlapReport, UNASSIGNED};
pub use noise::{filter_noise, AuthorRemoval, NoiseConfig, NoiseReport};
pub use parse::{
    parse_records, write_records_csv, write_records_jsonl, ColumnMap, InputFormat, ParseOptions, ParseOutcome, SkippedRow,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema mismatch: {malformed} of {rows} rows malformed; first bad row {first_bad_row}: {reason}")]
    SchemaMismatch {
        rows: usize,
        malformed: usize,
        first_bad_row: usize,
        reason: String,
    },
    #[error("csv header is missing required column `{0}`")]
    MissingColumn(String),
    #[error("invalid time zone offset `{0}`")]
    InvalidTimeZone(String),
    #[error("invalid camp configuration: {0}")]
    InvalidCamps(String),
    #[error("camp config is not valid JSON: {0}")]
    CampJson(#[from] serde_json::Error),
    #[error("interaction file: {0}")]
    Interactions(#[from] csv::Error),
}

/// One ingested post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: String,
    /// Lowercased handle without the leading `@`.
    pub author: String,
    pub text: String,
    pub created_at: DateTime<Utc>,
    pub reply_to: Option<String>,
    #[serde(default)]
    pub is_reply: bool,
    #[serde(default)]
    pub is_quote: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Mention,
    Reply,
    Quote,
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InteractionKind::Mention => "mention",
            InteractionKind::Reply => "reply",
            InteractionKind::Quote => "quote",
        })
    }
}

/// A directed actor-to-actor event. Never a self-loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interaction {
    pub source: String,
    pub target: String,
    pub at: DateTime<Utc>,
    pub kind: InteractionKind,
}

/// Lowercases a handle and strips a leading `@`. Returns `None` for blanks.
pub fn normalize_handle(raw: &str) -> Option<String> {
    let h = raw.trim().trim_start_matches('@').trim();
    if h.is_empty() || h.eq_ignore_ascii_case("na") {
        None
    } else {
        Some(h.to_lowercase())
    }
}

fn is_handle_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// `@handle` tokens in text order, lowercased, without the `@`.
///
/// A handle is 1 to 15 of `[A-Za-z0-9_]`. An `@` glued to a preceding word
/// character (e-mail addresses) or followed by a longer run is not a mention.
pub fn mentions_in(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut prev: Option<char> = None;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '@' && !prev.is_some_and(is_handle_char) {
            let start = i + 1;
            let mut end = start;
            let mut last = c;
            while let Some(&(j, n)) = chars.peek() {
                if !is_handle_char(n) {
                    break;
                }
                end = j + n.len_utf8();
                last = n;
                chars.next();
            }
            if (1..=15).contains(&(end - start)) {
                out.push(text[start..end].to_ascii_lowercase());
            }
            prev = Some(last);
            continue;
        }
        prev = Some(c);
    }
    out
}

/// Actor interactions carried by one record: one per distinct mentioned
/// handle, plus the reply target when it is not already mentioned.
/// Self-interactions are dropped.
pub fn extract_interactions(record: &TweetRecord) -> Vec<Interaction> {
    let mut seen: HashSet<String> = HashSet::new();
    seen.insert(record.author.clone());
    let mut out = Vec::new();
    let make = |target: String, kind| Interaction {
        source: record.author.clone(),
        target,
        at: record.created_at,
        kind,
    };
    for handle in mentions_in(&record.text) {
        if seen.insert(handle.clone()) {
            out.push(make(handle, InteractionKind::Mention));
        }
    }
    if let Some(target) = record.reply_to.as_deref().and_then(normalize_handle) {
        if seen.insert(target.clone()) {
            let kind = if record.is_quote && !record.is_reply {
                InteractionKind::Quote
            } else {
                InteractionKind::Reply
            };
            out.push(make(target, kind));
        }
    }
    out
}

/// Interactions of every record in order; records without any are skipped.
pub fn interactions_of<'a, I>(records: I) -> Vec<Interaction>
where
    I: IntoIterator<Item = &'a TweetRecord>,
{
    records.into_iter().flat_map(extract_interactions).collect()
}

/// Interaction interchange CSV: `source,target,at,kind`, `at` in RFC 3339.
pub fn write_interactions_csv<W: std::io::Write>(interactions: &[Interaction], out: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    for i in interactions {
        w.serialize(i)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_interactions_csv<R: std::io::Read>(input: R) -> Result<Vec<Interaction>, IngestError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        let i: Interaction = row?;
        if i.source == i.target {
            continue;
        }
        out.push(i);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn record(author: &str, text: &str, reply_to: Option<&str>) -> TweetRecord {
        TweetRecord {
            tweet_id: "1".into(),
            author: author.into(),
            text: text.into(),
            created_at: Utc.with_ymd_and_hms(2019, 3, 16, 5, 29, 0).unwrap(),
            reply_to: reply_to.map(str::to_string),
            is_reply: false,
            is_quote: false,
        }
    }

    #[test]
    fn figure_row_yields_single_mention() {
        let r = record("agnesalexandri1", "@jokowi #TanganjokKrie2", Some("jokowi"));
        let got = extract_interactions(&r);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].source, "agnesalexandri1");
        assert_eq!(got[0].target, "jokowi");
        assert_eq!(got[0].kind, InteractionKind::Mention);
    }

    #[test]
    fn no_mentions_no_interactions() {
        assert!(extract_interactions(&record("x", "hello world", None)).is_empty());
    }

    #[test]
    fn self_mention_and_duplicates_dropped() {
        let got = extract_interactions(&record("x", "@x @y @y hi", None));
        assert_eq!(got.len(), 1);
        assert_eq!((got[0].source.as_str(), got[0].target.as_str()), ("x", "y"));
    }

    #[test]
    fn reply_without_mention_yields_reply() {
        let got = extract_interactions(&record("a", "setuju pak", Some("@Elina_Vay")));
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].target, "elina_vay");
        assert_eq!(got[0].kind, InteractionKind::Reply);

        let mut q = record("a", "lihat ini", Some("b"));
        q.is_quote = true;
        assert_eq!(extract_interactions(&q)[0].kind, InteractionKind::Quote);
    }

    #[test]
    fn mention_syntax() {
        assert_eq!(mentions_in("@deninovi @dipalala ok"), vec!["deninovi", "dipalala"]);
        assert_eq!(mentions_in("mail me at a@b.com"), Vec::<String>::new());
        assert_eq!(mentions_in("@ kiranalara"), Vec::<String>::new());
        assert_eq!(mentions_in("@abcdefghijklmnopq too long"), Vec::<String>::new());
        assert_eq!(mentions_in("(@Bi4nkaR4ra)"), vec!["bi4nkar4ra"]);
    }

    proptest! {
        #[test]
        fn interactions_are_lowercase_and_loop_free(
            author in "[a-z0-9_]{1,8}",
            words in proptest::collection::vec("@?[A-Za-z0-9_]{1,10}", 0..12),
            reply in proptest::option::of("[A-Za-z_]{1,8}"),
        ) {
            let r = record(&author, &words.join(" "), reply.as_deref());
            let got = extract_interactions(&r);
            prop_assert_eq!(&got, &extract_interactions(&r));
            let mut targets = HashSet::new();
            for i in &got {
                prop_assert_ne!(&i.source, &i.target);
                prop_assert_eq!(i.target.to_lowercase(), i.target.clone());
                prop_assert!(targets.insert(i.target.clone()));
            }
        }
    }

    #[test]
    fn interaction_csv_round_trip() {
        let at = Utc.with_ymd_and_hms(2018, 4, 29, 3, 0, 0).unwrap();
        let xs = vec![
            Interaction { source: "a".into(), target: "b".into(), at, kind: InteractionKind::Mention },
            Interaction { source: "b".into(), target: "c".into(), at, kind: InteractionKind::Quote },
        ];
        let mut buf = Vec::new();
        write_interactions_csv(&xs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next(), Some("source,target,at,kind"));
        assert!(text.contains("b,c,2018-04-29T03:00:00Z,quote"));
        assert_eq!(read_interactions_csv(buf.as_slice()).unwrap(), xs);
        assert!(read_interactions_csv("source,target,at,kind\na,b,yesterday,mention\n".as_bytes()).is_err());
    }
}
