//! Tweet text to clean token lists: tokenization, stopword removal and
//! Indonesian normalization/stemming.

mod stem;

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read, Write};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::TweetRecord;

pub use stem::{read_normalization, read_word_list, Stemmer};

#[derive(Debug, Error)]
pub enum TextPrepError {
    #[error("failed to read word list: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid normalization map: {0}")]
    Normalization(String),
    #[error("normalization map has a cycle through `{0}`")]
    NormalizationCycle(String),
    #[error("token list line {line}: {reason}")]
    TokenList { line: usize, reason: String },
}

/// Cleaned tokens of one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenList {
    pub doc_id: String,
    pub tokens: Vec<String>,
}

/// A set of lowercase words to discard.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist(HashSet<String>);

impl Stoplist {
    /// The bundled Indonesian list.
    pub fn indonesian() -> Self {
        Stoplist::from_reader(include_str!("data/stopwords_id.txt").as_bytes()).expect("bundled stoplist parses")
    }

    /// One token per line, UTF-8.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, TextPrepError> {
        Ok(Stoplist(read_word_list(reader)?))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stoplist {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stoplist(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

fn url_pattern() -> &'static Regex {
    static URL: OnceLock<Regex> = OnceLock::new();
    URL.get_or_init(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S*").expect("valid regex"))
}

/// Tokens with a flag telling whether each came from a hashtag body.
fn scan(text: &str) -> Vec<(String, bool)> {
    let lowered = text.to_lowercase();
    let cleaned = url_pattern().replace_all(&lowered, " ");
    let mut out = Vec::new();
    let mut word = String::new();
    let mut hashtag = false;
    let mut chars = cleaned.chars().peekable();

    let flush = |word: &mut String, hashtag: &mut bool, out: &mut Vec<(String, bool)>| {
        if !word.is_empty() {
            out.push((std::mem::take(word), *hashtag));
        }
        *hashtag = false;
    };

    while let Some(c) = chars.next() {
        match c {
            '@' if word.is_empty() => {
                hashtag = false;
                while chars.peek().is_some_and(|n| n.is_alphanumeric() || *n == '_') {
                    chars.next();
                }
            }
            '#' => {
                flush(&mut word, &mut hashtag, &mut out);
                hashtag = true;
            }
            '-' if !word.is_empty() && chars.peek().is_some_and(|n| n.is_alphanumeric()) => word.push('-'),
            c if c.is_alphanumeric() => word.push(c),
            _ => flush(&mut word, &mut hashtag, &mut out),
        }
    }
    flush(&mut word, &mut hashtag, &mut out);
    out
}

/// Lowercased word tokens. URLs and `@mentions` are removed, `#` is
/// stripped from hashtags, punctuation other than intra-word hyphens
/// separates words.
pub fn tokenize(text: &str) -> Vec<String> {
    scan(text).into_iter().map(|(t, _)| t).collect()
}

/// Drops stoplisted and single-character tokens, preserving order.
pub fn remove_stopwords(tokens: &[String], stoplist: &Stoplist) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| t.chars().count() > 1 && !stoplist.contains(t))
        .cloned()
        .collect()
}

pub fn normalize_stem(token: &str, stemmer: &Stemmer) -> String {
    stemmer.stem(token)
}

/// The full per-document cleaning chain.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub stoplist: Stoplist,
    pub stemmer: Stemmer,
    /// Extra tokens removed after stemming (e.g. the camp hashtags).
    pub drop: HashSet<String>,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Preprocessor {
            stoplist: Stoplist::indonesian(),
            stemmer: Stemmer::indonesian(),
            drop: HashSet::new(),
        }
    }
}

impl Preprocessor {
    pub fn new(stoplist: Stoplist, stemmer: Stemmer) -> Self {
        Preprocessor {
            stoplist,
            stemmer,
            drop: HashSet::new(),
        }
    }

    /// Tokens of `text` after stopword removal and stemming. Hashtag bodies
    /// are identifiers and skip the stemmer.
    pub fn tokens(&self, text: &str) -> Vec<String> {
        scan(text)
            .into_iter()
            .filter(|(t, _)| t.chars().count() > 1 && !self.stoplist.contains(t))
            .map(|(t, hashtag)| if hashtag { t } else { self.stemmer.stem(&t) })
            .filter(|t| t.chars().count() >= 2 && !self.stoplist.contains(t) && !self.drop.contains(t))
            .collect()
    }

    pub fn document(&self, record: &TweetRecord) -> TokenList {
        TokenList {
            doc_id: record.tweet_id.clone(),
            tokens: self.tokens(&record.text),
        }
    }
}

pub fn preprocess_document(record: &TweetRecord, stoplist: &Stoplist, stemmer: &Stemmer) -> TokenList {
    Preprocessor::new(stoplist.clone(), stemmer.clone()).document(record)
}

/// Token-list interchange: one `{"doc_id", "tokens"}` object per line.
pub fn write_token_lists_jsonl<W: Write>(docs: &[TokenList], mut out: W) -> Result<(), TextPrepError> {
    for d in docs {
        serde_json::to_writer(&mut out, d).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_token_lists_jsonl<R: Read>(input: R) -> Result<Vec<TokenList>, TextPrepError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = serde_json::from_str(&line).map_err(|e| TextPrepError::TokenList {
            line: i + 1,
            reason: e.to_string(),
        })?;
        out.push(doc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toks(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn rec(text: &str) -> TweetRecord {
        TweetRecord {
            tweet_id: "t1".into(),
            author: "a".into(),
            text: text.into(),
            created_at: Utc.with_ymd_and_hms(2018, 4, 27, 0, 0, 0).unwrap(),
            reply_to: None,
            is_reply: false,
            is_quote: false,
        }
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Dukung @jokowi #JokowiSekaliLagi! http://t.co/x"), toks(&["dukung", "jokowisekalilagi"]));
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("ibu-ibu di CFD"), toks(&["ibu-ibu", "di", "cfd"]));
    }

    #[test]
    fn tokenize_edges() {
        assert_eq!(tokenize("-awal akhir- (kata)"), toks(&["awal", "akhir", "kata"]));
        assert_eq!(tokenize("lihat https://x.co/a?b=1, www.kpu.go.id ok"), toks(&["lihat", "ok"]));
        assert_eq!(tokenize("Memilih @jokowi itu…"), toks(&["memilih", "itu"]));
        assert_eq!(tokenize("#A#B"), toks(&["a", "b"]));
    }

    #[test]
    fn stopword_examples() {
        let stop: Stoplist = ["di"].into_iter().collect();
        assert_eq!(remove_stopwords(&toks(&["di", "cfd"]), &stop), toks(&["cfd"]));
        assert!(remove_stopwords(&[], &stop).is_empty());
        assert_eq!(remove_stopwords(&toks(&["a", "ok"]), &stop), toks(&["ok"]));
    }

    #[test]
    fn thousand_token_fixture() {
        let stop = Stoplist::indonesian();
        let stops = ["yang", "di", "dan", "itu", "ini", "dengan", "untuk", "tidak"];
        let content = ["jokowi", "rakyat", "kaos", "presiden", "ganti", "dukung", "cfd", "hoax"];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut tokens: Vec<String> = (0..312).map(|i| stops[i % stops.len()].to_string()).collect();
        tokens.extend((0..688).map(|i| content[i % content.len()].to_string()));
        tokens.shuffle(&mut rng);
        // Independent scan.
        let hits = tokens
            .iter()
            .filter(|t| stops.contains(&t.as_str()) || t.chars().count() < 2)
            .count();
        assert_eq!(hits, 312);
        assert_eq!(remove_stopwords(&tokens, &stop).len(), 1000 - hits);
    }

    #[test]
    fn preprocess_examples() {
        let stem = Stemmer::indonesian();
        let itu: Stoplist = ["itu"].into_iter().collect();
        assert_eq!(preprocess_document(&rec("Memilih @jokowi itu…"), &itu, &stem).tokens, toks(&["pilih"]));
        let stop = Stoplist::indonesian();
        assert!(preprocess_document(&rec("yang di dan itu"), &stop, &stem).tokens.is_empty());
        assert_eq!(
            preprocess_document(&rec("Kaus #2019GantiPresiden"), &stop, &stem).tokens,
            toks(&["kaos", "2019gantipresiden"])
        );
    }

    #[test]
    fn drop_list_and_normalized_stopwords() {
        let mut p = Preprocessor::default();
        // "gak" normalizes to the stopword "tidak".
        assert_eq!(p.tokens("gak mau #jokowi2periode"), toks(&["jokowi2periode"]));
        p.drop.insert("jokowi2periode".into());
        assert!(p.tokens("gak mau #jokowi2periode").is_empty());
    }

    #[test]
    fn bundled_lists_sizes() {
        assert!(Stoplist::indonesian().len() > 300);
        assert!(Stoplist::from_reader("a\n\n# c\nB\n".as_bytes()).unwrap().contains("b"));
    }

    proptest! {
        #[test]
        fn tokens_are_clean(text in "[ -~àé]{0,80}") {
            for t in tokenize(&text) {
                prop_assert!(!t.is_empty());
                prop_assert!(!t.chars().any(char::is_whitespace));
                prop_assert_eq!(t.to_lowercase(), t.clone());
            }
        }

        #[test]
        fn preprocess_output_invariants(words in proptest::collection::vec("[a-z]{1,9}|yang|itu|#[a-z0-9]{2,8}|@[a-z]{3}", 0..20)) {
            let p = Preprocessor::default();
            let text = words.join(" ");
            let out = p.tokens(&text);
            prop_assert_eq!(&out, &p.tokens(&text));
            for t in &out {
                prop_assert!(t.chars().count() >= 2);
                prop_assert!(!p.stoplist.contains(t));
            }
        }
    }

    #[test]
    fn token_list_round_trip() {
        let docs = vec![
            TokenList { doc_id: "1".into(), tokens: vec!["ganti".into(), "presiden".into()] },
            TokenList { doc_id: "2".into(), tokens: vec![] },
        ];
        let mut buf = Vec::new();
        write_token_lists_jsonl(&docs, &mut buf).unwrap();
        assert_eq!(read_token_lists_jsonl(buf.as_slice()).unwrap(), docs);
        assert!(matches!(
            read_token_lists_jsonl("\n{oops".as_bytes()),
            Err(TextPrepError::TokenList { line: 2, .. })
        ));
    }
}
