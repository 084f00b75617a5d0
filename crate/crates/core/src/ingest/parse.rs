use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use chrono::FixedOffset;
use serde::{Deserialize, Serialize};

use super::time::{default_offset, parse_timestamp};
use super::{normalize_handle, IngestError, TweetRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    #[default]
    Csv,
    #[serde(alias = "json-lines", alias = "jsonlines")]
    Jsonl,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "jsonl" | "json-lines" | "jsonlines" => Ok(InputFormat::Jsonl),
            other => Err(format!("unknown input format `{other}` (expected csv or jsonl)")),
        }
    }
}

/// Maps CSV header names onto record fields. Defaults follow the raw tweet
/// export layout (`status_id`, `screen_name`, `reply_to_screen_name`, ...).
/// When a configured column is absent the canonical field name is tried.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    pub tweet_id: String,
    pub author: String,
    pub text: String,
    pub created_at: String,
    pub reply_to: String,
    pub is_reply: String,
    pub is_quote: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            tweet_id: "status_id".into(),
            author: "screen_name".into(),
            text: "text".into(),
            created_at: "created_at".into(),
            reply_to: "reply_to_screen_name".into(),
            is_reply: "is_reply".into(),
            is_quote: "is_quote".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub format: InputFormat,
    pub columns: ColumnMap,
    /// Zone used for timestamps that carry no offset.
    pub timezone: FixedOffset,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            format: InputFormat::default(),
            columns: ColumnMap::default(),
            timezone: default_offset(),
        }
    }
}

impl ParseOptions {
    pub fn new(format: InputFormat) -> Self {
        ParseOptions { format, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedRow {
    /// 1-based data row (CSV, header excluded) or line number (JSON-lines).
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub records: Vec<TweetRecord>,
    /// Non-blank rows seen.
    pub rows: usize,
    pub skipped: Vec<SkippedRow>,
}

impl ParseOutcome {
    pub fn skipped_count(&self) -> usize {
        self.skipped.len()
    }
}

/// Parses records in input order. Malformed rows are skipped and reported;
/// when more than half of the rows are malformed the input is rejected.
pub fn parse_records<R: Read>(input: R, opts: &ParseOptions) -> Result<ParseOutcome, IngestError> {
    let outcome = match opts.format {
        InputFormat::Csv => parse_csv(input, opts)?,
        InputFormat::Jsonl => parse_jsonl(input, opts)?,
    };
    if outcome.skipped.len() * 2 > outcome.rows {
        let first = &outcome.skipped[0];
        return Err(IngestError::SchemaMismatch {
            rows: outcome.rows,
            malformed: outcome.skipped.len(),
            first_bad_row: first.row,
            reason: first.reason.clone(),
        });
    }
    Ok(outcome)
}

struct RawFields<'a> {
    tweet_id: Option<String>,
    author: Option<&'a str>,
    text: &'a str,
    created_at: Option<&'a str>,
    reply_to: Option<&'a str>,
    is_reply: Option<&'a str>,
    is_quote: Option<&'a str>,
}

fn parse_flag(raw: Option<&str>, name: &str) -> Result<bool, String> {
    match raw.map(|s| s.trim().to_ascii_lowercase()).as_deref() {
        None | Some("") | Some("na") => Ok(false),
        Some("true" | "t" | "1" | "yes") => Ok(true),
        Some("false" | "f" | "0" | "no") => Ok(false),
        Some(other) => Err(format!("{name} is not a boolean: `{other}`")),
    }
}

fn build_record(
    raw: RawFields<'_>,
    row: usize,
    tz: FixedOffset,
    seen_ids: &mut HashSet<String>,
) -> Result<TweetRecord, String> {
    let author = raw.author.and_then(normalize_handle).ok_or("missing author")?;
    let created_raw = raw.created_at.map(str::trim).filter(|s| !s.is_empty()).ok_or("missing created_at")?;
    let created_at = parse_timestamp(created_raw, tz).ok_or_else(|| format!("unparseable created_at `{created_raw}`"))?;
    let tweet_id = match raw.tweet_id {
        Some(id) if !id.trim().is_empty() => id.trim().to_string(),
        Some(_) => return Err("missing tweet_id".into()),
        None => format!("row-{row}"),
    };
    let is_reply = parse_flag(raw.is_reply, "is_reply")?;
    let is_quote = parse_flag(raw.is_quote, "is_quote")?;
    if !seen_ids.insert(tweet_id.clone()) {
        return Err(format!("duplicate tweet_id `{tweet_id}`"));
    }
    Ok(TweetRecord {
        tweet_id,
        author,
        text: raw.text.to_string(),
        created_at,
        reply_to: raw.reply_to.and_then(normalize_handle),
        is_reply,
        is_quote,
    })
}

fn column(headers: &[String], configured: &str, canonical: &str) -> Option<usize> {
    headers
        .iter()
        .position(|h| h == configured)
        .or_else(|| headers.iter().position(|h| h == canonical))
}

fn parse_csv<R: Read>(input: R, opts: &ParseOptions) -> Result<ParseOutcome, IngestError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers: Vec<String> = match reader.byte_headers() {
        Ok(h) => h.iter().map(|f| String::from_utf8_lossy(f).trim().to_string()).collect(),
        Err(e) => return Err(csv_to_io(e)),
    };
    let mut outcome = ParseOutcome::default();
    if headers.iter().all(|h| h.is_empty()) {
        return Ok(outcome);
    }
    let cols = &opts.columns;
    let author_col = column(&headers, &cols.author, "author").ok_or_else(|| IngestError::MissingColumn(cols.author.clone()))?;
    let text_col = column(&headers, &cols.text, "text").ok_or_else(|| IngestError::MissingColumn(cols.text.clone()))?;
    let created_col =
        column(&headers, &cols.created_at, "created_at").ok_or_else(|| IngestError::MissingColumn(cols.created_at.clone()))?;
    let id_col = column(&headers, &cols.tweet_id, "tweet_id");
    let reply_col = column(&headers, &cols.reply_to, "reply_to");
    let is_reply_col = column(&headers, &cols.is_reply, "is_reply");
    let is_quote_col = column(&headers, &cols.is_quote, "is_quote");

    let mut seen = HashSet::new();
    let mut row = 0usize;
    let mut record = csv::ByteRecord::new();
    loop {
        match reader.read_byte_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => return Err(csv_to_io(e)),
            Err(e) => {
                row += 1;
                outcome.rows += 1;
                outcome.skipped.push(SkippedRow { row, reason: e.to_string() });
                continue;
            }
        }
        row += 1;
        outcome.rows += 1;
        let fields: Result<Vec<&str>, _> = record.iter().map(std::str::from_utf8).collect();
        let fields = match fields {
            Ok(f) => f,
            Err(_) => {
                outcome.skipped.push(SkippedRow { row, reason: "invalid UTF-8".into() });
                continue;
            }
        };
        let get = |idx: Option<usize>| idx.and_then(|i| fields.get(i).copied());
        if fields.len() <= author_col.max(text_col).max(created_col) {
            outcome.skipped.push(SkippedRow {
                row,
                reason: format!("expected {} fields, found {}", headers.len(), fields.len()),
            });
            continue;
        }
        let raw = RawFields {
            tweet_id: id_col.map(|i| fields.get(i).copied().unwrap_or("").to_string()),
            author: get(Some(author_col)),
            text: get(Some(text_col)).unwrap_or(""),
            created_at: get(Some(created_col)),
            reply_to: get(reply_col),
            is_reply: get(is_reply_col),
            is_quote: get(is_quote_col),
        };
        match build_record(raw, row, opts.timezone, &mut seen) {
            Ok(r) => outcome.records.push(r),
            Err(reason) => outcome.skipped.push(SkippedRow { row, reason }),
        }
    }
    Ok(outcome)
}

fn csv_to_io(e: csv::Error) -> IngestError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => IngestError::Io(io),
        other => IngestError::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{other:?}"))),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonId {
    Text(String),
    Number(u64),
}

#[derive(Deserialize)]
struct JsonRow {
    tweet_id: Option<JsonId>,
    author: Option<String>,
    #[serde(default)]
    text: String,
    created_at: Option<String>,
    reply_to: Option<String>,
    is_reply: Option<bool>,
    is_quote: Option<bool>,
}

fn parse_jsonl<R: Read>(input: R, opts: &ParseOptions) -> Result<ParseOutcome, IngestError> {
    let mut reader = BufReader::new(input);
    let mut outcome = ParseOutcome::default();
    let mut seen = HashSet::new();
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let Ok(line) = std::str::from_utf8(&buf) else {
            outcome.rows += 1;
            outcome.skipped.push(SkippedRow { row: line_no, reason: "invalid UTF-8".into() });
            continue;
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        outcome.rows += 1;
        let parsed: JsonRow = match serde_json::from_str(line) {
            Ok(p) => p,
            Err(e) => {
                outcome.skipped.push(SkippedRow { row: line_no, reason: format!("invalid JSON: {e}") });
                continue;
            }
        };
        let tweet_id = match parsed.tweet_id {
            Some(JsonId::Text(s)) => s,
            Some(JsonId::Number(n)) => n.to_string(),
            None => String::new(),
        };
        let raw = RawFields {
            tweet_id: Some(tweet_id),
            author: parsed.author.as_deref(),
            text: &parsed.text,
            created_at: parsed.created_at.as_deref(),
            reply_to: parsed.reply_to.as_deref(),
            is_reply: parsed.is_reply.map(|b| if b { "true" } else { "false" }),
            is_quote: parsed.is_quote.map(|b| if b { "true" } else { "false" }),
        };
        match build_record(raw, line_no, opts.timezone, &mut seen) {
            Ok(r) => outcome.records.push(r),
            Err(reason) => outcome.skipped.push(SkippedRow { row: line_no, reason }),
        }
    }
    Ok(outcome)
}

/// Writes records as CSV under the default column names; the output parses
/// back to the same records.
pub fn write_records_csv<W: Write>(records: &[TweetRecord], out: W) -> Result<(), IngestError> {
    let cols = ColumnMap::default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        &cols.tweet_id,
        &cols.author,
        &cols.text,
        &cols.created_at,
        &cols.reply_to,
        &cols.is_reply,
        &cols.is_quote,
    ])
    .map_err(csv_to_io)?;
    for r in records {
        w.write_record([
            r.tweet_id.as_str(),
            &r.author,
            &r.text,
            &r.created_at.to_rfc3339(),
            r.reply_to.as_deref().unwrap_or(""),
            if r.is_reply { "TRUE" } else { "FALSE" },
            if r.is_quote { "TRUE" } else { "FALSE" },
        ])
        .map_err(csv_to_io)?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line with the canonical field names.
pub fn write_records_jsonl<W: Write>(records: &[TweetRecord], mut out: W) -> Result<(), IngestError> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| IngestError::Io(e.into()))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
