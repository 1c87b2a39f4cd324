//! Loading the tweet corpus CSV into validated records.
//!
//! The expected layout is the 16-column export of the "All COVID-19 Vaccines
//! Tweets" dataset. Only `id`, `date` and `text` are required in the header;
//! other columns are read when present.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const COLUMNS: [&str; 16] = [
    "id",
    "user_name",
    "user_location",
    "user_description",
    "user_created",
    "user_followers",
    "user_friends",
    "user_favourites",
    "user_verified",
    "date",
    "text",
    "hashtags",
    "source",
    "retweets",
    "favorites",
    "is_retweet",
];

const REQUIRED: [&str; 3] = ["id", "date", "text"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("corpus file not found: {0}")]
    NotFound(String),
    #[error("i/o error reading corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("header is missing required columns: {}", .0.join(", "))]
    MissingColumns(Vec<String>),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// How malformed optional fields are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemaMode {
    /// Malformed rows are rejected and counted.
    Strict,
    /// Malformed optional fields become absent.
    #[default]
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub user_name: String,
    pub user_location: Option<String>,
    pub user_description: Option<String>,
    pub user_created: Option<DateTime<Utc>>,
    pub user_followers: Option<u64>,
    pub user_friends: Option<u64>,
    pub user_favourites: Option<u64>,
    pub user_verified: Option<bool>,
    pub date: DateTime<Utc>,
    pub text: String,
    /// Bare tag names, no leading `#`.
    pub hashtags: Vec<String>,
    pub source: String,
    pub retweets: Option<u64>,
    pub favorites: Option<u64>,
    pub is_retweet: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub accepted: usize,
    pub rejected: usize,
    pub rejection_reasons: BTreeMap<String, usize>,
    /// Accepted records whose id was already seen earlier in the file.
    pub duplicate_ids: usize,
    /// Lenient-mode repairs, by kind.
    pub warnings: BTreeMap<String, usize>,
}

impl IngestSummary {
    pub fn total(&self) -> usize {
        self.accepted + self.rejected
    }

    fn reject(&mut self, reason: &str) {
        self.rejected += 1;
        *self.rejection_reasons.entry(reason.to_owned()).or_default() += 1;
    }

    fn warn(&mut self, kind: &str) {
        *self.warnings.entry(kind.to_owned()).or_default() += 1;
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed hashtag list: {0}")]
pub struct MalformedHashtags(pub String);

/// Parses a hashtag cell such as `['PfizerBioNTech', 'covid']`.
///
/// Elements may be single- or double-quoted with backslash escapes. Leading
/// `#` characters are stripped and empty names dropped. An empty cell yields
/// an empty list.
pub fn parse_hashtag_field(raw: &str) -> Result<Vec<String>, MalformedHashtags> {
    let s = raw.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let err = |why: &str| MalformedHashtags(format!("{why} in {raw:?}"));
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| err("missing brackets"))?;

    let mut tags = Vec::new();
    let mut chars = inner.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let Some(quote) = chars.next() else {
            break;
        };
        if quote != '\'' && quote != '"' {
            return Err(err("unquoted element"));
        }
        let mut tag = String::new();
        let mut closed = false;
        while let Some(c) = chars.next() {
            match c {
                '\\' => tag.push(chars.next().ok_or_else(|| err("dangling escape"))?),
                c if c == quote => {
                    closed = true;
                    break;
                }
                c => tag.push(c),
            }
        }
        if !closed {
            return Err(err("unterminated quote"));
        }
        let bare = tag.trim().trim_start_matches('#');
        if !bare.is_empty() {
            tags.push(bare.to_owned());
        }
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        match chars.next() {
            None => break,
            Some(',') => {
                // Tolerate a trailing comma before the closing bracket.
                if chars.clone().all(char::is_whitespace) {
                    break;
                }
            }
            Some(_) => return Err(err("expected ','")),
        }
    }
    Ok(tags)
}

/// Formats tags the way [`parse_hashtag_field`] reads them (Python list repr).
pub fn format_hashtag_field(tags: &[String]) -> String {
    if tags.is_empty() {
        return String::new();
    }
    let items: Vec<String> = tags
        .iter()
        .map(|t| {
            if t.contains('\'') && !t.contains('"') {
                format!("\"{}\"", t.replace('\\', "\\\\"))
            } else {
                format!("'{}'", t.replace('\\', "\\\\").replace('\'', "\\'"))
            }
        })
        .collect();
    format!("[{}]", items.join(", "))
}

/// Accepts `YYYY-MM-DD HH:MM:SS[.f]`, the same with a `T` separator, and
/// RFC 3339 with an offset. Naive times are taken as UTC.
pub fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f%:z"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(naive.and_utc());
        }
        if let Ok(dt) = DateTime::parse_from_str(s, fmt) {
            return Some(dt.with_timezone(&Utc));
        }
    }
    None
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.format("%Y-%m-%d %H:%M:%S%.f").to_string()
}

fn parse_count(raw: &str) -> Result<Option<u64>, ()> {
    let s = raw.trim();
    if s.is_empty() {
        return Ok(None);
    }
    if let Ok(v) = s.parse::<u64>() {
        return Ok(Some(v));
    }
    // pandas exports integer columns with NaNs as floats ("405.0").
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64 => Ok(Some(v as u64)),
        _ => Err(()),
    }
}

fn parse_flag(raw: &str) -> Result<Option<bool>, ()> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "" => Ok(None),
        "true" | "1" => Ok(Some(true)),
        "false" | "0" => Ok(Some(false)),
        _ => Err(()),
    }
}

fn non_empty(raw: &str) -> Option<String> {
    if raw.is_empty() {
        None
    } else {
        Some(raw.to_owned())
    }
}

struct ColumnMap {
    index: BTreeMap<&'static str, usize>,
    width: usize,
}

impl ColumnMap {
    fn from_headers(headers: &csv::StringRecord) -> Result<Self, IngestError> {
        let mut index = BTreeMap::new();
        for (i, h) in headers.iter().enumerate() {
            let h = h.trim().trim_start_matches('\u{feff}');
            if let Some(col) = COLUMNS.iter().find(|c| **c == h) {
                index.entry(*col).or_insert(i);
            }
        }
        let missing: Vec<String> = REQUIRED
            .iter()
            .filter(|c| !index.contains_key(*c))
            .map(|c| c.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(IngestError::MissingColumns(missing));
        }
        Ok(ColumnMap {
            index,
            width: headers.len(),
        })
    }

    fn get<'r>(&self, row: &'r csv::StringRecord, col: &str) -> &'r str {
        self.index
            .get(col)
            .and_then(|&i| row.get(i))
            .unwrap_or("")
    }
}

enum RowOutcome {
    Accept(Box<TweetRecord>),
    Reject(&'static str),
}

fn parse_row(
    row: &csv::StringRecord,
    cols: &ColumnMap,
    mode: SchemaMode,
    summary: &mut IngestSummary,
) -> RowOutcome {
    if mode == SchemaMode::Strict && row.len() != cols.width {
        return RowOutcome::Reject("malformed_row");
    }
    let id = cols.get(row, "id").trim();
    if id.is_empty() {
        return RowOutcome::Reject("empty_id");
    }
    let text = cols.get(row, "text");
    if text.trim().is_empty() {
        return RowOutcome::Reject("empty_text");
    }
    let Some(date) = parse_timestamp(cols.get(row, "date")) else {
        return RowOutcome::Reject("bad_date");
    };

    // Optional fields: strict rejects the row, lenient records a warning and
    // leaves the value absent.
    let mut bad_field: Option<&'static str> = None;
    let mut optional = |name: &'static str, ok: bool| {
        if !ok && bad_field.is_none() {
            bad_field = Some(name);
        }
    };

    let hashtags = match parse_hashtag_field(cols.get(row, "hashtags")) {
        Ok(tags) => tags,
        Err(_) => {
            optional("hashtags", false);
            Vec::new()
        }
    };
    let created_raw = cols.get(row, "user_created");
    let user_created = parse_timestamp(created_raw);
    optional("user_created", created_raw.trim().is_empty() || user_created.is_some());

    let mut count = |name: &'static str| match parse_count(cols.get(row, name)) {
        Ok(v) => v,
        Err(()) => {
            optional(name, false);
            None
        }
    };
    let user_followers = count("user_followers");
    let user_friends = count("user_friends");
    let user_favourites = count("user_favourites");
    let retweets = count("retweets");
    let favorites = count("favorites");

    let mut flag = |name: &'static str| match parse_flag(cols.get(row, name)) {
        Ok(v) => v,
        Err(()) => {
            optional(name, false);
            None
        }
    };
    let user_verified = flag("user_verified");
    let is_retweet = flag("is_retweet");

    if let Some(field) = bad_field {
        match mode {
            SchemaMode::Strict => {
                return RowOutcome::Reject(if field == "hashtags" {
                    "malformed_hashtags"
                } else {
                    "malformed_field"
                })
            }
            SchemaMode::Lenient => summary.warn(&format!("malformed_{field}")),
        }
    }

    RowOutcome::Accept(Box::new(TweetRecord {
        id: id.to_owned(),
        user_name: cols.get(row, "user_name").to_owned(),
        user_location: non_empty(cols.get(row, "user_location")),
        user_description: non_empty(cols.get(row, "user_description")),
        user_created,
        user_followers,
        user_friends,
        user_favourites,
        user_verified,
        date,
        text: text.to_owned(),
        hashtags,
        source: cols.get(row, "source").to_owned(),
        retweets,
        favorites,
        is_retweet,
    }))
}

/// Reads a corpus from any reader. Row order is preserved.
pub fn read_corpus<R: Read>(
    reader: R,
    mode: SchemaMode,
) -> Result<(Vec<TweetRecord>, IngestSummary), IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let cols = ColumnMap::from_headers(&headers)?;

    let mut summary = IngestSummary::default();
    let mut records = Vec::new();
    let mut seen_ids = HashSet::new();
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => return Err(e.into()),
            Err(_) => {
                summary.reject("malformed_row");
                continue;
            }
        };
        match parse_row(&row, &cols, mode, &mut summary) {
            RowOutcome::Accept(rec) => {
                if !seen_ids.insert(rec.id.clone()) {
                    summary.duplicate_ids += 1;
                }
                summary.accepted += 1;
                records.push(*rec);
            }
            RowOutcome::Reject(reason) => summary.reject(reason),
        }
    }
    Ok((records, summary))
}

/// Loads and validates a corpus file.
pub fn load_corpus(
    path: &Path,
    mode: SchemaMode,
) -> Result<(Vec<TweetRecord>, IngestSummary), IngestError> {
    let file = File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            IngestError::NotFound(path.display().to_string())
        } else {
            IngestError::Io(e)
        }
    })?;
    read_corpus(std::io::BufReader::new(file), mode)
}

/// Writes records in the 16-column layout; re-reading yields equal records.
pub fn write_corpus<W: Write>(records: &[TweetRecord], writer: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    let opt_num = |v: Option<u64>| v.map(|n| n.to_string()).unwrap_or_default();
    let opt_flag = |v: Option<bool>| match v {
        Some(true) => "True".to_owned(),
        Some(false) => "False".to_owned(),
        None => String::new(),
    };
    for r in records {
        w.write_record([
            r.id.clone(),
            r.user_name.clone(),
            r.user_location.clone().unwrap_or_default(),
            r.user_description.clone().unwrap_or_default(),
            r.user_created.as_ref().map(format_timestamp).unwrap_or_default(),
            opt_num(r.user_followers),
            opt_num(r.user_friends),
            opt_num(r.user_favourites),
            opt_flag(r.user_verified),
            format_timestamp(&r.date),
            r.text.clone(),
            format_hashtag_field(&r.hashtags),
            r.source.clone(),
            opt_num(r.retweets),
            opt_num(r.favorites),
            opt_flag(r.is_retweet),
        ])?;
    }
    w.flush()?;
    Ok(())
}
