//! Corpus-level tables: sentiment distribution, daily timelines, hashtag
//! counts, term frequencies, sources and locations.

use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::TweetRecord;
use crate::polarity::Polarity;
use crate::textprep::clean_text;

static BUNDLED_ALIASES: &str = include_str!("../data/location_aliases.toml");

pub const OTHER_LOCATION: &str = "other";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error("no labels to summarize")]
    Empty,
    #[error("{records} records but {labels} labels")]
    Misaligned { records: usize, labels: usize },
    #[error("bad alias table: {0}")]
    Aliases(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCount {
    pub class: Polarity,
    pub label: String,
    pub count: u64,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub total: u64,
    /// One row per class, in class-index order.
    pub classes: Vec<ClassCount>,
}

impl Distribution {
    pub fn count(&self, class: Polarity) -> u64 {
        self.classes[class.index()].count
    }

    pub fn percentage(&self, class: Polarity) -> f64 {
        self.classes[class.index()].percentage
    }
}

pub fn sentiment_distribution(labels: &[Polarity]) -> Result<Distribution, AnalyticsError> {
    if labels.is_empty() {
        return Err(AnalyticsError::Empty);
    }
    let mut counts = [0u64; Polarity::COUNT];
    for l in labels {
        counts[l.index()] += 1;
    }
    let total = labels.len() as u64;
    Ok(Distribution {
        total,
        classes: Polarity::ALL
            .iter()
            .map(|&c| ClassCount {
                class: c,
                label: c.name().to_owned(),
                count: counts[c.index()],
                percentage: 100.0 * counts[c.index()] as f64 / total as f64,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelinePoint {
    pub day: NaiveDate,
    pub total: u64,
    /// Counts in class-index order.
    pub per_class: [u64; Polarity::COUNT],
}

/// One point per UTC day from the first to the last tweet, zero-filled.
pub fn daily_timeline(records: &[TweetRecord], labels: &[Polarity]) -> Result<Vec<TimelinePoint>, AnalyticsError> {
    if records.len() != labels.len() {
        return Err(AnalyticsError::Misaligned {
            records: records.len(),
            labels: labels.len(),
        });
    }
    let mut by_day: BTreeMap<NaiveDate, [u64; Polarity::COUNT]> = BTreeMap::new();
    for (r, l) in records.iter().zip(labels) {
        by_day.entry(r.date.date_naive()).or_default()[l.index()] += 1;
    }
    let (Some(first), Some(last)) = (by_day.keys().next().copied(), by_day.keys().next_back().copied()) else {
        return Ok(Vec::new());
    };
    Ok(first
        .iter_days()
        .take_while(|d| *d <= last)
        .map(|day| {
            let per_class = by_day.get(&day).copied().unwrap_or_default();
            TimelinePoint {
                day,
                total: per_class.iter().sum(),
                per_class,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashtagBin {
    /// Number of hashtags on a tweet.
    pub hashtags: usize,
    pub tweets: u64,
    pub density: f64,
}

/// Tweets grouped by how many hashtags they carry.
pub fn hashtag_histogram(records: &[TweetRecord]) -> Vec<HashtagBin> {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for r in records {
        *counts.entry(r.hashtags.len()).or_default() += 1;
    }
    let total = records.len() as f64;
    counts
        .into_iter()
        .map(|(k, n)| HashtagBin {
            hashtags: k,
            tweets: n,
            density: n as f64 / total,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasGroup {
    pub name: String,
    pub aliases: Vec<String>,
}

/// Maps free-text locations onto named groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationAliases {
    #[serde(rename = "group")]
    pub groups: Vec<AliasGroup>,
}

impl Default for LocationAliases {
    fn default() -> Self {
        LocationAliases::parse_toml(BUNDLED_ALIASES).expect("bundled alias table is valid")
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Whole-word occurrence of `needle` in `hay` (both already lowercase).
fn contains_word(hay: &str, needle: &str) -> bool {
    let first_is_word = needle.chars().next().is_some_and(is_word_char);
    let last_is_word = needle.chars().next_back().is_some_and(is_word_char);
    hay.match_indices(needle).any(|(at, m)| {
        let before_ok = !first_is_word || !hay[..at].chars().next_back().is_some_and(is_word_char);
        let after_ok = !last_is_word || !hay[at + m.len()..].chars().next().is_some_and(is_word_char);
        before_ok && after_ok
    })
}

impl LocationAliases {
    pub fn parse_toml(text: &str) -> Result<Self, AnalyticsError> {
        let mut t: LocationAliases = toml::from_str(text).map_err(|e| AnalyticsError::Aliases(e.to_string()))?;
        t.normalize()?;
        Ok(t)
    }

    pub fn parse_json(text: &str) -> Result<Self, AnalyticsError> {
        let mut t: LocationAliases = serde_json::from_str(text).map_err(|e| AnalyticsError::Aliases(e.to_string()))?;
        t.normalize()?;
        Ok(t)
    }

    fn normalize(&mut self) -> Result<(), AnalyticsError> {
        let mut seen = HashSet::new();
        for g in &mut self.groups {
            if g.name.trim().is_empty() || g.name.eq_ignore_ascii_case(OTHER_LOCATION) {
                return Err(AnalyticsError::Aliases(format!("invalid group name {:?}", g.name)));
            }
            if !seen.insert(g.name.to_lowercase()) {
                return Err(AnalyticsError::Aliases(format!("duplicate group {:?}", g.name)));
            }
            g.aliases = g
                .aliases
                .iter()
                .map(|a| a.trim().to_lowercase())
                .filter(|a| !a.is_empty())
                .collect();
        }
        Ok(())
    }

    /// Group of a location, or `None` when nothing matches. The longest
    /// matching alias wins; ties go to the earlier group.
    pub fn classify(&self, location: &str) -> Option<&str> {
        let hay = location.to_lowercase();
        let mut best: Option<(&str, usize)> = None;
        for g in &self.groups {
            for a in &g.aliases {
                if best.is_some_and(|(_, len)| a.len() <= len) {
                    continue;
                }
                if contains_word(&hay, a) {
                    best = Some((&g.name, a.len()));
                }
            }
        }
        best.map(|(name, _)| name)
    }

    pub fn has_group(&self, name: &str) -> bool {
        name.eq_ignore_ascii_case(OTHER_LOCATION) || self.groups.iter().any(|g| g.name.eq_ignore_ascii_case(name))
    }

    /// Group name for a record; empty or unmatched locations are "other".
    pub fn group_of(&self, location: Option<&str>) -> &str {
        location.and_then(|l| self.classify(l)).unwrap_or(OTHER_LOCATION)
    }
}

/// Which records feed a term ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermGroup {
    All,
    /// A location group name from the alias table, or "other".
    Location(String),
    /// Exact (case-insensitive) source name.
    Source(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRanking {
    pub terms: Vec<(String, u64)>,
    /// Set when the group value is unknown.
    pub warning: Option<String>,
}

/// Common English function words, dropped from term rankings on request.
pub const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "amp", "an", "and", "any", "are", "as", "at",
    "be", "because", "been", "before", "being", "below", "between", "both", "but", "by", "can", "could", "did", "do",
    "does", "doing", "don", "down", "during", "each", "few", "for", "from", "further", "get", "got", "had", "has",
    "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "im", "in",
    "into", "is", "it", "its", "itself", "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "now", "of",
    "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "rt", "s", "same",
    "she", "should", "so", "some", "such", "t", "than", "that", "the", "their", "theirs", "them", "themselves",
    "then", "there", "these", "they", "this", "those", "through", "to", "too", "under", "until", "up", "very", "was",
    "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would", "you",
    "your", "yours", "yourself", "yourselves",
];

/// Ranks lowercased cleaned tokens of the selected records by descending
/// frequency, ties alphabetical, truncated to `k`.
pub fn top_terms(
    records: &[TweetRecord],
    group: &TermGroup,
    k: usize,
    aliases: &LocationAliases,
    stopwords: Option<&HashSet<&str>>,
) -> TermRanking {
    let warning = match group {
        TermGroup::Location(name) if !aliases.has_group(name) => Some(format!("unknown location group {name:?}")),
        TermGroup::Source(name) if !records.iter().any(|r| r.source.eq_ignore_ascii_case(name)) => {
            Some(format!("no records from source {name:?}"))
        }
        _ => None,
    };
    if warning.is_some() || k == 0 {
        return TermRanking {
            terms: Vec::new(),
            warning,
        };
    }
    let selected = records.iter().filter(|r| match group {
        TermGroup::All => true,
        TermGroup::Location(name) => aliases.group_of(r.user_location.as_deref()).eq_ignore_ascii_case(name),
        TermGroup::Source(name) => r.source.eq_ignore_ascii_case(name),
    });
    let mut counts: HashMap<String, u64> = HashMap::new();
    for r in selected {
        for t in clean_text(&r.text).tokens {
            let t = t.to_lowercase();
            if stopwords.is_some_and(|s| s.contains(t.as_str())) {
                continue;
            }
            *counts.entry(t).or_default() += 1;
        }
    }
    let mut terms: Vec<(String, u64)> = counts.into_iter().collect();
    terms.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    terms.truncate(k);
    TermRanking { terms, warning: None }
}

fn ranked(counts: HashMap<String, u64>) -> Vec<(String, u64)> {
    let mut v: Vec<(String, u64)> = counts.into_iter().collect();
    v.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

/// Tweets per source application, descending, ties alphabetical. Empty
/// sources are counted under "".
pub fn source_counts(records: &[TweetRecord]) -> Vec<(String, u64)> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for r in records {
        *counts.entry(r.source.clone()).or_default() += 1;
    }
    ranked(counts)
}

/// Tweets per location group (including "other"), descending, ties alphabetical.
pub fn location_counts(records: &[TweetRecord], aliases: &LocationAliases) -> Vec<(String, u64)> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for r in records {
        *counts
            .entry(aliases.group_of(r.user_location.as_deref()).to_owned())
            .or_default() += 1;
    }
    ranked(counts)
}
