use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::constants;

static BUNDLED_LEXICON: &str = include_str!("../../data/vader_lexicon.txt");
static BUNDLED_EMOJI: &str = include_str!("../../data/emoji_utf8_lexicon.txt");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon file not found: {0}")]
    NotFound(String),
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("empty lexicon: no parseable entries")]
    Empty,
    #[error("booster '{token}' has increment {value}; magnitude must be below 1")]
    BoosterOutOfRange { token: String, value: f64 },
}

/// Valence dictionary plus the rule word lists the scorer consults.
///
/// Immutable after construction; share it by reference across threads.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: HashMap<String, f64>,
    boosters: HashMap<String, f64>,
    negations: HashSet<String>,
    contrastive_conjunctions: Vec<String>,
    special_cases: HashMap<String, f64>,
    emoji: HashMap<char, String>,
}

impl Lexicon {
    /// The lexicon and emoji descriptions shipped with the crate.
    pub fn bundled() -> Lexicon {
        let entries = parse_entries(BUNDLED_LEXICON);
        Lexicon::with_entries(entries)
            .expect("bundled lexicon is valid")
            .with_emoji(parse_emoji(BUNDLED_EMOJI))
    }

    /// Builds a lexicon from `token<TAB>valence...` text and the standard
    /// rule lists. No emoji translation.
    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        Lexicon::with_entries(parse_entries(text))
    }

    fn with_entries(entries: HashMap<String, f64>) -> Result<Lexicon, LexiconError> {
        if entries.is_empty() {
            return Err(LexiconError::Empty);
        }
        let boosters = constants::BOOSTERS_UP
            .iter()
            .map(|w| (w.to_string(), constants::BOOSTER_INCR))
            .chain(
                constants::BOOSTERS_DOWN
                    .iter()
                    .map(|w| (w.to_string(), constants::BOOSTER_DECR)),
            )
            .collect();
        let lex = Lexicon {
            entries,
            boosters,
            negations: constants::NEGATIONS.iter().map(|w| w.to_string()).collect(),
            contrastive_conjunctions: constants::CONTRASTIVE_CONJUNCTIONS
                .iter()
                .map(|w| w.to_string())
                .collect(),
            special_cases: constants::SPECIAL_CASES
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            emoji: HashMap::new(),
        };
        lex.validate()?;
        Ok(lex)
    }

    /// Replaces the booster table. Every increment must satisfy `|v| < 1`.
    pub fn with_boosters(mut self, boosters: HashMap<String, f64>) -> Result<Lexicon, LexiconError> {
        self.boosters = boosters
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v))
            .collect();
        self.validate()?;
        Ok(self)
    }

    pub fn with_emoji(mut self, emoji: HashMap<char, String>) -> Lexicon {
        self.emoji = emoji;
        self
    }

    fn validate(&self) -> Result<(), LexiconError> {
        if let Some((token, value)) = self.boosters.iter().find(|(_, v)| v.abs() >= 1.0) {
            return Err(LexiconError::BoosterOutOfRange {
                token: token.clone(),
                value: *value,
            });
        }
        Ok(())
    }

    /// Case-insensitive valence lookup.
    pub fn valence(&self, token: &str) -> Option<f64> {
        self.entries.get(&token.to_lowercase()).copied()
    }

    pub(crate) fn valence_lower(&self, lower: &str) -> Option<f64> {
        self.entries.get(lower).copied()
    }

    pub(crate) fn contains_lower(&self, lower: &str) -> bool {
        self.entries.contains_key(lower)
    }

    pub(crate) fn booster_lower(&self, lower: &str) -> Option<f64> {
        self.boosters.get(lower).copied()
    }

    pub(crate) fn is_negation_lower(&self, lower: &str) -> bool {
        self.negations.contains(lower) || lower.contains("n't")
    }

    pub(crate) fn special_case(&self, phrase: &str) -> Option<f64> {
        self.special_cases.get(phrase).copied()
    }

    pub(crate) fn contrastive_conjunctions(&self) -> &[String] {
        &self.contrastive_conjunctions
    }

    pub(crate) fn emoji_description(&self, c: char) -> Option<&str> {
        self.emoji.get(&c).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Loads a tab-separated lexicon file (`token<TAB>mean<TAB>stddev<TAB>ratings`).
///
/// Keys are lowercased. When two spellings collapse to the same key, the
/// spelling that was already lowercase wins. The bundled emoji descriptions
/// are attached so that emoji in text still score.
pub fn load_lexicon(path: &Path) -> Result<Lexicon, LexiconError> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            LexiconError::NotFound(path.display().to_string())
        } else {
            LexiconError::Io {
                path: path.display().to_string(),
                source: e,
            }
        }
    })?;
    Ok(Lexicon::parse(&text)?.with_emoji(parse_emoji(BUNDLED_EMOJI)))
}

fn parse_entries(text: &str) -> HashMap<String, f64> {
    let mut entries: HashMap<String, f64> = HashMap::new();
    let mut exact: HashSet<String> = HashSet::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(token), Some(value)) = (cols.next(), cols.next()) else {
            continue;
        };
        let Ok(value) = value.trim().parse::<f64>() else {
            continue;
        };
        if token.is_empty() || !value.is_finite() {
            continue;
        }
        let key = token.to_lowercase();
        let is_exact = key == token;
        if is_exact {
            exact.insert(key.clone());
            entries.insert(key, value);
        } else if !exact.contains(&key) {
            entries.insert(key, value);
        }
    }
    entries
}

fn parse_emoji(text: &str) -> HashMap<char, String> {
    let mut map = HashMap::new();
    for line in text.lines() {
        let mut cols = line.trim().split('\t');
        let (Some(emoji), Some(desc)) = (cols.next(), cols.next()) else {
            continue;
        };
        // Only single code points can match during per-character scanning.
        let mut chars = emoji.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            map.insert(c, desc.to_owned());
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn bundled_lexicon_values() {
        let lex = Lexicon::bundled();
        assert_eq!(lex.valence("good"), Some(1.9));
        assert_eq!(lex.valence("GOOD"), Some(1.9));
        // 12 mixed-case emoticon spellings collapse onto lowercase keys.
        assert_eq!(lex.len(), 7494);
        assert!((7000..=8000).contains(&lex.len()));
        assert!(lex.emoji_description('😁').is_some());
    }

    #[test]
    fn lowercase_spelling_wins_on_collision() {
        let lex = Lexicon::parse(":D\t2.3\t1.1\t[]\n:d\t1.0\t0.1\t[]\n").unwrap();
        assert_eq!(lex.valence(":d"), Some(1.0));
        let lex = Lexicon::parse(":d\t1.0\t0.1\t[]\n:D\t2.3\t1.1\t[]\n").unwrap();
        assert_eq!(lex.valence(":d"), Some(1.0));
        let lex = Lexicon::parse("Wow\t2.0\t0\t[]\n").unwrap();
        assert_eq!(lex.valence("wow"), Some(2.0));
    }

    #[test]
    fn load_from_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "good\t1.9\t0.9434\t[2, 1, 1, 3, 2, 4, 2, 2, 1, 1]").unwrap();
        writeln!(f, "garbage line").unwrap();
        writeln!(f, "bad\t-2.5\t0.67\t[]\textra").unwrap();
        let lex = load_lexicon(f.path()).unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.valence("bad"), Some(-2.5));
    }

    #[test]
    fn empty_file_is_fatal() {
        let f = tempfile::NamedTempFile::new().unwrap();
        assert!(matches!(load_lexicon(f.path()), Err(LexiconError::Empty)));
    }

    #[test]
    fn missing_file() {
        let err = load_lexicon(Path::new("/nonexistent/lexicon.txt")).unwrap_err();
        assert!(matches!(err, LexiconError::NotFound(_)));
    }

    #[test]
    fn booster_magnitude_checked() {
        let lex = Lexicon::parse("good\t1.9\n").unwrap();
        let bad = HashMap::from([("very".to_string(), 1.2)]);
        assert!(matches!(
            lex.with_boosters(bad),
            Err(LexiconError::BoosterOutOfRange { .. })
        ));
    }
}
