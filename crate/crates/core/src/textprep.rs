//! Tweet text cleaning and whitespace tokenization.
//!
//! Cleaning applies a fixed sequence of rules: URLs, e-mail addresses,
//! newlines, quote characters, ASCII punctuation, then whitespace
//! normalization. Letter case is left alone because the sentiment engine
//! reads capitalization; the neural vocabulary lowercases on its own.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("token {index} contains whitespace: {token:?}")]
    WhitespaceInToken { index: usize, token: String },
}

/// Result of [`clean_text`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanText {
    pub original: String,
    pub cleaned: String,
    pub tokens: Vec<String>,
}

/// Whitespace as Python's `str.isspace` sees it: Unicode `White_Space`
/// plus the ASCII information separators U+001C..U+001F.
///
/// Shared with the sentiment engine so that both split text identically.
pub fn is_space(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

fn url_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)(?:https?://|\bwww\.|\bt\.co/)[^\s\x1c-\x1f]*").unwrap())
}

const QUOTES: [char; 6] = ['"', '\'', '\u{2018}', '\u{2019}', '\u{201C}', '\u{201D}'];

/// A whitespace-delimited token is an e-mail address when it has a non-empty
/// local part before `@` and a dotted domain after it.
fn is_email_token(tok: &str) -> bool {
    let Some(at) = tok.find('@') else {
        return false;
    };
    if at == 0 {
        return false;
    }
    let domain = &tok[at + 1..];
    let mut labels = domain
        .trim_end_matches(|c: char| c.is_ascii_punctuation())
        .split('.');
    let first = labels.next().unwrap_or("");
    let rest: Vec<&str> = labels.collect();
    !first.is_empty()
        && !rest.is_empty()
        && rest.iter().all(|l| !l.is_empty())
        && domain.chars().all(|c| c != '@')
}

fn remove_emails(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut start = None;
    for (i, c) in text.char_indices() {
        if is_space(c) {
            if let Some(s) = start.take() {
                push_unless_email(&mut out, &text[s..i]);
            }
            out.push(c);
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        push_unless_email(&mut out, &text[s..]);
    }
    out
}

fn push_unless_email(out: &mut String, tok: &str) {
    if is_email_token(tok) {
        out.push(' ');
    } else {
        out.push_str(tok);
    }
}

/// Collapses whitespace runs to a single ASCII space and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    tokenize(text).join(" ")
}

/// Cleans one raw tweet.
pub fn clean_text(raw: &str) -> CleanText {
    let no_urls = url_pattern().replace_all(raw, " ");
    let no_emails = remove_emails(&no_urls);
    let mut stripped = String::with_capacity(no_emails.len());
    for c in no_emails.chars() {
        match c {
            '\n' | '\r' => stripped.push(' '),
            c if QUOTES.contains(&c) => {}
            c if c.is_ascii_punctuation() => {}
            c => stripped.push(c),
        }
    }
    let tokens = tokenize(&stripped);
    let cleaned = tokens.join(" ");
    CleanText {
        original: raw.to_owned(),
        cleaned,
        tokens,
    }
}

/// Splits on whitespace, returning the maximal non-whitespace runs.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(is_space)
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Joins tokens with single spaces. Inverse of [`tokenize`] on
/// whitespace-normalized text.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> Result<String, TextError> {
    for (index, tok) in tokens.iter().enumerate() {
        let tok = tok.as_ref();
        if tok.is_empty() || tok.chars().any(is_space) {
            return Err(TextError::WhitespaceInToken {
                index,
                token: tok.to_owned(),
            });
        }
    }
    Ok(tokens.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn removes_url_and_punctuation() {
        assert_eq!(clean_text("Get the shot!! https://t.co/xyz").cleaned, "Get the shot");
        assert_eq!(clean_text("see www.example.com/a?b=1 now").cleaned, "see now");
        assert_eq!(clean_text("pic t.co/abc done").cleaned, "pic done");
        assert_eq!(clean_text("glued!https://x.co/y").cleaned, "glued");
    }

    #[test]
    fn empty_input() {
        let c = clean_text("");
        assert_eq!(c.cleaned, "");
        assert!(c.tokens.is_empty());
    }

    #[test]
    fn hashtags_survive_as_bare_words() {
        let c = clean_text(
            "Covid vaccine You getting it #CovidVaccine #covid19 #PfizerBioNTech #Moderna",
        );
        assert_eq!(
            c.cleaned,
            "Covid vaccine You getting it CovidVaccine covid19 PfizerBioNTech Moderna"
        );
    }

    #[test]
    fn removes_emails_newlines_quotes() {
        let c = clean_text("mail me: jane.doe@example.org\nor \"call\" it's 'fine'");
        assert_eq!(c.cleaned, "mail me or call its fine");
        assert_eq!(clean_text("RT @user: hi").cleaned, "RT user hi");
        assert_eq!(clean_text("don\u{2019}t").cleaned, "dont");
    }

    #[test]
    fn keeps_case_and_emoji() {
        assert_eq!(clean_text("GREAT news 💉!").cleaned, "GREAT news 💉");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("dose shot people"), vec!["dose", "shot", "people"]);
        assert!(tokenize("  ").is_empty());
        assert_eq!(tokenize("second dose"), vec!["second", "dose"]);
        assert_eq!(tokenize("a\u{1f}b"), vec!["a", "b"]);
    }

    #[test]
    fn detokenize_examples() {
        assert_eq!(detokenize(&["a", "b"]).unwrap(), "a b");
        assert_eq!(detokenize::<&str>(&[]).unwrap(), "");
        assert!(matches!(
            detokenize(&["a b"]),
            Err(TextError::WhitespaceInToken { index: 0, .. })
        ));
    }

    fn forbidden(s: &str) -> bool {
        url_pattern().is_match(s)
            || s.split(' ').any(is_email_token)
            || s.chars().any(|c| {
                c == '\n' || c == '\r' || QUOTES.contains(&c) || c.is_ascii_punctuation()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn cleaning_is_idempotent(s in "\\PC{0,80}|[a-zA-Z #@.:/'\"!?\n]{0,80}") {
            let once = clean_text(&s).cleaned;
            let twice = clean_text(&once).cleaned;
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn cleaned_has_no_forbidden_chars(s in "\\PC{0,80}|(https?://[a-z./]{1,10} |[a-z]{1,5}@[a-z]{1,5}\\.com |[a-zA-Z#'!\n ]{1,10}){0,8}") {
            let c = clean_text(&s);
            prop_assert!(!forbidden(&c.cleaned), "{:?}", c.cleaned);
            prop_assert!(c.tokens.iter().all(|t| !t.is_empty()));
        }

        #[test]
        fn detokenize_inverts_tokenize(s in "\\PC{0,80}") {
            let cleaned = clean_text(&s).cleaned;
            let toks = tokenize(&cleaned);
            prop_assert_eq!(detokenize(&toks).unwrap(), cleaned.clone());
            prop_assert_eq!(clean_text(&s).tokens, toks);
        }
    }
}
