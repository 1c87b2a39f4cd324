use serde::{Deserialize, Serialize};

use super::constants::*;
use super::lexicon::Lexicon;
use crate::polarity::Polarity;
use crate::textprep::is_space;

/// Output of [`score`]: valence-mass ratios plus the normalized compound.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SentimentScores {
    pub pos: f64,
    pub neg: f64,
    pub neu: f64,
    pub compound: f64,
}

/// Maps a raw valence sum into (-1, 1) with `x / sqrt(x^2 + alpha)`.
///
/// Clamped to `[-1, 1]` against rounding.
pub fn normalize_score(raw_sum: f64, alpha: f64) -> f64 {
    let norm = raw_sum / (raw_sum * raw_sum + alpha).sqrt();
    norm.clamp(-1.0, 1.0)
}

/// Ternary label from the compound score with a symmetric dead band.
pub fn classify(scores: &SentimentScores, threshold: f64) -> Polarity {
    if scores.compound >= threshold {
        Polarity::Positive
    } else if scores.compound <= -threshold {
        Polarity::Negative
    } else {
        Polarity::Neutral
    }
}

/// Python `str.isupper`: at least one cased character and none lowercase.
fn is_upper(s: &str) -> bool {
    let mut cased = false;
    for c in s.chars() {
        if c.is_lowercase() {
            return false;
        }
        if c.is_uppercase() {
            cased = true;
        }
    }
    cased
}

/// Strips leading/trailing ASCII punctuation unless that leaves two or fewer
/// characters (which keeps emoticons such as `:)` intact).
fn strip_punc_if_word(token: &str) -> &str {
    let stripped = token.trim_matches(|c: char| c.is_ascii_punctuation());
    if stripped.chars().count() <= 2 {
        token
    } else {
        stripped
    }
}

fn replace_emoji(text: &str, lex: &Lexicon) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev_space = true;
    for c in text.chars() {
        if let Some(desc) = lex.emoji_description(c) {
            if !prev_space {
                out.push(' ');
            }
            out.push_str(desc);
            prev_space = false;
        } else {
            out.push(c);
            prev_space = c == ' ';
        }
    }
    out
}

struct Words<'a> {
    orig: Vec<&'a str>,
    lower: Vec<String>,
    cap_differential: bool,
}

impl<'a> Words<'a> {
    fn new(text: &'a str) -> Self {
        let orig: Vec<&str> = text
            .split(is_space)
            .filter(|w| !w.is_empty())
            .map(strip_punc_if_word)
            .collect();
        let lower = orig.iter().map(|w| w.to_lowercase()).collect();
        let caps = orig.iter().filter(|w| is_upper(w)).count();
        let diff = orig.len() - caps;
        Words {
            cap_differential: diff > 0 && diff < orig.len(),
            orig,
            lower,
        }
    }

    fn len(&self) -> usize {
        self.orig.len()
    }
}

/// Scores one text with the VADER rule set.
pub fn score(text: &str, lex: &Lexicon) -> SentimentScores {
    let text = replace_emoji(text, lex);
    let text = text.trim_matches(is_space);
    let words = Words::new(text);

    let mut sentiments = Vec::with_capacity(words.len());
    for i in 0..words.len() {
        let lower = words.lower[i].as_str();
        if lex.booster_lower(lower).is_some() {
            sentiments.push(0.0);
            continue;
        }
        if i + 1 < words.len() && lower == "kind" && words.lower[i + 1] == "of" {
            sentiments.push(0.0);
            continue;
        }
        sentiments.push(word_valence(&words, i, lex));
    }

    contrastive_reweight(&words, &mut sentiments, lex);
    aggregate(&sentiments, text)
}

fn word_valence(words: &Words<'_>, i: usize, lex: &Lexicon) -> f64 {
    let lw = &words.lower;
    let item = lw[i].as_str();
    let Some(base) = lex.valence_lower(item) else {
        return 0.0;
    };
    let mut valence = base;

    // "no" directly before another lexicon word acts as a negator, not a sentiment word.
    if item == "no" && i + 1 < words.len() && lex.contains_lower(&lw[i + 1]) {
        valence = 0.0;
    }
    if (i > 0 && lw[i - 1] == "no")
        || (i > 1 && lw[i - 2] == "no")
        || (i > 2 && lw[i - 3] == "no" && (lw[i - 1] == "or" || lw[i - 1] == "nor"))
    {
        valence = base * NEGATION_SCALAR;
    }

    if is_upper(words.orig[i]) && words.cap_differential {
        if valence > 0.0 {
            valence += CAPS_INCR;
        } else {
            valence -= CAPS_INCR;
        }
    }

    for start in 0..3 {
        if i > start && !lex.contains_lower(&lw[i - (start + 1)]) {
            let mut s = booster_scalar(words, i - (start + 1), valence, lex);
            if start == 1 && s != 0.0 {
                s *= BOOSTER_DECAY_2;
            }
            if start == 2 && s != 0.0 {
                s *= BOOSTER_DECAY_3;
            }
            valence += s;
            valence = negation_check(valence, lw, start, i, lex);
            if start == 2 {
                valence = special_idioms_check(valence, lw, i, lex);
            }
        }
    }

    least_check(valence, lw, i, lex)
}

fn booster_scalar(words: &Words<'_>, j: usize, valence: f64, lex: &Lexicon) -> f64 {
    let Some(mut scalar) = lex.booster_lower(&words.lower[j]) else {
        return 0.0;
    };
    if valence < 0.0 {
        scalar = -scalar;
    }
    if is_upper(words.orig[j]) && words.cap_differential {
        if valence > 0.0 {
            scalar += CAPS_INCR;
        } else {
            scalar -= CAPS_INCR;
        }
    }
    scalar
}

fn negation_check(valence: f64, lw: &[String], start: usize, i: usize, lex: &Lexicon) -> f64 {
    let at = |k: usize| lw[i - k].as_str();
    match start {
        0 => {
            if lex.is_negation_lower(at(1)) {
                return valence * NEGATION_SCALAR;
            }
        }
        1 => {
            if at(2) == "never" && (at(1) == "so" || at(1) == "this") {
                return valence * NEVER_SO_SCALAR;
            } else if at(2) == "without" && at(1) == "doubt" {
                return valence;
            } else if lex.is_negation_lower(at(2)) {
                return valence * NEGATION_SCALAR;
            }
        }
        2 => {
            // Mirrors the reference's operator precedence: (A and B) or C.
            if (at(3) == "never" && (at(2) == "so" || at(2) == "this"))
                || (at(1) == "so" || at(1) == "this")
            {
                return valence * NEVER_SO_SCALAR;
            } else if at(3) == "without" && (at(2) == "doubt" || at(1) == "doubt") {
                return valence;
            } else if lex.is_negation_lower(at(3)) {
                return valence * NEGATION_SCALAR;
            }
        }
        _ => {}
    }
    valence
}

fn special_idioms_check(mut valence: f64, lw: &[String], i: usize, lex: &Lexicon) -> f64 {
    let onezero = format!("{} {}", lw[i - 1], lw[i]);
    let twoonezero = format!("{} {} {}", lw[i - 2], lw[i - 1], lw[i]);
    let twoone = format!("{} {}", lw[i - 2], lw[i - 1]);
    let threetwoone = format!("{} {} {}", lw[i - 3], lw[i - 2], lw[i - 1]);
    let threetwo = format!("{} {}", lw[i - 3], lw[i - 2]);

    for seq in [&onezero, &twoonezero, &twoone, &threetwoone, &threetwo] {
        if let Some(v) = lex.special_case(seq) {
            valence = v;
            break;
        }
    }
    if lw.len() - 1 > i {
        let zeroone = format!("{} {}", lw[i], lw[i + 1]);
        if let Some(v) = lex.special_case(&zeroone) {
            valence = v;
        }
    }
    if lw.len() - 1 > i + 1 {
        let zeroonetwo = format!("{} {} {}", lw[i], lw[i + 1], lw[i + 2]);
        if let Some(v) = lex.special_case(&zeroonetwo) {
            valence = v;
        }
    }
    // Multi-word dampeners such as "kind of" preceding the word.
    for ngram in [&threetwoone, &threetwo, &twoone] {
        if let Some(b) = lex.booster_lower(ngram) {
            valence += b;
        }
    }
    valence
}

fn least_check(valence: f64, lw: &[String], i: usize, lex: &Lexicon) -> f64 {
    if i > 1 && !lex.contains_lower(&lw[i - 1]) && lw[i - 1] == "least" {
        if lw[i - 2] != "at" && lw[i - 2] != "very" {
            return valence * NEGATION_SCALAR;
        }
    } else if i > 0 && !lex.contains_lower(&lw[i - 1]) && lw[i - 1] == "least" {
        return valence * NEGATION_SCALAR;
    }
    valence
}

/// Down-weights sentiment before the first contrastive conjunction and
/// up-weights sentiment after it.
///
/// The reference locates each value with a first-equal-value search rather
/// than by position, so repeated values are rescaled at their first
/// occurrence. That behaviour is reproduced here.
fn contrastive_reweight(words: &Words<'_>, sentiments: &mut [f64], lex: &Lexicon) {
    let conj = lex.contrastive_conjunctions();
    let Some(bi) = words.lower.iter().position(|w| conj.iter().any(|c| c == w)) else {
        return;
    };
    for p in 0..sentiments.len() {
        let v = sentiments[p];
        let si = sentiments
            .iter()
            .position(|x| *x == v)
            .expect("value is present at index p");
        if si < bi {
            sentiments[si] = v * BUT_BEFORE_WEIGHT;
        } else if si > bi {
            sentiments[si] = v * BUT_AFTER_WEIGHT;
        }
    }
}

fn punctuation_emphasis(text: &str) -> f64 {
    let ep = text.matches('!').count().min(EXCLAMATION_MAX_COUNT) as f64 * EXCLAMATION_INCR;
    let qm_count = text.matches('?').count();
    let qm = if qm_count > 3 {
        QUESTION_CAP
    } else if qm_count > 1 {
        qm_count as f64 * QUESTION_INCR
    } else {
        0.0
    };
    ep + qm
}

fn aggregate(sentiments: &[f64], text: &str) -> SentimentScores {
    if sentiments.is_empty() {
        return SentimentScores::default();
    }
    let mut sum: f64 = sentiments.iter().fold(0.0, |a, b| a + b);
    let punct = punctuation_emphasis(text);
    if sum > 0.0 {
        sum += punct;
    } else if sum < 0.0 {
        sum -= punct;
    }
    let compound = normalize_score(sum, NORMALIZE_ALPHA);

    let mut pos_sum = 0.0;
    let mut neg_sum = 0.0;
    let mut neu_count = 0usize;
    for &s in sentiments {
        if s > 0.0 {
            pos_sum += s + 1.0;
        }
        if s < 0.0 {
            neg_sum += s - 1.0;
        }
        if s == 0.0 {
            neu_count += 1;
        }
    }
    if pos_sum > neg_sum.abs() {
        pos_sum += punct;
    } else if pos_sum < neg_sum.abs() {
        neg_sum -= punct;
    }
    let total = pos_sum + neg_sum.abs() + neu_count as f64;
    SentimentScores {
        pos: (pos_sum / total).abs(),
        neg: (neg_sum / total).abs(),
        neu: (neu_count as f64 / total).abs(),
        compound,
    }
}
