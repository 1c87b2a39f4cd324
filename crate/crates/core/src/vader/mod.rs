//! Rule-based sentiment scoring compatible with VADER.
//!
//! Scores agree with the `vaderSentiment` reference implementation
//! (before its output rounding) on the same input text.

pub mod constants;
mod engine;
mod lexicon;

pub use engine::{classify, normalize_score, score, SentimentScores};
pub use lexicon::{load_lexicon, Lexicon, LexiconError};
