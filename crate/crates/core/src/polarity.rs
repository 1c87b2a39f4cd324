use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Ternary sentiment class.
///
/// The integer encoding is fixed: `Neutral = 0`, `Negative = 1`,
/// `Positive = 2`. It is used for class indices, one-hot columns, confusion
/// matrix rows and every serialized label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Polarity {
    Neutral = 0,
    Negative = 1,
    Positive = 2,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Neutral, Polarity::Negative, Polarity::Positive];
    pub const COUNT: usize = 3;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Polarity> {
        match i {
            0 => Some(Polarity::Neutral),
            1 => Some(Polarity::Negative),
            2 => Some(Polarity::Positive),
            _ => None,
        }
    }

    /// Position on the sentiment axis: Negative < Neutral < Positive.
    ///
    /// This differs from the class encoding, which is not ordered by valence.
    pub fn valence_rank(self) -> i8 {
        match self {
            Polarity::Negative => -1,
            Polarity::Neutral => 0,
            Polarity::Positive => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Polarity::Neutral => "neutral",
            Polarity::Negative => "negative",
            Polarity::Positive => "positive",
        }
    }
}

impl From<Polarity> for u8 {
    fn from(p: Polarity) -> u8 {
        p as u8
    }
}

impl TryFrom<u8> for Polarity {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Polarity::from_index(v as usize).ok_or_else(|| format!("invalid class code {v}"))
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "neutral" | "0" => Ok(Polarity::Neutral),
            "negative" | "1" => Ok(Polarity::Negative),
            "positive" | "2" => Ok(Polarity::Positive),
            other => Err(format!("unknown polarity '{other}'")),
        }
    }
}
