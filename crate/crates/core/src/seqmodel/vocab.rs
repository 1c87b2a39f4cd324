use std::collections::HashMap;

use sha2::{Digest, Sha256};

use super::SeqError;

pub const PAD: u32 = 0;
pub const OOV: u32 = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const OOV_TOKEN: &str = "<oov>";

/// Token → index map. Index 0 is padding, 1 is out-of-vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    /// Ranks lowercased tokens by descending frequency, ties by first
    /// occurrence, keeping at most `max_size − 2` real tokens.
    pub fn build<S: AsRef<str>>(corpus: &[Vec<S>], max_size: usize) -> Result<Vocab, SeqError> {
        if max_size < 3 {
            return Err(SeqError::Config(format!("max vocab size must be ≥ 3, got {max_size}")));
        }
        // token -> (count, first position)
        let mut stats: HashMap<String, (u64, usize)> = HashMap::new();
        let mut order = 0usize;
        for doc in corpus {
            for tok in doc {
                let key = tok.as_ref().to_lowercase();
                let entry = stats.entry(key).or_insert((0, order));
                entry.0 += 1;
                order += 1;
            }
        }
        if stats.is_empty() {
            return Err(SeqError::EmptyCorpus);
        }
        let mut ranked: Vec<(String, u64, usize)> =
            stats.into_iter().map(|(t, (c, f))| (t, c, f)).collect();
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
        ranked.truncate(max_size - 2);
        Vocab::from_tokens(ranked.into_iter().map(|(t, _, _)| t).collect())
    }

    /// Rebuilds a vocabulary from its real tokens in index order (from 2).
    pub fn from_tokens(real: Vec<String>) -> Result<Vocab, SeqError> {
        let mut tokens = Vec::with_capacity(real.len() + 2);
        tokens.push(PAD_TOKEN.to_owned());
        tokens.push(OOV_TOKEN.to_owned());
        let mut index = HashMap::with_capacity(real.len());
        for (i, t) in real.into_iter().enumerate() {
            if t.is_empty() || index.insert(t.clone(), i as u32 + 2).is_some() {
                return Err(SeqError::Config(format!("bad or duplicate vocab token {t:?}")));
            }
            tokens.push(t);
        }
        Ok(Vocab { tokens, index })
    }

    /// Number of indices including pad and OOV.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, token: &str) -> u32 {
        self.index.get(token).copied().unwrap_or(OOV)
    }

    pub fn token(&self, index: u32) -> Option<&str> {
        self.tokens.get(index as usize).map(String::as_str)
    }

    /// Real tokens in index order (excludes pad and OOV).
    pub fn real_tokens(&self) -> &[String] {
        &self.tokens[2..]
    }

    /// SHA-256 over the newline-joined real tokens, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for t in self.real_tokens() {
            h.update(t.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Lowercased lookup, keeps the last `maxlen` tokens, left-pads with 0.
pub fn encode<S: AsRef<str>>(tokens: &[S], vocab: &Vocab, maxlen: usize) -> Vec<u32> {
    let start = tokens.len().saturating_sub(maxlen);
    let kept = &tokens[start..];
    let mut out = vec![PAD; maxlen - kept.len()];
    out.extend(kept.iter().map(|t| vocab.get(&t.as_ref().to_lowercase())));
    out
}
