//! Binary model container.
//!
//! Layout: 8-byte magic, u32 format version, u64 header length, a JSON
//! header (kind, width, shapes, vocabulary and its hash, config, history),
//! little-endian parameters followed by optimizer caches in tensor order,
//! and a trailing SHA-256 of everything before it.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::model::{ModelKind, ModelParams, ModelState};
use super::train::{History, TrainConfig};
use super::vocab::Vocab;
use super::SeqError;
use crate::nncore::{RmsPropState, Scalar};

pub const MAGIC: &[u8; 8] = b"VXSMODEL";
pub const FORMAT_VERSION: u32 = 1;
const CHECKSUM_LEN: usize = 32;
const PREFIX_LEN: usize = 8 + 4 + 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorShape {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

/// Self-description stored ahead of the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub kind: ModelKind,
    pub width: String,
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub hidden: usize,
    pub maxlen: usize,
    pub seed: u64,
    pub vocab_hash: String,
    pub vocab: Vec<String>,
    pub config: TrainConfig,
    pub history: History,
    pub tensors: Vec<TensorShape>,
}

pub fn to_bytes<T: Scalar>(state: &ModelState<T>) -> Vec<u8> {
    let p = &state.params;
    let header = ModelHeader {
        kind: state.kind(),
        width: T::NAME.to_owned(),
        vocab_size: state.vocab.len(),
        embed_dim: p.embedding.cols(),
        hidden: p.forward.hidden(),
        maxlen: state.maxlen(),
        seed: state.config.seed,
        vocab_hash: state.vocab.content_hash(),
        vocab: state.vocab.real_tokens().to_vec(),
        config: state.config.clone(),
        history: state.history.clone(),
        tensors: p
            .tensor_shapes()
            .into_iter()
            .map(|(name, rows, cols)| TensorShape { name, rows, cols })
            .collect(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let n = p.num_params();
    let mut out = Vec::with_capacity(PREFIX_LEN + json.len() + 2 * n * T::BYTES + CHECKSUM_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for t in p.tensors() {
        t.iter().for_each(|v| v.put_le(&mut out));
    }
    for st in &state.optimizer {
        st.cache.iter().for_each(|v| v.put_le(&mut out));
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

fn corrupt(why: impl Into<String>) -> SeqError {
    SeqError::Format(why.into())
}

/// Reads only the header, without checking the width.
pub fn read_header(bytes: &[u8]) -> Result<ModelHeader, SeqError> {
    Ok(parse_prefix(bytes)?.0)
}

fn parse_prefix(bytes: &[u8]) -> Result<(ModelHeader, usize), SeqError> {
    if bytes.len() < PREFIX_LEN + CHECKSUM_LEN {
        return Err(corrupt("file truncated"));
    }
    if &bytes[..8] != MAGIC {
        return Err(corrupt("not a model file (bad magic)"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(SeqError::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let (body, sum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
    if Sha256::digest(body).as_slice() != sum {
        return Err(corrupt("checksum mismatch (truncated or modified file)"));
    }
    let hlen = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes")) as usize;
    let hend = PREFIX_LEN
        .checked_add(hlen)
        .filter(|e| *e <= body.len())
        .ok_or_else(|| corrupt("header length out of range"))?;
    let header: ModelHeader =
        serde_json::from_slice(&bytes[PREFIX_LEN..hend]).map_err(|e| corrupt(format!("bad header: {e}")))?;
    Ok((header, hend))
}

pub fn from_bytes<T: Scalar>(bytes: &[u8]) -> Result<ModelState<T>, SeqError> {
    let (h, start) = parse_prefix(bytes)?;
    if h.width != T::NAME {
        return Err(SeqError::Width {
            found: h.width,
            expected: T::NAME.to_owned(),
        });
    }
    let vocab = Vocab::from_tokens(h.vocab.clone())?;
    if vocab.len() != h.vocab_size || vocab.content_hash() != h.vocab_hash {
        return Err(corrupt("vocabulary does not match its recorded hash"));
    }
    let mut params = ModelParams::<T>::zeros(h.kind, h.vocab_size, h.embed_dim, h.hidden);
    let expected: Vec<TensorShape> = params
        .tensor_shapes()
        .into_iter()
        .map(|(name, rows, cols)| TensorShape { name, rows, cols })
        .collect();
    if expected != h.tensors {
        return Err(corrupt("tensor shapes disagree with model dimensions"));
    }
    let n = params.num_params();
    let body = &bytes[start..bytes.len() - CHECKSUM_LEN];
    if body.len() != 2 * n * T::BYTES {
        return Err(corrupt(format!(
            "expected {} parameter bytes, found {}",
            2 * n * T::BYTES,
            body.len()
        )));
    }
    let mut values = body.chunks_exact(T::BYTES).map(T::get_le);
    for t in params.tensors_mut() {
        for v in t.iter_mut() {
            *v = values.next().expect("length checked");
        }
    }
    let optimizer = params
        .tensors()
        .iter()
        .map(|t| RmsPropState {
            cache: values.by_ref().take(t.len()).collect(),
        })
        .collect();
    Ok(ModelState {
        vocab,
        config: h.config,
        params,
        optimizer,
        history: h.history,
    })
}

pub fn save_model<T: Scalar>(state: &ModelState<T>, path: &Path) -> Result<(), SeqError> {
    fs::write(path, to_bytes(state))?;
    Ok(())
}

pub fn load_model<T: Scalar>(path: &Path) -> Result<ModelState<T>, SeqError> {
    let bytes = fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            SeqError::NotFound(path.display().to_string())
        } else {
            SeqError::Io(e)
        }
    })?;
    from_bytes(&bytes)
}
