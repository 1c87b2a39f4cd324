//! Vocabulary, sequence encoding, LSTM and Bi-LSTM classifiers, training by
//! backpropagation through time, and the model file format.

mod cell;
mod model;
mod persist;
mod train;
mod vocab;

use thiserror::Error;

pub use cell::{lstm_cell, LstmParams};
pub use model::{bilstm_forward, Forward, ModelKind, ModelParams, ModelState};
pub use persist::{from_bytes, load_model, read_header, save_model, to_bytes, ModelHeader, FORMAT_VERSION, MAGIC};
pub use train::{
    evaluate, predict, split_indices, split_sizes, train, train_test_split, EpochRecord, Evaluation, History,
    Prediction, SequenceBatch, TrainConfig,
};
pub use vocab::{encode, Vocab, OOV, PAD};

use crate::nncore::NnError;

#[derive(Debug, Error)]
pub enum SeqError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] NnError),
    #[error("training diverged at epoch {epoch}, batch {batch} (loss {loss}); the learning rate is probably too high")]
    Diverged { epoch: usize, batch: usize, loss: f64 },
    #[error("token index {index} outside vocabulary of {vocab}")]
    IndexOutOfRange { index: u32, vocab: usize },
    #[error("model file not found: {0}")]
    NotFound(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt model file: {0}")]
    Format(String),
    #[error("unsupported model format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("model stores {found} parameters but {expected} was requested")]
    Width { found: String, expected: String },
}
