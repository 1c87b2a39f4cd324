use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{ModelKind, ModelState};
use super::vocab::{encode, Vocab};
use super::SeqError;
use crate::nncore::{argmax, rmsprop_step, RmsPropConfig, Scalar};
use crate::polarity::Polarity;
use crate::textprep::clean_text;

/// Hyperparameters of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub epochs: usize,
    pub batch_size: usize,
    pub maxlen: usize,
    pub embed_dim: usize,
    pub hidden: usize,
    pub vocab_size: usize,
    pub lr: f64,
    pub rho: f64,
    pub eps: f64,
    pub seed: u64,
    /// Stop after the first epoch whose training accuracy reaches this.
    pub target_train_accuracy: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let opt = RmsPropConfig::default();
        TrainConfig {
            kind: ModelKind::Lstm,
            epochs: 10,
            batch_size: 128,
            maxlen: 60,
            embed_dim: 64,
            hidden: 64,
            vocab_size: 20_000,
            lr: opt.lr,
            rho: opt.rho,
            eps: opt.eps,
            seed: 42,
            target_train_accuracy: None,
        }
    }
}

impl TrainConfig {
    pub fn rmsprop(&self) -> RmsPropConfig {
        RmsPropConfig {
            lr: self.lr,
            rho: self.rho,
            eps: self.eps,
        }
    }

    pub fn validate(&self) -> Result<(), SeqError> {
        let positive = [
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
            ("maxlen", self.maxlen),
            ("embed_dim", self.embed_dim),
            ("hidden", self.hidden),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(SeqError::Config(format!("{name} must be positive")));
        }
        if self.vocab_size < 3 {
            return Err(SeqError::Config("vocab_size must be at least 3".into()));
        }
        self.rmsprop().validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean batch loss during the epoch, each measured before its update.
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: Option<f64>,
    pub val_accuracy: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    /// Mean training loss of the untrained model.
    pub initial_loss: f64,
    pub epochs: Vec<EpochRecord>,
}

/// Encoded, padded sequences with their class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceBatch {
    pub sequences: Vec<Vec<u32>>,
    pub labels: Vec<Polarity>,
}

impl SequenceBatch {
    pub fn new(sequences: Vec<Vec<u32>>, labels: Vec<Polarity>) -> Result<Self, SeqError> {
        if sequences.len() != labels.len() {
            return Err(SeqError::Config(format!(
                "{} sequences vs {} labels",
                sequences.len(),
                labels.len()
            )));
        }
        Ok(SequenceBatch { sequences, labels })
    }

    /// Encodes token lists with [`encode`].
    pub fn encode<S: AsRef<str>>(
        docs: &[Vec<S>],
        labels: Vec<Polarity>,
        vocab: &Vocab,
        maxlen: usize,
    ) -> Result<Self, SeqError> {
        let seqs = docs.iter().map(|d| encode(d, vocab, maxlen)).collect();
        SequenceBatch::new(seqs, labels)
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Label rows as one-hot vectors.
    pub fn one_hot(&self) -> Vec<[f64; Polarity::COUNT]> {
        self.labels
            .iter()
            .map(|l| {
                let mut row = [0.0; Polarity::COUNT];
                row[l.index()] = 1.0;
                row
            })
            .collect()
    }

    fn views(&self) -> Vec<&[u32]> {
        self.sequences.iter().map(Vec::as_slice).collect()
    }
}

/// Trains a fresh model with RMSProp on mean categorical cross-entropy.
///
/// Samples are reshuffled every epoch from the seeded generator. A
/// non-finite loss or parameter aborts with [`SeqError::Diverged`].
pub fn train<T: Scalar>(
    vocab: Vocab,
    data: &SequenceBatch,
    validation: Option<&SequenceBatch>,
    config: &TrainConfig,
) -> Result<ModelState<T>, SeqError> {
    config.validate()?;
    if data.is_empty() {
        return Err(SeqError::EmptyCorpus);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = ModelState::<T>::new(vocab, config.clone(), &mut rng);
    let opt = config.rmsprop();
    let all = data.views();
    model.history.initial_loss = model.mean_loss(&all, &data.labels)?;

    let mut grads = model.params.zeros_like();
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut correct = 0;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let seqs: Vec<&[u32]> = chunk.iter().map(|&i| all[i]).collect();
            let targets: Vec<Polarity> = chunk.iter().map(|&i| data.labels[i]).collect();
            let (loss, c) = model.loss_and_gradient(&seqs, &targets, &mut grads)?;
            if !loss.is_finite() {
                return Err(SeqError::Diverged { epoch, batch: b + 1, loss });
            }
            loss_sum += loss * chunk.len() as f64;
            correct += c;
            let ModelState { params, optimizer, .. } = &mut model;
            for ((p, g), st) in params.tensors_mut().into_iter().zip(grads.tensors()).zip(optimizer.iter_mut()) {
                rmsprop_step(p, g, st, &opt)?;
            }
        }
        if model.params.tensors().iter().any(|t| t.iter().any(|v| !v.is_finite())) {
            return Err(SeqError::Diverged {
                epoch,
                batch: 0,
                loss: f64::NAN,
            });
        }
        let train_accuracy = correct as f64 / data.len() as f64;
        let (val_loss, val_accuracy) = match validation {
            Some(v) if !v.is_empty() => {
                let e = evaluate(&model, v)?;
                (Some(e.loss), Some(e.accuracy))
            }
            _ => (None, None),
        };
        model.history.epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / data.len() as f64,
            train_accuracy,
            val_loss,
            val_accuracy,
        });
        if config.target_train_accuracy.is_some_and(|t| train_accuracy >= t) {
            break;
        }
    }
    Ok(model)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub loss: f64,
    pub accuracy: f64,
    pub predictions: Vec<Polarity>,
}

/// Mean loss, accuracy and argmax predictions over a labelled batch.
pub fn evaluate<T: Scalar>(model: &ModelState<T>, batch: &SequenceBatch) -> Result<Evaluation, SeqError> {
    if batch.is_empty() {
        return Err(SeqError::EmptyCorpus);
    }
    let mut loss = 0.0;
    let mut correct = 0;
    let mut predictions = Vec::with_capacity(batch.len());
    for (seq, label) in batch.sequences.iter().zip(&batch.labels) {
        let f = model.forward(seq)?;
        let p = f.probs[label.index()].max(T::of(crate::nncore::CE_EPSILON));
        loss -= p.ln().to_f64().unwrap_or(f64::NAN);
        let pred = f.label();
        if pred == *label {
            correct += 1;
        }
        predictions.push(pred);
    }
    Ok(Evaluation {
        loss: loss / batch.len() as f64,
        accuracy: correct as f64 / batch.len() as f64,
        predictions,
    })
}

/// `(train, test)` sizes: the test side gets ⌈N·f⌉, the train side the rest.
pub fn split_sizes(n: usize, test_fraction: f64) -> (usize, usize) {
    let test = (n as f64 * test_fraction).ceil() as usize;
    (n - test.min(n), test.min(n))
}

/// Seeded shuffle, then the first `train` items of the permutation form
/// the training half.
pub fn train_test_split<R: Clone>(records: &[R], test_fraction: f64, seed: u64) -> Result<(Vec<R>, Vec<R>), SeqError> {
    if records.is_empty() {
        return Err(SeqError::EmptyCorpus);
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(SeqError::Config(format!("test fraction must be in (0,1), got {test_fraction}")));
    }
    let idx = split_indices(records.len(), test_fraction, seed);
    let pick = |ix: &[usize]| ix.iter().map(|&i| records[i].clone()).collect();
    Ok((pick(&idx.0), pick(&idx.1)))
}

/// Index form of [`train_test_split`].
pub fn split_indices(n: usize, test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (n_train, _) = split_sizes(n, test_fraction);
    let test = order.split_off(n_train);
    (order, test)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub label: Polarity,
    pub probs: Vec<f64>,
    /// No in-vocabulary-or-OOV tokens survived cleaning.
    pub empty_input: bool,
}

/// Cleans, tokenizes and encodes `raw_text`, then classifies it.
/// Argmax ties go to the lower class index. Text with no tokens left after
/// cleaning is labelled Neutral and flagged; `probs` still holds the
/// model's output for the zero representation.
pub fn predict<T: Scalar>(model: &ModelState<T>, raw_text: &str) -> Prediction {
    let tokens = clean_text(raw_text).tokens;
    let seq = encode(&tokens, &model.vocab, model.maxlen());
    let f = model.forward(&seq).expect("encoded indices are in range");
    Prediction {
        label: if f.empty {
            Polarity::Neutral
        } else {
            Polarity::from_index(argmax(&f.probs)).expect("three classes")
        },
        probs: f.probs.iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect(),
        empty_input: f.empty,
    }
}
