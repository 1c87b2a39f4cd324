use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cell::{self, LstmParams, StepCache};
use super::train::{History, TrainConfig};
use super::vocab::{Vocab, PAD};
use super::SeqError;
use crate::nncore::{argmax, softmax, Matrix, RmsPropState, Scalar};
use crate::polarity::Polarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Lstm,
    Bilstm,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lstm => "lstm",
            ModelKind::Bilstm => "bilstm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lstm" => Ok(ModelKind::Lstm),
            "bilstm" | "bi-lstm" => Ok(ModelKind::Bilstm),
            other => Err(SeqError::Config(format!("unknown model kind {other:?}"))),
        }
    }
}

/// All trainable tensors. Gradients use the same type.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    /// vocab × embed
    pub embedding: Matrix<T>,
    pub forward: LstmParams<T>,
    /// Present iff the model is bidirectional.
    pub backward: Option<LstmParams<T>>,
    /// classes × d, d = hidden (LSTM) or 2·hidden (Bi-LSTM)
    pub out_w: Matrix<T>,
    pub out_b: Vec<T>,
}

impl<T: Scalar> ModelParams<T> {
    /// Initialization order is fixed: embedding, forward cell, backward
    /// cell, output layer.
    pub fn init<R: Rng>(kind: ModelKind, vocab: usize, embed: usize, hidden: usize, rng: &mut R) -> Self {
        let embedding = Matrix::glorot(vocab, embed, vocab, embed, rng);
        let forward = LstmParams::init(hidden, embed, rng);
        let backward = (kind == ModelKind::Bilstm).then(|| LstmParams::init(hidden, embed, rng));
        let d = if backward.is_some() { 2 * hidden } else { hidden };
        let out_w = Matrix::glorot(Polarity::COUNT, d, d, Polarity::COUNT, rng);
        ModelParams {
            embedding,
            forward,
            backward,
            out_w,
            out_b: vec![T::zero(); Polarity::COUNT],
        }
    }

    pub fn zeros(kind: ModelKind, vocab: usize, embed: usize, hidden: usize) -> Self {
        let bi = kind == ModelKind::Bilstm;
        let d = if bi { 2 * hidden } else { hidden };
        ModelParams {
            embedding: Matrix::zeros(vocab, embed),
            forward: LstmParams::zeros(hidden, embed),
            backward: bi.then(|| LstmParams::zeros(hidden, embed)),
            out_w: Matrix::zeros(Polarity::COUNT, d),
            out_b: vec![T::zero(); Polarity::COUNT],
        }
    }

    pub fn zeros_like(&self) -> Self {
        ModelParams::zeros(
            self.kind(),
            self.embedding.rows(),
            self.embedding.cols(),
            self.forward.hidden(),
        )
    }

    pub fn kind(&self) -> ModelKind {
        if self.backward.is_some() {
            ModelKind::Bilstm
        } else {
            ModelKind::Lstm
        }
    }

    pub fn tensors(&self) -> Vec<&[T]> {
        let mut v: Vec<&[T]> = vec![self.embedding.data()];
        v.extend(self.forward.tensors());
        if let Some(b) = &self.backward {
            v.extend(b.tensors());
        }
        v.push(self.out_w.data());
        v.push(&self.out_b);
        v
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        let mut v: Vec<&mut [T]> = vec![self.embedding.data_mut()];
        v.extend(self.forward.tensors_mut());
        if let Some(b) = &mut self.backward {
            v.extend(b.tensors_mut());
        }
        v.push(self.out_w.data_mut());
        v.push(&mut self.out_b);
        v
    }

    /// `(name, rows, cols)` in [`tensors`](Self::tensors) order.
    pub fn tensor_shapes(&self) -> Vec<(String, usize, usize)> {
        const GATES: [&str; 8] = ["W_i", "W_f", "W_c", "W_o", "b_i", "b_f", "b_c", "b_o"];
        let mut v = vec![("embedding".to_string(), self.embedding.rows(), self.embedding.cols())];
        let mut cell = |prefix: &str, p: &LstmParams<T>| {
            for (name, (r, c)) in GATES.iter().zip(p.shapes()) {
                v.push((format!("{prefix}.{name}"), r, c));
            }
        };
        cell("forward", &self.forward);
        if let Some(b) = &self.backward {
            cell("backward", b);
        }
        v.push(("output.W".to_string(), self.out_w.rows(), self.out_w.cols()));
        v.push(("output.b".to_string(), 1, self.out_b.len()));
        v
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn flatten(&self) -> Vec<T> {
        self.tensors().concat()
    }

    pub fn set_flat(&mut self, flat: &[T]) -> Result<(), SeqError> {
        let n = self.num_params();
        if flat.len() != n {
            return Err(SeqError::Format(format!("expected {n} parameters, got {}", flat.len())));
        }
        let mut off = 0;
        for t in self.tensors_mut() {
            t.copy_from_slice(&flat[off..off + t.len()]);
            off += t.len();
        }
        Ok(())
    }

    fn fill_zero(&mut self) {
        for t in self.tensors_mut() {
            t.fill(T::zero());
        }
    }
}

/// Output of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward<T> {
    /// Input to the output layer.
    pub repr: Vec<T>,
    pub probs: Vec<T>,
    /// The sequence was all padding; `repr` is zero.
    pub empty: bool,
}

impl<T: Scalar> Forward<T> {
    pub fn label(&self) -> Polarity {
        Polarity::from_index(argmax(&self.probs)).expect("three classes")
    }
}

pub(crate) struct Trace<T> {
    tokens: Vec<u32>,
    fwd: Vec<StepCache<T>>,
    /// Processing order, i.e. last token first.
    bwd: Vec<StepCache<T>>,
    repr: Vec<T>,
    probs: Vec<T>,
}

/// A vocabulary, parameters, optimizer state and training record.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState<T> {
    pub vocab: Vocab,
    pub config: TrainConfig,
    pub params: ModelParams<T>,
    /// One cache per tensor, in [`ModelParams::tensors`] order.
    pub optimizer: Vec<RmsPropState<T>>,
    pub history: History,
}

impl<T: Scalar> ModelState<T> {
    /// Fresh model seeded from `config.seed`.
    pub fn new<R: Rng>(vocab: Vocab, config: TrainConfig, rng: &mut R) -> Self {
        let params = ModelParams::init(config.kind, vocab.len(), config.embed_dim, config.hidden, rng);
        let optimizer = params.tensors().iter().map(|t| RmsPropState::new(t.len())).collect();
        ModelState {
            vocab,
            config,
            params,
            optimizer,
            history: History::default(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.params.kind()
    }

    pub fn maxlen(&self) -> usize {
        self.config.maxlen
    }

    fn check_indices(&self, seq: &[u32]) -> Result<(), SeqError> {
        let v = self.vocab.len();
        match seq.iter().find(|&&i| i as usize >= v) {
            Some(&index) => Err(SeqError::IndexOutOfRange { index, vocab: v }),
            None => Ok(()),
        }
    }

    pub(crate) fn trace(&self, seq: &[u32]) -> Trace<T> {
        let p = &self.params;
        let tokens: Vec<u32> = seq.iter().copied().filter(|&t| t != PAD).collect();
        let emb = |t: &u32| p.embedding.row(*t as usize);
        let fwd = cell::run(&p.forward, tokens.iter().map(emb));
        let bwd = match &p.backward {
            Some(b) => cell::run(b, tokens.iter().rev().map(emb)),
            None => Vec::new(),
        };
        let hidden = p.forward.hidden();
        let mut repr = Vec::with_capacity(p.out_w.cols());
        match fwd.last() {
            Some(s) => repr.extend_from_slice(&s.h),
            None => repr.resize(hidden, T::zero()),
        }
        if p.backward.is_some() {
            match bwd.last() {
                Some(s) => repr.extend_from_slice(&s.h),
                None => repr.resize(2 * hidden, T::zero()),
            }
        }
        let mut logits = vec![T::zero(); p.out_b.len()];
        p.out_w
            .affine_into(&repr, &p.out_b, &mut logits)
            .expect("output layer shape");
        let probs = softmax(&logits);
        Trace {
            tokens,
            fwd,
            bwd,
            repr,
            probs,
        }
    }

    /// Class probabilities for one encoded sequence. Padding is masked in
    /// both directions.
    pub fn forward(&self, seq: &[u32]) -> Result<Forward<T>, SeqError> {
        self.check_indices(seq)?;
        let t = self.trace(seq);
        Ok(Forward {
            empty: t.tokens.is_empty(),
            repr: t.repr,
            probs: t.probs,
        })
    }

    /// Per-position hidden states of each direction, aligned to the
    /// non-padding tokens in their original order.
    pub fn direction_outputs(&self, seq: &[u32]) -> Result<(Vec<Vec<T>>, Option<Vec<Vec<T>>>), SeqError> {
        self.check_indices(seq)?;
        let t = self.trace(seq);
        let fwd = t.fwd.into_iter().map(|s| s.h).collect();
        let bwd = self
            .params
            .backward
            .as_ref()
            .map(|_| t.bwd.into_iter().rev().map(|s| s.h).collect());
        Ok((fwd, bwd))
    }

    /// Adds `scale · ∂CE/∂θ` for one sample into `grads`; returns the loss.
    pub(crate) fn accumulate(&self, trace: &Trace<T>, target: usize, scale: T, grads: &mut ModelParams<T>) -> f64 {
        let p = &self.params;
        let loss = -trace.probs[target].max(T::of(crate::nncore::CE_EPSILON)).ln();
        let dlogits: Vec<T> = trace
            .probs
            .iter()
            .enumerate()
            .map(|(k, &pk)| (if k == target { pk - T::one() } else { pk }) * scale)
            .collect();
        let ModelParams {
            embedding: g_emb,
            forward: g_fwd,
            backward: g_bwd,
            out_w: g_w,
            out_b: g_b,
        } = grads;
        g_w.add_outer(&dlogits, &trace.repr);
        for (b, d) in g_b.iter_mut().zip(&dlogits) {
            *b += *d;
        }
        if trace.tokens.is_empty() {
            return loss.to_f64().unwrap_or(f64::NAN);
        }
        let mut drepr = vec![T::zero(); trace.repr.len()];
        p.out_w.add_transposed_product(&dlogits, &mut drepr);
        let hidden = p.forward.hidden();
        let tokens = &trace.tokens;
        cell::backward(&p.forward, g_fwd, &trace.fwd, &drepr[..hidden], |t, dx| {
            crate::nncore::axpy(T::one(), dx, g_emb.row_mut(tokens[t] as usize));
        });
        if let (Some(bp), Some(bg)) = (&p.backward, g_bwd.as_mut()) {
            let n = tokens.len();
            cell::backward(bp, bg, &trace.bwd, &drepr[hidden..], |t, dx| {
                crate::nncore::axpy(T::one(), dx, g_emb.row_mut(tokens[n - 1 - t] as usize));
            });
        }
        loss.to_f64().unwrap_or(f64::NAN)
    }

    /// Mean cross-entropy over the samples and its gradient (written into
    /// `grads`, which is zeroed first). Also returns the number of correct
    /// argmax predictions.
    pub fn loss_and_gradient(
        &self,
        seqs: &[&[u32]],
        targets: &[Polarity],
        grads: &mut ModelParams<T>,
    ) -> Result<(f64, usize), SeqError> {
        if seqs.len() != targets.len() || seqs.is_empty() {
            return Err(SeqError::Config(format!(
                "{} sequences vs {} labels",
                seqs.len(),
                targets.len()
            )));
        }
        grads.fill_zero();
        let scale = T::one() / T::of(seqs.len() as f64);
        let mut total = 0.0;
        let mut correct = 0;
        for (seq, target) in seqs.iter().zip(targets) {
            self.check_indices(seq)?;
            let trace = self.trace(seq);
            if argmax(&trace.probs) == target.index() {
                correct += 1;
            }
            total += self.accumulate(&trace, target.index(), scale, grads);
        }
        Ok((total / seqs.len() as f64, correct))
    }

    /// Mean cross-entropy without gradients.
    pub fn mean_loss(&self, seqs: &[&[u32]], targets: &[Polarity]) -> Result<f64, SeqError> {
        let mut total = 0.0;
        for (seq, target) in seqs.iter().zip(targets) {
            let f = self.forward(seq)?;
            let p = f.probs[target.index()].max(T::of(crate::nncore::CE_EPSILON));
            total -= p.ln().to_f64().unwrap_or(f64::NAN);
        }
        Ok(total / seqs.len().max(1) as f64)
    }
}

/// Final Bi-LSTM representation: forward-final and backward-final hidden
/// states concatenated. The flag is set when the sequence is all padding.
pub fn bilstm_forward<T: Scalar>(sequence: &[u32], state: &ModelState<T>) -> Result<(Vec<T>, bool), SeqError> {
    if state.kind() != ModelKind::Bilstm {
        return Err(SeqError::Config("bilstm_forward needs a bidirectional model".into()));
    }
    let f = state.forward(sequence)?;
    Ok((f.repr, f.empty))
}
