//! Dense numeric kernel for the recurrent models: row-major matrices,
//! activations, cross-entropy, RMSProp and a finite-difference checker.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`). Reductions use a
//! fixed accumulation order so results are reproducible run to run.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use thiserror::Error;

/// Floating-point element type of the kernel.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Width tag written into model files.
    const NAME: &'static str;
    const BYTES: usize;

    fn of(v: f64) -> Self;
    fn put_le(self, out: &mut Vec<u8>);
    /// `bytes.len()` must equal `Self::BYTES`.
    fn get_le(bytes: &[u8]) -> Self;
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";
    const BYTES: usize = 4;

    fn of(v: f64) -> Self {
        v as f32
    }
    fn put_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn get_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes.try_into().expect("4 bytes"))
    }
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";
    const BYTES: usize = 8;

    fn of(v: f64) -> Self {
        v
    }
    fn put_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn get_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("8 bytes"))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NnError {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

fn mismatch(expected: impl Display, got: impl Display) -> NnError {
    NnError::ShapeMismatch {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}

fn check_finite<T: Scalar>(data: &[T]) -> Result<(), NnError> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(NnError::NonFinite { index }),
        None => Ok(()),
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    /// Checked constructor: rejects wrong lengths and NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, NnError> {
        if rows == 0 || cols == 0 {
            return Err(NnError::Invalid(format!("empty matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(mismatch(rows * cols, data.len()));
        }
        check_finite(&data)?;
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Uniform in ±sqrt(6 / (fan_in + fan_out)).
    pub fn glorot<R: Rng>(rows: usize, cols: usize, fan_in: usize, fan_out: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| T::of(rng.gen_range(-limit..=limit)))
            .collect();
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    /// `out = W·x + b`.
    pub fn affine_into(&self, x: &[T], b: &[T], out: &mut [T]) -> Result<(), NnError> {
        if x.len() != self.cols {
            return Err(mismatch(self.cols, x.len()));
        }
        if b.len() != self.rows || out.len() != self.rows {
            return Err(mismatch(self.rows, format!("{}/{}", b.len(), out.len())));
        }
        for (r, o) in out.iter_mut().enumerate() {
            *o = b[r] + dot(self.row(r), x);
        }
        Ok(())
    }

    /// `out += Wᵀ·d`. Unchecked beyond debug assertions; hot path.
    pub fn add_transposed_product(&self, d: &[T], out: &mut [T]) {
        debug_assert_eq!(d.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for (r, &dr) in d.iter().enumerate() {
            if dr != T::zero() {
                axpy(dr, self.row(r), out);
            }
        }
    }

    /// `self += d ⊗ x`.
    pub fn add_outer(&mut self, d: &[T], x: &[T]) {
        debug_assert_eq!(d.len(), self.rows);
        debug_assert_eq!(x.len(), self.cols);
        for (r, &dr) in d.iter().enumerate() {
            if dr != T::zero() {
                axpy(dr, x, self.row_mut(r));
            }
        }
    }

    pub fn fill_zero(&mut self) {
        self.data.fill(T::zero());
    }
}

/// Dot product with eight interleaved accumulators, summed in a fixed order.
#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = T::zero();
    for (x, y) in ra.iter().zip(rb) {
        tail += *x * *y;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

/// `y += a·x`.
#[inline]
pub fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * *xi;
    }
}

pub fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

pub fn tanh_act<T: Scalar>(x: T) -> T {
    x.tanh()
}

/// Softmax with max-subtraction.
pub fn softmax<T: Scalar>(v: &[T]) -> Vec<T> {
    let max = v.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = v.iter().map(|x| (*x - max).exp()).collect();
    let sum = exps.iter().copied().fold(T::zero(), |a, b| a + b);
    exps.into_iter().map(|e| e / sum).collect()
}

/// Floor applied to probabilities inside the log.
pub const CE_EPSILON: f64 = 1e-12;

/// `−Σ target_k · ln(max(pred_k, ε))`.
pub fn categorical_cross_entropy<T: Scalar>(pred: &[T], target: &[T]) -> Result<T, NnError> {
    if pred.len() != target.len() {
        return Err(mismatch(target.len(), pred.len()));
    }
    let eps = T::of(CE_EPSILON);
    let mut loss = T::zero();
    for (p, t) in pred.iter().zip(target) {
        if *t != T::zero() {
            loss -= *t * p.max(eps).ln();
        }
    }
    Ok(loss)
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax<T: Scalar>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RmsPropConfig {
    pub lr: f64,
    pub rho: f64,
    pub eps: f64,
}

impl Default for RmsPropConfig {
    fn default() -> Self {
        RmsPropConfig {
            lr: 1e-3,
            rho: 0.9,
            eps: 1e-7,
        }
    }
}

impl RmsPropConfig {
    pub fn validate(&self) -> Result<(), NnError> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(NnError::Invalid(format!("lr must be positive, got {}", self.lr)));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(NnError::Invalid(format!("rho must be in (0,1), got {}", self.rho)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(NnError::Invalid(format!("eps must be positive, got {}", self.eps)));
        }
        Ok(())
    }
}

/// Running mean of squared gradients for one parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct RmsPropState<T> {
    pub cache: Vec<T>,
}

impl<T: Scalar> RmsPropState<T> {
    pub fn new(len: usize) -> Self {
        RmsPropState {
            cache: vec![T::zero(); len],
        }
    }
}

/// `cache ← ρ·cache + (1−ρ)·g²;  p ← p − lr·g / (√cache + ε)`.
pub fn rmsprop_step<T: Scalar>(
    param: &mut [T],
    grad: &[T],
    state: &mut RmsPropState<T>,
    cfg: &RmsPropConfig,
) -> Result<(), NnError> {
    if param.len() != grad.len() || state.cache.len() != param.len() {
        return Err(mismatch(
            param.len(),
            format!("grad {} / cache {}", grad.len(), state.cache.len()),
        ));
    }
    let (lr, rho, eps) = (T::of(cfg.lr), T::of(cfg.rho), T::of(cfg.eps));
    let one_minus_rho = T::one() - rho;
    for ((p, g), c) in param.iter_mut().zip(grad).zip(state.cache.iter_mut()) {
        *c = rho * *c + one_minus_rho * *g * *g;
        *p -= lr * *g / (c.sqrt() + eps);
    }
    Ok(())
}

/// Default central-difference step for 64-bit checks.
pub const GRAD_CHECK_STEP: f64 = 1e-5;

/// Compares `analytic` against central differences of `f` at `params`.
///
/// Returns the max over coordinates of `|a−n| / max(|a|, |n|, 1e-8)`.
pub fn grad_check<T, F>(mut f: F, params: &[T], analytic: &[T], h: T) -> Result<T, NnError>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    if params.len() != analytic.len() {
        return Err(mismatch(params.len(), analytic.len()));
    }
    if !(h > T::zero()) {
        return Err(NnError::Invalid("step must be positive".into()));
    }
    let two = T::one() + T::one();
    let floor = T::of(1e-8);
    let mut p = params.to_vec();
    let mut worst = T::zero();
    for i in 0..p.len() {
        let orig = p[i];
        p[i] = orig + h;
        let up = f(&p);
        p[i] = orig - h;
        let down = f(&p);
        p[i] = orig;
        if !up.is_finite() || !down.is_finite() {
            return Err(NnError::NonFinite { index: i });
        }
        let numeric = (up - down) / (two * h);
        let a = analytic[i];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
        if rel > worst {
            worst = rel;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn activations() {
        assert_eq!(sigmoid(0.0f64), 0.5);
        assert_eq!(tanh_act(0.0f64), 0.0);
        assert!(sigmoid(-800.0f64) >= 0.0 && sigmoid(800.0f64) <= 1.0);
        assert!(sigmoid(-800.0f64).is_finite());
        for p in softmax(&[0.0f64, 0.0, 0.0]) {
            assert_abs_diff_eq!(p, 1.0 / 3.0, epsilon = 1e-15);
        }
        let big = softmax(&[1000.0f64, 0.0, -1000.0]);
        assert!(big.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn cross_entropy_examples() {
        let ce = |p: &[f64], t: &[f64]| categorical_cross_entropy(p, t).unwrap();
        assert_abs_diff_eq!(ce(&[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ce(&[1. / 3., 1. / 3., 1. / 3.], &[1.0, 0.0, 0.0]), 3f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(ce(&[0.7, 0.2, 0.1], &[0.0, 1.0, 0.0]), -(0.2f64.ln()), epsilon = 1e-12);
        assert_abs_diff_eq!(ce(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), -(1e-12f64.ln()), epsilon = 1e-9);
        assert!(categorical_cross_entropy(&[0.5f64, 0.5], &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn argmax_ties_to_lowest() {
        assert_eq!(argmax(&[1.0f64, 1.0, 1.0]), 0);
        assert_eq!(argmax(&[0.0f64, 2.0, 2.0]), 1);
        assert_eq!(argmax(&[0.0f64, 1.0, 2.0]), 2);
    }

    #[test]
    fn rmsprop_examples() {
        let cfg = RmsPropConfig::default();
        let mut p = vec![1.0f64, -2.0];
        let mut st = RmsPropState { cache: vec![0.5, 0.2] };
        rmsprop_step(&mut p, &[0.0, 0.0], &mut st, &cfg).unwrap();
        assert_eq!(p, vec![1.0, -2.0]);
        assert_abs_diff_eq!(st.cache[0], 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(st.cache[1], 0.18, epsilon = 1e-15);

        let mut p = vec![0.0f64];
        let mut st = RmsPropState::new(1);
        let g = 3.7;
        rmsprop_step(&mut p, &[g], &mut st, &cfg).unwrap();
        let expected = 1e-3 * g / (0.1f64.sqrt() * g + 1e-7);
        assert_abs_diff_eq!(-p[0], expected, epsilon = 1e-15);
        assert_abs_diff_eq!(-p[0], 1e-3 / 0.316_227_766, epsilon = 1e-8);

        assert!(rmsprop_step(&mut p, &[1.0, 2.0], &mut st, &cfg).is_err());
    }

    #[test]
    fn matrix_checked_construction() {
        assert!(Matrix::new(2, 2, vec![1.0f64; 3]).is_err());
        assert_eq!(
            Matrix::new(1, 2, vec![1.0f64, f64::NAN]),
            Err(NnError::NonFinite { index: 1 })
        );
        let m = Matrix::new(2, 3, vec![1.0f64, 2., 3., 4., 5., 6.]).unwrap();
        let mut out = vec![0.0; 2];
        m.affine_into(&[1.0, 0.0, -1.0], &[0.5, 0.0], &mut out).unwrap();
        assert_eq!(out, vec![-1.5, -2.0]);
        let mut back = vec![0.0; 3];
        m.add_transposed_product(&[1.0, 1.0], &mut back);
        assert_eq!(back, vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn glorot_bounds_and_determinism() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let m1: Matrix<f64> = Matrix::glorot(10, 20, 20, 10, &mut a);
        let m2: Matrix<f64> = Matrix::glorot(10, 20, 20, 10, &mut b);
        assert_eq!(m1, m2);
        let limit = (6.0f64 / 30.0).sqrt();
        assert!(m1.data().iter().all(|v| v.abs() <= limit));
    }

    #[test]
    fn grad_check_examples() {
        let f = |p: &[f64]| p[0] * p[0];
        let err = grad_check(f, &[3.0], &[6.0], GRAD_CHECK_STEP).unwrap();
        assert!(err < 1e-9, "{err}");
        let err = grad_check(f, &[3.0], &[12.0], GRAD_CHECK_STEP).unwrap();
        assert_abs_diff_eq!(err, 0.5, epsilon = 1e-6);
        let bad = |_: &[f64]| f64::NAN;
        assert!(grad_check(bad, &[1.0], &[0.0], 1e-5).is_err());
    }

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..37).map(|i| i as f64 * 0.5 - 3.0).collect();
        let b: Vec<f64> = (0..37).map(|i| (i as f64).sin()).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert_abs_diff_eq!(dot(&a, &b), naive, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn softmax_shift_invariant(v in prop::collection::vec(-50.0f64..50.0, 1..8), c in -100.0f64..100.0) {
            let a = softmax(&v);
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            let b = softmax(&shifted);
            let sum: f64 = a.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!(*x > 0.0);
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn cross_entropy_non_negative(v in prop::collection::vec(-20.0f64..20.0, 3), k in 0usize..3) {
            let p = softmax(&v);
            let mut t = vec![0.0; 3];
            t[k] = 1.0;
            prop_assert!(categorical_cross_entropy(&p, &t).unwrap() >= 0.0);
        }

        #[test]
        fn rmsprop_cache_non_negative(grads in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 4), 1..20)) {
            let cfg = RmsPropConfig::default();
            let mut p = vec![0.0f64; 4];
            let mut st = RmsPropState::new(4);
            for g in &grads {
                rmsprop_step(&mut p, g, &mut st, &cfg).unwrap();
                prop_assert!(st.cache.iter().all(|c| *c >= 0.0));
            }
        }
    }
}
