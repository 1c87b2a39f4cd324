use rand::Rng;

use crate::nncore::{dot, sigmoid, Matrix, NnError, Scalar};

/// Gate weights of one LSTM cell. Every `W_*` has shape hidden × (hidden + input)
/// and multiplies the concatenation `[h_prev, x_t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams<T> {
    pub w_i: Matrix<T>,
    pub w_f: Matrix<T>,
    pub w_c: Matrix<T>,
    pub w_o: Matrix<T>,
    pub b_i: Vec<T>,
    pub b_f: Vec<T>,
    pub b_c: Vec<T>,
    pub b_o: Vec<T>,
}

impl<T: Scalar> LstmParams<T> {
    pub fn zeros(hidden: usize, input: usize) -> Self {
        let w = || Matrix::zeros(hidden, hidden + input);
        LstmParams {
            w_i: w(),
            w_f: w(),
            w_c: w(),
            w_o: w(),
            b_i: vec![T::zero(); hidden],
            b_f: vec![T::zero(); hidden],
            b_c: vec![T::zero(); hidden],
            b_o: vec![T::zero(); hidden],
        }
    }

    /// Glorot-uniform weights, zero biases except the forget gate at 1.
    pub fn init<R: Rng>(hidden: usize, input: usize, rng: &mut R) -> Self {
        let mut w = || Matrix::glorot(hidden, hidden + input, hidden + input, hidden, rng);
        let (w_i, w_f, w_c, w_o) = (w(), w(), w(), w());
        LstmParams {
            w_i,
            w_f,
            w_c,
            w_o,
            b_i: vec![T::zero(); hidden],
            b_f: vec![T::one(); hidden],
            b_c: vec![T::zero(); hidden],
            b_o: vec![T::zero(); hidden],
        }
    }

    pub fn hidden(&self) -> usize {
        self.b_i.len()
    }

    pub fn input(&self) -> usize {
        self.w_i.cols() - self.hidden()
    }

    pub(crate) fn tensors(&self) -> [&[T]; 8] {
        [
            self.w_i.data(),
            self.w_f.data(),
            self.w_c.data(),
            self.w_o.data(),
            &self.b_i,
            &self.b_f,
            &self.b_c,
            &self.b_o,
        ]
    }

    pub(crate) fn tensors_mut(&mut self) -> [&mut [T]; 8] {
        [
            self.w_i.data_mut(),
            self.w_f.data_mut(),
            self.w_c.data_mut(),
            self.w_o.data_mut(),
            &mut self.b_i,
            &mut self.b_f,
            &mut self.b_c,
            &mut self.b_o,
        ]
    }

    pub(crate) fn shapes(&self) -> [(usize, usize); 8] {
        let (h, z) = (self.hidden(), self.w_i.cols());
        [(h, z), (h, z), (h, z), (h, z), (1, h), (1, h), (1, h), (1, h)]
    }
}

/// Everything one step keeps for the backward pass.
#[derive(Debug, Clone)]
pub(crate) struct StepCache<T> {
    /// `[h_prev, x_t]`
    pub z: Vec<T>,
    pub c_prev: Vec<T>,
    pub i: Vec<T>,
    pub f: Vec<T>,
    pub g: Vec<T>,
    pub o: Vec<T>,
    pub tanh_c: Vec<T>,
    pub c: Vec<T>,
    pub h: Vec<T>,
}

pub(crate) fn step<T: Scalar>(p: &LstmParams<T>, x: &[T], h_prev: &[T], c_prev: &[T]) -> StepCache<T> {
    let hidden = p.hidden();
    let mut z = Vec::with_capacity(hidden + x.len());
    z.extend_from_slice(h_prev);
    z.extend_from_slice(x);
    let gate = |w: &Matrix<T>, b: &[T], act: fn(T) -> T| -> Vec<T> {
        (0..hidden).map(|r| act(b[r] + dot(w.row(r), &z))).collect()
    };
    let i = gate(&p.w_i, &p.b_i, sigmoid);
    let f = gate(&p.w_f, &p.b_f, sigmoid);
    let g = gate(&p.w_c, &p.b_c, T::tanh);
    let o = gate(&p.w_o, &p.b_o, sigmoid);
    let c: Vec<T> = (0..hidden).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
    let tanh_c: Vec<T> = c.iter().map(|v| v.tanh()).collect();
    let h = (0..hidden).map(|k| o[k] * tanh_c[k]).collect();
    StepCache {
        z,
        c_prev: c_prev.to_vec(),
        i,
        f,
        g,
        o,
        tanh_c,
        c,
        h,
    }
}

/// One LSTM step:
/// `i,f,o = σ(W·[h_prev,x]+b)`, `c̃ = tanh(W_c·[h_prev,x]+b_c)`,
/// `c = f⊙c_prev + i⊙c̃`, `h = o⊙tanh(c)`.
pub fn lstm_cell<T: Scalar>(
    x_t: &[T],
    h_prev: &[T],
    c_prev: &[T],
    p: &LstmParams<T>,
) -> Result<(Vec<T>, Vec<T>), NnError> {
    let h = p.hidden();
    if h_prev.len() != h || c_prev.len() != h || x_t.len() != p.input() {
        return Err(NnError::ShapeMismatch {
            expected: format!("x {} / h,c {}", p.input(), h),
            got: format!("x {} / h {} / c {}", x_t.len(), h_prev.len(), c_prev.len()),
        });
    }
    let s = step(p, x_t, h_prev, c_prev);
    Ok((s.h, s.c))
}

/// Runs the cell over `inputs` from zero state.
pub(crate) fn run<'a, T: Scalar>(
    p: &LstmParams<T>,
    inputs: impl Iterator<Item = &'a [T]>,
) -> Vec<StepCache<T>> {
    let hidden = p.hidden();
    let zero = vec![T::zero(); hidden];
    let mut caches: Vec<StepCache<T>> = Vec::new();
    for x in inputs {
        let s = match caches.last() {
            Some(prev) => step(p, x, &prev.h, &prev.c),
            None => step(p, x, &zero, &zero),
        };
        caches.push(s);
    }
    caches
}

/// Backpropagation through time from a gradient on the final hidden state.
/// `on_dx(t, dx)` receives the input gradient of step `t`.
pub(crate) fn backward<T: Scalar>(
    p: &LstmParams<T>,
    grads: &mut LstmParams<T>,
    caches: &[StepCache<T>],
    dh_final: &[T],
    mut on_dx: impl FnMut(usize, &[T]),
) {
    let hidden = p.hidden();
    let one = T::one();
    let mut dh = dh_final.to_vec();
    let mut dc = vec![T::zero(); hidden];
    let (mut da_i, mut da_f, mut da_g, mut da_o) = (
        vec![T::zero(); hidden],
        vec![T::zero(); hidden],
        vec![T::zero(); hidden],
        vec![T::zero(); hidden],
    );
    let mut dz = vec![T::zero(); p.w_i.cols()];
    for (t, s) in caches.iter().enumerate().rev() {
        for k in 0..hidden {
            let d_o = dh[k] * s.tanh_c[k];
            dc[k] += dh[k] * s.o[k] * (one - s.tanh_c[k] * s.tanh_c[k]);
            let d_i = dc[k] * s.g[k];
            let d_g = dc[k] * s.i[k];
            let d_f = dc[k] * s.c_prev[k];
            da_i[k] = d_i * s.i[k] * (one - s.i[k]);
            da_f[k] = d_f * s.f[k] * (one - s.f[k]);
            da_g[k] = d_g * (one - s.g[k] * s.g[k]);
            da_o[k] = d_o * s.o[k] * (one - s.o[k]);
            dc[k] = dc[k] * s.f[k];
        }
        grads.w_i.add_outer(&da_i, &s.z);
        grads.w_f.add_outer(&da_f, &s.z);
        grads.w_c.add_outer(&da_g, &s.z);
        grads.w_o.add_outer(&da_o, &s.z);
        for k in 0..hidden {
            grads.b_i[k] += da_i[k];
            grads.b_f[k] += da_f[k];
            grads.b_c[k] += da_g[k];
            grads.b_o[k] += da_o[k];
        }
        dz.fill(T::zero());
        p.w_i.add_transposed_product(&da_i, &mut dz);
        p.w_f.add_transposed_product(&da_f, &mut dz);
        p.w_c.add_transposed_product(&da_g, &mut dz);
        p.w_o.add_transposed_product(&da_o, &mut dz);
        on_dx(t, &dz[hidden..]);
        dh.copy_from_slice(&dz[..hidden]);
    }
}
