//! Tweet sentiment pipeline: a rule-based valence engine labels tweets,
//! LSTM and Bi-LSTM classifiers learn those labels, and analytics summarize
//! the corpus.

pub mod analytics;
pub mod ingest;
pub mod metrics;
pub mod nncore;
pub mod pipeline;
pub mod polarity;
pub mod seqmodel;
pub mod synth;
pub mod textprep;
pub mod vader;

pub use polarity::Polarity;

/// Model with 32-bit parameters, the training default.
pub type Model = seqmodel::ModelState<f32>;
/// Model with 64-bit parameters, used for gradient checks.
pub type Model64 = seqmodel::ModelState<f64>;
pub type Matrix = nncore::Matrix<f32>;
pub type Matrix64 = nncore::Matrix<f64>;
