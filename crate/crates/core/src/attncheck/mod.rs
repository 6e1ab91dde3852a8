//! Forward pass of a recurrent attention-based encoder-decoder, small enough
//! to check numerically.
//!
//! * encoder: forward and backward gated recurrent cells over embedded
//!   source words, both started from zero; annotation `h_i = [fwd_i ; bwd_i]`;
//! * alignment: `rel(z, h_i) = v · tanh(W z + U h_i)`, weights
//!   `alpha = softmax(rel)`, context `c = sum_i alpha_i h_i`;
//! * decoder: `z_j = cell([t_{j-1} ; c_j], z_{j-1})` from `z_0 = 0` and a
//!   zero embedding for the word before the first;
//! * output: `p(y_j | ...) = softmax(W_out z_j + b_out)`.
//!
//! There is no training. Everything is `f64`. Seeded parameters are drawn
//! from [`SeededRng`](crate::rng::SeededRng), uniform in `[-0.1, 0.1)`.

mod cell;
mod grad;
mod model;
mod suite;
mod tensor;

pub use cell::RecurrentCellParams;
pub use grad::{grad_check, numerical_gradient, DEFAULT_EPSILON};
pub use model::{
    attention, corpus_objective, decode_step, encode, rel_scores, score_projection_with_grad, sentence_log_likelihood,
    teacher_forced_trace, Attention, AttnParams, DecoderState, EmbeddingTable, ModelDims, Seq2SeqModel,
    StepTrace,
};
pub use suite::{check_instance, run_suite, Instance, PropertyResult, SuiteReport, GRAD_CHECK_TOL, PROBABILITY_TOL};
pub use tensor::{log_softmax, softmax, Matrix};

pub(crate) const INIT_SCALE: f64 = 0.1;
