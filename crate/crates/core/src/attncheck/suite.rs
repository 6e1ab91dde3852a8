use std::fmt::Write as _;

use super::grad::{grad_check, DEFAULT_EPSILON};
use super::model::{
    rel_scores, score_projection_with_grad, sentence_log_likelihood, teacher_forced_trace, ModelDims,
    Seq2SeqModel,
};
use super::tensor::{random_vec, softmax};
use crate::error::Result;
use crate::rng::SeededRng;

pub const PROBABILITY_TOL: f64 = 1e-9;
pub const GRAD_CHECK_TOL: f64 = 1e-4;

/// A seeded model plus a source/target id pair.
#[derive(Debug, Clone)]
pub struct Instance {
    pub model: Seq2SeqModel,
    pub src_ids: Vec<usize>,
    pub tgt_ids: Vec<usize>,
    /// Per-position weights for the gradient check, one per source token.
    pub probe: Vec<f64>,
}

impl Instance {
    /// Model parameters come from `Seq2SeqModel::random(dims, seed)`; ids and
    /// the probe vector from a second generator seeded with `seed ^ 0x5EED`.
    pub fn generate(seed: u64, src_len: usize, tgt_len: usize, dims: ModelDims) -> Self {
        let model = Seq2SeqModel::random(dims, seed);
        let mut rng = SeededRng::new(seed ^ 0x5EED);
        let src_ids = (0..src_len).map(|_| rng.below(dims.src_vocab as u64) as usize).collect();
        let tgt_ids = (0..tgt_len).map(|_| rng.below(dims.tgt_vocab as u64) as usize).collect();
        let probe = random_vec(src_len, &mut rng, 1.0);
        Instance {
            model,
            src_ids,
            tgt_ids,
            probe,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for p in &self.properties {
            let verdict = if p.passed { "pass" } else { "fail" };
            let _ = writeln!(out, "{}={verdict}", p.name);
            let _ = writeln!(out, "{}.max_dev={:e}", p.name, p.max_dev);
        }
        out
    }
}

/// Evaluates the forward-pass invariants on one instance.
pub fn check_instance(inst: &Instance) -> Result<SuiteReport> {
    let trace = teacher_forced_trace(&inst.src_ids, &inst.tgt_ids, &inst.model)?;
    let annotations = inst.model.encode(&inst.src_ids)?;

    let mut sum_dev: f64 = 0.0;
    let mut range_dev: f64 = 0.0;
    let mut envelope_dev: f64 = 0.0;
    let mut shift_dev: f64 = 0.0;
    let mut norm_dev: f64 = 0.0;
    let mut state_max: f64 = 0.0;
    for step in &trace {
        let w = &step.attention.weights;
        sum_dev = sum_dev.max((w.iter().sum::<f64>() - 1.0).abs());
        for &a in w {
            range_dev = range_dev.max((-a).max(a - 1.0).max(0.0));
        }
        for (k, &c) in step.attention.context.iter().enumerate() {
            let lo = annotations.iter().map(|h| h[k]).fold(f64::INFINITY, f64::min);
            let hi = annotations.iter().map(|h| h[k]).fold(f64::NEG_INFINITY, f64::max);
            envelope_dev = envelope_dev.max(lo - c).max(c - hi);
        }
        for shift in [3.7, -50.0, 1e3] {
            let shifted: Vec<f64> = step.attention.scores.iter().map(|s| s + shift).collect();
            for (a, b) in softmax(&shifted).iter().zip(w) {
                shift_dev = shift_dev.max((a - b).abs());
            }
        }
        norm_dev = norm_dev.max((step.log_probs.iter().map(|l| l.exp()).sum::<f64>() - 1.0).abs());
        state_max = step.state.iter().fold(state_max, |m, z| m.max(z.abs()));
    }

    let ll = sentence_log_likelihood(&inst.src_ids, &inst.tgt_ids, &inst.model)?;

    // check at the state the last step attended from
    let z_prev = if trace.len() >= 2 {
        trace[trace.len() - 2].state.clone()
    } else {
        vec![0.0; inst.model.dec_cell.state_dim()]
    };
    let (_, analytic) = score_projection_with_grad(&z_prev, &annotations, &inst.model.attn, &inst.probe)?;
    let objective = |flat: &[f64]| -> f64 {
        let params = inst.model.attn.with_flat(flat).expect("same shape");
        rel_scores(&z_prev, &annotations, &params)
            .map(|e| e.iter().zip(&inst.probe).map(|(e, q)| e * q).sum())
            .unwrap_or(f64::NAN)
    };
    let grad_err = grad_check(objective, &analytic, &inst.model.attn.to_flat(), DEFAULT_EPSILON)?;

    let properties = vec![
        PropertyResult { name: "attention_weights_sum_to_one", passed: sum_dev <= PROBABILITY_TOL, max_dev: sum_dev },
        PropertyResult { name: "attention_weights_in_unit_interval", passed: range_dev == 0.0, max_dev: range_dev },
        PropertyResult { name: "context_within_envelope", passed: envelope_dev <= PROBABILITY_TOL, max_dev: envelope_dev.max(0.0) },
        PropertyResult { name: "softmax_shift_invariance", passed: shift_dev < PROBABILITY_TOL, max_dev: shift_dev },
        PropertyResult { name: "output_distribution_normalized", passed: norm_dev <= PROBABILITY_TOL, max_dev: norm_dev },
        PropertyResult { name: "log_likelihood_nonpositive", passed: ll <= 0.0, max_dev: ll.max(0.0) },
        PropertyResult { name: "decoder_state_bounded", passed: state_max < 1.0, max_dev: state_max },
        PropertyResult { name: "rel_score_grad_check", passed: grad_err < GRAD_CHECK_TOL, max_dev: grad_err },
    ];
    Ok(SuiteReport { properties })
}

/// The suite behind `subseg attncheck`: one instance with all dimensions `dim`,
/// vocabularies of 7 words, a source of `src_len` tokens and a target of 4.
pub fn run_suite(seed: u64, src_len: usize, dim: usize) -> Result<SuiteReport> {
    let inst = Instance::generate(seed, src_len, 4, ModelDims::uniform(7, dim));
    check_instance(&inst)
}
