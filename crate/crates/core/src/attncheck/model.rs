use super::cell::RecurrentCellParams;
use super::tensor::{add_assign, dot, log_softmax, random_vec, softmax, Matrix};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub rows: Matrix,
}

impl EmbeddingTable {
    pub fn new(rows: Matrix) -> Self {
        EmbeddingTable { rows }
    }

    pub fn vocab_size(&self) -> usize {
        self.rows.rows()
    }

    pub fn dim(&self) -> usize {
        self.rows.cols()
    }

    pub fn lookup(&self, index: usize) -> Result<&[f64]> {
        if index >= self.vocab_size() {
            return Err(Error::Vocabulary {
                index,
                size: self.vocab_size(),
            });
        }
        Ok(self.rows.row(index))
    }
}

/// Alignment-model parameters: `rel(z, h) = v · tanh(W z + U h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttnParams {
    pub v: Vec<f64>,
    /// `a x d_z`, applied to the previous decoder state.
    pub w: Matrix,
    /// `a x d_ann`, applied to an annotation vector.
    pub u: Matrix,
}

impl AttnParams {
    pub fn random(attn_dim: usize, state_dim: usize, annotation_dim: usize, rng: &mut SeededRng) -> Self {
        let s = super::INIT_SCALE;
        AttnParams {
            v: random_vec(attn_dim, rng, s),
            w: Matrix::random(attn_dim, state_dim, rng, s),
            u: Matrix::random(attn_dim, annotation_dim, rng, s),
        }
    }

    /// Flattens as `v`, then `W` row-major, then `U` row-major.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = self.v.clone();
        out.extend_from_slice(self.w.as_slice());
        out.extend_from_slice(self.u.as_slice());
        out
    }

    /// Inverse of [`to_flat`](Self::to_flat), keeping this instance's shapes.
    pub fn with_flat(&self, flat: &[f64]) -> Result<Self> {
        let (nv, nw) = (self.v.len(), self.w.as_slice().len());
        let nu = self.u.as_slice().len();
        if flat.len() != nv + nw + nu {
            return Err(Error::dim("flattened attention parameters", nv + nw + nu, flat.len()));
        }
        Ok(AttnParams {
            v: flat[..nv].to_vec(),
            w: Matrix::from_vec(self.w.rows(), self.w.cols(), flat[nv..nv + nw].to_vec())?,
            u: Matrix::from_vec(self.u.rows(), self.u.cols(), flat[nv + nw..].to_vec())?,
        })
    }

    fn check(&self, z: &[f64], annotations: &[Vec<f64>]) -> Result<()> {
        let a = self.v.len();
        if self.w.rows() != a || self.u.rows() != a {
            return Err(Error::dim(
                "attention parameters",
                format!("W and U with {a} rows"),
                format!("W {:?}, U {:?}", self.w.shape(), self.u.shape()),
            ));
        }
        if z.len() != self.w.cols() {
            return Err(Error::dim(
                "attention decoder state",
                format!("W {:?} needs length {}", self.w.shape(), self.w.cols()),
                format!("length {}", z.len()),
            ));
        }
        if let Some(bad) = annotations.iter().find(|h| h.len() != self.u.cols()) {
            return Err(Error::dim(
                "attention annotation",
                format!("U {:?} needs length {}", self.u.shape(), self.u.cols()),
                format!("length {}", bad.len()),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderState {
    /// Previous hidden state.
    pub z: Vec<f64>,
    /// Embedding of the previous target word.
    pub t_prev: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attention {
    pub scores: Vec<f64>,
    pub weights: Vec<f64>,
    pub context: Vec<f64>,
}

/// Runs forward and backward recurrences over the embedded source; each
/// annotation is `[forward_i ; backward_i]`. Both directions start from zero.
pub fn encode(
    src_ids: &[usize],
    emb: &EmbeddingTable,
    fwd: &RecurrentCellParams,
    bwd: &RecurrentCellParams,
) -> Result<Vec<Vec<f64>>> {
    if src_ids.is_empty() {
        return Err(Error::dim("encoder input", "at least one token", 0));
    }
    let inputs: Vec<&[f64]> = src_ids.iter().map(|&i| emb.lookup(i)).collect::<Result<_>>()?;

    let mut forward = Vec::with_capacity(inputs.len());
    let mut h = vec![0.0; fwd.state_dim()];
    for x in &inputs {
        h = fwd.step(x, &h)?;
        forward.push(h.clone());
    }

    let mut backward = vec![Vec::new(); inputs.len()];
    let mut h = vec![0.0; bwd.state_dim()];
    for (i, x) in inputs.iter().enumerate().rev() {
        h = bwd.step(x, &h)?;
        backward[i] = h.clone();
    }

    Ok(forward
        .into_iter()
        .zip(backward)
        .map(|(mut f, b)| {
            f.extend(b);
            f
        })
        .collect())
}

pub fn attention(z_prev: &[f64], annotations: &[Vec<f64>], params: &AttnParams) -> Result<Attention> {
    if annotations.is_empty() {
        return Err(Error::dim("attention", "at least one annotation", 0));
    }
    let scores = rel_scores(z_prev, annotations, params)?;
    let weights = softmax(&scores);
    let mut context = vec![0.0; annotations[0].len()];
    for (alpha, h) in weights.iter().zip(annotations) {
        for (c, x) in context.iter_mut().zip(h) {
            *c += alpha * x;
        }
    }
    Ok(Attention {
        scores,
        weights,
        context,
    })
}

/// One decoder step: the cell input is `[t_prev ; context]`.
pub fn decode_step(state: &DecoderState, context: &[f64], cell: &RecurrentCellParams) -> Result<Vec<f64>> {
    let wanted = state.t_prev.len() + context.len();
    if cell.input_dim() != wanted {
        return Err(Error::dim(
            "decoder cell input",
            format!("{} (previous embedding) + {} (context)", state.t_prev.len(), context.len()),
            format!("cell input dim {}", cell.input_dim()),
        ));
    }
    let mut input = state.t_prev.clone();
    input.extend_from_slice(context);
    cell.step(&input, &state.z)
}

/// Sizes for a randomly initialised model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelDims {
    pub src_vocab: usize,
    pub tgt_vocab: usize,
    pub emb_dim: usize,
    /// State size of each encoder direction; annotations are twice this.
    pub enc_dim: usize,
    pub dec_dim: usize,
    pub attn_dim: usize,
}

impl ModelDims {
    pub fn uniform(vocab: usize, dim: usize) -> Self {
        ModelDims {
            src_vocab: vocab,
            tgt_vocab: vocab,
            emb_dim: dim,
            enc_dim: dim,
            dec_dim: dim,
            attn_dim: dim,
        }
    }
}

/// All parameter bundles of the encoder-decoder.
///
/// The output distribution at step `j` is `softmax(W_out z_j + b_out)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq2SeqModel {
    pub src_emb: EmbeddingTable,
    pub enc_fwd: RecurrentCellParams,
    pub enc_bwd: RecurrentCellParams,
    pub attn: AttnParams,
    pub tgt_emb: EmbeddingTable,
    pub dec_cell: RecurrentCellParams,
    pub out_w: Matrix,
    pub out_b: Vec<f64>,
}

impl Seq2SeqModel {
    /// Draws every parameter from `[-0.1, 0.1)` using [`SeededRng`], in field
    /// declaration order (each matrix row-major).
    pub fn random(dims: ModelDims, seed: u64) -> Self {
        let mut rng = SeededRng::new(seed);
        let s = super::INIT_SCALE;
        let ann = 2 * dims.enc_dim;
        Seq2SeqModel {
            src_emb: EmbeddingTable::new(Matrix::random(dims.src_vocab, dims.emb_dim, &mut rng, s)),
            enc_fwd: RecurrentCellParams::random(dims.emb_dim, dims.enc_dim, &mut rng),
            enc_bwd: RecurrentCellParams::random(dims.emb_dim, dims.enc_dim, &mut rng),
            attn: AttnParams::random(dims.attn_dim, dims.dec_dim, ann, &mut rng),
            tgt_emb: EmbeddingTable::new(Matrix::random(dims.tgt_vocab, dims.emb_dim, &mut rng, s)),
            dec_cell: RecurrentCellParams::random(dims.emb_dim + ann, dims.dec_dim, &mut rng),
            out_w: Matrix::random(dims.tgt_vocab, dims.dec_dim, &mut rng, s),
            out_b: random_vec(dims.tgt_vocab, &mut rng, s),
        }
    }

    pub fn encode(&self, src_ids: &[usize]) -> Result<Vec<Vec<f64>>> {
        encode(src_ids, &self.src_emb, &self.enc_fwd, &self.enc_bwd)
    }
}

/// Everything computed at one teacher-forced decoder step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub attention: Attention,
    pub state: Vec<f64>,
    pub log_probs: Vec<f64>,
}

/// Teacher-forced decoding of `tgt_ids`.
///
/// The decoder starts from a zero state and a zero "previous word"
/// embedding; step `j` attends with `z_{j-1}`, updates to `z_j`, and then
/// conditions step `j+1` on the embedding of the reference token `y_j`.
pub fn teacher_forced_trace(src_ids: &[usize], tgt_ids: &[usize], model: &Seq2SeqModel) -> Result<Vec<StepTrace>> {
    if tgt_ids.is_empty() {
        return Err(Error::dim("target sentence", "at least one token", 0));
    }
    let annotations = model.encode(src_ids)?;
    let mut state = DecoderState {
        z: vec![0.0; model.dec_cell.state_dim()],
        t_prev: vec![0.0; model.tgt_emb.dim()],
    };
    let mut trace = Vec::with_capacity(tgt_ids.len());
    for &y in tgt_ids {
        let att = attention(&state.z, &annotations, &model.attn)?;
        let z = decode_step(&state, &att.context, &model.dec_cell)?;
        let mut logits = model.out_w.matvec(&z)?;
        if model.out_b.len() != logits.len() {
            return Err(Error::dim("output bias", logits.len(), model.out_b.len()));
        }
        add_assign(&mut logits, &model.out_b);
        let log_probs = log_softmax(&logits);
        if y >= log_probs.len() {
            return Err(Error::Vocabulary {
                index: y,
                size: log_probs.len(),
            });
        }
        state = DecoderState {
            z: z.clone(),
            t_prev: model.tgt_emb.lookup(y)?.to_vec(),
        };
        trace.push(StepTrace {
            attention: att,
            state: z,
            log_probs,
        });
    }
    Ok(trace)
}

/// `sum_j log p(y_j | y_<j, x)` under teacher forcing.
pub fn sentence_log_likelihood(src_ids: &[usize], tgt_ids: &[usize], model: &Seq2SeqModel) -> Result<f64> {
    let trace = teacher_forced_trace(src_ids, tgt_ids, model)?;
    Ok(trace.iter().zip(tgt_ids).map(|(step, &y)| step.log_probs[y]).sum())
}

/// Mean sentence log-likelihood over a corpus of id pairs.
pub fn corpus_objective(pairs: &[(Vec<usize>, Vec<usize>)], model: &Seq2SeqModel) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::dim("corpus objective", "at least one pair", 0));
    }
    let mut total = 0.0;
    for (src, tgt) in pairs {
        total += sentence_log_likelihood(src, tgt, model)?;
    }
    Ok(total / pairs.len() as f64)
}

/// Alignment scores at `(z_prev, annotations)`: `e_i = v · tanh(W z + U h_i)`.
pub fn rel_scores(z_prev: &[f64], annotations: &[Vec<f64>], params: &AttnParams) -> Result<Vec<f64>> {
    params.check(z_prev, annotations)?;
    let wz = params.w.matvec(z_prev)?;
    annotations
        .iter()
        .map(|h| {
            let mut pre = params.u.matvec(h)?;
            add_assign(&mut pre, &wz);
            Ok(params.v.iter().zip(&pre).map(|(v, p)| v * p.tanh()).sum())
        })
        .collect()
}

/// `s = sum_i q_i rel(z_prev, h_i)` and its analytic gradient with respect
/// to the flattened attention parameters (order of [`AttnParams::to_flat`]).
///
/// With `tau_i = tanh(W z + U h_i)` and `delta_i = v * (1 - tau_i^2)`:
///
/// ```text
/// ds/dv = sum_i q_i tau_i
/// ds/dW = sum_i q_i delta_i z^T
/// ds/dU = sum_i q_i delta_i h_i^T
/// ```
pub fn score_projection_with_grad(
    z_prev: &[f64],
    annotations: &[Vec<f64>],
    params: &AttnParams,
    q: &[f64],
) -> Result<(f64, Vec<f64>)> {
    if q.len() != annotations.len() {
        return Err(Error::dim("score projection weights", annotations.len(), q.len()));
    }
    let scores = rel_scores(z_prev, annotations, params)?;
    let s = dot(q, &scores);
    let wz = params.w.matvec(z_prev)?;
    let a = params.v.len();
    let (dz, dh) = (params.w.cols(), params.u.cols());
    let mut grad_v = vec![0.0; a];
    let mut grad_w = vec![0.0; a * dz];
    let mut grad_u = vec![0.0; a * dh];
    for (h, &qi) in annotations.iter().zip(q) {
        let mut pre = params.u.matvec(h)?;
        add_assign(&mut pre, &wz);
        for k in 0..a {
            let tau = pre[k].tanh();
            grad_v[k] += qi * tau;
            let delta = qi * params.v[k] * (1.0 - tau * tau);
            for (col, zc) in z_prev.iter().enumerate() {
                grad_w[k * dz + col] += delta * zc;
            }
            for (col, hc) in h.iter().enumerate() {
                grad_u[k * dh + col] += delta * hc;
            }
        }
    }
    let mut grad = grad_v;
    grad.extend(grad_w);
    grad.extend(grad_u);
    Ok((s, grad))
}
