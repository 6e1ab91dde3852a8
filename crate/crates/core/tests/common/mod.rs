//! Reference implementations used only by tests.
//!
//! Each oracle is written for obviousness, not speed: no indexes, no
//! incremental bookkeeping, no sharing with the library beyond plain data.
#![allow(dead_code)]

use std::collections::BTreeMap;

use subseg::attncheck::{Matrix, RecurrentCellParams, Seq2SeqModel};

// ---------------------------------------------------------------- vnbpe

/// Symbol/punctuation test used by the oracle: ASCII punctuation plus the
/// few non-ASCII symbols the generators emit.
pub fn oracle_is_separator(tok: &str) -> bool {
    !tok.is_empty()
        && tok
            .chars()
            .all(|c| c.is_ascii_punctuation() || matches!(c, '…' | '«' | '»' | '€' | '–' | '“' | '”'))
}

pub fn oracle_is_numeric(tok: &str) -> bool {
    tok.chars().any(|c| c.is_ascii_digit()) && tok.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',')
}

fn oracle_excluded(tok: &str) -> bool {
    oracle_is_separator(tok) || oracle_is_numeric(tok)
}

/// Count once, keep pairs at or above `min_freq` (strictly above when
/// `strict`), order by count then pair, then replay every rule over every
/// line with one leftmost pass each.
pub fn vnbpe_oracle(lines: &[Vec<String>], min_freq: u64, strict: bool) -> (Vec<(String, String, u64)>, Vec<Vec<String>>) {
    let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
    for line in lines {
        for i in 1..line.len() {
            let (l, r) = (&line[i - 1], &line[i]);
            if oracle_excluded(l) || oracle_excluded(r) {
                continue;
            }
            *counts.entry((l.clone(), r.clone())).or_insert(0) += 1;
        }
    }
    let mut rules: Vec<(String, String, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| if strict { c > min_freq } else { c >= min_freq })
        .map(|((l, r), c)| (l, r, c))
        .collect();
    // stable sort over a BTreeMap walk: ties stay in (left, right) order
    rules.sort_by(|a, b| b.2.cmp(&a.2));

    let mut out: Vec<Vec<String>> = lines.to_vec();
    for (l, r, _) in &rules {
        for line in out.iter_mut() {
            let mut next = Vec::new();
            let mut i = 0;
            while i < line.len() {
                if i + 1 < line.len() && &line[i] == l && &line[i + 1] == r {
                    next.push(format!("{l}_{r}"));
                    i += 2;
                } else {
                    next.push(line[i].clone());
                    i += 1;
                }
            }
            *line = next;
        }
    }
    (rules, out)
}

// ------------------------------------------------------------------ bpe

/// Recounts every adjacent pair from scratch before each merge.
pub fn bpe_oracle(freqs: &BTreeMap<String, u64>, num_merges: usize) -> Vec<(String, String)> {
    let mut words: Vec<(Vec<String>, u64)> = freqs
        .iter()
        .map(|(w, &f)| {
            let mut syms: Vec<String> = w.chars().map(|c| c.to_string()).collect();
            let last = syms.len() - 1;
            syms[last].push_str("</w>");
            (syms, f)
        })
        .collect();
    let mut merges = Vec::new();
    while merges.len() < num_merges {
        let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (syms, f) in &words {
            for i in 1..syms.len() {
                *counts.entry((syms[i - 1].clone(), syms[i].clone())).or_insert(0) += f;
            }
        }
        // first maximum in (left, right) order
        let mut best: Option<((String, String), u64)> = None;
        for (pair, c) in counts {
            if best.as_ref().is_none_or(|(_, bc)| c > *bc) {
                best = Some((pair, c));
            }
        }
        let Some(((l, r), c)) = best else { break };
        if c < 2 {
            break;
        }
        for (syms, _) in words.iter_mut() {
            let mut next = Vec::new();
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == l && syms[i + 1] == r {
                    next.push(format!("{l}{r}"));
                    i += 2;
                } else {
                    next.push(syms[i].clone());
                    i += 1;
                }
            }
            *syms = next;
        }
        merges.push((l, r));
    }
    merges
}

// ------------------------------------------------------------- attention

fn mat_vec(m: &Matrix, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; m.rows()];
    for (r, yr) in y.iter_mut().enumerate() {
        for (c, xc) in x.iter().enumerate() {
            *yr += m.get(r, c) * xc;
        }
    }
    y
}

fn sig(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn gru_oracle(p: &RecurrentCellParams, x: &[f64], h: &[f64]) -> Vec<f64> {
    let d = h.len();
    let (wr, ur) = (mat_vec(&p.w_reset, x), mat_vec(&p.u_reset, h));
    let (wu, uu) = (mat_vec(&p.w_update, x), mat_vec(&p.u_update, h));
    let r: Vec<f64> = (0..d).map(|k| sig(wr[k] + ur[k] + p.b_reset[k])).collect();
    let u: Vec<f64> = (0..d).map(|k| sig(wu[k] + uu[k] + p.b_update[k])).collect();
    let rh: Vec<f64> = (0..d).map(|k| r[k] * h[k]).collect();
    let (wc, uc) = (mat_vec(&p.w_cand, x), mat_vec(&p.u_cand, &rh));
    (0..d)
        .map(|k| {
            let cand = (wc[k] + uc[k] + p.b_cand[k]).tanh();
            u[k] * h[k] + (1.0 - u[k]) * cand
        })
        .collect()
}

pub fn embed(m: &Matrix, id: usize) -> Vec<f64> {
    (0..m.cols()).map(|c| m.get(id, c)).collect()
}

pub fn encode_oracle(model: &Seq2SeqModel, src: &[usize]) -> Vec<Vec<f64>> {
    let n = src.len();
    let xs: Vec<Vec<f64>> = src.iter().map(|&i| embed(&model.src_emb.rows, i)).collect();
    let mut fwd = Vec::new();
    let mut h = vec![0.0; model.enc_fwd.state_dim()];
    for x in &xs {
        h = gru_oracle(&model.enc_fwd, x, &h);
        fwd.push(h.clone());
    }
    let mut bwd = vec![Vec::new(); n];
    let mut h = vec![0.0; model.enc_bwd.state_dim()];
    for i in (0..n).rev() {
        h = gru_oracle(&model.enc_bwd, &xs[i], &h);
        bwd[i] = h.clone();
    }
    (0..n).map(|i| [fwd[i].clone(), bwd[i].clone()].concat()).collect()
}

pub struct OracleStep {
    pub scores: Vec<f64>,
    pub weights: Vec<f64>,
    pub context: Vec<f64>,
    pub state: Vec<f64>,
    pub probs: Vec<f64>,
}

/// Teacher-forced forward pass written with explicit loops.
pub fn forward_oracle(model: &Seq2SeqModel, src: &[usize], tgt: &[usize]) -> Vec<OracleStep> {
    let ann = encode_oracle(model, src);
    let a = &model.attn;
    let mut z = vec![0.0; model.dec_cell.state_dim()];
    let mut t_prev = vec![0.0; model.tgt_emb.rows.cols()];
    let mut steps = Vec::new();
    for &y in tgt {
        let wz = mat_vec(&a.w, &z);
        let scores: Vec<f64> = ann
            .iter()
            .map(|h| {
                let uh = mat_vec(&a.u, h);
                (0..a.v.len()).map(|k| a.v[k] * (wz[k] + uh[k]).tanh()).sum()
            })
            .collect();
        let top = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|s| (s - top).exp()).collect();
        let total: f64 = exps.iter().sum();
        let weights: Vec<f64> = exps.iter().map(|e| e / total).collect();
        let mut context = vec![0.0; ann[0].len()];
        for (i, h) in ann.iter().enumerate() {
            for k in 0..context.len() {
                context[k] += weights[i] * h[k];
            }
        }
        let input = [t_prev.clone(), context.clone()].concat();
        z = gru_oracle(&model.dec_cell, &input, &z);
        let logits: Vec<f64> = mat_vec(&model.out_w, &z)
            .iter()
            .zip(&model.out_b)
            .map(|(l, b)| l + b)
            .collect();
        let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = exps.iter().sum();
        steps.push(OracleStep {
            scores,
            weights,
            context,
            state: z.clone(),
            probs: exps.iter().map(|e| e / total).collect(),
        });
        t_prev = embed(&model.tgt_emb.rows, y);
    }
    steps
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// ------------------------------------------------------------ generators

/// Syllable-ish alphabet for random corpora.
pub const SYLLABLES: [&str; 8] = ["toi", "đi", "học", "sẽ", "kết", "thúc", "nhà", "ăn"];
pub const NOISE: [&str; 8] = ["2010", "3,5", "42", ".", ",", "!", "…", "«"];
