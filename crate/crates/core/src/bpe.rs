//! Character-level byte-pair encoding over pre-tokenized words.
//!
//! Each word starts as one symbol per code point with the end-of-word marker
//! `</w>` fused onto its final code point, so `"best"` begins as
//! `b e s t</w>`. Learning repeatedly merges the most frequent adjacent pair,
//! weighting every word by its corpus count and recounting after each merge.
//! Ties go to the lexicographically smallest `(left, right)`. Learning stops
//! after `num_merges` merges or once the best pair occurs fewer than twice.
//!
//! Application replays merges by rank: the adjacent pair learned earliest is
//! merged first, until no adjacent pair has a rank.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{self, MonoCorpus, Sentence, Token};
use crate::error::{Error, Result};

pub const END_OF_WORD: &str = "</w>";
pub const DEFAULT_JOINER: &str = "@@";
const CODES_MAGIC: &str = "#bpe:v1";

#[derive(Debug, Clone)]
pub struct BpeCodes {
    merges: Vec<(String, String)>,
    num_merges: usize,
    ranks: HashMap<String, HashMap<String, usize>>,
}

impl PartialEq for BpeCodes {
    fn eq(&self, other: &Self) -> bool {
        self.merges == other.merges && self.num_merges == other.num_merges
    }
}

impl BpeCodes {
    pub fn new(merges: Vec<(String, String)>, num_merges: usize) -> Self {
        let mut ranks: HashMap<String, HashMap<String, usize>> = HashMap::new();
        for (rank, (l, r)) in merges.iter().enumerate() {
            ranks
                .entry(l.clone())
                .or_default()
                .entry(r.clone())
                .or_insert(rank);
        }
        BpeCodes {
            merges,
            num_merges,
            ranks,
        }
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        let merges: Vec<_> = pairs
            .iter()
            .map(|(l, r)| (l.to_string(), r.to_string()))
            .collect();
        let n = merges.len();
        BpeCodes::new(merges, n)
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    /// Number of merges that were requested at learn time.
    pub fn num_merges(&self) -> usize {
        self.num_merges
    }

    /// The first `k` merges, as codes of their own.
    pub fn truncated(&self, k: usize) -> Self {
        BpeCodes::new(self.merges[..k.min(self.merges.len())].to_vec(), k)
    }

    pub fn rank(&self, left: &str, right: &str) -> Option<usize> {
        self.ranks.get(left)?.get(right).copied()
    }

    pub fn to_file_string(&self) -> String {
        let mut out = format!("{CODES_MAGIC}\tnum_merges={}\n", self.num_merges);
        for (l, r) in &self.merges {
            let _ = writeln!(out, "{l} {r}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let lines = corpus::decode_lines(text.as_bytes(), "codes")?;
        let (header, body) = lines.split_first().ok_or_else(|| Error::Format {
            line: 1,
            msg: "empty codes file".into(),
        })?;
        let num_merges = header
            .strip_prefix(CODES_MAGIC)
            .and_then(|rest| rest.strip_prefix("\tnum_merges="))
            .and_then(|k| k.parse::<usize>().ok())
            .ok_or_else(|| Error::Format {
                line: 1,
                msg: format!("expected header \"{CODES_MAGIC}\\tnum_merges=<k>\", found {header:?}"),
            })?;
        let mut merges = Vec::with_capacity(body.len());
        for (i, line) in body.iter().enumerate() {
            match line.split(' ').collect::<Vec<_>>()[..] {
                [l, r] if !l.is_empty() && !r.is_empty() => merges.push((l.to_owned(), r.to_owned())),
                _ => {
                    return Err(Error::Format {
                        line: i + 2,
                        msg: format!("expected \"left right\", found {line:?}"),
                    })
                }
            }
        }
        Ok(BpeCodes::new(merges, num_merges))
    }

    pub fn read(path: &Path) -> Result<Self> {
        BpeCodes::parse(&corpus::read_raw_lines(path)?.join("\n"))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = self.to_file_string();
        let lines: Vec<&str> = text.lines().collect();
        corpus::write_raw_lines(path, &lines)
    }
}

/// Splits a word into code-point symbols with the marker on the last one.
pub fn initial_symbols(word: &str) -> Vec<String> {
    let mut symbols: Vec<String> = word.chars().map(String::from).collect();
    if let Some(last) = symbols.last_mut() {
        last.push_str(END_OF_WORD);
    }
    symbols
}

/// Token counts over a corpus, the input to [`learn_bpe`].
pub fn word_frequencies(corpus: &MonoCorpus) -> HashMap<String, u64> {
    let mut freqs = HashMap::new();
    for tok in corpus.lines.iter().flat_map(Sentence::iter) {
        *freqs.entry(tok.as_str().to_owned()).or_insert(0) += 1;
    }
    freqs
}

#[derive(Debug, PartialEq, Eq)]
struct Candidate {
    count: u64,
    left: String,
    right: String,
    pair: (u32, u32),
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count.cmp(&other.count).then_with(|| {
            Reverse((&self.left, &self.right)).cmp(&Reverse((&other.left, &other.right)))
        })
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Interned symbol table plus per-word symbol sequences.
struct Learner {
    symbols: Vec<String>,
    ids: HashMap<String, u32>,
    words: Vec<(Vec<u32>, u64)>,
    pair_counts: HashMap<(u32, u32), u64>,
    occurs_in: HashMap<(u32, u32), HashSet<usize>>,
    heap: BinaryHeap<Candidate>,
}

impl Learner {
    fn new(word_freqs: &HashMap<String, u64>) -> Self {
        let mut sorted: Vec<(&String, &u64)> = word_freqs.iter().filter(|(w, _)| !w.is_empty()).collect();
        sorted.sort();
        let mut learner = Learner {
            symbols: Vec::new(),
            ids: HashMap::new(),
            words: Vec::with_capacity(sorted.len()),
            pair_counts: HashMap::new(),
            occurs_in: HashMap::new(),
            heap: BinaryHeap::new(),
        };
        for (word, &freq) in sorted {
            let syms = initial_symbols(word).into_iter().map(|s| learner.intern(s)).collect();
            learner.words.push((syms, freq));
        }
        for idx in 0..learner.words.len() {
            learner.add_word_pairs(idx, &mut HashSet::new());
        }
        let pairs: Vec<_> = learner.pair_counts.keys().copied().collect();
        for pair in pairs {
            learner.push_candidate(pair);
        }
        learner
    }

    fn intern(&mut self, symbol: String) -> u32 {
        if let Some(&id) = self.ids.get(&symbol) {
            return id;
        }
        let id = self.symbols.len() as u32;
        self.ids.insert(symbol.clone(), id);
        self.symbols.push(symbol);
        id
    }

    fn add_word_pairs(&mut self, idx: usize, touched: &mut HashSet<(u32, u32)>) {
        let (syms, freq) = &self.words[idx];
        for w in syms.windows(2) {
            let pair = (w[0], w[1]);
            *self.pair_counts.entry(pair).or_insert(0) += freq;
            self.occurs_in.entry(pair).or_default().insert(idx);
            touched.insert(pair);
        }
    }

    fn remove_word_pairs(&mut self, idx: usize, touched: &mut HashSet<(u32, u32)>) {
        let (syms, freq) = &self.words[idx];
        for w in syms.windows(2) {
            let pair = (w[0], w[1]);
            if let Some(c) = self.pair_counts.get_mut(&pair) {
                *c -= freq;
                if *c == 0 {
                    self.pair_counts.remove(&pair);
                }
            }
            touched.insert(pair);
        }
    }

    fn push_candidate(&mut self, pair: (u32, u32)) {
        if let Some(&count) = self.pair_counts.get(&pair) {
            self.heap.push(Candidate {
                count,
                left: self.symbols[pair.0 as usize].clone(),
                right: self.symbols[pair.1 as usize].clone(),
                pair,
            });
        }
    }

    fn best(&mut self) -> Option<Candidate> {
        while let Some(top) = self.heap.pop() {
            if self.pair_counts.get(&top.pair) == Some(&top.count) {
                return Some(top);
            }
        }
        None
    }

    fn merge(&mut self, pair: (u32, u32)) {
        let merged = self.intern(format!(
            "{}{}",
            self.symbols[pair.0 as usize], self.symbols[pair.1 as usize]
        ));
        let mut affected: Vec<usize> = self
            .occurs_in
            .remove(&pair)
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        affected.sort_unstable();
        let mut touched = HashSet::new();
        for idx in affected {
            if !self.words[idx].0.windows(2).any(|w| (w[0], w[1]) == pair) {
                continue;
            }
            self.remove_word_pairs(idx, &mut touched);
            let syms = std::mem::take(&mut self.words[idx].0);
            self.words[idx].0 = merge_ids(&syms, pair, merged);
            self.add_word_pairs(idx, &mut touched);
        }
        self.occurs_in.remove(&pair);
        for p in touched {
            if p != pair {
                self.push_candidate(p);
            }
        }
    }
}

fn merge_ids(syms: &[u32], pair: (u32, u32), merged: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(syms.len());
    let mut i = 0;
    while i < syms.len() {
        if i + 1 < syms.len() && (syms[i], syms[i + 1]) == pair {
            out.push(merged);
            i += 2;
        } else {
            out.push(syms[i]);
            i += 1;
        }
    }
    out
}

/// Learns up to `num_merges` merges from word counts.
pub fn learn_bpe(word_freqs: &HashMap<String, u64>, num_merges: usize) -> BpeCodes {
    let mut learner = Learner::new(word_freqs);
    let mut merges = Vec::new();
    while merges.len() < num_merges {
        let Some(best) = learner.best() else { break };
        if best.count < 2 {
            break;
        }
        learner.merge(best.pair);
        merges.push((best.left, best.right));
    }
    BpeCodes::new(merges, num_merges)
}

/// Segments one word by replaying merges lowest rank first.
pub fn apply_bpe(word: &str, codes: &BpeCodes) -> Vec<String> {
    let mut symbols = initial_symbols(word);
    loop {
        let best = symbols
            .windows(2)
            .filter_map(|w| codes.rank(&w[0], &w[1]))
            .min();
        let Some(rank) = best else { break };
        let (left, right) = &codes.merges[rank];
        let mut out = Vec::with_capacity(symbols.len());
        let mut iter = symbols.into_iter().peekable();
        while let Some(sym) = iter.next() {
            if &sym == left && iter.peek() == Some(right) {
                let next = iter.next().unwrap();
                out.push(sym + &next);
            } else {
                out.push(sym);
            }
        }
        symbols = out;
    }
    symbols
}

/// Renders a word's symbols as output tokens: joiner suffix on non-final pieces, marker removed.
fn render(symbols: Vec<String>, joiner: &str) -> Vec<Token> {
    let last = symbols.len().saturating_sub(1);
    symbols
        .into_iter()
        .enumerate()
        .map(|(i, mut s)| {
            if i == last {
                if let Some(stripped) = s.strip_suffix(END_OF_WORD) {
                    s.truncate(stripped.len());
                }
            } else {
                s.push_str(joiner);
            }
            Token::from_string_unchecked(s)
        })
        .collect()
}

/// Replaces every token by its BPE pieces.
///
/// Segmentations are computed once per distinct word and shared by all lines.
pub fn segment_corpus(corpus: &MonoCorpus, codes: &BpeCodes, joiner: &str) -> MonoCorpus {
    let mut distinct: Vec<&str> = corpus
        .lines
        .iter()
        .flat_map(Sentence::iter)
        .map(Token::as_str)
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    distinct.sort_unstable();
    let cache: HashMap<&str, Vec<Token>> = distinct
        .par_iter()
        .map(|&w| (w, render(apply_bpe(w, codes), joiner)))
        .collect();
    let lines = corpus
        .lines
        .par_iter()
        .map(|line| {
            Sentence::new(
                line.iter()
                    .flat_map(|t| cache[t.as_str()].iter().cloned())
                    .collect(),
            )
        })
        .collect();
    MonoCorpus::new(corpus.lang.clone(), lines)
}

/// Inverse of [`segment_corpus`]: a token ending in `joiner` is glued to the next one.
///
/// Exact as long as no original token ends with the joiner.
pub fn desegment(corpus: &MonoCorpus, joiner: &str) -> MonoCorpus {
    let lines = corpus
        .lines
        .par_iter()
        .map(|line| {
            let mut out = Vec::with_capacity(line.len());
            let mut pending = String::new();
            for tok in line.iter() {
                match tok.strip_suffix(joiner) {
                    Some(piece) if !joiner.is_empty() => pending.push_str(piece),
                    _ => {
                        pending.push_str(tok);
                        out.push(Token::from_string_unchecked(std::mem::take(&mut pending)));
                    }
                }
            }
            if !pending.is_empty() {
                out.push(Token::from_string_unchecked(pending));
            }
            Sentence::new(out)
        })
        .collect();
    MonoCorpus::new(corpus.lang.clone(), lines)
}
