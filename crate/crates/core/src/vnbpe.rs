//! Syllable-level BPE: learn and replay merges of adjacent whitespace tokens.
//!
//! Vietnamese text separates syllables, not words, with spaces. This merger
//! treats every space-delimited token as an atomic symbol and joins frequent
//! adjacent pairs with an underscore (`kết thúc` becomes `kết_thúc`).
//!
//! Learning is single-pass:
//!
//! 1. count adjacent pairs once over the input corpus, skipping any pair in
//!    which either token is numeric or a separator symbol;
//! 2. keep pairs whose count reaches `min_freq` (`>=`, or `>` in strict mode);
//! 3. sort them by decreasing count, ties by `(left, right)` in code-point order;
//! 4. replay them in that order over the corpus.
//!
//! Counts are never recomputed between merges. Replaying a rule `(l, r)` on a
//! line is one left-to-right pass that rewrites each non-overlapping adjacency
//! `l r` into `l_r`. A token produced by rule `k` can feed rule `k + 1` but is
//! never revisited by rule `k` itself.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;

use crate::corpus::{self, MonoCorpus, Sentence, Token};
use crate::error::{Error, Result};

const JOINER: char = '_';
const CODES_MAGIC: &str = "#vnbpe:v1";

static PUNCT_OR_SYMBOL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[\p{P}\p{S}]+$").unwrap());
static NUMERIC: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[.,]*\p{Nd}[\p{Nd}.,]*$").unwrap());

/// Decides which tokens may never take part in a merge.
#[derive(Debug, Clone)]
pub struct ExclusionPolicy {
    /// Extra tokens treated as separators on top of the category rule.
    pub separator_symbols: HashSet<String>,
    /// Treat every token made only of punctuation/symbol code points as a separator.
    pub punct_symbol_rule: bool,
    /// Exclude tokens made of decimal digits, optionally mixed with `.` and `,`.
    pub numeric_rule: bool,
}

impl Default for ExclusionPolicy {
    fn default() -> Self {
        ExclusionPolicy {
            separator_symbols: HashSet::new(),
            punct_symbol_rule: true,
            numeric_rule: true,
        }
    }
}

impl ExclusionPolicy {
    /// Excludes nothing.
    pub fn none() -> Self {
        ExclusionPolicy {
            separator_symbols: HashSet::new(),
            punct_symbol_rule: false,
            numeric_rule: false,
        }
    }

    pub fn with_separator(mut self, token: impl Into<String>) -> Self {
        self.separator_symbols.insert(token.into());
        self
    }

    pub fn is_separator(&self, token: &str) -> bool {
        self.separator_symbols.contains(token)
            || (self.punct_symbol_rule && PUNCT_OR_SYMBOL.is_match(token))
    }

    pub fn is_numeric(&self, token: &str) -> bool {
        self.numeric_rule && NUMERIC.is_match(token)
    }

    pub fn excludes(&self, token: &str) -> bool {
        self.is_separator(token) || self.is_numeric(token)
    }
}

/// How adjacent pairs are enumerated when counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMode {
    /// Every adjacency `(t[i], t[i+1])` is counted.
    #[default]
    SlidingWindow,
    /// After counting `(t[i], t[i+1])` the scan resumes at `i + 2`; an
    /// excluded pair advances the scan by one.
    NonOverlapping,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threshold {
    /// Keep pairs with `count >= min_freq`.
    #[default]
    Inclusive,
    /// Keep pairs with `count > min_freq`.
    Strict,
}

impl Threshold {
    fn keeps(self, count: u64, min_freq: u64) -> bool {
        match self {
            Threshold::Inclusive => count >= min_freq,
            Threshold::Strict => count > min_freq,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LearnOptions {
    pub min_freq: u64,
    pub threshold: Threshold,
    pub count_mode: CountMode,
    pub policy: ExclusionPolicy,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions {
            min_freq: 2,
            threshold: Threshold::Inclusive,
            count_mode: CountMode::SlidingWindow,
            policy: ExclusionPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VnMergeRule {
    pub left: Token,
    pub right: Token,
    pub frequency: u64,
}

impl VnMergeRule {
    pub fn new(left: &str, right: &str, frequency: u64) -> Result<Self> {
        Ok(VnMergeRule {
            left: Token::new(left)?,
            right: Token::new(right)?,
            frequency,
        })
    }

    pub fn joined(&self) -> String {
        join(&self.left, &self.right)
    }
}

fn join(left: &str, right: &str) -> String {
    let mut s = String::with_capacity(left.len() + right.len() + 1);
    s.push_str(left);
    s.push(JOINER);
    s.push_str(right);
    s
}

/// Ordered merge rules; replay order is list order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VnCodes {
    pub rules: Vec<VnMergeRule>,
    pub min_freq: u64,
}

impl VnCodes {
    pub fn new(rules: Vec<VnMergeRule>, min_freq: u64) -> Self {
        VnCodes { rules, min_freq }
    }

    /// Builds codes from `(left, right)` string pairs with frequency 0.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self> {
        let rules = pairs
            .iter()
            .map(|(l, r)| VnMergeRule::new(l, r, 0))
            .collect::<Result<_>>()?;
        Ok(VnCodes::new(rules, 1))
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Serializes to the codes file format:
    /// a header `#vnbpe:v1<TAB>min_freq=<k>` and then `left<TAB>right<TAB>freq` per rule.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{CODES_MAGIC}\tmin_freq={}\n", self.min_freq);
        for rule in &self.rules {
            let _ = writeln!(out, "{}\t{}\t{}", rule.left, rule.right, rule.frequency);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let lines = corpus::decode_lines(text.as_bytes(), "codes")?;
        let mut iter = lines.iter().enumerate();
        let (_, header) = iter.next().ok_or_else(|| Error::Format {
            line: 1,
            msg: "empty codes file".into(),
        })?;
        let min_freq = header
            .strip_prefix(CODES_MAGIC)
            .and_then(|rest| rest.strip_prefix("\tmin_freq="))
            .and_then(|k| k.parse::<u64>().ok())
            .ok_or_else(|| Error::Format {
                line: 1,
                msg: format!("expected header \"{CODES_MAGIC}\\tmin_freq=<k>\", found {header:?}"),
            })?;
        let mut rules = Vec::new();
        for (i, line) in iter {
            let line_no = i + 1;
            let fields: Vec<&str> = line.split('\t').collect();
            let [left, right, freq] = fields[..] else {
                return Err(Error::Format {
                    line: line_no,
                    msg: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            };
            let frequency = freq.parse::<u64>().map_err(|_| Error::Format {
                line: line_no,
                msg: format!("bad frequency {freq:?}"),
            })?;
            let rule = VnMergeRule::new(left, right, frequency).map_err(|e| Error::Format {
                line: line_no,
                msg: e.to_string(),
            })?;
            rules.push(rule);
        }
        Ok(VnCodes { rules, min_freq })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = corpus::read_bytes(path)?;
        let text = std::str::from_utf8(&bytes).map_err(|e| Error::Decode {
            source_name: path.display().to_string(),
            offset: e.valid_up_to(),
        })?;
        VnCodes::parse(text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = self.to_file_string();
        let lines: Vec<&str> = text.lines().collect();
        corpus::write_raw_lines(path, &lines)
    }
}

/// Adjacent-pair counts over a corpus. Pairs never span two lines.
pub fn count_pairs(
    corpus: &MonoCorpus,
    policy: &ExclusionPolicy,
    mode: CountMode,
) -> HashMap<(String, String), u64> {
    let borrowed = corpus
        .lines
        .par_iter()
        .fold(HashMap::<(&str, &str), u64>::new, |mut acc, line| {
            count_line(line, policy, mode, &mut acc);
            acc
        })
        .reduce(HashMap::new, |a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            for (k, v) in small {
                *big.entry(k).or_insert(0) += v;
            }
            big
        });
    borrowed
        .into_iter()
        .map(|((l, r), c)| ((l.to_owned(), r.to_owned()), c))
        .collect()
}

fn count_line<'a>(
    line: &'a Sentence,
    policy: &ExclusionPolicy,
    mode: CountMode,
    acc: &mut HashMap<(&'a str, &'a str), u64>,
) {
    let toks = &line.tokens;
    if toks.len() < 2 {
        return;
    }
    let excluded: Vec<bool> = toks.iter().map(|t| policy.excludes(t)).collect();
    let mut i = 0;
    while i + 1 < toks.len() {
        if excluded[i] || excluded[i + 1] {
            i += 1;
            continue;
        }
        *acc.entry((toks[i].as_str(), toks[i + 1].as_str())).or_insert(0) += 1;
        i += match mode {
            CountMode::SlidingWindow => 1,
            CountMode::NonOverlapping => 2,
        };
    }
}

fn warn_on_underscores(corpus: &MonoCorpus) {
    let found = corpus
        .lines
        .par_iter()
        .any(|line| line.iter().any(|t| t.contains(JOINER)));
    if found {
        log::warn!(
            "input already contains '_' inside tokens; unapply will not invert merges exactly"
        );
    }
}

/// Learns merge rules and returns them with the rewritten corpus.
pub fn learn(corpus: &MonoCorpus, opts: &LearnOptions) -> Result<(VnCodes, MonoCorpus)> {
    if opts.min_freq == 0 {
        return Err(Error::Config("min_freq must be at least 1".into()));
    }
    warn_on_underscores(corpus);
    let counts = count_pairs(corpus, &opts.policy, opts.count_mode);
    let mut kept: Vec<((String, String), u64)> = counts
        .into_iter()
        .filter(|&(_, c)| opts.threshold.keeps(c, opts.min_freq))
        .collect();
    kept.sort_unstable_by(|(pa, ca), (pb, cb)| cb.cmp(ca).then_with(|| pa.cmp(pb)));
    let rules = kept
        .into_iter()
        .map(|((l, r), frequency)| VnMergeRule {
            left: Token::from_string_unchecked(l),
            right: Token::from_string_unchecked(r),
            frequency,
        })
        .collect();
    let codes = VnCodes::new(rules, opts.min_freq);
    let rewritten = apply_inner(corpus, &codes);
    Ok((codes, rewritten))
}

/// Replays `codes` in order over every line.
pub fn apply(corpus: &MonoCorpus, codes: &VnCodes) -> MonoCorpus {
    warn_on_underscores(corpus);
    apply_inner(corpus, codes)
}

fn apply_inner(corpus: &MonoCorpus, codes: &VnCodes) -> MonoCorpus {
    let index = MergeIndex::new(codes);
    let lines = corpus
        .lines
        .par_iter()
        .map(|line| index.apply_line(line))
        .collect();
    MonoCorpus::new(corpus.lang.clone(), lines)
}

/// Rank lookup by `(left, right)`.
///
/// Replaying thousands of rules over every line is wasteful because almost
/// all of them are no-ops on any given line. Instead each line jumps straight
/// to the lowest-ranked rule after the last one applied that has an adjacency
/// in the line. Rules in between cannot fire (the line has not changed since
/// they would have run), so the result equals a full sequential replay.
struct MergeIndex<'a> {
    ranks: HashMap<&'a str, HashMap<&'a str, Vec<usize>>>,
    codes: &'a VnCodes,
}

impl<'a> MergeIndex<'a> {
    fn new(codes: &'a VnCodes) -> Self {
        let mut ranks: HashMap<&str, HashMap<&str, Vec<usize>>> = HashMap::new();
        for (rank, rule) in codes.rules.iter().enumerate() {
            ranks
                .entry(rule.left.as_str())
                .or_default()
                .entry(rule.right.as_str())
                .or_default()
                .push(rank);
        }
        MergeIndex { ranks, codes }
    }

    /// Smallest rank of `(left, right)` that is `>= from`.
    fn rank_from(&self, left: &str, right: &str, from: usize) -> Option<usize> {
        let ranks = self.ranks.get(left)?.get(right)?;
        let at = ranks.partition_point(|&r| r < from);
        ranks.get(at).copied()
    }

    fn apply_line(&self, line: &Sentence) -> Sentence {
        let mut toks: Vec<String> = line.iter().map(|t| t.as_str().to_owned()).collect();
        let mut from = 0;
        loop {
            let next = toks
                .windows(2)
                .filter_map(|w| self.rank_from(&w[0], &w[1], from))
                .min();
            let Some(rank) = next else { break };
            let rule = &self.codes.rules[rank];
            toks = merge_pass(toks, &rule.left, &rule.right);
            from = rank + 1;
        }
        Sentence::new(toks.into_iter().map(Token::from_string_unchecked).collect())
    }
}

/// One leftmost-first pass rewriting each `left right` adjacency into `left_right`.
fn merge_pass(toks: Vec<String>, left: &str, right: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(toks.len());
    let mut iter = toks.into_iter().peekable();
    while let Some(tok) = iter.next() {
        if tok == left && iter.peek().is_some_and(|next| next == right) {
            iter.next();
            out.push(join(left, right));
        } else {
            out.push(tok);
        }
    }
    out
}

/// Undoes `apply` by splitting joined tokens, replaying rules in reverse.
pub fn unapply(corpus: &MonoCorpus, codes: &VnCodes) -> MonoCorpus {
    let mut by_joined: HashMap<String, Vec<usize>> = HashMap::new();
    for (rank, rule) in codes.rules.iter().enumerate() {
        by_joined.entry(rule.joined()).or_default().push(rank);
    }
    let lines = corpus
        .lines
        .par_iter()
        .map(|line| {
            let mut toks: Vec<String> = line.iter().map(|t| t.as_str().to_owned()).collect();
            // Exclusive upper bound on ranks still to be replayed.
            let mut bound = codes.rules.len();
            loop {
                let next = toks
                    .iter()
                    .filter_map(|t| {
                        let ranks = by_joined.get(t.as_str())?;
                        let at = ranks.partition_point(|&r| r < bound);
                        at.checked_sub(1).map(|i| ranks[i])
                    })
                    .max();
                let Some(rank) = next else { break };
                let rule = &codes.rules[rank];
                let joined = rule.joined();
                toks = toks
                    .into_iter()
                    .flat_map(|t| {
                        if t == joined {
                            vec![rule.left.as_str().to_owned(), rule.right.as_str().to_owned()]
                        } else {
                            vec![t]
                        }
                    })
                    .collect();
                bound = rank;
            }
            Sentence::new(toks.into_iter().map(Token::from_string_unchecked).collect())
        })
        .collect();
    MonoCorpus::new(corpus.lang.clone(), lines)
}
