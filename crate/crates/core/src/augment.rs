//! Corpus constructors for data augmentation and hygiene.
//!
//! * back-translation: pair externally produced translations with the
//!   monolingual target text they came from;
//! * mixing: concatenate original and synthetic pairs, optionally shuffled;
//! * mix-source: add identical-translation pairs built from target-language
//!   text and prefix every token with a language tag;
//! * cleaning and seeded subsampling.
//!
//! Every seeded operation uses [`SeededRng`](crate::rng::SeededRng).

use std::collections::HashSet;

use crate::corpus::{MonoCorpus, ParallelCorpus, Sentence, Token};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

pub const LANG_PLACEHOLDER: &str = "{lang}";
pub const DEFAULT_TAG_TEMPLATE: &str = "__{lang}__";

/// A per-token language tag such as `__vi__`, always used as a prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagTemplate {
    pattern: String,
}

impl Default for TagTemplate {
    fn default() -> Self {
        TagTemplate {
            pattern: DEFAULT_TAG_TEMPLATE.to_owned(),
        }
    }
}

impl TagTemplate {
    pub fn new(pattern: impl Into<String>) -> Result<Self> {
        let pattern = pattern.into();
        if !pattern.contains(LANG_PLACEHOLDER) {
            return Err(Error::Config(format!(
                "tag template {pattern:?} lacks the {LANG_PLACEHOLDER} placeholder"
            )));
        }
        if pattern.chars().any(char::is_whitespace) {
            return Err(Error::Config(format!("tag template {pattern:?} contains whitespace")));
        }
        Ok(TagTemplate { pattern })
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    /// Renders the tag for `lang`, rejecting tags that would collide with the
    /// BPE joiner or the end-of-word marker.
    pub fn render(&self, lang: &str, joiner: &str) -> Result<String> {
        let tag = self.pattern.replace(LANG_PLACEHOLDER, lang);
        if tag.is_empty() || tag.chars().any(char::is_whitespace) {
            return Err(Error::Config(format!("rendered tag {tag:?} is empty or has whitespace")));
        }
        if (!joiner.is_empty() && tag.contains(joiner)) || tag.contains(crate::bpe::END_OF_WORD) {
            return Err(Error::Config(format!(
                "rendered tag {tag:?} overlaps the joiner {joiner:?} or the end-of-word marker"
            )));
        }
        Ok(tag)
    }
}

pub fn tag_sentence(sentence: &Sentence, tag: &str) -> Sentence {
    Sentence::new(
        sentence
            .iter()
            .map(|t| Token::from_string_unchecked(format!("{tag}{t}")))
            .collect(),
    )
}

/// Removes `tag` from the front of every token that carries it. A token that
/// is nothing but the tag is left as is.
pub fn strip_tag(sentence: &Sentence, tag: &str) -> Sentence {
    Sentence::new(
        sentence
            .iter()
            .map(|t| match t.strip_prefix(tag) {
                Some(rest) if !rest.is_empty() => Token::from_string_unchecked(rest.to_owned()),
                _ => t.clone(),
            })
            .collect(),
    )
}

/// Pairs `translated_source[i]` with `mono_target[i]`.
pub fn assemble_backtranslation(
    mono_target: MonoCorpus,
    translated_source: MonoCorpus,
) -> Result<ParallelCorpus> {
    if mono_target.len() != translated_source.len() {
        return Err(Error::Alignment {
            left_name: "monolingual target".into(),
            left: mono_target.len(),
            right_name: "translated source".into(),
            right: translated_source.len(),
        });
    }
    ParallelCorpus::from_sides(translated_source, mono_target)
}

/// Concatenates `original` then `synthetic`; with a seed, the result is shuffled.
pub fn mix_corpora(
    original: ParallelCorpus,
    synthetic: ParallelCorpus,
    shuffle_seed: Option<u64>,
) -> Result<ParallelCorpus> {
    if original.src_lang != synthetic.src_lang || original.tgt_lang != synthetic.tgt_lang {
        return Err(Error::Config(format!(
            "cannot mix {}-{} with {}-{}",
            original.src_lang, original.tgt_lang, synthetic.src_lang, synthetic.tgt_lang
        )));
    }
    let mut out = original;
    out.pairs.extend(synthetic.pairs);
    if let Some(seed) = shuffle_seed {
        SeededRng::new(seed).shuffle(&mut out.pairs);
    }
    Ok(out)
}

/// Builds the tagged `XY + YY` corpus.
///
/// Source tokens of `original` get the source-language tag; target tokens of
/// `original` and both sides of the identity pairs built from `target_mono`
/// get the target-language tag.
pub fn make_mix_source(
    original: &ParallelCorpus,
    target_mono: &MonoCorpus,
    template: &TagTemplate,
    joiner: &str,
) -> Result<ParallelCorpus> {
    if target_mono.lang != original.tgt_lang {
        return Err(Error::Config(format!(
            "monolingual corpus is {:?} but the parallel target language is {:?}",
            target_mono.lang, original.tgt_lang
        )));
    }
    let src_tag = template.render(&original.src_lang, joiner)?;
    let tgt_tag = template.render(&original.tgt_lang, joiner)?;
    let mut pairs = Vec::with_capacity(original.len() + target_mono.len());
    pairs.extend(
        original
            .pairs
            .iter()
            .map(|(s, t)| (tag_sentence(s, &src_tag), tag_sentence(t, &tgt_tag))),
    );
    pairs.extend(target_mono.lines.iter().map(|line| {
        let tagged = tag_sentence(line, &tgt_tag);
        (tagged.clone(), tagged)
    }));
    Ok(ParallelCorpus::new(
        original.src_lang.clone(),
        original.tgt_lang.clone(),
        pairs,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsampleSpec {
    pub k: usize,
    pub seed: u64,
}

impl SubsampleSpec {
    pub fn new(k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("subsample size must be positive".into()));
        }
        Ok(SubsampleSpec { k, seed })
    }
}

/// Shuffles a copy of `items` and keeps the first `k`.
pub fn subsample<T: Clone>(items: &[T], spec: SubsampleSpec) -> Result<Vec<T>> {
    if spec.k == 0 {
        return Err(Error::Config("subsample size must be positive".into()));
    }
    if spec.k > items.len() {
        return Err(Error::Range {
            k: spec.k,
            size: items.len(),
        });
    }
    let mut shuffled = items.to_vec();
    SeededRng::new(spec.seed).shuffle(&mut shuffled);
    shuffled.truncate(spec.k);
    Ok(shuffled)
}

pub fn subsample_mono(corpus: &MonoCorpus, spec: SubsampleSpec) -> Result<MonoCorpus> {
    Ok(MonoCorpus::new(corpus.lang.clone(), subsample(&corpus.lines, spec)?))
}

pub fn subsample_parallel(corpus: &ParallelCorpus, spec: SubsampleSpec) -> Result<ParallelCorpus> {
    Ok(ParallelCorpus::new(
        corpus.src_lang.clone(),
        corpus.tgt_lang.clone(),
        subsample(&corpus.pairs, spec)?,
    ))
}

/// What counts as a duplicate in [`clean`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DedupKey {
    /// Both sides equal an earlier pair.
    #[default]
    Pair,
    /// The source side equals an earlier source side.
    Source,
    /// The target side equals an earlier target side.
    Target,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleanReport {
    pub input_pairs: usize,
    pub blank_removed: usize,
    pub duplicate_removed: usize,
    pub kept: usize,
}

impl CleanReport {
    pub fn to_key_values(&self) -> String {
        format!(
            "input_pairs={}\nblank_removed={}\nduplicate_removed={}\nkept={}\n",
            self.input_pairs, self.blank_removed, self.duplicate_removed, self.kept
        )
    }
}

/// Drops pairs with an empty side, then later duplicates; keeps first occurrences in order.
pub fn clean(corpus: &ParallelCorpus, key: DedupKey) -> (ParallelCorpus, CleanReport) {
    let mut seen: HashSet<(Option<&Sentence>, Option<&Sentence>)> = HashSet::new();
    let mut report = CleanReport {
        input_pairs: corpus.len(),
        ..Default::default()
    };
    let mut kept = Vec::with_capacity(corpus.len());
    for pair @ (s, t) in &corpus.pairs {
        if s.is_empty() || t.is_empty() {
            report.blank_removed += 1;
            continue;
        }
        let k = match key {
            DedupKey::Pair => (Some(s), Some(t)),
            DedupKey::Source => (Some(s), None),
            DedupKey::Target => (None, Some(t)),
        };
        if !seen.insert(k) {
            report.duplicate_removed += 1;
            continue;
        }
        kept.push(pair.clone());
    }
    report.kept = kept.len();
    (
        ParallelCorpus::new(corpus.src_lang.clone(), corpus.tgt_lang.clone(), kept),
        report,
    )
}
