//! Corpus statistics.
//!
//! For a parallel corpus a "sentence" is a pair, tokens and types are counted
//! over both sides together, a pair is blank when either side is empty, and
//! duplicates follow [`clean`](crate::augment::clean)'s pair definition.

use std::collections::HashSet;

use crate::corpus::{MonoCorpus, ParallelCorpus, Sentence};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatsReport {
    pub sentence_count: usize,
    pub token_count: usize,
    pub type_count: usize,
    pub blank_count: usize,
    pub duplicate_count: usize,
}

impl StatsReport {
    fn fields(&self) -> [(&'static str, usize); 5] {
        [
            ("sentence_count", self.sentence_count),
            ("token_count", self.token_count),
            ("type_count", self.type_count),
            ("blank_count", self.blank_count),
            ("duplicate_count", self.duplicate_count),
        ]
    }

    pub fn to_key_values(&self) -> String {
        self.fields()
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let map: serde_json::Map<String, serde_json::Value> = self
            .fields()
            .iter()
            .map(|&(k, v)| (k.to_owned(), v.into()))
            .collect();
        serde_json::Value::Object(map).to_string()
    }
}

pub fn mono_stats(corpus: &MonoCorpus) -> StatsReport {
    let mut types = HashSet::new();
    let mut seen: HashSet<&Sentence> = HashSet::new();
    let mut report = StatsReport {
        sentence_count: corpus.len(),
        ..Default::default()
    };
    for line in &corpus.lines {
        report.token_count += line.len();
        types.extend(line.iter().map(|t| t.as_str()));
        if line.is_empty() {
            report.blank_count += 1;
        } else if !seen.insert(line) {
            report.duplicate_count += 1;
        }
    }
    report.type_count = types.len();
    report
}

pub fn parallel_stats(corpus: &ParallelCorpus) -> StatsReport {
    let mut types = HashSet::new();
    let mut seen: HashSet<(&Sentence, &Sentence)> = HashSet::new();
    let mut report = StatsReport {
        sentence_count: corpus.len(),
        ..Default::default()
    };
    for (s, t) in &corpus.pairs {
        report.token_count += s.len() + t.len();
        types.extend(s.iter().chain(t.iter()).map(|t| t.as_str()));
        if s.is_empty() || t.is_empty() {
            report.blank_count += 1;
        } else if !seen.insert((s, t)) {
            report.duplicate_count += 1;
        }
    }
    report.type_count = types.len();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{clean, DedupKey};
    use crate::corpus::parse_line;

    #[test]
    fn distinct_lines() {
        let r = mono_stats(&MonoCorpus::from_lines("vi", &["a", "b c", "d"]));
        assert_eq!((r.sentence_count, r.blank_count, r.duplicate_count), (3, 0, 0));
    }

    #[test]
    fn duplicate_lines() {
        let r = mono_stats(&MonoCorpus::from_lines("vi", &["a b", "a b"]));
        assert_eq!((r.duplicate_count, r.type_count, r.token_count), (1, 2, 4));
    }

    #[test]
    fn parallel_matches_clean() {
        let c = ParallelCorpus::new(
            "ja",
            "vi",
            [("a", "b"), ("a", "b"), ("", "x"), ("a", "c")]
                .iter()
                .map(|(s, t)| (parse_line(s), parse_line(t)))
                .collect(),
        );
        let r = parallel_stats(&c);
        let (_, rep) = clean(&c, DedupKey::Pair);
        assert_eq!(r.duplicate_count, rep.duplicate_removed);
        assert_eq!(r.blank_count, rep.blank_removed);
        assert_eq!((r.sentence_count, r.token_count, r.type_count), (4, 7, 4));
    }

    #[test]
    fn output_formats() {
        let r = StatsReport {
            sentence_count: 106758,
            ..Default::default()
        };
        assert!(r.to_key_values().starts_with("sentence_count=106758\n"));
        assert_eq!(r.to_key_values().lines().count(), 5);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["sentence_count"], 106758);
        assert!(!r.to_json().contains('\n'));
    }
}
