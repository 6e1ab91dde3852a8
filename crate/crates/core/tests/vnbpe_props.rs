mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use subseg::vnbpe::{self, LearnOptions, Threshold, VnCodes};
use subseg::MonoCorpus;

use common::{vnbpe_oracle, NOISE, SYLLABLES};

fn token() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => prop::sample::select(SYLLABLES.to_vec()),
        1 => prop::sample::select(NOISE.to_vec()),
    ]
    .prop_map(str::to_owned)
}

fn corpus_lines() -> impl Strategy<Value = Vec<Vec<String>>> {
    prop::collection::vec(prop::collection::vec(token(), 0..=12), 0..=50)
}

fn to_corpus(lines: &[Vec<String>]) -> MonoCorpus {
    let joined: Vec<String> = lines.iter().map(|l| l.join(" ")).collect();
    MonoCorpus::from_lines("vi", &joined)
}

fn rules_of(codes: &VnCodes) -> Vec<(String, String, u64)> {
    codes
        .rules
        .iter()
        .map(|r| (r.left.to_string(), r.right.to_string(), r.frequency))
        .collect()
}

fn vocab(lines: &[String]) -> HashSet<String> {
    lines.iter().flat_map(|l| l.split(' ')).filter(|t| !t.is_empty()).map(str::to_owned).collect()
}

proptest! {
    #[test]
    fn learn_matches_reference(lines in corpus_lines(), min_freq in 1u64..4, strict in any::<bool>()) {
        let opts = LearnOptions {
            min_freq,
            threshold: if strict { Threshold::Strict } else { Threshold::Inclusive },
            ..LearnOptions::default()
        };
        let (codes, rewritten) = vnbpe::learn(&to_corpus(&lines), &opts).unwrap();
        let (want_rules, want_lines) = vnbpe_oracle(&lines, min_freq, strict);
        prop_assert_eq!(rules_of(&codes), want_rules);
        let want: Vec<String> = want_lines.iter().map(|l| l.join(" ")).collect();
        prop_assert_eq!(rewritten.to_strings(), want);
    }

    #[test]
    fn apply_reproduces_learn_output(lines in corpus_lines()) {
        let corpus = to_corpus(&lines);
        let (codes, rewritten) = vnbpe::learn(&corpus, &LearnOptions::default()).unwrap();
        prop_assert_eq!(vnbpe::apply(&corpus, &codes), rewritten);
    }

    #[test]
    fn unapply_inverts_apply(lines in corpus_lines()) {
        let corpus = to_corpus(&lines);
        let (codes, rewritten) = vnbpe::learn(&corpus, &LearnOptions::default()).unwrap();
        prop_assert_eq!(vnbpe::unapply(&rewritten, &codes), corpus);
    }

    #[test]
    fn excluded_tokens_never_merge(lines in corpus_lines()) {
        let (codes, rewritten) = vnbpe::learn(&to_corpus(&lines), &LearnOptions::default()).unwrap();
        for rule in &codes.rules {
            for side in [&rule.left, &rule.right] {
                prop_assert!(!NOISE.contains(&side.as_str()), "rule touches {}", side);
            }
        }
        for line in rewritten.to_strings() {
            for tok in line.split(' ').filter(|t| t.contains('_')) {
                for part in tok.split('_') {
                    prop_assert!(!NOISE.contains(&part), "{} in {}", part, tok);
                }
            }
        }
    }

    #[test]
    fn syllables_are_conserved(lines in corpus_lines()) {
        let corpus = to_corpus(&lines);
        let (_, rewritten) = vnbpe::learn(&corpus, &LearnOptions::default()).unwrap();
        let split: Vec<String> = rewritten.to_strings().iter().map(|l| l.replace('_', " ")).collect();
        prop_assert_eq!(split, corpus.to_strings());
    }

    #[test]
    fn rules_sorted_and_above_threshold(lines in corpus_lines(), min_freq in 1u64..4) {
        let opts = LearnOptions { min_freq, ..LearnOptions::default() };
        let (codes, _) = vnbpe::learn(&to_corpus(&lines), &opts).unwrap();
        for w in codes.rules.windows(2) {
            let a = (std::cmp::Reverse(w[0].frequency), &w[0].left, &w[0].right);
            let b = (std::cmp::Reverse(w[1].frequency), &w[1].left, &w[1].right);
            prop_assert!(a < b);
        }
        prop_assert!(codes.rules.iter().all(|r| r.frequency >= min_freq));
    }

    // A single rule l r turns some `l r` adjacencies into `l_r`: at most one
    // new type appears and at most the two constituents disappear.
    #[test]
    fn one_rule_changes_vocabulary_by_little(lines in corpus_lines(), pick in any::<prop::sample::Index>()) {
        let corpus = to_corpus(&lines);
        let (codes, _) = vnbpe::learn(&corpus, &LearnOptions::default()).unwrap();
        prop_assume!(!codes.is_empty());
        let rule = codes.rules[pick.index(codes.len())].clone();
        let single = VnCodes::new(vec![rule], 2);
        let before = vocab(&corpus.to_strings());
        let after = vocab(&vnbpe::apply(&corpus, &single).to_strings());
        prop_assert!(after.difference(&before).count() <= 1);
        prop_assert!(before.difference(&after).count() <= 2);
    }

    #[test]
    fn codes_file_round_trip(lines in corpus_lines()) {
        let (codes, _) = vnbpe::learn(&to_corpus(&lines), &LearnOptions::default()).unwrap();
        let parsed = VnCodes::parse(&codes.to_file_string()).unwrap();
        prop_assert_eq!(parsed, codes);
    }
}

#[test]
fn worked_example() {
    let corpus = MonoCorpus::from_lines("vi", &["a b c", "a b d", "a b c"]);
    let (codes, out) = vnbpe::learn(&corpus, &LearnOptions::default()).unwrap();
    assert_eq!(rules_of(&codes), vec![("a".into(), "b".into(), 3), ("b".into(), "c".into(), 2)]);
    assert_eq!(out.to_strings(), ["a_b c", "a_b d", "a_b c"]);
}

#[test]
fn separator_flag_blocks_custom_token() {
    let corpus = MonoCorpus::from_lines("vi", &["x <sep> y", "x <sep> y"]);
    let plain = vnbpe::learn(&corpus, &LearnOptions::default()).unwrap().0;
    assert!(plain.rules.iter().any(|r| r.left.as_str() == "<sep>" || r.right.as_str() == "<sep>"));
    let opts = LearnOptions {
        policy: vnbpe::ExclusionPolicy::default().with_separator("<sep>"),
        ..LearnOptions::default()
    };
    assert!(vnbpe::learn(&corpus, &opts).unwrap().0.is_empty());
}
