//! Opt-in text normalization for raw corpus lines.
//!
//! A line goes through three steps, in this order:
//!
//! 1. character substitution, per the table below;
//! 2. Unicode canonical composition (NFC);
//! 3. every run of Unicode whitespace becomes one ASCII space, and leading
//!    and trailing whitespace is removed.
//!
//! Substitution table (the complete list):
//!
//! | input | output |
//! |-------|--------|
//! | U+2018 U+2019 U+201A U+201B (single curly quotes) | `'` |
//! | U+201C U+201D U+201E U+201F (double curly quotes) | `"` |
//! | U+2010 U+2011 U+2012 U+2013 U+2014 U+2015 U+2212 (hyphens, dashes, minus) | `-` |
//! | U+FF10 to U+FF19 (fullwidth digits) | `0` to `9` |
//! | U+2026 (horizontal ellipsis) | `...` |
//! | U+200B U+FEFF (zero-width space, byte-order mark) | removed |
//!
//! The result is a fixed point: `normalize_line(normalize_line(s)) == normalize_line(s)`.

use unicode_normalization::UnicodeNormalization;

use crate::corpus::{parse_line, MonoCorpus};

fn substitute(c: char, out: &mut String) {
    match c {
        '\u{2018}' | '\u{2019}' | '\u{201A}' | '\u{201B}' => out.push('\''),
        '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{201F}' => out.push('"'),
        '\u{2010}'..='\u{2015}' | '\u{2212}' => out.push('-'),
        '\u{FF10}'..='\u{FF19}' => {
            out.push(char::from(b'0' + (c as u32 - 0xFF10) as u8));
        }
        '\u{2026}' => out.push_str("..."),
        '\u{200B}' | '\u{FEFF}' => {}
        _ => out.push(c),
    }
}

pub fn normalize_line(raw: &str) -> String {
    let mut substituted = String::with_capacity(raw.len());
    for c in raw.chars() {
        substitute(c, &mut substituted);
    }
    let composed: String = substituted.nfc().collect();
    composed.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn normalize(corpus: &MonoCorpus) -> MonoCorpus {
    MonoCorpus::new(
        corpus.lang.clone(),
        corpus
            .lines
            .iter()
            .map(|s| parse_line(&normalize_line(&s.to_string())))
            .collect(),
    )
}
