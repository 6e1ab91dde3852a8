//! Core corpus types and line-oriented UTF-8 I/O.
//!
//! A corpus file holds one sentence per line. Reading accepts LF and CRLF
//! terminators; writing always emits LF and joins tokens with a single ASCII
//! space, so `parse_line(&s.to_string()) == s` for every sentence.
//!
//! The path `-` stands for standard input (when reading) or standard output
//! (when writing).

use std::borrow::Borrow;
use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::ops::Deref;
use std::path::Path;

use crate::error::{Error, Result};

/// A non-empty, whitespace-free unit of text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(String);

impl Token {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(text));
        }
        Ok(Token(text))
    }

    /// Caller guarantees the token invariants.
    pub(crate) fn from_string_unchecked(text: String) -> Self {
        debug_assert!(!text.is_empty() && !text.chars().any(char::is_whitespace));
        Token(text)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl Deref for Token {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Token {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<&str> for Token {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        Token::new(value)
    }
}

/// An ordered list of tokens; the unit of every corpus operation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.tokens.iter()
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tok) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(tok)?;
        }
        Ok(())
    }
}

/// Splits on runs of Unicode whitespace, dropping empties.
pub fn parse_line(raw: &str) -> Sentence {
    Sentence {
        tokens: raw
            .split(char::is_whitespace)
            .filter(|t| !t.is_empty())
            .map(|t| Token::from_string_unchecked(t.to_owned()))
            .collect(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MonoCorpus {
    pub lang: String,
    pub lines: Vec<Sentence>,
}

impl MonoCorpus {
    pub fn new(lang: impl Into<String>, lines: Vec<Sentence>) -> Self {
        MonoCorpus {
            lang: lang.into(),
            lines,
        }
    }

    /// Parses each string as one line. Handy for tests and small fixtures.
    pub fn from_lines<S: AsRef<str>>(lang: impl Into<String>, lines: &[S]) -> Self {
        MonoCorpus::new(lang, lines.iter().map(|l| parse_line(l.as_ref())).collect())
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.lines.iter().map(Sentence::to_string).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub src_lang: String,
    pub tgt_lang: String,
    pub pairs: Vec<(Sentence, Sentence)>,
}

impl ParallelCorpus {
    pub fn new(
        src_lang: impl Into<String>,
        tgt_lang: impl Into<String>,
        pairs: Vec<(Sentence, Sentence)>,
    ) -> Self {
        ParallelCorpus {
            src_lang: src_lang.into(),
            tgt_lang: tgt_lang.into(),
            pairs,
        }
    }

    /// Zips two aligned monolingual corpora.
    pub fn from_sides(src: MonoCorpus, tgt: MonoCorpus) -> Result<Self> {
        if src.len() != tgt.len() {
            return Err(Error::Alignment {
                left_name: format!("source ({})", src.lang),
                left: src.len(),
                right_name: format!("target ({})", tgt.lang),
                right: tgt.len(),
            });
        }
        Ok(ParallelCorpus {
            src_lang: src.lang,
            tgt_lang: tgt.lang,
            pairs: src.lines.into_iter().zip(tgt.lines).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn into_sides(self) -> (MonoCorpus, MonoCorpus) {
        let (src, tgt) = self.pairs.into_iter().unzip();
        (
            MonoCorpus::new(self.src_lang, src),
            MonoCorpus::new(self.tgt_lang, tgt),
        )
    }

    pub fn source_side(&self) -> MonoCorpus {
        MonoCorpus::new(
            self.src_lang.clone(),
            self.pairs.iter().map(|(s, _)| s.clone()).collect(),
        )
    }

    pub fn target_side(&self) -> MonoCorpus {
        MonoCorpus::new(
            self.tgt_lang.clone(),
            self.pairs.iter().map(|(_, t)| t.clone()).collect(),
        )
    }
}

/// Splits raw bytes into decoded lines. A trailing terminator does not start
/// a new line; a lone `\r` before `\n` is dropped.
pub fn decode_lines(bytes: &[u8], source_name: &str) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    let mut start = 0;
    while start < bytes.len() {
        let end = bytes[start..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(bytes.len(), |p| start + p);
        let mut line = &bytes[start..end];
        if let Some(stripped) = line.strip_suffix(b"\r") {
            line = stripped;
        }
        match std::str::from_utf8(line) {
            Ok(s) => lines.push(s.to_owned()),
            Err(e) => {
                return Err(Error::Decode {
                    source_name: source_name.to_owned(),
                    offset: start + e.valid_up_to(),
                })
            }
        }
        start = end + 1;
    }
    Ok(lines)
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin()
            .lock()
            .read_to_end(&mut buf)
            .map_err(|e| Error::io(path, e))?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| Error::io(path, e))
    }
}

/// Reads the raw (unparsed) lines of a file.
pub fn read_raw_lines(path: &Path) -> Result<Vec<String>> {
    let bytes = read_bytes(path)?;
    decode_lines(&bytes, &path.display().to_string())
}

pub fn read_mono(path: &Path, lang: &str) -> Result<MonoCorpus> {
    let lines = read_raw_lines(path)?;
    Ok(MonoCorpus::new(
        lang,
        lines.iter().map(|l| parse_line(l)).collect(),
    ))
}

pub fn read_parallel(
    src_path: &Path,
    tgt_path: &Path,
    src_lang: &str,
    tgt_lang: &str,
) -> Result<ParallelCorpus> {
    let src = read_mono(src_path, src_lang)?;
    let tgt = read_mono(tgt_path, tgt_lang)?;
    if src.len() != tgt.len() {
        return Err(Error::Alignment {
            left_name: src_path.display().to_string(),
            left: src.len(),
            right_name: tgt_path.display().to_string(),
            right: tgt.len(),
        });
    }
    ParallelCorpus::from_sides(src, tgt)
}

/// Writes one string per line, LF-terminated.
pub fn write_raw_lines<S: AsRef<str>>(path: &Path, lines: &[S]) -> Result<()> {
    let write_all = |w: &mut dyn Write| -> io::Result<()> {
        let mut w = BufWriter::new(w);
        for line in lines {
            w.write_all(line.as_ref().as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    if path.as_os_str() == "-" {
        write_all(&mut io::stdout().lock())
    } else {
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        write_all(&mut file)
    }
    .map_err(|e| Error::io(path, e))
}

pub fn write_mono(path: &Path, corpus: &MonoCorpus) -> Result<()> {
    write_raw_lines(path, &corpus.to_strings())
}

pub fn write_parallel(src_path: &Path, tgt_path: &Path, corpus: &ParallelCorpus) -> Result<()> {
    let (src, tgt): (Vec<String>, Vec<String>) = corpus
        .pairs
        .iter()
        .map(|(s, t)| (s.to_string(), t.to_string()))
        .unzip();
    write_raw_lines(src_path, &src)?;
    write_raw_lines(tgt_path, &tgt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &Sentence) -> Vec<&str> {
        s.iter().map(Token::as_str).collect()
    }

    #[test]
    fn parse_splits_on_whitespace_runs() {
        assert_eq!(toks(&parse_line("a  b ")), ["a", "b"]);
        assert!(parse_line("").is_empty());
        assert!(parse_line(" \t ").is_empty());
        assert_eq!(toks(&parse_line("sẽ kết thúc")), ["sẽ", "kết", "thúc"]);
        assert_eq!(toks(&parse_line("a\u{00A0}b\u{3000}c")), ["a", "b", "c"]);
    }

    #[test]
    fn token_rejects_empty_and_whitespace() {
        assert!(Token::new("").is_err());
        assert!(Token::new("a b").is_err());
        assert!(Token::new("a\u{2003}").is_err());
        assert_eq!(Token::new("kết").unwrap().as_str(), "kết");
    }

    #[test]
    fn decode_handles_crlf_and_trailing_newline() {
        assert_eq!(decode_lines(b"a b\r\nc\n", "x").unwrap(), ["a b", "c"]);
        assert_eq!(decode_lines(b"a\nb", "x").unwrap(), ["a", "b"]);
        assert_eq!(decode_lines(b"\n", "x").unwrap(), [""]);
        assert!(decode_lines(b"", "x").unwrap().is_empty());
    }

    #[test]
    fn decode_error_reports_byte_offset() {
        let err = decode_lines(b"ok\nab\xffc\n", "f.txt").unwrap_err();
        match err {
            Error::Decode { offset, .. } => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn from_sides_rejects_mismatch() {
        let a = MonoCorpus::from_lines("ja", &["a", "b", "c"]);
        let b = MonoCorpus::from_lines("vi", &["a", "b", "c", "d"]);
        match ParallelCorpus::from_sides(a, b).unwrap_err() {
            Error::Alignment { left, right, .. } => assert_eq!((left, right), (3, 4)),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn token_strategy() -> impl Strategy<Value = String> {
        "[a-zạếữ_@.,0-9\u{3042}-\u{3093}]{1,6}"
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(words in proptest::collection::vec(token_strategy(), 0..10)) {
            let s = Sentence::new(words.into_iter().map(|w| Token::new(w).unwrap()).collect());
            prop_assert_eq!(parse_line(&s.to_string()), s);
        }
    }
}
