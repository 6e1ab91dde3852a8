//! Subword segmentation and parallel-corpus augmentation for low-resource
//! machine-translation preprocessing.
//!
//! * [`vnbpe`]: syllable-level merges joined with `_`, for languages that
//!   put spaces between syllables;
//! * [`bpe`]: character-level byte-pair encoding of pre-tokenized words;
//! * [`augment`]: back-translation assembly, corpus mixing, mix-source
//!   tagging, cleaning and seeded subsampling;
//! * [`attncheck`]: a numerically checkable attention encoder-decoder forward pass;
//! * [`normalize`] and [`stats`]: line normalization and corpus statistics.
//!
//! The `subseg` binary exposes all of these as subcommands (see [`cli`]).

pub mod attncheck;
pub mod augment;
pub mod bpe;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod normalize;
pub mod rng;
pub mod stats;
pub mod vnbpe;

pub use corpus::{parse_line, MonoCorpus, ParallelCorpus, Sentence, Token};
pub use error::{Error, Result};
