//! Argument parsing and dispatch for the `subseg` binary.
//!
//! Every command reads and writes whole files; `-` means standard
//! input/output. Reports go to standard output as `key=value` lines. On
//! failure the binary prints a single `code=<kind> msg=<message>` line to
//! standard error and exits with status 1.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::attncheck;
use crate::augment::{self, DedupKey, SubsampleSpec, TagTemplate};
use crate::bpe::{self, BpeCodes};
use crate::corpus::{self, MonoCorpus, ParallelCorpus};
use crate::error::{Error, Result};
use crate::normalize;
use crate::stats;
use crate::vnbpe::{self, CountMode, ExclusionPolicy, LearnOptions, Threshold, VnCodes};

#[derive(Debug, Parser)]
#[command(name = "subseg", version, about = "Subword segmentation and corpus augmentation for MT preprocessing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DedupArg {
    Pair,
    Source,
    Target,
}

impl From<DedupArg> for DedupKey {
    fn from(v: DedupArg) -> Self {
        match v {
            DedupArg::Pair => DedupKey::Pair,
            DedupArg::Source => DedupKey::Source,
            DedupArg::Target => DedupKey::Target,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize quotes, dashes, fullwidth digits and whitespace; compose to NFC.
    Normalize {
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long, default_value = "-")]
        output: PathBuf,
    },
    /// Print corpus statistics (parallel when --tgt is given).
    Stats {
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        tgt: Option<PathBuf>,
        /// Emit one JSON object instead of key=value lines.
        #[arg(long)]
        json: bool,
    },
    /// Learn syllable merges and write the codes file.
    VnbpeLearn {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        codes: PathBuf,
        #[arg(long, default_value_t = 2)]
        min_freq: u64,
        /// Keep pairs with count > min-freq instead of >=.
        #[arg(long)]
        strict_gt: bool,
        /// Count non-overlapping pairs instead of every adjacency.
        #[arg(long)]
        nonoverlap_count: bool,
        /// Additional separator tokens that never merge (repeatable).
        #[arg(long = "separator")]
        separators: Vec<String>,
        /// Also write the rewritten corpus here.
        #[arg(long)]
        apply_out: Option<PathBuf>,
    },
    /// Replay syllable merges on a corpus.
    VnbpeApply {
        #[arg(long)]
        codes: PathBuf,
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long, default_value = "-")]
        output: PathBuf,
    },
    /// Undo syllable merges.
    VnbpeUnapply {
        #[arg(long)]
        codes: PathBuf,
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long, default_value = "-")]
        output: PathBuf,
    },
    /// Learn character-level BPE merges.
    BpeLearn {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        codes: PathBuf,
        #[arg(long)]
        merges: usize,
    },
    /// Segment a corpus with learned BPE merges.
    BpeApply {
        #[arg(long)]
        codes: PathBuf,
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long, default_value = "-")]
        output: PathBuf,
        #[arg(long, default_value = bpe::DEFAULT_JOINER)]
        joiner: String,
    },
    /// Join BPE pieces back into words.
    BpeDeseg {
        #[arg(long, default_value = "-")]
        input: PathBuf,
        #[arg(long, default_value = "-")]
        output: PathBuf,
        #[arg(long, default_value = bpe::DEFAULT_JOINER)]
        joiner: String,
    },
    /// Pair external translations with the monolingual text they translate.
    Backtrans {
        /// Target-language monolingual text.
        #[arg(long)]
        mono: PathBuf,
        /// Its line-by-line translation into the source language.
        #[arg(long)]
        trans: PathBuf,
        #[arg(long)]
        src_out: PathBuf,
        #[arg(long)]
        tgt_out: PathBuf,
    },
    /// Concatenate original and synthetic parallel data, optionally shuffled.
    Mix {
        #[arg(long)]
        orig_src: PathBuf,
        #[arg(long)]
        orig_tgt: PathBuf,
        #[arg(long)]
        syn_src: PathBuf,
        #[arg(long)]
        syn_tgt: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        src_out: PathBuf,
        #[arg(long)]
        tgt_out: PathBuf,
    },
    /// Build tagged original + identity pairs.
    Mixsource {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        /// Target-language monolingual text for identity pairs.
        #[arg(long)]
        mono: PathBuf,
        #[arg(long, default_value = augment::DEFAULT_TAG_TEMPLATE)]
        template: String,
        #[arg(long)]
        src_lang: String,
        #[arg(long)]
        tgt_lang: String,
        #[arg(long)]
        src_out: PathBuf,
        #[arg(long)]
        tgt_out: PathBuf,
        /// BPE joiner the rendered tags must not overlap.
        #[arg(long, default_value = bpe::DEFAULT_JOINER)]
        joiner: String,
    },
    /// Remove blank and duplicate pairs.
    Clean {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        #[arg(long)]
        src_out: PathBuf,
        #[arg(long)]
        tgt_out: PathBuf,
        #[arg(long, value_enum, default_value = "pair")]
        dedup: DedupArg,
    },
    /// Seeded shuffle and take the first k lines (or pairs, with --tgt-input).
    Subsample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "-")]
        output: PathBuf,
        #[arg(long, requires = "tgt_output")]
        tgt_input: Option<PathBuf>,
        #[arg(long, requires = "tgt_input")]
        tgt_output: Option<PathBuf>,
    },
    /// Check the attention forward-pass invariants on a seeded instance.
    Attncheck {
        #[arg(long)]
        seed: u64,
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        dim: usize,
    },
}

fn mono(path: &Path) -> Result<MonoCorpus> {
    corpus::read_mono(path, "")
}

/// Runs one command. Returns `Ok(false)` when the command completed but
/// reported a failed check.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<bool> {
    let stdout_err = |e| Error::io("-", e);
    match cli.command {
        Command::Normalize { input, output } => {
            let lines: Vec<String> = corpus::read_raw_lines(&input)?
                .iter()
                .map(|l| normalize::normalize_line(l))
                .collect();
            corpus::write_raw_lines(&output, &lines)?;
        }
        Command::Stats { input, tgt, json } => {
            let report = match tgt {
                Some(tgt) => stats::parallel_stats(&corpus::read_parallel(&input, &tgt, "src", "tgt")?),
                None => stats::mono_stats(&mono(&input)?),
            };
            if json {
                writeln!(out, "{}", report.to_json()).map_err(stdout_err)?;
            } else {
                write!(out, "{}", report.to_key_values()).map_err(stdout_err)?;
            }
        }
        Command::VnbpeLearn {
            input,
            codes,
            min_freq,
            strict_gt,
            nonoverlap_count,
            separators,
            apply_out,
        } => {
            let mut policy = ExclusionPolicy::default();
            policy.separator_symbols.extend(separators);
            let opts = LearnOptions {
                min_freq,
                threshold: if strict_gt { Threshold::Strict } else { Threshold::Inclusive },
                count_mode: if nonoverlap_count { CountMode::NonOverlapping } else { CountMode::SlidingWindow },
                policy,
            };
            let corpus = mono(&input)?;
            let (learned, rewritten) = vnbpe::learn(&corpus, &opts)?;
            learned.write(&codes)?;
            if let Some(path) = apply_out {
                corpus::write_mono(&path, &rewritten)?;
            }
        }
        Command::VnbpeApply { codes, input, output } => {
            let codes = VnCodes::read(&codes)?;
            corpus::write_mono(&output, &vnbpe::apply(&mono(&input)?, &codes))?;
        }
        Command::VnbpeUnapply { codes, input, output } => {
            let codes = VnCodes::read(&codes)?;
            corpus::write_mono(&output, &vnbpe::unapply(&mono(&input)?, &codes))?;
        }
        Command::BpeLearn { input, codes, merges } => {
            let corpus = mono(&input)?;
            bpe::learn_bpe(&bpe::word_frequencies(&corpus), merges).write(&codes)?;
        }
        Command::BpeApply {
            codes,
            input,
            output,
            joiner,
        } => {
            check_joiner(&joiner)?;
            let codes = BpeCodes::read(&codes)?;
            corpus::write_mono(&output, &bpe::segment_corpus(&mono(&input)?, &codes, &joiner))?;
        }
        Command::BpeDeseg { input, output, joiner } => {
            check_joiner(&joiner)?;
            corpus::write_mono(&output, &bpe::desegment(&mono(&input)?, &joiner))?;
        }
        Command::Backtrans {
            mono: mono_path,
            trans,
            src_out,
            tgt_out,
        } => {
            let synthetic = augment::assemble_backtranslation(mono(&mono_path)?, mono(&trans)?)?;
            corpus::write_parallel(&src_out, &tgt_out, &synthetic)?;
        }
        Command::Mix {
            orig_src,
            orig_tgt,
            syn_src,
            syn_tgt,
            seed,
            src_out,
            tgt_out,
        } => {
            let original = corpus::read_parallel(&orig_src, &orig_tgt, "src", "tgt")?;
            let synthetic = corpus::read_parallel(&syn_src, &syn_tgt, "src", "tgt")?;
            let mixed = augment::mix_corpora(original, synthetic, seed)?;
            corpus::write_parallel(&src_out, &tgt_out, &mixed)?;
        }
        Command::Mixsource {
            src,
            tgt,
            mono: mono_path,
            template,
            src_lang,
            tgt_lang,
            src_out,
            tgt_out,
            joiner,
        } => {
            let original: ParallelCorpus = corpus::read_parallel(&src, &tgt, &src_lang, &tgt_lang)?;
            let target_mono = corpus::read_mono(&mono_path, &tgt_lang)?;
            let template = TagTemplate::new(template)?;
            let mixed = augment::make_mix_source(&original, &target_mono, &template, &joiner)?;
            corpus::write_parallel(&src_out, &tgt_out, &mixed)?;
        }
        Command::Clean {
            src,
            tgt,
            src_out,
            tgt_out,
            dedup,
        } => {
            let corpus = corpus::read_parallel(&src, &tgt, "src", "tgt")?;
            let (cleaned, report) = augment::clean(&corpus, dedup.into());
            corpus::write_parallel(&src_out, &tgt_out, &cleaned)?;
            write!(out, "{}", report.to_key_values()).map_err(stdout_err)?;
        }
        Command::Subsample {
            input,
            k,
            seed,
            output,
            tgt_input,
            tgt_output,
        } => {
            let spec = SubsampleSpec::new(k, seed)?;
            match (tgt_input, tgt_output) {
                (Some(tgt_in), Some(tgt_out)) => {
                    let corpus = corpus::read_parallel(&input, &tgt_in, "src", "tgt")?;
                    corpus::write_parallel(&output, &tgt_out, &augment::subsample_parallel(&corpus, spec)?)?;
                }
                _ => {
                    // raw lines, so blank lines survive untouched
                    let lines = corpus::read_raw_lines(&input)?;
                    corpus::write_raw_lines(&output, &augment::subsample(&lines, spec)?)?;
                }
            }
        }
        Command::Attncheck { seed, n, dim } => {
            if n == 0 || dim == 0 {
                return Err(Error::Config("--n and --dim must be positive".into()));
            }
            let report = attncheck::run_suite(seed, n, dim)?;
            write!(out, "{}", report.to_key_values()).map_err(stdout_err)?;
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn check_joiner(joiner: &str) -> Result<()> {
    if joiner.is_empty() || joiner.chars().any(char::is_whitespace) {
        return Err(Error::Config(format!("joiner {joiner:?} must be non-empty without whitespace")));
    }
    Ok(())
}

/// `SUBSEG_THREADS`: 0 or unset means one worker per core.
pub fn thread_count_from_env() -> Result<usize> {
    match std::env::var("SUBSEG_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("SUBSEG_THREADS={v:?} is not a non-negative integer"))),
        Err(_) => Ok(0),
    }
}

/// Formats an error as the single machine-parseable line printed on failure.
pub fn error_line(err: &Error) -> String {
    let msg = err.to_string().replace(['\n', '\r'], " ");
    format!("code={} msg={msg}", err.code())
}
