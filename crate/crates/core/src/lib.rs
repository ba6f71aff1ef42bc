//! Canonical and non-canonical tokenizations for byte-level BPE tokenizers.
//!
//! Given a vocabulary and ranked merges, the crate produces the canonical BPE
//! encoding of a text plus several alternatives that decode to the same bytes:
//! uniformly random refinements of each canonical token, character-level
//! tokens, BPE-dropout, and right-aligned digit grouping. It also counts and
//! enumerates segmentations exactly, and ships the task generators, graders,
//! generation-quality metrics and SFT data formatters used to study how
//! models cope with those alternatives.

pub mod error;
pub mod metrics;
pub mod pretokenize;
pub mod rng;
pub mod schemes;
pub mod segment;
pub mod sft;
pub mod stats;
pub mod tasks;
pub mod tokenizer;
pub mod vocab;

#[doc(hidden)]
pub mod testing;

pub use error::{Error, Result};
pub use metrics::{
    grammaticality_score, retention, spelling_score, GrammarProvider, MetricReport, WordList,
};
pub use pretokenize::{Preset, PretokConfig, PretokenSpan, SpanKind};
pub use schemes::{
    apply_scheme, bucket_by_ratio, char_tokenize, digits_right_encode, dropout_encode,
    length_ratio, GranularityRecord, Histogram, Ratio, Scheme, SchemeConfig, SchemeOutput,
    SchemeRunner,
};
pub use segment::{
    count_segmentations, enumerate_segmentations, random_tokenize_text, sample_segmentation,
    Segmentation, SegmentationCount, SegmentationTable, Segmenter,
};
pub use sft::{format_sft, SftMode, SftRecord};
pub use tasks::{Gold, TaskExample, TaskKind};
pub use tokenizer::{TokenSequence, Tokenizer};
pub use vocab::{ByteAlphabet, MergeRules, TokenId, Vocabulary};
