//! Pattern-based pretokenization. Merges never cross the spans produced here.

use std::fs;
use std::ops::Range;
use std::path::Path;

use fancy_regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Words with an optional leading space, digit runs, punctuation runs and
/// whitespace, as used by GPT-2 style byte-level tokenizers.
pub const GPT2_PATTERN: &str =
    r"'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+";

/// Llama-3 style pattern: digits are chunked left-greedily into runs of 1-3.
pub const LLAMA3_PATTERN: &str = concat!(
    r"(?i:'s|'t|'re|'ve|'m|'ll|'d)|[^\r\n\p{L}\p{N}]?\p{L}+|\p{N}{1,3}",
    r"| ?[^\s\p{L}\p{N}]+[\r\n]*|\s*[\r\n]+|\s+(?!\S)|\s+"
);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    #[default]
    Gpt2,
    Llama3,
}

impl Preset {
    pub fn pattern(self) -> &'static str {
        match self {
            Preset::Gpt2 => GPT2_PATTERN,
            Preset::Llama3 => LLAMA3_PATTERN,
        }
    }
}

/// Declarative pretokenizer configuration, loadable from a small JSON file:
///
/// ```json
/// { "preset": "gpt2", "max_digit_run": 3 }
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PretokConfig {
    #[serde(default)]
    pub preset: Preset,
    /// Custom pattern; overrides `preset` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    /// Chunk every digit span left-greedily into runs of at most this many
    /// digits, splitting off any non-digit prefix first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_digit_run: Option<usize>,
    /// Force byte-level (`true`) or plain (`false`) vocabulary files;
    /// detected from `vocab.json` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub byte_level: Option<bool>,
}

impl PretokConfig {
    pub fn from_json_str(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Malformed {
            what: "pretokenizer config",
            detail: e.to_string(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PretokConfig::from_json_str(&text)
    }

    pub fn pattern(&self) -> &str {
        self.pattern
            .as_deref()
            .unwrap_or_else(|| self.preset.pattern())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanKind {
    Word,
    Whitespace,
    Digits,
    Punctuation,
    Other,
}

impl SpanKind {
    fn classify(s: &str) -> SpanKind {
        if s.chars().all(char::is_whitespace) {
            return SpanKind::Whitespace;
        }
        if s.chars().any(char::is_alphabetic) {
            return SpanKind::Word;
        }
        let mut visible = s.chars().filter(|c| !c.is_whitespace());
        if s.chars().any(char::is_numeric) {
            if visible.all(char::is_numeric) {
                SpanKind::Digits
            } else {
                SpanKind::Other
            }
        } else if visible.all(|c| !c.is_alphanumeric()) {
            SpanKind::Punctuation
        } else {
            SpanKind::Other
        }
    }
}

/// Half-open byte range of one pretoken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PretokenSpan {
    pub start: usize,
    pub end: usize,
    pub kind: SpanKind,
}

impl PretokenSpan {
    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        &source[self.range()]
    }
}

#[derive(Debug, Clone)]
pub struct Pretokenizer {
    regex: Regex,
    max_digit_run: Option<usize>,
}

impl Pretokenizer {
    pub fn new(config: &PretokConfig) -> Result<Self> {
        if config.max_digit_run == Some(0) {
            return Err(Error::invalid("max_digit_run must be at least 1"));
        }
        let regex = Regex::new(config.pattern()).map_err(|e| Error::Pattern(e.to_string()))?;
        Ok(Pretokenizer {
            regex,
            max_digit_run: config.max_digit_run,
        })
    }

    /// Split `text` into spans that partition it. Bytes the pattern does not
    /// match become `Other` spans.
    pub fn pretokenize(&self, text: &str) -> Vec<PretokenSpan> {
        let mut spans = Vec::new();
        let mut cursor = 0;
        for found in self.regex.find_iter(text) {
            let Ok(m) = found else {
                // backtrack limit exceeded; keep the partition total
                break;
            };
            if m.start() == m.end() {
                continue;
            }
            if m.start() > cursor {
                self.push(text, cursor, m.start(), &mut spans);
            }
            self.push(text, m.start(), m.end(), &mut spans);
            cursor = m.end();
        }
        if cursor < text.len() {
            self.push(text, cursor, text.len(), &mut spans);
        }
        spans
    }

    fn push(&self, text: &str, start: usize, end: usize, spans: &mut Vec<PretokenSpan>) {
        let piece = &text[start..end];
        let kind = SpanKind::classify(piece);
        match self.max_digit_run {
            Some(run) if kind == SpanKind::Digits => {
                let digits_at = piece.find(char::is_numeric).unwrap_or(0);
                if digits_at > 0 {
                    let prefix = &piece[..digits_at];
                    spans.push(PretokenSpan {
                        start,
                        end: start + digits_at,
                        kind: SpanKind::classify(prefix),
                    });
                }
                let mut chunk_start = start + digits_at;
                let mut count = 0;
                for (offset, c) in piece[digits_at..].char_indices() {
                    if count == run {
                        let at = start + digits_at + offset;
                        spans.push(PretokenSpan {
                            start: chunk_start,
                            end: at,
                            kind: SpanKind::classify(&text[chunk_start..at]),
                        });
                        chunk_start = at;
                        count = 0;
                    }
                    debug_assert!(c.is_numeric() || c.is_whitespace());
                    count += 1;
                }
                spans.push(PretokenSpan {
                    start: chunk_start,
                    end,
                    kind: SpanKind::classify(&text[chunk_start..end]),
                });
            }
            _ => spans.push(PretokenSpan { start, end, kind }),
        }
    }
}
