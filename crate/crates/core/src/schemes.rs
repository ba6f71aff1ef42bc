//! Alternative tokenization schemes and granularity statistics.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::segment::Segmenter;
use crate::tokenizer::{TokenSequence, Tokenizer};
use crate::vocab::TokenId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Canonical,
    Random,
    Char,
    Dropout,
    #[serde(alias = "digits_right")]
    DigitsRight,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Canonical,
        Scheme::Random,
        Scheme::Char,
        Scheme::Dropout,
        Scheme::DigitsRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Canonical => "canonical",
            Scheme::Random => "random",
            Scheme::Char => "char",
            Scheme::Dropout => "dropout",
            Scheme::DigitsRight => "digits-right",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Scheme::Random | Scheme::Dropout)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Scheme::Canonical),
            "random" => Ok(Scheme::Random),
            "char" => Ok(Scheme::Char),
            "dropout" => Ok(Scheme::Dropout),
            "digits-right" | "digits_right" => Ok(Scheme::DigitsRight),
            other => Err(Error::invalid(format!("unknown scheme {other:?}"))),
        }
    }
}

pub const DEFAULT_DIGIT_GROUP: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    /// Merge drop probability; dropout only.
    #[serde(default)]
    pub p: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_group")]
    pub digit_group_size: usize,
    /// Char scheme: always emit byte tokens, even when a character is a unit.
    #[serde(default, skip_serializing_if = "is_false")]
    pub force_bytes: bool,
    /// Random scheme: leave each token's single-unit segmentation out of the
    /// sampled support.
    #[serde(default, skip_serializing_if = "is_false")]
    pub exclude_identity: bool,
}

fn default_group() -> usize {
    DEFAULT_DIGIT_GROUP
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl SchemeConfig {
    pub fn new(scheme: Scheme) -> Self {
        SchemeConfig {
            scheme,
            p: 0.0,
            seed: 0,
            digit_group_size: DEFAULT_DIGIT_GROUP,
            force_bytes: false,
            exclude_identity: false,
        }
    }

    pub fn dropout(p: f64) -> Self {
        SchemeConfig {
            p,
            ..SchemeConfig::new(Scheme::Dropout)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(format!(
                "dropout probability {} outside [0, 1]",
                self.p
            )));
        }
        if self.digit_group_size == 0 {
            return Err(Error::invalid("digit group size must be at least 1"));
        }
        Ok(())
    }
}

/// Split `text` into characters; each character becomes its own unit when
/// the vocabulary has it, else its byte tokens.
pub fn char_tokenize(tok: &Tokenizer, text: &str) -> Result<TokenSequence> {
    char_tokenize_with(tok, text, false)
}

pub fn char_tokenize_with(tok: &Tokenizer, text: &str, force_bytes: bool) -> Result<TokenSequence> {
    let vocab = tok.vocab();
    let mut seq = TokenSequence::new();
    let mut buf = [0u8; 4];
    for c in text.chars() {
        let bytes = c.encode_utf8(&mut buf).as_bytes();
        match vocab.id(bytes) {
            Some(id) if !force_bytes || bytes.len() == 1 => seq.push(id, bytes.to_vec()),
            _ => {
                for &b in bytes {
                    let id = vocab
                        .id(&[b])
                        .ok_or_else(|| Error::Uncoverable(c.to_string()))?;
                    seq.push(id, vec![b]);
                }
            }
        }
    }
    Ok(seq)
}

/// BPE-dropout: the canonical merge procedure where every candidate merge is
/// skipped with probability `p` at each step.
pub fn dropout_encode<R: Rng + ?Sized>(
    tok: &Tokenizer,
    text: &str,
    p: f64,
    rng: &mut R,
) -> Result<TokenSequence> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "dropout probability {p} outside [0, 1]"
        )));
    }
    let mut seq = TokenSequence::new();
    for span in tok.pretokenize(text) {
        let ids = tok.bpe(span.text(text), || p > 0.0 && rng.gen_bool(p))?;
        tok.append_ids(&mut seq, &ids);
    }
    Ok(seq)
}

/// Canonical encoding, except that every maximal run of ASCII digits is cut
/// into groups of three counted from the right.
pub fn digits_right_encode(tok: &Tokenizer, text: &str) -> Result<TokenSequence> {
    digits_right_encode_with(tok, text, DEFAULT_DIGIT_GROUP)
}

pub fn digits_right_encode_with(
    tok: &Tokenizer,
    text: &str,
    group: usize,
) -> Result<TokenSequence> {
    if group == 0 {
        return Err(Error::invalid("digit group size must be at least 1"));
    }
    let mut seq = TokenSequence::new();
    // digit runs may cross pretoken boundaries (e.g. left-chunked digits)
    let mut run: Option<(usize, usize)> = None;
    for span in tok.pretokenize(text) {
        let mut cursor = span.start;
        while cursor < span.end {
            let is_digit = text.as_bytes()[cursor].is_ascii_digit();
            let len = text.as_bytes()[cursor..span.end]
                .iter()
                .take_while(|b| b.is_ascii_digit() == is_digit)
                .count();
            let end = cursor + len;
            if is_digit {
                run = match run {
                    Some((start, prev_end)) if prev_end == cursor => Some((start, end)),
                    Some((start, prev_end)) => {
                        push_digit_run(tok, &text[start..prev_end], group, &mut seq)?;
                        Some((cursor, end))
                    }
                    None => Some((cursor, end)),
                };
            } else {
                if let Some((start, prev_end)) = run.take() {
                    push_digit_run(tok, &text[start..prev_end], group, &mut seq)?;
                }
                let ids = tok.encode_piece(&text[cursor..end])?;
                tok.append_ids(&mut seq, &ids);
            }
            cursor = end;
        }
    }
    if let Some((start, end)) = run {
        push_digit_run(tok, &text[start..end], group, &mut seq)?;
    }
    Ok(seq)
}

/// Sizes of right-aligned groups for a run of `len` digits: the first group
/// takes the remainder, every later group is exactly `group` long.
pub fn digit_group_sizes(len: usize, group: usize) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    let first = (len - 1) % group + 1;
    std::iter::once(first)
        .chain(std::iter::repeat_n(group, (len - first) / group))
        .collect()
}

fn push_digit_run(
    tok: &Tokenizer,
    digits: &str,
    group: usize,
    seq: &mut TokenSequence,
) -> Result<()> {
    let vocab = tok.vocab();
    let mut at = 0;
    for size in digit_group_sizes(digits.len(), group) {
        let chunk = &digits.as_bytes()[at..at + size];
        match vocab.id(chunk) {
            Some(id) => seq.push(id, chunk.to_vec()),
            None => {
                for &d in chunk {
                    let id: TokenId = vocab
                        .id(&[d])
                        .ok_or_else(|| Error::Uncoverable(char::from(d).to_string()))?;
                    seq.push(id, vec![d]);
                }
            }
        }
        at += size;
    }
    Ok(())
}

/// Output of [`apply_scheme`]: the tokens plus the configuration that made
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutput {
    pub tokens: TokenSequence,
    pub provenance: SchemeConfig,
}

/// Dispatches to the scheme-specific encoders, reusing one segmentation
/// cache across calls.
pub struct SchemeRunner<'t> {
    tok: &'t Tokenizer,
    segmenter: Segmenter<'t>,
}

impl<'t> SchemeRunner<'t> {
    pub fn new(tok: &'t Tokenizer) -> Self {
        SchemeRunner {
            tok,
            segmenter: Segmenter::new(tok),
        }
    }

    pub fn tokenizer(&self) -> &'t Tokenizer {
        self.tok
    }

    /// Apply `cfg` with an explicit generator; `cfg.seed` is recorded but
    /// not used.
    pub fn apply_with_rng<R: Rng + ?Sized>(
        &self,
        text: &str,
        cfg: &SchemeConfig,
        rng: &mut R,
    ) -> Result<TokenSequence> {
        cfg.validate()?;
        match cfg.scheme {
            Scheme::Canonical => self.tok.encode_canonical(text),
            Scheme::Random if cfg.exclude_identity => Segmenter::with_capacity(self.tok, 1024)
                .exclude_identity(true)
                .random_tokenize(text, rng),
            Scheme::Random => self.segmenter.random_tokenize(text, rng),
            Scheme::Char => char_tokenize_with(self.tok, text, cfg.force_bytes),
            Scheme::Dropout => dropout_encode(self.tok, text, cfg.p, rng),
            Scheme::DigitsRight => digits_right_encode_with(self.tok, text, cfg.digit_group_size),
        }
    }

    /// Apply `cfg` with a generator seeded from `cfg.seed`.
    pub fn apply(&self, text: &str, cfg: &SchemeConfig) -> Result<SchemeOutput> {
        let mut rng = rng::seeded(cfg.seed);
        let tokens = self.apply_with_rng(text, cfg, &mut rng)?;
        Ok(SchemeOutput {
            tokens,
            provenance: cfg.clone(),
        })
    }
}

pub fn apply_scheme(tok: &Tokenizer, text: &str, cfg: &SchemeConfig) -> Result<SchemeOutput> {
    SchemeRunner::new(tok).apply(text, cfg)
}

/// Exact non-negative rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("ratio with zero denominator"));
        }
        let g = gcd(num, den);
        Ok(Ratio {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Parse a plain decimal such as `2`, `1.5` or `0.125` exactly.
    pub fn parse_decimal(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("not a non-negative decimal: {s:?}"));
        let s = s.trim();
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty()
            || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Ratio::new(num, den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Six decimal places.
impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.to_f64())
    }
}

/// How many times longer `alt` is than `canon`, in tokens.
pub fn length_ratio(alt: &TokenSequence, canon: &TokenSequence) -> Result<Ratio> {
    ratio_of_lengths(alt.len(), canon.len())
}

pub fn ratio_of_lengths(alt: usize, canon: usize) -> Result<Ratio> {
    if canon == 0 {
        return Err(Error::invalid(
            "length ratio of an empty canonical sequence",
        ));
    }
    Ratio::new(alt as u64, canon as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GranularityRecord {
    pub id: String,
    pub canonical_len: usize,
    pub alternative_len: usize,
}

impl GranularityRecord {
    pub fn ratio(&self) -> Result<Ratio> {
        ratio_of_lengths(self.alternative_len, self.canonical_len)
    }
}

/// One half-open bucket `[lower, upper)`; `None` bounds are unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub lower: Option<Ratio>,
    pub upper: Option<Ratio>,
    pub count: usize,
    pub mean_ratio: Option<f64>,
}

impl Bucket {
    pub fn contains(&self, r: Ratio) -> bool {
        self.lower.is_none_or(|l| r >= l) && self.upper.is_none_or(|u| r < u)
    }

    pub fn label(&self) -> String {
        let lower = self.lower.map_or("-inf".to_string(), |r| r.to_string());
        let upper = self.upper.map_or("inf".to_string(), |r| r.to_string());
        format!("[{lower}, {upper})")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Underflow bucket, one bucket per pair of adjacent edges, overflow bucket.
    pub buckets: Vec<Bucket>,
    pub total: usize,
}

impl Histogram {
    /// The bucket `[lower, upper)` with exactly these bounds.
    pub fn bucket(&self, lower: Ratio, upper: Ratio) -> Option<&Bucket> {
        self.buckets
            .iter()
            .find(|b| b.lower == Some(lower) && b.upper == Some(upper))
    }
}

/// Group records by length ratio into half-open buckets delimited by
/// strictly increasing `edges`.
pub fn bucket_by_ratio(records: &[GranularityRecord], edges: &[Ratio]) -> Result<Histogram> {
    let ratios = records
        .iter()
        .map(GranularityRecord::ratio)
        .collect::<Result<Vec<_>>>()?;
    bucket_ratios(&ratios, edges)
}

pub fn bucket_ratios(ratios: &[Ratio], edges: &[Ratio]) -> Result<Histogram> {
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("bucket edges must be strictly increasing"));
    }
    let mut bounds = vec![None];
    bounds.extend(edges.iter().copied().map(Some));
    bounds.push(None);
    let mut buckets: Vec<Bucket> = bounds
        .windows(2)
        .map(|w| Bucket {
            lower: w[0],
            upper: w[1],
            count: 0,
            mean_ratio: None,
        })
        .collect();
    let mut sums = vec![0.0; buckets.len()];
    for &r in ratios {
        let idx = edges.partition_point(|&e| e <= r);
        debug_assert!(buckets[idx].contains(r));
        buckets[idx].count += 1;
        sums[idx] += r.to_f64();
    }
    for (bucket, sum) in buckets.iter_mut().zip(sums) {
        if bucket.count > 0 {
            bucket.mean_ratio = Some(sum / bucket.count as f64);
        }
    }
    Ok(Histogram {
        buckets,
        total: ratios.len(),
    })
}
