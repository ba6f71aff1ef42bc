//! Counting, enumerating and uniformly sampling segmentations of a token
//! into vocabulary units.
//!
//! `W(i)` is the number of ways to finish segmenting `token[i..]`, with
//! `W(len) = 1` and `W(i) = Σ W(j)` over every `j` such that `token[i..j]`
//! is a unit. Sampling walks left to right, choosing the next end `j` with
//! probability `W(j) / W(i)`; the weights telescope so every complete
//! segmentation comes out with probability `1 / W(0)`. Counts are exact big
//! integers because `W(0)` grows like `2^(len-1)`.

use std::num::NonZeroUsize;
use std::sync::Arc;

use lru::LruCache;
use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use parking_lot::Mutex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::tokenizer::{TokenSequence, Tokenizer};
use crate::vocab::Vocabulary;

pub const DEFAULT_CACHE_CAPACITY: usize = 100_000;

/// Exact number of segmentations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SegmentationCount(BigUint);

impl SegmentationCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl std::fmt::Display for SegmentationCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for SegmentationCount {
    fn from(v: u64) -> Self {
        SegmentationCount(BigUint::from(v))
    }
}

/// Ordered units that concatenate to a token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segmentation(Vec<Vec<u8>>);

impl Segmentation {
    pub fn units(&self) -> &[Vec<u8>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self) -> Vec<u8> {
        self.0.concat()
    }

    pub fn into_units(self) -> Vec<Vec<u8>> {
        self.0
    }
}

impl<U: AsRef<[u8]>> From<&[U]> for Segmentation {
    fn from(units: &[U]) -> Self {
        Segmentation(units.iter().map(|u| u.as_ref().to_vec()).collect())
    }
}

/// Memo of `W(i)` for one token, plus the valid unit ends from each index.
#[derive(Debug, Clone)]
pub struct SegmentationTable {
    token: Vec<u8>,
    counts: Vec<BigUint>,
    ends: Vec<Vec<usize>>,
}

impl SegmentationTable {
    pub fn build(token: &[u8], vocab: &Vocabulary) -> Self {
        let len = token.len();
        let max_unit = vocab.max_unit_len();
        let mut counts = vec![BigUint::zero(); len + 1];
        let mut ends = vec![Vec::new(); len + 1];
        counts[len] = BigUint::one();
        for start in (0..len).rev() {
            let mut total = BigUint::zero();
            for end in start + 1..=len.min(start + max_unit) {
                if vocab.contains(&token[start..end]) {
                    total += &counts[end];
                    ends[start].push(end);
                }
            }
            counts[start] = total;
        }
        SegmentationTable {
            token: token.to_vec(),
            counts,
            ends,
        }
    }

    pub fn token(&self) -> &[u8] {
        &self.token
    }

    /// `W(0)`.
    pub fn total(&self) -> SegmentationCount {
        SegmentationCount(self.counts[0].clone())
    }

    /// `W(i)` for `i` in `0..=len`.
    pub fn completions(&self, i: usize) -> &BigUint {
        &self.counts[i]
    }

    /// Every `j` with `token[i..j]` in the vocabulary, ascending.
    pub fn valid_ends(&self, i: usize) -> &[usize] {
        &self.ends[i]
    }

    /// All segmentations ordered lexicographically by their unit end
    /// positions, truncated at `limit`.
    pub fn enumerate(&self, limit: usize) -> Vec<Segmentation> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.enumerate_from(0, &mut stack, &mut out, limit);
        out
    }

    fn enumerate_from(
        &self,
        start: usize,
        stack: &mut Vec<Vec<u8>>,
        out: &mut Vec<Segmentation>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if start == self.token.len() {
            out.push(Segmentation(stack.clone()));
            return;
        }
        for &end in &self.ends[start] {
            if self.counts[end].is_zero() {
                continue;
            }
            stack.push(self.token[start..end].to_vec());
            self.enumerate_from(end, stack, out, limit);
            stack.pop();
            if out.len() >= limit {
                return;
            }
        }
    }

    /// Draw one segmentation uniformly at random.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Segmentation> {
        self.sample_with(rng, false)
    }

    /// As [`SegmentationTable::sample`]; with `exclude_identity` the
    /// single-unit segmentation is removed from the support unless it is the
    /// only one.
    pub fn sample_with<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        exclude_identity: bool,
    ) -> Result<Segmentation> {
        if self.counts[0].is_zero() {
            return Err(Error::NoSegmentation(
                String::from_utf8_lossy(&self.token).into_owned(),
            ));
        }
        let len = self.token.len();
        let identity_valid = self.ends[0].last() == Some(&len);
        let drop_identity = exclude_identity && identity_valid && !self.counts[0].is_one();
        let mut units = Vec::new();
        let mut start = 0;
        while start < len {
            let mut total = self.counts[start].clone();
            if start == 0 && drop_identity {
                total -= 1u32;
            }
            let mut draw = rng.gen_biguint_below(&total);
            let mut chosen = None;
            for &end in &self.ends[start] {
                if start == 0 && drop_identity && end == len {
                    continue;
                }
                let weight = &self.counts[end];
                if draw < *weight {
                    chosen = Some(end);
                    break;
                }
                draw -= weight;
            }
            let end = chosen.expect("weights sum to the completion count");
            units.push(self.token[start..end].to_vec());
            start = end;
        }
        Ok(Segmentation(units))
    }
}

pub fn count_segmentations(token: &[u8], vocab: &Vocabulary) -> SegmentationCount {
    SegmentationTable::build(token, vocab).total()
}

pub fn enumerate_segmentations(
    token: &[u8],
    vocab: &Vocabulary,
    limit: usize,
) -> Vec<Segmentation> {
    SegmentationTable::build(token, vocab).enumerate(limit)
}

pub fn sample_segmentation<R: Rng + ?Sized>(
    token: &[u8],
    vocab: &Vocabulary,
    rng: &mut R,
) -> Result<Segmentation> {
    SegmentationTable::build(token, vocab).sample(rng)
}

/// Random refinement of the canonical tokenization: every canonical token is
/// replaced by a uniformly sampled segmentation of its surface unit.
pub fn random_tokenize_text<R: Rng + ?Sized>(
    tok: &Tokenizer,
    text: &str,
    rng: &mut R,
) -> Result<TokenSequence> {
    Segmenter::new(tok).random_tokenize(text, rng)
}

/// Per-tokenizer segmentation state with an LRU cache of tables.
///
/// The cache is shared between threads; tables are deterministic so
/// concurrent fills of the same key are harmless.
pub struct Segmenter<'t> {
    tok: &'t Tokenizer,
    cache: Mutex<LruCache<Vec<u8>, Arc<SegmentationTable>>>,
    exclude_identity: bool,
}

impl<'t> Segmenter<'t> {
    pub fn new(tok: &'t Tokenizer) -> Self {
        Segmenter::with_capacity(tok, DEFAULT_CACHE_CAPACITY)
    }

    pub fn with_capacity(tok: &'t Tokenizer, capacity: usize) -> Self {
        let capacity = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        Segmenter {
            tok,
            cache: Mutex::new(LruCache::new(capacity)),
            exclude_identity: false,
        }
    }

    /// Drop the single-unit segmentation of each token from the support.
    pub fn exclude_identity(mut self, exclude: bool) -> Self {
        self.exclude_identity = exclude;
        self
    }

    pub fn table(&self, token: &[u8]) -> Arc<SegmentationTable> {
        if let Some(hit) = self.cache.lock().get(token) {
            return Arc::clone(hit);
        }
        let table = Arc::new(SegmentationTable::build(token, self.tok.vocab()));
        self.cache.lock().put(token.to_vec(), Arc::clone(&table));
        table
    }

    pub fn cached_tables(&self) -> usize {
        self.cache.lock().len()
    }

    pub fn random_tokenize<R: Rng + ?Sized>(
        &self,
        text: &str,
        rng: &mut R,
    ) -> Result<TokenSequence> {
        let canonical = self.tok.encode_canonical(text)?;
        let mut units = Vec::with_capacity(canonical.len());
        for unit in canonical.units() {
            let segmentation = self.table(unit).sample_with(rng, self.exclude_identity)?;
            units.extend(segmentation.into_units());
        }
        self.tok.sequence_from_units(&units)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::testing::{toy_tokenizer, toy_tokenizer_with_space};

    fn units(seg: &Segmentation) -> Vec<&str> {
        seg.units()
            .iter()
            .map(|u| std::str::from_utf8(u).unwrap())
            .collect()
    }

    #[test]
    fn counts_on_toy_vocab() {
        let tok = toy_tokenizer();
        assert_eq!(count_segmentations(b"abc", tok.vocab()).to_u64(), Some(4));
        assert_eq!(count_segmentations(b"a", tok.vocab()).to_u64(), Some(1));
        assert_eq!(count_segmentations(b"zz", tok.vocab()).to_u64(), Some(0));
    }

    #[test]
    fn recurrence_holds_per_entry() {
        let tok = toy_tokenizer();
        let table = SegmentationTable::build(b"abcabcbca", tok.vocab());
        assert!(table.completions(9).is_one());
        for i in 0..9 {
            let sum: BigUint = table
                .valid_ends(i)
                .iter()
                .map(|&j| table.completions(j).clone())
                .sum();
            assert_eq!(&sum, table.completions(i), "W({i})");
        }
    }

    #[test]
    fn enumeration_order_and_truncation() {
        let tok = toy_tokenizer();
        let all = enumerate_segmentations(b"abc", tok.vocab(), 10);
        let got: Vec<_> = all.iter().map(units).collect();
        assert_eq!(
            got,
            vec![
                vec!["a", "b", "c"],
                vec!["a", "bc"],
                vec!["ab", "c"],
                vec!["abc"]
            ]
        );
        let two = enumerate_segmentations(b"abc", tok.vocab(), 2);
        assert_eq!(two, all[..2]);
    }

    #[test]
    fn single_unit_token_samples_itself() {
        let tok = toy_tokenizer();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            assert_eq!(
                units(&sample_segmentation(b"a", tok.vocab(), &mut rng).unwrap()),
                ["a"]
            );
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let tok = toy_tokenizer();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..16)
                .map(|_| sample_segmentation(b"abc", tok.vocab(), &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
    }

    #[test]
    fn no_segmentation_is_an_error() {
        let tok = toy_tokenizer();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sample_segmentation(b"zz", tok.vocab(), &mut rng),
            Err(Error::NoSegmentation(_))
        ));
    }

    #[test]
    fn exclude_identity_never_returns_the_token() {
        let tok = toy_tokenizer();
        let table = SegmentationTable::build(b"abc", tok.vocab());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seen: HashSet<_> = (0..400)
            .map(|_| table.sample_with(&mut rng, true).unwrap())
            .collect();
        assert_eq!(seen.len(), 3);
        assert!(!seen.iter().any(|s| s.len() == 1));
        // sole segmentation is kept
        let single = SegmentationTable::build(b"a", tok.vocab());
        assert_eq!(single.sample_with(&mut rng, true).unwrap().len(), 1);
    }

    #[test]
    fn random_tokenize_refines_canonical() {
        let tok = toy_tokenizer_with_space();
        let seg = Segmenter::new(&tok);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(seg.random_tokenize("", &mut rng).unwrap().is_empty());
        for _ in 0..50 {
            let seq = seg.random_tokenize("abc abc", &mut rng).unwrap();
            assert_eq!(seq.bytes(), b"abc abc");
            assert!(seq.len() >= 2);
        }
        assert_eq!(seg.cached_tables(), 2);
    }

    #[test]
    fn big_counts_do_not_overflow() {
        // every substring of a run of 'a's is a unit: W(0) = 2^(n-1)
        let units: Vec<(String, u32)> = (1..=80).map(|n| ("a".repeat(n), n as u32)).collect();
        let vocab = Vocabulary::from_units(units, false).unwrap();
        let count = count_segmentations("a".repeat(80).as_bytes(), &vocab);
        assert_eq!(count.value(), &(BigUint::one() << 79u32));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sample = sample_segmentation("a".repeat(80).as_bytes(), &vocab, &mut rng).unwrap();
        assert_eq!(sample.concat().len(), 80);
    }
}
