//! Loading a BPE tokenizer, canonical encoding and exact decoding.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pretokenize::{PretokConfig, PretokenSpan, Pretokenizer};
use crate::vocab::{MergeRules, TokenId, Vocabulary};

/// Token ids with their surface units. Units concatenate to the source bytes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    ids: Vec<TokenId>,
    units: Vec<Vec<u8>>,
}

impl TokenSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ids(&self) -> &[TokenId] {
        &self.ids
    }

    pub fn units(&self) -> &[Vec<u8>] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub(crate) fn push(&mut self, id: TokenId, unit: Vec<u8>) {
        self.ids.push(id);
        self.units.push(unit);
    }

    pub fn extend(&mut self, other: TokenSequence) {
        self.ids.extend(other.ids);
        self.units.extend(other.units);
    }

    /// Concatenation of the surface units.
    pub fn bytes(&self) -> Vec<u8> {
        self.units.concat()
    }

    /// Split after the first `n` tokens.
    pub fn split_at(&self, n: usize) -> (TokenSequence, TokenSequence) {
        let n = n.min(self.len());
        (
            TokenSequence {
                ids: self.ids[..n].to_vec(),
                units: self.units[..n].to_vec(),
            },
            TokenSequence {
                ids: self.ids[n..].to_vec(),
                units: self.units[n..].to_vec(),
            },
        )
    }
}

/// An immutable BPE tokenizer: vocabulary, ranked merges and pretokenizer.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    vocab: Vocabulary,
    merges: MergeRules,
    // (left, right) -> (rank, merged)
    pair_ranks: HashMap<(TokenId, TokenId), (u32, TokenId)>,
    pretokenizer: Pretokenizer,
    config: PretokConfig,
}

impl Tokenizer {
    pub fn load(vocab_file: &Path, merges_file: &Path, config: &PretokConfig) -> Result<Self> {
        let vocab = Vocabulary::from_json_file(vocab_file, config.byte_level)?;
        let merges = MergeRules::from_file(merges_file, &vocab)?;
        Tokenizer::from_parts(vocab, merges, config)
    }

    pub fn from_parts(
        vocab: Vocabulary,
        merges: MergeRules,
        config: &PretokConfig,
    ) -> Result<Self> {
        let mut pair_ranks = HashMap::with_capacity(merges.len());
        for (rank, left, right) in merges.iter() {
            let l = vocab
                .id(left)
                .ok_or_else(|| Error::MergeOperandMissing(vocab.render(left)))?;
            let r = vocab
                .id(right)
                .ok_or_else(|| Error::MergeOperandMissing(vocab.render(right)))?;
            let merged =
                vocab
                    .id(&[left, right].concat())
                    .ok_or_else(|| Error::MergeResultMissing {
                        left: vocab.render(left),
                        right: vocab.render(right),
                    })?;
            // a repeated pair keeps its first (lowest) rank
            pair_ranks.entry((l, r)).or_insert((rank as u32, merged));
        }
        let pretokenizer = Pretokenizer::new(config)?;
        Ok(Tokenizer {
            vocab,
            merges,
            pair_ranks,
            pretokenizer,
            config: config.clone(),
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn merges(&self) -> &MergeRules {
        &self.merges
    }

    pub fn config(&self) -> &PretokConfig {
        &self.config
    }

    pub fn pretokenize(&self, text: &str) -> Vec<PretokenSpan> {
        self.pretokenizer.pretokenize(text)
    }

    /// SHA-256 over ids, units, merges and the pretokenizer pattern; stable
    /// across file formatting differences.
    pub fn fingerprint(&self) -> String {
        let mut entries: Vec<_> = self.vocab.iter().collect();
        entries.sort_by_key(|&(_, id)| id);
        let mut hasher = Sha256::new();
        for (unit, id) in entries {
            hasher.update(id.to_le_bytes());
            hasher.update((unit.len() as u64).to_le_bytes());
            hasher.update(unit);
        }
        for (_, left, right) in self.merges.iter() {
            hasher.update((left.len() as u64).to_le_bytes());
            hasher.update(left);
            hasher.update((right.len() as u64).to_le_bytes());
            hasher.update(right);
        }
        hasher.update(self.config.pattern().as_bytes());
        hasher.update(self.config.max_digit_run.unwrap_or(0).to_le_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Apply merges in rank order within each pretoken.
    pub fn encode_canonical(&self, text: &str) -> Result<TokenSequence> {
        let mut seq = TokenSequence::new();
        for span in self.pretokenize(text) {
            let ids = self.bpe(span.text(text), || false)?;
            self.append_ids(&mut seq, &ids);
        }
        Ok(seq)
    }

    /// Canonical encoding of a single piece, bypassing the pretokenizer.
    pub fn encode_piece(&self, piece: &str) -> Result<Vec<TokenId>> {
        self.bpe(piece, || false)
    }

    /// Decode ids to bytes through the vocabulary.
    pub fn decode(&self, ids: &[TokenId]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for &id in ids {
            out.extend_from_slice(self.vocab.unit(id).ok_or(Error::UnknownId(id))?);
        }
        Ok(out)
    }

    pub fn decode_to_string(&self, ids: &[TokenId]) -> Result<String> {
        let bytes = self.decode(ids)?;
        String::from_utf8(bytes).map_err(|e| Error::Malformed {
            what: "decoded text",
            detail: e.to_string(),
        })
    }

    /// Build a sequence from ids, looking up every unit.
    pub fn sequence_from_ids(&self, ids: &[TokenId]) -> Result<TokenSequence> {
        let mut seq = TokenSequence::new();
        for &id in ids {
            let unit = self.vocab.unit(id).ok_or(Error::UnknownId(id))?;
            seq.push(id, unit.to_vec());
        }
        Ok(seq)
    }

    /// Build a sequence from units, looking up every id.
    pub fn sequence_from_units<U: AsRef<[u8]>>(&self, units: &[U]) -> Result<TokenSequence> {
        let mut seq = TokenSequence::new();
        for unit in units {
            let unit = unit.as_ref();
            let id = self
                .vocab
                .id(unit)
                .ok_or_else(|| Error::Uncoverable(self.vocab.render(unit)))?;
            seq.push(id, unit.to_vec());
        }
        Ok(seq)
    }

    pub(crate) fn append_ids(&self, seq: &mut TokenSequence, ids: &[TokenId]) {
        for &id in ids {
            let unit = self
                .vocab
                .unit(id)
                .expect("ids produced by the tokenizer are in the vocabulary");
            seq.push(id, unit.to_vec());
        }
    }

    /// Starting units of a piece: single bytes for byte-level vocabularies,
    /// characters otherwise.
    pub(crate) fn base_ids(&self, piece: &str) -> Result<Vec<TokenId>> {
        if self.vocab.is_byte_level() {
            Ok(piece
                .bytes()
                .map(|b| {
                    self.vocab
                        .id(&[b])
                        .expect("byte-level vocabularies hold every byte")
                })
                .collect())
        } else {
            let mut buf = [0u8; 4];
            piece
                .chars()
                .map(|c| {
                    self.vocab
                        .id(c.encode_utf8(&mut buf).as_bytes())
                        .ok_or_else(|| Error::Uncoverable(piece.to_string()))
                })
                .collect()
        }
    }

    /// BPE over one piece. `skip` is asked once per candidate merge at every
    /// step; skipped candidates sit out that step only. The piece is finished
    /// once no candidate survives.
    pub(crate) fn bpe(&self, piece: &str, mut skip: impl FnMut() -> bool) -> Result<Vec<TokenId>> {
        let mut ids = self.base_ids(piece)?;
        loop {
            let mut best: Option<(u32, usize, TokenId)> = None;
            for pos in 0..ids.len().saturating_sub(1) {
                let Some(&(rank, merged)) = self.pair_ranks.get(&(ids[pos], ids[pos + 1])) else {
                    continue;
                };
                if skip() {
                    continue;
                }
                if best.is_none_or(|(r, _, _)| rank < r) {
                    best = Some((rank, pos, merged));
                }
            }
            let Some((_, pos, merged)) = best else {
                break;
            };
            ids[pos] = merged;
            ids.remove(pos + 1);
        }
        Ok(ids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::toy_tokenizer;

    #[test]
    fn toy_abc_merges_to_one_token() {
        let tok = toy_tokenizer();
        let seq = tok.encode_canonical("abc").unwrap();
        assert_eq!(seq.units(), [b"abc".to_vec()]);
        assert_eq!(tok.vocab().len(), 6);
        assert_eq!(tok.merges().len(), 3);
    }

    #[test]
    fn empty_text_is_empty_sequence() {
        let tok = toy_tokenizer();
        assert!(tok.encode_canonical("").unwrap().is_empty());
        assert_eq!(tok.decode(&[]).unwrap(), b"");
    }

    #[test]
    fn decode_concatenates_units() {
        let tok = toy_tokenizer();
        let seq = tok.sequence_from_units(&["a", "b", "c"]).unwrap();
        assert_eq!(tok.decode(seq.ids()).unwrap(), b"abc");
        assert!(matches!(tok.decode(&[99]), Err(Error::UnknownId(99))));
    }

    #[test]
    fn uncoverable_pretoken_is_an_error() {
        let tok = toy_tokenizer();
        assert!(matches!(
            tok.encode_canonical("abz"),
            Err(Error::Uncoverable(_))
        ));
    }

    #[test]
    fn lowest_rank_wins_over_position() {
        // "bca": pair (b,c) rank 1 merges; (c,a) has no rule
        let tok = toy_tokenizer();
        let seq = tok.encode_canonical("bca").unwrap();
        assert_eq!(seq.units(), [b"bc".to_vec(), b"a".to_vec()]);
        // "abcbc": (a,b) rank 0, then (b,c) rank 1 beats (ab,c) rank 2
        let seq = tok.encode_canonical("abcbc").unwrap();
        assert_eq!(seq.units(), [b"abc".to_vec(), b"bc".to_vec()]);
    }

    #[test]
    fn split_at_partitions() {
        let tok = toy_tokenizer();
        let seq = tok.sequence_from_units(&["a", "b", "c"]).unwrap();
        let (head, tail) = seq.split_at(1);
        assert_eq!(head.len(), 1);
        assert_eq!(tail.len(), 2);
        assert_eq!([head.bytes(), tail.bytes()].concat(), b"abc");
    }
}
