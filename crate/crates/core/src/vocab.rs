//! Vocabulary, merge rules and the byte-to-printable alphabet used by
//! byte-level BPE distributions.
//!
//! Units are stored as raw bytes. The printable alphabet only matters at the
//! file boundary: `vocab.json` and `merges.txt` of byte-level tokenizers spell
//! every byte as one printable character, so keys are mapped back to bytes on
//! load and rendered through the alphabet again for display.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub type TokenId = u32;

/// The conventional 256-entry remapping: printable latin-1 bytes map to
/// themselves, the remaining bytes to code points from U+0100 upwards.
#[derive(Debug)]
pub struct ByteAlphabet {
    to_char: [char; 256],
    to_byte: HashMap<char, u8>,
}

impl ByteAlphabet {
    pub fn get() -> &'static ByteAlphabet {
        static ALPHABET: OnceLock<ByteAlphabet> = OnceLock::new();
        ALPHABET.get_or_init(ByteAlphabet::build)
    }

    fn build() -> Self {
        let printable = |b: u8| matches!(b, b'!'..=b'~' | 0xA1..=0xAC | 0xAE..=0xFF);
        let mut to_char = ['\0'; 256];
        let mut next = 256u32;
        for b in 0..=255u8 {
            to_char[b as usize] = if printable(b) {
                char::from(b)
            } else {
                let c = char::from_u32(next).expect("valid code point");
                next += 1;
                c
            };
        }
        let to_byte = to_char
            .iter()
            .enumerate()
            .map(|(b, &c)| (c, b as u8))
            .collect();
        ByteAlphabet { to_char, to_byte }
    }

    pub fn char_for(&self, byte: u8) -> char {
        self.to_char[byte as usize]
    }

    pub fn byte_for(&self, c: char) -> Option<u8> {
        self.to_byte.get(&c).copied()
    }

    /// Render raw bytes in the printable alphabet.
    pub fn encode(&self, bytes: &[u8]) -> String {
        bytes.iter().map(|&b| self.char_for(b)).collect()
    }

    /// Map a printable-alphabet string back to raw bytes.
    pub fn decode(&self, s: &str) -> Option<Vec<u8>> {
        s.chars().map(|c| self.byte_for(c)).collect()
    }

    /// True when all 256 single-byte symbols appear as keys.
    fn covers<'a>(&self, keys: impl IntoIterator<Item = &'a str>) -> bool {
        let mut seen = [false; 256];
        for key in keys {
            let mut chars = key.chars();
            if let (Some(c), None) = (chars.next(), chars.next()) {
                if let Some(b) = self.byte_for(c) {
                    seen[b as usize] = true;
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// Bijection between surface units (raw bytes) and token ids.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    unit_to_id: HashMap<Vec<u8>, TokenId>,
    id_to_unit: HashMap<TokenId, Vec<u8>>,
    byte_level: bool,
    max_unit_len: usize,
}

impl Vocabulary {
    /// Build from `(unit, id)` pairs. Fails on duplicate ids or units.
    pub fn from_units<I, U>(units: I, byte_level: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (U, TokenId)>,
        U: Into<Vec<u8>>,
    {
        let mut unit_to_id = HashMap::new();
        let mut id_to_unit: HashMap<TokenId, Vec<u8>> = HashMap::new();
        for (unit, id) in units {
            let unit = unit.into();
            if let Some(prev) = id_to_unit.get(&id) {
                return Err(Error::DuplicateId {
                    id,
                    first: String::from_utf8_lossy(prev).into_owned(),
                    second: String::from_utf8_lossy(&unit).into_owned(),
                });
            }
            if unit_to_id.insert(unit.clone(), id).is_some() {
                return Err(Error::Malformed {
                    what: "vocabulary",
                    detail: format!("unit {:?} listed twice", String::from_utf8_lossy(&unit)),
                });
            }
            id_to_unit.insert(id, unit);
        }
        if byte_level {
            for b in 0..=255u8 {
                if !unit_to_id.contains_key(&[b][..]) {
                    return Err(Error::Malformed {
                        what: "vocabulary",
                        detail: format!("byte-level vocabulary lacks single-byte unit 0x{b:02x}"),
                    });
                }
            }
        }
        let max_unit_len = unit_to_id.keys().map(Vec::len).max().unwrap_or(0);
        Ok(Vocabulary {
            unit_to_id,
            id_to_unit,
            byte_level,
            max_unit_len,
        })
    }

    /// Parse a `vocab.json` string (token → id). `byte_level = None` detects
    /// the printable byte alphabet from the keys.
    pub fn from_json_str(json: &str, byte_level: Option<bool>) -> Result<Self> {
        let raw: HashMap<String, serde_json::Value> =
            serde_json::from_str(json).map_err(|e| Error::Malformed {
                what: "vocab.json",
                detail: e.to_string(),
            })?;
        let alphabet = ByteAlphabet::get();
        let byte_level =
            byte_level.unwrap_or_else(|| alphabet.covers(raw.keys().map(String::as_str)));
        let mut units = Vec::with_capacity(raw.len());
        for (key, value) in raw {
            let id = value
                .as_u64()
                .and_then(|v| TokenId::try_from(v).ok())
                .ok_or_else(|| Error::Malformed {
                    what: "vocab.json",
                    detail: format!("id of {key:?} is not a non-negative integer: {value}"),
                })?;
            let unit = if byte_level {
                alphabet.decode(&key).ok_or_else(|| Error::Malformed {
                    what: "vocab.json",
                    detail: format!("{key:?} is outside the byte alphabet"),
                })?
            } else {
                key.into_bytes()
            };
            units.push((unit, id));
        }
        // HashMap iteration order is random; make duplicate-id errors reproducible.
        units.sort_by_key(|(_, id)| *id);
        Vocabulary::from_units(units, byte_level)
    }

    pub fn from_json_file(path: &Path, byte_level: Option<bool>) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Vocabulary::from_json_str(&text, byte_level)
    }

    pub fn id(&self, unit: &[u8]) -> Option<TokenId> {
        self.unit_to_id.get(unit).copied()
    }

    pub fn unit(&self, id: TokenId) -> Option<&[u8]> {
        self.id_to_unit.get(&id).map(Vec::as_slice)
    }

    pub fn contains(&self, unit: &[u8]) -> bool {
        self.unit_to_id.contains_key(unit)
    }

    pub fn len(&self) -> usize {
        self.unit_to_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unit_to_id.is_empty()
    }

    pub fn is_byte_level(&self) -> bool {
        self.byte_level
    }

    /// Length in bytes of the longest unit.
    pub fn max_unit_len(&self) -> usize {
        self.max_unit_len
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], TokenId)> {
        self.unit_to_id.iter().map(|(u, &id)| (u.as_slice(), id))
    }

    /// Human-readable form of a unit: the printable alphabet for byte-level
    /// vocabularies, UTF-8 otherwise.
    pub fn render(&self, unit: &[u8]) -> String {
        if self.byte_level {
            ByteAlphabet::get().encode(unit)
        } else {
            String::from_utf8_lossy(unit).into_owned()
        }
    }

    /// Inverse of [`Vocabulary::render`].
    pub fn parse_unit(&self, rendered: &str) -> Option<Vec<u8>> {
        if self.byte_level {
            ByteAlphabet::get().decode(rendered)
        } else {
            Some(rendered.as_bytes().to_vec())
        }
    }
}

/// Ordered merge rules; a rule's rank is its position.
#[derive(Debug, Clone, Default)]
pub struct MergeRules {
    rules: Vec<(Vec<u8>, Vec<u8>)>,
}

impl MergeRules {
    /// Validate `rules` against `vocab`: both operands and their
    /// concatenation must be vocabulary units.
    pub fn new(rules: Vec<(Vec<u8>, Vec<u8>)>, vocab: &Vocabulary) -> Result<Self> {
        for (left, right) in &rules {
            for operand in [left, right] {
                if !vocab.contains(operand) {
                    return Err(Error::MergeOperandMissing(vocab.render(operand)));
                }
            }
            let merged = [left.as_slice(), right.as_slice()].concat();
            if !vocab.contains(&merged) {
                return Err(Error::MergeResultMissing {
                    left: vocab.render(left),
                    right: vocab.render(right),
                });
            }
        }
        Ok(MergeRules { rules })
    }

    /// Parse `merges.txt`: one space-separated pair per line, with an optional
    /// leading header line starting with `#`.
    pub fn from_text(text: &str, vocab: &Vocabulary) -> Result<Self> {
        let mut rules = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            if lineno == 0 && line.starts_with('#') && !Self::is_valid_pair(line, vocab) {
                continue;
            }
            let mut parts = line.split(' ');
            let (Some(l), Some(r), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Malformed {
                    what: "merges.txt",
                    detail: format!("line {}: expected two units, got {line:?}", lineno + 1),
                });
            };
            let parse = |s: &str| {
                vocab.parse_unit(s).ok_or_else(|| Error::Malformed {
                    what: "merges.txt",
                    detail: format!("line {}: {s:?} is outside the byte alphabet", lineno + 1),
                })
            };
            rules.push((parse(l)?, parse(r)?));
        }
        MergeRules::new(rules, vocab)
    }

    pub fn from_file(path: &Path, vocab: &Vocabulary) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        MergeRules::from_text(&text, vocab)
    }

    fn is_valid_pair(line: &str, vocab: &Vocabulary) -> bool {
        let mut parts = line.split(' ');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(r), None) => match (vocab.parse_unit(l), vocab.parse_unit(r)) {
                (Some(l), Some(r)) => vocab.contains(&[l, r].concat()),
                _ => false,
            },
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[u8], &[u8])> {
        self.rules
            .iter()
            .enumerate()
            .map(|(rank, (l, r))| (rank, l.as_slice(), r.as_slice()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Vocabulary {
        Vocabulary::from_units(
            [
                ("a", 0),
                ("b", 1),
                ("c", 2),
                ("ab", 3),
                ("bc", 4),
                ("abc", 5),
            ],
            false,
        )
        .unwrap()
    }

    #[test]
    fn alphabet_is_a_bijection() {
        let alphabet = ByteAlphabet::get();
        let chars: std::collections::HashSet<char> =
            (0..=255u8).map(|b| alphabet.char_for(b)).collect();
        assert_eq!(chars.len(), 256);
        for b in 0..=255u8 {
            assert_eq!(alphabet.byte_for(alphabet.char_for(b)), Some(b));
        }
        assert_eq!(alphabet.char_for(b' '), 'Ġ');
        assert_eq!(alphabet.char_for(b'\n'), 'Ċ');
        assert_eq!(alphabet.char_for(b'a'), 'a');
    }

    #[test]
    fn toy_merges_validate() {
        let vocab = toy();
        let merges = MergeRules::from_text("a b\nb c\nab c\n", &vocab).unwrap();
        assert_eq!(vocab.len(), 6);
        assert_eq!(merges.len(), 3);
        assert!(!vocab.is_byte_level());
    }

    #[test]
    fn missing_merge_result_is_rejected() {
        let vocab = Vocabulary::from_units([("x", 0), ("y", 1)], false).unwrap();
        let err = MergeRules::from_text("x y\n", &vocab).unwrap_err();
        assert!(
            err.to_string().contains("merge result not in vocabulary"),
            "{err}"
        );
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = Vocabulary::from_json_str(r#"{"a": 0, "b": 0}"#, None).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { id: 0, .. }), "{err}");
    }

    #[test]
    fn negative_ids_are_malformed() {
        assert!(matches!(
            Vocabulary::from_json_str(r#"{"a": -1}"#, None),
            Err(Error::Malformed { .. })
        ));
        assert!(matches!(
            Vocabulary::from_json_str("[1, 2]", None),
            Err(Error::Malformed { .. })
        ));
    }

    #[test]
    fn header_line_is_optional() {
        let vocab = toy();
        let with = MergeRules::from_text("#version: 0.2\na b\n", &vocab).unwrap();
        let without = MergeRules::from_text("a b\n", &vocab).unwrap();
        assert_eq!(with.len(), 1);
        assert_eq!(without.len(), 1);
    }

    #[test]
    fn three_field_line_is_malformed() {
        let err = MergeRules::from_text("a b c\n", &toy()).unwrap_err();
        assert!(matches!(err, Error::Malformed { .. }));
    }
}
