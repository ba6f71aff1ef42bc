//! Fixture tokenizers shared by unit, integration and acceptance tests.

use std::path::PathBuf;

use crate::pretokenize::PretokConfig;
use crate::tokenizer::Tokenizer;
use crate::vocab::{MergeRules, Vocabulary};

/// Plain (non byte-level) tokenizer over {a, b, c, ab, bc, abc} with merges
/// a+b, b+c, ab+c.
pub fn toy_tokenizer() -> Tokenizer {
    let vocab = Vocabulary::from_units(
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
    .unwrap();
    let merges = MergeRules::from_text("a b\nb c\nab c\n", &vocab).unwrap();
    Tokenizer::from_parts(vocab, merges, &PretokConfig::default()).unwrap()
}

/// The toy tokenizer extended with " " and " abc" so that "abc abc" is two
/// canonical tokens.
pub fn toy_tokenizer_with_space() -> Tokenizer {
    let units = [
        ("a", 0),
        ("b", 1),
        ("c", 2),
        ("ab", 3),
        ("bc", 4),
        ("abc", 5),
        (" ", 6),
        (" abc", 7),
    ];
    let vocab = Vocabulary::from_units(units, false).unwrap();
    let rules = vec![
        (b"a".to_vec(), b"b".to_vec()),
        (b"b".to_vec(), b"c".to_vec()),
        (b"ab".to_vec(), b"c".to_vec()),
        (b" ".to_vec(), b"abc".to_vec()),
    ];
    let merges = MergeRules::new(rules, &vocab).unwrap();
    Tokenizer::from_parts(vocab, merges, &PretokConfig::default()).unwrap()
}

/// Directory holding the byte-level BPE fixture files.
pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
}

/// Byte-level fixture tokenizer with the given pretokenizer config.
pub fn fixture_tokenizer_with(config: &PretokConfig) -> Tokenizer {
    let dir = fixture_dir();
    Tokenizer::load(&dir.join("vocab.json"), &dir.join("merges.txt"), config).unwrap()
}

/// Byte-level fixture tokenizer with the default (GPT-2 style) pretokenizer.
pub fn fixture_tokenizer() -> Tokenizer {
    fixture_tokenizer_with(&PretokConfig::default())
}
