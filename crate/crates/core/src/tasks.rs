//! Task generators and answer graders for orthography-sensitive probes:
//! letter counting, acronyms, long-number arithmetic, word repetition and
//! misspelling identification.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schemes::{Scheme, SchemeConfig, SchemeRunner};
use crate::tokenizer::TokenSequence;
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    CountChars,
    Acronym,
    Arithmetic,
    WordRepeat,
    IdentifyMisspelling,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::CountChars => "count_chars",
            TaskKind::Acronym => "acronym",
            TaskKind::Arithmetic => "arithmetic",
            TaskKind::WordRepeat => "word_repeat",
            TaskKind::IdentifyMisspelling => "identify_misspelling",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "count_chars" => Ok(TaskKind::CountChars),
            "acronym" | "acronyms" => Ok(TaskKind::Acronym),
            "arithmetic" => Ok(TaskKind::Arithmetic),
            "word_repeat" => Ok(TaskKind::WordRepeat),
            "identify_misspelling" => Ok(TaskKind::IdentifyMisspelling),
            _ => Err(Error::invalid(format!("unknown task kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gold {
    Integer(i64),
    Text(String),
}

impl fmt::Display for Gold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gold::Integer(v) => write!(f, "{v}"),
            Gold::Text(s) => f.write_str(s),
        }
    }
}

/// A span of the prompt together with the scheme that should tokenize it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSegment {
    pub text: String,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskExample {
    pub id: String,
    pub kind: TaskKind,
    pub prompt: String,
    pub gold: Gold,
    pub seed: u64,
    /// Per-span tokenization plan for probes; the texts concatenate to
    /// `prompt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<PromptSegment>>,
}

impl TaskExample {
    /// Tokenize the prompt: segment by segment when a plan is present,
    /// otherwise with `default`.
    pub fn encode<R: Rng + ?Sized>(
        &self,
        runner: &SchemeRunner<'_>,
        default: &SchemeConfig,
        rng: &mut R,
    ) -> Result<TokenSequence> {
        let Some(segments) = &self.segments else {
            return runner.apply_with_rng(&self.prompt, default, rng);
        };
        let mut seq = TokenSequence::new();
        for segment in segments {
            let cfg = SchemeConfig {
                scheme: segment.scheme,
                ..default.clone()
            };
            seq.extend(runner.apply_with_rng(&segment.text, &cfg, rng)?);
        }
        Ok(seq)
    }

    /// Grade a model generation against the gold answer.
    pub fn grade(&self, generation: &str) -> bool {
        match (self.kind, &self.gold) {
            (TaskKind::CountChars | TaskKind::Arithmetic, Gold::Integer(g)) => {
                grade_last_number(generation, *g)
            }
            (TaskKind::Acronym, Gold::Text(a)) => grade_acronym(generation, a),
            (TaskKind::WordRepeat, Gold::Text(w)) => grade_word_repeat(generation, w),
            (TaskKind::IdentifyMisspelling, Gold::Text(letter)) => grade_choice(generation, letter),
            _ => false,
        }
    }

    /// A generation that answers the example correctly.
    pub fn render_gold(&self) -> String {
        match (self.kind, &self.gold) {
            (TaskKind::Acronym, Gold::Text(a)) => acronym_words(a),
            (_, gold) => gold.to_string(),
        }
    }
}

const ALPHABET: &[u8; 26] = b"abcdefghijklmnopqrstuvwxyz";

fn random_letter<R: Rng + ?Sized>(rng: &mut R) -> char {
    char::from(ALPHABET[rng.gen_range(0..26)])
}

/// Most frequent letter of `word`; ties go to the letter seen first.
pub fn most_common_letter(word: &str) -> Option<(char, usize)> {
    let mut best: Option<(char, usize)> = None;
    for c in word.chars() {
        if best.is_some_and(|(b, _)| b == c) {
            continue;
        }
        let n = word.chars().filter(|&x| x == c).count();
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((c, n));
        }
    }
    best
}

pub fn count_chars_prompt(word: &str, letter: char) -> String {
    format!("Count the number of the letter '{letter}' in the word {word}.")
}

/// Lowercase alphabetic words of 5-10 letters spelled by vocabulary units,
/// ignoring one leading space; sorted and deduplicated.
pub fn count_chars_candidates(vocab: &Vocabulary) -> Vec<String> {
    let words: BTreeSet<String> = vocab
        .iter()
        .filter_map(|(unit, _)| {
            let unit = unit.strip_prefix(b" ").unwrap_or(unit);
            let ok = (5..=10).contains(&unit.len()) && unit.iter().all(u8::is_ascii_lowercase);
            ok.then(|| String::from_utf8(unit.to_vec()).expect("ascii"))
        })
        .collect();
    words.into_iter().collect()
}

pub fn gen_count_chars<R: Rng + ?Sized>(
    vocab: &Vocabulary,
    n: usize,
    seed: u64,
    rng: &mut R,
) -> Result<Vec<TaskExample>> {
    let candidates = count_chars_candidates(vocab);
    if candidates.len() < n {
        return Err(Error::InsufficientTokens {
            needed: n,
            found: candidates.len(),
        });
    }
    let picked = sample_indices(rng, candidates.len(), n);
    Ok(picked
        .iter()
        .enumerate()
        .map(|(i, idx)| {
            let word = &candidates[idx];
            let (letter, count) = most_common_letter(word).expect("non-empty word");
            TaskExample {
                id: format!("count_chars-{i:05}"),
                kind: TaskKind::CountChars,
                prompt: count_chars_prompt(word, letter),
                gold: Gold::Integer(count as i64),
                seed,
                segments: None,
            }
        })
        .collect())
}

pub fn acronym_prompt(acronym: &str) -> String {
    format!("Come up with a sequence of words where the first letters would form this acronym: {acronym}")
}

pub fn gen_acronyms<R: Rng + ?Sized>(
    n: usize,
    length: usize,
    seed: u64,
    rng: &mut R,
) -> Result<Vec<TaskExample>> {
    if length == 0 {
        return Err(Error::invalid("acronym length must be positive"));
    }
    Ok((0..n)
        .map(|i| {
            let acronym: String = (0..length).map(|_| random_letter(rng)).collect();
            TaskExample {
                id: format!("acronym-{i:05}"),
                kind: TaskKind::Acronym,
                prompt: acronym_prompt(&acronym),
                gold: Gold::Text(acronym),
                seed,
                segments: None,
            }
        })
        .collect())
}

/// Longest operand whose sums and differences fit a JSON-safe `i64`.
pub const MAX_OPERAND_DIGITS: usize = 18;

/// `n` problems alternating between addition and subtraction (addition
/// first), with operands of exactly `digits` digits.
pub fn gen_arithmetic<R: Rng + ?Sized>(
    n: usize,
    digits: usize,
    seed: u64,
    rng: &mut R,
) -> Result<Vec<TaskExample>> {
    if digits == 0 || digits > MAX_OPERAND_DIGITS {
        return Err(Error::invalid(format!(
            "operand digits must be in 1..={MAX_OPERAND_DIGITS}"
        )));
    }
    let low = 10i64.pow(digits as u32 - 1);
    let high = 10i64.pow(digits as u32);
    Ok((0..n)
        .map(|i| {
            let a = rng.gen_range(low..high);
            let b = rng.gen_range(low..high);
            let (op, result) = if i % 2 == 0 {
                ('+', a + b)
            } else {
                ('-', a - b)
            };
            TaskExample {
                id: format!("arithmetic-{i:05}"),
                kind: TaskKind::Arithmetic,
                prompt: format!("{a} {op} {b} ="),
                gold: Gold::Integer(result),
                seed,
                segments: None,
            }
        })
        .collect())
}

/// Apply one random edit: insert, delete or substitute a single lowercase
/// letter at a uniform position. Substitution never keeps the character.
pub fn gen_misspelling<R: Rng + ?Sized>(word: &str, rng: &mut R) -> Result<String> {
    let mut chars: Vec<char> = word.chars().collect();
    if chars.len() < 2 {
        return Err(Error::invalid(format!(
            "word {word:?} is too short to misspell"
        )));
    }
    match rng.gen_range(0..3) {
        0 => {
            let at = rng.gen_range(0..=chars.len());
            chars.insert(at, random_letter(rng));
        }
        1 => {
            let at = rng.gen_range(0..chars.len());
            chars.remove(at);
        }
        _ => {
            let at = rng.gen_range(0..chars.len());
            let original = chars[at];
            let choices: Vec<char> = ALPHABET
                .iter()
                .map(|&b| char::from(b))
                .filter(|&c| c != original)
                .collect();
            chars[at] = choices[rng.gen_range(0..choices.len())];
        }
    }
    Ok(chars.into_iter().collect())
}

fn number_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[-+]?\d[\d,]*(?:\.\d+)?").expect("valid regex"))
}

/// Parse a numeric literal and round half away from zero.
fn round_literal(literal: &str) -> Option<i128> {
    let cleaned: String = literal.chars().filter(|&c| c != ',').collect();
    let (negative, body) = match cleaned.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, cleaned.strip_prefix('+').unwrap_or(&cleaned)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let mut value: i128 = int.parse().ok()?;
    if frac.as_bytes().first().is_some_and(|&d| d >= b'5') {
        value += 1;
    }
    Some(if negative { -value } else { value })
}

/// True iff the last number in `generation` rounds to `gold`.
pub fn grade_last_number(generation: &str, gold: i64) -> bool {
    number_regex()
        .find_iter(generation)
        .last()
        .and_then(|m| round_literal(m.as_str()))
        == Some(i128::from(gold))
}

fn strip_punctuation(word: &str) -> &str {
    word.trim_matches(|c: char| !c.is_alphanumeric())
}

/// First letters of the whitespace-delimited words, lowercased; surrounding
/// punctuation is ignored and punctuation-only words are skipped.
pub fn first_letters(generation: &str) -> String {
    generation
        .split_whitespace()
        .filter_map(|w| strip_punctuation(w).chars().next())
        .flat_map(char::to_lowercase)
        .collect()
}

pub fn grade_acronym(generation: &str, acronym: &str) -> bool {
    !acronym.is_empty() && first_letters(generation) == acronym.to_lowercase()
}

fn acronym_words(acronym: &str) -> String {
    const WORDS: [&str; 26] = [
        "apple",
        "bright",
        "candle",
        "during",
        "every",
        "forest",
        "garden",
        "house",
        "island",
        "jumped",
        "kind",
        "light",
        "morning",
        "never",
        "orange",
        "people",
        "quiet",
        "river",
        "stone",
        "table",
        "under",
        "village",
        "water",
        "xylophone",
        "yellow",
        "zebra",
    ];
    acronym
        .chars()
        .map(|c| match c.to_ascii_lowercase() {
            l @ 'a'..='z' => WORDS[(l as u8 - b'a') as usize].to_string(),
            other => other.to_string(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// True iff the first word of the generation is `word` (case-insensitive).
pub fn grade_word_repeat(generation: &str, word: &str) -> bool {
    generation
        .split_whitespace()
        .next()
        .map(strip_punctuation)
        .is_some_and(|w| w.to_lowercase() == word.to_lowercase())
}

/// Multiple-choice letter grader: the first standalone capital letter
/// (optionally followed by `.`, `)` or `:`) must equal `gold`.
pub fn grade_choice(generation: &str, gold: &str) -> bool {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re =
        RE.get_or_init(|| Regex::new(r"(?:^|[\s(\[])([A-Z])(?:$|[\s.):\]])").expect("valid regex"));
    re.captures(generation).map(|c| c[1].to_string()) == Some(gold.trim().to_string())
}

pub const WORD_REPEAT_INSTRUCTION: &str = "Repeat each word directly, while correcting any typos.";
pub const MISSPELLING_INSTRUCTION: &str = "Question: Which of the two words contains a misspelling? Respond directly with the answer option.";

/// Builds the word-repeat and misspelling-identification probes.
#[derive(Debug, Clone)]
pub struct ProbeBuilder {
    /// In-context words for word repeat.
    pub repeat_shots: Vec<String>,
    /// In-context (correct, misspelled, answer letter) triples.
    pub misspelling_shots: Vec<(String, String, char)>,
    /// Tokenization for the correctly spelled target.
    pub target_scheme: Scheme,
}

impl Default for ProbeBuilder {
    fn default() -> Self {
        ProbeBuilder {
            repeat_shots: vec!["guarantees".into()],
            misspelling_shots: vec![("guarantees".into(), "garantees".into(), 'B')],
            target_scheme: Scheme::Char,
        }
    }
}

impl ProbeBuilder {
    pub fn build<R: Rng + ?Sized>(
        &self,
        kind: TaskKind,
        id: &str,
        word: &str,
        seed: u64,
        rng: &mut R,
    ) -> Result<TaskExample> {
        match kind {
            TaskKind::WordRepeat => Ok(self.word_repeat(id, word, seed)),
            TaskKind::IdentifyMisspelling => self.identify_misspelling(id, word, seed, rng),
            other => Err(Error::invalid(format!("{other} is not a probe task"))),
        }
    }

    fn word_repeat(&self, id: &str, word: &str, seed: u64) -> TaskExample {
        let mut head = format!("{WORD_REPEAT_INSTRUCTION}\n\n");
        for shot in &self.repeat_shots {
            head.push_str(&format!("Question: {shot}\nAnswer: {shot}\n\n"));
        }
        head.push_str("Question: ");
        let tail = "\nAnswer:".to_string();
        let segments = vec![
            PromptSegment {
                text: head,
                scheme: Scheme::Canonical,
            },
            PromptSegment {
                text: word.to_string(),
                scheme: self.target_scheme,
            },
            PromptSegment {
                text: tail,
                scheme: Scheme::Canonical,
            },
        ];
        TaskExample {
            id: id.to_string(),
            kind: TaskKind::WordRepeat,
            prompt: segments.iter().map(|s| s.text.as_str()).collect(),
            gold: Gold::Text(word.to_string()),
            seed,
            segments: Some(segments),
        }
    }

    fn identify_misspelling<R: Rng + ?Sized>(
        &self,
        id: &str,
        word: &str,
        seed: u64,
        rng: &mut R,
    ) -> Result<TaskExample> {
        let misspelled = gen_misspelling(word, rng)?;
        let mut head = format!("{MISSPELLING_INSTRUCTION}\n\n");
        for (correct, wrong, letter) in &self.misspelling_shots {
            let (a, b) = if *letter == 'A' {
                (wrong, correct)
            } else {
                (correct, wrong)
            };
            head.push_str(&format!(
                "Question:\n\nA. {a}\nB. {b}\n\nAnswer: {letter}\n\n"
            ));
        }
        head.push_str("Question:\n\nA. ");
        let correct_first = rng.gen_bool(0.5);
        let correct = PromptSegment {
            text: word.to_string(),
            scheme: self.target_scheme,
        };
        let wrong = PromptSegment {
            text: misspelled,
            scheme: Scheme::Canonical,
        };
        let (first, second, gold) = if correct_first {
            (correct, wrong, "B")
        } else {
            (wrong, correct, "A")
        };
        let segments = vec![
            PromptSegment {
                text: head,
                scheme: Scheme::Canonical,
            },
            first,
            PromptSegment {
                text: "\nB. ".into(),
                scheme: Scheme::Canonical,
            },
            second,
            PromptSegment {
                text: "\n\nAnswer:".into(),
                scheme: Scheme::Canonical,
            },
        ];
        Ok(TaskExample {
            id: id.to_string(),
            kind: TaskKind::IdentifyMisspelling,
            prompt: segments.iter().map(|s| s.text.as_str()).collect(),
            gold: Gold::Text(gold.into()),
            seed,
            segments: Some(segments),
        })
    }
}

pub fn build_probe<R: Rng + ?Sized>(
    kind: TaskKind,
    word: &str,
    seed: u64,
    rng: &mut R,
) -> Result<TaskExample> {
    ProbeBuilder::default().build(kind, &format!("{kind}-{word}"), word, seed, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn strawberry_has_three_rs() {
        assert_eq!(most_common_letter("strawberry"), Some(('r', 3)));
        assert_eq!(most_common_letter("aaaaa"), Some(('a', 5)));
        assert_eq!(most_common_letter("lever"), Some(('e', 2)));
        // ties go to the earliest letter
        assert_eq!(most_common_letter("llama"), Some(('l', 2)));
        assert_eq!(most_common_letter("abcab"), Some(('a', 2)));
        assert_eq!(most_common_letter(""), None);
    }

    #[test]
    fn count_chars_prompt_format() {
        assert_eq!(
            count_chars_prompt("strawberry", 'r'),
            "Count the number of the letter 'r' in the word strawberry."
        );
    }

    #[test]
    fn acronym_prompt_and_grading() {
        assert_eq!(
            acronym_prompt("isman"),
            "Come up with a sequence of words where the first letters would form this acronym: isman"
        );
        assert!(grade_acronym("i see men at night", "isman"));
        assert!(grade_acronym("I, See: (men) at night.", "isman"));
        assert!(!grade_acronym("i see men at", "isman"));
        assert!(!grade_acronym("", "a"));
        assert!(!grade_acronym("anything", ""));
    }

    #[test]
    fn last_number_rules() {
        assert!(grade_last_number("the answer is 3", 3));
        assert!(!grade_last_number("no digits here", 0));
        assert!(grade_last_number("first 5 then 13369358395.", 13369358395));
        assert!(grade_last_number("13,369,358,395", 13369358395));
        assert!(grade_last_number("about 2.5", 3));
        assert!(grade_last_number("about -2.5", -3));
        assert!(grade_last_number("= -42", -42));
        assert!(!grade_last_number("3 or 4", 3));
    }

    #[test]
    fn arithmetic_examples() {
        let mut rng = seeded(0);
        let ex = gen_arithmetic(1000, 10, 0, &mut rng).unwrap();
        assert_eq!(ex.iter().filter(|e| e.prompt.contains(" + ")).count(), 500);
        assert_eq!(ex.iter().filter(|e| e.prompt.contains(" - ")).count(), 500);
        for e in &ex {
            let parts: Vec<&str> = e.prompt.split(' ').collect();
            assert_eq!(parts.len(), 4);
            assert_eq!(parts[0].len(), 10);
            assert_eq!(parts[2].len(), 10);
            assert_eq!(parts[3], "=");
            assert!(e.grade(&e.render_gold()));
        }
        let one = gen_arithmetic(2, 1, 0, &mut rng).unwrap();
        assert!(one.iter().all(|e| e.prompt.len() == "5 - 5 =".len()));
        assert!(gen_arithmetic(1, 0, 0, &mut rng).is_err());
    }

    #[test]
    fn table_example_sum() {
        assert_eq!(8492079913i64 + 4877278482, 13369358395);
        let e = TaskExample {
            id: "x".into(),
            kind: TaskKind::Arithmetic,
            prompt: "8492079913 + 4877278482 =".into(),
            gold: Gold::Integer(13369358395),
            seed: 0,
            segments: None,
        };
        assert!(e.grade("13369358395"));
        assert!(!e.grade(""));
    }

    #[test]
    fn acronyms_are_deterministic() {
        let a = gen_acronyms(20, 5, 1, &mut seeded(1)).unwrap();
        let b = gen_acronyms(20, 5, 1, &mut seeded(1)).unwrap();
        assert_eq!(a, b);
        for e in &a {
            let Gold::Text(s) = &e.gold else { panic!() };
            assert_eq!(s.len(), 5);
            assert!(s.bytes().all(|c| c.is_ascii_lowercase()));
            assert!(e.grade(&e.render_gold()), "{}", e.render_gold());
        }
        assert!(gen_acronyms(0, 5, 1, &mut seeded(1)).unwrap().is_empty());
        assert!(gen_acronyms(1, 0, 1, &mut seeded(1)).is_err());
    }

    #[test]
    fn misspelling_changes_word() {
        let mut rng = seeded(4);
        for _ in 0..200 {
            let m = gen_misspelling("guarantees", &mut rng).unwrap();
            assert_ne!(m, "guarantees");
        }
        assert!(gen_misspelling("a", &mut rng).is_err());
    }

    #[test]
    fn choice_grader() {
        assert!(grade_choice("B", "B"));
        assert!(grade_choice("Answer: B.", "B"));
        assert!(grade_choice("(A) farme", "A"));
        assert!(!grade_choice("A", "B"));
        assert!(!grade_choice("", "A"));
    }

    #[test]
    fn word_repeat_probe() {
        let e = build_probe(TaskKind::WordRepeat, "revelation", 0, &mut seeded(0)).unwrap();
        assert!(e.prompt.contains("Question: revelation\nAnswer:"));
        assert!(e.prompt.starts_with("Repeat each word directly, while correcting any typos.\n\nQuestion: guarantees\nAnswer: guarantees\n\n"));
        assert_eq!(e.gold, Gold::Text("revelation".into()));
        let segs = e.segments.as_ref().unwrap();
        assert_eq!(
            segs[1],
            PromptSegment {
                text: "revelation".into(),
                scheme: Scheme::Char
            }
        );
        assert!(e.grade("revelation"));
        assert!(!e.grade("revelations"));
    }

    #[test]
    fn misspelling_probe() {
        let e = build_probe(TaskKind::IdentifyMisspelling, "farmer", 0, &mut seeded(2)).unwrap();
        let segs = e.segments.as_ref().unwrap();
        let concatenated: String = segs.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(concatenated, e.prompt);
        assert!(e
            .prompt
            .contains("A. guarantees\nB. garantees\n\nAnswer: B"));
        let Gold::Text(letter) = &e.gold else {
            panic!()
        };
        let (correct, wrong) = if letter == "A" {
            (&segs[3], &segs[1])
        } else {
            (&segs[1], &segs[3])
        };
        assert_eq!(correct.text, "farmer");
        assert_eq!(correct.scheme, Scheme::Char);
        assert_ne!(wrong.text, "farmer");
        assert_eq!(wrong.scheme, Scheme::Canonical);
        assert!(e.grade(letter));
    }

    #[test]
    fn probe_encoding_follows_segments() {
        let tok = crate::testing::fixture_tokenizer();
        let runner = SchemeRunner::new(&tok);
        let e = build_probe(TaskKind::WordRepeat, "revelation", 0, &mut seeded(0)).unwrap();
        let seq = e
            .encode(
                &runner,
                &SchemeConfig::new(Scheme::Canonical),
                &mut seeded(0),
            )
            .unwrap();
        assert_eq!(seq.bytes(), e.prompt.as_bytes());
        let units: Vec<_> = seq
            .units()
            .iter()
            .map(|u| String::from_utf8_lossy(u).into_owned())
            .collect();
        let joined = units.join("|");
        assert!(joined.contains("|r|e|v|e|l|a|t|i|o|n|"), "{joined}");
    }

    #[test]
    fn task_kind_names() {
        for kind in [
            TaskKind::CountChars,
            TaskKind::Acronym,
            TaskKind::Arithmetic,
            TaskKind::WordRepeat,
            TaskKind::IdentifyMisspelling,
        ] {
            assert_eq!(kind.name().parse::<TaskKind>().unwrap(), kind);
            assert_eq!(
                serde_json::to_string(&kind).unwrap(),
                format!("\"{}\"", kind.name())
            );
        }
    }

    #[test]
    fn examples_round_trip_through_json() {
        let mut rng = seeded(8);
        let mut examples = gen_arithmetic(4, MAX_OPERAND_DIGITS, 8, &mut rng).unwrap();
        examples.extend(gen_acronyms(2, 5, 8, &mut rng).unwrap());
        examples.push(build_probe(TaskKind::IdentifyMisspelling, "farmer", 8, &mut rng).unwrap());
        for ex in examples {
            let json = serde_json::to_string(&ex).unwrap();
            assert_eq!(serde_json::from_str::<TaskExample>(&json).unwrap(), ex);
        }
    }
}
