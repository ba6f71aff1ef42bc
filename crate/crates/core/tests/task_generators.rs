use noncanon::rng::seeded;
use noncanon::stats::chi_square_uniform;
use noncanon::tasks::{
    build_probe, count_chars_candidates, gen_acronyms, gen_arithmetic, gen_count_chars,
    gen_misspelling,
};
use noncanon::testing::fixture_tokenizer;
use noncanon::{Gold, TaskKind};

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut prev = row[0];
        row[0] = i;
        for j in 1..=b.len() {
            let cur = row[j];
            row[j] = (row[j] + 1)
                .min(row[j - 1] + 1)
                .min(prev + usize::from(a[i - 1] != b[j - 1]));
            prev = cur;
        }
    }
    row[b.len()]
}

#[test]
fn count_chars_from_fixture_vocab() {
    let tok = fixture_tokenizer();
    let examples = gen_count_chars(tok.vocab(), 1001, 5, &mut seeded(5)).unwrap();
    assert_eq!(examples.len(), 1001);
    let candidates = count_chars_candidates(tok.vocab());
    let mut seen = std::collections::HashSet::new();
    for ex in &examples {
        let word = ex.prompt.rsplit(' ').next().unwrap().trim_end_matches('.');
        assert!(
            (5..=10).contains(&word.len()) && word.bytes().all(|b| b.is_ascii_lowercase()),
            "{word}"
        );
        assert!(candidates.iter().any(|c| c == word));
        assert!(seen.insert(word.to_string()), "duplicate {word}");
        let letter = ex
            .prompt
            .split('\'')
            .nth(1)
            .unwrap()
            .chars()
            .next()
            .unwrap();
        let tally = word.chars().filter(|&c| c == letter).count() as i64;
        assert_eq!(ex.gold, Gold::Integer(tally));
        assert!(word
            .chars()
            .all(|c| word.chars().filter(|&d| d == c).count() as i64 <= tally));
        assert!(ex.grade(&ex.render_gold()));
    }
}

#[test]
fn acronym_letters_are_uniform() {
    let examples = gen_acronyms(3594, 5, 1, &mut seeded(1)).unwrap();
    let mut counts = [0u64; 26];
    for ex in &examples {
        let Gold::Text(a) = &ex.gold else { panic!() };
        for b in a.bytes() {
            counts[(b - b'a') as usize] += 1;
        }
        assert!(ex.grade(&ex.render_gold()));
    }
    assert!(chi_square_uniform(&counts).1 > 0.01);
}

#[test]
fn arithmetic_operands_and_gold() {
    let examples = gen_arithmetic(1000, 10, 2, &mut seeded(2)).unwrap();
    let plus = examples.iter().filter(|e| e.prompt.contains(" + ")).count();
    assert_eq!(plus, 500);
    for ex in &examples {
        let parts: Vec<&str> = ex.prompt.split(' ').collect();
        assert_eq!(parts.len(), 4);
        let (a, b) = (parts[0], parts[2]);
        assert!(a.len() == 10 && b.len() == 10 && !a.starts_with('0') && !b.starts_with('0'));
        let (a, b): (i64, i64) = (a.parse().unwrap(), b.parse().unwrap());
        let want = if parts[1] == "+" { a + b } else { a - b };
        assert_eq!(ex.gold, Gold::Integer(want));
        assert!(ex.grade(&ex.render_gold()));
        assert!(!ex.grade(""));
    }
}

#[test]
fn misspellings_are_one_edit_away() {
    let mut rng = seeded(9);
    for _ in 0..1000 {
        let m = gen_misspelling("farmer", &mut rng).unwrap();
        assert_eq!(levenshtein("farmer", &m), 1, "{m}");
    }
}

#[test]
fn probe_gold_letters_are_balanced() {
    let mut rng = seeded(4);
    let mut counts = [0u64; 2];
    for i in 0..1000 {
        let ex = build_probe(TaskKind::IdentifyMisspelling, "farmer", i, &mut rng).unwrap();
        let Gold::Text(letter) = &ex.gold else {
            panic!()
        };
        counts[usize::from(letter == "B")] += 1;
        assert!(ex.grade(&ex.render_gold()));
    }
    assert!(chi_square_uniform(&counts).1 > 0.01, "{counts:?}");
}
