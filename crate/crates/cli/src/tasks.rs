use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use noncanon::metrics::{retention, WordList};
use noncanon::rng::{record_rng, seeded};
use noncanon::tasks::{gen_acronyms, gen_arithmetic, gen_count_chars, ProbeBuilder};
use noncanon::{TaskExample, TaskKind, Tokenizer};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::args::{GenArgs, GradeArgs};
use crate::failure::{Failure, Outcome};
use crate::jsonl::{self, Output};

pub fn generate(args: &GenArgs, tok: Option<&Tokenizer>) -> Outcome<Vec<TaskExample>> {
    let mut rng = seeded(args.seed);
    let examples = match args.task {
        TaskKind::CountChars => {
            let tok =
                tok.ok_or_else(|| Failure::usage("count_chars needs --vocab and --merges"))?;
            gen_count_chars(tok.vocab(), args.n, args.seed, &mut rng)?
        }
        TaskKind::Acronym => gen_acronyms(args.n, args.length, args.seed, &mut rng)?,
        TaskKind::Arithmetic => gen_arithmetic(args.n, args.digits, args.seed, &mut rng)?,
        kind @ (TaskKind::WordRepeat | TaskKind::IdentifyMisspelling) => {
            let path = args
                .wordlist
                .as_ref()
                .ok_or_else(|| Failure::usage(format!("{kind} needs --wordlist")))?;
            let list = WordList::from_file(path)?;
            // a misspelling needs a deletion that leaves a character
            let min_len = if kind == TaskKind::IdentifyMisspelling {
                2
            } else {
                1
            };
            let words: Vec<&String> = list
                .words()
                .iter()
                .filter(|w| w.chars().count() >= min_len)
                .collect();
            if args.n > words.len() {
                return Err(Failure::data(format!(
                    "{} words requested, the list has {}",
                    args.n,
                    words.len()
                )));
            }
            let builder = ProbeBuilder::default();
            sample(&mut rng, words.len(), args.n)
                .into_iter()
                .enumerate()
                .map(|(i, w)| {
                    let id = format!("{kind}-{i:05}");
                    let mut rng = record_rng(args.seed, &id);
                    builder.build(kind, &id, words[w], args.seed, &mut rng)
                })
                .collect::<noncanon::Result<Vec<_>>>()?
        }
    };
    Ok(examples)
}

pub fn gen(args: &GenArgs, tok: Option<&Tokenizer>) -> Outcome<()> {
    let examples = generate(args, tok)?;
    let mut out = Output::create(&args.output)?;
    for ex in &examples {
        out.write(ex)?;
    }
    out.finish()
}

#[derive(Debug, Clone, Deserialize)]
pub struct Generation {
    pub id: String,
    pub generation: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub kind: TaskKind,
    pub correct: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradeReport {
    pub total: usize,
    pub correct: usize,
    /// Percent correct.
    pub accuracy: f64,
    pub by_task: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing_generations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unknown_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retention: Option<f64>,
}

#[derive(Deserialize)]
struct AccuracyOnly {
    accuracy: f64,
}

pub fn read_accuracy(path: &Path) -> Outcome<f64> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    let report: AccuracyOnly = serde_json::from_str(text.trim())
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    Ok(report.accuracy)
}

/// Grade `generations` against `dataset`. Examples without a generation count
/// as wrong; generations for unknown ids are listed and ignored.
pub fn grade_all(
    dataset: &[TaskExample],
    generations: &[Generation],
) -> Outcome<(Vec<Verdict>, GradeReport)> {
    let mut by_id: HashMap<&str, &str> = HashMap::new();
    let known: HashSet<&str> = dataset.iter().map(|e| e.id.as_str()).collect();
    let mut unknown_ids = Vec::new();
    for g in generations {
        if !known.contains(g.id.as_str()) {
            unknown_ids.push(g.id.clone());
        } else if by_id.insert(&g.id, &g.generation).is_some() {
            return Err(Failure::data(format!("two generations for {:?}", g.id)));
        }
    }
    let mut verdicts = Vec::with_capacity(dataset.len());
    let mut missing_generations = Vec::new();
    let mut tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for ex in dataset {
        let correct = match by_id.get(ex.id.as_str()) {
            Some(g) => ex.grade(g),
            None => {
                missing_generations.push(ex.id.clone());
                false
            }
        };
        let t = tally.entry(ex.kind.to_string()).or_default();
        t.0 += usize::from(correct);
        t.1 += 1;
        verdicts.push(Verdict {
            id: ex.id.clone(),
            kind: ex.kind,
            correct,
        });
    }
    let correct = verdicts.iter().filter(|v| v.correct).count();
    let pct = |c: usize, n: usize| {
        if n == 0 {
            0.0
        } else {
            100.0 * c as f64 / n as f64
        }
    };
    let report = GradeReport {
        total: verdicts.len(),
        correct,
        accuracy: pct(correct, verdicts.len()),
        by_task: tally
            .into_iter()
            .map(|(k, (c, n))| (k, pct(c, n)))
            .collect(),
        missing_generations,
        unknown_ids,
        retention: None,
    };
    Ok((verdicts, report))
}

pub fn grade(args: &GradeArgs) -> Outcome<()> {
    let dataset: Vec<TaskExample> = jsonl::read_all(&args.dataset)?;
    let generations: Vec<Generation> = jsonl::read_all(&args.generations)?;
    let (verdicts, mut report) = grade_all(&dataset, &generations)?;
    let canon = match (&args.canonical_report, args.canonical_accuracy) {
        (Some(path), _) => Some(read_accuracy(path)?),
        (None, acc) => acc,
    };
    if let Some(canon) = canon {
        report.retention = Some(retention(canon, report.accuracy)?);
    }
    if let Some(path) = &args.output {
        let mut out = Output::create(path)?;
        for v in &verdicts {
            out.write(v)?;
        }
        out.finish()?;
    }
    for id in &report.unknown_ids {
        eprintln!("warning: generation for unknown id {id:?}");
    }
    for id in &report.missing_generations {
        eprintln!("warning: no generation for {id:?}");
    }
    let mut out = Output::create("-".as_ref())?;
    out.write(&report)?;
    out.finish()
}
