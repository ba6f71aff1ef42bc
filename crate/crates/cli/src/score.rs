use std::time::Duration;

use noncanon::metrics::{
    retention, score_generation, GenerationScore, GrammarEndpoint, GrammarProvider, HttpGrammar,
    MetricReport, WordList,
};
use serde::Deserialize;

use crate::args::ScoreArgs;
use crate::failure::{Failure, Outcome};
use crate::jsonl::{self, Output};

#[derive(Debug, Clone, Deserialize)]
pub struct ScoreInput {
    pub id: String,
    pub generation: String,
    #[serde(default)]
    pub mistakes: Option<usize>,
}

pub fn provider(args: &ScoreArgs) -> Outcome<Option<HttpGrammar>> {
    let Some(url) = &args.grammar_endpoint else {
        return Ok(None);
    };
    let timeout = Duration::try_from_secs_f64(args.timeout)
        .map_err(|e| Failure::usage(format!("--timeout {}: {e}", args.timeout)))?;
    Ok(Some(HttpGrammar::new(GrammarEndpoint {
        url: url.clone(),
        timeout,
        max_in_flight: args.max_in_flight,
    })?))
}

/// Score one input. A precomputed mistake count wins over the provider.
pub fn score_one(
    rec: &ScoreInput,
    wordlist: &WordList,
    provider: Option<&dyn GrammarProvider>,
) -> noncanon::Result<GenerationScore> {
    let mistakes = match (rec.mistakes, provider) {
        (Some(m), _) => Some(m),
        (None, Some(p)) if !rec.generation.trim().is_empty() => {
            Some(p.count_mistakes(&rec.generation)?)
        }
        _ => None,
    };
    Ok(score_generation(
        &rec.id,
        &rec.generation,
        wordlist,
        mistakes,
    ))
}

pub fn run(args: &ScoreArgs) -> Outcome<()> {
    let wordlist = WordList::from_file(&args.wordlist)?;
    let http = provider(args)?;
    let provider = http.as_ref().map(|p| p as &dyn GrammarProvider);
    let pool = jsonl::pool(args.parallel.jobs)?;
    let mut per_record = args
        .output
        .as_ref()
        .map(|p| Output::create(p))
        .transpose()?;
    let mut scores = Vec::new();
    jsonl::map_batched(
        jsonl::read::<ScoreInput>(&args.input)?,
        args.parallel.batch_size,
        &pool,
        |rec| score_one(&rec, &wordlist, provider),
        |score| {
            let score = score?;
            if let Some(out) = per_record.as_mut() {
                out.write(&score)?;
            }
            scores.push(score);
            Ok(())
        },
    )?;
    if let Some(out) = per_record {
        out.finish()?;
    }
    let mut report = MetricReport::from_scores(&scores);
    if let Some(path) = &args.canonical_report {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        let canon: MetricReport = serde_json::from_str(text.trim())
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        report.retention.insert(
            "spelling".into(),
            retention(canon.spelling, report.spelling)?,
        );
        if let (Some(c), Some(a)) = (canon.grammaticality, report.grammaticality) {
            report
                .retention
                .insert("grammaticality".into(), retention(c, a)?);
        }
    }
    let mut out = Output::create(&args.report)?;
    out.write(&report)?;
    out.finish()
}
