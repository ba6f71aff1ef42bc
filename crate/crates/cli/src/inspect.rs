use std::io::BufRead;

use noncanon::schemes::{bucket_ratios, ratio_of_lengths};
use noncanon::{count_segmentations, enumerate_segmentations, Histogram, Ratio, Tokenizer};
use serde::{Deserialize, Serialize};

use crate::args::{CountArgs, EnumerateArgs, StatsArgs};
use crate::failure::{Failure, Outcome};
use crate::jsonl::{self, Output};

fn token_bytes(tok: &Tokenizer, token: &str, rendered: bool) -> Outcome<Vec<u8>> {
    if rendered {
        tok.vocab()
            .parse_unit(token)
            .ok_or_else(|| Failure::usage(format!("{token:?} is not in vocab.json notation")))
    } else {
        Ok(token.as_bytes().to_vec())
    }
}

/// Print one count per token. Tokens without any segmentation print 0 and
/// make the command fail after all counts are written.
pub fn count(args: &CountArgs, tok: &Tokenizer) -> Outcome<()> {
    let mut tokens = args.tokens.clone();
    if let Some(path) = &args.input {
        for line in jsonl::open_input(path)?.lines() {
            tokens.push(line.map_err(|e| Failure::data(e.to_string()))?);
        }
    }
    if tokens.is_empty() {
        return Err(Failure::usage("no tokens given"));
    }
    let mut out = Output::create("-".as_ref())?;
    let mut uncoverable = 0;
    for token in &tokens {
        let count = count_segmentations(&token_bytes(tok, token, args.rendered)?, tok.vocab());
        if count.is_zero() {
            uncoverable += 1;
        }
        out.write_line(&count.to_string())?;
    }
    out.finish()?;
    if uncoverable > 0 {
        return Err(Failure::data(format!(
            "{uncoverable} token(s) have no segmentation"
        )));
    }
    Ok(())
}

/// Print segmentations as JSON arrays of units in vocab.json notation.
pub fn enumerate(args: &EnumerateArgs, tok: &Tokenizer) -> Outcome<()> {
    let bytes = token_bytes(tok, &args.token, args.rendered)?;
    let segs = enumerate_segmentations(&bytes, tok.vocab(), args.limit);
    if segs.is_empty() {
        return Err(Failure::data(format!(
            "{:?} has no segmentation",
            args.token
        )));
    }
    let mut out = Output::create("-".as_ref())?;
    for seg in segs {
        let units: Vec<String> = seg.units().iter().map(|u| tok.vocab().render(u)).collect();
        out.write(&units)?;
    }
    out.finish()
}

#[derive(Debug, Deserialize)]
struct RatioFields {
    #[serde(rename = "type")]
    kind: Option<String>,
    id: Option<String>,
    ids: Option<Vec<u32>>,
    canonical_len: Option<usize>,
    ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileStats {
    pub path: String,
    pub records: usize,
    pub mean_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsReport {
    pub files: Vec<FileStats>,
    pub histogram: Histogram,
}

pub fn parse_edges(spec: &str) -> Outcome<Vec<Ratio>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            Ratio::parse_decimal(s).map_err(|e| Failure::usage(format!("bucket edge {s:?}: {e}")))
        })
        .collect()
}

pub fn stats(args: &StatsArgs) -> Outcome<()> {
    let edges = parse_edges(&args.buckets)?;
    let report = stats_report(args, &edges)?;
    let mut out = Output::create("-".as_ref())?;
    out.write(&report)?;
    out.finish()
}

pub fn stats_report(args: &StatsArgs, edges: &[Ratio]) -> Outcome<StatsReport> {
    let mut all = Vec::new();
    let mut files = Vec::new();
    for path in &args.files {
        let name = path.display().to_string();
        let mut ratios = Vec::new();
        for row in jsonl::read::<RatioFields>(path)? {
            let row = row?;
            if row.kind.is_some() {
                continue;
            }
            let id = row.id.unwrap_or_default();
            let missing =
                |field: &str| Failure::data(format!("{name}: record {id:?} lacks {field}"));
            let alt = row.ids.ok_or_else(|| missing("ids"))?.len();
            let canon = row.canonical_len.ok_or_else(|| missing("canonical_len"))?;
            let stated = row.ratio.ok_or_else(|| missing("ratio"))?;
            if canon == 0 {
                continue;
            }
            let exact = ratio_of_lengths(alt, canon)?;
            if (exact.to_f64() - stated).abs() > 1e-9 {
                return Err(Failure::data(format!(
                    "{name}: record {id:?} ratio {stated} disagrees with {alt}/{canon}"
                )));
            }
            ratios.push(exact);
        }
        let mean_ratio = (!ratios.is_empty())
            .then(|| ratios.iter().map(|r| r.to_f64()).sum::<f64>() / ratios.len() as f64);
        files.push(FileStats {
            path: name,
            records: ratios.len(),
            mean_ratio,
        });
        all.extend(ratios);
    }
    let histogram = bucket_ratios(&all, edges)?;
    Ok(StatsReport { files, histogram })
}
