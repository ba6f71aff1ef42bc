use std::collections::HashSet;
use std::path::{Path, PathBuf};

use noncanon::rng::{derive_seed, seeded};
use noncanon::{length_ratio, Scheme, SchemeConfig, SchemeRunner, Tokenizer};
use serde::{Deserialize, Serialize};

use crate::args::EncodeArgs;
use crate::failure::{Failure, Outcome};
use crate::jsonl::{self, Output};

#[derive(Debug, Clone, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Header {
    #[serde(rename = "type")]
    pub kind: String,
    pub tool: String,
    pub version: String,
    pub tokenizer: String,
    pub seed: u64,
    pub defaults: SchemeConfig,
}

/// One encoded corpus record. `seed` is the record's own seed, derived from
/// the global seed and the id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodedRecord {
    pub id: String,
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_size: Option<usize>,
    pub seed: u64,
    pub ids: Vec<u32>,
    pub units: Vec<String>,
    pub canonical_len: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trailer {
    #[serde(rename = "type")]
    pub kind: String,
    pub records: usize,
    pub errors: usize,
    pub complete: bool,
}

pub fn header(tok: &Tokenizer, defaults: &SchemeConfig) -> Header {
    Header {
        kind: "header".into(),
        tool: "noncanon".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        tokenizer: tok.fingerprint(),
        seed: defaults.seed,
        defaults: defaults.clone(),
    }
}

/// Encode one record with its own generator, so the result does not depend
/// on processing order.
pub fn encode_record(
    runner: &SchemeRunner<'_>,
    defaults: &SchemeConfig,
    rec: &CorpusRecord,
) -> noncanon::Result<EncodedRecord> {
    let tok = runner.tokenizer();
    let seed = derive_seed(defaults.seed, &rec.id);
    let cfg = SchemeConfig {
        seed,
        ..defaults.clone()
    };
    let tokens = runner.apply_with_rng(&rec.text, &cfg, &mut seeded(seed))?;
    let canonical = tok.encode_canonical(&rec.text)?;
    let ratio = if canonical.is_empty() && tokens.is_empty() {
        1.0
    } else {
        length_ratio(&tokens, &canonical)?.to_f64()
    };
    Ok(EncodedRecord {
        id: rec.id.clone(),
        scheme: cfg.scheme,
        p: (cfg.scheme == Scheme::Dropout).then_some(cfg.p),
        group_size: (cfg.scheme == Scheme::DigitsRight).then_some(cfg.digit_group_size),
        seed,
        ids: tokens.ids().to_vec(),
        units: tokens
            .units()
            .iter()
            .map(|u| tok.vocab().render(u))
            .collect(),
        canonical_len: canonical.len(),
        ratio,
    })
}

/// Output path for one value of a dropout grid.
pub fn grid_path(output: &Path, p: f64) -> PathBuf {
    let s = output.to_string_lossy();
    if s.contains("{p}") {
        return PathBuf::from(s.replace("{p}", &p.to_string()));
    }
    match (output.file_stem(), output.extension()) {
        (Some(stem), Some(ext)) => output.with_file_name(format!(
            "{}.p{p}.{}",
            stem.to_string_lossy(),
            ext.to_string_lossy()
        )),
        _ => PathBuf::from(format!("{s}.p{p}")),
    }
}

pub fn run(args: &EncodeArgs, tok: &Tokenizer) -> Outcome<()> {
    let base = SchemeConfig {
        scheme: args.scheme,
        p: 0.0,
        seed: args.seed,
        digit_group_size: args.digit_group_size,
        force_bytes: args.force_bytes,
        exclude_identity: args.exclude_identity,
    };
    if !args.p.is_empty() && args.scheme != Scheme::Dropout {
        return Err(Failure::usage("--p only applies to --scheme dropout"));
    }
    let grid: Vec<f64> = if args.p.is_empty() {
        vec![0.0]
    } else {
        args.p.clone()
    };
    if grid.len() > 1 && jsonl::is_stdio(&args.output) {
        return Err(Failure::usage(
            "a grid of --p values needs an --output file",
        ));
    }
    let runner = SchemeRunner::new(tok);
    let pool = jsonl::pool(args.parallel.jobs)?;
    let mut failed = None;
    for &p in &grid {
        let cfg = SchemeConfig { p, ..base.clone() };
        cfg.validate()?;
        let path = if grid.len() > 1 {
            grid_path(&args.output, p)
        } else {
            args.output.clone()
        };
        if let Err(f) = encode_file(
            &args.input,
            &path,
            &runner,
            &cfg,
            args.parallel.batch_size,
            &pool,
        ) {
            eprintln!("error: {f}");
            failed.get_or_insert(f);
        }
    }
    failed.map_or(Ok(()), Err)
}

fn encode_file(
    input: &Path,
    output: &Path,
    runner: &SchemeRunner<'_>,
    cfg: &SchemeConfig,
    batch: usize,
    pool: &rayon::ThreadPool,
) -> Outcome<()> {
    let mut out = Output::create(output)?;
    out.write(&header(runner.tokenizer(), cfg))?;
    let mut seen = HashSet::new();
    let (mut records, mut errors) = (0usize, 0usize);
    let mut stopped = None;
    let result = jsonl::map_batched(
        jsonl::read::<CorpusRecord>(input)?,
        batch,
        pool,
        |rec| {
            let encoded = encode_record(runner, cfg, &rec);
            (rec.id, encoded)
        },
        |(id, encoded)| {
            if !seen.insert(id.clone()) {
                return Err(Failure::data(format!("duplicate record id {id:?}")));
            }
            match encoded {
                Ok(rec) => {
                    records += 1;
                    out.write(&rec)
                }
                Err(e) => {
                    errors += 1;
                    eprintln!("error: record {id:?}: {e}");
                    Ok(())
                }
            }
        },
    );
    if let Err(f) = result {
        stopped = Some(f);
    }
    let complete = stopped.is_none() && errors == 0;
    out.write(&Trailer {
        kind: "trailer".into(),
        records,
        errors,
        complete,
    })?;
    out.finish()?;
    match stopped {
        Some(f) => Err(f),
        None if errors > 0 => Err(Failure::data(format!(
            "{errors} record(s) failed; {} is partial",
            output.display()
        ))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_paths() {
        assert_eq!(
            grid_path(Path::new("out/enc.jsonl"), 0.5),
            PathBuf::from("out/enc.p0.5.jsonl")
        );
        assert_eq!(
            grid_path(Path::new("enc-{p}.jsonl"), 0.1),
            PathBuf::from("enc-0.1.jsonl")
        );
        assert_eq!(grid_path(Path::new("enc"), 1.0), PathBuf::from("enc.p1"));
    }
}
