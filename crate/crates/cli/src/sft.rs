use noncanon::{format_sft, Error, Tokenizer};
use serde::Deserialize;

use crate::args::SftArgs;
use crate::failure::Outcome;
use crate::jsonl::{self, Output};

#[derive(Debug, Clone, Deserialize)]
pub struct Pair {
    #[serde(default)]
    pub id: Option<String>,
    pub instruction: String,
    pub response: String,
}

/// Format every pair. Pairs whose response is too short to split are
/// skipped and counted; other failures stop the run.
pub fn run(args: &SftArgs, tok: &Tokenizer) -> Outcome<()> {
    let pool = jsonl::pool(args.parallel.jobs)?;
    let mut out = Output::create(&args.output)?;
    let (mut written, mut skipped) = (0usize, 0usize);
    jsonl::map_batched(
        jsonl::read::<Pair>(&args.input)?,
        args.parallel.batch_size,
        &pool,
        |pair| {
            (
                pair.id.clone(),
                format_sft(&pair.instruction, &pair.response, args.mode, tok),
            )
        },
        |(id, rec)| match rec {
            Ok(rec) => {
                written += 1;
                out.write(&rec)
            }
            Err(Error::InsufficientTokens { needed, found }) => {
                skipped += 1;
                eprintln!(
                    "skipped {}: response has {found} tokens, needs {needed}",
                    id.as_deref().unwrap_or("pair")
                );
                Ok(())
            }
            Err(e) => Err(e.into()),
        },
    )?;
    out.finish()?;
    eprintln!("{written} written, {skipped} skipped");
    Ok(())
}
