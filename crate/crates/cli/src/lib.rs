//! Command implementations behind the `noncanon` binary.

pub mod args;
pub mod encode;
pub mod failure;
pub mod inspect;
pub mod jsonl;
pub mod score;
pub mod sft;
pub mod tasks;

use noncanon::{PretokConfig, Tokenizer};

use crate::args::{Cli, Command, TokenizerArgs};
use crate::failure::{Failure, Outcome};

pub fn load_tokenizer(args: &TokenizerArgs) -> Outcome<Tokenizer> {
    let (Some(vocab), Some(merges)) = (&args.vocab, &args.merges) else {
        return Err(Failure::usage("--vocab and --merges are required"));
    };
    let config = match &args.pretok_config {
        Some(path) => PretokConfig::from_file(path)?,
        None => PretokConfig::default(),
    };
    Ok(Tokenizer::load(vocab, merges, &config)?)
}

pub fn run(cli: &Cli) -> Outcome<()> {
    match &cli.command {
        Command::Encode(a) => encode::run(a, &load_tokenizer(&a.tokenizer)?),
        Command::Count(a) => inspect::count(a, &load_tokenizer(&a.tokenizer)?),
        Command::Enumerate(a) => inspect::enumerate(a, &load_tokenizer(&a.tokenizer)?),
        Command::Stats(a) => inspect::stats(a),
        Command::Gen(a) => {
            let tok = if a.tokenizer.vocab.is_some() {
                Some(load_tokenizer(&a.tokenizer)?)
            } else {
                None
            };
            tasks::gen(a, tok.as_ref())
        }
        Command::Grade(a) => tasks::grade(a),
        Command::Score(a) => score::run(a),
        Command::SftFormat(a) => sft::run(a, &load_tokenizer(&a.tokenizer)?),
    }
}
