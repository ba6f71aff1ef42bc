use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use noncanon::sft::SftMode;
use noncanon::{Scheme, TaskKind};

#[derive(Debug, Parser)]
#[command(
    name = "noncanon",
    version,
    about = "Canonical and non-canonical BPE tokenizations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize a JSONL corpus with one scheme.
    Encode(EncodeArgs),
    /// Count the segmentations of tokens.
    Count(CountArgs),
    /// List the segmentations of one token.
    Enumerate(EnumerateArgs),
    /// Length-ratio histogram of encoded files.
    Stats(StatsArgs),
    /// Generate a task dataset.
    Gen(GenArgs),
    /// Grade generations against a task dataset.
    Grade(GradeArgs),
    /// Spelling and grammaticality of generations.
    Score(ScoreArgs),
    /// Render instruction/response pairs in an SFT data format.
    SftFormat(SftArgs),
}

#[derive(Debug, Clone, Args)]
pub struct TokenizerArgs {
    /// vocab.json of the tokenizer.
    #[arg(long, env = "NONCANON_VOCAB")]
    pub vocab: Option<PathBuf>,
    /// merges.txt of the tokenizer.
    #[arg(long, env = "NONCANON_MERGES")]
    pub merges: Option<PathBuf>,
    /// JSON pretokenizer configuration.
    #[arg(long = "pretok-config")]
    pub pretok_config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ParallelArgs {
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Records held in memory at once.
    #[arg(long = "batch-size", default_value_t = 4096)]
    pub batch_size: usize,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[command(flatten)]
    pub parallel: ParallelArgs,
    /// Input corpus, one {"id", "text"} object per line; "-" for stdin.
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    /// Output file; "-" for stdout. With several --p values, "{p}" in the
    /// name is replaced by each value, otherwise ".p<value>" is inserted
    /// before the extension.
    #[arg(long, default_value = "-")]
    pub output: PathBuf,
    #[arg(long, default_value = "canonical")]
    pub scheme: Scheme,
    /// Dropout probability; repeat or comma-separate for a grid.
    #[arg(long = "p", value_delimiter = ',')]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "digit-group-size", default_value_t = noncanon::schemes::DEFAULT_DIGIT_GROUP)]
    pub digit_group_size: usize,
    /// Char scheme: byte tokens even for characters that are units.
    #[arg(long = "force-bytes")]
    pub force_bytes: bool,
    /// Random scheme: never keep a token whole unless it has no split.
    #[arg(long = "exclude-identity")]
    pub exclude_identity: bool,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    /// Tokens to count.
    pub tokens: Vec<String>,
    /// File with one token per line.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Tokens are written in the byte-to-printable alphabet of vocab.json.
    #[arg(long)]
    pub rendered: bool,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    pub token: String,
    #[arg(long, default_value_t = 1000)]
    pub limit: usize,
    #[arg(long)]
    pub rendered: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Files written by `encode`.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Comma-separated, strictly increasing bucket edges.
    #[arg(long, default_value = "1,1.25,1.5,1.75,2,2.5,3")]
    pub buckets: String,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[arg(long)]
    pub task: TaskKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Acronym length.
    #[arg(long, default_value_t = 5)]
    pub length: usize,
    /// Operand digits for arithmetic.
    #[arg(long, default_value_t = 10)]
    pub digits: usize,
    /// Word list for the word probes.
    #[arg(long)]
    pub wordlist: Option<PathBuf>,
    #[arg(long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct GradeArgs {
    /// Dataset written by `gen`.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Generations, one {"id", "generation"} object per line.
    #[arg(long)]
    pub generations: PathBuf,
    /// Per-example verdicts.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Report of the canonical run, for retention.
    #[arg(long = "canonical-report")]
    pub canonical_report: Option<PathBuf>,
    /// Canonical accuracy in percent, for retention.
    #[arg(long = "canonical-accuracy", conflicts_with = "canonical_report")]
    pub canonical_accuracy: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub parallel: ParallelArgs,
    /// Generations, one {"id", "generation"} object per line, optionally
    /// with a precomputed "mistakes" count.
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long)]
    pub wordlist: PathBuf,
    #[arg(long = "grammar-endpoint", env = "NONCANON_GRAMMAR_ENDPOINT")]
    pub grammar_endpoint: Option<String>,
    /// Grammar request timeout in seconds.
    #[arg(long, env = "NONCANON_GRAMMAR_TIMEOUT", default_value_t = 30.0)]
    pub timeout: f64,
    #[arg(long = "max-in-flight", default_value_t = 4)]
    pub max_in_flight: usize,
    /// Per-record scores.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Canonical-run report; adds retention to the summary.
    #[arg(long = "canonical-report")]
    pub canonical_report: Option<PathBuf>,
    #[arg(long, default_value = "-")]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct SftArgs {
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[command(flatten)]
    pub parallel: ParallelArgs,
    /// Pairs, one {"instruction", "response"} object per line.
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long)]
    pub mode: SftMode,
    #[arg(long, default_value = "-")]
    pub output: PathBuf,
}
