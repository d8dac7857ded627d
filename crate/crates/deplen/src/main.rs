use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use deplen::cli::{
    cmd_fit, cmd_mix, cmd_null, cmd_report, cmd_stats, CliError, FitScope, RunConfig, TableFormat,
};
use deplen::conllu::PunctMode;

/// Dependency length statistics for CoNLL-U treebanks.
///
/// Global averages of dependency length mix sentences of different length,
/// so every command writes per-length companion tables next to pooled
/// numbers, plus the effective configuration for reproducibility.
#[derive(Parser)]
#[command(name = "deplen", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corpus summary: MDD, ADL and the per-length table
    Stats(CorpusArgs),
    /// Seeded random-arrangement baseline against the corpus's own trees
    Null(CorpusArgs),
    /// Evaluate a mixture spec file into plot-ready distributions
    Mix {
        /// Mixture spec: flat `key = value` lines (see README)
        #[arg(long)]
        spec: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Fit truncated geometric, zeta and two-regime models to dependency lengths
    Fit {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// `mixed` pools all dependencies; `per-n=N` restricts to length N
        #[arg(long, default_value = "mixed")]
        scope: FitScope,
    },
    /// stats + null + empirical mixture + mixed fits in one run
    Report(CorpusArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// CoNLL-U input file
    #[arg(long)]
    input: PathBuf,
    /// Minimum sentence length entering the statistics
    #[arg(long, default_value_t = 3)]
    n_min: usize,
    /// Keep or drop PUNCT tokens (dropping re-indexes positions)
    #[arg(long, value_enum, default_value_t = PunctArg::Keep)]
    punct: PunctArg,
    /// Seed for every stochastic step
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random arrangements per sentence in Monte Carlo baselines
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Sentences a per-length row needs to enter summary.json
    #[arg(long, default_value_t = 3)]
    min_row_sentences: u64,
    /// Dependencies a fit scope must provide
    #[arg(long, default_value_t = 30)]
    min_fit_deps: u64,
    /// Monte Carlo worker threads (0 = auto); results do not depend on this
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum PunctArg {
    Keep,
    Drop,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl CorpusArgs {
    fn into_config(self) -> RunConfig {
        RunConfig {
            input: self.input,
            n_min: self.n_min,
            punct: match self.punct {
                PunctArg::Keep => PunctMode::Keep,
                PunctArg::Drop => PunctMode::Drop,
            },
            seed: self.seed,
            samples: self.samples,
            out_dir: self.out,
            format: match self.format {
                FormatArg::Csv => TableFormat::Csv,
                FormatArg::Json => TableFormat::Json,
            },
            min_row_sentences: self.min_row_sentences,
            min_fit_deps: self.min_fit_deps,
            workers: self.workers,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stats(args) => cmd_stats(&args.into_config()),
        Command::Null(args) => cmd_null(&args.into_config()),
        Command::Mix { spec, out, format } => cmd_mix(
            &spec,
            &out,
            match format {
                FormatArg::Csv => TableFormat::Csv,
                FormatArg::Json => TableFormat::Json,
            },
        ),
        Command::Fit { corpus, scope } => cmd_fit(&corpus.into_config(), scope),
        Command::Report(args) => cmd_report(&args.into_config()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
