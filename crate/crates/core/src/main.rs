use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pdfvec::batch::{run_extract, RunConfig};
use pdfvec::corpus::{generate_corpus, CorpusKind};
use pdfvec::schema;
use pdfvec::vector::OutputFormat;

#[derive(Parser)]
#[command(
    name = "pdfvec",
    version,
    about = "Static feature vectors for PDF files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Benign,
    MaliciousLike,
}

#[derive(Subcommand)]
enum Command {
    /// Extract feature vectors from PDF files and directories.
    Extract {
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        recursive: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        window: u8,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        workers: u16,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        label: Option<u8>,
        #[arg(long)]
        fail_fast: bool,
        /// Also write raw metadata strings as JSON Lines.
        #[arg(long)]
        dump_meta: Option<PathBuf>,
    },
    /// Write a deterministic synthetic corpus.
    GenCorpus {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Show the feature schema.
    Schema {
        /// Print the column reference (name, group, kind) as TSV.
        #[arg(long, required = true)]
        print: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match cli.command {
        Command::Extract {
            inputs,
            recursive,
            out,
            format,
            window,
            workers,
            label,
            fail_fast,
            dump_meta,
        } => {
            let config = RunConfig {
                recursive,
                format: match format {
                    Format::Csv => OutputFormat::Csv,
                    Format::Jsonl => OutputFormat::Jsonl,
                },
                window: window.into(),
                worker_count: workers.into(),
                label,
                fail_fast,
                dump_meta,
                ..RunConfig::new(inputs, out)
            };
            match run_extract(&config) {
                Ok(report) => {
                    eprintln!(
                        "seen {} extracted {} failed {} in {:.3}s ({:.4}s/file)",
                        report.files_seen,
                        report.files_extracted,
                        report.files_failed,
                        report.total_seconds,
                        report.mean_seconds_per_file
                    );
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::GenCorpus {
            kind,
            count,
            seed,
            out,
        } => {
            let kind = match kind {
                Kind::Benign => CorpusKind::Benign,
                Kind::MaliciousLike => CorpusKind::MaliciousLike,
            };
            match generate_corpus(kind, count, seed, &out) {
                Ok(paths) => {
                    eprintln!("wrote {} files to {}", paths.len(), out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Schema { .. } => match schema().write_reference(io::stdout().lock()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
