//! Extract a directory in parallel and write CSV, the library equivalent of
//! `pdfvec extract`.
//!
//!     cargo run --example batch_extract -- <dir> <out.csv> [workers]

use std::env;
use std::path::PathBuf;

use pdfvec::batch::{run_extract, RunConfig};

fn main() {
    let mut args = env::args().skip(1);
    let input: PathBuf = args.next().map_or_else(
        || concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures").into(),
        PathBuf::from,
    );
    let output: PathBuf = args
        .next()
        .map_or_else(|| env::temp_dir().join("pdfvec-example.csv"), PathBuf::from);
    let workers = args
        .next()
        .map_or(4, |w| w.parse().expect("workers is a number"));

    let config = RunConfig {
        worker_count: workers,
        ..RunConfig::new(vec![input], output.clone())
    };
    match run_extract(&config) {
        Ok(report) => {
            println!("{report:#?}");
            println!("rows written to {}", output.display());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
