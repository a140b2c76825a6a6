//! Batch extraction over files and directories.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;

use crate::extract::{extract_file, ExtractOptions};
use crate::meta::MetadataFields;
use crate::vector::{write_file, FeatureVector, OutputFormat, WriteError};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub recursive: bool,
    pub output: PathBuf,
    pub format: OutputFormat,
    pub window: usize,
    pub worker_count: usize,
    pub label: Option<u8>,
    pub fail_fast: bool,
    pub dump_meta: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(inputs: Vec<PathBuf>, output: PathBuf) -> Self {
        Self {
            inputs,
            recursive: false,
            output,
            format: OutputFormat::Csv,
            window: 2,
            worker_count: 1,
            label: None,
            fail_fast: false,
            dump_meta: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunReport {
    pub files_seen: usize,
    pub files_extracted: usize,
    pub files_failed: usize,
    pub total_seconds: f64,
    pub mean_seconds_per_file: f64,
}

impl RunReport {
    /// 0 when at least one file was extracted, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.files_extracted > 0 {
            0
        } else {
            2
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("input path does not exist: {0}")]
    MissingInput(PathBuf),
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("window must be 2 or 3, got {0}")]
    BadWindow(usize),
    #[error("label must be 0 or 1, got {0}")]
    BadLabel(u8),
    #[error("cannot walk {path}: {message}")]
    Walk { path: PathBuf, message: String },
    #[error("extraction failed for {path}: {message}")]
    FailFast { path: PathBuf, message: String },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Write(#[from] WriteError),
    #[error("cannot write {path}: {source}")]
    DumpMeta { path: PathBuf, source: io::Error },
}

impl RunError {
    /// Configuration problems are usage errors (exit 1); fail-fast aborts
    /// and output failures exit 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::MissingInput(_)
            | RunError::NoWorkers
            | RunError::BadWindow(_)
            | RunError::BadLabel(_) => 1,
            _ => 2,
        }
    }
}

fn is_pdf(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pdf"))
}

/// Every `*.pdf` (any case) named by `inputs`, sorted and deduplicated.
/// Files given directly are kept whatever their extension.
pub fn collect_inputs(inputs: &[PathBuf], recursive: bool) -> Result<Vec<PathBuf>, RunError> {
    let mut out = Vec::new();
    for input in inputs {
        if !input.exists() {
            return Err(RunError::MissingInput(input.clone()));
        }
        if input.is_file() {
            out.push(input.clone());
            continue;
        }
        let walker = WalkDir::new(input).min_depth(1);
        let walker = if recursive {
            walker
        } else {
            walker.max_depth(1)
        };
        for entry in walker {
            let entry = entry.map_err(|e| RunError::Walk {
                path: input.clone(),
                message: e.to_string(),
            })?;
            if entry.file_type().is_file() && is_pdf(entry.path()) {
                out.push(entry.into_path());
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Outcome for one file.
#[derive(Debug, Clone, PartialEq)]
pub struct FileResult {
    pub path: PathBuf,
    pub vector: FeatureVector,
    pub metadata: Option<MetadataFields>,
    pub error: Option<String>,
}

/// Extracts one file, turning errors and panics into a zero row.
pub fn process_file(path: &Path, opts: &ExtractOptions) -> FileResult {
    let name = path.to_string_lossy().into_owned();
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| extract_file(path, opts)));
    let error = match outcome {
        Ok(Ok(e)) => {
            return FileResult {
                path: path.to_path_buf(),
                vector: e.vector,
                metadata: Some(e.metadata),
                error: None,
            }
        }
        Ok(Err(e)) => e.to_string(),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            format!("{name}: extractor panicked: {msg}")
        }
    };
    FileResult {
        path: path.to_path_buf(),
        vector: FeatureVector::failed(name, 1),
        metadata: None,
        error: Some(error),
    }
}

/// Extracts `paths` on `workers` threads. Results come back in input order.
pub fn extract_paths(
    paths: &[PathBuf],
    opts: &ExtractOptions,
    workers: usize,
) -> Result<Vec<FileResult>, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    Ok(pool.install(|| paths.par_iter().map(|p| process_file(p, opts)).collect()))
}

#[derive(Serialize)]
struct MetaLine<'a> {
    source_path: &'a str,
    #[serde(flatten)]
    fields: &'a MetadataFields,
}

fn write_meta(path: &Path, results: &[FileResult]) -> Result<(), RunError> {
    let err = |source| RunError::DumpMeta {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(err)?);
    let empty = MetadataFields::default();
    for r in results {
        let line = MetaLine {
            source_path: &r.vector.source_path,
            fields: r.metadata.as_ref().unwrap_or(&empty),
        };
        serde_json::to_writer(&mut out, &line).map_err(|e| err(e.into()))?;
        out.write_all(b"\n").map_err(err)?;
    }
    out.flush().map_err(err)
}

/// Runs a whole extraction job: collect inputs, extract in parallel, write
/// rows sorted by path. Per-file errors go to standard error.
pub fn run_extract(config: &RunConfig) -> Result<RunReport, RunError> {
    if config.worker_count == 0 {
        return Err(RunError::NoWorkers);
    }
    if !(2..=3).contains(&config.window) {
        return Err(RunError::BadWindow(config.window));
    }
    if let Some(l) = config.label.filter(|&l| l > 1) {
        return Err(RunError::BadLabel(l));
    }
    let start = Instant::now();
    let paths = collect_inputs(&config.inputs, config.recursive)?;
    let opts = ExtractOptions {
        window: config.window,
        ..Default::default()
    };
    let results = extract_paths(&paths, &opts, config.worker_count)?;

    let mut report = RunReport {
        files_seen: results.len(),
        ..Default::default()
    };
    for r in &results {
        match &r.error {
            None => report.files_extracted += 1,
            Some(message) => {
                if config.fail_fast {
                    return Err(RunError::FailFast {
                        path: r.path.clone(),
                        message: message.clone(),
                    });
                }
                eprintln!("warning: {message}");
                report.files_failed += 1;
            }
        }
    }

    let vectors: Vec<FeatureVector> = results.iter().map(|r| r.vector.clone()).collect();
    write_file(&config.output, config.format, &vectors, config.label)?;
    if let Some(meta_path) = &config.dump_meta {
        write_meta(meta_path, &results)?;
    }

    report.total_seconds = start.elapsed().as_secs_f64();
    if report.files_seen > 0 {
        report.mean_seconds_per_file = report.total_seconds / report.files_seen as f64;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn collection_filters_and_sorts() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        fs::create_dir(root.join("sub")).unwrap();
        for name in ["b.pdf", "a.PDF", "notes.txt", "sub/c.pdf"] {
            fs::write(root.join(name), b"").unwrap();
        }
        let flat = collect_inputs(&[root.to_path_buf()], false).unwrap();
        assert_eq!(flat, vec![root.join("a.PDF"), root.join("b.pdf")]);
        let deep = collect_inputs(&[root.to_path_buf()], true).unwrap();
        assert_eq!(deep.len(), 3);
        assert_eq!(deep[2], root.join("sub/c.pdf"));
    }

    #[test]
    fn missing_input_is_usage_error() {
        let err = collect_inputs(&[PathBuf::from("/does/not/exist")], false).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unreadable_file_becomes_zero_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.pdf");
        fs::write(&p, b"").unwrap();
        let r = process_file(&p, &ExtractOptions::default());
        assert!(r.error.is_some());
        assert!(r.vector.values.iter().all(|&v| v == 0.0));
        assert!(r.vector.warnings_count >= 1);
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(vec![], PathBuf::from("/tmp/x.csv"));
        c.worker_count = 0;
        assert!(matches!(run_extract(&c), Err(RunError::NoWorkers)));
        c.worker_count = 1;
        c.window = 4;
        assert!(matches!(run_extract(&c), Err(RunError::BadWindow(4))));
    }
}
