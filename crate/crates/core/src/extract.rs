//! The per-document pipeline: parse once, run every extractor, assemble.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{aggregate_page_graphs, build_word_graph, PageGraphMetrics};
use crate::image::{image_block, images_with_inline, ImageThresholds};
use crate::meta::{
    document_text, extract_metadata, metadata_block, shannon_entropy, temporal_block, text_summary,
    MetadataFields,
};
use crate::pdf::{Document, ParseError};
use crate::structure::{
    anomaly_block_with, file_level, keyword_flags, misc_block_with, stream_summary,
    structural_counts,
};
use crate::text::{analyze_page, PageContent, PageText};
use crate::vector::{assemble, AssembleError, FeatureBlocks, FeatureVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    /// Co-occurrence window for the word graph.
    pub window: usize,
    pub thresholds: ImageThresholds,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            window: 2,
            thresholds: ImageThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub vector: FeatureVector,
    pub metadata: MetadataFields,
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Assemble(#[from] AssembleError),
}

/// All feature blocks of a parsed document.
pub fn feature_blocks(doc: &Document, opts: &ExtractOptions) -> FeatureBlocks {
    let pages: Vec<PageContent> = (0..doc.pages().len())
        .map(|i| analyze_page(doc, i))
        .collect();
    let texts: Vec<PageText> = pages.iter().map(|p| p.text.clone()).collect();

    let per_page: Vec<PageGraphMetrics> = texts
        .iter()
        .map(|t| PageGraphMetrics::of(&build_word_graph(&t.tokens, opts.window)))
        .collect();

    let metadata = extract_metadata(doc);
    let fields = metadata.text_fields();
    let mut meta_entropy: Vec<f64> = fields
        .iter()
        .map(|f| f.map_or(0.0, shannon_entropy))
        .collect();
    let joined: String = fields.iter().flatten().copied().collect();
    meta_entropy.push(shannon_entropy(&joined));

    let inline_count = pages.iter().map(|p| p.inline_images.len()).sum();
    let images = images_with_inline(doc, &pages);
    let streams = stream_summary(doc);

    FeatureBlocks {
        graph: aggregate_page_graphs(&per_page),
        meta: metadata_block(&metadata),
        meta_entropy,
        text: text_summary(&texts, &document_text(&texts)),
        time: temporal_block(
            metadata.creation_date_raw.as_deref(),
            metadata.mod_date_raw.as_deref(),
        ),
        structure: structural_counts(doc),
        image: image_block(&images, doc.file_size(), opts.thresholds),
        flags: keyword_flags(doc),
        file: file_level(doc),
        misc: misc_block_with(doc, &streams),
        anomaly: anomaly_block_with(doc, inline_count, &streams),
    }
}

/// Extracts the vector and raw metadata of an already parsed document. The
/// warning count covers parse and extraction warnings.
pub fn extract_document(
    doc: &Document,
    source_path: &str,
    opts: &ExtractOptions,
) -> Result<Extraction, AssembleError> {
    let blocks = feature_blocks(doc, opts);
    let vector = assemble(&blocks, source_path, doc.warning_count())?;
    Ok(Extraction {
        vector,
        metadata: extract_metadata(doc),
    })
}

pub fn extract_bytes(
    bytes: Vec<u8>,
    source_path: &str,
    opts: &ExtractOptions,
) -> Result<Extraction, ExtractError> {
    let doc = Document::parse(bytes).map_err(|source| ExtractError::Parse {
        path: source_path.to_string(),
        source,
    })?;
    Ok(extract_document(&doc, source_path, opts)?)
}

pub fn extract_file(path: &Path, opts: &ExtractOptions) -> Result<Extraction, ExtractError> {
    let bytes = fs::read(path).map_err(|source| ExtractError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    extract_bytes(bytes, &path.to_string_lossy(), opts)
}
