//! Static feature extraction for PDF files.
//!
//! A document is parsed leniently, then reduced to a fixed vector of 170
//! numeric features: word co-occurrence graph metrics over page text,
//! metadata composition and entropy, text statistics, date deltas,
//! structural keyword counts, image size buckets, suspicious-name flags and
//! file-level measurements. Vectors are written as CSV or JSON Lines.
//!
//! ```no_run
//! use pdfvec::extract::{extract_file, ExtractOptions};
//!
//! let e = extract_file("sample.pdf".as_ref(), &ExtractOptions::default()).unwrap();
//! println!("{:?}", e.vector.get("flag_javascript"));
//! ```

pub mod batch;
pub mod corpus;
pub mod extract;
pub mod graph;
pub mod image;
pub mod meta;
pub mod pdf;
pub mod structure;
pub mod text;
pub mod vector;

pub use extract::{extract_bytes, extract_document, extract_file, ExtractOptions, Extraction};
pub use pdf::{parse_document, Document, ParseError};
pub use vector::{schema, FeatureSchema, FeatureVector, COLUMN_COUNT, SCHEMA_VERSION};
