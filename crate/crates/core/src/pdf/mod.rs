//! PDF parsing: lexer, cross-reference handling, object table and stream
//! decoding. Parsing is lenient; damage is recorded as warnings.

pub mod document;
pub mod filters;
pub mod object;
pub mod scan;
pub mod syntax;

pub use document::{
    scan_object_headers, DecodedStream, Document, Page, ParseError, ParseStats, XrefKind, XrefMode,
};
pub use object::{decode_text_bytes, Dictionary, ObjectId, PdfStream, PdfString, PdfValue};
pub use scan::KeywordHit;

/// Parses raw PDF bytes leniently.
pub fn parse_document(bytes: impl Into<Vec<u8>>) -> Result<Document, ParseError> {
    Document::parse(bytes)
}
