//! Page text extraction from content streams, and tokenization.
//!
//! Only the text-showing operators are interpreted. Font encodings are not
//! resolved: string bytes are decoded as UTF-16BE when they carry a byte
//! order mark and as Latin-1 otherwise.

use memchr::memmem;

use crate::pdf::syntax::{is_whitespace, Parser, Token};
use crate::pdf::{decode_text_bytes, Document, PdfValue};

/// Operands kept per operator; content streams never legitimately need more.
const MAX_OPERANDS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PageText {
    pub page_index: usize,
    pub lines: Vec<String>,
    pub tokens: Vec<String>,
}

impl PageText {
    fn from_lines(page_index: usize, lines: Vec<String>) -> Self {
        let tokens = lines.iter().flat_map(|l| tokenize(l)).collect();
        Self {
            page_index,
            lines,
            tokens,
        }
    }

    /// Lines joined with newlines.
    pub fn text(&self) -> String {
        self.lines.join("\n")
    }
}

/// Width and height declared by an inline image (`BI ... ID ... EI`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InlineImage {
    pub width: u64,
    pub height: u64,
}

/// Everything read from one page's content in a single pass.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PageContent {
    pub text: PageText,
    pub inline_images: Vec<InlineImage>,
    /// Byte offset of the first content stream, used to place inline images.
    pub stream_offset: Option<usize>,
}

/// Splits on every non-alphanumeric character and lowercases, dropping empty
/// fragments. Order and duplicates are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter_map(|frag| {
            let lowered: String = frag
                .chars()
                .flat_map(char::to_lowercase)
                .filter(|c| c.is_alphanumeric())
                .collect();
            (!lowered.is_empty()).then_some(lowered)
        })
        .collect()
}

pub fn extract_page_text(doc: &Document, page_index: usize) -> PageText {
    analyze_page(doc, page_index).text
}

pub fn analyze_page(doc: &Document, page_index: usize) -> PageContent {
    let Some(page) = doc.pages().get(page_index) else {
        doc.warn(format!("page index {page_index} out of range"));
        return PageContent {
            text: PageText {
                page_index,
                ..PageText::default()
            },
            ..PageContent::default()
        };
    };
    let streams: Vec<&PdfValue> = match page.dict.get("Contents").map(|v| doc.resolve(v)) {
        Some(PdfValue::Array(items)) => items.iter().map(|v| doc.resolve(v)).collect(),
        Some(v @ PdfValue::Stream(_)) => vec![v],
        _ => Vec::new(),
    };
    let mut content = Vec::new();
    let mut stream_offset = None;
    for value in streams {
        let Some(stream) = value.as_stream() else {
            continue;
        };
        stream_offset.get_or_insert(stream.offset);
        let decoded = doc.decode_stream(stream);
        if !decoded.decoded {
            doc.warn(format!(
                "page {page_index}: content stream at offset {} not decodable",
                stream.offset
            ));
            continue;
        }
        content.extend_from_slice(&decoded.data);
        content.push(b'\n');
    }
    let (lines, inline_images) = interpret_content(&content);
    PageContent {
        text: PageText::from_lines(page_index, lines),
        inline_images,
        stream_offset,
    }
}

#[derive(Default)]
struct TextState {
    in_text: bool,
    line_break: bool,
    current: String,
    lines: Vec<String>,
}

impl TextState {
    fn show(&mut self, bytes: &[u8]) {
        if !self.in_text {
            return;
        }
        if self.line_break {
            self.flush();
            self.line_break = false;
        }
        self.current.push_str(&decode_text_bytes(bytes));
    }

    fn flush(&mut self) {
        if !self.current.is_empty() {
            self.lines.push(std::mem::take(&mut self.current));
        }
    }
}

/// Runs the text operators of a decoded content stream. Returns the shown
/// lines and any inline images met on the way.
pub fn interpret_content(content: &[u8]) -> (Vec<String>, Vec<InlineImage>) {
    let mut parser = Parser::new(content);
    let mut state = TextState::default();
    let mut images = Vec::new();
    let mut operands: Vec<PdfValue> = Vec::new();
    while let Some(tok) = parser.lexer().next_token() {
        let op = match tok {
            Token::Keyword(k) if !matches!(k.as_slice(), b"true" | b"false" | b"null") => k,
            other => {
                if let Ok(v) = parser.value_from_token(other, 0) {
                    if operands.len() < MAX_OPERANDS {
                        operands.push(v);
                    }
                }
                continue;
            }
        };
        match op.as_slice() {
            b"BT" => {
                state.in_text = true;
                state.line_break = true;
            }
            b"ET" => state.in_text = false,
            b"Td" | b"TD" | b"T*" => {
                if state.in_text {
                    state.line_break = true;
                }
            }
            b"Tj" => {
                if let Some(PdfValue::String(s)) = operands.last() {
                    state.show(&s.bytes);
                }
            }
            b"'" | b"\"" => {
                if state.in_text {
                    state.line_break = true;
                }
                if let Some(PdfValue::String(s)) = operands.last() {
                    state.show(&s.bytes);
                }
            }
            b"TJ" => {
                if let Some(PdfValue::Array(items)) = operands.last() {
                    let joined: Vec<u8> = items
                        .iter()
                        .filter_map(|v| match v {
                            PdfValue::String(s) => Some(s.bytes.as_slice()),
                            _ => None,
                        })
                        .flatten()
                        .copied()
                        .collect();
                    state.show(&joined);
                }
            }
            b"BI" => images.push(read_inline_image(&mut parser)),
            _ => {}
        }
        operands.clear();
    }
    state.flush();
    (state.lines, images)
}

/// Reads the inline image dictionary after `BI`, then skips the binary data
/// up to the `EI` operator.
fn read_inline_image(parser: &mut Parser<'_>) -> InlineImage {
    let mut width = 0u64;
    let mut height = 0u64;
    let mut key: Option<String> = None;
    loop {
        let Some(tok) = parser.lexer().next_token() else {
            return InlineImage { width, height };
        };
        match tok {
            Token::Keyword(k) if k == b"ID" => break,
            Token::Name(n) if key.is_none() => key = Some(n),
            other => {
                let value = parser.value_from_token(other, 0).ok();
                let dim = value
                    .as_ref()
                    .and_then(PdfValue::as_i64)
                    .map(|v| v.max(0) as u64);
                match (key.take().as_deref(), dim) {
                    (Some("W" | "Width"), Some(v)) => width = v,
                    (Some("H" | "Height"), Some(v)) => height = v,
                    _ => {}
                }
            }
        }
    }
    let data = parser.lexer().data();
    let start = parser.pos() + 1;
    let mut search = start.min(data.len());
    let end = loop {
        match memmem::find(&data[search..], b"EI") {
            Some(i) => {
                let at = search + i;
                let before = at == 0 || is_whitespace(data[at - 1]);
                let after = data.get(at + 2).is_none_or(|&b| is_whitespace(b));
                if before && after {
                    break at + 2;
                }
                search = at + 2;
            }
            None => break data.len(),
        }
    };
    parser.lexer().set_pos(end);
    InlineImage { width, height }
}
