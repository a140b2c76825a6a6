//! Metadata fields, character composition, Shannon entropy, text summary
//! statistics and the creation/modification time block.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use chrono::{FixedOffset, NaiveDate, TimeZone};
use serde::Serialize;

use crate::pdf::Document;
use crate::text::PageText;

/// Info dictionary strings. `None` means absent, which differs from empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MetadataFields {
    pub author: Option<String>,
    pub title: Option<String>,
    pub creator: Option<String>,
    pub producer: Option<String>,
    pub subject: Option<String>,
    pub keywords: Option<String>,
    pub creation_date_raw: Option<String>,
    pub mod_date_raw: Option<String>,
}

/// Names of the free-text fields, in block order.
pub const TEXT_FIELDS: [&str; 6] = [
    "author", "title", "creator", "producer", "subject", "keywords",
];

impl MetadataFields {
    /// The six free-text fields in block order.
    pub fn text_fields(&self) -> [Option<&str>; 6] {
        [
            self.author.as_deref(),
            self.title.as_deref(),
            self.creator.as_deref(),
            self.producer.as_deref(),
            self.subject.as_deref(),
            self.keywords.as_deref(),
        ]
    }
}

pub fn extract_metadata(doc: &Document) -> MetadataFields {
    let Some(info) = doc.info() else {
        return MetadataFields::default();
    };
    let field = |key: &str| doc.lookup(info, key).and_then(|v| v.as_text());
    MetadataFields {
        author: field("Author"),
        title: field("Title"),
        creator: field("Creator"),
        producer: field("Producer"),
        subject: field("Subject"),
        keywords: field("Keywords"),
        creation_date_raw: field("CreationDate"),
        mod_date_raw: field("ModDate"),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FieldComposition {
    pub dot_count: usize,
    pub length: usize,
    pub digit_count: usize,
    pub other_count: usize,
    pub uppercase_count: usize,
}

impl FieldComposition {
    pub const LEN: usize = 5;

    pub fn to_values(self) -> [f64; 5] {
        [
            self.dot_count as f64,
            self.length as f64,
            self.digit_count as f64,
            self.other_count as f64,
            self.uppercase_count as f64,
        ]
    }
}

/// Character counts of one field. Length is in characters; "other" is any
/// character outside `[A-Za-z0-9]`, so dots count there as well.
pub fn char_composition(field: &str) -> FieldComposition {
    field
        .chars()
        .fold(FieldComposition::default(), |mut acc, c| {
            acc.length += 1;
            if c == '.' {
                acc.dot_count += 1;
            }
            if c.is_ascii_digit() {
                acc.digit_count += 1;
            } else if c.is_ascii_uppercase() {
                acc.uppercase_count += 1;
            } else if !c.is_ascii_lowercase() {
                acc.other_count += 1;
            }
            acc
        })
}

/// One composition block per free-text field; absent fields are zero.
pub fn metadata_block(fields: &MetadataFields) -> Vec<FieldComposition> {
    fields
        .text_fields()
        .iter()
        .map(|f| f.map(char_composition).unwrap_or_default())
        .collect()
}

fn entropy_of<T: Eq + Hash>(symbols: impl IntoIterator<Item = T>) -> f64 {
    let mut counts: HashMap<T, usize> = HashMap::new();
    let mut total = 0usize;
    for s in symbols {
        *counts.entry(s).or_insert(0) += 1;
        total += 1;
    }
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let mut freqs: Vec<usize> = counts.into_values().collect();
    // Summation order fixed so equal inputs give bit-identical results.
    freqs.sort_unstable();
    let h: f64 = freqs
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Shannon entropy in bits per Unicode scalar value.
pub fn shannon_entropy(text: &str) -> f64 {
    entropy_of(text.chars())
}

/// Shannon entropy in bits per byte.
pub fn byte_entropy(bytes: &[u8]) -> f64 {
    let mut counts = [0usize; 256];
    for &b in bytes {
        counts[b as usize] += 1;
    }
    if bytes.is_empty() {
        return 0.0;
    }
    let n = bytes.len() as f64;
    let mut freqs: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    freqs.sort_unstable();
    let h: f64 = freqs
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TextSummary {
    pub avg_word_length: f64,
    pub max_token_length: usize,
    pub token_diversity: f64,
    pub digit_count: usize,
    pub uppercase_count: usize,
    pub lowercase_count: usize,
    pub whitespace_count: usize,
    pub special_count: usize,
    pub non_ascii_count: usize,
    pub body_entropy: f64,
}

impl TextSummary {
    pub const LEN: usize = 10;

    pub fn to_values(&self) -> Vec<f64> {
        vec![
            self.avg_word_length,
            self.max_token_length as f64,
            self.token_diversity,
            self.digit_count as f64,
            self.uppercase_count as f64,
            self.lowercase_count as f64,
            self.whitespace_count as f64,
            self.special_count as f64,
            self.non_ascii_count as f64,
            self.body_entropy,
        ]
    }
}

/// Document text joined page by page, lines and pages separated by newlines.
pub fn document_text(pages: &[PageText]) -> String {
    pages
        .iter()
        .map(PageText::text)
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Statistics over all tokens and the raw text. Special characters are
/// printable ASCII that is neither alphanumeric nor whitespace; non-ASCII
/// characters are counted separately.
pub fn text_summary(pages: &[PageText], raw_text: &str) -> TextSummary {
    let tokens: Vec<&str> = pages
        .iter()
        .flat_map(|p| p.tokens.iter().map(String::as_str))
        .collect();
    let mut s = TextSummary::default();
    if !tokens.is_empty() {
        let lens: Vec<usize> = tokens.iter().map(|t| t.chars().count()).collect();
        s.avg_word_length = lens.iter().sum::<usize>() as f64 / lens.len() as f64;
        s.max_token_length = lens.iter().copied().max().unwrap_or(0);
        let unique: HashSet<&str> = tokens.iter().copied().collect();
        s.token_diversity = unique.len() as f64 / tokens.len() as f64;
    }
    for c in raw_text.chars() {
        if !c.is_ascii() {
            s.non_ascii_count += 1;
        } else if c.is_ascii_digit() {
            s.digit_count += 1;
        } else if c.is_ascii_uppercase() {
            s.uppercase_count += 1;
        } else if c.is_ascii_lowercase() {
            s.lowercase_count += 1;
        } else if c.is_ascii_whitespace() {
            s.whitespace_count += 1;
        } else if c.is_ascii_graphic() {
            s.special_count += 1;
        }
    }
    s.body_entropy = shannon_entropy(raw_text);
    s
}

/// A parsed PDF date: seconds since the Unix epoch (UTC) and whether the
/// raw string contains `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PdfDate {
    pub timestamp: i64,
    pub has_z: bool,
}

/// Parses `D:YYYYMMDDHHmmSSOHH'mm'`. Everything after the year is
/// optional; missing parts default to January 1st, 00:00:00 UTC.
pub fn parse_pdf_date(raw: &str) -> Option<PdfDate> {
    let has_z = raw.contains('Z');
    let s = raw.trim();
    let s = s.strip_prefix("D:").unwrap_or(s).as_bytes();
    let mut pos = 0usize;
    let mut take = |n: usize| -> Option<u32> {
        let part = s.get(pos..pos + n)?;
        if !part.iter().all(u8::is_ascii_digit) {
            return None;
        }
        pos += n;
        std::str::from_utf8(part).ok()?.parse().ok()
    };
    let year = take(4)?;
    let month = take(2).unwrap_or(1);
    let day = take(2).unwrap_or(1);
    let hour = take(2).unwrap_or(0);
    let minute = take(2).unwrap_or(0);
    let second = take(2).unwrap_or(0);
    let rest = &s[pos..];
    let offset_secs = match rest.first() {
        None | Some(b'Z') => 0,
        Some(&sign @ (b'+' | b'-')) => {
            // `HH'mm'`, `HH'mm`, `HHmm` or `HH`
            let digits: Vec<u32> = rest[1..]
                .iter()
                .take_while(|b| b.is_ascii_digit() || **b == b'\'')
                .filter(|b| b.is_ascii_digit())
                .take(4)
                .map(|b| (b - b'0') as u32)
                .collect();
            let (h, m) = match digits.as_slice() {
                [h1, h2] | [h1, h2, _] => (h1 * 10 + h2, 0),
                [h1, h2, m1, m2] => (h1 * 10 + h2, m1 * 10 + m2),
                _ => return None,
            };
            if h > 23 || m > 59 {
                return None;
            }
            let secs = (h * 3600 + m * 60) as i32;
            if sign == b'-' {
                -secs
            } else {
                secs
            }
        }
        Some(_) => return None,
    };
    let date = NaiveDate::from_ymd_opt(year as i32, month, day)?;
    let local = date.and_hms_opt(hour, minute, second)?;
    let tz = FixedOffset::east_opt(offset_secs)?;
    let instant = tz.from_local_datetime(&local).single()?;
    Some(PdfDate {
        timestamp: instant.timestamp(),
        has_z,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TemporalBlock {
    pub delta_seconds: f64,
    pub creation_has_z: bool,
    pub mod_has_z: bool,
}

impl TemporalBlock {
    pub const LEN: usize = 3;

    pub fn to_values(&self) -> [f64; 3] {
        [
            self.delta_seconds,
            self.creation_has_z as u8 as f64,
            self.mod_has_z as u8 as f64,
        ]
    }
}

/// Absolute creation-to-modification gap in seconds when both dates parse,
/// else zero. The `Z` flags look only at the raw strings.
pub fn temporal_block(creation_raw: Option<&str>, mod_raw: Option<&str>) -> TemporalBlock {
    let delta = match (
        creation_raw.and_then(parse_pdf_date),
        mod_raw.and_then(parse_pdf_date),
    ) {
        (Some(c), Some(m)) => (m.timestamp - c.timestamp).unsigned_abs() as f64,
        _ => 0.0,
    };
    TemporalBlock {
        delta_seconds: delta,
        creation_has_z: creation_raw.is_some_and(|s| s.contains('Z')),
        mod_has_z: mod_raw.is_some_and(|s| s.contains('Z')),
    }
}
