//! Raw byte-offset scanning over the file contents.

use memchr::memmem;

use super::syntax::{is_delimiter, is_regular, is_whitespace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordHit {
    pub keyword: String,
    pub byte_offset: usize,
}

/// Every non-overlapping occurrence of `keyword` in `bytes`, ascending.
/// Matching is exact and case-sensitive.
pub fn find_all(bytes: &[u8], keyword: &[u8]) -> Vec<usize> {
    if keyword.is_empty() {
        return Vec::new();
    }
    let finder = memmem::Finder::new(keyword);
    let mut out = Vec::new();
    let mut start = 0;
    while let Some(i) = finder.find(&bytes[start..]) {
        out.push(start + i);
        start += i + keyword.len();
    }
    out
}

/// Occurrences of `keyword` that stand as a whole PDF token: a bare keyword
/// must not be glued to regular characters on either side, and a name
/// (`/Font`) must not continue into a longer name (`/FontFile`).
pub fn find_tokens(bytes: &[u8], keyword: &[u8]) -> Vec<usize> {
    find_all(bytes, keyword)
        .into_iter()
        .filter(|&pos| is_token_at(bytes, pos, keyword))
        .collect()
}

fn is_token_at(bytes: &[u8], pos: usize, keyword: &[u8]) -> bool {
    let end = pos + keyword.len();
    let after_ok = bytes.get(end).is_none_or(|&b| !is_regular(b));
    if keyword.first() == Some(&b'/') {
        return after_ok;
    }
    let before_ok = pos == 0 || {
        let b = bytes[pos - 1];
        is_whitespace(b) || is_delimiter(b)
    };
    before_ok && after_ok
}

pub fn hits(keyword: &str, offsets: Vec<usize>) -> Vec<KeywordHit> {
    offsets
        .into_iter()
        .map(|byte_offset| KeywordHit {
            keyword: keyword.to_string(),
            byte_offset,
        })
        .collect()
}
