//! Stream filter decoding: FlateDecode (with PNG/TIFF predictors),
//! ASCIIHexDecode and ASCII85Decode.

use std::io::Read;

use flate2::read::{DeflateDecoder, ZlibDecoder};

use super::syntax::{hex_value, is_whitespace};

/// Decoded output is capped to keep hostile inputs (decompression bombs)
/// bounded.
pub const MAX_DECODED_LEN: usize = 64 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterError {
    Corrupt(String),
    Unsupported(String),
}

/// Parameters relevant to predictor post-processing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictorParams {
    pub predictor: i64,
    pub colors: usize,
    pub bits_per_component: usize,
    pub columns: usize,
}

impl Default for PredictorParams {
    fn default() -> Self {
        Self {
            predictor: 1,
            colors: 1,
            bits_per_component: 8,
            columns: 1,
        }
    }
}

pub fn apply_filter(
    name: &str,
    input: &[u8],
    params: Option<PredictorParams>,
) -> Result<Vec<u8>, FilterError> {
    match name {
        "FlateDecode" | "Fl" => {
            let inflated = inflate(input)?;
            match params {
                Some(p) if p.predictor > 1 => unpredict(&inflated, p),
                _ => Ok(inflated),
            }
        }
        "ASCIIHexDecode" | "AHx" => Ok(ascii_hex_decode(input)),
        "ASCII85Decode" | "A85" => ascii85_decode(input),
        other => Err(FilterError::Unsupported(other.to_string())),
    }
}

pub fn inflate(input: &[u8]) -> Result<Vec<u8>, FilterError> {
    let mut out = Vec::new();
    let zlib = ZlibDecoder::new(input)
        .take(MAX_DECODED_LEN as u64)
        .read_to_end(&mut out);
    if zlib.is_ok() {
        return Ok(out);
    }
    // Some producers omit the zlib header; retry as a raw deflate stream.
    let mut raw = Vec::new();
    if DeflateDecoder::new(input)
        .take(MAX_DECODED_LEN as u64)
        .read_to_end(&mut raw)
        .is_ok()
        && !raw.is_empty()
    {
        return Ok(raw);
    }
    Err(FilterError::Corrupt(format!(
        "FlateDecode: {}",
        zlib.unwrap_err()
    )))
}

pub fn ascii_hex_decode(input: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(input.len() / 2);
    let mut high: Option<u8> = None;
    for &b in input {
        if b == b'>' {
            break;
        }
        if let Some(v) = hex_value(b) {
            match high.take() {
                Some(h) => out.push((h << 4) | v),
                None => high = Some(v),
            }
        }
    }
    if let Some(h) = high {
        out.push(h << 4);
    }
    out
}

pub fn ascii85_decode(input: &[u8]) -> Result<Vec<u8>, FilterError> {
    let mut data = input;
    if data.starts_with(b"<~") {
        data = &data[2..];
    }
    let mut out = Vec::with_capacity(data.len() * 4 / 5);
    let mut group = [0u8; 5];
    let mut n = 0usize;
    for &b in data {
        if b == b'~' {
            break;
        }
        if is_whitespace(b) {
            continue;
        }
        if b == b'z' && n == 0 {
            out.extend_from_slice(&[0, 0, 0, 0]);
            continue;
        }
        if !(b'!'..=b'u').contains(&b) {
            return Err(FilterError::Corrupt(format!(
                "ASCII85Decode: invalid byte 0x{b:02x}"
            )));
        }
        group[n] = b - b'!';
        n += 1;
        if n == 5 {
            let v = group.iter().fold(0u64, |acc, &d| acc * 85 + d as u64);
            if v > u32::MAX as u64 {
                return Err(FilterError::Corrupt("ASCII85Decode: group overflow".into()));
            }
            out.extend_from_slice(&(v as u32).to_be_bytes());
            n = 0;
        }
    }
    if n == 1 {
        return Err(FilterError::Corrupt("ASCII85Decode: dangling byte".into()));
    }
    if n > 1 {
        for slot in group.iter_mut().skip(n) {
            *slot = 84;
        }
        let v = group.iter().fold(0u64, |acc, &d| acc * 85 + d as u64);
        let bytes = (v.min(u32::MAX as u64) as u32).to_be_bytes();
        out.extend_from_slice(&bytes[..n - 1]);
    }
    Ok(out)
}

fn unpredict(data: &[u8], p: PredictorParams) -> Result<Vec<u8>, FilterError> {
    let bpp = ((p.colors * p.bits_per_component).div_ceil(8)).max(1);
    let row_len = (p.colors * p.bits_per_component * p.columns).div_ceil(8);
    if row_len == 0 {
        return Err(FilterError::Corrupt("predictor: zero-width rows".into()));
    }
    if p.predictor == 2 {
        if p.bits_per_component != 8 {
            return Ok(data.to_vec());
        }
        let mut out = data.to_vec();
        for row in out.chunks_mut(row_len) {
            for i in bpp..row.len() {
                row[i] = row[i].wrapping_add(row[i - bpp]);
            }
        }
        return Ok(out);
    }
    if p.predictor < 10 {
        return Ok(data.to_vec());
    }
    let mut out = Vec::with_capacity(data.len());
    let mut prev = vec![0u8; row_len];
    for chunk in data.chunks(row_len + 1) {
        let kind = chunk[0];
        let mut row = chunk[1..].to_vec();
        row.resize(row_len, 0);
        for i in 0..row_len {
            let left = if i >= bpp { row[i - bpp] } else { 0 };
            let up = prev[i];
            let up_left = if i >= bpp { prev[i - bpp] } else { 0 };
            row[i] = match kind {
                0 => row[i],
                1 => row[i].wrapping_add(left),
                2 => row[i].wrapping_add(up),
                3 => row[i].wrapping_add(((left as u16 + up as u16) / 2) as u8),
                4 => row[i].wrapping_add(paeth(left, up, up_left)),
                other => {
                    return Err(FilterError::Corrupt(format!(
                        "predictor: unknown PNG row filter {other}"
                    )))
                }
            };
        }
        out.extend_from_slice(&row);
        prev = row;
    }
    Ok(out)
}

fn paeth(a: u8, b: u8, c: u8) -> u8 {
    let p = a as i16 + b as i16 - c as i16;
    let pa = (p - a as i16).abs();
    let pb = (p - b as i16).abs();
    let pc = (p - c as i16).abs();
    if pa <= pb && pa <= pc {
        a
    } else if pb <= pc {
        b
    } else {
        c
    }
}
