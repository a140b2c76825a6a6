//! The parsed PDF object model.

use std::fmt;

use indexmap::IndexMap;

/// Object number and generation of an indirect object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectId {
    pub number: u32,
    pub generation: u16,
}

impl ObjectId {
    pub fn new(number: u32, generation: u16) -> Self {
        Self { number, generation }
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} R", self.number, self.generation)
    }
}

/// A string object. Bytes are kept as written; `hex` records whether the
/// source used `<...>` rather than `(...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdfString {
    pub bytes: Vec<u8>,
    pub hex: bool,
}

impl PdfString {
    pub fn literal(bytes: impl Into<Vec<u8>>) -> Self {
        Self {
            bytes: bytes.into(),
            hex: false,
        }
    }

    /// Text decoding: UTF-16BE when the string starts with the FE FF byte
    /// order mark, Latin-1 otherwise.
    pub fn to_text(&self) -> String {
        decode_text_bytes(&self.bytes)
    }
}

pub fn decode_text_bytes(bytes: &[u8]) -> String {
    if bytes.len() >= 2 && bytes[0] == 0xFE && bytes[1] == 0xFF {
        let units: Vec<u16> = bytes[2..]
            .chunks(2)
            .map(|c| {
                let hi = c[0] as u16;
                let lo = c.get(1).copied().unwrap_or(0) as u16;
                (hi << 8) | lo
            })
            .collect();
        String::from_utf16_lossy(&units)
    } else {
        bytes.iter().map(|&b| b as char).collect()
    }
}

pub type Dictionary = IndexMap<String, PdfValue>;

/// A stream object: its dictionary, the raw (still encoded) payload, and the
/// byte offset of the `stream` keyword in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct PdfStream {
    pub dict: Dictionary,
    pub data: Vec<u8>,
    pub offset: usize,
    /// Set when the declared `/Length` was missing or disagreed with the
    /// position of `endstream`, and the extent was recovered by search.
    pub length_repaired: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PdfValue {
    Null,
    Boolean(bool),
    Integer(i64),
    Real(f64),
    String(PdfString),
    Name(String),
    Array(Vec<PdfValue>),
    Dictionary(Dictionary),
    Stream(PdfStream),
    Reference(ObjectId),
}

impl PdfValue {
    pub fn as_dict(&self) -> Option<&Dictionary> {
        match self {
            PdfValue::Dictionary(d) => Some(d),
            PdfValue::Stream(s) => Some(&s.dict),
            _ => None,
        }
    }

    pub fn as_stream(&self) -> Option<&PdfStream> {
        match self {
            PdfValue::Stream(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&[PdfValue]> {
        match self {
            PdfValue::Array(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_name(&self) -> Option<&str> {
        match self {
            PdfValue::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match *self {
            PdfValue::Integer(i) => Some(i),
            PdfValue::Real(r) if r.is_finite() => Some(r as i64),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            PdfValue::Integer(i) => Some(i as f64),
            PdfValue::Real(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_reference(&self) -> Option<ObjectId> {
        match self {
            PdfValue::Reference(id) => Some(*id),
            _ => None,
        }
    }

    /// Text content of a string, or of a name used where text was expected.
    pub fn as_text(&self) -> Option<String> {
        match self {
            PdfValue::String(s) => Some(s.to_text()),
            PdfValue::Name(n) => Some(n.clone()),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, PdfValue::Null)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PdfValue::Null => "null",
            PdfValue::Boolean(_) => "boolean",
            PdfValue::Integer(_) => "integer",
            PdfValue::Real(_) => "real",
            PdfValue::String(_) => "string",
            PdfValue::Name(_) => "name",
            PdfValue::Array(_) => "array",
            PdfValue::Dictionary(_) => "dictionary",
            PdfValue::Stream(_) => "stream",
            PdfValue::Reference(_) => "reference",
        }
    }
}

/// Looks up `key` in a dictionary and checks it names `expected`.
pub fn dict_name_is(dict: &Dictionary, key: &str, expected: &str) -> bool {
    dict.get(key).and_then(PdfValue::as_name) == Some(expected)
}
