//! Tokenizer and value parser shared by file-level object parsing and
//! content-stream interpretation.

use memchr::memmem;

use super::object::{Dictionary, ObjectId, PdfStream, PdfString, PdfValue};

/// Containers nested deeper than this are rejected.
pub const MAX_NESTING: usize = 256;

pub fn is_whitespace(b: u8) -> bool {
    matches!(b, b'\0' | b'\t' | b'\n' | b'\x0c' | b'\r' | b' ')
}

pub fn is_delimiter(b: u8) -> bool {
    matches!(
        b,
        b'(' | b')' | b'<' | b'>' | b'[' | b']' | b'{' | b'}' | b'/' | b'%'
    )
}

pub fn is_regular(b: u8) -> bool {
    !is_whitespace(b) && !is_delimiter(b)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Integer(i64),
    Real(f64),
    String(PdfString),
    Name(String),
    ArrayStart,
    ArrayEnd,
    DictStart,
    DictEnd,
    Keyword(Vec<u8>),
}

impl Token {
    pub fn is_keyword(&self, kw: &[u8]) -> bool {
        matches!(self, Token::Keyword(k) if k == kw)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    UnexpectedEof,
    UnexpectedToken(String),
    TooDeep,
    NotAnObject,
}

impl std::fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SyntaxError::UnexpectedEof => write!(f, "unexpected end of data"),
            SyntaxError::UnexpectedToken(t) => write!(f, "unexpected token {t}"),
            SyntaxError::TooDeep => write!(f, "containers nested too deeply"),
            SyntaxError::NotAnObject => write!(f, "no indirect object header"),
        }
    }
}

/// Byte-level tokenizer over a borrowed buffer.
#[derive(Debug, Clone)]
pub struct Lexer<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn at(data: &'a [u8], pos: usize) -> Self {
        Self {
            data,
            pos: pos.min(data.len()),
        }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn set_pos(&mut self, pos: usize) {
        self.pos = pos.min(self.data.len());
    }

    pub fn data(&self) -> &'a [u8] {
        self.data
    }

    pub fn skip_whitespace(&mut self) {
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            if is_whitespace(b) {
                self.pos += 1;
            } else if b == b'%' {
                while self.pos < self.data.len() && !matches!(self.data[self.pos], b'\r' | b'\n') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    /// Offset at which the next token starts.
    pub fn peek_start(&mut self) -> usize {
        self.skip_whitespace();
        self.pos
    }

    pub fn next_token(&mut self) -> Option<Token> {
        self.skip_whitespace();
        let b = *self.data.get(self.pos)?;
        match b {
            b'[' => {
                self.pos += 1;
                Some(Token::ArrayStart)
            }
            b']' => {
                self.pos += 1;
                Some(Token::ArrayEnd)
            }
            b'<' => {
                if self.data.get(self.pos + 1) == Some(&b'<') {
                    self.pos += 2;
                    Some(Token::DictStart)
                } else {
                    self.pos += 1;
                    Some(Token::String(self.read_hex_string()))
                }
            }
            b'>' => {
                if self.data.get(self.pos + 1) == Some(&b'>') {
                    self.pos += 2;
                    Some(Token::DictEnd)
                } else {
                    self.pos += 1;
                    Some(Token::Keyword(vec![b'>']))
                }
            }
            b'(' => {
                self.pos += 1;
                Some(Token::String(self.read_literal_string()))
            }
            b'/' => {
                self.pos += 1;
                Some(Token::Name(self.read_name()))
            }
            b')' | b'{' | b'}' => {
                self.pos += 1;
                Some(Token::Keyword(vec![b]))
            }
            b'0'..=b'9' | b'+' | b'-' | b'.' => Some(self.read_number()),
            _ => {
                let start = self.pos;
                while self.pos < self.data.len() && is_regular(self.data[self.pos]) {
                    self.pos += 1;
                }
                Some(Token::Keyword(self.data[start..self.pos].to_vec()))
            }
        }
    }

    fn read_number(&mut self) -> Token {
        let start = self.pos;
        while self.pos < self.data.len()
            && matches!(self.data[self.pos], b'0'..=b'9' | b'+' | b'-' | b'.')
        {
            self.pos += 1;
        }
        // A number run glued to letters (e.g. `1.0abc`) is a keyword.
        if self.pos < self.data.len() && is_regular(self.data[self.pos]) {
            while self.pos < self.data.len() && is_regular(self.data[self.pos]) {
                self.pos += 1;
            }
            return Token::Keyword(self.data[start..self.pos].to_vec());
        }
        parse_number(&self.data[start..self.pos])
    }

    fn read_name(&mut self) -> String {
        let mut out = Vec::new();
        while self.pos < self.data.len() && is_regular(self.data[self.pos]) {
            let b = self.data[self.pos];
            if b == b'#' {
                let h = self.data.get(self.pos + 1).and_then(|&c| hex_value(c));
                let l = self.data.get(self.pos + 2).and_then(|&c| hex_value(c));
                if let (Some(h), Some(l)) = (h, l) {
                    out.push((h << 4) | l);
                    self.pos += 3;
                    continue;
                }
            }
            out.push(b);
            self.pos += 1;
        }
        out.iter().map(|&b| b as char).collect()
    }

    fn read_hex_string(&mut self) -> PdfString {
        let mut out = Vec::new();
        let mut high: Option<u8> = None;
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            self.pos += 1;
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
        PdfString {
            bytes: out,
            hex: true,
        }
    }

    fn read_literal_string(&mut self) -> PdfString {
        let mut out = Vec::new();
        let mut depth = 1usize;
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            self.pos += 1;
            match b {
                b'(' => {
                    depth += 1;
                    out.push(b);
                }
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                    out.push(b);
                }
                b'\r' => {
                    if self.data.get(self.pos) == Some(&b'\n') {
                        self.pos += 1;
                    }
                    out.push(b'\n');
                }
                b'\\' => {
                    let Some(&e) = self.data.get(self.pos) else {
                        break;
                    };
                    self.pos += 1;
                    match e {
                        b'n' => out.push(b'\n'),
                        b'r' => out.push(b'\r'),
                        b't' => out.push(b'\t'),
                        b'b' => out.push(0x08),
                        b'f' => out.push(0x0c),
                        b'0'..=b'7' => {
                            let mut v = (e - b'0') as u32;
                            for _ in 0..2 {
                                match self.data.get(self.pos) {
                                    Some(&d @ b'0'..=b'7') => {
                                        v = v * 8 + (d - b'0') as u32;
                                        self.pos += 1;
                                    }
                                    _ => break,
                                }
                            }
                            out.push((v & 0xFF) as u8);
                        }
                        b'\r' => {
                            if self.data.get(self.pos) == Some(&b'\n') {
                                self.pos += 1;
                            }
                        }
                        b'\n' => {}
                        other => out.push(other),
                    }
                }
                _ => out.push(b),
            }
        }
        PdfString {
            bytes: out,
            hex: false,
        }
    }
}

pub fn hex_value(b: u8) -> Option<u8> {
    match b {
        b'0'..=b'9' => Some(b - b'0'),
        b'a'..=b'f' => Some(b - b'a' + 10),
        b'A'..=b'F' => Some(b - b'A' + 10),
        _ => None,
    }
}

/// Lenient number parsing: malformed runs such as `--3` or `1.2.3` read as
/// much as makes sense, and a lone sign reads as zero.
fn parse_number(run: &[u8]) -> Token {
    let text: String = run.iter().map(|&b| b as char).collect();
    let negative = text.starts_with('-') || text.starts_with("+-");
    let body = text.trim_start_matches(['+', '-']);
    if !body.contains('.') {
        let digits: String = body.chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return Token::Integer(0);
        }
        return match digits.parse::<i64>() {
            Ok(v) => Token::Integer(if negative { -v } else { v }),
            Err(_) => {
                let v: f64 = digits.parse().unwrap_or(0.0);
                Token::Real(if negative { -v } else { v })
            }
        };
    }
    let mut seen_dot = false;
    let cleaned: String = body
        .chars()
        .take_while(|&c| {
            if c == '.' {
                if seen_dot {
                    return false;
                }
                seen_dot = true;
                true
            } else {
                c.is_ascii_digit()
            }
        })
        .collect();
    let v: f64 = if cleaned == "." {
        0.0
    } else {
        format!("0{cleaned}").parse().unwrap_or(0.0)
    };
    Token::Real(if negative { -v } else { v })
}

/// Builds values from tokens.
pub struct Parser<'a> {
    lexer: Lexer<'a>,
}

impl<'a> Parser<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self {
            lexer: Lexer::new(data),
        }
    }

    pub fn at(data: &'a [u8], pos: usize) -> Self {
        Self {
            lexer: Lexer::at(data, pos),
        }
    }

    pub fn lexer(&mut self) -> &mut Lexer<'a> {
        &mut self.lexer
    }

    pub fn pos(&self) -> usize {
        self.lexer.pos()
    }

    pub fn parse_value(&mut self) -> Result<PdfValue, SyntaxError> {
        let tok = self.lexer.next_token().ok_or(SyntaxError::UnexpectedEof)?;
        self.value_from_token(tok, 0)
    }

    /// Continues parsing a value whose first token has already been read.
    pub fn value_from_token(&mut self, tok: Token, depth: usize) -> Result<PdfValue, SyntaxError> {
        if depth > MAX_NESTING {
            return Err(SyntaxError::TooDeep);
        }
        match tok {
            Token::Integer(i) => Ok(self.maybe_reference(i)),
            Token::Real(r) => Ok(PdfValue::Real(r)),
            Token::String(s) => Ok(PdfValue::String(s)),
            Token::Name(n) => Ok(PdfValue::Name(n)),
            Token::ArrayStart => {
                let mut items = Vec::new();
                loop {
                    match self.lexer.next_token() {
                        None => break,
                        Some(Token::ArrayEnd) => break,
                        Some(Token::DictEnd) => continue,
                        Some(t) => match self.value_from_token(t, depth + 1) {
                            Ok(v) => items.push(v),
                            Err(SyntaxError::TooDeep) => return Err(SyntaxError::TooDeep),
                            Err(_) => continue,
                        },
                    }
                }
                Ok(PdfValue::Array(items))
            }
            Token::DictStart => Ok(PdfValue::Dictionary(self.parse_dict_body(depth)?)),
            Token::Keyword(k) => match k.as_slice() {
                b"true" => Ok(PdfValue::Boolean(true)),
                b"false" => Ok(PdfValue::Boolean(false)),
                b"null" => Ok(PdfValue::Null),
                other => Err(SyntaxError::UnexpectedToken(
                    String::from_utf8_lossy(other).into_owned(),
                )),
            },
            Token::ArrayEnd => Err(SyntaxError::UnexpectedToken("]".into())),
            Token::DictEnd => Err(SyntaxError::UnexpectedToken(">>".into())),
        }
    }

    fn parse_dict_body(&mut self, depth: usize) -> Result<Dictionary, SyntaxError> {
        let mut dict = Dictionary::new();
        while let Some(tok) = self.lexer.next_token() {
            let key = match tok {
                Token::DictEnd => break,
                Token::Name(n) => n,
                // Stray tokens between entries are skipped; a bare keyword
                // such as `stream` or `endobj` ends a truncated dictionary.
                Token::Keyword(k) if k == b"stream" || k == b"endobj" || k == b"obj" => {
                    let back = self.lexer.pos() - k.len();
                    self.lexer.set_pos(back);
                    break;
                }
                _ => continue,
            };
            let save = self.lexer.pos();
            match self.lexer.next_token() {
                None => {
                    dict.insert(key, PdfValue::Null);
                    break;
                }
                Some(Token::DictEnd) => {
                    dict.insert(key, PdfValue::Null);
                    break;
                }
                Some(Token::Name(n)) => {
                    dict.insert(key, PdfValue::Name(n));
                }
                Some(t) => match self.value_from_token(t, depth + 1) {
                    Ok(v) => {
                        dict.insert(key, v);
                    }
                    Err(SyntaxError::TooDeep) => return Err(SyntaxError::TooDeep),
                    Err(_) => {
                        self.lexer.set_pos(save);
                        // Re-read the offending token so the outer loop can
                        // decide whether it terminates the dictionary.
                        if let Some(Token::Keyword(k)) = self.lexer.next_token() {
                            if k == b"stream" || k == b"endobj" {
                                let back = self.lexer.pos() - k.len();
                                self.lexer.set_pos(back);
                                dict.insert(key, PdfValue::Null);
                                break;
                            }
                        }
                        dict.insert(key, PdfValue::Null);
                    }
                },
            }
        }
        Ok(dict)
    }

    fn maybe_reference(&mut self, first: i64) -> PdfValue {
        let save = self.lexer.pos();
        if let Some(Token::Integer(gen)) = self.lexer.next_token() {
            if let Some(Token::Keyword(k)) = self.lexer.next_token() {
                if k == b"R" && first >= 0 && first <= u32::MAX as i64 && (0..=65535).contains(&gen)
                {
                    return PdfValue::Reference(ObjectId::new(first as u32, gen as u16));
                }
            }
        }
        self.lexer.set_pos(save);
        PdfValue::Integer(first)
    }
}

/// Reads `N G obj` at `pos`, returning the id and the offset just after `obj`.
pub fn read_object_header(data: &[u8], pos: usize) -> Option<(ObjectId, usize)> {
    let mut lx = Lexer::at(data, pos);
    let Some(Token::Integer(num)) = lx.next_token() else {
        return None;
    };
    let Some(Token::Integer(gen)) = lx.next_token() else {
        return None;
    };
    let tok = lx.next_token()?;
    if !tok.is_keyword(b"obj") {
        return None;
    }
    if !(0..=u32::MAX as i64).contains(&num) || !(0..=65535).contains(&gen) {
        return None;
    }
    Some((ObjectId::new(num as u32, gen as u16), lx.pos()))
}

/// Outcome of parsing one indirect object from the file body.
#[derive(Debug, Clone)]
pub struct ParsedObject {
    pub id: ObjectId,
    pub value: PdfValue,
    pub warnings: Vec<String>,
}

/// Parses the indirect object whose header starts at `pos`. `length_of`
/// resolves an indirect `/Length` when a stream declares one.
pub fn parse_indirect_object(
    data: &[u8],
    pos: usize,
    length_of: &dyn Fn(ObjectId) -> Option<i64>,
) -> Result<ParsedObject, SyntaxError> {
    let (id, after) = read_object_header(data, pos).ok_or(SyntaxError::NotAnObject)?;
    let mut parser = Parser::at(data, after);
    let mut warnings = Vec::new();
    let first = parser
        .lexer
        .next_token()
        .ok_or(SyntaxError::UnexpectedEof)?;
    // `N G obj endobj` is an empty object.
    if first.is_keyword(b"endobj") {
        return Ok(ParsedObject {
            id,
            value: PdfValue::Null,
            warnings,
        });
    }
    let value = parser.value_from_token(first, 0)?;
    let PdfValue::Dictionary(dict) = value else {
        return Ok(ParsedObject {
            id,
            value,
            warnings,
        });
    };
    let kw_pos = parser.lexer.peek_start();
    let mut probe = Lexer::at(data, kw_pos);
    if !matches!(probe.next_token(), Some(Token::Keyword(k)) if k == b"stream") {
        return Ok(ParsedObject {
            id,
            value: PdfValue::Dictionary(dict),
            warnings,
        });
    }
    let mut data_start = probe.pos();
    // Stream data begins after CRLF or LF; tolerate spaces and a lone CR.
    while data.get(data_start) == Some(&b' ') {
        data_start += 1;
    }
    if data.get(data_start) == Some(&b'\r') {
        data_start += 1;
    }
    if data.get(data_start) == Some(&b'\n') {
        data_start += 1;
    }

    let declared = match dict.get("Length") {
        Some(PdfValue::Integer(n)) => Some(*n),
        Some(PdfValue::Reference(r)) => length_of(*r),
        Some(v) => v.as_i64(),
        None => None,
    };
    let mut repaired = false;
    let extent = declared
        .filter(|&n| n >= 0)
        .map(|n| n as usize)
        .filter(|&n| {
            data_start
                .checked_add(n)
                .is_some_and(|end| end <= data.len())
        })
        .filter(|&n| endstream_follows(data, data_start + n));
    let payload = match extent {
        Some(n) => data[data_start..data_start + n].to_vec(),
        None => {
            repaired = true;
            let end = memmem::find(&data[data_start..], b"endstream")
                .map(|i| data_start + i)
                .unwrap_or(data.len());
            let mut stop = end;
            if stop > data_start && data[stop - 1] == b'\n' {
                stop -= 1;
            }
            if stop > data_start && data[stop - 1] == b'\r' {
                stop -= 1;
            }
            warnings.push(format!(
                "object {id}: stream length {} repaired to {}",
                declared.map_or_else(|| "missing".to_string(), |n| n.to_string()),
                stop - data_start
            ));
            data[data_start..stop].to_vec()
        }
    };
    Ok(ParsedObject {
        id,
        value: PdfValue::Stream(PdfStream {
            dict,
            data: payload,
            offset: kw_pos,
            length_repaired: repaired,
        }),
        warnings,
    })
}

fn endstream_follows(data: &[u8], mut pos: usize) -> bool {
    while pos < data.len() && is_whitespace(data[pos]) {
        pos += 1;
    }
    data[pos..].starts_with(b"endstream")
}
