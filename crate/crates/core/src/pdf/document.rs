//! File-level parsing: header, cross-reference sections, object table,
//! object streams, trailer and page tree.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Mutex;

use memchr::memmem;
use thiserror::Error;

use super::filters::{self, FilterError, PredictorParams};
use super::object::{dict_name_is, Dictionary, ObjectId, PdfStream, PdfValue};
use super::scan::{self, KeywordHit};
use super::syntax::{self, is_regular, is_whitespace, Lexer, Parser, Token};

/// Reference chains longer than this are treated as cycles.
pub const MAX_REFERENCE_HOPS: usize = 32;
const HEADER_WINDOW: usize = 1024;
const MAX_XREF_SECTIONS: usize = 64;
const MAX_PAGE_TREE_DEPTH: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("no %PDF- header in the first {HEADER_WINDOW} bytes")]
    HeaderMissing,
    #[error("no indirect objects could be recovered")]
    Unrecoverable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XrefMode {
    /// Use the cross-reference data, repairing damaged entries by scanning.
    #[default]
    Auto,
    /// Ignore cross-reference data and locate objects by linear scan only.
    ForceScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XrefKind {
    #[default]
    None,
    Table,
    Stream,
    Hybrid,
}

/// Facts about how the file was parsed, kept for anomaly features.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub header_offset: usize,
    pub xref_kind: XrefKind,
    /// True when any object location came from the linear-scan fallback.
    pub recovered: bool,
    pub object_streams: usize,
    pub objects_in_object_streams: usize,
    /// Objects present in the body but absent from every xref section.
    pub unindexed_objects: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Page {
    pub id: Option<ObjectId>,
    pub dict: Dictionary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum XrefEntry {
    Free,
    InFile { offset: usize, generation: u16 },
    Compressed { stream: u32 },
}

/// Stream contents after the filter chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedStream {
    pub data: Vec<u8>,
    /// False when some filter in the chain is unsupported (data is then the
    /// output of the supported prefix) or the data was corrupt (data empty).
    pub decoded: bool,
    pub corrupt: bool,
}

/// A parsed PDF file. Immutable once built; resolution failures found while
/// reading it are collected in an internal, synchronized warning list.
#[derive(Debug)]
pub struct Document {
    objects: BTreeMap<ObjectId, PdfValue>,
    latest_generation: HashMap<u32, ObjectId>,
    trailer: Dictionary,
    root: Dictionary,
    info: Option<Dictionary>,
    pages: Vec<Page>,
    version: String,
    raw: Vec<u8>,
    parse_warnings: Vec<String>,
    encrypted: bool,
    stats: ParseStats,
    runtime_warnings: Mutex<Vec<String>>,
}

static NULL: PdfValue = PdfValue::Null;

impl Document {
    pub fn parse(bytes: impl Into<Vec<u8>>) -> Result<Self, ParseError> {
        Self::parse_with(bytes, XrefMode::Auto)
    }

    pub fn parse_with(bytes: impl Into<Vec<u8>>, mode: XrefMode) -> Result<Self, ParseError> {
        Loader::new(bytes.into(), mode).load()
    }

    pub fn objects(&self) -> &BTreeMap<ObjectId, PdfValue> {
        &self.objects
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn get(&self, id: ObjectId) -> Option<&PdfValue> {
        self.objects.get(&id).or_else(|| {
            self.latest_generation
                .get(&id.number)
                .and_then(|k| self.objects.get(k))
        })
    }

    pub fn trailer(&self) -> &Dictionary {
        &self.trailer
    }

    pub fn root(&self) -> &Dictionary {
        &self.root
    }

    pub fn info(&self) -> Option<&Dictionary> {
        self.info.as_ref()
    }

    pub fn pages(&self) -> &[Page] {
        &self.pages
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn file_size(&self) -> usize {
        self.raw.len()
    }

    pub fn raw_bytes(&self) -> &[u8] {
        &self.raw
    }

    pub fn is_encrypted(&self) -> bool {
        self.encrypted
    }

    pub fn stats(&self) -> &ParseStats {
        &self.stats
    }

    pub fn parse_warnings(&self) -> &[String] {
        &self.parse_warnings
    }

    /// Parse warnings followed by those recorded while reading the document.
    pub fn warnings(&self) -> Vec<String> {
        let mut all = self.parse_warnings.clone();
        all.extend(self.runtime_warnings.lock().unwrap().iter().cloned());
        all
    }

    pub fn warning_count(&self) -> usize {
        self.parse_warnings.len() + self.runtime_warnings.lock().unwrap().len()
    }

    pub fn warn(&self, message: impl Into<String>) {
        let message = message.into();
        let mut w = self.runtime_warnings.lock().unwrap();
        if !w.contains(&message) {
            w.push(message);
        }
    }

    /// Follows references until a direct value is reached. Dangling or
    /// cyclic chains yield `Null` and record a warning.
    pub fn resolve<'a>(&'a self, value: &'a PdfValue) -> &'a PdfValue {
        let mut current = value;
        for _ in 0..MAX_REFERENCE_HOPS {
            let PdfValue::Reference(id) = current else {
                return current;
            };
            match self.get(*id) {
                Some(v) => current = v,
                None => {
                    self.warn(format!("dangling reference {id}"));
                    return &NULL;
                }
            }
        }
        if let PdfValue::Reference(id) = current {
            self.warn(format!(
                "reference chain through {id} exceeds {MAX_REFERENCE_HOPS} hops"
            ));
            return &NULL;
        }
        current
    }

    /// Resolved `dict[key]`, or `None` when absent or null.
    pub fn lookup<'a>(&'a self, dict: &'a Dictionary, key: &str) -> Option<&'a PdfValue> {
        dict.get(key)
            .map(|v| self.resolve(v))
            .filter(|v| !v.is_null())
    }

    pub fn decode_stream(&self, stream: &PdfStream) -> DecodedStream {
        let out = decode_filters(stream, &|v| self.resolve(v).clone());
        if let Some(msg) = &out.1 {
            self.warn(format!("stream at offset {}: {msg}", stream.offset));
        }
        out.0
    }

    pub fn scan_keyword_positions(&self, keyword: &[u8]) -> Vec<KeywordHit> {
        let offsets = scan::find_all(&self.raw, keyword);
        scan::hits(&String::from_utf8_lossy(keyword), offsets)
    }
}

/// Runs the filter chain. The second element carries a warning for corrupt
/// data.
fn decode_filters(
    stream: &PdfStream,
    resolve: &dyn Fn(&PdfValue) -> PdfValue,
) -> (DecodedStream, Option<String>) {
    let filters: Vec<String> = match stream.dict.get("Filter").map(resolve) {
        Some(PdfValue::Name(n)) => vec![n],
        Some(PdfValue::Array(items)) => items
            .iter()
            .filter_map(|v| resolve(v).as_name().map(str::to_string))
            .collect(),
        _ => Vec::new(),
    };
    let params: Vec<Option<PredictorParams>> = match stream
        .dict
        .get("DecodeParms")
        .or_else(|| stream.dict.get("DP"))
        .map(resolve)
    {
        Some(PdfValue::Dictionary(d)) => vec![Some(predictor_params(&d, resolve))],
        Some(PdfValue::Array(items)) => items
            .iter()
            .map(|v| resolve(v).as_dict().map(|d| predictor_params(d, resolve)))
            .collect(),
        _ => Vec::new(),
    };
    let mut data = stream.data.clone();
    for (i, name) in filters.iter().enumerate() {
        match filters::apply_filter(name, &data, params.get(i).copied().flatten()) {
            Ok(next) => data = next,
            Err(FilterError::Unsupported(_)) => {
                return (
                    DecodedStream {
                        data,
                        decoded: false,
                        corrupt: false,
                    },
                    None,
                )
            }
            Err(FilterError::Corrupt(msg)) => {
                return (
                    DecodedStream {
                        data: Vec::new(),
                        decoded: false,
                        corrupt: true,
                    },
                    Some(msg),
                )
            }
        }
    }
    (
        DecodedStream {
            data,
            decoded: true,
            corrupt: false,
        },
        None,
    )
}

fn predictor_params(d: &Dictionary, resolve: &dyn Fn(&PdfValue) -> PdfValue) -> PredictorParams {
    let int = |key: &str, default: i64| {
        d.get(key)
            .map(resolve)
            .and_then(|v| v.as_i64())
            .unwrap_or(default)
    };
    PredictorParams {
        predictor: int("Predictor", 1),
        colors: int("Colors", 1).clamp(1, 32) as usize,
        bits_per_component: int("BitsPerComponent", 8).clamp(1, 16) as usize,
        columns: int("Columns", 1).clamp(1, 1 << 20) as usize,
    }
}

/// Finds every `N G obj` header by scanning for the `obj` token and reading
/// the two integers before it. Returns (id, offset of N) in file order.
pub fn scan_object_headers(bytes: &[u8]) -> Vec<(ObjectId, usize)> {
    let mut out = Vec::new();
    for pos in scan::find_tokens(bytes, b"obj") {
        let mut i = pos;
        let skip_ws = |i: &mut usize| {
            let start = *i;
            while *i > 0 && is_whitespace(bytes[*i - 1]) {
                *i -= 1;
            }
            *i < start
        };
        let digits = |i: &mut usize| {
            let end = *i;
            while *i > 0 && bytes[*i - 1].is_ascii_digit() && end - *i < 10 {
                *i -= 1;
            }
            (*i < end).then(|| &bytes[*i..end])
        };
        if !skip_ws(&mut i) {
            continue;
        }
        let Some(gen) = digits(&mut i) else { continue };
        if !skip_ws(&mut i) {
            continue;
        }
        let Some(num) = digits(&mut i) else { continue };
        if i > 0 && is_regular(bytes[i - 1]) {
            continue;
        }
        let parse = |d: &[u8]| std::str::from_utf8(d).ok()?.parse::<u64>().ok();
        let (Some(num), Some(gen)) = (parse(num), parse(gen)) else {
            continue;
        };
        if num > u32::MAX as u64 || gen > 65535 {
            continue;
        }
        out.push((ObjectId::new(num as u32, gen as u16), i));
    }
    out
}

struct XrefData {
    entries: BTreeMap<u32, XrefEntry>,
    trailer: Dictionary,
    kind: XrefKind,
}

struct Loader {
    raw: Vec<u8>,
    mode: XrefMode,
    warnings: Vec<String>,
    stats: ParseStats,
    /// Object number -> (id, header offset), last definition in the file wins.
    scanned: BTreeMap<u32, (ObjectId, usize)>,
}

impl Loader {
    fn new(raw: Vec<u8>, mode: XrefMode) -> Self {
        Self {
            raw,
            mode,
            warnings: Vec::new(),
            stats: ParseStats::default(),
            scanned: BTreeMap::new(),
        }
    }

    fn load(mut self) -> Result<Document, ParseError> {
        let window = &self.raw[..self.raw.len().min(HEADER_WINDOW)];
        let header = memmem::find(window, b"%PDF-").ok_or(ParseError::HeaderMissing)?;
        self.stats.header_offset = header;
        if header > 0 {
            self.warnings
                .push(format!("{header} bytes of data precede the %PDF- header"));
        }
        let version: String = self.raw[header + 5..]
            .iter()
            .take(8)
            .take_while(|b| b.is_ascii_digit() || **b == b'.')
            .map(|&b| b as char)
            .collect();

        for (id, off) in scan_object_headers(&self.raw) {
            self.scanned.insert(id.number, (id, off));
        }

        let xref = match self.mode {
            XrefMode::Auto => self.read_xref(),
            XrefMode::ForceScan => None,
        };
        let (locations, compressed, mut trailer) = self.locate_objects(xref);

        let mut objects = BTreeMap::new();
        for (num, (id, offset)) in &locations {
            let raw = &self.raw;
            let length_of = |r: ObjectId| -> Option<i64> {
                let (_, off) = locations.get(&r.number)?;
                let obj = syntax::parse_indirect_object(raw, *off, &|_| None).ok()?;
                obj.value.as_i64()
            };
            match syntax::parse_indirect_object(raw, *offset, &length_of) {
                Ok(parsed) => {
                    self.warnings.extend(parsed.warnings);
                    if parsed.id.number != *num {
                        self.warnings.push(format!(
                            "object {id} header at offset {offset} reads as {}",
                            parsed.id
                        ));
                    }
                    objects.insert(parsed.id, parsed.value);
                }
                Err(e) => self
                    .warnings
                    .push(format!("object {id} at offset {offset}: {e}")),
            }
        }

        self.expand_object_streams(&mut objects, &compressed);

        if objects.is_empty() {
            return Err(ParseError::Unrecoverable);
        }

        let mut latest_generation: HashMap<u32, ObjectId> = HashMap::new();
        for id in objects.keys() {
            latest_generation
                .entry(id.number)
                .and_modify(|k| {
                    if id.generation > k.generation {
                        *k = *id
                    }
                })
                .or_insert(*id);
        }

        if !trailer.contains_key("Root") {
            self.recover_trailer(&objects, &mut trailer);
        }

        let mut doc = Document {
            objects,
            latest_generation,
            trailer,
            root: Dictionary::new(),
            info: None,
            pages: Vec::new(),
            version,
            raw: Vec::new(),
            parse_warnings: Vec::new(),
            encrypted: false,
            stats: ParseStats::default(),
            runtime_warnings: Mutex::new(Vec::new()),
        };

        doc.encrypted = doc.trailer.contains_key("Encrypt");
        match doc.trailer.get("Root").map(|v| doc.resolve(v)) {
            Some(PdfValue::Dictionary(d)) => doc.root = d.clone(),
            _ => self.warnings.push("document catalog missing".into()),
        }
        doc.info = doc
            .trailer
            .get("Info")
            .map(|v| doc.resolve(v))
            .and_then(|v| v.as_dict().cloned());
        doc.pages = collect_pages(&doc, &mut self.warnings);

        // Resolution problems met during construction count as parse warnings.
        self.warnings
            .extend(std::mem::take(&mut *doc.runtime_warnings.lock().unwrap()));
        doc.raw = self.raw;
        doc.parse_warnings = self.warnings;
        doc.stats = self.stats;
        Ok(doc)
    }

    /// Reads the xref chain starting at the last `startxref`.
    fn read_xref(&mut self) -> Option<XrefData> {
        let Some(sx) = memmem::rfind(&self.raw, b"startxref") else {
            self.warnings.push("startxref not found".into());
            return None;
        };
        let mut lx = Lexer::at(&self.raw, sx + 9);
        let Some(Token::Integer(start)) = lx.next_token() else {
            self.warnings.push("startxref offset unreadable".into());
            return None;
        };
        let start = usize::try_from(start).ok()?;

        let mut entries = BTreeMap::new();
        let mut trailer = Dictionary::new();
        let mut kinds = (false, false);
        let mut visited = HashSet::new();
        let mut next = Some(start);
        while let Some(offset) = next.take() {
            if visited.len() >= MAX_XREF_SECTIONS || !visited.insert(offset) {
                break;
            }
            let section = self.read_xref_section(offset).or_else(|| {
                let shifted = offset + self.stats.header_offset;
                (self.stats.header_offset > 0)
                    .then(|| self.read_xref_section(shifted))
                    .flatten()
            });
            let Some((section_entries, section_trailer, is_stream)) = section else {
                self.warnings
                    .push(format!("no cross-reference section at offset {offset}"));
                break;
            };
            if is_stream {
                kinds.1 = true;
            } else {
                kinds.0 = true;
            }
            // Hybrid files: entries from /XRefStm take precedence over the
            // classic table they accompany.
            if let Some(stm) = section_trailer.get("XRefStm").and_then(PdfValue::as_i64) {
                if let Some((stm_entries, _, true)) = usize::try_from(stm)
                    .ok()
                    .and_then(|o| self.read_xref_section(o))
                {
                    kinds.1 = true;
                    for (n, e) in stm_entries {
                        entries.entry(n).or_insert(e);
                    }
                }
            }
            for (n, e) in section_entries {
                entries.entry(n).or_insert(e);
            }
            for (k, v) in &section_trailer {
                if !trailer.contains_key(k) {
                    trailer.insert(k.clone(), v.clone());
                }
            }
            next = section_trailer
                .get("Prev")
                .and_then(PdfValue::as_i64)
                .and_then(|p| usize::try_from(p).ok());
        }
        if entries.is_empty() && trailer.is_empty() {
            return None;
        }
        let kind = match kinds {
            (true, true) => XrefKind::Hybrid,
            (true, false) => XrefKind::Table,
            (false, true) => XrefKind::Stream,
            (false, false) => XrefKind::None,
        };
        trailer.shift_remove("Prev");
        trailer.shift_remove("XRefStm");
        Some(XrefData {
            entries,
            trailer,
            kind,
        })
    }

    #[allow(clippy::type_complexity)]
    fn read_xref_section(
        &self,
        offset: usize,
    ) -> Option<(Vec<(u32, XrefEntry)>, Dictionary, bool)> {
        if offset >= self.raw.len() {
            return None;
        }
        let mut lx = Lexer::at(&self.raw, offset);
        let save = lx.pos();
        if lx.next_token()?.is_keyword(b"xref") {
            return self.read_xref_table(lx).map(|(e, t)| (e, t, false));
        }
        lx.set_pos(save);
        self.read_xref_stream(offset).map(|(e, t)| (e, t, true))
    }

    fn read_xref_table(&self, mut lx: Lexer<'_>) -> Option<(Vec<(u32, XrefEntry)>, Dictionary)> {
        let mut entries = Vec::new();
        loop {
            match lx.next_token()? {
                Token::Keyword(k) if k == b"trailer" => break,
                Token::Integer(first) => {
                    let Some(Token::Integer(count)) = lx.next_token() else {
                        return None;
                    };
                    let first = u32::try_from(first).ok()?;
                    for i in 0..count.max(0) {
                        let Some(Token::Integer(off)) = lx.next_token() else {
                            return None;
                        };
                        let Some(Token::Integer(gen)) = lx.next_token() else {
                            return None;
                        };
                        let Some(Token::Keyword(kind)) = lx.next_token() else {
                            return None;
                        };
                        let num = first.checked_add(i as u32)?;
                        let entry = match kind.as_slice() {
                            b"n" => XrefEntry::InFile {
                                offset: usize::try_from(off).ok()?,
                                generation: u16::try_from(gen).unwrap_or(0),
                            },
                            b"f" => XrefEntry::Free,
                            _ => return None,
                        };
                        entries.push((num, entry));
                    }
                }
                _ => return None,
            }
        }
        let mut parser = Parser::at(lx.data(), lx.pos());
        let trailer = match parser.parse_value() {
            Ok(PdfValue::Dictionary(d)) => d,
            _ => return None,
        };
        Some((entries, trailer))
    }

    fn read_xref_stream(&self, offset: usize) -> Option<(Vec<(u32, XrefEntry)>, Dictionary)> {
        let length_of = |r: ObjectId| -> Option<i64> {
            let (_, off) = self.scanned.get(&r.number)?;
            syntax::parse_indirect_object(&self.raw, *off, &|_| None)
                .ok()?
                .value
                .as_i64()
        };
        let parsed = syntax::parse_indirect_object(&self.raw, offset, &length_of).ok()?;
        let PdfValue::Stream(stream) = parsed.value else {
            return None;
        };
        if !dict_name_is(&stream.dict, "Type", "XRef") {
            return None;
        }
        let (decoded, _) = decode_filters(&stream, &|v| v.clone());
        if !decoded.decoded {
            return None;
        }
        let widths: Vec<usize> = stream
            .dict
            .get("W")?
            .as_array()?
            .iter()
            .map(|v| v.as_i64().unwrap_or(0).clamp(0, 8) as usize)
            .collect();
        if widths.len() < 3 {
            return None;
        }
        let row = widths[0] + widths[1] + widths[2];
        if row == 0 {
            return None;
        }
        let size = stream
            .dict
            .get("Size")
            .and_then(PdfValue::as_i64)
            .unwrap_or(0);
        let index: Vec<i64> = match stream.dict.get("Index").and_then(PdfValue::as_array) {
            Some(items) => items.iter().filter_map(PdfValue::as_i64).collect(),
            None => vec![0, size],
        };
        let field = |bytes: &[u8]| bytes.iter().fold(0u64, |acc, &b| (acc << 8) | b as u64);
        let mut entries = Vec::new();
        let mut rows = decoded.data.chunks_exact(row);
        for pair in index.chunks_exact(2) {
            let (first, count) = (pair[0].max(0) as u64, pair[1].max(0) as u64);
            for i in 0..count {
                let Some(r) = rows.next() else { break };
                let kind = if widths[0] == 0 {
                    1
                } else {
                    field(&r[..widths[0]])
                };
                let f2 = field(&r[widths[0]..widths[0] + widths[1]]);
                let f3 = field(&r[widths[0] + widths[1]..]);
                let Ok(num) = u32::try_from(first + i) else {
                    break;
                };
                let entry = match kind {
                    0 => XrefEntry::Free,
                    1 => XrefEntry::InFile {
                        offset: f2 as usize,
                        generation: f3.min(65535) as u16,
                    },
                    2 => XrefEntry::Compressed { stream: f2 as u32 },
                    _ => continue,
                };
                entries.push((num, entry));
            }
        }
        let mut trailer = stream.dict.clone();
        for key in ["Length", "Filter", "DecodeParms", "W", "Index", "Type"] {
            trailer.shift_remove(key);
        }
        Some((entries, trailer))
    }

    /// Decides where each object lives. Returns file locations, the set of
    /// object streams named by the xref, and the trailer.
    #[allow(clippy::type_complexity)]
    fn locate_objects(
        &mut self,
        xref: Option<XrefData>,
    ) -> (BTreeMap<u32, (ObjectId, usize)>, Vec<u32>, Dictionary) {
        let Some(xref) = xref else {
            if self.mode == XrefMode::Auto {
                self.warnings
                    .push("cross-reference data unusable; objects located by linear scan".into());
            }
            self.stats.recovered = true;
            return (self.scanned.clone(), Vec::new(), Dictionary::new());
        };
        self.stats.xref_kind = xref.kind;
        let mut locations = BTreeMap::new();
        let mut compressed = Vec::new();
        let mut repaired = 0usize;
        for (&num, entry) in &xref.entries {
            if num == 0 {
                continue;
            }
            match *entry {
                XrefEntry::Free => {}
                XrefEntry::Compressed { stream } => {
                    if !compressed.contains(&stream) {
                        compressed.push(stream);
                    }
                }
                XrefEntry::InFile { offset, generation } => {
                    let header = syntax::read_object_header(&self.raw, offset);
                    match header {
                        Some((id, _)) if id.number == num => {
                            locations.insert(num, (id, offset));
                        }
                        _ => {
                            if let Some(&found) = self.scanned.get(&num) {
                                repaired += 1;
                                locations.insert(num, found);
                            } else {
                                self.warnings.push(format!(
                                    "xref entry {num} {generation} points at offset {offset} with no object"
                                ));
                            }
                        }
                    }
                }
            }
        }
        if repaired > 0 {
            self.stats.recovered = true;
            self.warnings.push(format!(
                "{repaired} xref entries had bad offsets; objects located by linear scan"
            ));
        }
        let mut unindexed = 0;
        for (&num, &found) in &self.scanned {
            if num != 0 && !xref.entries.contains_key(&num) {
                unindexed += 1;
                locations.insert(num, found);
            }
        }
        if unindexed > 0 {
            self.stats.unindexed_objects = unindexed;
            self.warnings.push(format!(
                "{unindexed} objects in the file body are missing from the xref"
            ));
        }
        (locations, compressed, xref.trailer)
    }

    fn expand_object_streams(&mut self, objects: &mut BTreeMap<ObjectId, PdfValue>, named: &[u32]) {
        let mut present: HashSet<u32> = objects.keys().map(|k| k.number).collect();
        let mut order: Vec<ObjectId> = Vec::new();
        for &n in named {
            let span = ObjectId::new(n, 0)..=ObjectId::new(n, u16::MAX);
            if let Some((id, _)) = objects.range(span).next() {
                order.push(*id);
            }
        }
        for (id, v) in objects.iter() {
            if let PdfValue::Stream(s) = v {
                if dict_name_is(&s.dict, "Type", "ObjStm") && !named.contains(&id.number) {
                    order.push(*id);
                }
            }
        }
        for id in order {
            let Some(PdfValue::Stream(stream)) = objects.get(&id) else {
                continue;
            };
            let lookup = |v: &PdfValue| -> PdfValue {
                let mut cur = v.clone();
                for _ in 0..MAX_REFERENCE_HOPS {
                    match cur {
                        PdfValue::Reference(r) => match objects.get(&r) {
                            Some(next) => cur = next.clone(),
                            None => return PdfValue::Null,
                        },
                        other => return other,
                    }
                }
                PdfValue::Null
            };
            let n = stream
                .dict
                .get("N")
                .map(&lookup)
                .and_then(|v| v.as_i64())
                .unwrap_or(0);
            let first = stream
                .dict
                .get("First")
                .map(&lookup)
                .and_then(|v| v.as_i64())
                .unwrap_or(0);
            let (decoded, warn) = decode_filters(stream, &lookup);
            if let Some(w) = warn {
                self.warnings.push(format!("object stream {id}: {w}"));
                continue;
            }
            if !decoded.decoded {
                self.warnings
                    .push(format!("object stream {id}: unsupported filter"));
                continue;
            }
            self.stats.object_streams += 1;
            let contained = parse_object_stream(&decoded.data, n, first);
            if contained.len() as i64 != n {
                self.warnings.push(format!(
                    "object stream {id}: declared {n} objects, read {}",
                    contained.len()
                ));
            }
            for (num, value) in contained {
                let key = ObjectId::new(num, 0);
                if num == 0 || !present.insert(num) {
                    continue;
                }
                self.stats.objects_in_object_streams += 1;
                objects.insert(key, value);
            }
        }
    }

    fn recover_trailer(
        &mut self,
        objects: &BTreeMap<ObjectId, PdfValue>,
        trailer: &mut Dictionary,
    ) {
        for pos in scan::find_tokens(&self.raw, b"trailer") {
            let mut parser = Parser::at(&self.raw, pos + 7);
            if let Ok(PdfValue::Dictionary(d)) = parser.parse_value() {
                for (k, v) in d {
                    trailer.insert(k, v);
                }
            }
        }
        for v in objects.values() {
            if let PdfValue::Stream(s) = v {
                if dict_name_is(&s.dict, "Type", "XRef") {
                    for key in ["Root", "Info", "Encrypt", "ID"] {
                        if let Some(val) = s.dict.get(key) {
                            trailer.insert(key.to_string(), val.clone());
                        }
                    }
                }
            }
        }
        let root_ok = trailer
            .get("Root")
            .and_then(PdfValue::as_reference)
            .is_some_and(|r| objects.keys().any(|k| k.number == r.number));
        if !root_ok {
            let catalog = objects
                .iter()
                .rev()
                .find(|(_, v)| {
                    v.as_dict()
                        .is_some_and(|d| dict_name_is(d, "Type", "Catalog"))
                })
                .map(|(id, _)| *id);
            if let Some(id) = catalog {
                self.warnings
                    .push(format!("trailer lacks a usable /Root; using catalog {id}"));
                trailer.insert("Root".into(), PdfValue::Reference(id));
            }
        }
        trailer.shift_remove("Prev");
        trailer.shift_remove("XRefStm");
    }
}

fn parse_object_stream(data: &[u8], n: i64, first: i64) -> Vec<(u32, PdfValue)> {
    let n = n.clamp(0, 1 << 20) as usize;
    let first = usize::try_from(first).unwrap_or(0).min(data.len());
    let mut lx = Lexer::new(&data[..first]);
    let mut header = Vec::with_capacity(n);
    for _ in 0..n {
        let (Some(Token::Integer(num)), Some(Token::Integer(off))) =
            (lx.next_token(), lx.next_token())
        else {
            break;
        };
        if let (Ok(num), Ok(off)) = (u32::try_from(num), usize::try_from(off)) {
            header.push((num, off));
        }
    }
    let mut out = Vec::with_capacity(header.len());
    for (num, off) in header {
        let Some(pos) = first.checked_add(off).filter(|&p| p < data.len()) else {
            continue;
        };
        let mut parser = Parser::at(data, pos);
        if let Ok(value) = parser.parse_value() {
            out.push((num, value));
        }
    }
    out
}

fn collect_pages(doc: &Document, warnings: &mut Vec<String>) -> Vec<Page> {
    let mut pages = Vec::new();
    let mut visited = HashSet::new();
    let declared = doc
        .root
        .get("Pages")
        .map(|v| doc.resolve(v))
        .and_then(|v| v.as_dict())
        .and_then(|d| doc.lookup(d, "Count"))
        .and_then(PdfValue::as_i64);
    if let Some(node) = doc.root.get("Pages") {
        walk_page_tree(doc, node, 0, &mut visited, &mut pages, warnings);
    }
    if pages.is_empty() {
        let orphans: Vec<Page> = doc
            .objects
            .iter()
            .filter_map(|(id, v)| {
                let d = v.as_dict()?;
                dict_name_is(d, "Type", "Page").then(|| Page {
                    id: Some(*id),
                    dict: d.clone(),
                })
            })
            .collect();
        if !orphans.is_empty() {
            warnings.push(format!(
                "page tree unusable; recovered {} page objects by type",
                orphans.len()
            ));
            return orphans;
        }
    }
    if let Some(count) = declared {
        if count != pages.len() as i64 {
            warnings.push(format!(
                "page tree declares {count} pages, found {}",
                pages.len()
            ));
        }
    }
    pages
}

fn walk_page_tree(
    doc: &Document,
    node: &PdfValue,
    depth: usize,
    visited: &mut HashSet<ObjectId>,
    pages: &mut Vec<Page>,
    warnings: &mut Vec<String>,
) {
    if depth > MAX_PAGE_TREE_DEPTH {
        warnings.push("page tree too deep".into());
        return;
    }
    let id = node.as_reference();
    if let Some(id) = id {
        if !visited.insert(id) {
            warnings.push(format!("page tree revisits {id}"));
            return;
        }
    }
    let Some(dict) = doc.resolve(node).as_dict() else {
        warnings.push("page tree node is not a dictionary".into());
        return;
    };
    match doc.lookup(dict, "Kids").and_then(PdfValue::as_array) {
        Some(kids) if !dict_name_is(dict, "Type", "Page") => {
            for kid in kids {
                walk_page_tree(doc, kid, depth + 1, visited, pages, warnings);
            }
        }
        _ => {
            if dict_name_is(dict, "Type", "Pages") {
                return;
            }
            pages.push(Page {
                id,
                dict: dict.clone(),
            });
        }
    }
}
