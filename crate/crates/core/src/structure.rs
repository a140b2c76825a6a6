//! Structural keyword statistics, suspicious-name flags, file-level scalars
//! and auxiliary anomaly indicators.

use std::collections::{HashMap, HashSet};

use memchr::memmem;

use crate::meta::byte_entropy;
use crate::pdf::object::dict_name_is;
use crate::pdf::scan::find_tokens;
use crate::pdf::{Document, ObjectId, PdfValue, XrefKind};

/// Keywords whose occurrences and byte positions are summarised.
pub const STRUCT_KEYWORDS: [&str; 12] = [
    "obj",
    "endobj",
    "stream",
    "endstream",
    "xref",
    "trailer",
    "startxref",
    "/Font",
    "/Page",
    "/Image",
    "/ObjStm",
    "/XRef",
];

/// Names whose presence sets a flag, in vector order.
pub const FLAG_NAMES: [&str; 11] = [
    "JS",
    "JavaScript",
    "OpenAction",
    "AA",
    "Launch",
    "URI",
    "RichMedia",
    "AcroForm",
    "EmbeddedFile",
    "XFA",
    "Encrypt",
];

/// Flag names whose first byte offset is reported.
pub const POSITION_NAMES: [&str; 5] = ["JS", "JavaScript", "OpenAction", "AA", "Launch"];

/// Containers deeper than this are not descended into.
pub const MAX_TREE_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct StructStat {
    pub keyword: &'static str,
    pub count: usize,
    pub pos_min: usize,
    pub pos_max: usize,
    pub pos_avg: f64,
}

impl StructStat {
    pub fn from_offsets(keyword: &'static str, offsets: &[usize]) -> Self {
        let count = offsets.len();
        if count == 0 {
            return Self {
                keyword,
                count: 0,
                pos_min: 0,
                pos_max: 0,
                pos_avg: 0.0,
            };
        }
        let sum: u128 = offsets.iter().map(|&o| o as u128).sum();
        Self {
            keyword,
            count,
            pos_min: *offsets.iter().min().unwrap(),
            pos_max: *offsets.iter().max().unwrap(),
            pos_avg: sum as f64 / count as f64,
        }
    }

    pub fn to_values(&self) -> [f64; 4] {
        [
            self.count as f64,
            self.pos_min as f64,
            self.pos_max as f64,
            self.pos_avg,
        ]
    }
}

/// Count and position statistics for every entry of [`STRUCT_KEYWORDS`].
/// Keywords only match as whole tokens, so `obj` never counts the tail of
/// `endobj` and `/Page` never counts `/Pages`.
pub fn structural_counts(doc: &Document) -> Vec<StructStat> {
    STRUCT_KEYWORDS
        .iter()
        .map(|&kw| StructStat::from_offsets(kw, &find_tokens(doc.raw_bytes(), kw.as_bytes())))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PdfFlagVector(pub [bool; 11]);

impl PdfFlagVector {
    pub fn get(&self, name: &str) -> Option<bool> {
        FLAG_NAMES
            .iter()
            .position(|&n| n == name)
            .map(|i| self.0[i])
    }

    pub fn to_values(&self) -> [f64; 11] {
        self.0.map(|b| b as u8 as f64)
    }
}

/// Visits every value reachable from `start`, entering each indirect object
/// once and stopping below [`MAX_TREE_DEPTH`] nested containers.
pub fn walk_reachable(doc: &Document, start: &PdfValue, mut visit: impl FnMut(&PdfValue)) {
    let mut seen: HashSet<ObjectId> = HashSet::new();
    let mut stack: Vec<(&PdfValue, usize)> = vec![(start, 0)];
    while let Some((value, depth)) = stack.pop() {
        if depth > MAX_TREE_DEPTH {
            continue;
        }
        match value {
            PdfValue::Reference(id) => {
                if seen.insert(*id) {
                    stack.push((doc.resolve(value), depth));
                }
            }
            PdfValue::Array(items) => {
                visit(value);
                stack.extend(items.iter().rev().map(|v| (v, depth + 1)));
            }
            PdfValue::Dictionary(d) => {
                visit(value);
                stack.extend(d.values().rev().map(|v| (v, depth + 1)));
            }
            PdfValue::Stream(s) => {
                visit(value);
                stack.extend(s.dict.values().rev().map(|v| (v, depth + 1)));
            }
            other => visit(other),
        }
    }
}

/// Names (dictionary keys and name values) reachable from the catalog.
pub fn names_reachable_from_root(doc: &Document) -> HashSet<String> {
    let mut names = HashSet::new();
    let root = PdfValue::Dictionary(doc.root().clone());
    walk_reachable(doc, &root, |v| match v {
        PdfValue::Name(n) => {
            names.insert(n.clone());
        }
        PdfValue::Dictionary(d) => names.extend(d.keys().cloned()),
        PdfValue::Stream(s) => names.extend(s.dict.keys().cloned()),
        _ => {}
    });
    names
}

/// A flag is set when its name is reachable from the catalog, or occurs as
/// a name token anywhere in the raw bytes (objects cut out of the xref or
/// page tree are still seen). `/Encrypt` is also set by the trailer.
pub fn keyword_flags(doc: &Document) -> PdfFlagVector {
    let reachable = names_reachable_from_root(doc);
    let mut flags = [false; 11];
    for (flag, name) in flags.iter_mut().zip(FLAG_NAMES) {
        let token = format!("/{name}");
        *flag =
            reachable.contains(name) || !find_tokens(doc.raw_bytes(), token.as_bytes()).is_empty();
    }
    if doc.is_encrypted() {
        flags[10] = true;
    }
    PdfFlagVector(flags)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FileLevelBlock {
    pub file_size: usize,
    pub pdf_version: f64,
    pub count_page: usize,
}

impl FileLevelBlock {
    pub const LEN: usize = 3;

    pub fn to_values(&self) -> [f64; 3] {
        [
            self.file_size as f64,
            self.pdf_version,
            self.count_page as f64,
        ]
    }
}

/// Header version as a number, or 0 when it is unreadable or outside
/// `[1.0, 2.0]`.
pub fn version_number(version: &str) -> f64 {
    version
        .parse::<f64>()
        .ok()
        .filter(|v| (1.0..=2.0).contains(v))
        .unwrap_or(0.0)
}

pub fn file_level(doc: &Document) -> FileLevelBlock {
    FileLevelBlock {
        file_size: doc.file_size(),
        pdf_version: version_number(doc.version()),
        count_page: doc.pages().len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MiscBlock {
    pub whole_file_entropy: f64,
    pub compression_ratio: f64,
    pub embedded_file_count: usize,
    pub object_tree_depth: usize,
    pub is_encrypted: bool,
    pub object_count: usize,
    pub stream_count: usize,
}

impl MiscBlock {
    pub const LEN: usize = 7;

    pub fn to_values(&self) -> [f64; 7] {
        [
            self.whole_file_entropy,
            self.compression_ratio,
            self.embedded_file_count as f64,
            self.object_tree_depth as f64,
            self.is_encrypted as u8 as f64,
            self.object_count as f64,
            self.stream_count as f64,
        ]
    }
}

/// Totals over every stream in the object table, decoded once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StreamSummary {
    pub stream_count: usize,
    /// Decoded length, with undecodable streams counted at encoded size.
    pub decoded_bytes: usize,
    pub undecodable: usize,
}

pub fn stream_summary(doc: &Document) -> StreamSummary {
    let mut sum = StreamSummary::default();
    for value in doc.objects().values() {
        if let PdfValue::Stream(s) = value {
            sum.stream_count += 1;
            let decoded = doc.decode_stream(s);
            if decoded.decoded {
                sum.decoded_bytes += decoded.data.len();
            } else {
                sum.undecodable += 1;
                sum.decoded_bytes += s.data.len();
            }
        }
    }
    sum
}

/// Embedded files reachable from the catalog: the larger of the number of
/// file specifications carrying `/EF` and the number of `/EmbeddedFile`
/// streams, so one attachment seen through both is counted once.
pub fn embedded_file_count(doc: &Document) -> usize {
    let mut filespecs = 0usize;
    let mut streams = 0usize;
    let root = PdfValue::Dictionary(doc.root().clone());
    walk_reachable(doc, &root, |v| match v {
        PdfValue::Dictionary(d) if d.contains_key("EF") => filespecs += 1,
        PdfValue::Stream(s) if dict_name_is(&s.dict, "Type", "EmbeddedFile") => streams += 1,
        _ => {}
    });
    filespecs.max(streams)
}

/// Deepest container nesting reachable from the catalog; the catalog itself
/// is depth 1. Capped at [`MAX_TREE_DEPTH`].
pub fn object_tree_depth(doc: &Document) -> usize {
    fn depth(
        doc: &Document,
        v: &PdfValue,
        level: usize,
        memo: &mut HashMap<ObjectId, usize>,
        active: &mut HashSet<ObjectId>,
    ) -> usize {
        if level >= MAX_TREE_DEPTH {
            return 0;
        }
        match v {
            PdfValue::Reference(id) => {
                if let Some(&d) = memo.get(id) {
                    return d;
                }
                if !active.insert(*id) {
                    return 0;
                }
                let d = depth(doc, doc.resolve(v), level, memo, active);
                active.remove(id);
                memo.insert(*id, d);
                d
            }
            PdfValue::Array(items) => {
                1 + items
                    .iter()
                    .map(|c| depth(doc, c, level + 1, memo, active))
                    .max()
                    .unwrap_or(0)
            }
            PdfValue::Dictionary(d) => {
                1 + d
                    .values()
                    .map(|c| depth(doc, c, level + 1, memo, active))
                    .max()
                    .unwrap_or(0)
            }
            PdfValue::Stream(s) => {
                1 + s
                    .dict
                    .values()
                    .map(|c| depth(doc, c, level + 1, memo, active))
                    .max()
                    .unwrap_or(0)
            }
            _ => 0,
        }
    }
    if doc.root().is_empty() {
        return 0;
    }
    let root = PdfValue::Dictionary(doc.root().clone());
    depth(doc, &root, 0, &mut HashMap::new(), &mut HashSet::new()).min(MAX_TREE_DEPTH)
}

pub fn misc_block(doc: &Document) -> MiscBlock {
    misc_block_with(doc, &stream_summary(doc))
}

pub fn misc_block_with(doc: &Document, streams: &StreamSummary) -> MiscBlock {
    MiscBlock {
        whole_file_entropy: byte_entropy(doc.raw_bytes()),
        compression_ratio: if doc.file_size() == 0 {
            0.0
        } else {
            streams.decoded_bytes as f64 / doc.file_size() as f64
        },
        embedded_file_count: embedded_file_count(doc),
        object_tree_depth: object_tree_depth(doc),
        is_encrypted: doc.is_encrypted(),
        object_count: doc.object_count(),
        stream_count: streams.stream_count,
    }
}

/// File-shape anomalies that sit beside the misc block: raw frequencies and
/// first offsets of suspicious names, plus parser observations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnomalyBlock {
    pub name_frequency: [usize; 11],
    pub first_position: [usize; 5],
    pub header_offset: usize,
    pub eof_marker_count: usize,
    pub trailing_bytes: usize,
    pub xref_stream_present: bool,
    pub xref_recovered: bool,
    pub parse_warning_count: usize,
    pub object_stream_count: usize,
    pub objects_in_object_streams: usize,
    pub inline_image_count: usize,
    pub undecodable_stream_count: usize,
    pub ascii_encoded_stream_count: usize,
    pub has_xmp_metadata: bool,
}

impl AnomalyBlock {
    pub const LEN: usize = 28;

    pub fn to_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.name_frequency.iter().map(|&c| c as f64).collect();
        v.extend(self.first_position.iter().map(|&p| p as f64));
        v.extend([
            self.header_offset as f64,
            self.eof_marker_count as f64,
            self.trailing_bytes as f64,
            self.xref_stream_present as u8 as f64,
            self.xref_recovered as u8 as f64,
            self.parse_warning_count as f64,
            self.object_stream_count as f64,
            self.objects_in_object_streams as f64,
            self.inline_image_count as f64,
            self.undecodable_stream_count as f64,
            self.ascii_encoded_stream_count as f64,
            self.has_xmp_metadata as u8 as f64,
        ]);
        v
    }
}

pub fn anomaly_block(doc: &Document, inline_image_count: usize) -> AnomalyBlock {
    anomaly_block_with(doc, inline_image_count, &stream_summary(doc))
}

pub fn anomaly_block_with(
    doc: &Document,
    inline_image_count: usize,
    streams: &StreamSummary,
) -> AnomalyBlock {
    let raw = doc.raw_bytes();
    let mut block = AnomalyBlock::default();
    for (i, name) in FLAG_NAMES.iter().enumerate() {
        block.name_frequency[i] = find_tokens(raw, format!("/{name}").as_bytes()).len();
    }
    for (i, name) in POSITION_NAMES.iter().enumerate() {
        block.first_position[i] = find_tokens(raw, format!("/{name}").as_bytes())
            .first()
            .copied()
            .unwrap_or(0);
    }
    let stats = doc.stats();
    block.header_offset = stats.header_offset;
    let eofs: Vec<usize> = memmem::find_iter(raw, b"%%EOF").collect();
    block.eof_marker_count = eofs.len();
    block.trailing_bytes = eofs.last().map_or(0, |&last| {
        raw[last + 5..]
            .iter()
            .rposition(|b| !b.is_ascii_whitespace())
            .map_or(0, |i| i + 1)
    });
    block.xref_stream_present = matches!(stats.xref_kind, XrefKind::Stream | XrefKind::Hybrid);
    block.xref_recovered = stats.recovered;
    block.parse_warning_count = doc.parse_warnings().len();
    block.object_stream_count = stats.object_streams;
    block.objects_in_object_streams = stats.objects_in_object_streams;
    block.inline_image_count = inline_image_count;
    block.undecodable_stream_count = streams.undecodable;
    block.ascii_encoded_stream_count = doc
        .objects()
        .values()
        .filter_map(|v| v.as_stream())
        .filter(|s| {
            let names: Vec<&str> = match s.dict.get("Filter").map(|f| doc.resolve(f)) {
                Some(PdfValue::Name(n)) => vec![n.as_str()],
                Some(PdfValue::Array(a)) => a.iter().filter_map(PdfValue::as_name).collect(),
                _ => Vec::new(),
            };
            names
                .iter()
                .any(|n| matches!(*n, "ASCIIHexDecode" | "AHx" | "ASCII85Decode" | "A85"))
        })
        .count();
    block.has_xmp_metadata = doc.lookup(doc.root(), "Metadata").is_some();
    block
}
