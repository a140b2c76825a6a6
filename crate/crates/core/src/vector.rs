//! The fixed feature schema, vector assembly, and CSV / JSON Lines output.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::graph::GraphFeatureBlock;
use crate::image::ImageBlock;
use crate::meta::{FieldComposition, TemporalBlock, TextSummary, TEXT_FIELDS};
use crate::structure::{
    AnomalyBlock, FileLevelBlock, MiscBlock, PdfFlagVector, StructStat, FLAG_NAMES, POSITION_NAMES,
    STRUCT_KEYWORDS,
};

pub const SCHEMA_VERSION: &str = "1";
pub const COLUMN_COUNT: usize = 170;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Graph,
    Meta,
    Text,
    Time,
    Struct,
    Image,
    Flags,
    File,
    Misc,
}

impl Group {
    /// Vector order of the groups.
    pub const ORDER: [Group; 9] = [
        Group::Graph,
        Group::Meta,
        Group::Text,
        Group::Time,
        Group::Struct,
        Group::Image,
        Group::Flags,
        Group::File,
        Group::Misc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Graph => "graph",
            Group::Meta => "meta",
            Group::Text => "text",
            Group::Time => "time",
            Group::Struct => "struct",
            Group::Image => "image",
            Group::Flags => "flags",
            Group::File => "file",
            Group::Misc => "misc",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Int,
    Real,
    Bool,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Int => "int",
            Kind::Real => "real",
            Kind::Bool => "bool",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub group: Group,
    pub kind: Kind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    pub version: &'static str,
    pub columns: Vec<Column>,
}

impl FeatureSchema {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn group_len(&self, group: Group) -> usize {
        self.columns.iter().filter(|c| c.group == group).count()
    }

    /// The reference file: a header line, then `name<TAB>group<TAB>kind`.
    pub fn write_reference<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "name\tgroup\tkind")?;
        for c in &self.columns {
            writeln!(out, "{}\t{}\t{}", c.name, c.group, c.kind)?;
        }
        Ok(())
    }
}

fn slug(keyword: &str) -> String {
    match keyword.strip_prefix('/') {
        Some(name) => format!("name_{}", name.to_ascii_lowercase()),
        None => format!("kw_{keyword}"),
    }
}

fn build_schema() -> FeatureSchema {
    let mut cols = Vec::with_capacity(COLUMN_COUNT);
    let mut push = |name: String, group: Group, kind: Kind| cols.push(Column { name, group, kind });

    use Group as G;
    use Kind::{Bool, Int, Real};

    push("graph_node_count_total".into(), G::Graph, Int);
    push("graph_edge_count_total".into(), G::Graph, Int);
    for stat in ["density", "avg_degree", "clustering", "degree_centrality"] {
        push(format!("graph_{stat}_mean"), G::Graph, Real);
        push(format!("graph_{stat}_max"), G::Graph, Real);
    }
    push("graph_degree_centrality_peak".into(), G::Graph, Real);

    for field in TEXT_FIELDS {
        for part in ["dot", "len", "num", "oth", "uc"] {
            push(format!("meta_{field}_{part}"), G::Meta, Int);
        }
    }
    for field in TEXT_FIELDS {
        push(format!("meta_{field}_entropy"), G::Meta, Real);
    }
    push("meta_all_fields_entropy".into(), G::Meta, Real);

    push("text_avg_word_length".into(), G::Text, Real);
    push("text_max_token_length".into(), G::Text, Int);
    push("text_token_diversity".into(), G::Text, Real);
    for what in [
        "digit",
        "uppercase",
        "lowercase",
        "whitespace",
        "special",
        "non_ascii",
    ] {
        push(format!("text_{what}_count"), G::Text, Int);
    }
    push("text_body_entropy".into(), G::Text, Real);

    push("time_delta_seconds".into(), G::Time, Real);
    push("time_creation_has_z".into(), G::Time, Bool);
    push("time_mod_has_z".into(), G::Time, Bool);

    for kw in STRUCT_KEYWORDS {
        let s = slug(kw);
        push(format!("struct_{s}_count"), G::Struct, Int);
        push(format!("struct_{s}_pos_min"), G::Struct, Int);
        push(format!("struct_{s}_pos_max"), G::Struct, Int);
        push(format!("struct_{s}_pos_avg"), G::Struct, Real);
    }

    for size in ["xsmall", "small", "med", "large", "xlarge", "total"] {
        push(format!("count_image_{size}"), G::Image, Int);
    }
    push("image_totalpx".into(), G::Image, Int);
    push("ratio_imagepx_size".into(), G::Image, Real);
    push("pos_image_min".into(), G::Image, Int);
    push("pos_image_avg".into(), G::Image, Real);
    push("pos_image_max".into(), G::Image, Int);
    push("image_mismatch".into(), G::Image, Bool);

    for name in FLAG_NAMES {
        push(
            format!("flag_{}", name.to_ascii_lowercase()),
            G::Flags,
            Bool,
        );
    }

    push("file_size".into(), G::File, Int);
    push("pdf_version".into(), G::File, Real);
    push("count_page".into(), G::File, Int);

    push("misc_whole_file_entropy".into(), G::Misc, Real);
    push("misc_compression_ratio".into(), G::Misc, Real);
    push("misc_embedded_file_count".into(), G::Misc, Int);
    push("misc_object_tree_depth".into(), G::Misc, Int);
    push("misc_is_encrypted".into(), G::Misc, Bool);
    push("misc_object_count".into(), G::Misc, Int);
    push("misc_stream_count".into(), G::Misc, Int);
    for name in FLAG_NAMES {
        push(
            format!("misc_freq_{}", name.to_ascii_lowercase()),
            G::Misc,
            Int,
        );
    }
    for name in POSITION_NAMES {
        push(
            format!("misc_pos_first_{}", name.to_ascii_lowercase()),
            G::Misc,
            Int,
        );
    }
    push("misc_header_offset".into(), G::Misc, Int);
    push("misc_eof_marker_count".into(), G::Misc, Int);
    push("misc_trailing_bytes".into(), G::Misc, Int);
    push("misc_xref_stream_present".into(), G::Misc, Bool);
    push("misc_xref_recovered".into(), G::Misc, Bool);
    push("misc_parse_warning_count".into(), G::Misc, Int);
    push("misc_object_stream_count".into(), G::Misc, Int);
    push("misc_objects_in_object_streams".into(), G::Misc, Int);
    push("misc_inline_image_count".into(), G::Misc, Int);
    push("misc_undecodable_stream_count".into(), G::Misc, Int);
    push("misc_ascii_encoded_stream_count".into(), G::Misc, Int);
    push("misc_has_xmp_metadata".into(), G::Misc, Bool);

    FeatureSchema {
        version: SCHEMA_VERSION,
        columns: cols,
    }
}

static SCHEMA: LazyLock<FeatureSchema> = LazyLock::new(build_schema);

pub fn schema() -> &'static FeatureSchema {
    &SCHEMA
}

/// One row of the dataset matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub schema_version: String,
    pub values: Vec<f64>,
    pub source_path: String,
    pub warnings_count: usize,
}

impl FeatureVector {
    /// The row emitted for a file that could not be processed.
    pub fn failed(source_path: impl Into<String>, warnings_count: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            values: vec![0.0; schema().len()],
            source_path: source_path.into(),
            warnings_count: warnings_count.max(1),
        }
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        schema().index_of(column).map(|i| self.values[i])
    }

    /// Values of one group, in schema order.
    pub fn group(&self, group: Group) -> Vec<f64> {
        schema()
            .columns
            .iter()
            .zip(&self.values)
            .filter(|(c, _)| c.group == group)
            .map(|(_, v)| *v)
            .collect()
    }
}

/// Every block produced for one document.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureBlocks {
    pub graph: GraphFeatureBlock,
    pub meta: Vec<FieldComposition>,
    /// Entropy of each free-text metadata field, then of all fields joined.
    pub meta_entropy: Vec<f64>,
    pub text: TextSummary,
    pub time: TemporalBlock,
    pub structure: Vec<StructStat>,
    pub image: ImageBlock,
    pub flags: PdfFlagVector,
    pub file: FileLevelBlock,
    pub misc: MiscBlock,
    pub anomaly: AnomalyBlock,
}

impl FeatureBlocks {
    /// All-zero blocks with the right shapes.
    pub fn zeroed() -> Self {
        Self {
            meta: vec![FieldComposition::default(); TEXT_FIELDS.len()],
            meta_entropy: vec![0.0; TEXT_FIELDS.len() + 1],
            structure: STRUCT_KEYWORDS
                .iter()
                .map(|&k| StructStat::from_offsets(k, &[]))
                .collect(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssembleError {
    #[error("{group} block has {actual} values, schema expects {expected}")]
    BlockLengthMismatch {
        group: Group,
        expected: usize,
        actual: usize,
    },
}

/// Concatenates the blocks in schema order. Non-finite values become 0 and
/// each one adds to the vector's warning count.
pub fn assemble(
    blocks: &FeatureBlocks,
    source_path: impl Into<String>,
    warnings_count: usize,
) -> Result<FeatureVector, AssembleError> {
    let s = schema();
    let mut values = Vec::with_capacity(s.len());
    let mut warnings = warnings_count;
    for group in Group::ORDER {
        let part: Vec<f64> = match group {
            Group::Graph => blocks.graph.to_values(),
            Group::Meta => blocks
                .meta
                .iter()
                .flat_map(|c| c.to_values())
                .chain(blocks.meta_entropy.iter().copied())
                .collect(),
            Group::Text => blocks.text.to_values(),
            Group::Time => blocks.time.to_values().to_vec(),
            Group::Struct => blocks
                .structure
                .iter()
                .flat_map(|s| s.to_values())
                .collect(),
            Group::Image => blocks.image.to_values().to_vec(),
            Group::Flags => blocks.flags.to_values().to_vec(),
            Group::File => blocks.file.to_values().to_vec(),
            Group::Misc => {
                let mut v = blocks.misc.to_values().to_vec();
                v.extend(blocks.anomaly.to_values());
                v
            }
        };
        let expected = s.group_len(group);
        if part.len() != expected {
            return Err(AssembleError::BlockLengthMismatch {
                group,
                expected,
                actual: part.len(),
            });
        }
        for v in part {
            if v.is_finite() {
                values.push(v);
            } else {
                warnings += 1;
                values.push(0.0);
            }
        }
    }
    Ok(FeatureVector {
        schema_version: s.version.to_string(),
        values,
        source_path: source_path.into(),
        warnings_count: warnings,
    })
}

/// Integers print without a decimal point; reals keep at most 12
/// significant digits.
pub fn render_value(value: f64, kind: Kind) -> String {
    if !value.is_finite() {
        return "0".into();
    }
    match kind {
        Kind::Int | Kind::Bool => format!("{}", value.round() as i64),
        Kind::Real => {
            if value == 0.0 {
                return "0".into();
            }
            let rounded: f64 = format!("{value:.11e}").parse().unwrap_or(value);
            format!("{rounded}")
        }
    }
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("vector for {path} has schema version {found}, expected {expected}")]
    SchemaMismatch {
        path: String,
        found: String,
        expected: String,
    },
    #[error("write failed: {0}")]
    Stream(#[from] io::Error),
}

fn check_versions(vectors: &[FeatureVector]) -> Result<(), WriteError> {
    for v in vectors {
        if v.schema_version != SCHEMA_VERSION || v.values.len() != schema().len() {
            return Err(WriteError::SchemaMismatch {
                path: v.source_path.clone(),
                found: v.schema_version.clone(),
                expected: SCHEMA_VERSION.into(),
            });
        }
    }
    Ok(())
}

fn quote(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

/// Header `source_path,label,<columns>` then one row per vector. Paths are
/// always quoted; the label column is empty unless `label` is given.
pub fn write_csv<W: Write>(
    vectors: &[FeatureVector],
    label: Option<u8>,
    out: W,
) -> Result<(), WriteError> {
    check_versions(vectors)?;
    let mut out = BufWriter::new(out);
    let s = schema();
    let header: Vec<&str> = ["source_path", "label"]
        .into_iter()
        .chain(s.columns.iter().map(|c| c.name.as_str()))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    let label = label.map(|l| l.to_string()).unwrap_or_default();
    for v in vectors {
        let mut row = String::with_capacity(16 * v.values.len());
        row.push_str(&quote(&v.source_path));
        row.push(',');
        row.push_str(&label);
        for (value, col) in v.values.iter().zip(&s.columns) {
            row.push(',');
            row.push_str(&render_value(*value, col.kind));
        }
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    Ok(())
}

fn json_value(value: f64, kind: Kind) -> Value {
    match kind {
        Kind::Int | Kind::Bool => Value::Number(Number::from(value.round() as i64)),
        Kind::Real => {
            let v: f64 = render_value(value, kind).parse().unwrap_or(0.0);
            Number::from_f64(v).map_or(Value::Number(0.into()), Value::Number)
        }
    }
}

/// One JSON object per line: `source_path`, `label`, `warnings_count`, then
/// one key per schema column.
pub fn write_jsonl<W: Write>(
    vectors: &[FeatureVector],
    label: Option<u8>,
    out: W,
) -> Result<(), WriteError> {
    check_versions(vectors)?;
    let mut out = BufWriter::new(out);
    let s = schema();
    for v in vectors {
        let mut obj = Map::new();
        obj.insert("source_path".into(), Value::String(v.source_path.clone()));
        obj.insert("label".into(), label.map_or(Value::Null, Value::from));
        obj.insert("warnings_count".into(), Value::from(v.warnings_count));
        for (value, col) in v.values.iter().zip(&s.columns) {
            obj.insert(col.name.clone(), json_value(*value, col.kind));
        }
        serde_json::to_writer(&mut out, &Value::Object(obj)).map_err(io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(format!("unknown format {other:?} (csv|jsonl)")),
        }
    }
}

/// Writes `vectors` to `path`, reporting the path on failure.
pub fn write_file(
    path: &Path,
    format: OutputFormat,
    vectors: &[FeatureVector],
    label: Option<u8>,
) -> Result<(), WriteError> {
    let file = File::create(path).map_err(|source| WriteError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let result = match format {
        OutputFormat::Csv => write_csv(vectors, label, file),
        OutputFormat::Jsonl => write_jsonl(vectors, label, file),
    };
    result.map_err(|e| match e {
        WriteError::Stream(source) => WriteError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}
