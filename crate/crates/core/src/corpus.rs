//! Minimal PDF writer and seeded synthetic corpus generation.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use flate2::write::ZlibEncoder;
use flate2::Compression;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Writes a classic-xref PDF from object bodies.
#[derive(Debug, Clone)]
pub struct PdfWriter {
    version: String,
    next: u32,
    objects: BTreeMap<u32, Vec<u8>>,
}

impl PdfWriter {
    pub fn new(version: &str) -> Self {
        Self {
            version: version.to_string(),
            next: 1,
            objects: BTreeMap::new(),
        }
    }

    /// Allocates an object number to be filled in later with [`Self::set`].
    pub fn reserve(&mut self) -> u32 {
        let n = self.next;
        self.next += 1;
        n
    }

    pub fn set(&mut self, num: u32, body: impl Into<Vec<u8>>) {
        self.objects.insert(num, body.into());
    }

    pub fn add(&mut self, body: impl Into<Vec<u8>>) -> u32 {
        let n = self.reserve();
        self.set(n, body);
        n
    }

    /// Adds a stream; `entries` is the dictionary body without `/Length`.
    pub fn add_stream(&mut self, entries: &str, data: &[u8]) -> u32 {
        let mut body = format!("<< {entries} /Length {} >>\nstream\n", data.len()).into_bytes();
        body.extend_from_slice(data);
        body.extend_from_slice(b"\nendstream");
        self.add(body)
    }

    pub fn finish(&self, root: u32, info: Option<u32>) -> Vec<u8> {
        let mut out = format!("%PDF-{}\n%\u{e2}\u{e3}\u{cf}\u{d3}\n", self.version)
            .chars()
            .map(|c| c as u32 as u8)
            .collect::<Vec<u8>>();
        let size = self.objects.keys().max().copied().unwrap_or(0) + 1;
        let mut offsets = vec![None; size as usize];
        for (&num, body) in &self.objects {
            offsets[num as usize] = Some(out.len());
            out.extend_from_slice(format!("{num} 0 obj\n").as_bytes());
            out.extend_from_slice(body);
            out.extend_from_slice(b"\nendobj\n");
        }
        let xref = out.len();
        out.extend_from_slice(format!("xref\n0 {size}\n").as_bytes());
        for (i, off) in offsets.iter().enumerate() {
            match off {
                Some(o) => out.extend_from_slice(format!("{o:010} 00000 n \n").as_bytes()),
                None if i == 0 => out.extend_from_slice(b"0000000000 65535 f \n"),
                None => out.extend_from_slice(b"0000000000 00000 f \n"),
            }
        }
        let info = info.map(|i| format!(" /Info {i} 0 R")).unwrap_or_default();
        out.extend_from_slice(
            format!(
                "trailer\n<< /Size {size} /Root {root} 0 R{info} >>\nstartxref\n{xref}\n%%EOF\n"
            )
            .as_bytes(),
        );
        out
    }
}

/// Escapes bytes for a literal string body.
pub fn literal(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('(');
    for c in text.chars() {
        match c {
            '(' | ')' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            _ => out.push(c),
        }
    }
    out.push(')');
    out
}

pub fn deflate(data: &[u8]) -> Vec<u8> {
    let mut enc = ZlibEncoder::new(Vec::new(), Compression::default());
    enc.write_all(data).expect("in-memory write");
    enc.finish().expect("in-memory write")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorpusKind {
    Benign,
    MaliciousLike,
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusKind::Benign => "benign",
            CorpusKind::MaliciousLike => "malicious-like",
        })
    }
}

impl FromStr for CorpusKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "benign" => Ok(CorpusKind::Benign),
            "malicious-like" => Ok(CorpusKind::MaliciousLike),
            other => Err(format!(
                "unknown corpus kind {other:?} (benign|malicious-like)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("count must be at least 1")]
    EmptyCount,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

const LOREM: &[&str] = &[
    "lorem",
    "ipsum",
    "dolor",
    "sit",
    "amet",
    "consectetur",
    "adipiscing",
    "elit",
    "sed",
    "do",
    "eiusmod",
    "tempor",
    "incididunt",
    "ut",
    "labore",
    "et",
    "dolore",
    "magna",
    "aliqua",
    "enim",
    "ad",
    "minim",
    "veniam",
    "quis",
    "nostrud",
    "exercitation",
    "ullamco",
    "laboris",
    "nisi",
    "aliquip",
    "ex",
    "ea",
    "commodo",
    "consequat",
    "duis",
    "aute",
    "irure",
    "in",
    "reprehenderit",
    "voluptate",
    "velit",
    "esse",
    "cillum",
    "fugiat",
    "nulla",
    "pariatur",
    "excepteur",
    "sint",
    "occaecat",
    "cupidatat",
    "non",
    "proident",
    "sunt",
    "culpa",
    "qui",
    "officia",
    "deserunt",
    "mollit",
    "anim",
    "id",
    "est",
    "laborum",
];
const AUTHORS: &[&str] = &[
    "Alice Martin",
    "Bob Chen",
    "Carla Rossi",
    "Deepak Rao",
    "Eva Novak",
    "Farid Haddad",
    "Grace Kim",
    "Hugo Lefevre",
];
const CREATORS: &[&str] = &[
    "Microsoft Word",
    "LibreOffice Writer",
    "LaTeX with hyperref",
    "Pages",
];
const PRODUCERS: &[&str] = &[
    "Microsoft: Print To PDF",
    "LibreOffice 7.5",
    "pdfTeX-1.40.25",
    "macOS Quartz PDFContext",
];

fn pdf_date(secs: i64, zulu: bool) -> String {
    let t = chrono::DateTime::from_timestamp(secs, 0).unwrap_or_default();
    if zulu {
        t.format("D:%Y%m%d%H%M%SZ").to_string()
    } else {
        let local = t + chrono::Duration::hours(1);
        local.format("D:%Y%m%d%H%M%S+01'00'").to_string()
    }
}

fn random_printable(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len)
        .map(|_| rng.gen_range(0x21u8..0x7f) as char)
        .collect()
}

fn sentence(rng: &mut ChaCha8Rng, words: usize) -> String {
    (0..words)
        .map(|_| *LOREM.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// One benign-looking document: 1-3 pages of lorem ipsum, ordinary
/// metadata, consistent dates and no active content.
pub fn benign_pdf(rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut w = PdfWriter::new(["1.4", "1.5", "1.7"].choose(rng).unwrap());
    let catalog = w.reserve();
    let pages = w.reserve();
    let font = w.add("<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>");
    let page_count = rng.gen_range(1..=3);
    let compress = rng.gen_bool(0.5);
    let mut kids = Vec::new();
    for _ in 0..page_count {
        let mut content = String::from("BT\n/F1 11 Tf\n72 720 Td\n");
        for i in 0..rng.gen_range(4..=10) {
            if i > 0 {
                content.push_str("0 -14 Td\n");
            }
            let words = rng.gen_range(5..=10);
            let mut line = sentence(rng, words);
            if rng.gen_bool(0.3) {
                line.push('.');
            }
            if let Some(first) = line.get_mut(0..1) {
                first.make_ascii_uppercase();
            }
            content.push_str(&literal(&line));
            content.push_str(" Tj\n");
        }
        content.push_str("ET\n");
        let contents = if compress {
            w.add_stream("/Filter /FlateDecode", &deflate(content.as_bytes()))
        } else {
            w.add_stream("", content.as_bytes())
        };
        kids.push(w.add(format!(
            "<< /Type /Page /Parent {pages} 0 R /MediaBox [0 0 612 792] /Resources << /Font << /F1 {font} 0 R >> >> /Contents {contents} 0 R >>"
        )));
    }
    let kid_refs: Vec<String> = kids.iter().map(|k| format!("{k} 0 R")).collect();
    w.set(
        pages,
        format!(
            "<< /Type /Pages /Kids [{}] /Count {} >>",
            kid_refs.join(" "),
            kids.len()
        ),
    );
    w.set(catalog, format!("<< /Type /Catalog /Pages {pages} 0 R >>"));
    let created = rng.gen_range(1_420_070_400i64..1_704_067_200);
    let modified = created + rng.gen_range(0..3 * 86_400);
    let zulu = rng.gen_bool(0.5);
    let title_words = rng.gen_range(2..=5);
    let mut title = sentence(rng, title_words);
    if let Some(first) = title.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    let info = w.add(format!(
        "<< /Author {} /Title {} /Creator {} /Producer {} /CreationDate {} /ModDate {} >>",
        literal(AUTHORS.choose(rng).unwrap()),
        literal(&title),
        literal(CREATORS.choose(rng).unwrap()),
        literal(PRODUCERS.choose(rng).unwrap()),
        literal(&pdf_date(created, zulu)),
        literal(&pdf_date(modified, zulu)),
    ));
    w.finish(catalog, Some(info))
}

/// One document shaped like common malicious samples: an `/OpenAction`
/// JavaScript action, random high-entropy metadata, little or no text and
/// a modification date earlier than the creation date.
pub fn malicious_like_pdf(rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut w = PdfWriter::new(["1.3", "1.4", "1.6", "1.7"].choose(rng).unwrap());
    let catalog = w.reserve();
    let pages = w.reserve();
    let page = w.reserve();
    let payload_len = rng.gen_range(200..600);
    let payload: String = (0..payload_len)
        .map(|_| format!("%u{:04x}", rng.gen::<u16>()))
        .collect();
    let var = random_printable(rng, 6).replace(|c: char| !c.is_ascii_alphabetic(), "x");
    let js = format!(
        "var {var} = unescape(\"{payload}\"); while ({var}.length < 0x40000) {var} += {var}; app.alert({var}.length);"
    );
    let action = if rng.gen_bool(0.5) {
        w.add(format!(
            "<< /Type /Action /S /JavaScript /JS {} >>",
            literal(&js)
        ))
    } else {
        let stream = w.add_stream("/Filter /FlateDecode", &deflate(js.as_bytes()));
        w.add(format!(
            "<< /Type /Action /S /JavaScript /JS {stream} 0 R >>"
        ))
    };
    let contents = if rng.gen_bool(0.5) {
        format!(" /Contents {} 0 R", w.add_stream("", b""))
    } else {
        String::new()
    };
    let extra_aa = if rng.gen_bool(0.3) {
        format!(" /AA << /O {action} 0 R >>")
    } else {
        String::new()
    };
    w.set(
        page,
        format!(
            "<< /Type /Page /Parent {pages} 0 R /MediaBox [0 0 612 792]{contents}{extra_aa} >>"
        ),
    );
    w.set(
        pages,
        format!("<< /Type /Pages /Kids [{page} 0 R] /Count 1 >>"),
    );
    w.set(
        catalog,
        format!("<< /Type /Catalog /Pages {pages} 0 R /OpenAction {action} 0 R >>"),
    );
    let created = rng.gen_range(1_420_070_400i64..1_704_067_200);
    let modified = created - rng.gen_range(86_400..5 * 365 * 86_400);
    let mut fields = Vec::new();
    for key in ["Author", "Title", "Producer"] {
        let len = rng.gen_range(20..=60);
        fields.push(format!("/{key} {}", literal(&random_printable(rng, len))));
    }
    fields.push(format!(
        "/CreationDate {}",
        literal(&pdf_date(created, true))
    ));
    fields.push(format!("/ModDate {}", literal(&pdf_date(modified, false))));
    let info = w.add(format!("<< {} >>", fields.join(" ")));
    w.finish(catalog, Some(info))
}

/// Per-file generator: each file draws from its own ChaCha stream so the
/// i-th file depends only on the seed and i.
pub fn generate_one(kind: CorpusKind, seed: u64, index: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    match kind {
        CorpusKind::Benign => benign_pdf(&mut rng),
        CorpusKind::MaliciousLike => malicious_like_pdf(&mut rng),
    }
}

/// Writes `count` files named `<kind>-<seed>-<index>.pdf` into
/// `destination` (created if missing) and returns their paths.
pub fn generate_corpus(
    kind: CorpusKind,
    count: usize,
    seed: u64,
    destination: &Path,
) -> Result<Vec<PathBuf>, CorpusError> {
    if count == 0 {
        return Err(CorpusError::EmptyCount);
    }
    std::fs::create_dir_all(destination).map_err(|source| CorpusError::Io {
        path: destination.to_path_buf(),
        source,
    })?;
    (0..count)
        .map(|i| {
            let path = destination.join(format!("{kind}-{seed}-{i:05}.pdf"));
            std::fs::write(&path, generate_one(kind, seed, i as u64)).map_err(|source| {
                CorpusError::Io {
                    path: path.clone(),
                    source,
                }
            })?;
            Ok(path)
        })
        .collect()
}
