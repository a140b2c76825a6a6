//! Info dictionary fields, their character composition and entropy, and the
//! creation/modification date delta.
//!
//!     cargo run --example metadata -- path/to/file.pdf

use std::env;
use std::fs;

use pdfvec::meta::{
    char_composition, extract_metadata, shannon_entropy, temporal_block, TEXT_FIELDS,
};
use pdfvec::pdf::parse_document;

fn main() {
    let path = env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/tests/fixtures/utf16_metadata.pdf"
        )
        .to_string()
    });
    let doc = parse_document(fs::read(&path).expect("readable file")).expect("parseable PDF");
    let meta = extract_metadata(&doc);

    for (name, value) in TEXT_FIELDS.iter().zip(meta.text_fields()) {
        match value {
            Some(v) => {
                let c = char_composition(v);
                println!(
                    "{name:>9}: {v:?} len={} uc={} num={} dot={} oth={} H={:.3}",
                    c.length,
                    c.uppercase_count,
                    c.digit_count,
                    c.dot_count,
                    c.other_count,
                    shannon_entropy(v)
                );
            }
            None => println!("{name:>9}: absent"),
        }
    }
    let t = temporal_block(
        meta.creation_date_raw.as_deref(),
        meta.mod_date_raw.as_deref(),
    );
    println!(
        "dates: {:?} -> {:?}, delta {} s",
        meta.creation_date_raw, meta.mod_date_raw, t.delta_seconds
    );
}
