//! Structural keyword statistics, suspicious-name flags and file anomalies.
//!
//!     cargo run --example structure -- path/to/file.pdf

use std::env;
use std::fs;

use pdfvec::pdf::parse_document;
use pdfvec::structure::{anomaly_block, keyword_flags, misc_block, structural_counts, FLAG_NAMES};

fn main() {
    let path = env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/tests/fixtures/objstm_hidden_launch.pdf"
        )
        .to_string()
    });
    let doc = parse_document(fs::read(&path).expect("readable file")).expect("parseable PDF");

    for s in structural_counts(&doc) {
        println!("{:>10} {:?}", s.keyword, s.to_values());
    }
    let flags = keyword_flags(&doc);
    let set: Vec<&str> = FLAG_NAMES
        .iter()
        .zip(flags.0)
        .filter_map(|(n, on)| on.then_some(*n))
        .collect();
    println!("flags set: {set:?}");
    println!("{:#?}", misc_block(&doc));

    let anomalies = anomaly_block(&doc, 0);
    for (name, freq) in FLAG_NAMES.iter().zip(anomalies.name_frequency) {
        if freq > 0 {
            println!("/{name} appears {freq} time(s) in the raw bytes");
        }
    }
    println!(
        "xref recovered: {}, object streams: {}",
        anomalies.xref_recovered, anomalies.object_stream_count
    );
}
