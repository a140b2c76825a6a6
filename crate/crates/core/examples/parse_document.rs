//! Parse a PDF leniently and print what the parser found.
//!
//!     cargo run --example parse_document -- path/to/file.pdf

use std::env;
use std::fs;

use pdfvec::pdf::parse_document;

fn main() {
    let path = env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/tests/fixtures/corrupted_xref.pdf"
        )
        .to_string()
    });
    let bytes = fs::read(&path).expect("readable file");
    let doc = match parse_document(bytes) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(1);
        }
    };
    let stats = doc.stats();
    println!("{path}");
    println!("  version         {}", doc.version());
    println!("  objects         {}", doc.object_count());
    println!("  pages           {}", doc.pages().len());
    println!(
        "  xref            {:?}, recovered: {}",
        stats.xref_kind, stats.recovered
    );
    println!(
        "  object streams  {} ({} objects)",
        stats.object_streams, stats.objects_in_object_streams
    );
    println!("  encrypted       {}", doc.is_encrypted());
    for w in doc.warnings() {
        println!("  warning: {w}");
    }
}
