//! Extract the full 170-value vector of one file and print it column by
//! column.
//!
//!     cargo run --example extract_vector -- path/to/file.pdf

use std::env;
use std::path::PathBuf;

use pdfvec::vector::render_value;
use pdfvec::{extract_file, schema, ExtractOptions};

fn main() {
    let path: PathBuf = env::args().nth(1).map_or_else(
        || {
            concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/tests/fixtures/js_openaction.pdf"
            )
            .into()
        },
        PathBuf::from,
    );
    let e = match extract_file(&path, &ExtractOptions::default()) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(1);
        }
    };
    for (col, v) in schema().columns.iter().zip(&e.vector.values) {
        println!(
            "{:<6} {:<34} {}",
            col.group.as_str(),
            col.name,
            render_value(*v, col.kind)
        );
    }
    println!("warnings: {}", e.vector.warnings_count);
}
