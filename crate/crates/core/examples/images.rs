//! Enumerate image XObjects and inline images and bucket them by pixel area.
//!
//!     cargo run --example images -- path/to/file.pdf

use std::env;
use std::fs;

use pdfvec::image::{enumerate_images, image_block, ImageThresholds};
use pdfvec::pdf::parse_document;

fn main() {
    let path = env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/two_images.pdf").to_string()
    });
    let doc = parse_document(fs::read(&path).expect("readable file")).expect("parseable PDF");
    let images = enumerate_images(&doc);
    for img in &images {
        println!(
            "{}x{} px at byte {}{}",
            img.width_px,
            img.height_px,
            img.byte_offset,
            if img.length_mismatch {
                " (length repaired)"
            } else {
                ""
            }
        );
    }
    let block = image_block(&images, doc.file_size(), ImageThresholds::default());
    println!("{block:#?}");
}
