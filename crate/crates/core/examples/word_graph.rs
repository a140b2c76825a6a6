//! Build the word co-occurrence graph of each page and print its metrics.
//!
//!     cargo run --example word_graph -- path/to/file.pdf [window]

use std::env;
use std::fs;

use pdfvec::graph::{aggregate_page_graphs, build_word_graph, PageGraphMetrics};
use pdfvec::pdf::parse_document;
use pdfvec::text::extract_page_text;

fn main() {
    let mut args = env::args().skip(1);
    let path = args.next().unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/tests/fixtures/undated_two_pages.pdf"
        )
        .to_string()
    });
    let window: usize = args
        .next()
        .map_or(2, |w| w.parse().expect("window is a number"));
    let doc = parse_document(fs::read(&path).expect("readable file")).expect("parseable PDF");

    let mut per_page = Vec::new();
    for i in 0..doc.pages().len() {
        let text = extract_page_text(&doc, i);
        let graph = build_word_graph(&text.tokens, window);
        let m = PageGraphMetrics::of(&graph);
        println!(
            "page {i}: {} tokens, |V| = {}, |E| = {}, density {:.4}, clustering {:.4}",
            text.tokens.len(),
            m.nodes,
            m.edges,
            m.density,
            m.clustering
        );
        per_page.push(m);
    }
    println!("{:#?}", aggregate_page_graphs(&per_page));
}
