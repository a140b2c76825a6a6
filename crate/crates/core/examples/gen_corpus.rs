//! Generate a small labelled corpus and compare the two kinds on a few
//! columns.
//!
//!     cargo run --example gen_corpus -- [count] [seed]

use std::env;

use pdfvec::corpus::{generate_corpus, CorpusKind};
use pdfvec::{extract_file, ExtractOptions};

fn main() {
    let mut args = env::args().skip(1);
    let count: usize = args
        .next()
        .map_or(3, |c| c.parse().expect("count is a number"));
    let seed: u64 = args
        .next()
        .map_or(42, |s| s.parse().expect("seed is a number"));
    let dir = env::temp_dir().join(format!("pdfvec-corpus-{seed}"));

    for kind in [CorpusKind::Benign, CorpusKind::MaliciousLike] {
        let paths = generate_corpus(kind, count, seed, &dir).expect("writable directory");
        for p in paths {
            let v = extract_file(&p, &ExtractOptions::default()).unwrap().vector;
            println!(
                "{:<16} nodes={:<4} js={} openaction={} delta={:<10} author_H={:.3}",
                kind.to_string(),
                v.get("graph_node_count_total").unwrap(),
                v.get("flag_javascript").unwrap(),
                v.get("flag_openaction").unwrap(),
                v.get("time_delta_seconds").unwrap(),
                v.get("meta_author_entropy").unwrap(),
            );
        }
    }
    println!("files in {}", dir.display());
}
