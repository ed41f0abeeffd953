#![no_main]

use std::sync::OnceLock;

use crs_core::{KnowledgeGraph, Lexicon, QueryParser};
use libfuzzer_sys::fuzz_target;

const GRAPH: &str = "Inception\tEntity\tNolan\tAttribute\tDirector\n\
Inception\tEntity\tSciFi\tAttribute\tGenre\n\
Titanic\tEntity\tCameron\tAttribute\tDirector\n\
\u{6cf0}\u{5766}\u{5c3c}\u{514b}\tEntity\t\u{7231}\u{60c5}\tAttribute\tGenre\n";

fn setup() -> &'static (KnowledgeGraph, QueryParser) {
    static CELL: OnceLock<(KnowledgeGraph, QueryParser)> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = KnowledgeGraph::from_tsv(GRAPH).unwrap();
        let p = QueryParser::new(&g, &Lexicon::default()).unwrap();
        (g, p)
    })
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (g, parser) = setup();
    let frame = parser.parse(text, g);
    let len = frame.normalized.chars().count();
    let mut end = 0;
    for m in &frame.mentions {
        assert!(m.span.0 >= end && m.span.0 < m.span.1 && m.span.1 <= len);
        end = m.span.1;
    }
});
