#![no_main]

use crs_core::KnowledgeGraph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Anything that loads must survive a write/reload cycle unchanged.
    if let Ok(g) = KnowledgeGraph::from_bytes(data) {
        let again = KnowledgeGraph::from_tsv(&g.to_tsv()).expect("serialized graph reloads");
        assert_eq!(g.nodes().len(), again.nodes().len());
        assert_eq!(g.edges().len(), again.edges().len());
    }
});
