#![no_main]

use crs_core::EvalCorpus;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(corpus) = EvalCorpus::from_bytes(data) {
        let again = EvalCorpus::parse(&corpus.to_jsonl()).expect("written corpus parses");
        assert_eq!(corpus, again);
    }
});
