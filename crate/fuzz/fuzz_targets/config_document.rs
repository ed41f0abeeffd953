#![no_main]

use std::sync::Arc;

use crs_core::config::ConfigDocument;
use crs_core::{BotRuntime, DialogueState, KnowledgeGraph};
use libfuzzer_sys::fuzz_target;

const GRAPH: &str = "Inception\tEntity\tNolan\tAttribute\tDirector\n\
Inception\tEntity\tSciFi\tAttribute\tGenre\n\
Titanic\tEntity\tCameron\tAttribute\tDirector\n\
Titanic\tEntity\tOcean\tGeneric\tSetting\n";

fuzz_target!(|data: &[u8]| {
    let Ok(doc) = ConfigDocument::from_slice(data) else {
        return;
    };
    let graph = Arc::new(KnowledgeGraph::from_tsv(GRAPH).unwrap());
    // A config that validates must be able to run turns.
    if let Ok(bot) = BotRuntime::from_document(graph, &doc) {
        let mut state = DialogueState::new();
        for u in ["hi", "I like Nolan", "recommend something", "not scifi"] {
            state = bot.run_turn(&state, u, 7).expect("validated config runs").state;
        }
    }
});
