mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crs_core::act::{normalized_entropy, DialogueAct};
use crs_core::nlu::Polarity;
use crs_core::{rank_candidates, BotConfig, BotRuntime, KnowledgeGraph, Lexicon, Mode, NodeKind, QueryParser, Session};

use common::{random_graph, KG3};

fn graph_from_seed(seed: u64) -> (common::Blueprint, KnowledgeGraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bp = random_graph(&mut rng, 10, 4);
    let g = KnowledgeGraph::from_tsv(&bp.tsv()).unwrap();
    (bp, g)
}

fn kg3_words() -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(
        prop::sample::select(vec![
            "nolan",
            "SciFi",
            "romance",
            "Cameron",
            "titanic",
            "inception",
            "interstellar",
            "not",
            "don't",
            "i",
            "like",
            "and",
            "but",
            "the",
            "movies",
            "recommend",
            "nolanish",
            "sci",
            "fi",
            "no",
            "thanks",
        ]),
        0..12,
    )
}

proptest! {
    #[test]
    fn adjacency_indices_agree(seed in any::<u64>()) {
        let (_, g) = graph_from_seed(seed);
        for a in g.nodes().iter().filter(|n| n.kind == NodeKind::Attribute) {
            for e in g.entities() {
                let forward = g.entities_with_attribute(a.id).unwrap().contains(&e.id);
                let backward = g.attributes_of_entity(e.id).unwrap().values().any(|vs| vs.contains(&a.id));
                prop_assert_eq!(forward, backward);
                prop_assert_eq!(forward, g.adjacent(e.id, a.id));
                prop_assert_eq!(g.adjacent(e.id, a.id), g.adjacent(a.id, e.id));
            }
        }
    }

    #[test]
    fn loading_is_deterministic(seed in any::<u64>()) {
        let (bp, g) = graph_from_seed(seed);
        let again = KnowledgeGraph::from_tsv(&bp.tsv()).unwrap();
        prop_assert_eq!(g.nodes(), again.nodes());
        prop_assert_eq!(g.edges(), again.edges());
    }

    #[test]
    fn focus_is_a_subgraph(seed in any::<u64>(), picks in prop::collection::vec(any::<prop::sample::Index>(), 0..4), radius in 0u8..3, limit in 1usize..30) {
        let (_, g) = graph_from_seed(seed);
        let seeds: Vec<_> = picks.iter().map(|i| g.nodes()[i.index(g.nodes().len())].id).collect();
        let focus = g.subgraph_focus(&seeds, radius, limit);
        prop_assert!(focus.nodes.len() <= limit);
        let ids: BTreeSet<_> = focus.nodes.iter().map(|n| n.id).collect();
        prop_assert_eq!(ids.len(), focus.nodes.len());
        for n in &focus.nodes {
            let real = g.node(n.id).unwrap();
            prop_assert_eq!(&real.name, &n.name);
            prop_assert_eq!(n.highlighted, seeds.contains(&n.id));
        }
        for e in &focus.edges {
            prop_assert!(g.edges().contains(e));
            prop_assert!(ids.contains(&e.head) && ids.contains(&e.tail));
        }
    }

    #[test]
    fn mention_spans_point_at_node_names(words in kg3_words()) {
        let g = KnowledgeGraph::from_tsv(KG3).unwrap();
        let parser = QueryParser::new(&g, &Lexicon::default()).unwrap();
        let frame = parser.parse(&words.join(" "), &g);
        let chars: Vec<char> = frame.normalized.chars().collect();
        let mut last_end = 0;
        for m in &frame.mentions {
            let (s, e) = m.span;
            prop_assert!(s >= last_end && s < e && e <= chars.len());
            let text: String = chars[s..e].iter().collect();
            prop_assert_eq!(&text, &g.node(m.node).unwrap().norm_name);
            // whole words only
            prop_assert!(s == 0 || !chars[s - 1].is_alphanumeric());
            prop_assert!(e == chars.len() || !chars[e].is_alphanumeric());
            last_end = e;
        }
    }

    #[test]
    fn negation_only_flips_the_nearby_mention(filler in 0usize..6) {
        let g = KnowledgeGraph::from_tsv(KG3).unwrap();
        let parser = QueryParser::new(&g, &Lexicon::default()).unwrap();
        let gap = vec!["really"; filler].join(" ");
        let frame = parser.parse(&format!("nolan is fine, not {gap} scifi"), &g);
        prop_assert_eq!(frame.mentions.len(), 2);
        prop_assert_eq!(frame.mentions[0].polarity, Polarity::Positive);
        let expect = if filler < 3 { Polarity::Negative } else { Polarity::Positive };
        prop_assert_eq!(frame.mentions[1].polarity, expect);
    }

    #[test]
    fn liked_and_disliked_stay_disjoint(turns in prop::collection::vec(kg3_words(), 1..8), seed in any::<u64>()) {
        let g = Arc::new(KnowledgeGraph::from_tsv(KG3).unwrap());
        let bot = BotRuntime::new(g, BotConfig::default()).unwrap();
        let mut s = Session::new("p", "b", seed);
        for t in &turns {
            s.post_message(&bot, &t.join(" ")).unwrap();
            prop_assert!(s.state.liked_attrs.intersection(&s.state.disliked_attrs).next().is_none());
            prop_assert!(s.state.liked_entities.intersection(&s.state.rejected_entities).next().is_none());
        }
    }

    #[test]
    fn negation_penalty_never_raises_scores(seed in any::<u64>(), lo in 0.0f64..2.0, extra in 0.0f64..2.0) {
        let (_, g) = graph_from_seed(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
        let attrs: Vec<_> = g.nodes().iter().filter(|n| n.kind == NodeKind::Attribute).map(|n| n.id).collect();
        let mut state = crs_core::DialogueState::new();
        for a in attrs {
            match rand::Rng::gen_range(&mut rng, 0..3) {
                0 => { state.liked_attrs.insert(a); }
                1 => { state.disliked_attrs.insert(a); }
                _ => {}
            }
        }
        let mut cfg = BotConfig { negation_penalty: lo, ..BotConfig::default() };
        let before = rank_candidates(&state, &g, &cfg);
        cfg.negation_penalty = lo + extra;
        let after = rank_candidates(&state, &g, &cfg);
        for b in &before {
            let a = after.iter().find(|a| a.entity.id == b.entity.id).unwrap();
            prop_assert!(a.score <= b.score + 1e-12);
        }
    }

    #[test]
    fn entropy_matches_definition(counts in prop::collection::vec(1usize..20, 2..6)) {
        let total: usize = counts.iter().sum();
        let h: f64 = counts.iter().map(|&c| { let p = c as f64 / total as f64; -p * p.log2() }).sum();
        let expected = h / (counts.len() as f64).log2();
        prop_assert!((normalized_entropy(&counts) - expected).abs() < 1e-12);
        prop_assert!(normalized_entropy(&counts) <= 1.0 + 1e-12);
    }
}

/// Over many random sessions the bot never asks about one attribute type
/// twice, and every explanation names liked attributes adjacent to the item.
#[test]
fn never_reasks_and_explanations_are_sound() {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let g = Arc::new(KnowledgeGraph::from_tsv(KG3).unwrap());
    let vocab = [
        "hi",
        "I like nolan",
        "not romance",
        "scifi please",
        "recommend something",
        "no thanks",
        "sure",
        "cameron",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for mode in [Mode::Casual, Mode::Cautious] {
        let bot = BotRuntime::new(g.clone(), BotConfig::preset(mode)).unwrap();
        for _ in 0..200 {
            let mut s = Session::new("s", "b", rng.gen());
            let mut asked = BTreeSet::new();
            for _ in 0..rng.gen_range(1..10) {
                let rec = s.post_message(&bot, vocab.choose(&mut rng).unwrap()).unwrap().clone();
                match &rec.act {
                    DialogueAct::Query { attribute_type, .. } => {
                        assert!(asked.insert(attribute_type.clone()), "asked {attribute_type} twice");
                    }
                    DialogueAct::Recommend { items } => {
                        for item in items {
                            for a in &item.explanation {
                                assert!(s.state.liked_attrs.contains(&a.id));
                                assert!(g.adjacent(item.entity.id, a.id));
                            }
                        }
                    }
                    DialogueAct::Chat { .. } => {}
                }
            }
        }
    }
}
