//! Fixtures and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

pub const KG3: &str = "\
Inception\tEntity\tNolan\tAttribute\tDirector
Inception\tEntity\tSciFi\tAttribute\tGenre
Interstellar\tEntity\tNolan\tAttribute\tDirector
Interstellar\tEntity\tSciFi\tAttribute\tGenre
Titanic\tEntity\tCameron\tAttribute\tDirector
Titanic\tEntity\tRomance\tAttribute\tGenre
";

pub const FOOTNOTE_LINE: &str = "Catch Me If You Can\tEntity\tTom Hanks\tAttribute\tActor";

/// Ground truth for a generated graph, kept apart from the loader.
#[derive(Debug, Clone, Default)]
pub struct Blueprint {
    pub entities: Vec<String>,
    /// (type label, attribute name)
    pub attributes: Vec<(String, String)>,
    pub generics: Vec<String>,
    /// (entity, attribute) index pairs
    pub entity_attr: BTreeSet<(usize, usize)>,
    /// (entity, generic) index pairs
    pub entity_generic: BTreeSet<(usize, usize)>,
}

impl Blueprint {
    pub fn attrs_of(&self, e: usize) -> BTreeSet<usize> {
        self.entity_attr
            .iter()
            .filter(|(x, _)| *x == e)
            .map(|&(_, a)| a)
            .collect()
    }

    pub fn tsv(&self) -> String {
        let mut out = String::new();
        for &(e, a) in &self.entity_attr {
            let (label, name) = &self.attributes[a];
            out.push_str(&format!(
                "{}\tEntity\t{}\tAttribute\t{}\n",
                self.entities[e], name, label
            ));
        }
        for &(e, g) in &self.entity_generic {
            out.push_str(&format!(
                "{}\tEntity\t{}\tGeneric\tAbout\n",
                self.entities[e], self.generics[g]
            ));
        }
        out
    }
}

/// Small random catalog: up to `max_entities` entities and `max_types`
/// attribute types with a few values each. Every entity has at least one
/// edge so it exists in the loaded graph.
pub fn random_graph<R: Rng>(rng: &mut R, max_entities: usize, max_types: usize) -> Blueprint {
    let n_ent = rng.gen_range(1..=max_entities);
    let n_types = rng.gen_range(1..=max_types);
    let mut bp = Blueprint {
        entities: (0..n_ent).map(|i| format!("item{i}")).collect(),
        ..Default::default()
    };
    let mut by_type: Vec<Vec<usize>> = Vec::new();
    for t in 0..n_types {
        let n_vals = rng.gen_range(1..=3);
        let mut ids = Vec::new();
        for v in 0..n_vals {
            ids.push(bp.attributes.len());
            bp.attributes.push((format!("Type{t}"), format!("t{t}v{v}")));
        }
        by_type.push(ids);
    }
    for g in 0..rng.gen_range(0..=2) {
        bp.generics.push(format!("topic{g}"));
    }
    for e in 0..n_ent {
        for ids in &by_type {
            if rng.gen_bool(0.75) {
                bp.entity_attr.insert((e, *ids.choose(rng).unwrap()));
            }
        }
        if !bp.generics.is_empty() && rng.gen_bool(0.3) {
            bp.entity_generic.insert((e, rng.gen_range(0..bp.generics.len())));
        }
        if !bp.entity_attr.iter().any(|(x, _)| *x == e) {
            let ids = by_type.choose(rng).unwrap();
            bp.entity_attr.insert((e, *ids.choose(rng).unwrap()));
        }
    }
    bp
}

/// A diagnosis-style catalog: `entities` disorders, each with exactly one
/// symptom value per type and pairwise distinct signatures.
#[derive(Debug, Clone)]
pub struct DxBlueprint {
    pub types: Vec<String>,
    /// values[t] lists the symptom names of type t
    pub values: Vec<Vec<String>>,
    pub entities: Vec<String>,
    /// signature[e][t] indexes values[t]
    pub signature: Vec<Vec<usize>>,
}

const SYMPTOM_TYPES: [&str; 6] = ["Fever", "Cough", "Rash", "Headache", "Fatigue", "Nausea"];
const SEVERITIES: [&str; 3] = ["mild", "severe", "chronic"];

impl DxBlueprint {
    pub fn tsv(&self) -> String {
        let mut out = String::new();
        for (e, sig) in self.signature.iter().enumerate() {
            for (t, &v) in sig.iter().enumerate() {
                out.push_str(&format!(
                    "{}\tEntity\t{}\tAttribute\t{}\n",
                    self.entities[e], self.values[t][v], self.types[t]
                ));
            }
        }
        out
    }

    pub fn value_of(&self, entity: usize, type_label: &str) -> Option<&str> {
        let t = self.types.iter().position(|x| x == type_label)?;
        Some(&self.values[t][self.signature[entity][t]])
    }
}

pub fn dx_graph<R: Rng>(rng: &mut R, entities: usize) -> DxBlueprint {
    let n_types = rng.gen_range(3..=SYMPTOM_TYPES.len());
    let types: Vec<String> = SYMPTOM_TYPES[..n_types].iter().map(|s| s.to_string()).collect();
    let values: Vec<Vec<String>> = types
        .iter()
        .map(|t| SEVERITIES.iter().map(|s| format!("{s} {}", t.to_lowercase())).collect())
        .collect();
    let mut seen = BTreeSet::new();
    let mut signature = Vec::new();
    while signature.len() < entities {
        let sig: Vec<usize> = (0..n_types).map(|_| rng.gen_range(0..SEVERITIES.len())).collect();
        if seen.insert(sig.clone()) {
            signature.push(sig);
        }
    }
    DxBlueprint {
        types,
        values,
        entities: (0..entities)
            .map(|i| format!("Disorder {}", (b'A' + i as u8) as char))
            .collect(),
        signature,
    }
}

/// Node and edge multisets keyed by names, for isomorphism checks.
pub type NodeKey = (String, String);
pub type EdgeKey = (NodeKey, NodeKey, String);

pub fn graph_keys(g: &crs_core::KnowledgeGraph) -> (BTreeMap<NodeKey, usize>, BTreeMap<EdgeKey, usize>) {
    let key = |id: crs_core::NodeId| {
        let n = g.node(id).unwrap();
        (n.norm_name.clone(), n.kind.as_str().to_string())
    };
    let mut nodes = BTreeMap::new();
    for n in g.nodes() {
        *nodes.entry(key(n.id)).or_insert(0) += 1;
    }
    let mut edges = BTreeMap::new();
    for e in g.edges() {
        *edges.entry((key(e.head), key(e.tail), e.relation.clone())).or_insert(0) += 1;
    }
    (nodes, edges)
}
