//! Entity ranking against the dialogue state.
//!
//! ```text
//! score(e) = #liked attrs adjacent to e
//!          - λ · #disliked attrs adjacent to e
//!          + β · Σ_{e' liked, e' ≠ e} |attrs(e) ∩ attrs(e')| / max(1, |attrs(e')|)
//! ```
//!
//! λ is the negation penalty and β the neighbourhood weight from the bot
//! config. Rejected and already recommended entities are never ranked.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::act::ActNode;
use crate::kg::{KgError, KnowledgeGraph, NodeId, NodeKind};
use crate::policy::BotConfig;
use crate::state::DialogueState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntity {
    pub entity: ActNode,
    pub score: f64,
    pub match_ratio: f64,
    /// Liked attributes adjacent to the entity, in the order they were liked.
    pub matched_attrs: Vec<ActNode>,
}

fn overlap(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

pub fn score_entity(
    entity: NodeId,
    state: &DialogueState,
    graph: &KnowledgeGraph,
    cfg: &BotConfig,
) -> Result<(f64, Vec<NodeId>), KgError> {
    let node = graph.node(entity).ok_or(KgError::UnknownNode(entity))?;
    if node.kind != NodeKind::Entity {
        return Err(KgError::KindMismatch {
            node: node.name.clone(),
            expected: NodeKind::Entity,
            found: node.kind,
        });
    }
    let matched: Vec<NodeId> = state
        .liked_attrs
        .iter()
        .copied()
        .filter(|&a| graph.adjacent(entity, a))
        .collect();
    let disliked = state
        .disliked_attrs
        .iter()
        .filter(|&&a| graph.adjacent(entity, a))
        .count();

    // The neighbourhood sum is kept as an exact fraction so that entities
    // whose scores are equal as rationals get bit-identical floats and fall
    // through to the name tie-break.
    let mut terms: Vec<(u64, u64)> = Vec::new();
    if cfg.neighborhood_weight != 0.0 && !state.liked_entities.is_empty() {
        let own = graph.attribute_set(entity);
        for &other in state.liked_entities.iter().filter(|&&o| o != entity) {
            let theirs = graph.attribute_set(other);
            terms.push((overlap(&own, &theirs) as u64, theirs.len().max(1) as u64));
        }
    }

    let (matched_n, disliked_n) = (matched.len() as f64, disliked as f64);
    let score = match exact_sum(&terms) {
        Some((num, den)) => {
            let d = den as f64;
            (d * matched_n - cfg.negation_penalty * (d * disliked_n) + cfg.neighborhood_weight * num as f64) / d
        }
        None => {
            let sum: f64 = terms.iter().map(|&(o, n)| o as f64 / n as f64).sum();
            matched_n - cfg.negation_penalty * disliked_n + cfg.neighborhood_weight * sum
        }
    };
    Ok((score, matched))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Σ num/den as a reduced fraction, or `None` if it would not fit in 2^53
/// (where the float conversion stops being exact).
fn exact_sum(terms: &[(u64, u64)]) -> Option<(u64, u64)> {
    const LIMIT: u64 = 1 << 53;
    let (mut num, mut den) = (0u64, 1u64);
    for &(n, d) in terms {
        let g = gcd(den, d);
        let lcm = (den / g).checked_mul(d)?;
        num = num.checked_mul(lcm / den)?.checked_add(n.checked_mul(lcm / d)?)?;
        den = lcm;
        let r = gcd(num, den).max(1);
        (num, den) = (num / r, den / r);
        if num > LIMIT || den > LIMIT {
            return None;
        }
    }
    Some((num, den))
}

/// Share of liked attributes adjacent to `entity`; 0 when nothing is liked.
pub fn match_ratio(entity: NodeId, state: &DialogueState, graph: &KnowledgeGraph) -> f64 {
    if state.liked_attrs.is_empty() {
        return 0.0;
    }
    let hits = state.liked_attrs.iter().filter(|&&a| graph.adjacent(entity, a)).count();
    hits as f64 / state.liked_attrs.len() as f64
}

pub fn rank_candidates(state: &DialogueState, graph: &KnowledgeGraph, cfg: &BotConfig) -> Vec<RankedEntity> {
    let mut ranked: Vec<RankedEntity> = graph
        .entities()
        .filter(|e| !state.rejected_entities.contains(&e.id) && !state.recommended.contains(&e.id))
        .map(|e| {
            let (score, matched) = score_entity(e.id, state, graph, cfg).expect("entity ids come from the graph");
            RankedEntity {
                entity: ActNode::of(graph, e.id),
                score,
                match_ratio: match_ratio(e.id, state, graph),
                matched_attrs: matched.into_iter().map(|a| ActNode::of(graph, a)).collect(),
            }
        })
        .collect();
    ranked.sort_by(|a, b| compare(graph, a, b));
    ranked
}

fn compare(graph: &KnowledgeGraph, a: &RankedEntity, b: &RankedEntity) -> Ordering {
    let norm = |r: &RankedEntity| graph.node(r.entity.id).map(|n| n.norm_name.as_str()).unwrap_or("");
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| b.match_ratio.partial_cmp(&a.match_ratio).unwrap_or(Ordering::Equal))
        .then_with(|| norm(a).cmp(norm(b)))
        .then_with(|| a.entity.id.cmp(&b.entity.id))
}
