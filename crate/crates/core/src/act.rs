//! Dialogue act generation: the structured form of the bot's next move,
//! a tree rooted at the chosen intent with graph nodes underneath.
//!
//! Which attribute type to ask about is decided by information content:
//! over the current candidate pool, the unasked type whose value
//! distribution has the highest normalized Shannon entropy wins.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::{KnowledgeGraph, NodeId, NodeKind};
use crate::nlu::SemanticFrame;
use crate::policy::{BotConfig, BotIntent};
use crate::ranking::RankedEntity;
use crate::state::DialogueState;

/// Maximum number of example values attached to a Query act.
pub const MAX_QUERY_EXAMPLES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActNode {
    pub id: NodeId,
    pub name: String,
}

impl ActNode {
    pub fn of(graph: &KnowledgeGraph, id: NodeId) -> Self {
        ActNode {
            id,
            name: graph.name(id).to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendedItem {
    pub entity: ActNode,
    /// Liked attributes adjacent to the entity.
    pub explanation: Vec<ActNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "intent")]
pub enum DialogueAct {
    Query {
        attribute_type: String,
        examples: Vec<ActNode>,
    },
    Recommend {
        items: Vec<RecommendedItem>,
    },
    Chat {
        topic: Option<ActNode>,
    },
}

impl DialogueAct {
    pub fn intent(&self) -> BotIntent {
        match self {
            DialogueAct::Query { .. } => BotIntent::Query,
            DialogueAct::Recommend { .. } => BotIntent::Recommend,
            DialogueAct::Chat { .. } => BotIntent::Chat,
        }
    }

    /// Every graph node in the act tree, children before grandchildren.
    pub fn nodes(&self) -> Vec<NodeId> {
        match self {
            DialogueAct::Query { examples, .. } => examples.iter().map(|n| n.id).collect(),
            DialogueAct::Recommend { items } => {
                let mut out: Vec<NodeId> = items.iter().map(|i| i.entity.id).collect();
                out.extend(items.iter().flat_map(|i| i.explanation.iter().map(|n| n.id)));
                out
            }
            DialogueAct::Chat { topic } => topic.iter().map(|n| n.id).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryPlan {
    pub attribute_type: String,
    pub normalized_entropy: f64,
    pub examples: Vec<ActNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActError {
    #[error("policy chose {0} but the graph offers nothing to build it from")]
    InconsistentIntent(BotIntent),
}

/// Candidates still worth asking about: non-negative score, and among those
/// only the ones at the best match ratio.
pub fn question_pool(ranking: &[RankedEntity]) -> Vec<NodeId> {
    let viable: Vec<&RankedEntity> = ranking.iter().filter(|r| r.score >= 0.0).collect();
    let best = viable.iter().map(|r| r.match_ratio).fold(f64::NEG_INFINITY, f64::max);
    viable
        .into_iter()
        .filter(|r| r.match_ratio >= best)
        .map(|r| r.entity.id)
        .collect()
}

/// Shannon entropy in bits of a count distribution, divided by
/// `log2(#values)`. Counts are summed in a fixed order so equal multisets
/// give bit-identical results.
pub fn normalized_entropy(counts: &[usize]) -> f64 {
    let mut counts: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
    if counts.len() < 2 {
        return 0.0;
    }
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let total: usize = counts.iter().sum();
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum();
    h / (counts.len() as f64).log2()
}

pub fn select_query_attribute_type(
    state: &DialogueState,
    ranking: &[RankedEntity],
    graph: &KnowledgeGraph,
) -> Option<QueryPlan> {
    let pool = question_pool(ranking);
    // type -> value -> count over the pool
    let mut counts: BTreeMap<&str, BTreeMap<NodeId, usize>> = BTreeMap::new();
    for &e in &pool {
        let Ok(groups) = graph.attributes_of_entity(e) else {
            continue;
        };
        for (label, values) in groups {
            if state.asked_types.contains(label) {
                continue;
            }
            let slot = counts.entry(label.as_str()).or_default();
            for &v in values {
                *slot.entry(v).or_default() += 1;
            }
        }
    }

    let mut best: Option<(&str, f64)> = None;
    for (label, values) in &counts {
        if values.len() < 2 {
            continue;
        }
        let c: Vec<usize> = values.values().copied().collect();
        let h = normalized_entropy(&c);
        // labels iterate in ascending order, so a strict win keeps the first on ties
        if best.is_none_or(|(_, b)| h > b) {
            best = Some((label, h));
        }
    }

    let (label, h) = best?;
    let mut examples: Vec<(NodeId, usize)> = counts[label].iter().map(|(&v, &n)| (v, n)).collect();
    examples.sort_by(|a, b| {
        let name = |id: NodeId| graph.node(id).map(|n| n.norm_name.as_str()).unwrap_or("");
        b.1.cmp(&a.1)
            .then_with(|| name(a.0).cmp(name(b.0)))
            .then_with(|| a.0.cmp(&b.0))
    });
    Some(QueryPlan {
        attribute_type: label.to_string(),
        normalized_entropy: h,
        examples: examples
            .into_iter()
            .take(MAX_QUERY_EXAMPLES)
            .map(|(v, _)| ActNode::of(graph, v))
            .collect(),
    })
}

/// A Generic node next to the most recently mentioned node, lowest name first.
fn chat_topic(frame: &SemanticFrame, state: &DialogueState, graph: &KnowledgeGraph) -> Option<ActNode> {
    let anchor = frame
        .mentions
        .last()
        .map(|m| m.node)
        .or_else(|| state.last_mentioned())?;
    graph
        .neighbors(anchor)
        .iter()
        .filter_map(|&n| graph.node(n))
        .filter(|n| n.kind == NodeKind::Generic)
        .min_by(|a, b| a.norm_name.cmp(&b.norm_name).then(a.id.cmp(&b.id)))
        .map(|n| ActNode::of(graph, n.id))
}

pub fn generate_act(
    intent: BotIntent,
    frame: &SemanticFrame,
    state: &DialogueState,
    ranking: &[RankedEntity],
    graph: &KnowledgeGraph,
    cfg: &BotConfig,
) -> Result<DialogueAct, ActError> {
    match intent {
        BotIntent::Query => {
            let plan = select_query_attribute_type(state, ranking, graph)
                .ok_or(ActError::InconsistentIntent(BotIntent::Query))?;
            Ok(DialogueAct::Query {
                attribute_type: plan.attribute_type,
                examples: plan.examples,
            })
        }
        BotIntent::Recommend => {
            if ranking.is_empty() {
                return Err(ActError::InconsistentIntent(BotIntent::Recommend));
            }
            let items = ranking
                .iter()
                .take(cfg.top_k.max(1))
                .map(|r| RecommendedItem {
                    entity: r.entity.clone(),
                    explanation: r.matched_attrs.clone(),
                })
                .collect();
            Ok(DialogueAct::Recommend { items })
        }
        BotIntent::Chat => Ok(DialogueAct::Chat {
            topic: chat_topic(frame, state, graph),
        }),
    }
}
