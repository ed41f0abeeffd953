//! Per-session conversational context.
//!
//! Updates are pure: each returns a new state and leaves the input alone, so
//! replaying a history from [`DialogueState::new`] reproduces the state exactly.

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::act::DialogueAct;
use crate::kg::{KnowledgeGraph, NodeId, NodeKind};
use crate::nlu::{Polarity, SemanticFrame, UserIntent};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "speaker", rename_all = "snake_case")]
pub enum HistoryEntry {
    User { utterance: String, frame: SemanticFrame },
    Bot { utterance: String, act: DialogueAct },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DialogueState {
    pub liked_attrs: IndexSet<NodeId>,
    pub disliked_attrs: IndexSet<NodeId>,
    pub liked_entities: IndexSet<NodeId>,
    pub rejected_entities: IndexSet<NodeId>,
    /// Entities already offered, in offer order.
    pub recommended: IndexSet<NodeId>,
    /// Relation labels the bot has asked about.
    pub asked_types: IndexSet<String>,
    pub history: Vec<HistoryEntry>,
    pub turn_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("frame mentions node {0}, which is not in the graph")]
    UnknownNode(NodeId),
}

impl DialogueState {
    pub fn new() -> Self {
        Self::default()
    }

    /// True when the user has not expressed any preference yet.
    pub fn is_empty(&self) -> bool {
        self.liked_attrs.is_empty()
            && self.disliked_attrs.is_empty()
            && self.liked_entities.is_empty()
            && self.rejected_entities.is_empty()
    }

    /// Folds one user frame into the state.
    pub fn apply_frame(&self, frame: &SemanticFrame, graph: &KnowledgeGraph) -> Result<Self, StateError> {
        let mut next = self.clone();
        for m in &frame.mentions {
            let node = graph.node(m.node).ok_or(StateError::UnknownNode(m.node))?;
            match (node.kind, m.polarity) {
                (NodeKind::Attribute, Polarity::Positive) => {
                    next.disliked_attrs.shift_remove(&m.node);
                    next.liked_attrs.insert(m.node);
                }
                (NodeKind::Attribute, Polarity::Negative) => {
                    next.liked_attrs.shift_remove(&m.node);
                    next.disliked_attrs.insert(m.node);
                }
                (NodeKind::Entity, Polarity::Positive) => {
                    next.rejected_entities.shift_remove(&m.node);
                    next.liked_entities.insert(m.node);
                }
                (NodeKind::Entity, Polarity::Negative) => {
                    next.liked_entities.shift_remove(&m.node);
                    next.rejected_entities.insert(m.node);
                }
                (NodeKind::Generic, _) => {}
            }
        }
        if let Some(&last) = self.recommended.last() {
            match frame.user_intent {
                UserIntent::AcceptRecommendation => {
                    next.rejected_entities.shift_remove(&last);
                    next.liked_entities.insert(last);
                }
                UserIntent::RejectRecommendation => {
                    next.liked_entities.shift_remove(&last);
                    next.rejected_entities.insert(last);
                }
                _ => {}
            }
        }
        next.turn_index += 1;
        next.history.push(HistoryEntry::User {
            utterance: frame.raw.clone(),
            frame: frame.clone(),
        });
        Ok(next)
    }

    /// Records the act the bot just emitted.
    pub fn apply_bot_act(&self, act: &DialogueAct, utterance: &str) -> Self {
        let mut next = self.clone();
        match act {
            DialogueAct::Query { attribute_type, .. } => {
                next.asked_types.insert(attribute_type.clone());
            }
            DialogueAct::Recommend { items } => {
                next.recommended.extend(items.iter().map(|i| i.entity.id));
            }
            DialogueAct::Chat { .. } => {}
        }
        next.history.push(HistoryEntry::Bot {
            utterance: utterance.to_string(),
            act: act.clone(),
        });
        next
    }

    /// Most recent node the user mentioned, searching back through history.
    pub fn last_mentioned(&self) -> Option<NodeId> {
        self.history.iter().rev().find_map(|h| match h {
            HistoryEntry::User { frame, .. } => frame.mentions.last().map(|m| m.node),
            HistoryEntry::Bot { .. } => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::act::{ActNode, RecommendedItem};
    use crate::kg::tests::kg3;
    use crate::nlu::Mention;

    fn frame(g: &KnowledgeGraph, intent: UserIntent, ms: &[(&str, Polarity)]) -> SemanticFrame {
        SemanticFrame {
            user_intent: intent,
            mentions: ms
                .iter()
                .map(|(n, p)| {
                    let node = g.lookup_node(n).unwrap();
                    Mention {
                        node: node.id,
                        name: node.name.clone(),
                        kind: node.kind,
                        polarity: *p,
                        span: (0, 0),
                    }
                })
                .collect(),
            raw: String::new(),
            normalized: String::new(),
        }
    }

    fn id(g: &KnowledgeGraph, n: &str) -> NodeId {
        g.lookup_node(n).unwrap().id
    }

    fn recommend(g: &KnowledgeGraph, n: &str) -> DialogueAct {
        DialogueAct::Recommend {
            items: vec![RecommendedItem {
                entity: ActNode::of(g, id(g, n)),
                explanation: vec![],
            }],
        }
    }

    #[test]
    fn fresh_state() {
        let s = DialogueState::new();
        assert_eq!(s, DialogueState::new());
        assert_eq!(s.turn_index, 0);
        assert!(s.is_empty() && s.history.is_empty());
    }

    #[test]
    fn liked_attribute() {
        let g = kg3();
        let s = DialogueState::new()
            .apply_frame(&frame(&g, UserIntent::Provide, &[("Nolan", Polarity::Positive)]), &g)
            .unwrap();
        assert_eq!(s.liked_attrs.iter().copied().collect::<Vec<_>>(), [id(&g, "Nolan")]);
        assert_eq!(s.turn_index, 1);
        assert_eq!(s.history.len(), 1);
    }

    #[test]
    fn later_polarity_overwrites() {
        let g = kg3();
        let s = DialogueState::new()
            .apply_frame(&frame(&g, UserIntent::Provide, &[("SciFi", Polarity::Positive)]), &g)
            .unwrap()
            .apply_frame(&frame(&g, UserIntent::Provide, &[("SciFi", Polarity::Negative)]), &g)
            .unwrap();
        assert!(s.liked_attrs.is_empty());
        assert_eq!(s.disliked_attrs.iter().copied().collect::<Vec<_>>(), [id(&g, "SciFi")]);
    }

    #[test]
    fn reject_and_accept_last_recommendation() {
        let g = kg3();
        let s = DialogueState::new().apply_bot_act(&recommend(&g, "Inception"), "How about Inception?");
        let rejected = s
            .apply_frame(&frame(&g, UserIntent::RejectRecommendation, &[]), &g)
            .unwrap();
        assert_eq!(
            rejected.rejected_entities.iter().copied().collect::<Vec<_>>(),
            [id(&g, "Inception")]
        );

        let accepted = rejected
            .apply_frame(&frame(&g, UserIntent::AcceptRecommendation, &[]), &g)
            .unwrap();
        assert!(accepted.rejected_entities.is_empty());
        assert_eq!(accepted.liked_entities.len(), 1);
    }

    #[test]
    fn accept_without_recommendation_is_noop() {
        let g = kg3();
        let s = DialogueState::new()
            .apply_frame(&frame(&g, UserIntent::AcceptRecommendation, &[]), &g)
            .unwrap();
        assert!(s.is_empty());
        assert_eq!((s.turn_index, s.history.len()), (1, 1));
    }

    #[test]
    fn unknown_node_is_rejected_and_input_untouched() {
        let g = kg3();
        let mut f = frame(&g, UserIntent::Provide, &[("Nolan", Polarity::Positive)]);
        f.mentions[0].node = NodeId(999);
        let s = DialogueState::new();
        assert_eq!(s.apply_frame(&f, &g), Err(StateError::UnknownNode(NodeId(999))));
        assert_eq!(s, DialogueState::new());
    }

    #[test]
    fn bot_acts() {
        let g = kg3();
        let q = DialogueAct::Query {
            attribute_type: "Director".into(),
            examples: vec![],
        };
        let s = DialogueState::new().apply_bot_act(&q, "Which director?");
        assert_eq!(s.asked_types.iter().collect::<Vec<_>>(), ["Director"]);
        assert_eq!(s.turn_index, 0);

        let chat = DialogueState::new().apply_bot_act(&DialogueAct::Chat { topic: None }, "hi");
        assert!(chat.is_empty() && chat.asked_types.is_empty() && chat.recommended.is_empty());
        assert_eq!(chat.history.len(), 1);

        let r = recommend(&g, "Inception");
        let s = DialogueState::new().apply_bot_act(&r, "").apply_bot_act(&r, "");
        assert_eq!(s.recommended.len(), 1);
    }

    #[test]
    fn last_mentioned_skips_bot_turns() {
        let g = kg3();
        let s = DialogueState::new()
            .apply_frame(
                &frame(
                    &g,
                    UserIntent::Provide,
                    &[("Nolan", Polarity::Positive), ("SciFi", Polarity::Positive)],
                ),
                &g,
            )
            .unwrap()
            .apply_bot_act(&DialogueAct::Chat { topic: None }, "ok")
            .apply_frame(&frame(&g, UserIntent::Chitchat, &[]), &g)
            .unwrap();
        assert_eq!(s.last_mentioned(), Some(id(&g, "SciFi")));
    }
}
