//! Bot intent prediction.
//!
//! Each turn the policy scores the three intents by how much the context
//! supports them (their *desirability*), multiplies by the configured
//! preference weights and takes the argmax over the intents that are
//! currently eligible. Recommend is gated: in cautious mode the top
//! candidate has to cover at least `matching_threshold` of the liked
//! attributes; in casual mode any positive evidence (or an explicit request)
//! is enough. Chat is always eligible, so a decision always exists.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::act::{select_query_attribute_type, QueryPlan};
use crate::kg::KnowledgeGraph;
use crate::nlg::TemplateSet;
use crate::nlu::{Lexicon, SemanticFrame, UserIntent};
use crate::ranking::RankedEntity;
use crate::state::DialogueState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BotIntent {
    Query,
    Recommend,
    Chat,
}

impl BotIntent {
    pub const ALL: [BotIntent; 3] = [BotIntent::Query, BotIntent::Recommend, BotIntent::Chat];

    /// Lower-case key used in template and config documents.
    pub fn key(self) -> &'static str {
        match self {
            BotIntent::Query => "query",
            BotIntent::Recommend => "recommend",
            BotIntent::Chat => "chat",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        BotIntent::ALL.into_iter().find(|i| i.key().eq_ignore_ascii_case(key))
    }
}

impl fmt::Display for BotIntent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BotIntent::Query => "Query",
            BotIntent::Recommend => "Recommend",
            BotIntent::Chat => "Chat",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Casual,
    Cautious,
}

/// Scroll-bar weights for the three intents, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preferences {
    pub query: f64,
    pub recommend: f64,
    pub chat: f64,
}

impl Preferences {
    pub fn get(&self, intent: BotIntent) -> f64 {
        match intent {
            BotIntent::Query => self.query,
            BotIntent::Recommend => self.recommend,
            BotIntent::Chat => self.chat,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotConfig {
    pub mode: Mode,
    pub preferences: Preferences,
    pub negation_penalty: f64,
    pub matching_threshold: f64,
    pub neighborhood_weight: f64,
    pub top_k: usize,
    pub chat_floor: f64,
    pub lexicon: Lexicon,
    pub templates: TemplateSet,
}

impl BotConfig {
    /// Defaults for one of the two pre-built modes.
    pub fn preset(mode: Mode) -> Self {
        let (matching_threshold, preferences) = match mode {
            Mode::Casual => (
                0.5,
                Preferences {
                    query: 0.5,
                    recommend: 0.8,
                    chat: 0.5,
                },
            ),
            Mode::Cautious => (
                0.9,
                Preferences {
                    query: 0.8,
                    recommend: 0.5,
                    chat: 0.2,
                },
            ),
        };
        BotConfig {
            mode,
            preferences,
            negation_penalty: 1.0,
            matching_threshold,
            neighborhood_weight: 0.5,
            top_k: 3,
            chat_floor: 0.1,
            lexicon: Lexicon::default(),
            templates: TemplateSet::default(),
        }
    }
}

impl Default for BotConfig {
    fn default() -> Self {
        Self::preset(Mode::Casual)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Desirabilities {
    pub query: f64,
    pub recommend: f64,
    pub chat: f64,
}

impl Desirabilities {
    pub fn get(&self, intent: BotIntent) -> f64 {
        match intent {
            BotIntent::Query => self.query,
            BotIntent::Recommend => self.recommend,
            BotIntent::Chat => self.chat,
        }
    }
}

/// Everything the policy conditions on for one turn.
#[derive(Debug, Clone, Copy)]
pub struct PolicyInput<'a> {
    pub frame: &'a SemanticFrame,
    pub state: &'a DialogueState,
    pub ranking: &'a [RankedEntity],
    pub graph: &'a KnowledgeGraph,
    pub config: &'a BotConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyDecision {
    pub intent: BotIntent,
    pub desirabilities: Desirabilities,
    pub recommend_gate: bool,
    /// The attribute type a Query turn would ask about, if any.
    pub query_plan: Option<QueryPlan>,
}

/// The module boundary for intent prediction; alternative rule sets or
/// learned models plug in here.
pub trait IntentPolicy: Send + Sync {
    fn decide(&self, input: PolicyInput<'_>) -> PolicyDecision;
}

/// The default condition-decision rules.
#[derive(Debug, Clone, Copy, Default)]
pub struct RulePolicy;

impl IntentPolicy for RulePolicy {
    fn decide(&self, input: PolicyInput<'_>) -> PolicyDecision {
        decide(input)
    }
}

fn desirabilities_with_plan(input: &PolicyInput<'_>) -> (Desirabilities, Option<QueryPlan>) {
    let plan = select_query_attribute_type(input.state, input.ranking, input.graph);
    let d = Desirabilities {
        recommend: input.ranking.first().map(|r| r.match_ratio).unwrap_or(0.0),
        query: plan.as_ref().map(|p| p.normalized_entropy).unwrap_or(0.0),
        chat: input.config.chat_floor,
    };
    (d, plan)
}

pub fn intent_desirabilities(input: PolicyInput<'_>) -> Desirabilities {
    desirabilities_with_plan(&input).0
}

/// Whether Recommend is allowed this turn.
pub fn recommend_gate(input: &PolicyInput<'_>) -> bool {
    let Some(top) = input.ranking.first() else {
        return false;
    };
    match input.config.mode {
        Mode::Cautious => !input.state.liked_attrs.is_empty() && top.match_ratio >= input.config.matching_threshold,
        Mode::Casual => top.score > 0.0 || input.frame.user_intent == UserIntent::RequestRecommendation,
    }
}

/// `a` beats `b` by more than rounding noise. Relative, so scaling all
/// preferences by one constant never changes the outcome.
fn clearly_greater(a: f64, b: f64) -> bool {
    a - b > 1e-9 * a.abs().max(b.abs())
}

pub fn decide(input: PolicyInput<'_>) -> PolicyDecision {
    let (desirabilities, query_plan) = desirabilities_with_plan(&input);
    let gate = recommend_gate(&input);
    let query_ok = query_plan.is_some();
    let requested = input.frame.user_intent == UserIntent::RequestRecommendation;

    let intent = if requested && gate {
        BotIntent::Recommend
    } else if requested && query_ok {
        BotIntent::Query
    } else {
        let mut best: Option<(BotIntent, f64)> = None;
        for intent in [BotIntent::Recommend, BotIntent::Query, BotIntent::Chat] {
            let eligible = match intent {
                BotIntent::Recommend => gate,
                BotIntent::Query => query_ok,
                BotIntent::Chat => true,
            };
            if !eligible {
                continue;
            }
            let value = input.config.preferences.get(intent) * desirabilities.get(intent);
            match best {
                Some((_, b)) if !clearly_greater(value, b) => {}
                _ => best = Some((intent, value)),
            }
        }
        best.map(|(i, _)| i).unwrap_or(BotIntent::Chat)
    };

    PolicyDecision {
        intent,
        desirabilities,
        recommend_gate: gate,
        query_plan,
    }
}

pub fn predict_intent(input: PolicyInput<'_>) -> BotIntent {
    decide(input).intent
}
