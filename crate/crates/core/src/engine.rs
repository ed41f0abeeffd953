//! The per-turn pipeline:
//! parse → apply frame → rank → predict intent → generate act → render →
//! apply bot act. A turn either completes every stage or leaves the session
//! state untouched.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::act::{generate_act, DialogueAct};
use crate::config::{compile_parser, ConfigDocument, ConfigError};
use crate::kg::{FocusGraph, KnowledgeGraph, NodeId, DEFAULT_FOCUS_LIMIT};
use crate::nlg::render_response;
use crate::nlu::{QueryParser, SemanticFrame};
use crate::policy::{BotConfig, BotIntent, Desirabilities, IntentPolicy, PolicyInput, RulePolicy};
use crate::ranking::{rank_candidates, RankedEntity};
use crate::state::DialogueState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Parse,
    ApplyFrame,
    Rank,
    Policy,
    Act,
    Render,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Parse => "parse",
            Stage::ApplyFrame => "apply_frame",
            Stage::Rank => "rank",
            Stage::Policy => "policy",
            Stage::Act => "act",
            Stage::Render => "render",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{stage} stage failed: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub code: &'static str,
    pub message: String,
}

/// Everything one turn produced, as shown in the chat window and status panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub turn_index: usize,
    pub utterance: String,
    pub frame: SemanticFrame,
    pub intent: BotIntent,
    pub desirabilities: Desirabilities,
    pub act: DialogueAct,
    pub response: String,
    pub top_ranking: Vec<RankedEntity>,
    pub kg_focus: FocusGraph,
}

/// A completed turn: the record, the state to commit, and the full ranking
/// the policy saw.
#[derive(Debug, Clone)]
pub struct TurnOutcome {
    pub record: TurnRecord,
    pub state: DialogueState,
    pub ranking: Vec<RankedEntity>,
}

/// A graph plus a validated config, compiled and ready to run turns.
#[derive(Clone)]
pub struct BotRuntime {
    graph: Arc<KnowledgeGraph>,
    config: Arc<BotConfig>,
    parser: Arc<QueryParser>,
    policy: Arc<dyn IntentPolicy>,
}

impl fmt::Debug for BotRuntime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BotRuntime")
            .field("nodes", &self.graph.stats().nodes)
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

/// SplitMix64 finalizer, used to derive per-turn template selectors.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl BotRuntime {
    pub fn new(graph: Arc<KnowledgeGraph>, config: BotConfig) -> Result<Self, ConfigError> {
        let parser = compile_parser(&config, &graph)?;
        Ok(BotRuntime {
            graph,
            config: Arc::new(config),
            parser: Arc::new(parser),
            policy: Arc::new(RulePolicy),
        })
    }

    /// Validates `doc` against `graph` and compiles it.
    pub fn from_document(graph: Arc<KnowledgeGraph>, doc: &ConfigDocument) -> Result<Self, ConfigError> {
        let config = doc.build_for(&graph)?;
        Self::new(graph, config)
    }

    /// Swaps in another intent policy.
    pub fn with_policy(mut self, policy: Arc<dyn IntentPolicy>) -> Self {
        self.policy = policy;
        self
    }

    pub fn graph(&self) -> &Arc<KnowledgeGraph> {
        &self.graph
    }

    pub fn config(&self) -> &Arc<BotConfig> {
        &self.config
    }

    pub fn parser(&self) -> &QueryParser {
        &self.parser
    }

    /// Runs one turn from `state`. `seed` is the session seed; the template
    /// selector is derived from it and the turn index.
    pub fn run_turn(&self, state: &DialogueState, utterance: &str, seed: u64) -> Result<TurnOutcome, PipelineError> {
        let graph = &*self.graph;
        let cfg = &*self.config;

        let frame = self.parser.parse(utterance, graph);
        let state = state.apply_frame(&frame, graph).map_err(|e| PipelineError {
            stage: Stage::ApplyFrame,
            code: "UnknownNode",
            message: e.to_string(),
        })?;
        let ranking = rank_candidates(&state, graph, cfg);
        let decision = self.policy.decide(PolicyInput {
            frame: &frame,
            state: &state,
            ranking: &ranking,
            graph,
            config: cfg,
        });
        let act = generate_act(decision.intent, &frame, &state, &ranking, graph, cfg).map_err(|e| PipelineError {
            stage: Stage::Act,
            code: "InconsistentIntent",
            message: e.to_string(),
        })?;
        let selector = mix_seed(seed, state.turn_index as u64);
        let response = render_response(&act, &cfg.templates, selector).map_err(|e| PipelineError {
            stage: Stage::Render,
            code: "TemplateNotFound",
            message: e.to_string(),
        })?;
        let next = state.apply_bot_act(&act, &response);

        let mut seeds: Vec<NodeId> = frame.mentions.iter().map(|m| m.node).collect();
        seeds.extend(act.nodes());
        let kg_focus = graph.subgraph_focus(&seeds, 1, DEFAULT_FOCUS_LIMIT);

        let record = TurnRecord {
            turn_index: next.turn_index,
            utterance: utterance.to_string(),
            frame,
            intent: decision.intent,
            desirabilities: decision.desirabilities,
            act,
            response,
            top_ranking: ranking.iter().take(cfg.top_k).cloned().collect(),
            kg_focus,
        };
        Ok(TurnOutcome {
            record,
            state: next,
            ranking,
        })
    }
}

/// One conversation with a bot. Turns are applied strictly in order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub bot_id: String,
    pub seed: u64,
    pub state: DialogueState,
    pub transcript: Vec<TurnRecord>,
}

impl Session {
    pub fn new(id: impl Into<String>, bot_id: impl Into<String>, seed: u64) -> Self {
        Session {
            id: id.into(),
            bot_id: bot_id.into(),
            seed,
            state: DialogueState::new(),
            transcript: Vec::new(),
        }
    }

    /// Runs a turn and commits it only if every stage succeeded.
    pub fn post_message(&mut self, bot: &BotRuntime, utterance: &str) -> Result<&TurnRecord, PipelineError> {
        let outcome = bot.run_turn(&self.state, utterance, self.seed)?;
        self.state = outcome.state;
        self.transcript.push(outcome.record);
        Ok(self.transcript.last().expect("just pushed"))
    }

    /// Replays this session's user utterances in a fresh session with the
    /// same seed.
    pub fn replay(&self, bot: &BotRuntime) -> Result<Session, PipelineError> {
        let mut fresh = Session::new(self.id.clone(), self.bot_id.clone(), self.seed);
        for t in &self.transcript {
            fresh.post_message(bot, &t.utterance)?;
        }
        Ok(fresh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::tests::KG3;
    use crate::nlu::UserIntent;
    use crate::policy::Mode;

    fn bot(mode: Mode) -> BotRuntime {
        let g = Arc::new(KnowledgeGraph::from_tsv(KG3).unwrap());
        BotRuntime::new(g, BotConfig::preset(mode)).unwrap()
    }

    #[test]
    fn cautious_conversation() {
        let b = bot(Mode::Cautious);
        let mut s = Session::new("s", "b", 42);
        let t = s.post_message(&b, "hi").unwrap().clone();
        assert_eq!(t.intent, BotIntent::Query);
        assert!(matches!(&t.act, DialogueAct::Query { attribute_type, .. } if attribute_type == "Director"));
        assert_eq!(t.frame.user_intent, UserIntent::Chitchat);

        let t = s.post_message(&b, "I like Nolan and SciFi").unwrap().clone();
        assert_eq!(t.intent, BotIntent::Recommend);
        assert!(t.response.contains("Inception"), "{}", t.response);
        assert_eq!(s.state.turn_index, 2);
        assert_eq!(s.transcript.len(), 2);
        // focus holds the mentions, the recommendation and their neighbours
        assert!(t.kg_focus.nodes.iter().any(|n| n.name == "Nolan" && n.highlighted));
    }

    #[test]
    fn replay_is_identical() {
        let b = bot(Mode::Casual);
        let mut s = Session::new("s", "b", 7);
        for u in [
            "hello",
            "not scifi",
            "recommend something",
            "no thanks",
            "what about cameron",
        ] {
            s.post_message(&b, u).unwrap();
        }
        let again = s.replay(&b).unwrap();
        assert_eq!(
            serde_json::to_string(&again.transcript).unwrap(),
            serde_json::to_string(&s.transcript).unwrap()
        );
        assert_eq!(again.state, s.state);
    }

    #[test]
    fn failed_turn_leaves_state_alone() {
        let g = Arc::new(KnowledgeGraph::from_tsv(KG3).unwrap());
        let mut cfg = BotConfig::preset(Mode::Cautious);
        cfg.templates.templates.clear();
        let b = BotRuntime::new(g, cfg).unwrap();
        let mut s = Session::new("s", "b", 1);
        let err = s.post_message(&b, "hi").unwrap_err();
        assert_eq!(err.stage, Stage::Render);
        assert_eq!(s.state, DialogueState::new());
        assert!(s.transcript.is_empty());
    }

    #[test]
    fn selector_mixing_is_stable() {
        assert_eq!(mix_seed(1, 2), mix_seed(1, 2));
        assert_ne!(mix_seed(1, 2), mix_seed(1, 3));
    }
}
