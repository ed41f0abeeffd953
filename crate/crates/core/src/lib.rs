//! A rule-based conversational recommender over a simplified knowledge graph.
//!
//! A bot is a graph loaded from a five-column data file plus a config
//! document. Each user turn runs through five decoupled stages:
//!
//! 1. [`nlu`] parses the utterance into a [`nlu::SemanticFrame`];
//! 2. [`ranking`] scores every candidate entity against the [`state`];
//! 3. [`policy`] picks Query, Recommend or Chat;
//! 4. [`act`] reasons over the graph to build a [`act::DialogueAct`];
//! 5. [`nlg`] renders the act through configured templates.
//!
//! [`engine`] wires the stages into sessions and [`eval`] replays annotated
//! corpora to measure intent accuracy and Recall@k.

pub mod act;
pub mod config;
pub mod engine;
pub mod eval;
pub mod kg;
pub mod nlg;
pub mod nlu;
pub mod policy;
pub mod ranking;
pub mod state;
pub mod text;

pub use act::{generate_act, select_query_attribute_type, DialogueAct};
pub use config::{ConfigDocument, ConfigError, ConfigFinding};
pub use engine::{BotRuntime, PipelineError, Session, TurnRecord};
pub use eval::{monte_carlo_check, random_baseline, replay_corpus, EvalCorpus, EvalReport};
pub use kg::{KgError, KnowledgeGraph, Node, NodeId, NodeKind};
pub use nlg::{render_response, validate_templates, TemplateSet};
pub use nlu::{parse_utterance, Lexicon, QueryParser, SemanticFrame, UserIntent};
pub use policy::{predict_intent, BotConfig, BotIntent, Mode};
pub use ranking::{rank_candidates, RankedEntity};
pub use state::DialogueState;
