//! Offline evaluation against annotated conversations.
//!
//! Two metrics, both macro-averaged over turns:
//!
//! * intent accuracy at every bot turn that carries a gold intent;
//! * Recall@k at every bot turn annotated `Recommend` with gold items,
//!   `|top-k ∩ gold| / |gold|` over the bot's full ranking at that turn.
//!
//! The random-sampling baseline is analytic: 1/3 for the intent and
//! `min(k, n) / n` for Recall@k over a catalog of `n` entities.
//!
//! Corpus files hold one JSON conversation per line:
//!
//! ```json
//! {"id": "c1", "turns": [
//!   {"speaker": "user", "utterance": "I like Nolan and SciFi"},
//!   {"speaker": "bot", "utterance": "Try Inception", "gold_intent": "Recommend", "gold_items": ["Inception"]}
//! ]}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{mix_seed, BotRuntime, PipelineError};
use crate::kg::NodeKind;
use crate::policy::BotIntent;
use crate::state::DialogueState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speaker {
    User,
    Bot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusTurn {
    pub speaker: Speaker,
    #[serde(default)]
    pub utterance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_intent: Option<BotIntent>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gold_items: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conversation {
    #[serde(default)]
    pub id: Option<String>,
    pub turns: Vec<CorpusTurn>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCorpus {
    pub conversations: Vec<Conversation>,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("corpus line {line}: {message}")]
    CorpusFormat { line: usize, message: String },
    #[error("conversation {conversation}: {source}")]
    Pipeline {
        conversation: usize,
        #[source]
        source: PipelineError,
    },
}

impl EvalCorpus {
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut conversations = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let conv: Conversation = serde_json::from_str(line).map_err(|e| EvalError::CorpusFormat {
                line: line_no,
                message: e.to_string(),
            })?;
            validate_conversation(&conv).map_err(|message| EvalError::CorpusFormat { line: line_no, message })?;
            conversations.push(conv);
        }
        Ok(EvalCorpus { conversations })
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, EvalError> {
        let text = std::str::from_utf8(bytes).map_err(|e| EvalError::CorpusFormat {
            line: bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1,
            message: "invalid UTF-8".into(),
        })?;
        Self::parse(text)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.conversations {
            out.push_str(&serde_json::to_string(c).expect("corpus types serialize"));
            out.push('\n');
        }
        out
    }
}

fn validate_conversation(conv: &Conversation) -> Result<(), String> {
    for (i, t) in conv.turns.iter().enumerate() {
        if t.speaker == Speaker::User && (t.gold_intent.is_some() || !t.gold_items.is_empty()) {
            return Err(format!("turn {i}: gold annotations are only allowed on bot turns"));
        }
        if !t.gold_items.is_empty() && t.gold_intent != Some(BotIntent::Recommend) {
            return Err(format!("turn {i}: gold_items require gold_intent \"Recommend\""));
        }
    }
    Ok(())
}

/// What the system under evaluation said at one bot turn.
#[derive(Debug, Clone, PartialEq)]
pub struct BotTurnPrediction {
    pub intent: BotIntent,
    /// Full ranking, best first, by display name.
    pub ranking: Vec<String>,
}

/// A system that can be replayed against a corpus.
pub trait Recommender: Sync {
    type Run<'a>: ConversationRun
    where
        Self: 'a;

    fn start(&self, conversation: usize, seed: u64) -> Self::Run<'_>;

    /// Number of entities a random ranking would draw from.
    fn catalog_size(&self) -> usize;

    /// Canonical entity name for a gold item, if the catalog has it.
    fn resolve_item(&self, name: &str) -> Option<String>;
}

pub trait ConversationRun {
    /// Feeds the user utterances since the previous bot turn (possibly none)
    /// and returns the bot's move for the next bot turn.
    fn respond(&mut self, utterances: &[&str]) -> Result<BotTurnPrediction, PipelineError>;
}

pub struct PipelineRun<'a> {
    bot: &'a BotRuntime,
    state: DialogueState,
    seed: u64,
}

impl ConversationRun for PipelineRun<'_> {
    fn respond(&mut self, utterances: &[&str]) -> Result<BotTurnPrediction, PipelineError> {
        let inputs: &[&str] = if utterances.is_empty() { &[""] } else { utterances };
        let mut last = None;
        for u in inputs {
            let out = self.bot.run_turn(&self.state, u, self.seed)?;
            self.state = out.state;
            last = Some((out.record.intent, out.ranking));
        }
        let (intent, ranking) = last.expect("at least one input");
        Ok(BotTurnPrediction {
            intent,
            ranking: ranking.into_iter().map(|r| r.entity.name).collect(),
        })
    }
}

impl Recommender for BotRuntime {
    type Run<'a>
        = PipelineRun<'a>
    where
        Self: 'a;

    fn start(&self, conversation: usize, seed: u64) -> Self::Run<'_> {
        PipelineRun {
            bot: self,
            state: DialogueState::new(),
            seed: mix_seed(seed, conversation as u64),
        }
    }

    fn catalog_size(&self) -> usize {
        self.graph().entity_count()
    }

    fn resolve_item(&self, name: &str) -> Option<String> {
        self.graph().find(name, NodeKind::Entity).map(|n| n.name.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub intent_accuracy: f64,
    pub recall_at: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub conversations: usize,
    pub bot_turns: usize,
    pub intent_turns: usize,
    pub intent_correct: usize,
    pub recommend_turns: usize,
    pub skipped_turns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub averaging: String,
    /// Percent; `None` when no turn carried a gold intent.
    pub intent_accuracy: Option<f64>,
    /// Percent per k; `None` when no recommend turn was scored.
    pub recall_at: BTreeMap<usize, Option<f64>>,
    pub counts: EvalCounts,
    pub catalog_size: usize,
    pub unresolved_items: Vec<String>,
    pub baseline: Baseline,
}

/// Analytic scores of a uniformly random policy and ranking, in percent.
pub fn random_baseline(n_entities: usize, ks: &[usize]) -> Baseline {
    let recall_at = ks
        .iter()
        .map(|&k| {
            let r = if n_entities == 0 {
                0.0
            } else {
                100.0 * k.min(n_entities) as f64 / n_entities as f64
            };
            (k, r)
        })
        .collect();
    Baseline {
        intent_accuracy: 100.0 / 3.0,
        recall_at,
    }
}

/// Empirical Recall@k (percent) of uniformly random rankings of `n` items
/// with one gold item.
pub fn monte_carlo_check(n_entities: usize, k: usize, trials: usize, seed: u64) -> f64 {
    if n_entities == 0 || trials == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n_entities).collect();
    let take = k.min(n_entities);
    let mut hits = 0usize;
    for _ in 0..trials {
        // partial Fisher-Yates: perm[..take] becomes a uniform top-k
        for i in 0..take {
            let j = rng.gen_range(i..n_entities);
            perm.swap(i, j);
        }
        if perm[..take].contains(&0) {
            hits += 1;
        }
    }
    100.0 * hits as f64 / trials as f64
}

#[derive(Default)]
struct ConvTally {
    bot_turns: usize,
    intent_turns: usize,
    intent_correct: usize,
    recommend_turns: usize,
    skipped: usize,
    recall_sums: Vec<f64>,
    unresolved: Vec<String>,
}

fn replay_one<R: Recommender>(
    rec: &R,
    idx: usize,
    conv: &Conversation,
    ks: &[usize],
    seed: u64,
) -> Result<ConvTally, PipelineError> {
    let mut run = rec.start(idx, seed);
    let mut tally = ConvTally {
        recall_sums: vec![0.0; ks.len()],
        ..Default::default()
    };
    let mut pending: Vec<&str> = Vec::new();
    for turn in &conv.turns {
        match turn.speaker {
            Speaker::User => pending.push(&turn.utterance),
            Speaker::Bot => {
                let pred = run.respond(&pending)?;
                pending.clear();
                tally.bot_turns += 1;
                let Some(gold_intent) = turn.gold_intent else {
                    continue;
                };
                let resolved: Vec<Option<String>> = turn.gold_items.iter().map(|g| rec.resolve_item(g)).collect();
                if resolved.iter().any(Option::is_none) {
                    tally.skipped += 1;
                    tally.unresolved.extend(
                        turn.gold_items
                            .iter()
                            .zip(&resolved)
                            .filter(|(_, r)| r.is_none())
                            .map(|(g, _)| g.clone()),
                    );
                    continue;
                }
                tally.intent_turns += 1;
                if pred.intent == gold_intent {
                    tally.intent_correct += 1;
                }
                if gold_intent == BotIntent::Recommend && !resolved.is_empty() {
                    let gold: BTreeSet<String> = resolved.into_iter().flatten().collect();
                    tally.recommend_turns += 1;
                    for (slot, &k) in tally.recall_sums.iter_mut().zip(ks) {
                        let hits = pred.ranking.iter().take(k).filter(|n| gold.contains(*n)).count();
                        *slot += hits as f64 / gold.len() as f64;
                    }
                }
            }
        }
    }
    Ok(tally)
}

/// Replays every conversation (in parallel, each in its own session) and
/// aggregates the metrics.
pub fn replay_corpus<R: Recommender>(
    corpus: &EvalCorpus,
    rec: &R,
    ks: &[usize],
    seed: u64,
) -> Result<EvalReport, EvalError> {
    let tallies: Vec<ConvTally> = corpus
        .conversations
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            replay_one(rec, i, c, ks, seed).map_err(|source| EvalError::Pipeline {
                conversation: i,
                source,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut counts = EvalCounts {
        conversations: corpus.conversations.len(),
        ..Default::default()
    };
    let mut recall_sums = vec![0.0; ks.len()];
    let mut unresolved = BTreeSet::new();
    for t in tallies {
        counts.bot_turns += t.bot_turns;
        counts.intent_turns += t.intent_turns;
        counts.intent_correct += t.intent_correct;
        counts.recommend_turns += t.recommend_turns;
        counts.skipped_turns += t.skipped;
        for (acc, v) in recall_sums.iter_mut().zip(t.recall_sums) {
            *acc += v;
        }
        unresolved.extend(t.unresolved);
    }

    let pct = |num: f64, den: usize| (den > 0).then(|| 100.0 * num / den as f64);
    let recall_at = ks
        .iter()
        .zip(&recall_sums)
        .map(|(&k, &sum)| (k, pct(sum, counts.recommend_turns)))
        .collect();
    Ok(EvalReport {
        averaging: "macro-average over scored turns".into(),
        intent_accuracy: pct(counts.intent_correct as f64, counts.intent_turns),
        recall_at,
        catalog_size: rec.catalog_size(),
        unresolved_items: unresolved.into_iter().collect(),
        baseline: random_baseline(rec.catalog_size(), ks),
        counts,
    })
}

impl EvalReport {
    /// Recall@k never decreases as k grows.
    pub fn recall_is_monotone(&self) -> bool {
        let vals: Vec<f64> = self.recall_at.values().filter_map(|v| *v).collect();
        vals.windows(2).all(|w| w[0] <= w[1] + 1e-12)
    }

    pub fn to_table(&self) -> String {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        let mut header = format!("{:<10} {:>12}", "Method", "Accuracy(%)");
        let mut ours = format!("{:<10} {:>12}", "Bot", fmt(self.intent_accuracy));
        let mut base = format!("{:<10} {:>12}", "Baseline", fmt(Some(self.baseline.intent_accuracy)));
        for (k, v) in &self.recall_at {
            let _ = write!(header, " {:>9}", format!("R@{k}(%)"));
            let _ = write!(ours, " {:>9}", fmt(*v));
            let _ = write!(base, " {:>9}", fmt(self.baseline.recall_at.get(k).copied()));
        }
        let c = &self.counts;
        format!(
            "# {}\n{header}\n{base}\n{ours}\n\nconversations={} bot_turns={} intent_turns={} recommend_turns={} skipped_turns={} catalog={}\n",
            self.averaging, c.conversations, c.bot_turns, c.intent_turns, c.recommend_turns, c.skipped_turns, self.catalog_size
        )
    }
}
