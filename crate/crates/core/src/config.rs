//! The bot config document.
//!
//! Every field is optional; unset fields take the defaults of the selected
//! mode. A document is kept as written (so a later mode change still moves
//! the mode-dependent defaults) and resolved into a [`BotConfig`] on demand.
//!
//! ```json
//! {
//!   "mode": "cautious",
//!   "preferences": {"query": 0.8, "recommend": 0.5, "chat": 0.2},
//!   "negation_penalty": 1.0,
//!   "matching_threshold": 0.9,
//!   "neighborhood_weight": 0.5,
//!   "top_k": 3,
//!   "chat_floor": 0.1,
//!   "lexicon": {"aliases": {"chris nolan": "Nolan"}, "negation_cues": ["not"]},
//!   "templates": {"query.Director": "Which director's movies do you like ? E.g. {attributes}"}
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::KnowledgeGraph;
use crate::nlg::{validate_templates, TemplateFinding};
use crate::nlu::{LexiconError, NegationWindow, QueryParser, UserIntent};
use crate::policy::{BotConfig, Mode};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferencesDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recommend: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chat: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegationWindowDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tokens: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chars: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aliases: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negation_cues: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intent_keywords: Option<BTreeMap<UserIntent, Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negation_window: Option<NegationWindowDoc>,
}

/// One template or a list of variants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<String> {
        match self {
            OneOrMany::One(s) => vec![s],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preferences: Option<PreferencesDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negation_penalty: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matching_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighborhood_weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chat_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<LexiconDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub templates: Option<BTreeMap<String, OneOrMany>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub list_separator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_separator: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "finding")]
pub enum ConfigFinding {
    OutOfRange { field: String, value: f64, allowed: String },
    Template(TemplateFinding),
    UnresolvedAlias { alias: String, target: String },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config document is not valid: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("config failed validation with {} finding(s)", .0.len())]
    Invalid(Vec<ConfigFinding>),
}

impl ConfigError {
    pub fn findings(&self) -> &[ConfigFinding] {
        match self {
            ConfigError::Invalid(f) => f,
            ConfigError::Syntax(_) => &[],
        }
    }
}

fn merge_opt<T>(base: &mut Option<T>, patch: Option<T>) {
    if patch.is_some() {
        *base = patch;
    }
}

fn merge_map<K: Ord, V>(base: &mut Option<BTreeMap<K, V>>, patch: Option<BTreeMap<K, V>>) {
    if let Some(p) = patch {
        base.get_or_insert_with(BTreeMap::new).extend(p);
    }
}

impl ConfigDocument {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, ConfigError> {
        Ok(serde_json::from_slice(bytes)?)
    }

    /// Overlays `patch`: scalars replace, maps merge key by key, lists replace.
    pub fn merged(&self, patch: ConfigDocument) -> ConfigDocument {
        let mut out = self.clone();
        merge_opt(&mut out.mode, patch.mode);
        if let Some(p) = patch.preferences {
            let prefs = out.preferences.get_or_insert_with(Default::default);
            merge_opt(&mut prefs.query, p.query);
            merge_opt(&mut prefs.recommend, p.recommend);
            merge_opt(&mut prefs.chat, p.chat);
        }
        merge_opt(&mut out.negation_penalty, patch.negation_penalty);
        merge_opt(&mut out.matching_threshold, patch.matching_threshold);
        merge_opt(&mut out.neighborhood_weight, patch.neighborhood_weight);
        merge_opt(&mut out.top_k, patch.top_k);
        merge_opt(&mut out.chat_floor, patch.chat_floor);
        if let Some(l) = patch.lexicon {
            let lex = out.lexicon.get_or_insert_with(Default::default);
            merge_map(&mut lex.aliases, l.aliases);
            merge_opt(&mut lex.negation_cues, l.negation_cues);
            merge_map(&mut lex.intent_keywords, l.intent_keywords);
            if let Some(w) = l.negation_window {
                let win = lex.negation_window.get_or_insert_with(Default::default);
                merge_opt(&mut win.tokens, w.tokens);
                merge_opt(&mut win.chars, w.chars);
            }
        }
        merge_map(&mut out.templates, patch.templates);
        merge_opt(&mut out.list_separator, patch.list_separator);
        merge_opt(&mut out.final_separator, patch.final_separator);
        out
    }

    /// Mode preset overlaid with the document's fields. Not validated.
    pub fn resolve(&self) -> BotConfig {
        let mut cfg = BotConfig::preset(self.mode.unwrap_or_default());
        if let Some(p) = &self.preferences {
            cfg.preferences.query = p.query.unwrap_or(cfg.preferences.query);
            cfg.preferences.recommend = p.recommend.unwrap_or(cfg.preferences.recommend);
            cfg.preferences.chat = p.chat.unwrap_or(cfg.preferences.chat);
        }
        cfg.negation_penalty = self.negation_penalty.unwrap_or(cfg.negation_penalty);
        cfg.matching_threshold = self.matching_threshold.unwrap_or(cfg.matching_threshold);
        cfg.neighborhood_weight = self.neighborhood_weight.unwrap_or(cfg.neighborhood_weight);
        cfg.top_k = self.top_k.unwrap_or(cfg.top_k);
        cfg.chat_floor = self.chat_floor.unwrap_or(cfg.chat_floor);
        if let Some(l) = &self.lexicon {
            if let Some(a) = &l.aliases {
                cfg.lexicon.aliases.extend(a.clone());
            }
            if let Some(c) = &l.negation_cues {
                cfg.lexicon.negation_cues = c.clone();
            }
            if let Some(k) = &l.intent_keywords {
                cfg.lexicon.intent_keywords.extend(k.clone());
            }
            if let Some(w) = &l.negation_window {
                let d = cfg.lexicon.negation_window;
                cfg.lexicon.negation_window = NegationWindow {
                    tokens: w.tokens.unwrap_or(d.tokens),
                    chars: w.chars.unwrap_or(d.chars),
                };
            }
        }
        if let Some(t) = &self.templates {
            for (k, v) in t {
                cfg.templates.templates.insert(k.clone(), v.clone().into_vec());
            }
        }
        if let Some(s) = &self.list_separator {
            cfg.templates.list_separator = s.clone();
        }
        if let Some(s) = &self.final_separator {
            cfg.templates.final_separator = s.clone();
        }
        cfg
    }

    /// Resolves and validates without a graph (ranges and templates only).
    pub fn build(&self) -> Result<BotConfig, ConfigError> {
        let cfg = self.resolve();
        let findings = validate_config(&cfg);
        if findings.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError::Invalid(findings))
        }
    }

    /// Resolves and validates, including alias targets against `graph`.
    pub fn build_for(&self, graph: &KnowledgeGraph) -> Result<BotConfig, ConfigError> {
        let cfg = self.resolve();
        let mut findings = validate_config(&cfg);
        findings.extend(validate_aliases(&cfg, graph));
        if findings.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError::Invalid(findings))
        }
    }
}

/// Range and template checks on a resolved config.
pub fn validate_config(cfg: &BotConfig) -> Vec<ConfigFinding> {
    let mut findings = Vec::new();
    let mut check = |field: &str, value: f64, ok: bool, allowed: &str| {
        if !ok || !value.is_finite() {
            findings.push(ConfigFinding::OutOfRange {
                field: field.to_string(),
                value,
                allowed: allowed.to_string(),
            });
        }
    };
    let unit = |v: f64| (0.0..=1.0).contains(&v);
    check(
        "preferences.query",
        cfg.preferences.query,
        unit(cfg.preferences.query),
        "[0, 1]",
    );
    check(
        "preferences.recommend",
        cfg.preferences.recommend,
        unit(cfg.preferences.recommend),
        "[0, 1]",
    );
    check(
        "preferences.chat",
        cfg.preferences.chat,
        unit(cfg.preferences.chat),
        "[0, 1]",
    );
    check(
        "negation_penalty",
        cfg.negation_penalty,
        cfg.negation_penalty >= 0.0,
        ">= 0",
    );
    check(
        "matching_threshold",
        cfg.matching_threshold,
        unit(cfg.matching_threshold),
        "[0, 1]",
    );
    check(
        "neighborhood_weight",
        cfg.neighborhood_weight,
        cfg.neighborhood_weight >= 0.0,
        ">= 0",
    );
    check("top_k", cfg.top_k as f64, cfg.top_k >= 1, ">= 1");
    check("chat_floor", cfg.chat_floor, cfg.chat_floor > 0.0, "> 0");
    findings.extend(
        validate_templates(&cfg.templates)
            .findings
            .into_iter()
            .map(ConfigFinding::Template),
    );
    findings
}

pub fn validate_aliases(cfg: &BotConfig, graph: &KnowledgeGraph) -> Vec<ConfigFinding> {
    cfg.lexicon
        .aliases
        .iter()
        .filter(|(_, target)| graph.lookup_node(target).is_none())
        .map(|(alias, target)| ConfigFinding::UnresolvedAlias {
            alias: alias.clone(),
            target: target.clone(),
        })
        .collect()
}

impl From<LexiconError> for ConfigFinding {
    fn from(e: LexiconError) -> Self {
        match e {
            LexiconError::UnresolvedAlias { alias, target } => ConfigFinding::UnresolvedAlias { alias, target },
        }
    }
}

/// Compiles the query parser for a validated config.
pub fn compile_parser(cfg: &BotConfig, graph: &KnowledgeGraph) -> Result<QueryParser, ConfigError> {
    QueryParser::new(graph, &cfg.lexicon).map_err(|e| ConfigError::Invalid(vec![e.into()]))
}
