//! Query understanding: turns one user utterance into a [`SemanticFrame`],
//! a user intent plus polarity-tagged mentions of graph nodes.
//!
//! Matching runs over the normalized utterance with a character trie, so
//! unsegmented scripts need no tokenizer. In space-segmented scripts a match
//! may not start or end inside a word. Mention spans are character offsets
//! into [`SemanticFrame::normalized`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::{KnowledgeGraph, NodeId, NodeKind};
use crate::text::{normalize, on_word_boundary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserIntent {
    Provide,
    Negate,
    RequestRecommendation,
    AcceptRecommendation,
    RejectRecommendation,
    Chitchat,
}

impl fmt::Display for UserIntent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            UserIntent::Provide => "Provide",
            UserIntent::Negate => "Negate",
            UserIntent::RequestRecommendation => "RequestRecommendation",
            UserIntent::AcceptRecommendation => "AcceptRecommendation",
            UserIntent::RejectRecommendation => "RejectRecommendation",
            UserIntent::Chitchat => "Chitchat",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Polarity {
    Positive,
    Negative,
}

impl From<Polarity> for i8 {
    fn from(p: Polarity) -> i8 {
        match p {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }
}

impl TryFrom<i8> for Polarity {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Polarity::Positive),
            -1 => Ok(Polarity::Negative),
            _ => Err(format!("polarity must be 1 or -1, got {v}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub node: NodeId,
    pub name: String,
    pub kind: NodeKind,
    pub polarity: Polarity,
    /// Half-open character range in the normalized utterance.
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticFrame {
    pub user_intent: UserIntent,
    pub mentions: Vec<Mention>,
    pub raw: String,
    pub normalized: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegationWindow {
    /// Used when the utterance contains whitespace: the cue must be among
    /// this many words immediately before the mention.
    pub tokens: usize,
    /// Used for utterances without whitespace: at most this many characters
    /// between cue and mention.
    pub chars: usize,
}

impl Default for NegationWindow {
    fn default() -> Self {
        NegationWindow { tokens: 3, chars: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Lexicon {
    /// Alias surface form to node name.
    pub aliases: BTreeMap<String, String>,
    pub negation_cues: Vec<String>,
    pub intent_keywords: BTreeMap<UserIntent, Vec<String>>,
    pub negation_window: NegationWindow,
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl Default for Lexicon {
    fn default() -> Self {
        let mut intent_keywords = BTreeMap::new();
        intent_keywords.insert(
            UserIntent::RequestRecommendation,
            strings(&[
                "recommend",
                "recommendation",
                "recommendations",
                "suggest",
                "suggestion",
                "what should i",
                "推荐",
                "建议",
            ]),
        );
        intent_keywords.insert(
            UserIntent::AcceptRecommendation,
            strings(&[
                "yes",
                "sure",
                "sounds good",
                "i'll take it",
                "i will take it",
                "好的",
                "就这个",
            ]),
        );
        intent_keywords.insert(
            UserIntent::RejectRecommendation,
            strings(&[
                "no thanks",
                "not interested",
                "something else",
                "another one",
                "seen it",
                "换一个",
                "不感兴趣",
            ]),
        );
        Lexicon {
            aliases: BTreeMap::new(),
            negation_cues: strings(&["not", "don't", "no", "dislike", "hate", "不", "没", "别", "不要"]),
            intent_keywords,
            negation_window: NegationWindow::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("alias {alias:?} points to {target:?}, which is not a node in the graph")]
    UnresolvedAlias { alias: String, target: String },
}

#[derive(Default, Debug, Clone)]
struct TrieNode {
    next: HashMap<char, usize>,
    /// (target node, matched through an alias)
    term: Option<(NodeId, bool)>,
}

/// A lexicon compiled against one graph.
#[derive(Debug, Clone)]
pub struct QueryParser {
    trie: Vec<TrieNode>,
    cues: Vec<Vec<char>>,
    keywords: Vec<(UserIntent, Vec<Vec<char>>)>,
    window: NegationWindow,
}

fn to_chars(s: &str) -> Vec<char> {
    normalize(s).chars().collect()
}

impl QueryParser {
    pub fn new(graph: &KnowledgeGraph, lexicon: &Lexicon) -> Result<Self, LexiconError> {
        let mut parser = QueryParser {
            trie: vec![TrieNode::default()],
            cues: lexicon
                .negation_cues
                .iter()
                .map(|c| to_chars(c))
                .filter(|c| !c.is_empty())
                .collect(),
            keywords: lexicon
                .intent_keywords
                .iter()
                .map(|(intent, words)| {
                    let words = words.iter().map(|w| to_chars(w)).filter(|w| !w.is_empty()).collect();
                    (*intent, words)
                })
                .collect(),
            window: lexicon.negation_window,
        };
        for node in graph.nodes() {
            if let Some(preferred) = graph.lookup_normalized(&node.norm_name) {
                if preferred.id == node.id {
                    parser.insert(&node.norm_name, node.id, false);
                }
            }
        }
        for (alias, target) in &lexicon.aliases {
            let node = graph.lookup_node(target).ok_or_else(|| LexiconError::UnresolvedAlias {
                alias: alias.clone(),
                target: target.clone(),
            })?;
            let norm = normalize(alias);
            if !norm.is_empty() {
                parser.insert(&norm, node.id, true);
            }
        }
        Ok(parser)
    }

    fn insert(&mut self, pattern: &str, node: NodeId, alias: bool) {
        let mut cur = 0;
        for c in pattern.chars() {
            cur = match self.trie[cur].next.get(&c) {
                Some(&n) => n,
                None => {
                    self.trie.push(TrieNode::default());
                    let n = self.trie.len() - 1;
                    self.trie[cur].next.insert(c, n);
                    n
                }
            };
        }
        let slot = &mut self.trie[cur].term;
        // an alias wins over a node name with the same surface form
        if alias || slot.is_none() {
            *slot = Some((node, alias));
        }
    }

    /// Longest boundary-respecting match starting at `start`.
    fn longest_at(&self, chars: &[char], start: usize) -> Option<(usize, NodeId)> {
        let mut cur = 0;
        let mut best = None;
        for (i, c) in chars[start..].iter().enumerate() {
            match self.trie[cur].next.get(c) {
                Some(&n) => cur = n,
                None => break,
            }
            if let Some((node, _)) = self.trie[cur].term {
                let end = start + i + 1;
                if on_word_boundary(chars, start, end) {
                    best = Some((end, node));
                }
            }
        }
        best
    }

    /// Greedy left-to-right longest match against node names and aliases.
    /// Every mention starts out positive.
    pub fn match_mentions(&self, utterance: &str, graph: &KnowledgeGraph) -> Vec<Mention> {
        let chars = to_chars(utterance);
        self.match_chars(&chars, graph)
    }

    fn match_chars(&self, chars: &[char], graph: &KnowledgeGraph) -> Vec<Mention> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            match self.longest_at(chars, i) {
                Some((end, node)) => {
                    let n = graph.node(node).expect("trie targets come from the graph");
                    out.push(Mention {
                        node,
                        name: n.name.clone(),
                        kind: n.kind,
                        polarity: Polarity::Positive,
                        span: (i, end),
                    });
                    i = end;
                }
                None => i += 1,
            }
        }
        out
    }

    /// Flips a mention to negative when a negation cue sits inside the
    /// window before it and after the previous mention.
    pub fn detect_negation(&self, utterance: &str, mentions: &[Mention]) -> Vec<Mention> {
        let chars = to_chars(utterance);
        self.negate_chars(&chars, mentions)
    }

    fn negate_chars(&self, chars: &[char], mentions: &[Mention]) -> Vec<Mention> {
        let cues = find_all(chars, &self.cues);
        let segmented = chars.iter().any(|c| c.is_whitespace());
        let mut prev_end = 0;
        mentions
            .iter()
            .map(|m| {
                let mut m = m.clone();
                let (start, _) = m.span;
                let negated = cues
                    .iter()
                    .any(|&(cs, ce)| cs >= prev_end && ce <= start && self.within_window(chars, ce, start, segmented));
                if negated {
                    m.polarity = Polarity::Negative;
                }
                prev_end = prev_end.max(m.span.1);
                m
            })
            .collect()
    }

    fn within_window(&self, chars: &[char], cue_end: usize, start: usize, segmented: bool) -> bool {
        if segmented {
            let gap: String = chars[cue_end..start].iter().collect();
            let words = gap
                .split_whitespace()
                .filter(|w| w.chars().any(|c| c.is_alphanumeric()))
                .count();
            words < self.window.tokens
        } else {
            start - cue_end <= self.window.chars
        }
    }

    pub fn classify_user_intent(&self, utterance: &str, mentions: &[Mention]) -> UserIntent {
        let chars = to_chars(utterance);
        self.classify_chars(&chars, mentions)
    }

    fn classify_chars(&self, chars: &[char], mentions: &[Mention]) -> UserIntent {
        let has_keyword = |intent: UserIntent| {
            self.keywords
                .iter()
                .filter(|(i, _)| *i == intent)
                .any(|(_, words)| !find_all(chars, words).is_empty())
        };
        for intent in [
            UserIntent::RequestRecommendation,
            UserIntent::AcceptRecommendation,
            UserIntent::RejectRecommendation,
        ] {
            if has_keyword(intent) {
                return intent;
            }
        }
        let any_positive = mentions.iter().any(|m| m.polarity == Polarity::Positive);
        let all_negative = !mentions.is_empty() && !any_positive;
        let bare_cue = mentions.is_empty() && !find_all(chars, &self.cues).is_empty();
        if all_negative || bare_cue || has_keyword(UserIntent::Negate) {
            return UserIntent::Negate;
        }
        if any_positive || has_keyword(UserIntent::Provide) {
            return UserIntent::Provide;
        }
        UserIntent::Chitchat
    }

    pub fn parse(&self, utterance: &str, graph: &KnowledgeGraph) -> SemanticFrame {
        let normalized = normalize(utterance);
        let chars: Vec<char> = normalized.chars().collect();
        let mentions = self.match_chars(&chars, graph);
        let mentions = self.negate_chars(&chars, &mentions);
        let user_intent = self.classify_chars(&chars, &mentions);
        SemanticFrame {
            user_intent,
            mentions,
            raw: utterance.to_string(),
            normalized,
        }
    }
}

/// Boundary-respecting occurrences of any pattern, as (start, end) pairs.
fn find_all(chars: &[char], patterns: &[Vec<char>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for p in patterns {
        if p.len() > chars.len() {
            continue;
        }
        for start in 0..=chars.len() - p.len() {
            let end = start + p.len();
            if chars[start..end] == p[..] && on_word_boundary(chars, start, end) {
                out.push((start, end));
            }
        }
    }
    out.sort_unstable();
    out
}

/// One-shot convenience over [`QueryParser::parse`].
pub fn parse_utterance(
    utterance: &str,
    graph: &KnowledgeGraph,
    lexicon: &Lexicon,
) -> Result<SemanticFrame, LexiconError> {
    Ok(QueryParser::new(graph, lexicon)?.parse(utterance, graph))
}
