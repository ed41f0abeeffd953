//! Template-based response generation.
//!
//! Templates are keyed `<intent>.<relation>` with `_` as the per-intent
//! fallback, e.g. `query.Director`, `query._`, `recommend._`, `chat._`.
//! Four placeholders are understood:
//!
//! | placeholder        | Query              | Recommend                     | Chat        |
//! |--------------------|--------------------|-------------------------------|-------------|
//! | `{attribute_type}` | asked type         | empty                         | empty       |
//! | `{attributes}`     | example values     | empty                         | topic node  |
//! | `{entities}`       | empty              | recommended entity names      | empty       |
//! | `{explanation}`    | empty              | `matched: ` + matched attrs   | empty       |

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::act::{ActNode, DialogueAct};
use crate::policy::BotIntent;

pub const PLACEHOLDERS: [&str; 4] = ["attributes", "entities", "attribute_type", "explanation"];

const FALLBACK: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemplateSet {
    pub templates: BTreeMap<String, Vec<String>>,
    pub list_separator: String,
    /// Separator before the last item of a list.
    pub final_separator: String,
}

impl Default for TemplateSet {
    fn default() -> Self {
        let mut templates = BTreeMap::new();
        let mut put = |k: &str, v: &[&str]| {
            templates.insert(k.to_string(), v.iter().map(|s| s.to_string()).collect());
        };
        put(
            "query._",
            &[
                "Which {attribute_type} do you like? E.g. {attributes}",
                "Any preference for {attribute_type}? For example {attributes}",
            ],
        );
        put("recommend._", &["How about {entities}? {explanation}"]);
        put("chat._", &["I see. Tell me more about what you like."]);
        TemplateSet {
            templates,
            list_separator: ", ".into(),
            final_separator: ", ".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "finding")]
pub enum TemplateFinding {
    UnknownPlaceholder {
        key: String,
        template: String,
        placeholder: String,
    },
    UnbalancedBrace {
        key: String,
        template: String,
    },
    UnknownKey {
        key: String,
    },
    EmptyTemplateList {
        key: String,
    },
    MissingFallback {
        intent: BotIntent,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<TemplateFinding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NlgError {
    #[error("no template for {0} and no fallback")]
    TemplateNotFound(BotIntent),
}

#[derive(Debug, PartialEq, Eq)]
enum Segment<'a> {
    Text(&'a str),
    Slot(&'a str),
}

#[derive(Debug, PartialEq, Eq)]
enum SegmentError<'a> {
    Unknown(&'a str),
    Unbalanced,
}

fn segments(template: &str) -> Result<Vec<Segment<'_>>, SegmentError<'_>> {
    let mut out = Vec::new();
    let mut rest = template;
    while !rest.is_empty() {
        match rest.find(['{', '}']) {
            None => {
                out.push(Segment::Text(rest));
                break;
            }
            Some(i) => {
                if rest.as_bytes()[i] == b'}' {
                    return Err(SegmentError::Unbalanced);
                }
                if i > 0 {
                    out.push(Segment::Text(&rest[..i]));
                }
                let after = &rest[i + 1..];
                let close = after.find('}').ok_or(SegmentError::Unbalanced)?;
                let name = &after[..close];
                if name.contains('{') {
                    return Err(SegmentError::Unbalanced);
                }
                if !PLACEHOLDERS.contains(&name) {
                    return Err(SegmentError::Unknown(name));
                }
                out.push(Segment::Slot(name));
                rest = &after[close + 1..];
            }
        }
    }
    Ok(out)
}

fn parse_key(key: &str) -> Option<(BotIntent, Option<&str>)> {
    let (intent, rel) = key.split_once('.')?;
    let intent = BotIntent::from_key(intent)?;
    match rel {
        "" => None,
        FALLBACK => Some((intent, None)),
        r => Some((intent, Some(r))),
    }
}

pub fn validate_templates(ts: &TemplateSet) -> ValidationReport {
    let mut findings = Vec::new();
    for (key, list) in &ts.templates {
        if parse_key(key).is_none() {
            findings.push(TemplateFinding::UnknownKey { key: key.clone() });
            continue;
        }
        if list.is_empty() {
            findings.push(TemplateFinding::EmptyTemplateList { key: key.clone() });
        }
        for t in list {
            match segments(t) {
                Ok(_) => {}
                Err(SegmentError::Unknown(p)) => findings.push(TemplateFinding::UnknownPlaceholder {
                    key: key.clone(),
                    template: t.clone(),
                    placeholder: p.to_string(),
                }),
                Err(SegmentError::Unbalanced) => findings.push(TemplateFinding::UnbalancedBrace {
                    key: key.clone(),
                    template: t.clone(),
                }),
            }
        }
    }
    for intent in BotIntent::ALL {
        let key = format!("{}.{FALLBACK}", intent.key());
        if !ts.templates.get(&key).is_some_and(|l| !l.is_empty()) {
            findings.push(TemplateFinding::MissingFallback { intent });
        }
    }
    ValidationReport { findings }
}

impl TemplateSet {
    fn join(&self, names: &[&str]) -> String {
        match names {
            [] => String::new(),
            [one] => one.to_string(),
            [init @ .., last] => format!("{}{}{}", init.join(&self.list_separator), self.final_separator, last),
        }
    }

    fn join_nodes(&self, nodes: &[ActNode]) -> String {
        let names: Vec<&str> = nodes.iter().map(|n| n.name.as_str()).collect();
        self.join(&names)
    }

    fn candidates(&self, intent: BotIntent, relation: Option<&str>) -> Option<&[String]> {
        let specific = relation.and_then(|r| self.templates.get(&format!("{}.{r}", intent.key())));
        specific
            .filter(|l| !l.is_empty())
            .or_else(|| {
                self.templates
                    .get(&format!("{}.{FALLBACK}", intent.key()))
                    .filter(|l| !l.is_empty())
            })
            .map(Vec::as_slice)
    }
}

fn slot_values(act: &DialogueAct, ts: &TemplateSet) -> BTreeMap<&'static str, String> {
    let mut v: BTreeMap<&'static str, String> = PLACEHOLDERS.iter().map(|p| (*p, String::new())).collect();
    match act {
        DialogueAct::Query {
            attribute_type,
            examples,
        } => {
            v.insert("attribute_type", attribute_type.clone());
            v.insert("attributes", ts.join_nodes(examples));
        }
        DialogueAct::Recommend { items } => {
            let entities: Vec<ActNode> = items.iter().map(|i| i.entity.clone()).collect();
            v.insert("entities", ts.join_nodes(&entities));
            let mut matched: Vec<ActNode> = Vec::new();
            for n in items.iter().flat_map(|i| &i.explanation) {
                if !matched.iter().any(|m| m.id == n.id) {
                    matched.push(n.clone());
                }
            }
            if !matched.is_empty() {
                v.insert("explanation", format!("matched: {}", ts.join_nodes(&matched)));
            }
        }
        DialogueAct::Chat { topic } => {
            if let Some(t) = topic {
                v.insert("attributes", t.name.clone());
            }
        }
    }
    v
}

/// Renders `act` with the most specific template; `selector` picks among
/// variants deterministically.
pub fn render_response(act: &DialogueAct, ts: &TemplateSet, selector: u64) -> Result<String, NlgError> {
    let intent = act.intent();
    let relation = match act {
        DialogueAct::Query { attribute_type, .. } => Some(attribute_type.as_str()),
        _ => None,
    };
    let list = ts
        .candidates(intent, relation)
        .ok_or(NlgError::TemplateNotFound(intent))?;
    let template = &list[(selector % list.len() as u64) as usize];
    let values = slot_values(act, ts);

    let Ok(segs) = segments(template) else {
        // invalid templates are caught by validation; emit them verbatim
        return Ok(template.clone());
    };
    let mut out = String::new();
    let mut after_empty = false;
    for seg in segs {
        match seg {
            Segment::Text(t) => {
                let t = if after_empty && (out.is_empty() || out.ends_with(char::is_whitespace)) {
                    t.trim_start()
                } else {
                    t
                };
                out.push_str(t);
                after_empty = false;
            }
            Segment::Slot(name) => {
                let value = &values[name];
                if value.is_empty() {
                    after_empty = true;
                } else {
                    out.push_str(value);
                    after_empty = false;
                }
            }
        }
    }
    if after_empty {
        out.truncate(out.trim_end().len());
    }
    Ok(out)
}
