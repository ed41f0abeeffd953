//! The simplified knowledge graph: typed nodes joined by labeled edges,
//! loaded from a five-column tab-separated data file.
//!
//! Each data line names one connection:
//!
//! ```text
//! Catch Me If You Can<TAB>Entity<TAB>Tom Hanks<TAB>Attribute<TAB>Actor
//! ```
//!
//! Nodes are identified by `(normalized name, kind)`. The graph is immutable
//! once loaded and every query on it is read-only, so one instance can be
//! shared behind an `Arc` by any number of sessions.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::normalize;

/// Default cap on the number of nodes returned by [`KnowledgeGraph::subgraph_focus`].
pub const DEFAULT_FOCUS_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    Entity,
    Attribute,
    Generic,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Entity => "Entity",
            NodeKind::Attribute => "Attribute",
            NodeKind::Generic => "Generic",
        }
    }

    /// Lookup preference when one name exists with several kinds.
    fn preference(self) -> u8 {
        match self {
            NodeKind::Entity => 0,
            NodeKind::Attribute => 1,
            NodeKind::Generic => 2,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown node kind {0:?} (expected Entity, Attribute or Generic)")]
pub struct UnknownKind(pub String);

impl FromStr for NodeKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "entity" => Ok(NodeKind::Entity),
            "attribute" => Ok(NodeKind::Attribute),
            "generic" => Ok(NodeKind::Generic),
            _ => Err(UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
    pub norm_name: String,
}

/// One connection from the data file. Traversal treats it as undirected;
/// `head`/`tail` keep the file order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub head: NodeId,
    pub tail: NodeId,
    pub relation: String,
}

#[derive(Debug, Error)]
pub enum KgError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("data file contains no connections")]
    EmptyGraph,
    #[error("line {line}: both sides name the same node")]
    SelfLoop { line: usize },
    #[error("node {node:?} is {found}, expected {expected}")]
    KindMismatch {
        node: String,
        expected: NodeKind,
        found: NodeKind,
    },
    #[error("no node with id {0}")]
    UnknownNode(NodeId),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl KgError {
    /// Machine-readable code used in service error documents.
    pub fn code(&self) -> &'static str {
        match self {
            KgError::MalformedLine { .. } => "MalformedLine",
            KgError::EmptyGraph => "EmptyGraph",
            KgError::SelfLoop { .. } => "SelfLoop",
            KgError::KindMismatch { .. } => "KindMismatch",
            KgError::UnknownNode(_) => "UnknownNode",
            KgError::Io(_) => "Io",
        }
    }
}

/// Counts reported by the loader.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadStats {
    pub nodes: usize,
    pub entities: usize,
    pub attributes: usize,
    pub generics: usize,
    pub edges: usize,
    pub duplicate_lines: usize,
    pub ignored_lines: usize,
}

/// Node listing plus induced edges, as handed to the graph view.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FocusGraph {
    pub nodes: Vec<FocusNode>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocusNode {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
    /// Node was one of the seeds (a mention or an act node).
    pub highlighted: bool,
}

#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    by_key: HashMap<(String, NodeKind), NodeId>,
    by_name: HashMap<String, NodeId>,
    neighbors: Vec<Vec<NodeId>>,
    entity_attrs: Vec<BTreeMap<String, Vec<NodeId>>>,
    attr_entities: Vec<Vec<NodeId>>,
    attribute_types: BTreeSet<String>,
    relations: BTreeSet<String>,
    stats: LoadStats,
}

impl KnowledgeGraph {
    /// Reads a whole data file from `source`.
    pub fn load<R: Read>(mut source: R) -> Result<Self, KgError> {
        let mut buf = Vec::new();
        source.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }

    pub fn from_tsv(text: &str) -> Result<Self, KgError> {
        Self::from_bytes(text.as_bytes())
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, KgError> {
        let data = data.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(data);
        let mut builder = Builder::default();
        for (idx, raw) in data.split(|&b| b == b'\n').enumerate() {
            let line_no = idx + 1;
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            let line = std::str::from_utf8(raw).map_err(|_| KgError::MalformedLine {
                line: line_no,
                reason: "invalid UTF-8".into(),
            })?;
            if line.trim().is_empty() || line.starts_with('#') {
                builder.ignored += 1;
                continue;
            }
            builder.add_line(line_no, line)?;
        }
        builder.finish()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.index())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.index() < self.nodes.len()
    }

    /// Display name, or an empty string for a foreign id.
    pub fn name(&self, id: NodeId) -> &str {
        self.node(id).map(|n| n.name.as_str()).unwrap_or("")
    }

    pub fn stats(&self) -> LoadStats {
        self.stats
    }

    pub fn entities(&self) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Entity)
    }

    pub fn entity_count(&self) -> usize {
        self.stats.entities
    }

    /// Relation labels that occur on Entity–Attribute edges.
    pub fn attribute_types(&self) -> &BTreeSet<String> {
        &self.attribute_types
    }

    /// Every relation label in the file.
    pub fn relations(&self) -> &BTreeSet<String> {
        &self.relations
    }

    pub fn find(&self, name: &str, kind: NodeKind) -> Option<&Node> {
        self.by_key
            .get(&(normalize(name), kind))
            .map(|id| &self.nodes[id.index()])
    }

    /// Node whose normalized name equals `normalize(text)`, preferring
    /// Entity over Attribute over Generic.
    pub fn lookup_node(&self, text: &str) -> Option<&Node> {
        self.lookup_normalized(&normalize(text))
    }

    pub(crate) fn lookup_normalized(&self, norm: &str) -> Option<&Node> {
        self.by_name.get(norm).map(|id| &self.nodes[id.index()])
    }

    /// Distinct adjacent nodes of any kind, in id order.
    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        self.neighbors.get(id.index()).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    fn expect_kind(&self, id: NodeId, kind: NodeKind) -> Result<&Node, KgError> {
        let node = self.node(id).ok_or(KgError::UnknownNode(id))?;
        if node.kind != kind {
            return Err(KgError::KindMismatch {
                node: node.name.clone(),
                expected: kind,
                found: node.kind,
            });
        }
        Ok(node)
    }

    /// Entities sharing an edge with the attribute `attr`, in id order.
    pub fn entities_with_attribute(&self, attr: NodeId) -> Result<&[NodeId], KgError> {
        self.expect_kind(attr, NodeKind::Attribute)?;
        Ok(&self.attr_entities[attr.index()])
    }

    /// Attribute neighbours of `entity` grouped by edge relation.
    pub fn attributes_of_entity(&self, entity: NodeId) -> Result<&BTreeMap<String, Vec<NodeId>>, KgError> {
        self.expect_kind(entity, NodeKind::Entity)?;
        Ok(&self.entity_attrs[entity.index()])
    }

    /// Attribute neighbours of `entity`, flattened and deduplicated, in id order.
    pub(crate) fn attribute_set(&self, entity: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .neighbors(entity)
            .iter()
            .copied()
            .filter(|n| self.nodes[n.index()].kind == NodeKind::Attribute)
            .collect();
        out.dedup();
        out
    }

    /// Induced subgraph of every node within `radius` hops (capped at 2) of
    /// `seeds`, truncated to `limit` nodes. Seeds are kept first, then the
    /// highest-degree nodes, then name order.
    pub fn subgraph_focus(&self, seeds: &[NodeId], radius: u8, limit: usize) -> FocusGraph {
        let radius = radius.min(2);
        let mut dist: HashMap<NodeId, u8> = HashMap::new();
        let mut queue = VecDeque::new();
        for &s in seeds {
            if self.contains(s) && !dist.contains_key(&s) {
                dist.insert(s, 0);
                queue.push_back(s);
            }
        }
        while let Some(n) = queue.pop_front() {
            let d = dist[&n];
            if d == radius {
                continue;
            }
            for &m in self.neighbors(n) {
                if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(m) {
                    slot.insert(d + 1);
                    queue.push_back(m);
                }
            }
        }

        let mut picked: Vec<NodeId> = dist.keys().copied().collect();
        picked.sort_by(|a, b| {
            let (na, nb) = (&self.nodes[a.index()], &self.nodes[b.index()]);
            (dist[b] == 0)
                .cmp(&(dist[a] == 0))
                .then_with(|| self.neighbors(*b).len().cmp(&self.neighbors(*a).len()))
                .then_with(|| na.norm_name.cmp(&nb.norm_name))
                .then_with(|| a.cmp(b))
        });
        picked.truncate(limit);

        let keep: BTreeSet<NodeId> = picked.iter().copied().collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| keep.contains(&e.head) && keep.contains(&e.tail))
            .cloned()
            .collect();
        let nodes = picked
            .into_iter()
            .map(|id| {
                let n = &self.nodes[id.index()];
                FocusNode {
                    id,
                    name: n.name.clone(),
                    kind: n.kind,
                    highlighted: dist[&id] == 0,
                }
            })
            .collect();
        FocusGraph { nodes, edges }
    }

    /// Serializes back to the five-column data format, one edge per line in
    /// load order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let (h, t) = (&self.nodes[e.head.index()], &self.nodes[e.tail.index()]);
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                h.name, h.kind, t.name, t.kind, e.relation
            ));
        }
        out
    }
}

#[derive(Default)]
struct Builder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    by_key: HashMap<(String, NodeKind), NodeId>,
    seen_edges: std::collections::HashSet<Edge>,
    duplicates: usize,
    ignored: usize,
}

impl Builder {
    fn add_line(&mut self, line_no: usize, line: &str) -> Result<(), KgError> {
        let malformed = |reason: String| KgError::MalformedLine { line: line_no, reason };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(malformed(format!(
                "expected 5 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let parse_kind = |s: &str| s.parse::<NodeKind>().map_err(|e| malformed(e.to_string()));
        let head_kind = parse_kind(fields[1])?;
        let tail_kind = parse_kind(fields[3])?;
        let relation = fields[4].trim();
        if relation.is_empty() {
            return Err(malformed("empty relation label".into()));
        }
        let head = self
            .intern(fields[0], head_kind)
            .ok_or_else(|| malformed("empty node name".into()))?;
        let tail = self
            .intern(fields[2], tail_kind)
            .ok_or_else(|| malformed("empty node name".into()))?;
        if head == tail {
            return Err(KgError::SelfLoop { line: line_no });
        }
        let edge = Edge {
            head,
            tail,
            relation: relation.to_string(),
        };
        if self.seen_edges.insert(edge.clone()) {
            self.edges.push(edge);
        } else {
            self.duplicates += 1;
        }
        Ok(())
    }

    fn intern(&mut self, name: &str, kind: NodeKind) -> Option<NodeId> {
        let name = name.trim();
        let norm = normalize(name);
        if norm.is_empty() {
            return None;
        }
        let key = (norm, kind);
        if let Some(&id) = self.by_key.get(&key) {
            return Some(id);
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            id,
            name: name.to_string(),
            kind,
            norm_name: key.0.clone(),
        });
        self.by_key.insert(key, id);
        Some(id)
    }

    fn finish(self) -> Result<KnowledgeGraph, KgError> {
        if self.edges.is_empty() {
            return Err(KgError::EmptyGraph);
        }
        let n = self.nodes.len();
        let mut neighbors = vec![Vec::new(); n];
        let mut entity_attrs = vec![BTreeMap::<String, Vec<NodeId>>::new(); n];
        let mut attr_entities = vec![Vec::new(); n];
        let mut attribute_types = BTreeSet::new();
        let mut relations = BTreeSet::new();

        for e in &self.edges {
            neighbors[e.head.index()].push(e.tail);
            neighbors[e.tail.index()].push(e.head);
            relations.insert(e.relation.clone());
            let (hk, tk) = (self.nodes[e.head.index()].kind, self.nodes[e.tail.index()].kind);
            let pair = match (hk, tk) {
                (NodeKind::Entity, NodeKind::Attribute) => Some((e.head, e.tail)),
                (NodeKind::Attribute, NodeKind::Entity) => Some((e.tail, e.head)),
                _ => None,
            };
            if let Some((ent, attr)) = pair {
                entity_attrs[ent.index()]
                    .entry(e.relation.clone())
                    .or_default()
                    .push(attr);
                attr_entities[attr.index()].push(ent);
                attribute_types.insert(e.relation.clone());
            }
        }
        for list in neighbors.iter_mut().chain(attr_entities.iter_mut()) {
            list.sort();
            list.dedup();
        }
        for groups in entity_attrs.iter_mut() {
            for list in groups.values_mut() {
                list.sort();
                list.dedup();
            }
        }

        let mut by_name: HashMap<String, NodeId> = HashMap::new();
        for node in &self.nodes {
            by_name
                .entry(node.norm_name.clone())
                .and_modify(|cur| {
                    if node.kind.preference() < self.nodes[cur.index()].kind.preference() {
                        *cur = node.id;
                    }
                })
                .or_insert(node.id);
        }

        let count = |k: NodeKind| self.nodes.iter().filter(|n| n.kind == k).count();
        let stats = LoadStats {
            nodes: n,
            entities: count(NodeKind::Entity),
            attributes: count(NodeKind::Attribute),
            generics: count(NodeKind::Generic),
            edges: self.edges.len(),
            duplicate_lines: self.duplicates,
            ignored_lines: self.ignored,
        };
        Ok(KnowledgeGraph {
            nodes: self.nodes,
            edges: self.edges,
            by_key: self.by_key,
            by_name,
            neighbors,
            entity_attrs,
            attr_entities,
            attribute_types,
            relations,
            stats,
        })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const KG3: &str = "\
Inception\tEntity\tNolan\tAttribute\tDirector
Inception\tEntity\tSciFi\tAttribute\tGenre
Interstellar\tEntity\tNolan\tAttribute\tDirector
Interstellar\tEntity\tSciFi\tAttribute\tGenre
Titanic\tEntity\tCameron\tAttribute\tDirector
Titanic\tEntity\tRomance\tAttribute\tGenre
";

    pub(crate) fn kg3() -> KnowledgeGraph {
        KnowledgeGraph::from_tsv(KG3).unwrap()
    }

    fn id(g: &KnowledgeGraph, name: &str) -> NodeId {
        g.lookup_node(name).unwrap().id
    }

    #[test]
    fn footnote_line() {
        let g = KnowledgeGraph::from_tsv("Catch Me If You Can\tEntity\tTom Hanks\tAttribute\tActor").unwrap();
        let s = g.stats();
        assert_eq!((s.nodes, s.entities, s.attributes, s.edges), (2, 1, 1, 1));
        assert_eq!(g.edges()[0].relation, "Actor");
        let hanks = g.lookup_node("tom hanks").unwrap();
        assert_eq!((hanks.name.as_str(), hanks.kind), ("Tom Hanks", NodeKind::Attribute));
        assert!(g.lookup_node("unknown text").is_none());
    }

    #[test]
    fn empty_and_comment_only_inputs() {
        assert!(matches!(KnowledgeGraph::from_tsv(""), Err(KgError::EmptyGraph)));
        assert!(matches!(
            KnowledgeGraph::from_tsv("# header\n\n  \n"),
            Err(KgError::EmptyGraph)
        ));
    }

    #[test]
    fn duplicate_line_is_counted_once() {
        let line = "Catch Me If You Can\tEntity\tTom Hanks\tAttribute\tActor\n";
        let g = KnowledgeGraph::from_tsv(&line.repeat(2)).unwrap();
        assert_eq!(g.stats().nodes, 2);
        assert_eq!(g.stats().edges, 1);
        assert_eq!(g.stats().duplicate_lines, 1);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let err = KnowledgeGraph::from_tsv("a\tEntity\tb\tAttribute\tR\nx\tThing\ty\tAttribute\tR\n").unwrap_err();
        assert!(matches!(err, KgError::MalformedLine { line: 2, .. }), "{err}");
        let err = KnowledgeGraph::from_tsv("a\tEntity\tb\tAttribute").unwrap_err();
        assert!(matches!(err, KgError::MalformedLine { line: 1, .. }));
        let err = KnowledgeGraph::from_tsv("a\tEntity\t  \tAttribute\tR").unwrap_err();
        assert!(matches!(err, KgError::MalformedLine { line: 1, .. }));
        let err = KnowledgeGraph::from_tsv("a\tEntity\tb\tAttribute\t ").unwrap_err();
        assert!(matches!(err, KgError::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn self_loop_after_normalization() {
        let err = KnowledgeGraph::from_tsv("# c\nNolan\tAttribute\t NOLAN \tattribute\tSame").unwrap_err();
        assert!(matches!(err, KgError::SelfLoop { line: 2 }));
    }

    #[test]
    fn crlf_bom_and_case_insensitive_kinds() {
        let g = KnowledgeGraph::from_tsv("\u{feff}A\tENTITY\tB\tattribute\tR\r\n").unwrap();
        assert_eq!(g.nodes()[0].name, "A");
        assert_eq!(g.nodes()[1].kind, NodeKind::Attribute);
        assert_eq!(g.to_tsv(), "A\tEntity\tB\tAttribute\tR\n");
    }

    #[test]
    fn lookup_prefers_entity() {
        let g =
            KnowledgeGraph::from_tsv("Alien\tAttribute\tX\tEntity\tTag\nAlien\tEntity\tY\tAttribute\tTag\n").unwrap();
        let n = g.lookup_node("ALIEN").unwrap();
        assert_eq!(n.kind, NodeKind::Entity);
        assert_eq!(g.find("alien", NodeKind::Attribute).unwrap().kind, NodeKind::Attribute);
    }

    #[test]
    fn kg3_adjacency() {
        let g = kg3();
        let nolan = id(&g, "Nolan");
        let ents: Vec<&str> = g
            .entities_with_attribute(nolan)
            .unwrap()
            .iter()
            .map(|&e| g.name(e))
            .collect();
        assert_eq!(ents, ["Inception", "Interstellar"]);

        let attrs = g.attributes_of_entity(id(&g, "Titanic")).unwrap();
        assert_eq!(attrs.len(), 2);
        assert_eq!(g.name(attrs["Director"][0]), "Cameron");
        assert_eq!(g.name(attrs["Genre"][0]), "Romance");

        let attrs = g.attributes_of_entity(id(&g, "Inception")).unwrap();
        assert_eq!(g.name(attrs["Director"][0]), "Nolan");
        assert_eq!(g.name(attrs["Genre"][0]), "SciFi");

        assert!(matches!(
            g.entities_with_attribute(id(&g, "Inception")),
            Err(KgError::KindMismatch { .. })
        ));
        assert!(matches!(
            g.attributes_of_entity(nolan),
            Err(KgError::KindMismatch { .. })
        ));
        let types: Vec<&str> = g.attribute_types().iter().map(String::as_str).collect();
        assert_eq!(types, ["Director", "Genre"]);
    }

    #[test]
    fn isolated_attribute_and_bare_entity() {
        // attribute linked only to a generic node, entity linked only to a generic node
        let g =
            KnowledgeGraph::from_tsv("Lonely\tAttribute\tTopic\tGeneric\tAbout\nSolo\tEntity\tTopic\tGeneric\tAbout\n")
                .unwrap();
        assert!(g.entities_with_attribute(id(&g, "Lonely")).unwrap().is_empty());
        assert!(g.attributes_of_entity(id(&g, "Solo")).unwrap().is_empty());
        assert!(g.attribute_types().is_empty());
    }

    #[test]
    fn focus_subgraphs() {
        let g = kg3();
        let nolan = id(&g, "Nolan");
        let f = g.subgraph_focus(&[nolan], 1, DEFAULT_FOCUS_LIMIT);
        let mut names: Vec<&str> = f.nodes.iter().map(|n| n.name.as_str()).collect();
        names.sort();
        assert_eq!(names, ["Inception", "Interstellar", "Nolan"]);
        assert_eq!(f.edges.len(), 2);
        assert_eq!(f.nodes[0].name, "Nolan");
        assert!(f.nodes[0].highlighted && !f.nodes[1].highlighted);

        let inception = id(&g, "Inception");
        let f = g.subgraph_focus(&[nolan, inception], 0, DEFAULT_FOCUS_LIMIT);
        assert_eq!(f.nodes.len(), 2);
        assert_eq!(f.edges.len(), 1);

        let f = g.subgraph_focus(&[], 2, DEFAULT_FOCUS_LIMIT);
        assert!(f.nodes.is_empty() && f.edges.is_empty());

        // radius 2 from Nolan reaches SciFi through both films
        let f = g.subgraph_focus(&[nolan], 2, 4);
        assert_eq!(f.nodes.len(), 4);
        assert_eq!(f.nodes[0].name, "Nolan");
    }

    #[test]
    fn focus_truncation_keeps_seed_then_degree() {
        let g = kg3();
        let f = g.subgraph_focus(&[id(&g, "Nolan")], 1, 2);
        let names: Vec<&str> = f.nodes.iter().map(|n| n.name.as_str()).collect();
        // both films have degree 2; name order breaks the tie
        assert_eq!(names, ["Nolan", "Inception"]);
        assert_eq!(f.edges.len(), 1);
    }
}
