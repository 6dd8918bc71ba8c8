//! In-memory property graph over the unified edge set: retrieval queries
//! used by clinical inference, record-file import/export, and a Cypher
//! import-script exporter.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::consensus::{Edge, QualityTier};
use crate::error::{Error, Result};
use crate::normalize::{EntityType, NormalizedEntity, ResolverKind};
use crate::pairconfig::{DiseasePairConfig, Predicate};
use crate::temporal::{self, Precision, TemporalAnchor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Index key: the CUI when known, otherwise the folded name.
    pub key: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cui: Option<String>,
    pub label: EntityType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub short_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mondo_id: Option<String>,
}

pub fn node_key(name: &str, cui: Option<&str>) -> String {
    match cui {
        Some(c) => c.to_lowercase(),
        None => name.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" "),
    }
}

impl Node {
    pub fn from_entity(e: &NormalizedEntity) -> Self {
        Node {
            key: node_key(&e.surface, e.cui.as_deref()),
            name: e.surface.clone(),
            cui: e.cui.clone(),
            label: e.type_label,
            short_name: None,
            mondo_id: None,
        }
    }
}

/// Structural totals used by the reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    /// Resolved temporal anchors.
    pub temporal_anchors: usize,
    pub gold_edges: usize,
    pub unique_pmids: usize,
}

impl GraphStats {
    pub fn add(&mut self, other: &GraphStats) {
        self.nodes += other.nodes;
        self.edges += other.edges;
        self.temporal_anchors += other.temporal_anchors;
        self.gold_edges += other.gold_edges;
        self.unique_pmids += other.unique_pmids;
    }
}

/// Immutable-after-import property graph with secondary indexes by
/// disease context, predicate and temporality.
#[derive(Debug, Default)]
pub struct Graph {
    nodes: BTreeMap<String, Node>,
    edges: Vec<Edge>,
    by_context: HashMap<String, Vec<usize>>,
    by_predicate: HashMap<String, Vec<usize>>,
    temporal_idx: Vec<usize>,
    incident: HashMap<String, Vec<usize>>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn insert_node(&mut self, node: Node) {
        self.nodes.entry(node.key.clone()).or_insert(node);
    }

    /// Insert a validated edge, creating endpoint nodes when absent so the
    /// endpoint invariant holds by construction.
    pub fn insert_edge(&mut self, edge: Edge) -> Result<()> {
        edge.validate()?;
        let idx = self.edges.len();
        self.insert_node(Node::from_entity(&edge.subject));
        self.insert_node(Node::from_entity(&edge.object));
        for context in &edge.disease_context {
            self.by_context.entry(context.clone()).or_default().push(idx);
        }
        self.by_predicate
            .entry(edge.predicate.clone())
            .or_default()
            .push(idx);
        if edge.is_temporal {
            self.temporal_idx.push(idx);
        }
        let skey = node_key(&edge.subject.surface, edge.subject.cui.as_deref());
        let tkey = node_key(&edge.object.surface, edge.object.cui.as_deref());
        self.incident.entry(skey).or_default().push(idx);
        if let Some(list) = self.incident.get(&tkey) {
            if list.last() != Some(&idx) {
                self.incident.entry(tkey).or_default().push(idx);
            }
        } else {
            self.incident.entry(tkey).or_default().push(idx);
        }
        self.edges.push(edge);
        Ok(())
    }

    pub fn from_edges(edges: Vec<Edge>) -> Result<Self> {
        let mut graph = Graph::new();
        for edge in edges {
            graph.insert_edge(edge)?;
        }
        Ok(graph)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn stats(&self) -> GraphStats {
        let mut pmids = BTreeSet::new();
        for e in &self.edges {
            pmids.extend(e.pmid_list.iter().cloned());
        }
        GraphStats {
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            temporal_anchors: self
                .edges
                .iter()
                .filter(|e| e.anchor.as_ref().is_some_and(|a| a.is_resolved()))
                .count(),
            gold_edges: self
                .edges
                .iter()
                .filter(|e| e.quality_tier == QualityTier::Gold)
                .count(),
            unique_pmids: pmids.len(),
        }
    }

    fn differential_predicates() -> Vec<&'static str> {
        Predicate::ALL
            .iter()
            .filter(|p| p.is_differential())
            .map(|p| p.name())
            .collect()
    }

    fn sort_tier_then_id(mut edges: Vec<&Edge>) -> Vec<&Edge> {
        edges.sort_by(|a, b| {
            a.quality_tier
                .rank()
                .cmp(&b.quality_tier.rank())
                .then(a.edge_id.cmp(&b.edge_id))
        });
        edges
    }

    fn require_disease<'c>(
        cfg: &'c DiseasePairConfig,
        disease: &str,
    ) -> Result<&'c crate::pairconfig::DiseaseSpec> {
        cfg.disease(disease).ok_or_else(|| {
            Error::InvalidInput(format!(
                "disease `{disease}` is not part of pair `{}`",
                cfg.pair_id
            ))
        })
    }

    /// Differential-diagnosis retrieval. Merges three strategies and
    /// deduplicates by edge id:
    ///   A. disease-context filter over the differential predicates,
    ///   B. disease anchor node by CUI or case-insensitive full name,
    ///   C. LACKS_FEATURE edges in the disease context.
    /// Ordered GOLD < SILVER < BRONZE, ties by edge id.
    pub fn query_comparative(
        &self,
        disease: &str,
        cfg: &DiseasePairConfig,
    ) -> Result<Vec<&Edge>> {
        let spec = Self::require_disease(cfg, disease)?;
        let differential = Self::differential_predicates();
        let mut seen = BTreeSet::new();
        let mut result: Vec<&Edge> = Vec::new();

        // Strategy A: context filter over differential predicates.
        if let Some(idxs) = self.by_context.get(&spec.short_name) {
            for &i in idxs {
                let e = &self.edges[i];
                if differential.contains(&e.predicate.as_str()) && seen.insert(&e.edge_id) {
                    result.push(e);
                }
            }
        }
        // Strategy B: disease anchor node.
        for e in &self.edges {
            let subject_is_anchor = e.subject.type_label == EntityType::Disease
                && (e
                    .subject
                    .cui
                    .as_deref()
                    .is_some_and(|c| spec.cuis.iter().any(|sc| sc.eq_ignore_ascii_case(c)))
                    || e.subject.surface.eq_ignore_ascii_case(&spec.full_name));
            if subject_is_anchor
                && differential.contains(&e.predicate.as_str())
                && seen.insert(&e.edge_id)
            {
                result.push(e);
            }
        }
        // Strategy C: explicit absences in context.
        if let Some(idxs) = self.by_context.get(&spec.short_name) {
            for &i in idxs {
                let e = &self.edges[i];
                if e.predicate == "LACKS_FEATURE" && seen.insert(&e.edge_id) {
                    result.push(e);
                }
            }
        }
        Ok(Self::sort_tier_then_id(result))
    }

    /// Temporal-trajectory retrieval: resolved temporal edges in the
    /// disease context, ascending by month index, ties by edge id.
    pub fn query_temporal(&self, disease: &str, cfg: &DiseasePairConfig) -> Result<Vec<&Edge>> {
        let spec = Self::require_disease(cfg, disease)?;
        let mut result: Vec<&Edge> = self
            .temporal_idx
            .iter()
            .map(|&i| &self.edges[i])
            .filter(|e| {
                e.disease_context.contains(&spec.short_name)
                    && e.anchor.as_ref().is_some_and(|a| a.is_resolved())
            })
            .collect();
        result.sort_by(|a, b| {
            let ia = temporal::time_index(a.anchor.as_ref().unwrap()).unwrap_or(u32::MAX);
            let ib = temporal::time_index(b.anchor.as_ref().unwrap()).unwrap_or(u32::MAX);
            ia.cmp(&ib).then(a.edge_id.cmp(&b.edge_id))
        });
        Ok(result)
    }

    /// Treatment-evidence retrieval: treatment predicates in context,
    /// tier-ordered.
    pub fn query_treatment(&self, disease: &str, cfg: &DiseasePairConfig) -> Result<Vec<&Edge>> {
        let spec = Self::require_disease(cfg, disease)?;
        let result: Vec<&Edge> = self
            .edges
            .iter()
            .filter(|e| {
                e.disease_context.contains(&spec.short_name)
                    && (e.predicate == "TREATED_WITH" || e.predicate == "RESPONDS_TO")
            })
            .collect();
        Ok(Self::sort_tier_then_id(result))
    }

    /// Entity-neighbourhood fallback: undirected incident edges for nodes
    /// matching the CUI exactly or the name as a case-insensitive
    /// substring. An exact CUI hit takes precedence over name matches.
    /// Results are edge-id ordered and capped at `limit` (default 30).
    pub fn query_neighbourhood(
        &self,
        entity: &str,
        limit: Option<usize>,
        context: Option<&str>,
    ) -> Vec<&Edge> {
        let limit = limit.unwrap_or(30);
        let folded = entity.to_lowercase();
        let cui_nodes: Vec<&Node> = self
            .nodes
            .values()
            .filter(|n| n.cui.as_deref().is_some_and(|c| c.eq_ignore_ascii_case(entity)))
            .collect();
        let nodes: Vec<&Node> = if cui_nodes.is_empty() {
            self.nodes
                .values()
                .filter(|n| n.name.to_lowercase().contains(&folded))
                .collect()
        } else {
            cui_nodes
        };
        let mut seen = BTreeSet::new();
        let mut result: Vec<&Edge> = Vec::new();
        for node in nodes {
            if let Some(idxs) = self.incident.get(&node.key) {
                for &i in idxs {
                    let e = &self.edges[i];
                    if let Some(ctx) = context {
                        if !e.disease_context.contains(ctx) {
                            continue;
                        }
                    }
                    if seen.insert(&e.edge_id) {
                        result.push(e);
                    }
                }
            }
        }
        result.sort_by(|a, b| a.edge_id.cmp(&b.edge_id));
        result.truncate(limit);
        result
    }
}

/// One record per edge carrying every graph-database property plus the
/// fields needed for lossless re-import. Field order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub source_name: String,
    pub source_labels: Vec<String>,
    pub relation: String,
    pub target_name: String,
    pub target_labels: Vec<String>,
    pub quality_tier: String,
    pub consensus_score: f64,
    pub source_models: Vec<String>,
    pub pmid_list: Vec<String>,
    pub evidence_sample: String,
    pub edge_id: String,
    pub is_temporal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal_value_display: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_index_months: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal_midpoint_years: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal_parse_status: Option<String>,
    pub cross_tier_confirmed: bool,
    pub evidence_breadth: usize,
    pub disease_context: Vec<String>,
    pub is_protected: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_cui: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_cui: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal_precision: Option<String>,
}

fn precision_label(p: Precision) -> &'static str {
    match p {
        Precision::Exact => "Exact",
        Precision::Range => "Range",
        Precision::Fuzzy => "Fuzzy",
        Precision::Stage => "Stage",
    }
}

fn precision_parse(s: &str) -> Option<Precision> {
    match s {
        "Exact" => Some(Precision::Exact),
        "Range" => Some(Precision::Range),
        "Fuzzy" => Some(Precision::Fuzzy),
        "Stage" => Some(Precision::Stage),
        _ => None,
    }
}

impl EdgeRecord {
    pub fn from_edge(e: &Edge) -> Self {
        let (display, index, midpoint, status, precision) = match &e.anchor {
            Some(a) if a.is_resolved() => (
                Some(a.display()),
                temporal::time_index(a).ok(),
                temporal::midpoint_years(a).ok(),
                Some("resolved".to_string()),
                a.precision.map(precision_label).map(String::from),
            ),
            Some(_) => (None, None, None, Some("unresolved".to_string()), None),
            None => (None, None, None, None, None),
        };
        EdgeRecord {
            source_name: e.subject.surface.clone(),
            source_labels: vec![e.subject.type_label.label().to_string()],
            relation: e.predicate.clone(),
            target_name: e.object.surface.clone(),
            target_labels: vec![e.object.type_label.label().to_string()],
            quality_tier: e.quality_tier.label().to_string(),
            consensus_score: e.consensus_score,
            source_models: e.source_models.iter().cloned().collect(),
            pmid_list: e.pmid_list.iter().cloned().collect(),
            evidence_sample: e.evidence_sample.clone(),
            edge_id: e.edge_id.clone(),
            is_temporal: e.is_temporal,
            temporal_value_display: display,
            time_index_months: index,
            temporal_midpoint_years: midpoint,
            temporal_parse_status: status,
            cross_tier_confirmed: e.cross_tier_confirmed,
            evidence_breadth: e.evidence_breadth,
            disease_context: e.disease_context.iter().cloned().collect(),
            is_protected: e.is_protected,
            source_cui: e.subject.cui.clone(),
            target_cui: e.object.cui.clone(),
            temporal_precision: precision,
        }
    }

    pub fn into_edge(self) -> Result<Edge> {
        let tier = QualityTier::parse(&self.quality_tier).ok_or_else(|| {
            Error::Parse(format!("unknown quality tier `{}`", self.quality_tier))
        })?;
        let anchor = match self.temporal_parse_status.as_deref() {
            Some("resolved") => {
                let display = self.temporal_value_display.as_deref().ok_or_else(|| {
                    Error::Parse(format!("edge {}: resolved anchor without display", self.edge_id))
                })?;
                let (start, end) = match display.split_once('-') {
                    Some((s, e)) => (s.parse()?, e.parse()?),
                    None => {
                        let d: crate::temporal::IsoDuration = display.parse()?;
                        (d, d)
                    }
                };
                let precision = self
                    .temporal_precision
                    .as_deref()
                    .and_then(precision_parse)
                    .unwrap_or(if start == end { Precision::Exact } else { Precision::Range });
                Some(TemporalAnchor::resolved(start, end, precision))
            }
            Some("unresolved") => Some(TemporalAnchor::unresolved()),
            _ => None,
        };
        let subject = NormalizedEntity {
            surface: self.source_name,
            cui: self.source_cui,
            type_label: EntityType::parse(self.source_labels.first().map(String::as_str).unwrap_or("Entity")),
            resolver_used: ResolverKind::None,
        };
        let object = NormalizedEntity {
            surface: self.target_name,
            cui: self.target_cui,
            type_label: EntityType::parse(self.target_labels.first().map(String::as_str).unwrap_or("Entity")),
            resolver_used: ResolverKind::None,
        };
        let edge = Edge {
            edge_id: self.edge_id,
            subject,
            predicate: self.relation,
            object,
            quality_tier: tier,
            consensus_score: self.consensus_score,
            source_models: self.source_models.into_iter().collect(),
            pmid_list: self.pmid_list.into_iter().collect(),
            evidence_sample: self.evidence_sample,
            is_temporal: self.is_temporal,
            anchor,
            cross_tier_confirmed: self.cross_tier_confirmed,
            evidence_breadth: self.evidence_breadth,
            disease_context: self.disease_context.into_iter().collect(),
            is_protected: self.is_protected,
        };
        edge.validate()?;
        Ok(edge)
    }
}

/// Write the edge set as one JSON record per line, edge order preserved.
pub fn write_edge_records(edges: &[Edge], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for e in edges {
        out.push_str(&serde_json::to_string(&EdgeRecord::from_edge(e))?);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_edge_records(path: impl AsRef<Path>) -> Result<Vec<Edge>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut edges = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let record: EdgeRecord = serde_json::from_str(line)?;
        edges.push(record.into_edge()?);
    }
    Ok(edges)
}

pub fn write_node_records(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for node in graph.nodes() {
        out.push_str(&serde_json::to_string(node)?);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_node_records(path: impl AsRef<Path>) -> Result<Vec<Node>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut nodes = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        nodes.push(serde_json::from_str(line)?);
    }
    Ok(nodes)
}

/// Import a graph from node + edge record files. Node records come first
/// so standalone nodes survive; edges re-create any missing endpoints.
pub fn import_graph(nodes_path: impl AsRef<Path>, edges_path: impl AsRef<Path>) -> Result<Graph> {
    let mut graph = Graph::new();
    for node in read_node_records(nodes_path)? {
        graph.insert_node(node);
    }
    for edge in read_edge_records(edges_path)? {
        graph.insert_edge(edge)?;
    }
    Ok(graph)
}

fn cypher_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\'', "\\'")
}

fn cypher_list(items: &BTreeSet<String>) -> String {
    let inner: Vec<String> = items.iter().map(|i| format!("'{}'", cypher_escape(i))).collect();
    format!("[{}]", inner.join(", "))
}

/// Emit a Cypher import script recreating every node and edge with its
/// properties. Deterministic: nodes by key, edges by edge id; re-export
/// of an unchanged graph is byte-identical.
pub fn export_import_script(graph: &Graph) -> String {
    let stats = graph.stats();
    let mut out = String::new();
    let _ = writeln!(out, "// Property-graph import script");
    let _ = writeln!(
        out,
        "// nodes: {} | edges: {} | resolved temporal anchors: {}",
        stats.nodes, stats.edges, stats.temporal_anchors
    );
    let _ = writeln!(out, "CREATE CONSTRAINT node_key IF NOT EXISTS FOR (n:Entity) REQUIRE n.key IS UNIQUE;");
    for node in graph.nodes() {
        let mut props = format!(
            "key: '{}', name: '{}'",
            cypher_escape(&node.key),
            cypher_escape(&node.name)
        );
        if let Some(cui) = &node.cui {
            let _ = write!(props, ", cui: '{}'", cypher_escape(cui));
        }
        if let Some(short) = &node.short_name {
            let _ = write!(props, ", short_name: '{}'", cypher_escape(short));
        }
        if let Some(mondo) = &node.mondo_id {
            let _ = write!(props, ", mondo_id: '{}'", cypher_escape(mondo));
        }
        let _ = writeln!(out, "MERGE (n:{}:Entity {{{}}});", node.label.label(), props);
    }
    let mut edges: Vec<&Edge> = graph.edges().iter().collect();
    edges.sort_by(|a, b| a.edge_id.cmp(&b.edge_id));
    for e in edges {
        let record = EdgeRecord::from_edge(e);
        let mut props = format!(
            "edge_id: '{}', quality_tier: '{}', consensus_score: {}, source_models: {}, \
             pmid_list: {}, evidence_sample: '{}', is_temporal: {}, cross_tier_confirmed: {}, \
             evidence_breadth: {}, disease_context: {}, is_protected: {}",
            e.edge_id,
            e.quality_tier.label(),
            e.consensus_score,
            cypher_list(&e.source_models),
            cypher_list(&e.pmid_list),
            cypher_escape(&e.evidence_sample),
            e.is_temporal,
            e.cross_tier_confirmed,
            e.evidence_breadth,
            cypher_list(&e.disease_context),
            e.is_protected,
        );
        if let Some(display) = &record.temporal_value_display {
            let _ = write!(props, ", temporal_value_display: '{display}'");
        }
        if let Some(index) = record.time_index_months {
            let _ = write!(props, ", time_index_months: {index}");
        }
        if let Some(midpoint) = record.temporal_midpoint_years {
            let _ = write!(props, ", temporal_midpoint_years: {midpoint}");
        }
        if let Some(status) = &record.temporal_parse_status {
            let _ = write!(props, ", temporal_parse_status: '{status}'");
        }
        let skey = node_key(&e.subject.surface, e.subject.cui.as_deref());
        let tkey = node_key(&e.object.surface, e.object.cui.as_deref());
        let _ = writeln!(
            out,
            "MATCH (s:Entity {{key: '{}'}}), (t:Entity {{key: '{}'}}) CREATE (s)-[:{} {{{}}}]->(t);",
            cypher_escape(&skey),
            cypher_escape(&tkey),
            e.predicate,
            props
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::ResolverKind;
    use std::collections::BTreeSet;

    fn ent(surface: &str, cui: Option<&str>, label: EntityType) -> NormalizedEntity {
        NormalizedEntity {
            surface: surface.into(),
            cui: cui.map(String::from),
            type_label: label,
            resolver_used: ResolverKind::None,
        }
    }

    fn edge(
        id_hint: &str,
        subject: NormalizedEntity,
        predicate: &str,
        object: NormalizedEntity,
        tier: QualityTier,
        context: &[&str],
        anchor: Option<TemporalAnchor>,
    ) -> Edge {
        Edge {
            edge_id: format!("{:0>32}", id_hint),
            subject,
            predicate: predicate.into(),
            object,
            quality_tier: tier,
            consensus_score: tier.consensus_score(),
            source_models: BTreeSet::from(["model-a".to_string()]),
            pmid_list: BTreeSet::from(["111111".to_string()]),
            evidence_sample: "sample quote".into(),
            is_temporal: anchor.is_some(),
            anchor,
            cross_tier_confirmed: false,
            evidence_breadth: 1,
            disease_context: context.iter().map(|s| s.to_string()).collect(),
            is_protected: false,
        }
    }

    fn cfg() -> DiseasePairConfig {
        crate::pairconfig::load_config(
            r#"
disease_pair: dmd_bmd
classification:
  diseases:
    - short_name: DMD
      full_name: Duchenne muscular dystrophy
      cuis: [C0013264]
      text_patterns: [duchenne, dmd]
    - short_name: BMD
      full_name: Becker muscular dystrophy
      cuis: [C0917713]
      text_patterns: [becker, bmd]
relevance_keywords: [duchenne, becker]
"#,
        )
        .unwrap()
    }

    fn anchor_years(a: u32, b: u32) -> TemporalAnchor {
        TemporalAnchor::resolved(
            crate::temporal::IsoDuration::from_years(a),
            crate::temporal::IsoDuration::from_years(b),
            if a == b { Precision::Exact } else { Precision::Range },
        )
    }

    fn sample_graph() -> Graph {
        let disease = ent("Duchenne muscular dystrophy", Some("C0013264"), EntityType::Disease);
        let mut edges = vec![
            edge("1", disease.clone(), "MANIFESTS_AS", ent("proximal weakness", None, EntityType::Symptom), QualityTier::Bronze, &["DMD"], None),
            edge("2", disease.clone(), "TREATED_WITH", ent("prednisone", None, EntityType::Treatment), QualityTier::Gold, &["DMD"], None),
            edge("3", ent("gowers sign", None, EntityType::ClinicalFinding), "HAS_ONSET_AGE", ent("presentation", None, EntityType::ClinicalFinding), QualityTier::Bronze, &["DMD"], Some(anchor_years(3, 5))),
            edge("4", ent("ambulation loss", None, EntityType::ClinicalFinding), "HAS_ONSET_AGE", ent("progression", None, EntityType::ClinicalFinding), QualityTier::Bronze, &["DMD"], Some(anchor_years(9, 13))),
            edge("5", ent("cardiomyopathy", None, EntityType::ClinicalFinding), "DEVELOPS_COMPLICATION_AT", ent("adolescence stage", None, EntityType::ClinicalFinding), QualityTier::Silver, &["DMD"], Some(anchor_years(13, 13))),
            edge("6", disease.clone(), "LACKS_FEATURE", ent("sensory loss", None, EntityType::Symptom), QualityTier::Bronze, &["DMD"], None),
            edge("7", ent("Becker muscular dystrophy", Some("C0917713"), EntityType::Disease), "MANIFESTS_AS", ent("milder weakness", None, EntityType::Symptom), QualityTier::Bronze, &["BMD"], None),
        ];
        // An unresolved temporal edge: excluded from temporal retrieval.
        let mut unresolved = edge(
            "8",
            ent("respiratory decline", None, EntityType::ClinicalFinding),
            "HAS_DURATION",
            ent("later course", None, EntityType::ClinicalFinding),
            QualityTier::Bronze,
            &["DMD"],
            Some(TemporalAnchor::unresolved()),
        );
        unresolved.is_temporal = true;
        edges.push(unresolved);
        Graph::from_edges(edges).unwrap()
    }

    #[test]
    fn comparative_orders_gold_first() {
        let g = sample_graph();
        let result = g.query_comparative("DMD", &cfg()).unwrap();
        assert!(!result.is_empty());
        assert_eq!(result[0].quality_tier, QualityTier::Gold);
        for pair in result.windows(2) {
            assert!(
                pair[0].quality_tier.rank() < pair[1].quality_tier.rank()
                    || (pair[0].quality_tier == pair[1].quality_tier
                        && pair[0].edge_id < pair[1].edge_id)
            );
        }
    }

    #[test]
    fn comparative_deduplicates_strategies() {
        // Edge 1 is reachable via Strategy A (context) and B (anchor node).
        let g = sample_graph();
        let result = g.query_comparative("DMD", &cfg()).unwrap();
        let ids: Vec<&str> = result.iter().map(|e| e.edge_id.as_str()).collect();
        let mut deduped = ids.clone();
        deduped.dedup();
        assert_eq!(ids.len(), deduped.len());
        assert!(ids.contains(&"00000000000000000000000000000001"));
        // LACKS_FEATURE arrives via Strategy C.
        assert!(ids.contains(&"00000000000000000000000000000006"));
    }

    #[test]
    fn comparative_unknown_disease_errors() {
        let g = sample_graph();
        assert!(g.query_comparative("ALS", &cfg()).is_err());
    }

    #[test]
    fn comparative_empty_for_no_edges() {
        let g = Graph::new();
        assert!(g.query_comparative("DMD", &cfg()).unwrap().is_empty());
    }

    #[test]
    fn temporal_ordering_by_month_index() {
        let g = sample_graph();
        let result = g.query_temporal("DMD", &cfg()).unwrap();
        let indices: Vec<u32> = result
            .iter()
            .map(|e| temporal::time_index(e.anchor.as_ref().unwrap()).unwrap())
            .collect();
        // Anchors P3Y-P5Y, P9Y-P13Y, P13Y resolve to 48, 132, 156.
        assert_eq!(indices, vec![48, 132, 156]);
    }

    #[test]
    fn temporal_excludes_unresolved() {
        let g = sample_graph();
        let result = g.query_temporal("DMD", &cfg()).unwrap();
        assert!(result.iter().all(|e| e.anchor.as_ref().unwrap().is_resolved()));
        assert!(!result.iter().any(|e| e.edge_id.ends_with('8')));
        assert!(g.query_temporal("BMD", &cfg()).unwrap().is_empty());
    }

    #[test]
    fn treatment_filter_and_order() {
        let g = sample_graph();
        let result = g.query_treatment("DMD", &cfg()).unwrap();
        assert_eq!(result.len(), 1);
        assert_eq!(result[0].predicate, "TREATED_WITH");
        assert!(result.iter().all(|e| e.predicate != "MANIFESTS_AS"));
    }

    #[test]
    fn neighbourhood_caps_at_limit() {
        let disease = ent("Duchenne muscular dystrophy", Some("C0013264"), EntityType::Disease);
        let mut edges = Vec::new();
        for i in 0..35 {
            edges.push(edge(
                &format!("{i}"),
                disease.clone(),
                "ASSOCIATED_WITH",
                ent(&format!("finding {i}"), None, EntityType::ClinicalFinding),
                QualityTier::Bronze,
                &["DMD"],
                None,
            ));
        }
        let g = Graph::from_edges(edges).unwrap();
        assert_eq!(g.query_neighbourhood("C0013264", None, None).len(), 30);
        assert_eq!(g.query_neighbourhood("C0013264", Some(10), None).len(), 10);
    }

    #[test]
    fn neighbourhood_unknown_entity_empty() {
        let g = sample_graph();
        assert!(g.query_neighbourhood("no such thing", None, None).is_empty());
    }

    #[test]
    fn neighbourhood_cui_precedence() {
        let g = sample_graph();
        let by_cui = g.query_neighbourhood("C0013264", None, None);
        // Precedence oracle: the exact-CUI result set is a subset of the
        // union of CUI and name matches.
        let by_name = g.query_neighbourhood("duchenne", None, None);
        let union: BTreeSet<&str> = by_cui
            .iter()
            .chain(by_name.iter())
            .map(|e| e.edge_id.as_str())
            .collect();
        for e in &by_cui {
            assert!(union.contains(e.edge_id.as_str()));
        }
        assert!(!by_cui.is_empty());
    }

    #[test]
    fn stats_and_endpoint_invariant() {
        let g = sample_graph();
        let stats = g.stats();
        assert_eq!(stats.edges, 8);
        assert_eq!(stats.temporal_anchors, 3);
        assert_eq!(stats.gold_edges, 1);
        for e in g.edges() {
            let skey = node_key(&e.subject.surface, e.subject.cui.as_deref());
            let tkey = node_key(&e.object.surface, e.object.cui.as_deref());
            assert!(g.nodes.contains_key(&skey));
            assert!(g.nodes.contains_key(&tkey));
        }
    }

    #[test]
    fn edge_records_round_trip() {
        let g = sample_graph();
        let dir = tempfile::tempdir().unwrap();
        let edges_path = dir.path().join("edges.jsonl");
        let nodes_path = dir.path().join("nodes.jsonl");
        write_edge_records(g.edges(), &edges_path).unwrap();
        write_node_records(&g, &nodes_path).unwrap();
        let reimported = import_graph(&nodes_path, &edges_path).unwrap();
        assert_eq!(reimported.stats(), g.stats());
        assert_eq!(reimported.edges().len(), g.edges().len());
        for (a, b) in g.edges().iter().zip(reimported.edges()) {
            assert_eq!(a.edge_id, b.edge_id);
            assert_eq!(a.anchor, b.anchor);
            assert_eq!(a.pmid_list, b.pmid_list);
        }
    }

    #[test]
    fn export_script_deterministic_and_complete() {
        let g = sample_graph();
        let script = export_import_script(&g);
        assert_eq!(script, export_import_script(&g), "re-export must be byte-identical");
        assert!(script.contains("MERGE (n:Disease:Entity"));
        assert!(script.contains("CREATE (s)-[:TREATED_WITH"));
        assert!(script.contains("quality_tier: 'GOLD'"));
        assert!(script.contains("temporal_value_display: 'P3Y-P5Y'"));

        let empty = export_import_script(&Graph::new());
        let lines: Vec<&str> = empty.lines().collect();
        assert!(lines.len() <= 3, "empty graph exports a header-only script");
        assert!(lines[0].starts_with("//"));
    }

    #[test]
    fn golden_snapshot_one_node_one_edge() {
        let subject = ent("dmd", Some("C0013264"), EntityType::Disease);
        let object = ent("prednisone", None, EntityType::Treatment);
        let e = edge("a", subject, "TREATED_WITH", object, QualityTier::Gold, &["DMD"], None);
        let g = Graph::from_edges(vec![e]).unwrap();
        let script = export_import_script(&g);
        // Golden snapshot pinned on first verified run.
        let expected = "// Property-graph import script\n\
             // nodes: 2 | edges: 1 | resolved temporal anchors: 0\n\
             CREATE CONSTRAINT node_key IF NOT EXISTS FOR (n:Entity) REQUIRE n.key IS UNIQUE;\n\
             MERGE (n:Disease:Entity {key: 'c0013264', name: 'dmd', cui: 'C0013264'});\n\
             MERGE (n:Treatment:Entity {key: 'prednisone', name: 'prednisone'});\n\
             MATCH (s:Entity {key: 'c0013264'}), (t:Entity {key: 'prednisone'}) CREATE (s)-[:TREATED_WITH {edge_id: '0000000000000000000000000000000a', quality_tier: 'GOLD', consensus_score: 0.95, source_models: ['model-a'], pmid_list: ['111111'], evidence_sample: 'sample quote', is_temporal: false, cross_tier_confirmed: false, evidence_breadth: 1, disease_context: ['DMD'], is_protected: false}]->(t);\n";
        assert_eq!(script, expected);
    }
}
