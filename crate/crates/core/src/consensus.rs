//! Consensus voting: dedup triplets into edges by normalized identity,
//! assign quality tiers, and merge literature edges with the protected
//! curated backbone.

use std::collections::{BTreeSet, HashMap};

use md5::{Digest, Md5};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{NormalizedEntity, NormalizedTriplet};
use crate::temporal::TemporalAnchor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum QualityTier {
    Gold,
    Silver,
    Bronze,
}

impl QualityTier {
    /// Tier-score bijection.
    pub fn consensus_score(&self) -> f64 {
        match self {
            QualityTier::Gold => 0.95,
            QualityTier::Silver => 0.85,
            QualityTier::Bronze => 0.70,
        }
    }

    /// Sort rank for retrieval ordering (GOLD first).
    pub fn rank(&self) -> u8 {
        match self {
            QualityTier::Gold => 0,
            QualityTier::Silver => 1,
            QualityTier::Bronze => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            QualityTier::Gold => "GOLD",
            QualityTier::Silver => "SILVER",
            QualityTier::Bronze => "BRONZE",
        }
    }

    pub fn parse(label: &str) -> Option<QualityTier> {
        match label.trim().to_ascii_uppercase().as_str() {
            "GOLD" => Some(QualityTier::Gold),
            "SILVER" => Some(QualityTier::Silver),
            "BRONZE" => Some(QualityTier::Bronze),
            _ => None,
        }
    }
}

/// Evidence-certainty cross-walk for the figure cards and reports.
pub fn map_tier_to_grade(tier: QualityTier) -> &'static str {
    match tier {
        QualityTier::Gold => "High",
        QualityTier::Silver => "Moderate",
        QualityTier::Bronze => "Low",
    }
}

/// A provenance-carrying graph relationship.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub edge_id: String,
    pub subject: NormalizedEntity,
    pub predicate: String,
    pub object: NormalizedEntity,
    pub quality_tier: QualityTier,
    pub consensus_score: f64,
    pub source_models: BTreeSet<String>,
    pub pmid_list: BTreeSet<String>,
    pub evidence_sample: String,
    pub is_temporal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<TemporalAnchor>,
    pub cross_tier_confirmed: bool,
    pub evidence_breadth: usize,
    pub disease_context: BTreeSet<String>,
    pub is_protected: bool,
}

impl Edge {
    pub fn validate(&self) -> Result<()> {
        let expected = self.quality_tier.consensus_score();
        if (self.consensus_score - expected).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "edge {}: score {} does not match tier {}",
                self.edge_id,
                self.consensus_score,
                self.quality_tier.label()
            )));
        }
        if self.is_protected && self.quality_tier != QualityTier::Gold {
            return Err(Error::InvalidInput(format!(
                "edge {}: protected edges must be GOLD",
                self.edge_id
            )));
        }
        if !self.is_protected && self.pmid_list.is_empty() {
            return Err(Error::InvalidInput(format!(
                "edge {}: literature edges need at least one PMID",
                self.edge_id
            )));
        }
        if self.evidence_breadth != self.pmid_list.len() {
            return Err(Error::InvalidInput(format!(
                "edge {}: evidence_breadth {} != |pmid_list| {}",
                self.edge_id,
                self.evidence_breadth,
                self.pmid_list.len()
            )));
        }
        if self.is_temporal && self.anchor.is_none() {
            return Err(Error::InvalidInput(format!(
                "edge {}: temporal edge without anchor",
                self.edge_id
            )));
        }
        Ok(())
    }
}

fn fold(text: &str) -> String {
    text.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Deduplication key: MD5 over the normalized "subject|predicate|object"
/// string. Entity identities (CUI when resolved, else surface) are
/// case-folded and whitespace-collapsed; predicates are canonical
/// uppercase tokens and pass through as written.
pub fn edge_key(subject: &NormalizedEntity, predicate: &str, object: &NormalizedEntity) -> String {
    let normalized = format!(
        "{}|{}|{}",
        fold(subject.identity()),
        predicate.trim(),
        fold(object.identity())
    );
    let mut hasher = Md5::new();
    hasher.update(normalized.as_bytes());
    format!("{:x}", hasher.finalize())
}

/// Group triplets by edge key, preserving first-seen key order.
pub fn group_by_key(triplets: &[NormalizedTriplet]) -> Vec<Vec<&NormalizedTriplet>> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<&NormalizedTriplet>> = HashMap::new();
    for t in triplets {
        let key = edge_key(&t.subject, &t.predicate, &t.object);
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(t);
    }
    order.into_iter().map(|k| groups.remove(&k).unwrap()).collect()
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MergeLog {
    /// Anchors discarded because the group carried conflicting intervals.
    pub discarded_anchors: Vec<(String, String)>,
}

/// Merge one key group into an edge: PMIDs and models are set unions, the
/// evidence sample comes from the lexicographically smallest PMID (the
/// members carry no per-triplet confidence, so the tie rule is the rule),
/// and the anchor comes from the resolved anchor with the widest support.
/// The tier is assigned afterwards by [`assign_tier`].
pub fn merge_group(group: &[&NormalizedTriplet]) -> Result<(Edge, MergeLog)> {
    let first = group
        .first()
        .ok_or_else(|| Error::InvalidInput("merge_group: empty group".into()))?;
    let key = edge_key(&first.subject, &first.predicate, &first.object);
    debug_assert!(
        group
            .iter()
            .all(|t| edge_key(&t.subject, &t.predicate, &t.object) == key),
        "merge_group members must share a key"
    );

    let mut log = MergeLog::default();
    let mut pmid_list = BTreeSet::new();
    let mut source_models = BTreeSet::new();
    // Disease context is classified per abstract and stamped by the
    // pipeline after merging.
    let disease_context = BTreeSet::new();
    for t in group {
        if !t.pmid.is_empty() {
            pmid_list.insert(t.pmid.clone());
        }
        if !t.source_model.is_empty() {
            source_models.insert(t.source_model.clone());
        }
    }

    let sample_member = group
        .iter()
        .min_by(|a, b| a.pmid.cmp(&b.pmid).then(a.evidence_quote.cmp(&b.evidence_quote)))
        .unwrap();

    // Anchor election: count support per resolved anchor, keep the widest;
    // ties fall to the smallest supporting pmid. Losers are logged.
    let mut anchor_support: Vec<(TemporalAnchor, usize, String)> = Vec::new();
    let mut any_anchor = false;
    for t in group {
        if let Some(anchor) = &t.anchor {
            any_anchor = true;
            if anchor.is_resolved() {
                match anchor_support.iter_mut().find(|(a, _, _)| a == anchor) {
                    Some((_, count, min_pmid)) => {
                        *count += 1;
                        if t.pmid < *min_pmid {
                            *min_pmid = t.pmid.clone();
                        }
                    }
                    None => anchor_support.push((anchor.clone(), 1, t.pmid.clone())),
                }
            }
        }
    }
    anchor_support.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    let anchor = if let Some((winner, _, _)) = anchor_support.first() {
        for (loser, _, pmid) in anchor_support.iter().skip(1) {
            log.discarded_anchors.push((loser.display(), pmid.clone()));
        }
        Some(winner.clone())
    } else if any_anchor {
        Some(TemporalAnchor::unresolved())
    } else {
        None
    };

    let evidence_breadth = pmid_list.len();
    let edge = Edge {
        edge_id: key,
        subject: first.subject.clone(),
        predicate: first.predicate.clone(),
        object: first.object.clone(),
        quality_tier: QualityTier::Bronze,
        consensus_score: QualityTier::Bronze.consensus_score(),
        source_models,
        pmid_list,
        evidence_sample: sample_member.evidence_quote.clone(),
        is_temporal: anchor.is_some(),
        anchor,
        cross_tier_confirmed: false,
        evidence_breadth,
        disease_context,
        is_protected: false,
    };
    Ok((edge, log))
}

/// Lookup over the curated backbone, keyed by edge identity.
pub struct Tier1Index {
    by_key: HashMap<String, String>,
}

impl Tier1Index {
    pub fn build(tier1: &[Edge]) -> Self {
        Tier1Index {
            by_key: tier1
                .iter()
                .map(|e| (e.edge_id.clone(), e.edge_id.clone()))
                .collect(),
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.by_key.contains_key(key)
    }
}

/// Tier assignment: GOLD with cross-tier confirmation when the key matches
/// a curated edge; SILVER on multi-model or multi-source agreement; BRONZE
/// otherwise. The consensus score follows the tier bijection.
pub fn assign_tier(mut edge: Edge, tier1: &Tier1Index) -> Edge {
    if tier1.contains(&edge.edge_id) {
        edge.quality_tier = QualityTier::Gold;
        edge.cross_tier_confirmed = true;
    } else if edge.source_models.len() >= 2 || edge.pmid_list.len() >= 2 {
        edge.quality_tier = QualityTier::Silver;
    } else {
        edge.quality_tier = QualityTier::Bronze;
    }
    edge.consensus_score = edge.quality_tier.consensus_score();
    edge
}

/// Antonym table driving the conflict predicate. Two edges conflict iff
/// they share both endpoints and either their predicates form an antonym
/// pair or they carry the same temporal predicate with disjoint resolved
/// anchors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConflictTable {
    pub antonym_pairs: Vec<(String, String)>,
}

impl Default for ConflictTable {
    fn default() -> Self {
        ConflictTable {
            antonym_pairs: vec![("TREATED_WITH".into(), "LACKS_FEATURE".into())],
        }
    }
}

impl ConflictTable {
    fn antonyms(&self, a: &str, b: &str) -> bool {
        self.antonym_pairs
            .iter()
            .any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }
}

fn same_endpoints(a: &Edge, b: &Edge) -> bool {
    fold(a.subject.identity()) == fold(b.subject.identity())
        && fold(a.object.identity()) == fold(b.object.identity())
}

fn anchors_disjoint(a: &TemporalAnchor, b: &TemporalAnchor) -> bool {
    match (a.start, a.end, b.start, b.end) {
        (Some(a1), Some(a2), Some(b1), Some(b2)) => a2 < b1 || b2 < a1,
        _ => false,
    }
}

pub fn conflicts(candidate: &Edge, protected: &Edge, table: &ConflictTable) -> bool {
    if !same_endpoints(candidate, protected) {
        return false;
    }
    if table.antonyms(&candidate.predicate, &protected.predicate) {
        return true;
    }
    if candidate.predicate == protected.predicate {
        if let (Some(a), Some(b)) = (&candidate.anchor, &protected.anchor) {
            return anchors_disjoint(a, b);
        }
    }
    false
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IntegrationLog {
    /// Literature edges folded into an existing curated edge (PMID union).
    pub absorbed: Vec<String>,
    /// Discarded literature edges with the curated edge that beat them.
    pub discarded: Vec<(String, String)>,
}

/// Cross-tier merge. Curated edges are never removed or mutated beyond
/// PMID/model unions from absorbed duplicates; conflicting literature
/// edges are discarded and logged with the winning curated edge id.
pub fn integrate_tiers(
    tier1: Vec<Edge>,
    tier2: Vec<Edge>,
    table: &ConflictTable,
) -> Result<(Vec<Edge>, IntegrationLog)> {
    for e in &tier1 {
        if !e.is_protected {
            return Err(Error::InvalidInput(format!(
                "integrate_tiers: tier-1 edge {} is not protected",
                e.edge_id
            )));
        }
    }
    let mut log = IntegrationLog::default();
    let mut unified = tier1;
    let mut tier1_keys: HashMap<String, usize> = unified
        .iter()
        .enumerate()
        .map(|(i, e)| (e.edge_id.clone(), i))
        .collect();

    'outer: for edge in tier2 {
        if let Some(&i) = tier1_keys.get(&edge.edge_id) {
            let target = &mut unified[i];
            target.pmid_list.extend(edge.pmid_list.iter().cloned());
            target.source_models.extend(edge.source_models.iter().cloned());
            target.evidence_breadth = target.pmid_list.len();
            target.cross_tier_confirmed = true;
            log.absorbed.push(edge.edge_id);
            continue;
        }
        for protected in unified.iter().filter(|e| e.is_protected) {
            if conflicts(&edge, protected, table) {
                log.discarded.push((edge.edge_id.clone(), protected.edge_id.clone()));
                continue 'outer;
            }
        }
        tier1_keys.entry(edge.edge_id.clone()).or_insert(unified.len());
        unified.push(edge);
    }
    Ok((unified, log))
}

/// Per-tier edge counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierHistogram {
    pub gold: usize,
    pub silver: usize,
    pub bronze: usize,
}

impl TierHistogram {
    pub fn of(edges: &[Edge]) -> Self {
        let mut h = TierHistogram::default();
        for e in edges {
            match e.quality_tier {
                QualityTier::Gold => h.gold += 1,
                QualityTier::Silver => h.silver += 1,
                QualityTier::Bronze => h.bronze += 1,
            }
        }
        h
    }

    pub fn total(&self) -> usize {
        self.gold + self.silver + self.bronze
    }
}
