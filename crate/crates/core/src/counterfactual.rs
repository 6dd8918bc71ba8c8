//! Counterfactual injection harness: insert a deliberately false evidence
//! edge, then classify how the synthesis handled it and whether the
//! injection stays detectable through the citation trace.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::citeverify::extract_pmids;
use crate::consensus::{Edge, QualityTier};
use crate::error::{Error, Result};
use crate::normalize::{EntityType, NormalizedEntity, ResolverKind};
use crate::synthesis::ClinicalOutput;

/// One injected-error case. The assertion keyword lists are data,
/// reviewable per case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualCase {
    pub id: String,
    pub disease_pair: String,
    pub injected_statement: String,
    pub subject: String,
    pub predicate: String,
    pub object: String,
    /// Synthetic PMID distinct from every corpus PMID.
    pub marker_pmid: String,
    /// Phrases whose presence means the output contradicted the injection.
    pub resist_markers: Vec<String>,
    /// Phrases whose presence means the output repeated the injection.
    pub faithful_markers: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CfOutcome {
    /// Correct despite wrong evidence.
    Resisted,
    /// Hedged hybrid: both the injection and correct knowledge surfaced.
    Partial,
    /// The output repeated the injected error.
    Faithful,
}

impl CfOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            CfOutcome::Resisted => "Resisted",
            CfOutcome::Partial => "Partial",
            CfOutcome::Faithful => "Faithful",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfResult {
    pub case_id: String,
    pub outcome: CfOutcome,
    pub detectable: bool,
}

/// Build the synthetic evidence edge for a case. BRONZE single-source, so
/// it reads like ordinary literature evidence.
pub fn injected_edge(cf: &CounterfactualCase) -> Edge {
    let subject = NormalizedEntity {
        surface: cf.subject.clone(),
        cui: None,
        type_label: EntityType::Entity,
        resolver_used: ResolverKind::None,
    };
    let object = NormalizedEntity {
        surface: cf.object.clone(),
        cui: None,
        type_label: EntityType::Entity,
        resolver_used: ResolverKind::None,
    };
    let edge_id = crate::consensus::edge_key(&subject, &cf.predicate, &object);
    Edge {
        edge_id,
        subject,
        predicate: cf.predicate.clone(),
        object,
        quality_tier: QualityTier::Bronze,
        consensus_score: QualityTier::Bronze.consensus_score(),
        source_models: BTreeSet::from(["injected".to_string()]),
        pmid_list: BTreeSet::from([cf.marker_pmid.clone()]),
        evidence_sample: cf.injected_statement.clone(),
        is_temporal: false,
        anchor: None,
        cross_tier_confirmed: false,
        evidence_breadth: 1,
        disease_context: BTreeSet::new(),
        is_protected: false,
    }
}

/// Append the synthetic edge to a retrieved evidence stream. The input is
/// untouched, so dropping the returned vector restores the original
/// evidence byte-identically. A marker PMID colliding with any corpus
/// PMID is an error.
pub fn inject_counterfactual(
    evidence: &[Edge],
    cf: &CounterfactualCase,
    corpus_pmids: &BTreeSet<String>,
) -> Result<Vec<Edge>> {
    if corpus_pmids.contains(&cf.marker_pmid)
        || evidence.iter().any(|e| e.pmid_list.contains(&cf.marker_pmid))
    {
        return Err(Error::InvalidInput(format!(
            "counterfactual {}: marker PMID {} collides with a corpus PMID",
            cf.id, cf.marker_pmid
        )));
    }
    let mut modified = evidence.to_vec();
    modified.push(injected_edge(cf));
    Ok(modified)
}

/// Classify one output against its case. Detectability is structural:
/// the marker PMID sits in the evidence manifest or the inline citations.
pub fn classify_cf_outcome(output: &ClinicalOutput, cf: &CounterfactualCase) -> CfResult {
    let folded = output.text.to_lowercase();
    let hit = |markers: &[String]| markers.iter().any(|m| folded.contains(&m.to_lowercase()));
    let resisted = hit(&cf.resist_markers);
    let faithful = hit(&cf.faithful_markers);
    let outcome = match (resisted, faithful) {
        (true, false) => CfOutcome::Resisted,
        (false, true) => CfOutcome::Faithful,
        // Both markers, or neither: an ambiguous hybrid.
        _ => CfOutcome::Partial,
    };
    let detectable = output.manifest_pmids().contains(&cf.marker_pmid)
        || extract_pmids(&output.text).contains(&cf.marker_pmid);
    CfResult {
        case_id: cf.id.clone(),
        outcome,
        detectable,
    }
}

pub fn load_cases(path: impl AsRef<std::path::Path>) -> Result<Vec<CounterfactualCase>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    Ok(serde_json::from_str(&text)?)
}
