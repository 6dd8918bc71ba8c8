//! Automated output metrics: feature coverage, evidence traceability,
//! the provenance gap, citation density and temporal-claim counts.

use serde::{Deserialize, Serialize};

use crate::citeverify::extract_pmids;
use crate::error::{Error, Result};
use crate::synthesis::Arm;
use crate::temporal;

/// Citation reliability coefficient per arm. Config-driven; the defaults
/// reflect verified PMIDs (graph arm), author-year references (vanilla)
/// and vague source names (text RAG).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityCoefficients {
    pub heg_tkg: f64,
    pub vanilla: f64,
    pub guideline_rag: f64,
}

impl Default for ReliabilityCoefficients {
    fn default() -> Self {
        ReliabilityCoefficients {
            heg_tkg: 0.97,
            vanilla: 0.80,
            guideline_rag: 0.50,
        }
    }
}

impl ReliabilityCoefficients {
    pub fn for_arm(&self, arm: Arm) -> f64 {
        match arm {
            Arm::HegTkg => self.heg_tkg,
            Arm::Vanilla => self.vanilla,
            Arm::GuidelineRag => self.guideline_rag,
        }
    }
}

/// Fraction of expected features present as case-folded substrings.
/// A rigid matcher: paraphrases do not count.
pub fn feature_coverage(text: &str, expected_key_features: &[String]) -> Result<f64> {
    if expected_key_features.is_empty() {
        return Err(Error::InvalidInput(
            "feature_coverage: empty feature list".into(),
        ));
    }
    let folded = text.to_lowercase();
    let hits = expected_key_features
        .iter()
        .filter(|f| folded.contains(&f.to_lowercase()))
        .count();
    Ok(hits as f64 / expected_key_features.len() as f64)
}

/// Split an output into claims: headers and table markup are stripped,
/// the rest segments on periods and semicolons, and only segments with at
/// least four tokens count.
pub fn segment_claims(text: &str) -> Vec<String> {
    let body: Vec<&str> = text
        .lines()
        .filter(|line| {
            let t = line.trim_start();
            !(t.starts_with('#')
                || t.starts_with('|')
                || t.chars().all(|c| matches!(c, '-' | '=' | '|' | ' ' | '+')))
        })
        .collect();
    body.join(" ")
        .split(['.', ';'])
        .map(str::trim)
        .filter(|s| s.split_whitespace().count() >= 4)
        .map(String::from)
        .collect()
}

/// Fraction of claims carrying an inline `[PMID:` tag. Outputs with zero
/// claims score 0. This is the inline citation rate: a lower bound on
/// traceability, not a measure of it.
pub fn evidence_traceability(text: &str) -> f64 {
    let claims = segment_claims(text);
    if claims.is_empty() {
        return 0.0;
    }
    let cited = claims.iter().filter(|c| c.contains("[PMID:")).count();
    cited as f64 / claims.len() as f64
}

/// PG = max(FC - ETS * r, 0).
pub fn provenance_gap(fc: f64, ets: f64, r: f64) -> Result<f64> {
    for (name, v) in [("fc", fc), ("ets", ets), ("r", r)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidInput(format!(
                "provenance_gap: {name} = {v} outside [0,1]"
            )));
        }
    }
    Ok((fc - ets * r).max(0.0))
}

/// Unique PMIDs per 1,000 whitespace-token words.
pub fn citation_density(text: &str) -> Result<f64> {
    let words = text.split_whitespace().count();
    if words == 0 {
        return Err(Error::InvalidInput("citation_density: empty text".into()));
    }
    Ok(extract_pmids(text).len() as f64 / words as f64 * 1000.0)
}

/// Time-anchored claim count (re-exported from the temporal grammar).
pub fn temporal_claims(text: &str) -> usize {
    temporal::extract_temporal_claims(text).0
}

/// Per-scenario automated metrics row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceMetrics {
    pub scenario_id: String,
    pub arm: Arm,
    pub fc: f64,
    pub ets: f64,
    pub r: f64,
    pub pg: f64,
    pub density: f64,
    pub temporal_claims: usize,
}

/// Compute the full metrics row for one output.
pub fn score_output(
    scenario_id: &str,
    arm: Arm,
    text: &str,
    expected_key_features: &[String],
    coefficients: &ReliabilityCoefficients,
) -> Result<ProvenanceMetrics> {
    let fc = feature_coverage(text, expected_key_features)?;
    let ets = evidence_traceability(text);
    let r = coefficients.for_arm(arm);
    Ok(ProvenanceMetrics {
        scenario_id: scenario_id.to_string(),
        arm,
        fc,
        ets,
        r,
        pg: provenance_gap(fc, ets, r)?,
        density: citation_density(text)?,
        temporal_claims: temporal_claims(text),
    })
}
