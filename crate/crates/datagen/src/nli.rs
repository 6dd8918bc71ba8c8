//! Released claim-support audit artifacts: the candidate (claim, PMID)
//! pool and the 200-row verdict file drawn from it with the released
//! sampler parameters.

use std::path::Path;

use anyhow::{ensure, Result};

use tracekg::files::write_jsonl;
use tracekg::judgepanel::{stratified_sample, ClaimPmid, NliLabel, NliRow};
use tracekg::synthesis::ClinicalScenario;

use crate::graphs::{output_pool_pmids, targets_for};

struct CellSpec {
    pair: &'static str,
    tier: &'static str,
    rows: usize,
    /// Disjoint slice [offset, offset+span) of the pair's output pool;
    /// rows cycle round-robin over the slice.
    offset: usize,
    span: usize,
}

/// Cell layout tuned so the capped stratified draw lands on the released
/// tier split (7 GOLD, 77 SILVER, 116 BRONZE). GOLD availability is tiny
/// by construction: one saturating PMID (9 rows, cap binds at 5) and one
/// two-row PMID.
const CELLS: [CellSpec; 8] = [
    CellSpec { pair: "cidp_gbs", tier: "BRONZE", rows: 257, offset: 6, span: 58 },
    CellSpec { pair: "cidp_gbs", tier: "GOLD", rows: 2, offset: 64, span: 1 },
    CellSpec { pair: "cidp_gbs", tier: "SILVER", rows: 25, offset: 0, span: 6 },
    CellSpec { pair: "dmd_bmd", tier: "BRONZE", rows: 257, offset: 6, span: 74 },
    CellSpec { pair: "dmd_bmd", tier: "GOLD", rows: 9, offset: 80, span: 1 },
    CellSpec { pair: "dmd_bmd", tier: "SILVER", rows: 26, offset: 0, span: 6 },
    CellSpec { pair: "mg_lems", tier: "BRONZE", rows: 256, offset: 6, span: 42 },
    CellSpec { pair: "mg_lems", tier: "SILVER", rows: 26, offset: 0, span: 6 },
];

const CLAIM_SHAPES: [&str; 6] = [
    "responds to first-line therapy within the expected window",
    "shows the characteristic examination finding on follow-up",
    "is supported by the cited cohort's electrodiagnostic data",
    "carries the documented antibody association in this population",
    "requires structured surveillance per the cited guidance",
    "differs from its mimic on the cited longitudinal measure",
];

pub fn build_candidates(scenarios: &[ClinicalScenario]) -> Vec<ClaimPmid> {
    let mut rows = Vec::new();
    for cell in &CELLS {
        let pool = output_pool_pmids(targets_for(cell.pair));
        let ids: Vec<&ClinicalScenario> = scenarios
            .iter()
            .filter(|s| s.disease_pair == cell.pair)
            .collect();
        for k in 0..cell.rows {
            let pmid = pool[cell.offset + (k % cell.span)].clone();
            let scenario = ids[k % ids.len()];
            rows.push(ClaimPmid {
                scenario_id: scenario.id.clone(),
                disease_pair: cell.pair.to_string(),
                claim: format!(
                    "The {} {} cohort {} in case {}",
                    cell.pair.replace('_', "/"),
                    cell.tier.to_lowercase(),
                    CLAIM_SHAPES[k % CLAIM_SHAPES.len()],
                    k
                ),
                pmid,
                tier: cell.tier.to_string(),
            });
        }
    }
    rows
}

/// Verdict labels per tier in the released tier table:
/// GOLD 0/7/0, SILVER 28/47/2, BRONZE 78/38/0 (entails/neutral/contradicts).
fn label_for(tier: &str, index_in_tier: usize) -> (NliLabel, f64) {
    match tier {
        "GOLD" => (NliLabel::Neutral, 0.95),
        "SILVER" => {
            if index_in_tier < 28 {
                (NliLabel::Entails, 0.90)
            } else if index_in_tier < 75 {
                (NliLabel::Neutral, 0.85)
            } else {
                (NliLabel::Contradicts, 0.95)
            }
        }
        _ => {
            if index_in_tier < 78 {
                (NliLabel::Entails, 0.90)
            } else {
                (NliLabel::Neutral, 0.85)
            }
        }
    }
}

pub fn write_nli(root: &Path, scenarios: &[ClinicalScenario]) -> Result<()> {
    let candidates = build_candidates(scenarios);
    ensure!(candidates.len() == 858, "858 candidates, got {}", candidates.len());

    let sample = stratified_sample(&candidates, 200, 42, 12, 5)?;
    let count = |tier: &str| sample.iter().filter(|c| c.tier == tier).count();
    ensure!(count("GOLD") == 7, "GOLD draw {} != 7", count("GOLD"));
    ensure!(count("SILVER") == 77, "SILVER draw {} != 77", count("SILVER"));
    ensure!(count("BRONZE") == 116, "BRONZE draw {} != 116", count("BRONZE"));

    let mut tier_counters: std::collections::HashMap<String, usize> = Default::default();
    let mut verdicts: Vec<NliRow> = Vec::with_capacity(200);
    for row in &sample {
        let counter = tier_counters.entry(row.tier.clone()).or_insert(0);
        let idx = *counter;
        *counter += 1;
        let (label, confidence) = label_for(&row.tier, idx);
        verdicts.push(NliRow {
            scenario_id: row.scenario_id.clone(),
            disease_pair: row.disease_pair.clone(),
            tier: row.tier.clone(),
            claim: row.claim.clone(),
            pmid: row.pmid.clone(),
            label,
            confidence,
        });
    }
    let contradicts = verdicts.iter().filter(|v| v.label == NliLabel::Contradicts).count();
    let entails = verdicts.iter().filter(|v| v.label == NliLabel::Entails).count();
    ensure!(contradicts == 2 && entails == 106, "verdict mix {entails}/{contradicts}");

    let dir = root.join("released");
    std::fs::create_dir_all(&dir)?;
    write_jsonl(&candidates, dir.join("nli_candidates.jsonl"))?;
    write_jsonl(&verdicts, dir.join("nli_verdicts.jsonl"))?;
    Ok(())
}
