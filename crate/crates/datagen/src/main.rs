//! Deterministic generator for the bundled data tree: pair configurations,
//! scenarios, released artifacts (graphs, outputs, scores, audits) and the
//! offline fixtures behind hermetic runs.

mod cfcases;
mod configs;
mod fixtures;
mod graphs;
mod judges;
mod metrics;
mod nli;
mod outputs;

use std::path::PathBuf;

use anyhow::{ensure, Context, Result};

use tracekg::citeverify::extract_pmids;
use tracekg::evalmetrics::citation_density;
use tracekg::pairconfig::load_config;
use tracekg::temporal::extract_temporal_claims;

fn main() -> Result<()> {
    let root = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "data".to_string()),
    );
    std::fs::create_dir_all(&root)?;

    eprintln!("pair configurations");
    configs::write_pair_configs(&root)?;
    let cfgs: Vec<(String, tracekg::pairconfig::DiseasePairConfig)> = [
        ("mg_lems", configs::MG_LEMS_YAML),
        ("dmd_bmd", configs::DMD_BMD_YAML),
        ("cidp_gbs", configs::CIDP_GBS_YAML),
    ]
    .iter()
    .map(|(pair, text)| Ok((pair.to_string(), load_config(text)?)))
    .collect::<Result<_>>()?;

    eprintln!("scenarios");
    let scenarios = configs::write_scenarios(&root)?;
    ensure!(scenarios.len() == 36, "36 scenarios");

    eprintln!("released metrics table");
    metrics::write_metrics(&root)?;

    eprintln!("released graphs");
    graphs::write_graphs(&root, &cfgs)?;

    eprintln!("released outputs");
    let bundle = outputs::write_outputs(&root, &scenarios)?;
    ensure!(
        bundle.total_heg_temporal == 577,
        "temporal total {} != 577",
        bundle.total_heg_temporal
    );
    ensure!(
        bundle.unique_heg_pmids == 203,
        "unique cited pmids {} != 203",
        bundle.unique_heg_pmids
    );

    eprintln!("released judge scores");
    let ids_for = |pair: &str| -> Vec<String> {
        scenarios
            .iter()
            .filter(|s| s.disease_pair == pair)
            .map(|s| s.id.clone())
            .collect()
    };
    judges::write_judge_scores(&root, &ids_for)?;
    judges::verify_judge_scores(&root)?;

    eprintln!("released claim-support audit");
    nli::write_nli(&root, &scenarios)?;

    eprintln!("counterfactual cases");
    cfcases::write_counterfactuals(&root)?;

    eprintln!("offline fixtures");
    fixtures::write_pubmed_index(&root)?;
    fixtures::write_e2e_providers(&root)?;
    let mg_cfg = &cfgs.iter().find(|(p, _)| p == "mg_lems").unwrap().1;
    fixtures::write_tier1(&root, mg_cfg)?;
    fixtures::write_screening_corpus(&root)?;
    fixtures::write_guideline_corpus(&root)?;

    verify_release(&root)?;
    eprintln!("data tree complete at {}", root.display());
    Ok(())
}

/// Cross-checks over the written tree, mirroring the release gates.
fn verify_release(root: &std::path::Path) -> Result<()> {
    eprintln!("verifying released tree");
    let mut total_density = 0.0f64;
    let mut n_heg = 0usize;
    let mut temporal_heg = 0usize;
    let mut temporal_vanilla = 0usize;
    let mut all_pmids: std::collections::BTreeSet<String> = Default::default();
    for pair in ["mg_lems", "dmd_bmd", "cidp_gbs"] {
        let dir = root.join("released/outputs").join(pair);
        let mut entries: Vec<_> = std::fs::read_dir(&dir)?.collect::<std::io::Result<_>>()?;
        entries.sort_by_key(|e| e.path());
        for entry in entries {
            let path = entry.path();
            if path.extension().is_none_or(|e| e != "txt") {
                continue;
            }
            let text = std::fs::read_to_string(&path)?;
            let name = path.file_name().unwrap().to_string_lossy().to_string();
            if name.contains("__heg_tkg") {
                total_density += citation_density(&text)?;
                temporal_heg += extract_temporal_claims(&text).0;
                all_pmids.extend(extract_pmids(&text));
                n_heg += 1;
            } else if name.contains("__vanilla") {
                temporal_vanilla += extract_temporal_claims(&text).0;
                ensure!(extract_pmids(&text).is_empty(), "{name}: vanilla cites a pmid");
            }
        }
    }
    ensure!(n_heg == 36, "36 graph-arm outputs, found {n_heg}");
    let mean_density = total_density / n_heg as f64;
    ensure!(
        (mean_density - 23.8).abs() <= 0.1,
        "mean citation density {mean_density:.3} outside 23.8 +- 0.1"
    );
    ensure!(temporal_heg == 577, "graph-arm temporal claims {temporal_heg} != 577");
    ensure!(temporal_vanilla == 0, "vanilla temporal claims {temporal_vanilla} != 0");
    ensure!(all_pmids.len() == 203, "cited unique pmids {} != 203", all_pmids.len());

    // Every cited PMID resolves as relevant in the fixture index.
    let index = tracekg::citeverify::FixtureIndex::load(root.join("fixtures/pubmed_index.json"))?;
    for pmid in &all_pmids {
        let record = tracekg::citeverify::PubmedClient::fetch_summary(&index, pmid)
            .context("index lookup")?;
        ensure!(record.exists, "pmid {pmid} missing from the fixture index");
    }

    // Graph totals across the three released graphs; the source-PMID
    // total is a union (one PMID is shared across pairs).
    let mut totals = tracekg::graphstore::GraphStats::default();
    let mut union_pmids: std::collections::BTreeSet<String> = Default::default();
    for pair in ["mg_lems", "dmd_bmd", "cidp_gbs"] {
        let dir = root.join("released/graphs").join(pair);
        let graph =
            tracekg::graphstore::import_graph(dir.join("nodes.jsonl"), dir.join("edges.jsonl"))?;
        totals.add(&graph.stats());
        for e in graph.edges() {
            union_pmids.extend(e.pmid_list.iter().cloned());
        }
    }
    ensure!(totals.nodes == 5481, "nodes {} != 5481", totals.nodes);
    ensure!(totals.edges == 6316, "edges {} != 6316", totals.edges);
    ensure!(totals.temporal_anchors == 1280, "anchors {} != 1280", totals.temporal_anchors);
    ensure!(totals.gold_edges == 231, "gold {} != 231", totals.gold_edges);
    ensure!(union_pmids.len() == 987, "pmids {} != 987", union_pmids.len());
    eprintln!(
        "  outputs ok (density {mean_density:.2}, temporal {temporal_heg}/0, pmids {})",
        all_pmids.len()
    );
    Ok(())
}
