//! Released clinical-output fixtures: 108 texts whose measurable
//! properties (unique PMIDs, word counts, temporal claims, inline
//! citation rate) reproduce the released aggregate tables.

use std::path::Path;

use anyhow::{ensure, Context, Result};

use tracekg::citeverify::extract_pmids;
use tracekg::evalmetrics::{evidence_traceability, segment_claims};
use tracekg::synthesis::{Arm, ClinicalScenario, ManifestEntry};
use tracekg::temporal::extract_temporal_claims;

use crate::graphs::{output_pool_pmids, targets_for};
use crate::metrics::heg_ets;

/// Digit-free clinical filler vocabulary; immune to the temporal-claim
/// grammar and the PMID extractor by construction.
const WORDS: [&str; 48] = [
    "the", "clinical", "course", "remains", "consistent", "with", "documented", "expectations",
    "and", "supports", "structured", "follow", "review", "of", "weakness", "patterns", "alongside",
    "functional", "assessment", "during", "each", "visit", "while", "monitoring", "continues",
    "under", "specialist", "guidance", "for", "progression", "markers", "including", "strength",
    "testing", "reflex", "examination", "respiratory", "surveillance", "cardiac", "screening",
    "treatment", "response", "evaluation", "caregiver", "education", "referral", "coordination",
    "planning",
];

fn filler(start: usize, count: usize) -> Vec<String> {
    (0..count).map(|k| WORDS[(start + k) % WORDS.len()].to_string()).collect()
}

fn sentence(start: usize, count: usize) -> String {
    let words = filler(start, count);
    let mut text = words.join(" ");
    if let Some(first) = text.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    format!("{text}.")
}

/// Anchor tokens that each count as exactly one temporal claim.
const ANCHOR_TOKENS: [&str; 12] = [
    "P3Y-P5Y",
    "P9Y-P13Y",
    "P13Y",
    "P2Y-P6Y",
    "P17Y-P19Y",
    "P6M",
    "age 11",
    "2-4 weeks",
    "7-14-day",
    "P10Y-P15Y",
    "age 13 years",
    "P16Y",
];

const TIERS: [&str; 6] = ["SILVER", "BRONZE", "GOLD", "BRONZE", "SILVER", "BRONZE"];

/// Pad with reference-table rows: stripped from claim segmentation but
/// counted by the whitespace tokenizer.
fn padding_rows(mut deficit: usize, start: usize) -> Vec<String> {
    let mut rows = Vec::new();
    let mut cursor = start;
    while deficit > 0 {
        let tokens = deficit.min(10);
        if tokens == 1 {
            rows.push("|".to_string());
        } else {
            let words = filler(cursor, tokens - 1);
            rows.push(format!("| {}", words.join(" ")));
        }
        cursor += tokens;
        deficit -= tokens;
    }
    rows
}

fn count_words(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Pick claim counts (total, cited) approximating the inline citation
/// rate, with room for the temporal spans, the per-sentence tag cap and
/// the word budget.
fn claim_plan(ets: f64, unique_pmids: usize, temporal: usize, word_budget: usize) -> (usize, usize) {
    let min_cited = if unique_pmids == 0 { 0 } else { unique_pmids.div_ceil(5) };
    let max_total = (word_budget / 9).clamp(temporal.max(8), 90);
    let mut best: Option<(f64, usize, usize)> = None;
    for total in 8..=max_total {
        let cited = (ets * total as f64).round() as usize;
        if cited > total || cited < min_cited || cited > unique_pmids {
            continue;
        }
        if total < temporal {
            continue;
        }
        if unique_pmids > 0 && cited == 0 {
            continue;
        }
        let err = (cited as f64 / total as f64 - ets).abs();
        if best.is_none_or(|(e, _, _)| err < e - 1e-12) {
            best = Some((err, total, cited));
        }
    }
    let (_, total, cited) = best.expect("claim plan exists");
    (total, cited)
}

pub struct OutputSpec {
    pub scenario_id: String,
    pub arm: Arm,
    pub unique_pmids: usize,
    pub words: usize,
    pub temporal: usize,
    pub ets: f64,
}

/// Compose one output text (plus manifest entries for the graph arm).
pub fn compose(spec: &OutputSpec, pmids: &[String], seed: usize) -> (String, Vec<ManifestEntry>) {
    assert_eq!(pmids.len(), spec.unique_pmids);
    let (total, cited) = if spec.arm == Arm::HegTkg {
        claim_plan(spec.ets, spec.unique_pmids, spec.temporal, spec.words)
    } else {
        (24, 0)
    };
    // Size sentences to leave padding headroom under the word target:
    // anchors cost up to 4 tokens, tags 2, header and blank lines ~12.
    let overhead = spec.temporal * 4 + spec.unique_pmids * 2 + 12;
    let base_len = (spec.words.saturating_sub(overhead) / total.max(1)).clamp(5, 12);
    let mut lines = vec![format!(
        "# {} {} synthesis",
        spec.scenario_id,
        spec.arm.label()
    )];
    if spec.arm == Arm::GuidelineRag {
        lines.push(String::new());
        lines.push(sentence(seed, 14).replace('.', " per the retrieved reference text."));
    }
    lines.push(String::new());

    // Distribute pmids over the cited sentences.
    let mut tag_chunks: Vec<Vec<&String>> = vec![Vec::new(); cited.max(1)];
    for (k, pmid) in pmids.iter().enumerate() {
        tag_chunks[k % cited.max(1)].push(pmid);
    }

    let mut manifest = Vec::new();
    for s in 0..total {
        let mut line = sentence(seed + s * 7, base_len)
            .trim_end_matches('.')
            .to_string();
        if s < spec.temporal {
            line.push_str(&format!(
                " anchored at {}",
                ANCHOR_TOKENS[(seed + s) % ANCHOR_TOKENS.len()]
            ));
        }
        if s < cited && !tag_chunks[s].is_empty() {
            let mut tags = Vec::new();
            for (k, pmid) in tag_chunks[s].iter().enumerate() {
                let tier = TIERS[(seed + s + k) % TIERS.len()];
                tags.push(format!("[PMID:{pmid}, {tier}]"));
                manifest.push((pmid.to_string(), tier.to_string()));
            }
            line.push_str(&format!(" {}", tags.join(" ")));
        }
        line.push('.');
        lines.push(line);
    }

    let mut text = lines.join("\n");
    let current = count_words(&text);
    assert!(
        current <= spec.words,
        "{} {}: composed {} words exceeds target {}",
        spec.scenario_id,
        spec.arm.label(),
        current,
        spec.words
    );
    let rows = padding_rows(spec.words - current, seed);
    if !rows.is_empty() {
        text.push_str("\n\n");
        text.push_str(&rows.join("\n"));
    }
    text.push('\n');

    // Manifest entries: up to three pmids per retrieved-edge entry.
    let entries: Vec<ManifestEntry> = manifest
        .chunks(3)
        .enumerate()
        .map(|(k, chunk)| ManifestEntry {
            edge_id: format!("rel-{}-{:03}", spec.scenario_id.to_lowercase(), k),
            pmid_list: chunk.iter().map(|(p, _)| p.clone()).collect(),
            tier: chunk[0].1.clone(),
        })
        .collect();
    (text, entries)
}

/// Per-pair word plan: integer word targets hitting both the pair word
/// sum and the per-scenario mean density.
fn solve_words(u: &[usize], word_sum: usize, target_density_mean: f64) -> Result<Vec<usize>> {
    let n = u.len();
    let nonzero: Vec<usize> = (0..n).filter(|&i| u[i] > 0).collect();
    let zero_share = (word_sum as f64 * 0.85 / n as f64).round() as usize;
    let zero_total = (n - nonzero.len()) * zero_share;
    let budget = word_sum - zero_total;
    let mean_u = nonzero.iter().map(|&i| u[i] as f64).sum::<f64>() / nonzero.len() as f64;

    let weights = |lambda: f64| -> Vec<f64> {
        nonzero
            .iter()
            .map(|&i| lambda * u[i] as f64 + (1.0 - lambda) * (u[i] as f64 * mean_u).sqrt())
            .collect()
    };
    let density_mean = |lambda: f64| -> f64 {
        let w = weights(lambda);
        let scale = budget as f64 / w.iter().sum::<f64>();
        let mut total = 0.0;
        for (k, &i) in nonzero.iter().enumerate() {
            total += u[i] as f64 * 1000.0 / (w[k] * scale);
        }
        total / n as f64
    };

    // Monotone in lambda: lambda 1 gives equal densities (the maximum of
    // the mean), lambda 0 the root-weighted minimum.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    ensure!(
        density_mean(0.0) <= target_density_mean + 0.02,
        "density target {target_density_mean} below feasible minimum {}",
        density_mean(0.0)
    );
    let lambda = if density_mean(1.0) <= target_density_mean {
        1.0
    } else {
        for _ in 0..60 {
            let mid = (lo + hi) / 2.0;
            if density_mean(mid) > target_density_mean {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) / 2.0
    };

    let w = weights(lambda);
    let scale = budget as f64 / w.iter().sum::<f64>();
    let mut words = vec![zero_share; n];
    for (k, &i) in nonzero.iter().enumerate() {
        words[i] = (w[k] * scale).round() as usize;
    }
    // Repair the integer rounding drift on the largest scenario.
    let drift = word_sum as i64 - words.iter().sum::<usize>() as i64;
    let largest = (0..n).max_by_key(|&i| words[i]).unwrap();
    words[largest] = (words[largest] as i64 + drift) as usize;
    Ok(words)
}

pub struct PairPlan {
    pub pair: &'static str,
    pub u: Vec<usize>,
    pub words_heg: Vec<usize>,
    pub words_vanilla: usize,
    pub words_rag: usize,
    pub temporal: Vec<usize>,
}

/// Temporal-claim quotas per scenario, routed by output type so the
/// per-type subtotals land exactly.
fn temporal_quota(scenarios: &[&ClinicalScenario]) -> Vec<usize> {
    use tracekg::synthesis::OutputType::*;
    let mut diff_q = vec![9usize, 9, 9, 9, 9, 9, 9, 9, 8, 8, 8, 8, 8, 8, 8].into_iter();
    let mut comp_q = vec![37usize; 6].into_iter();
    let mut traj_q = vec![33usize, 33, 33, 33, 33, 32].into_iter();
    let mut tx_q = vec![4usize, 4, 4, 3, 3, 3, 3, 3, 3].into_iter();
    scenarios
        .iter()
        .map(|s| match s.output_type {
            Differential => diff_q.next().unwrap(),
            TemporalComparative => comp_q.next().unwrap(),
            Temporal => traj_q.next().unwrap(),
            Treatment => tx_q.next().unwrap(),
        })
        .collect()
}

pub fn build_plans(scenarios: &[ClinicalScenario]) -> Result<Vec<PairPlan>> {
    // Temporal quotas are drawn per type in global scenario order.
    let ordered: Vec<&ClinicalScenario> = scenarios.iter().collect();
    let all_quotas = temporal_quota_by_type(&ordered);

    let mut plans = Vec::new();
    for (pair, u, word_sum, density, wv, wr) in [
        (
            "cidp_gbs",
            vec![48usize, 45, 40, 36, 33, 30, 28, 26, 24, 19, 16, 12],
            14140usize,
            24.8f64,
            793usize,
            869usize,
        ),
        (
            "dmd_bmd",
            vec![42, 41, 40, 39, 38, 38, 38, 37, 37, 36, 35, 32],
            14944,
            30.3,
            828,
            876,
        ),
        (
            "mg_lems",
            vec![24, 24, 24, 24, 24, 23, 23, 23, 0, 24, 23, 23],
            15758,
            16.2,
            861,
            853,
        ),
    ] {
        let pair_scenarios: Vec<&ClinicalScenario> =
            scenarios.iter().filter(|s| s.disease_pair == pair).collect();
        ensure!(pair_scenarios.len() == 12, "12 scenarios per pair");
        let words_heg = solve_words(&u, word_sum, density)
            .with_context(|| format!("word plan for {pair}"))?;
        let temporal: Vec<usize> = pair_scenarios
            .iter()
            .map(|s| all_quotas[&s.id])
            .collect();
        plans.push(PairPlan {
            pair: targets_for(pair).pair,
            u,
            words_heg,
            words_vanilla: wv,
            words_rag: wr,
            temporal,
        });
    }
    Ok(plans)
}

fn temporal_quota_by_type(
    ordered: &[&ClinicalScenario],
) -> std::collections::BTreeMap<String, usize> {
    let quotas = temporal_quota(ordered);
    ordered
        .iter()
        .zip(quotas)
        .map(|(s, q)| (s.id.clone(), q))
        .collect()
}

pub struct OutputBundle {
    pub total_heg_temporal: usize,
    pub unique_heg_pmids: usize,
}

pub fn write_outputs(root: &Path, scenarios: &[ClinicalScenario]) -> Result<OutputBundle> {
    let plans = build_plans(scenarios)?;
    let mut all_heg_pmids: std::collections::BTreeSet<String> = Default::default();
    let mut total_temporal = 0usize;

    for plan in &plans {
        let t = targets_for(plan.pair);
        let pool = output_pool_pmids(t);
        let dir = root.join("released").join("outputs").join(plan.pair);
        std::fs::create_dir_all(&dir)?;
        let pair_scenarios: Vec<&ClinicalScenario> = scenarios
            .iter()
            .filter(|s| s.disease_pair == plan.pair)
            .collect();

        let mut cursor = 0usize;
        let mut pair_words = 0usize;
        let mut pair_density = 0.0f64;
        for (i, scenario) in pair_scenarios.iter().enumerate() {
            // PMIDs: a moving window over the pool so the union covers it.
            let mut pmids = Vec::with_capacity(plan.u[i]);
            for _ in 0..plan.u[i] {
                pmids.push(pool[cursor % pool.len()].clone());
                cursor += 1;
            }
            let ets = heg_ets(&scenario.id);
            let spec = OutputSpec {
                scenario_id: scenario.id.clone(),
                arm: Arm::HegTkg,
                unique_pmids: plan.u[i],
                words: plan.words_heg[i],
                temporal: plan.temporal[i],
                ets,
            };
            let (text, mut manifest) = compose(&spec, &pmids, i * 31 + 5);
            verify_output(&spec, &text)?;
            // Zero-citation outputs still draw on retrieved evidence; the
            // manifest records it even when no inline tag was attached.
            if manifest.is_empty() {
                manifest = pool[..3]
                    .iter()
                    .enumerate()
                    .map(|(k, pmid)| ManifestEntry {
                        edge_id: format!("rel-{}-unc-{:03}", scenario.id.to_lowercase(), k),
                        pmid_list: vec![pmid.clone()],
                        tier: "BRONZE".into(),
                    })
                    .collect();
            }
            total_temporal += plan.temporal[i];
            all_heg_pmids.extend(pmids.iter().cloned());
            pair_words += count_words(&text);
            pair_density +=
                extract_pmids(&text).len() as f64 / count_words(&text) as f64 * 1000.0;
            std::fs::write(dir.join(format!("{}__heg_tkg.txt", scenario.id)), &text)?;
            std::fs::write(
                dir.join(format!("{}__heg_tkg.manifest.json", scenario.id)),
                serde_json::to_string_pretty(&manifest)?,
            )?;

            for (arm, words) in [(Arm::Vanilla, plan.words_vanilla), (Arm::GuidelineRag, plan.words_rag)] {
                let spec = OutputSpec {
                    scenario_id: scenario.id.clone(),
                    arm,
                    unique_pmids: 0,
                    words,
                    temporal: 0,
                    ets: 0.0,
                };
                let (text, _) = compose(&spec, &[], i * 13 + 3);
                verify_output(&spec, &text)?;
                std::fs::write(
                    dir.join(format!("{}__{}.txt", scenario.id, arm.label())),
                    &text,
                )?;
            }
        }
        ensure!(
            cursor >= pool.len(),
            "{}: output pool not fully cited ({} draws over {} pool)",
            plan.pair,
            cursor,
            pool.len()
        );
        let mean_words = pair_words as f64 / 12.0;
        let mean_density = pair_density / 12.0;
        eprintln!(
            "  outputs {}: mean words {:.1}, mean density {:.2}",
            plan.pair, mean_words, mean_density
        );
    }
    Ok(OutputBundle {
        total_heg_temporal: total_temporal,
        unique_heg_pmids: all_heg_pmids.len(),
    })
}

fn verify_output(spec: &OutputSpec, text: &str) -> Result<()> {
    let pmids = extract_pmids(text);
    ensure!(
        pmids.len() == spec.unique_pmids,
        "{} {}: {} unique pmids, wanted {}",
        spec.scenario_id,
        spec.arm.label(),
        pmids.len(),
        spec.unique_pmids
    );
    let (count, _) = extract_temporal_claims(text);
    ensure!(
        count == spec.temporal,
        "{} {}: {} temporal claims, wanted {}",
        spec.scenario_id,
        spec.arm.label(),
        count,
        spec.temporal
    );
    ensure!(
        count_words(text) == spec.words,
        "{} {}: {} words, wanted {}",
        spec.scenario_id,
        spec.arm.label(),
        count_words(text),
        spec.words
    );
    if spec.arm == Arm::HegTkg {
        let ets = evidence_traceability(text);
        ensure!(
            (ets - spec.ets).abs() <= 0.006,
            "{} {}: ets {:.4}, wanted {:.2} (claims {})",
            spec.scenario_id,
            spec.arm.label(),
            ets,
            spec.ets,
            segment_claims(text).len()
        );
    }
    Ok(())
}
