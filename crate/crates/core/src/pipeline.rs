//! Phase I (offline graph construction) and Phase II (online clinical
//! inference) orchestration, plus report emission.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::citeverify::CitationAudit;
use crate::consensus::{
    assign_tier, group_by_key, integrate_tiers, ConflictTable, Edge, IntegrationLog, Tier1Index,
    TierHistogram,
};
use crate::counterfactual::CfResult;
use crate::error::{Error, Result};
use crate::extraction::{extract_triplets, screen_relevance, Abstract};
use crate::graphstore::{Graph, GraphStats};
use crate::judgepanel::{NliSummary, PanelTables, Round};
use crate::normalize::{NormalizedTriplet, ResolverChain, RuleEngine};
use crate::pairconfig::{classify_disease_context, DiseasePairConfig};
use crate::providers::{GenerationParams, ModelProvider};
use crate::synthesis::{
    build_prompt, format_evidence_block, retrieve_rag_chunks, synthesize, validate_privacy_config,
    Arm, ClinicalOutput, ClinicalScenario, Document, Embedder, ManifestEntry, OutputType,
    PrivacyConfig, RAG_TOP_K,
};
use crate::temporal::resolve_temporal;

/// Per-stage counts from one construction run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Phase1Report {
    pub pair_id: String,
    pub corpus_size: usize,
    pub screen_passed: usize,
    pub screen_pass_rate: f64,
    pub triplets_extracted: usize,
    pub dropped_invalid_quote: usize,
    pub flagged_out_of_schema: usize,
    pub provider_warnings: Vec<String>,
    pub rules_fired: BTreeMap<String, usize>,
    pub anchors_resolved: usize,
    pub anchors_unresolved: usize,
    pub merge_discarded_anchors: usize,
    pub tier2_edges: usize,
    pub tier_histogram: TierHistogram,
    pub integration: IntegrationLog,
    pub stats: GraphStats,
}

fn stage_err(stage: &str, e: Error) -> Error {
    Error::Stage {
        stage: stage.into(),
        message: e.to_string(),
    }
}

/// Phase I: screening -> extraction -> normalization -> correction ->
/// temporal anchoring -> consensus -> cross-tier merge -> graph import.
/// Any stage failure aborts with the stage name.
pub fn run_phase1(
    cfg: &DiseasePairConfig,
    corpus: &[Abstract],
    tier1: Vec<Edge>,
    extraction_providers: &[&dyn ModelProvider],
    screening_provider: &dyn ModelProvider,
) -> Result<(Graph, Phase1Report)> {
    let mut report = Phase1Report {
        pair_id: cfg.pair_id.clone(),
        corpus_size: corpus.len(),
        ..Phase1Report::default()
    };
    if corpus.is_empty() {
        return Err(stage_err(
            "screening",
            Error::InvalidInput("empty corpus".into()),
        ));
    }

    // Screening: first available extraction model decides.
    let mut passed: Vec<&Abstract> = Vec::new();
    for a in corpus {
        a.validate().map_err(|e| stage_err("screening", e))?;
        let decision =
            screen_relevance(a, cfg, screening_provider).map_err(|e| stage_err("screening", e))?;
        if decision.passed {
            passed.push(a);
        }
    }
    report.screen_passed = passed.len();
    report.screen_pass_rate = passed.len() as f64 / corpus.len() as f64;

    // Extraction with quote enforcement, then normalization, correction
    // and temporal anchoring per triplet.
    let chain = ResolverChain::standard(cfg);
    let engine = RuleEngine::new();
    let tables = cfg.temporal_tables();
    let mut triplets: Vec<NormalizedTriplet> = Vec::new();
    let mut context_by_pmid: HashMap<String, BTreeSet<String>> = HashMap::new();
    for a in &passed {
        let outcome = extract_triplets(a, cfg, extraction_providers)
            .map_err(|e| stage_err("extraction", e))?;
        report.triplets_extracted += outcome.triplets.len();
        report.dropped_invalid_quote += outcome.dropped_invalid_quote;
        report.flagged_out_of_schema += outcome.flagged_out_of_schema;
        report.provider_warnings.extend(outcome.provider_warnings);
        let context: BTreeSet<String> =
            classify_disease_context(&format!("{} {}", a.title, a.text), cfg)
                .into_iter()
                .collect();
        context_by_pmid.insert(a.pmid.clone(), context);

        for raw in &outcome.triplets {
            let normalized = NormalizedTriplet::from_raw(raw, &chain);
            let (mut corrected, fired) = engine.apply(&normalized);
            for rule in fired {
                *report.rules_fired.entry(rule.label().to_string()).or_default() += 1;
            }
            if cfg.temporal_predicates.contains(&corrected.predicate) {
                let phrase = corrected
                    .temporal_phrase
                    .clone()
                    .unwrap_or_else(|| corrected.evidence_quote.clone());
                let anchor = resolve_temporal(&phrase, &tables);
                if anchor.is_resolved() {
                    report.anchors_resolved += 1;
                } else {
                    report.anchors_unresolved += 1;
                }
                corrected.anchor = Some(anchor);
            }
            triplets.push(corrected);
        }
    }

    // Consensus: group, merge, tier.
    let index = Tier1Index::build(&tier1);
    let mut tier2: Vec<Edge> = Vec::new();
    for group in group_by_key(&triplets) {
        let (mut edge, log) =
            crate::consensus::merge_group(&group).map_err(|e| stage_err("consensus", e))?;
        report.merge_discarded_anchors += log.discarded_anchors.len();
        let mut context = BTreeSet::new();
        for member in &group {
            if let Some(c) = context_by_pmid.get(&member.pmid) {
                context.extend(c.iter().cloned());
            }
        }
        edge.disease_context = context;
        tier2.push(assign_tier(edge, &index));
    }
    report.tier2_edges = tier2.len();

    // Cross-tier merge and graph import.
    let (unified, integration) = integrate_tiers(tier1, tier2, &ConflictTable::default())
        .map_err(|e| stage_err("integration", e))?;
    report.integration = integration;
    report.tier_histogram = TierHistogram::of(&unified);
    let graph = Graph::from_edges(unified).map_err(|e| stage_err("graph_import", e))?;
    report.stats = graph.stats();
    Ok((graph, report))
}

/// Which retrieval queries ran and what they returned.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct QueryTrace {
    pub queries: Vec<String>,
    pub edges_retrieved: usize,
    pub target_diseases: Vec<String>,
}

/// Retrieve the evidence subgraph for a scenario: the output type routes
/// to the retrieval queries, the neighbourhood query backfills context.
pub fn retrieve_evidence<'g>(
    graph: &'g Graph,
    cfg: &DiseasePairConfig,
    scenario: &ClinicalScenario,
) -> Result<(Vec<&'g Edge>, QueryTrace)> {
    let mut targets = classify_disease_context(&scenario.scenario_text, cfg);
    if targets.is_empty() {
        targets = cfg.short_names();
    }
    let mut trace = QueryTrace {
        target_diseases: targets.clone(),
        ..QueryTrace::default()
    };
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut evidence: Vec<&Edge> = Vec::new();
    let mut push_all = |edges: Vec<&'g Edge>, evidence: &mut Vec<&'g Edge>| {
        for e in edges {
            if seen.insert(e.edge_id.clone()) {
                evidence.push(e);
            }
        }
    };
    for disease in &targets {
        match scenario.output_type {
            OutputType::Differential => {
                trace.queries.push(format!("comparative({disease})"));
                push_all(graph.query_comparative(disease, cfg)?, &mut evidence);
            }
            OutputType::TemporalComparative | OutputType::Temporal => {
                trace.queries.push(format!("temporal({disease})"));
                push_all(graph.query_temporal(disease, cfg)?, &mut evidence);
                trace.queries.push(format!("comparative({disease})"));
                push_all(graph.query_comparative(disease, cfg)?, &mut evidence);
            }
            OutputType::Treatment => {
                trace.queries.push(format!("treatment({disease})"));
                push_all(graph.query_treatment(disease, cfg)?, &mut evidence);
            }
        }
        if let Some(spec) = cfg.disease(disease) {
            trace.queries.push(format!("neighbourhood({disease})"));
            push_all(
                graph.query_neighbourhood(&spec.full_name, None, Some(disease)),
                &mut evidence,
            );
        }
    }
    trace.edges_retrieved = evidence.len();
    Ok((evidence, trace))
}

/// Everything Phase II needs beyond the graph.
pub struct Phase2Inputs<'a> {
    pub graph: &'a Graph,
    pub cfg: &'a DiseasePairConfig,
    pub rag_corpus: &'a [Document],
    pub embedder: &'a dyn Embedder,
    pub provider: &'a dyn ModelProvider,
    pub params: GenerationParams,
    pub privacy: PrivacyConfig,
    pub strict_privacy: bool,
    /// Extra evidence edges appended after retrieval (counterfactuals).
    pub injected: Vec<Edge>,
}

/// Phase II: entity extraction -> retrieval -> evidence formatting ->
/// prompt -> synthesis. The privacy gate runs before any provider call.
pub fn run_phase2(
    inputs: &Phase2Inputs<'_>,
    scenario: &ClinicalScenario,
    arm: Arm,
) -> Result<(ClinicalOutput, QueryTrace)> {
    validate_privacy_config(&inputs.privacy, inputs.strict_privacy)?;
    match arm {
        Arm::Vanilla => {
            let prompt = build_prompt(arm, scenario, None)?;
            let output = synthesize(
                scenario,
                arm,
                &prompt,
                vec![],
                vec![],
                inputs.provider,
                &inputs.params,
            )?;
            Ok((output, QueryTrace::default()))
        }
        Arm::GuidelineRag => {
            let chunks = retrieve_rag_chunks(
                inputs.rag_corpus,
                &scenario.scenario_text,
                RAG_TOP_K,
                inputs.embedder,
            )?;
            let chunk_ids: Vec<String> = chunks.iter().map(|c| c.id.clone()).collect();
            let context = chunks
                .iter()
                .map(|c| c.text.as_str())
                .collect::<Vec<_>>()
                .join("\n---\n");
            let prompt = build_prompt(arm, scenario, Some(&context))?;
            let output = synthesize(
                scenario,
                arm,
                &prompt,
                vec![],
                chunk_ids,
                inputs.provider,
                &inputs.params,
            )?;
            Ok((output, QueryTrace::default()))
        }
        Arm::HegTkg => {
            let (mut evidence, trace) = retrieve_evidence(inputs.graph, inputs.cfg, scenario)?;
            for e in &inputs.injected {
                evidence.push(e);
            }
            let block = format_evidence_block(&evidence);
            let manifest: Vec<ManifestEntry> =
                evidence.iter().map(|e| ManifestEntry::from_edge(e)).collect();
            let prompt = build_prompt(arm, scenario, Some(&block))?;
            let output = synthesize(
                scenario,
                arm,
                &prompt,
                manifest,
                vec![],
                inputs.provider,
                &inputs.params,
            )?;
            Ok((output, trace))
        }
    }
}

/// Citation-audit aggregate over one arm's outputs: PMIDs are unique
/// across the arm, each classified in its own output's pair context.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmAuditSummary {
    pub arm: String,
    pub unique_pmids: usize,
    pub relevant: usize,
    pub wrong_field: usize,
    pub not_found: usize,
}

pub fn summarize_arm_audits(arm: Arm, audits: &[CitationAudit]) -> ArmAuditSummary {
    let mut verdict_by_pmid: BTreeMap<String, crate::citeverify::Verdict> = BTreeMap::new();
    for audit in audits {
        for (pmid, verdict, _, _) in &audit.verdicts {
            verdict_by_pmid.entry(pmid.clone()).or_insert(*verdict);
        }
    }
    let mut summary = ArmAuditSummary {
        arm: arm.label().to_string(),
        unique_pmids: verdict_by_pmid.len(),
        ..ArmAuditSummary::default()
    };
    for verdict in verdict_by_pmid.values() {
        match verdict {
            crate::citeverify::Verdict::Relevant => summary.relevant += 1,
            crate::citeverify::Verdict::WrongField => summary.wrong_field += 1,
            crate::citeverify::Verdict::NotFound => summary.not_found += 1,
        }
    }
    summary
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64 * 100.0
    }
}

/// Citation-audit summary table, one row per arm.
pub fn render_audit_table(summaries: &[ArmAuditSummary]) -> String {
    let mut out = String::from("arm | unique_pmids | relevant | wrong_field | not_found\n");
    for s in summaries {
        out.push_str(&format!(
            "{} | {} | {} ({:.1}%) | {} ({:.1}%) | {} ({:.1}%)\n",
            s.arm,
            s.unique_pmids,
            s.relevant,
            pct(s.relevant, s.unique_pmids),
            s.wrong_field,
            pct(s.wrong_field, s.unique_pmids),
            s.not_found,
            pct(s.not_found, s.unique_pmids),
        ));
    }
    out
}

/// Per-scenario metrics table in the released column layout.
pub fn render_metrics_table(rows: &[crate::files::MetricsRow]) -> String {
    let mut out = String::from("scenario | type | arm | FC | ETS | PG\n");
    for r in rows {
        out.push_str(&format!(
            "{} | {} | {} | {:.2} | {:.2} | {:.2}\n",
            r.scenario_id,
            r.output_type,
            r.arm.label(),
            r.fc,
            r.ets,
            r.pg
        ));
    }
    out
}

/// Judge tables: per (pair, arm, dimension) mean +- SD blocks.
pub fn render_judge_tables(round: Round, tables: &PanelTables) -> String {
    let mut out = format!("round {}\n", round.label());
    let mut current_pair = String::new();
    for ((pair, arm, dim), cell) in &tables.per_pair {
        if *pair != current_pair {
            current_pair = pair.clone();
            out.push_str(&format!("\n[{pair}]\ndimension | arm | mean | sd | n\n"));
        }
        out.push_str(&format!(
            "{} | {} | {:.2} | {:.2} | {}\n",
            dim,
            arm.label(),
            cell.mean,
            cell.sd,
            cell.n
        ));
    }
    if !tables.contrasts.is_empty() {
        out.push_str("\ncontrasts (graph arm vs baseline)\npair | dim | baseline | delta | d | q\n");
        for c in &tables.contrasts {
            out.push_str(&format!(
                "{} | {} | {} | {:+.2} | {:.2} | {:.4}\n",
                c.disease_pair,
                c.dimension,
                c.baseline.label(),
                c.delta,
                c.cohens_d,
                c.q_value
            ));
        }
    }
    out
}

/// Counterfactual results table.
pub fn render_cf_table(results: &[CfResult]) -> String {
    let n = results.len();
    let count = |o: crate::counterfactual::CfOutcome| {
        results.iter().filter(|r| r.outcome == o).count()
    };
    let detectable = results.iter().filter(|r| r.detectable).count();
    let mut out = String::from("outcome | count | percentage\n");
    use crate::counterfactual::CfOutcome::*;
    for (label, c) in [
        ("Parametric resistance", count(Resisted)),
        ("Partial incorporation", count(Partial)),
        ("Faithful to wrong evidence", count(Faithful)),
    ] {
        out.push_str(&format!("{label} | {c}/{n} | {:.0}%\n", pct(c, n)));
    }
    out.push_str(&format!(
        "Detectable via citation traceability | {detectable}/{n} | {:.0}%\n",
        pct(detectable, n)
    ));
    out
}

/// Graph structural statistics, one column per pair plus totals. The
/// source-PMID total is a cross-graph union when the caller supplies it
/// (a PMID may support edges in more than one pair's graph).
pub fn render_kg_stats(per_pair: &[(String, GraphStats)], pmid_union: Option<usize>) -> String {
    let mut total = GraphStats::default();
    for (_, s) in per_pair {
        total.add(s);
    }
    if let Some(union) = pmid_union {
        total.unique_pmids = union;
    }
    let mut out = String::from("statistic");
    for (pair, _) in per_pair {
        out.push_str(&format!(" | {pair}"));
    }
    out.push_str(" | total\n");
    type StatGetter = fn(&GraphStats) -> usize;
    let rows: [(&str, StatGetter); 5] = [
        ("nodes", |s| s.nodes),
        ("edges", |s| s.edges),
        ("temporal_anchors", |s| s.temporal_anchors),
        ("gold_edges", |s| s.gold_edges),
        ("unique_pmids", |s| s.unique_pmids),
    ];
    for (label, get) in rows {
        out.push_str(label);
        for (_, s) in per_pair {
            out.push_str(&format!(" | {}", get(s)));
        }
        out.push_str(&format!(" | {}\n", get(&total)));
    }
    out
}

/// Claim-support audit summary.
pub fn render_nli_summary(summary: &NliSummary) -> String {
    let mut out = format!(
        "n = {}\nENTAILS {} ({:.1}%)  CI ({:.1}%, {:.1}%)\nNEUTRAL {} ({:.1}%)\nCONTRADICTS {} ({:.1}%)  CI ({:.1}%, {:.1}%)\nnon-contradiction {:.1}%  CI ({:.1}%, {:.1}%)\n\ntier | n | entails | neutral | contradicts\n",
        summary.n,
        summary.entails,
        summary.entailment_rate * 100.0,
        summary.entailment_ci.0 * 100.0,
        summary.entailment_ci.1 * 100.0,
        summary.neutral,
        summary.neutral as f64 / summary.n as f64 * 100.0,
        summary.contradicts,
        summary.contradiction_rate * 100.0,
        summary.contradiction_ci.0 * 100.0,
        summary.contradiction_ci.1 * 100.0,
        summary.non_contradiction_rate * 100.0,
        summary.non_contradiction_ci.0 * 100.0,
        summary.non_contradiction_ci.1 * 100.0,
    );
    for t in &summary.by_tier {
        out.push_str(&format!(
            "{} | {} | {} | {} | {}\n",
            t.tier, t.n, t.entails, t.neutral, t.contradicts
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::{EntityMention, RawTriplet};
    use crate::providers::{EchoProvider, FixtureProvider};
    use crate::synthesis::HashingEmbedder;

    const CFG: &str = r#"
disease_pair: mg_lems
label: "Myasthenia gravis vs Lambert-Eaton"
classification:
  diseases:
    - short_name: MG
      full_name: Myasthenia gravis
      cuis: [C0026896]
      text_patterns: [myasthenia, "myasthenia gravis"]
    - short_name: LEMS
      full_name: Lambert-Eaton myasthenic syndrome
      cuis: [C0022972]
      text_patterns: [lambert-eaton, lems]
  shared:
    text_patterns: [neuromuscular junction]
temporal_predicates: [HAS_ONSET_AGE, GENERALIZED_AT]
relevance_keywords: [myasthenia, lambert-eaton]
"#;

    fn cfg() -> DiseasePairConfig {
        crate::pairconfig::load_config(CFG).unwrap()
    }

    fn abstract_(pmid: &str, text: &str) -> Abstract {
        Abstract {
            pmid: pmid.into(),
            title: "Myasthenia gravis cohort".into(),
            text: text.into(),
            mesh_terms: vec![],
            year: Some(2022),
        }
    }

    fn triplet(s: &str, p: &str, o: &str, quote: &str, phrase: Option<&str>) -> RawTriplet {
        RawTriplet {
            subject: EntityMention {
                surface: s.into(),
                type_label: "Disease".into(),
            },
            predicate: p.into(),
            object: EntityMention {
                surface: o.into(),
                type_label: "ClinicalFinding".into(),
            },
            evidence_quote: quote.into(),
            source_model: String::new(),
            pmid: String::new(),
            temporal_phrase: phrase.map(String::from),
        }
    }

    fn fixture_world() -> (Vec<Abstract>, FixtureProvider, FixtureProvider) {
        let a1 = abstract_(
            "111111",
            "Myasthenia gravis weakness generalizes within two years of onset in most patients.",
        );
        let a2 = abstract_(
            "222222",
            "In myasthenia gravis symptoms often generalize by age 40 in this cohort of adults.",
        );
        let a3 = abstract_(
            "333333",
            "An unrelated oncology report about colorectal screening outcomes in adults overall.",
        );
        let mut screen = FixtureProvider::new("model-a");
        screen.record_screen("111111", true, 0.95);
        screen.record_screen("222222", true, 0.9);
        screen.record_screen("333333", true, 0.6);
        screen.record_extract(
            "111111",
            vec![triplet(
                "myasthenia gravis",
                "GENERALIZED_AT",
                "generalized weakness",
                "weakness generalizes within two years of onset",
                Some("age 3 years"),
            )],
        );
        screen.record_extract(
            "222222",
            vec![triplet(
                "myasthenia gravis",
                "GENERALIZED_AT",
                "generalized weakness",
                "symptoms often generalize by age 40",
                Some("age 40 years"),
            )],
        );
        let mut second = FixtureProvider::new("model-b");
        second.record_extract(
            "111111",
            vec![triplet(
                "myasthenia gravis",
                "GENERALIZED_AT",
                "generalized weakness",
                "weakness generalizes within two years",
                Some("age 3 years"),
            )],
        );
        second.record_extract("222222", vec![]);
        (vec![a1, a2, a3], screen, second)
    }

    #[test]
    fn phase1_end_to_end_counts() {
        let (corpus, p1, p2) = fixture_world();
        let (graph, report) = run_phase1(&cfg(), &corpus, vec![], &[&p1, &p2], &p1).unwrap();
        assert_eq!(report.corpus_size, 3);
        assert_eq!(report.screen_passed, 2, "0.6 falls below the threshold");
        assert_eq!(report.triplets_extracted, 3);
        // Two pmids, one shared key: SILVER via multi-source agreement.
        assert_eq!(report.tier2_edges, 1);
        assert_eq!(report.tier_histogram.silver, 1);
        let edge = &graph.edges()[0];
        assert_eq!(edge.pmid_list.len(), 2);
        assert!(edge.disease_context.contains("MG"));
        assert!(edge.is_temporal);
        // Anchor conflict between P3Y and P40Y: majority is a tie, the
        // smaller pmid wins and one anchor lands in the merge log.
        assert_eq!(report.merge_discarded_anchors, 1);
        assert_eq!(report.stats.edges, 1);
    }

    #[test]
    fn phase1_empty_corpus_fails_at_screening() {
        let (_, p1, p2) = fixture_world();
        let err = run_phase1(&cfg(), &[], vec![], &[&p1, &p2], &p1).unwrap_err();
        match err {
            Error::Stage { stage, .. } => assert_eq!(stage, "screening"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn phase1_deterministic_with_fixtures() {
        let (corpus, p1, p2) = fixture_world();
        let (g1, _) = run_phase1(&cfg(), &corpus, vec![], &[&p1, &p2], &p1).unwrap();
        let (g2, _) = run_phase1(&cfg(), &corpus, vec![], &[&p1, &p2], &p1).unwrap();
        let export1 = crate::graphstore::export_import_script(&g1);
        let export2 = crate::graphstore::export_import_script(&g2);
        assert_eq!(export1, export2, "rerun yields a byte-identical export");
    }

    fn scenario(output_type: OutputType) -> ClinicalScenario {
        ClinicalScenario {
            id: "MG_LEMS_DDX_01".into(),
            disease_pair: "mg_lems".into(),
            output_type,
            scenario_text: "A patient with myasthenia gravis features and fatigable weakness.".into(),
            source_reference: String::new(),
            expected_key_features: vec!["fatigable".into()],
        }
    }

    #[test]
    fn phase2_routes_queries_by_output_type() {
        let (corpus, p1, p2) = fixture_world();
        let (graph, _) = run_phase1(&cfg(), &corpus, vec![], &[&p1, &p2], &p1).unwrap();
        let cfg = cfg();
        let rag = [Document {
            id: "guide".into(),
            text: "Myasthenia gravis treatment overview for clinicians. ".repeat(30),
        }];
        let embedder = HashingEmbedder::new();
        let provider = EchoProvider::new();
        let inputs = Phase2Inputs {
            graph: &graph,
            cfg: &cfg,
            rag_corpus: &rag,
            embedder: &embedder,
            provider: &provider,
            params: GenerationParams::default(),
            privacy: PrivacyConfig::default(),
            strict_privacy: true,
            injected: vec![],
        };
        let (out, trace) = run_phase2(&inputs, &scenario(OutputType::Differential), Arm::HegTkg).unwrap();
        assert!(trace.queries.iter().any(|q| q.starts_with("comparative")));
        assert!(trace.queries.iter().any(|q| q.starts_with("neighbourhood")));
        assert!(!out.evidence_manifest.is_empty() || trace.edges_retrieved == 0);

        let (_, ttrace) = run_phase2(&inputs, &scenario(OutputType::Temporal), Arm::HegTkg).unwrap();
        assert!(ttrace.queries.iter().any(|q| q.starts_with("temporal")));

        let (vout, vtrace) = run_phase2(&inputs, &scenario(OutputType::Differential), Arm::Vanilla).unwrap();
        assert!(vtrace.queries.is_empty());
        assert!(vout.evidence_manifest.is_empty());

        let (rout, _) = run_phase2(&inputs, &scenario(OutputType::Differential), Arm::GuidelineRag).unwrap();
        assert!(!rout.chunk_ids.is_empty());
    }

    #[test]
    fn phase2_privacy_gate_blocks_before_call() {
        let (corpus, p1, p2) = fixture_world();
        let (graph, _) = run_phase1(&cfg(), &corpus, vec![], &[&p1, &p2], &p1).unwrap();
        let cfg = cfg();
        let rag = [Document {
            id: "guide".into(),
            text: "reference".into(),
        }];
        let embedder = HashingEmbedder::new();
        let provider = EchoProvider::new();
        let inputs = Phase2Inputs {
            graph: &graph,
            cfg: &cfg,
            rag_corpus: &rag,
            embedder: &embedder,
            provider: &provider,
            params: GenerationParams::default(),
            privacy: PrivacyConfig::default()
                .with_component("synthesis", Some("https://api.example.com".into())),
            strict_privacy: true,
            injected: vec![],
        };
        let err = run_phase2(&inputs, &scenario(OutputType::Differential), Arm::Vanilla).unwrap_err();
        assert!(matches!(err, Error::Privacy { .. }));
    }

    #[test]
    fn report_rendering_deterministic() {
        let summaries = vec![ArmAuditSummary {
            arm: "heg_tkg".into(),
            unique_pmids: 3,
            relevant: 3,
            wrong_field: 0,
            not_found: 0,
        }];
        let a = render_audit_table(&summaries);
        assert_eq!(a, render_audit_table(&summaries));
        assert!(a.contains("heg_tkg | 3 | 3 (100.0%)"));

        let empty_cf = render_cf_table(&[]);
        assert!(empty_cf.starts_with("outcome | count | percentage"));
    }
}
