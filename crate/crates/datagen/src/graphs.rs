//! Released knowledge-graph builders: three per-pair graphs with pinned
//! structural totals (nodes, edges, resolved anchors, GOLD edges, unique
//! PMIDs).

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use anyhow::{ensure, Result};

use tracekg::consensus::{edge_key, Edge, QualityTier};
use tracekg::graphstore::{write_edge_records, write_node_records, Graph, Node};
use tracekg::normalize::{EntityType, NormalizedEntity, ResolverKind};
use tracekg::pairconfig::DiseasePairConfig;
use tracekg::temporal::{IsoDuration, Precision, TemporalAnchor};

pub struct GraphTargets {
    pub pair: &'static str,
    pub nodes: usize,
    pub edges: usize,
    pub anchors: usize,
    pub gold: usize,
    pub protected: usize,
    pub silver: usize,
    pub pmids: usize,
    pub pmid_base: u64,
    /// How many pool PMIDs the released outputs cite.
    pub output_pool: usize,
}

pub const TARGETS: [GraphTargets; 3] = [
    GraphTargets { pair: "mg_lems", nodes: 1777, edges: 1999, anchors: 361, gold: 70, protected: 33, silver: 180, pmids: 294, pmid_base: 60_000_000, output_pool: 48 },
    GraphTargets { pair: "dmd_bmd", nodes: 1514, edges: 1686, anchors: 483, gold: 111, protected: 34, silver: 152, pmids: 308, pmid_base: 61_000_000, output_pool: 85 },
    GraphTargets { pair: "cidp_gbs", nodes: 2190, edges: 2631, anchors: 436, gold: 50, protected: 34, silver: 237, pmids: 386, pmid_base: 62_000_000, output_pool: 70 },
];

pub fn targets_for(pair: &str) -> &'static GraphTargets {
    TARGETS.iter().find(|t| t.pair == pair).expect("known pair")
}

pub fn pool_pmids(t: &GraphTargets) -> Vec<String> {
    let mut pool: Vec<String> = (0..t.pmids).map(|i| (t.pmid_base + i as u64).to_string()).collect();
    // One source PMID is shared between the cidp_gbs and dmd_bmd graphs,
    // so the cross-pair union is one short of the per-pair sum.
    if t.pair == "cidp_gbs" {
        let dmd_base = targets_for("dmd_bmd").pmid_base;
        *pool.last_mut().unwrap() = dmd_base.to_string();
    }
    pool
}

pub fn output_pool_pmids(t: &GraphTargets) -> Vec<String> {
    pool_pmids(t).into_iter().take(t.output_pool).collect()
}

const TEMPORAL_PREDICATES: [&str; 10] = [
    "HAS_ONSET_AGE",
    "HAS_DIAGNOSIS_AGE",
    "GENERALIZED_AT",
    "CRISIS_AT",
    "REMISSION_AT",
    "DEVELOPS_COMPLICATION_AT",
    "REQUIRES_INTERVENTION_AT",
    "HAS_SURVIVAL_TO",
    "HAS_DURATION",
    "PRECEDES",
];

const PLAIN_PREDICATES: [&str; 10] = [
    "ASSOCIATED_WITH",
    "MANIFESTS_AS",
    "TREATED_WITH",
    "RESPONDS_TO",
    "HAS_MEASUREMENT",
    "HAS_SEVERITY",
    "HAS_PREVALENCE",
    "LACKS_FEATURE",
    "DIFFERENTIATES_FROM",
    "PRESERVES_FUNCTION",
];

const NODE_TOPICS: [&str; 14] = [
    "antibody response",
    "muscle biopsy finding",
    "conduction parameter",
    "treatment exposure",
    "functional milestone",
    "serum marker",
    "respiratory measure",
    "cardiac parameter",
    "patient cohort",
    "genetic variant",
    "clinical sign",
    "autonomic feature",
    "imaging finding",
    "care pathway",
];

const SYNTH_LABELS: [EntityType; 12] = [
    EntityType::Symptom,
    EntityType::ClinicalFinding,
    EntityType::Measurement,
    EntityType::Treatment,
    EntityType::Procedure,
    EntityType::Gene,
    EntityType::Protein,
    EntityType::PatientGroup,
    EntityType::Mutation,
    EntityType::Autoantibody,
    EntityType::PhysiologicalFunction,
    EntityType::Entity,
];

fn anchor_for(j: usize) -> TemporalAnchor {
    match j % 3 {
        0 => {
            let years = 1 + (j / 3) % 30;
            TemporalAnchor::resolved(
                IsoDuration::from_years(years as u32),
                IsoDuration::from_years(years as u32),
                Precision::Exact,
            )
        }
        1 => {
            let start = 1 + (j / 3) % 25;
            let span = 2 + j % 4;
            TemporalAnchor::resolved(
                IsoDuration::from_years(start as u32),
                IsoDuration::from_years((start + span) as u32),
                Precision::Range,
            )
        }
        _ => {
            let months = 1 + (j / 3) % 11;
            TemporalAnchor::resolved(
                IsoDuration::from_months(months as u32),
                IsoDuration::from_months(months as u32),
                Precision::Exact,
            )
        }
    }
}

fn entity_of(node: &Node) -> NormalizedEntity {
    NormalizedEntity {
        surface: node.name.clone(),
        cui: node.cui.clone(),
        type_label: node.label,
        resolver_used: ResolverKind::None,
    }
}

/// Build one pair's graph with exact structural totals.
pub fn build_graph(cfg: &DiseasePairConfig, t: &GraphTargets) -> Result<Graph> {
    let mut nodes: Vec<Node> = Vec::with_capacity(t.nodes);
    for (i, d) in cfg.diseases().iter().enumerate() {
        nodes.push(Node {
            key: d.cuis[0].to_lowercase(),
            name: d.full_name.clone(),
            cui: Some(d.cuis[0].clone()),
            label: EntityType::Disease,
            short_name: Some(d.short_name.clone()),
            mondo_id: d.mondo_id.clone(),
        });
        let _ = i;
    }
    let cui_base = 5_000_000 + (t.pmid_base / 1_000_000 - 60) * 100_000;
    for i in nodes.len()..t.nodes {
        let topic = NODE_TOPICS[i % NODE_TOPICS.len()];
        let cui = if i % 3 == 0 {
            Some(format!("C{:07}", cui_base as usize + i))
        } else {
            None
        };
        nodes.push(Node {
            key: match &cui {
                Some(c) => c.to_lowercase(),
                None => format!("{} {} {:04}", t.pair, topic, i),
            },
            name: format!("{} {} {:04}", t.pair, topic, i),
            cui,
            label: SYNTH_LABELS[i % SYNTH_LABELS.len()],
            short_name: None,
            mondo_id: None,
        });
    }

    let pool = pool_pmids(t);
    let shorts = cfg.short_names();
    let mut graph = Graph::new();
    for node in &nodes {
        graph.insert_node(node.clone());
    }

    let unresolved_extra = 5usize;
    let mut seen_keys: HashSet<String> = HashSet::new();
    let mut nonprot_counter = 0usize;
    for j in 0..t.edges {
        let subject_idx = j % t.nodes;
        let mut object_idx = (j * 31 + 7) % t.nodes;
        let (predicate, anchor, is_temporal) = if j < t.anchors {
            (
                TEMPORAL_PREDICATES[j % TEMPORAL_PREDICATES.len()].to_string(),
                Some(anchor_for(j)),
                true,
            )
        } else if j < t.anchors + unresolved_extra {
            (
                TEMPORAL_PREDICATES[j % TEMPORAL_PREDICATES.len()].to_string(),
                Some(TemporalAnchor::unresolved()),
                true,
            )
        } else {
            (
                PLAIN_PREDICATES[j % PLAIN_PREDICATES.len()].to_string(),
                None,
                false,
            )
        };

        // Distinct normalized (s, p, o) per edge.
        let (subject, object, key) = loop {
            if object_idx == subject_idx {
                object_idx = (object_idx + 1) % t.nodes;
                continue;
            }
            let subject = entity_of(&nodes[subject_idx]);
            let object = entity_of(&nodes[object_idx]);
            let key = edge_key(&subject, &predicate, &object);
            if seen_keys.insert(key.clone()) {
                break (subject, object, key);
            }
            object_idx = (object_idx + 1) % t.nodes;
        };

        let protected = j < t.protected;
        let tier = if j < t.gold {
            QualityTier::Gold
        } else if j < t.gold + t.silver {
            QualityTier::Silver
        } else {
            QualityTier::Bronze
        };
        let (pmid_list, source_models): (BTreeSet<String>, BTreeSet<String>) = if protected {
            (BTreeSet::new(), BTreeSet::from(["curated".to_string()]))
        } else {
            let mut pmids = BTreeSet::from([pool[nonprot_counter % pool.len()].clone()]);
            if nonprot_counter.is_multiple_of(5) {
                pmids.insert(pool[(nonprot_counter * 7 + 3) % pool.len()].clone());
            }
            let models = if tier == QualityTier::Silver {
                BTreeSet::from(["model-a".to_string(), "model-b".to_string()])
            } else {
                BTreeSet::from([if j % 2 == 0 { "model-a" } else { "model-b" }.to_string()])
            };
            nonprot_counter += 1;
            (pmids, models)
        };
        let context: BTreeSet<String> = match j % 3 {
            0 => BTreeSet::from([shorts[0].clone()]),
            1 => BTreeSet::from([shorts[1].clone()]),
            _ => shorts.iter().cloned().collect(),
        };
        let breadth = pmid_list.len();
        let anchor_display = anchor
            .as_ref()
            .filter(|a| a.is_resolved())
            .map(|a| format!(" around {}", a.display()))
            .unwrap_or_default();
        let edge = Edge {
            edge_id: key,
            subject: subject.clone(),
            predicate: predicate.clone(),
            object: object.clone(),
            quality_tier: tier,
            consensus_score: tier.consensus_score(),
            source_models,
            pmid_list,
            evidence_sample: format!(
                "{} {} {}{}",
                subject.surface,
                predicate.to_lowercase().replace('_', " "),
                object.surface,
                anchor_display
            ),
            is_temporal,
            anchor,
            cross_tier_confirmed: tier == QualityTier::Gold && !protected,
            evidence_breadth: breadth,
            disease_context: context,
            is_protected: protected,
        };
        graph.insert_edge(edge)?;
    }

    let stats = graph.stats();
    ensure!(stats.nodes == t.nodes, "{}: nodes {} != {}", t.pair, stats.nodes, t.nodes);
    ensure!(stats.edges == t.edges, "{}: edges {} != {}", t.pair, stats.edges, t.edges);
    ensure!(
        stats.temporal_anchors == t.anchors,
        "{}: anchors {} != {}",
        t.pair,
        stats.temporal_anchors,
        t.anchors
    );
    ensure!(stats.gold_edges == t.gold, "{}: gold {} != {}", t.pair, stats.gold_edges, t.gold);
    ensure!(
        stats.unique_pmids == t.pmids,
        "{}: pmids {} != {}",
        t.pair,
        stats.unique_pmids,
        t.pmids
    );
    Ok(graph)
}

pub fn write_graphs(root: &Path, cfgs: &[(String, DiseasePairConfig)]) -> Result<()> {
    for t in &TARGETS {
        let cfg = &cfgs.iter().find(|(p, _)| p == t.pair).expect("config").1;
        let graph = build_graph(cfg, t)?;
        let dir = root.join("released").join("graphs").join(t.pair);
        std::fs::create_dir_all(&dir)?;
        write_node_records(&graph, dir.join("nodes.jsonl"))?;
        write_edge_records(graph.edges(), dir.join("edges.jsonl"))?;
    }
    Ok(())
}
