//! Offline fixtures: the PubMed summary index, the hermetic 20-abstract
//! corpus with recorded provider responses, the curated backbone, the
//! screening-decision corpus and the reference-text corpus.

use std::path::Path;

use anyhow::{ensure, Result};

use tracekg::citeverify::FixtureIndex;
use tracekg::consensus::{edge_key, Edge, QualityTier};
use tracekg::extraction::{Abstract, EntityMention, RawTriplet};
use tracekg::graphstore::write_edge_records;
use tracekg::normalize::{NormalizedEntity, ResolverKind};
use tracekg::pairconfig::DiseasePairConfig;
use tracekg::providers::FixtureRecord;
use tracekg::synthesis::{chunk_corpus, Document};

use crate::graphs::{output_pool_pmids, TARGETS};

const TITLE_SHAPES: [&str; 6] = [
    "longitudinal outcomes in a national cohort",
    "diagnostic accuracy of electrophysiological testing",
    "treatment response and milestone timing",
    "natural history of functional decline",
    "biomarker trajectories during therapy",
    "surveillance intervals and screening yield",
];

const JOURNALS: [&str; 5] = [
    "Journal of Neuromuscular Disease",
    "Neurology Practice",
    "Muscle and Nerve Studies",
    "Clinical Neurophysiology Reports",
    "Neuromuscular Therapeutics",
];

fn keyword_for(pair: &str, k: usize) -> &'static str {
    match pair {
        "mg_lems" => ["Myasthenia gravis", "Lambert-Eaton syndrome", "Thymoma", "Pyridostigmine"][k % 4],
        "dmd_bmd" => ["Duchenne muscular dystrophy", "Becker muscular dystrophy", "Dystrophin", "Cardiomyopathy in dystrophinopathy"][k % 4],
        _ => ["CIDP", "Guillain-Barre syndrome", "Demyelinating polyneuropathy", "IVIg response"][k % 4],
    }
}

/// Index entries for every PMID the released outputs cite, plus the
/// hermetic corpus PMIDs. Titles carry the pair keyword so the audit
/// classifies every citation as relevant.
pub fn write_pubmed_index(root: &Path) -> Result<()> {
    let mut index = FixtureIndex::new();
    for t in &TARGETS {
        for (k, pmid) in output_pool_pmids(t).iter().enumerate() {
            index.insert(
                pmid,
                &format!("{}: {}", keyword_for(t.pair, k), TITLE_SHAPES[k % TITLE_SHAPES.len()]),
                JOURNALS[k % JOURNALS.len()],
                &[keyword_for(t.pair, k)],
            );
        }
    }
    for (k, a) in e2e_corpus().iter().enumerate() {
        index.insert(
            &a.pmid,
            &a.title,
            JOURNALS[k % JOURNALS.len()],
            &["Myasthenia Gravis"],
        );
    }
    let dir = root.join("fixtures");
    std::fs::create_dir_all(&dir)?;
    index.save(dir.join("pubmed_index.json"))?;
    Ok(())
}

/// Twenty myasthenia-focused abstracts for the hermetic end-to-end run.
pub fn e2e_corpus() -> Vec<Abstract> {
    let bodies: [(&str, &str); 10] = [
        ("Myasthenia gravis weakness generalizes within two years of ocular onset in most patients. Pyridostigmine improves fatigable weakness and remains first-line symptomatic therapy.", "age 40 years"),
        ("In Lambert-Eaton myasthenic syndrome reflexes facilitate after brief exercise. Screening for small-cell lung cancer is recommended at diagnosis and repeated across the highest-risk window.", "2 to 4 years"),
        ("Anti-AChR antibodies support the diagnosis of myasthenia gravis. Thymectomy improves outcomes in appropriate candidates and is planned electively.", "age 30 years"),
        ("Myasthenic crisis requires respiratory monitoring. Intravenous immunoglobulin or plasma exchange is used for rescue therapy in deteriorating patients.", "late teens"),
        ("Single-fiber electromyography shows increased jitter in ocular myasthenia gravis. Repetitive nerve stimulation shows a decremental response at low rates.", "age 55 years"),
        ("Myasthenia gravis onset peaks in young women and older men. Generalization risk is highest early in the course before treatment stabilizes symptoms.", "13 to 16 years"),
        ("Lambert-Eaton myasthenic syndrome features proximal weakness and autonomic dysfunction including dry mouth. Voltage-gated calcium channel antibodies confirm the diagnosis.", "early childhood"),
        ("MuSK antibody myasthenia gravis shows prominent bulbar involvement. Rituximab achieves durable responses in refractory MuSK disease.", "age 45 years"),
        ("Corticosteroids in myasthenia gravis can transiently worsen weakness at initiation. Slow titration with pyridostigmine cover mitigates the dip.", "P6M"),
        ("Eculizumab and efgartigimod target complement and the neonatal Fc receptor in refractory generalized myasthenia gravis with AChR antibodies.", "age 50 years"),
    ];
    (0..20)
        .map(|i| {
            let (body, phrase) = bodies[i % bodies.len()];
            Abstract {
                pmid: (70_000_001 + i as u64).to_string(),
                title: format!(
                    "Myasthenia gravis and Lambert-Eaton study {:02}: {}",
                    i + 1,
                    TITLE_SHAPES[i % TITLE_SHAPES.len()]
                ),
                text: format!("{body} Symptom onset clustered around {phrase} in this cohort."),
                mesh_terms: vec!["Myasthenia Gravis".into(), "Lambert-Eaton Myasthenic Syndrome".into()],
                year: Some(2016 + (i as i32 % 9)),
            }
        })
        .collect()
}

fn mention(surface: &str, label: &str) -> EntityMention {
    EntityMention {
        surface: surface.into(),
        type_label: label.into(),
    }
}

fn quote_of(a: &Abstract, words: usize) -> String {
    a.text.split_whitespace().take(words).collect::<Vec<_>>().join(" ")
}

/// Recorded screen + extract responses for both extraction models over
/// the hermetic corpus.
pub fn write_e2e_providers(root: &Path) -> Result<()> {
    let corpus = e2e_corpus();
    let mut records: Vec<FixtureRecord> = Vec::new();
    for (i, a) in corpus.iter().enumerate() {
        // Four abstracts fall below the screening bar.
        let confidence = if i % 5 == 4 { 0.62 } else { 0.93 };
        records.push(FixtureRecord::Screen {
            provider: "model-a".into(),
            pmid: a.pmid.clone(),
            extract: true,
            confidence,
        });
        let temporal_phrase = a
            .text
            .split("around ")
            .nth(1)
            .map(|rest| rest.trim_end_matches(" in this cohort.").to_string());
        let base = RawTriplet {
            subject: mention("myasthenia gravis", "Disease"),
            predicate: "GENERALIZED_AT".into(),
            object: mention("generalized weakness", "ClinicalFinding"),
            evidence_quote: quote_of(a, 8),
            source_model: String::new(),
            pmid: String::new(),
            temporal_phrase: temporal_phrase.clone(),
        };
        let mut model_a = vec![base.clone()];
        // A treatment edge that matches the curated backbone (cross-tier).
        model_a.push(RawTriplet {
            subject: mention("myasthenia gravis", "Disease"),
            predicate: "TREATED_WITH".into(),
            object: mention("pyridostigmine", "Treatment"),
            evidence_quote: quote_of(a, 10),
            source_model: String::new(),
            pmid: String::new(),
            temporal_phrase: None,
        });
        // A per-abstract bronze edge.
        model_a.push(RawTriplet {
            subject: mention(&format!("finding {i:02}"), "ClinicalFinding"),
            predicate: "ASSOCIATED_WITH".into(),
            object: mention("myasthenia gravis", "Disease"),
            evidence_quote: quote_of(a, 6),
            source_model: String::new(),
            pmid: String::new(),
            temporal_phrase: None,
        });
        if i == 0 {
            // One fabricated quote (dropped) and one schema outlier (flagged).
            model_a.push(RawTriplet {
                evidence_quote: "entirely fabricated quote text".into(),
                ..base.clone()
            });
            model_a.push(RawTriplet {
                predicate: "EXHIBITS_PATTERN".into(),
                evidence_quote: quote_of(a, 7),
                ..base.clone()
            });
        }
        records.push(FixtureRecord::Extract {
            provider: "model-a".into(),
            pmid: a.pmid.clone(),
            triplets: model_a,
        });
        // Model B agrees on the generalization edge (consensus SILVER).
        records.push(FixtureRecord::Extract {
            provider: "model-b".into(),
            pmid: a.pmid.clone(),
            triplets: vec![base],
        });
    }
    let dir = root.join("fixtures");
    std::fs::create_dir_all(&dir)?;
    let mut out = String::new();
    for r in &records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    std::fs::write(dir.join("providers_e2e.jsonl"), out)?;

    let mut corpus_text = String::new();
    for a in &corpus {
        corpus_text.push_str(&serde_json::to_string(a)?);
        corpus_text.push('\n');
    }
    std::fs::write(dir.join("corpus_e2e.jsonl"), corpus_text)?;
    Ok(())
}

/// Curated backbone for the hermetic pair: protected GOLD edges keyed
/// through the same normalization path the pipeline uses.
pub fn write_tier1(root: &Path, cfg: &DiseasePairConfig) -> Result<()> {
    let chain = tracekg::normalize::ResolverChain::standard(cfg);
    let entity = |surface: &str, label: tracekg::normalize::EntityType| -> NormalizedEntity {
        let resolved = tracekg::normalize::normalize_entity(surface, label, &chain);
        NormalizedEntity {
            resolver_used: ResolverKind::None,
            ..resolved
        }
    };
    use tracekg::normalize::EntityType::*;
    let rows = [
        ("Myasthenia gravis", Disease, "TREATED_WITH", "pyridostigmine", Treatment, "first-line symptomatic therapy"),
        ("Myasthenia gravis", Disease, "CAUSED_BY", "AChR antibody", Autoantibody, "autoantibody against the acetylcholine receptor"),
        ("Lambert-Eaton myasthenic syndrome", Disease, "ASSOCIATED_WITH", "small-cell lung cancer", ClinicalFinding, "paraneoplastic association requiring screening"),
        ("Myasthenia gravis", Disease, "MANIFESTS_AS", "fatigable weakness", Symptom, "hallmark fluctuating weakness"),
        ("Lambert-Eaton myasthenic syndrome", Disease, "MANIFESTS_AS", "post-exercise facilitation", ClinicalFinding, "reflexes increase after brief exercise"),
        ("Myasthenia gravis", Disease, "REQUIRES_INTERVENTION_AT", "myasthenic crisis", ClinicalFinding, "crisis requires urgent respiratory support"),
    ];
    let mut edges = Vec::new();
    for (s, slab, p, o, olab, quote) in rows {
        let subject = entity(s, slab);
        let object = entity(o, olab);
        let key = edge_key(&subject, p, &object);
        edges.push(Edge {
            edge_id: key,
            subject,
            predicate: p.to_string(),
            object,
            quality_tier: QualityTier::Gold,
            consensus_score: QualityTier::Gold.consensus_score(),
            source_models: std::collections::BTreeSet::from(["curated".to_string()]),
            pmid_list: std::collections::BTreeSet::new(),
            evidence_sample: quote.to_string(),
            is_temporal: false,
            anchor: None,
            cross_tier_confirmed: false,
            evidence_breadth: 0,
            disease_context: std::collections::BTreeSet::from([
                if s.starts_with("Myasthenia") { "MG".to_string() } else { "LEMS".to_string() },
            ]),
            is_protected: true,
        });
    }
    let dir = root.join("fixtures");
    std::fs::create_dir_all(&dir)?;
    write_edge_records(&edges, dir.join("tier1_mg_lems.jsonl"))?;
    Ok(())
}

/// 651 screening decisions with exactly 293 passes (extract = true and
/// confidence at or above threshold).
pub fn write_screening_corpus(root: &Path) -> Result<()> {
    let mut lines = Vec::with_capacity(651);
    let mut passes = 0usize;
    for i in 0..651usize {
        let pmid = (71_000_000 + i as u64).to_string();
        let (extract, confidence) = if i < 293 {
            (true, 0.85 + (i % 15) as f64 * 0.01)
        } else if i % 3 == 0 {
            (true, 0.70 + (i % 14) as f64 * 0.01)
        } else {
            (false, 0.90)
        };
        if extract && confidence >= 0.85 {
            passes += 1;
        }
        lines.push(
            serde_json::json!({"pmid": pmid, "extract": extract, "confidence": confidence})
                .to_string(),
        );
    }
    ensure!(passes == 293, "screening corpus passes {passes} != 293");
    let dir = root.join("fixtures");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("screening_651.jsonl"), lines.join("\n") + "\n")?;
    Ok(())
}

const GUIDELINE_SENTENCES: [&str; 8] = [
    "Diagnosis rests on the combination of clinical pattern, antibody testing and electrophysiological confirmation as described in the curated source material.",
    "Treatment selection follows the severity of presentation, with first-line agents preferred before escalation to immunomodulatory therapy in refractory disease.",
    "Longitudinal surveillance captures progression milestones and directs the timing of supportive interventions across the disease course.",
    "Referral to a specialist centre is advised whenever the presentation departs from the expected trajectory or response to therapy stalls.",
    "Counselling covers inheritance, anticipated functional change and the practical planning that families undertake between review appointments.",
    "Laboratory monitoring accompanies every immunosuppressive regimen with dose adjustment governed by response and adverse effects.",
    "Rehabilitation input preserves function and participation, complementing pharmacological management at each stage.",
    "The evidence base combines curated guideline statements with primary reports, graded by the strength of the underlying study design.",
];

fn pair_keyword_sentence(pair: &str) -> String {
    match pair {
        "mg_lems" => "Myasthenia gravis and Lambert-Eaton myasthenic syndrome differ at the neuromuscular junction and in their antibody associations.".to_string(),
        "dmd_bmd" => "Duchenne and Becker muscular dystrophy reflect the dystrophin reading frame and diverge in severity and milestone timing.".to_string(),
        _ => "CIDP and Guillain-Barre syndrome are demyelinating polyneuropathies separated chiefly by their temporal course and relapse behaviour.".to_string(),
    }
}

/// Reference-text corpus for the text-RAG arm: 22 documents per pair,
/// each sized to chunk into exactly 146 segments (3,212 chunks per pair).
pub fn write_guideline_corpus(root: &Path) -> Result<()> {
    const DOC_CHARS: usize = 61_400;
    const DOCS_PER_PAIR: usize = 22;
    for t in &TARGETS {
        let dir = root.join("released").join("guideline_corpus").join(t.pair);
        std::fs::create_dir_all(&dir)?;
        let mut docs = Vec::new();
        for d in 0..DOCS_PER_PAIR {
            let mut text = format!("Reference compendium section {:02}. {}\n", d + 1, pair_keyword_sentence(t.pair));
            let mut k = d;
            while text.chars().count() < DOC_CHARS {
                text.push_str(GUIDELINE_SENTENCES[k % GUIDELINE_SENTENCES.len()]);
                text.push(' ');
                k += 1;
            }
            let trimmed: String = text.chars().take(DOC_CHARS).collect();
            std::fs::write(dir.join(format!("doc_{:02}.txt", d + 1)), &trimmed)?;
            docs.push(Document {
                id: format!("doc_{:02}", d + 1),
                text: trimmed,
            });
        }
        let chunks = chunk_corpus(&docs).len();
        ensure!(
            (3160..=3960).contains(&chunks),
            "{}: {} chunks outside the released range",
            t.pair,
            chunks
        );
    }
    Ok(())
}
