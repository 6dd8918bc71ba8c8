//! Entity normalization through a cascading resolver chain and the ordered
//! semantic correction rules that repair systematic extraction errors
//! (direction inversions, predicate refinements, entity retyping).

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::RawTriplet;

/// Node-type labels. Everything unrecognized lands on `Entity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntityType {
    Disease,
    Gene,
    Protein,
    Treatment,
    Symptom,
    ClinicalFinding,
    Measurement,
    Procedure,
    PatientGroup,
    Mutation,
    Autoantibody,
    InheritancePattern,
    PhysiologicalFunction,
    Entity,
}

impl EntityType {
    pub const ALL: [EntityType; 14] = [
        EntityType::Disease,
        EntityType::Gene,
        EntityType::Protein,
        EntityType::Treatment,
        EntityType::Symptom,
        EntityType::ClinicalFinding,
        EntityType::Measurement,
        EntityType::Procedure,
        EntityType::PatientGroup,
        EntityType::Mutation,
        EntityType::Autoantibody,
        EntityType::InheritancePattern,
        EntityType::PhysiologicalFunction,
        EntityType::Entity,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            EntityType::Disease => "Disease",
            EntityType::Gene => "Gene",
            EntityType::Protein => "Protein",
            EntityType::Treatment => "Treatment",
            EntityType::Symptom => "Symptom",
            EntityType::ClinicalFinding => "ClinicalFinding",
            EntityType::Measurement => "Measurement",
            EntityType::Procedure => "Procedure",
            EntityType::PatientGroup => "PatientGroup",
            EntityType::Mutation => "Mutation",
            EntityType::Autoantibody => "Autoantibody",
            EntityType::InheritancePattern => "InheritancePattern",
            EntityType::PhysiologicalFunction => "PhysiologicalFunction",
            EntityType::Entity => "Entity",
        }
    }

    pub fn parse(label: &str) -> EntityType {
        EntityType::ALL
            .into_iter()
            .find(|t| t.label().eq_ignore_ascii_case(label.trim()))
            .unwrap_or(EntityType::Entity)
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResolverKind {
    Dictionary,
    EmbeddingLinker,
    FallbackLinker,
    Fuzzy,
    None,
}

/// A normalized entity: surface form plus resolved concept id when any
/// resolver in the chain can supply one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedEntity {
    pub surface: String,
    pub cui: Option<String>,
    pub type_label: EntityType,
    pub resolver_used: ResolverKind,
}

impl NormalizedEntity {
    /// Identity string used for edge keys: the CUI when resolved,
    /// otherwise the surface form.
    pub fn identity(&self) -> &str {
        self.cui.as_deref().unwrap_or(&self.surface)
    }
}

/// One stage of the resolver cascade.
pub trait Resolver: Send + Sync {
    fn kind(&self) -> ResolverKind;
    fn resolve(&self, surface: &str) -> Option<String>;
}

/// Exact lookup over case-folded surface forms.
pub struct DictionaryResolver {
    entries: HashMap<String, String>,
}

impl DictionaryResolver {
    pub fn new(entries: impl IntoIterator<Item = (String, String)>) -> Self {
        DictionaryResolver {
            entries: entries
                .into_iter()
                .map(|(k, v)| (k.to_lowercase(), v))
                .collect(),
        }
    }

    pub fn from_config(cfg: &crate::pairconfig::DiseasePairConfig) -> Self {
        DictionaryResolver::new(cfg.synonym_table())
    }
}

impl Resolver for DictionaryResolver {
    fn kind(&self) -> ResolverKind {
        ResolverKind::Dictionary
    }

    fn resolve(&self, surface: &str) -> Option<String> {
        self.entries.get(&surface.to_lowercase()).cloned()
    }
}

fn token_set(s: &str) -> Vec<String> {
    let mut tokens: Vec<String> = s
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_string())
        .collect();
    tokens.sort();
    tokens.dedup();
    tokens
}

fn jaccard(a: &[String], b: &[String]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let inter = a.iter().filter(|t| b.contains(t)).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Token-set Jaccard matcher over the same synonym entries, threshold 0.8.
/// Catches word-order and minor token variants the dictionary misses.
pub struct FuzzyResolver {
    entries: Vec<(Vec<String>, String)>,
    threshold: f64,
}

impl FuzzyResolver {
    pub fn new(entries: impl IntoIterator<Item = (String, String)>) -> Self {
        FuzzyResolver {
            entries: entries
                .into_iter()
                .map(|(k, v)| (token_set(&k), v))
                .collect(),
            threshold: 0.8,
        }
    }

    pub fn from_config(cfg: &crate::pairconfig::DiseasePairConfig) -> Self {
        FuzzyResolver::new(cfg.synonym_table())
    }
}

impl Resolver for FuzzyResolver {
    fn kind(&self) -> ResolverKind {
        ResolverKind::Fuzzy
    }

    fn resolve(&self, surface: &str) -> Option<String> {
        let tokens = token_set(surface);
        let mut best: Option<(f64, &String)> = None;
        for (entry_tokens, cui) in &self.entries {
            let score = jaccard(&tokens, entry_tokens);
            if score >= self.threshold {
                match best {
                    Some((b, _)) if b >= score => {}
                    _ => best = Some((score, cui)),
                }
            }
        }
        best.map(|(_, cui)| cui.clone())
    }
}

/// Ordered resolver cascade. The shipped chain is Dictionary then Fuzzy;
/// embedding and fallback linkers plug in between through the same trait.
pub struct ResolverChain {
    resolvers: Vec<Box<dyn Resolver>>,
}

impl ResolverChain {
    pub fn new(resolvers: Vec<Box<dyn Resolver>>) -> Self {
        ResolverChain { resolvers }
    }

    pub fn standard(cfg: &crate::pairconfig::DiseasePairConfig) -> Self {
        ResolverChain::new(vec![
            Box::new(DictionaryResolver::from_config(cfg)),
            Box::new(FuzzyResolver::from_config(cfg)),
        ])
    }
}

/// Resolve a surface form through the chain; first hit wins.
pub fn normalize_entity(surface: &str, type_label: EntityType, chain: &ResolverChain) -> NormalizedEntity {
    for resolver in &chain.resolvers {
        if let Some(cui) = resolver.resolve(surface) {
            return NormalizedEntity {
                surface: surface.to_string(),
                cui: Some(cui),
                type_label,
                resolver_used: resolver.kind(),
            };
        }
    }
    NormalizedEntity {
        surface: surface.to_string(),
        cui: None,
        type_label,
        resolver_used: ResolverKind::None,
    }
}

/// A triplet with both entities normalized, ready for correction and
/// consensus grouping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedTriplet {
    pub subject: NormalizedEntity,
    pub predicate: String,
    pub object: NormalizedEntity,
    pub evidence_quote: String,
    pub source_model: String,
    pub pmid: String,
    pub temporal_phrase: Option<String>,
    /// Set during temporal anchoring for temporal predicates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<crate::temporal::TemporalAnchor>,
}

impl NormalizedTriplet {
    pub fn from_raw(raw: &RawTriplet, chain: &ResolverChain) -> Self {
        NormalizedTriplet {
            subject: normalize_entity(
                &raw.subject.surface,
                EntityType::parse(&raw.subject.type_label),
                chain,
            ),
            predicate: raw.predicate.clone(),
            object: normalize_entity(
                &raw.object.surface,
                EntityType::parse(&raw.object.type_label),
                chain,
            ),
            evidence_quote: raw.evidence_quote.clone(),
            source_model: raw.source_model.clone(),
            pmid: raw.pmid.clone(),
            temporal_phrase: raw.temporal_phrase.clone(),
            anchor: None,
        }
    }
}

const DIAGNOSTIC_TERMS: [&str; 18] = [
    "biopsy",
    "electromyography",
    "emg",
    "nerve conduction",
    "mri",
    "imaging",
    "x-ray",
    "radiograph",
    "ultrasound",
    "echocardiogram",
    "electrocardiogram",
    "ecg",
    "spirometry",
    "scan",
    "test",
    "assay",
    "panel",
    "screening",
];

const THERAPEUTIC_TERMS: [&str; 11] = [
    "plasmapheresis",
    "plasma exchange",
    "thymectomy",
    "physiotherapy",
    "physical therapy",
    "surgery",
    "surgical",
    "transplant",
    "ventilation",
    "tracheostomy",
    "infusion",
];

const INHERITANCE_TERMS: [&str; 8] = [
    "x-linked",
    "autosomal",
    "recessive",
    "dominant",
    "inheritance",
    "inherited",
    "maternal",
    "mitochondrial",
];

const DEFICIENCY_TERMS: [&str; 5] = ["deficiency", "deficient", "absence", "absent", "loss of"];

fn contains_any(haystack: &str, needles: &[&str]) -> bool {
    let folded = haystack.to_lowercase();
    needles.iter().any(|n| folded.contains(n))
}

/// Uppercase-symbol shape: letters all caps, digits and hyphens allowed.
fn is_all_caps_symbol(s: &str) -> bool {
    let has_alpha = s.chars().any(|c| c.is_ascii_alphabetic());
    has_alpha
        && s.chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '-' || c == '_')
}

fn looks_like_autoantibody(s: &str) -> bool {
    const TARGETS: [&str; 9] = [
        "ACHR", "MUSK", "VGCC", "LRP4", "GM1", "GQ1B", "AGRIN", "TITIN", "RYR",
    ];
    is_all_caps_symbol(s)
        && (s.starts_with("ANTI-") || s.contains("ANTIBOD") || TARGETS.iter().any(|t| s.contains(t)))
}

/// Rule identifiers in the table; `R3b` is the 18th rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R3b,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
    R16,
    R17,
}

impl RuleId {
    pub fn label(&self) -> &'static str {
        match self {
            RuleId::R1 => "1",
            RuleId::R2 => "2",
            RuleId::R3 => "3",
            RuleId::R3b => "3b",
            RuleId::R4 => "4",
            RuleId::R5 => "5",
            RuleId::R6 => "6",
            RuleId::R7 => "7",
            RuleId::R8 => "8",
            RuleId::R9 => "9",
            RuleId::R10 => "10",
            RuleId::R11 => "11",
            RuleId::R12 => "12",
            RuleId::R13 => "13",
            RuleId::R14 => "14",
            RuleId::R15 => "15",
            RuleId::R16 => "16",
            RuleId::R17 => "17",
        }
    }
}

pub struct CorrectionRule {
    pub id: RuleId,
    pub name: &'static str,
    pub rationale: &'static str,
    matches: fn(&NormalizedTriplet) -> bool,
    apply: fn(&mut NormalizedTriplet),
}

fn swap(t: &mut NormalizedTriplet) {
    std::mem::swap(&mut t.subject, &mut t.object);
}

fn rule_table() -> Vec<CorrectionRule> {
    use EntityType::*;
    vec![
        CorrectionRule {
            id: RuleId::R1,
            name: "invert_caused_by_mutation",
            rationale: "Fix direction inversion",
            matches: |t| {
                t.subject.type_label == Gene
                    && t.predicate == "CAUSED_BY_MUTATION"
                    && t.object.type_label == Disease
            },
            apply: swap,
        },
        CorrectionRule {
            id: RuleId::R2,
            name: "invert_treated_with",
            rationale: "Fix direction inversion",
            matches: |t| {
                t.subject.type_label == Treatment
                    && t.predicate == "TREATED_WITH"
                    && t.object.type_label == Disease
            },
            apply: swap,
        },
        CorrectionRule {
            id: RuleId::R3,
            name: "procedure_to_monitored",
            rationale: "Diagnostics are not treatments",
            matches: |t| {
                t.subject.type_label == Procedure
                    && t.predicate == "TREATED_WITH"
                    && t.object.type_label == Disease
                    && contains_any(&t.subject.surface, &DIAGNOSTIC_TERMS)
            },
            apply: |t| {
                swap(t);
                t.predicate = "MONITORED_WITH".into();
            },
        },
        CorrectionRule {
            id: RuleId::R3b,
            name: "therapeutic_proc_invert",
            rationale: "Therapeutic procedure: invert only",
            matches: |t| {
                t.subject.type_label == Procedure
                    && t.predicate == "TREATED_WITH"
                    && t.object.type_label == Disease
                    && contains_any(&t.subject.surface, &THERAPEUTIC_TERMS)
            },
            apply: swap,
        },
        CorrectionRule {
            id: RuleId::R4,
            name: "mutation_occurs_in",
            rationale: "Refine generic predicate",
            matches: |t| {
                t.subject.type_label == Mutation
                    && t.predicate == "ASSOCIATED_WITH"
                    && t.object.type_label == Gene
            },
            apply: |t| t.predicate = "OCCURS_IN".into(),
        },
        CorrectionRule {
            id: RuleId::R5,
            name: "inheritance_pattern",
            rationale: "Object names an inheritance mode",
            matches: |t| {
                t.subject.type_label == Disease
                    && t.predicate == "ASSOCIATED_WITH"
                    && t.object.type_label == Entity
                    && contains_any(&t.object.surface, &INHERITANCE_TERMS)
            },
            apply: |t| {
                t.predicate = "HAS_INHERITANCE".into();
                t.object.type_label = InheritancePattern;
            },
        },
        CorrectionRule {
            id: RuleId::R6,
            name: "entity_treatment_invert",
            rationale: "Direction plus retype",
            matches: |t| {
                t.subject.type_label == Entity
                    && t.predicate == "TREATED_WITH"
                    && t.object.type_label == Disease
            },
            apply: |t| {
                swap(t);
                t.object.type_label = Treatment;
            },
        },
        CorrectionRule {
            id: RuleId::R7,
            name: "measurement_to_monitored",
            rationale: "Measurements are not treatments",
            matches: |t| {
                t.subject.type_label == Measurement
                    && t.predicate == "TREATED_WITH"
                    && t.object.type_label == Disease
            },
            apply: |t| {
                swap(t);
                t.predicate = "MONITORED_WITH".into();
            },
        },
        CorrectionRule {
            id: RuleId::R8,
            name: "onset_to_symptom_onset",
            rationale: "Refine temporal predicate",
            matches: |t| {
                t.subject.type_label == PatientGroup
                    && t.predicate == "HAS_ONSET_AGE"
                    && t.object.type_label == Symptom
            },
            apply: |t| t.predicate = "SYMPTOM_ONSET_AT".into(),
        },
        CorrectionRule {
            id: RuleId::R9,
            name: "develops_to_loses_func",
            rationale: "Evidence mentions loss of function",
            matches: |t| {
                t.subject.type_label == PatientGroup
                    && t.predicate == "DEVELOPS_COMPLICATION_AT"
                    && t.object.type_label == PhysiologicalFunction
                    && contains_any(&t.evidence_quote, &["loss", "lose", "lost"])
            },
            apply: |t| t.predicate = "LOSES_FUNCTION_AT".into(),
        },
        CorrectionRule {
            id: RuleId::R10,
            name: "retype_entity_assoc",
            rationale: "Subject names a diagnostic procedure",
            matches: |t| {
                t.subject.type_label == Entity
                    && t.predicate == "ASSOCIATED_WITH"
                    && t.object.type_label == Disease
                    && contains_any(&t.subject.surface, &DIAGNOSTIC_TERMS)
            },
            apply: |t| {
                t.subject.type_label = Procedure;
                t.predicate = "USED_FOR_DIAG".into();
            },
        },
        CorrectionRule {
            id: RuleId::R11,
            name: "patgrp_proc_to_monitored",
            rationale: "Diagnostic procedure for patients",
            matches: |t| {
                t.subject.type_label == PatientGroup
                    && t.predicate == "TREATED_WITH"
                    && t.object.type_label == Procedure
                    && contains_any(&t.object.surface, &DIAGNOSTIC_TERMS)
            },
            apply: |t| t.predicate = "MONITORED_WITH".into(),
        },
        CorrectionRule {
            id: RuleId::R12,
            name: "proc_assoc_to_diagnosis",
            rationale: "Refine generic association",
            matches: |t| {
                t.subject.type_label == Procedure
                    && t.predicate == "ASSOCIATED_WITH"
                    && t.object.type_label == Disease
            },
            apply: |t| t.predicate = "USED_FOR_DIAG".into(),
        },
        CorrectionRule {
            id: RuleId::R13,
            name: "caused_by_protein_state",
            rationale: "Object describes a protein deficiency state",
            matches: |t| {
                t.subject.type_label == Disease
                    && t.predicate == "CAUSED_BY_MUTATION"
                    && t.object.type_label == Entity
                    && contains_any(&t.object.surface, &DEFICIENCY_TERMS)
            },
            apply: |t| {
                t.predicate = "LACKS_FEATURE".into();
                t.object.type_label = Protein;
            },
        },
        CorrectionRule {
            id: RuleId::R14,
            name: "retype_entity_to_gene",
            rationale: "Uppercase symbol names a gene",
            matches: |t| {
                t.subject.type_label == Disease
                    && t.predicate == "CAUSED_BY_MUTATION"
                    && t.object.type_label == Entity
                    && is_all_caps_symbol(&t.object.surface)
            },
            apply: |t| t.object.type_label = Gene,
        },
        CorrectionRule {
            id: RuleId::R15,
            name: "protein_assoc_to_target",
            rationale: "Invert receptor-disease direction",
            matches: |t| {
                t.subject.type_label == Protein
                    && t.predicate == "ASSOCIATED_WITH"
                    && t.object.type_label == Disease
            },
            apply: swap,
        },
        CorrectionRule {
            id: RuleId::R16,
            name: "autoantibody_retype",
            rationale: "ALL-CAPS autoantibody string, not a gene",
            matches: |t| {
                t.subject.type_label == Disease
                    && t.predicate == "CAUSED_BY_MUTATION"
                    && t.object.type_label == Entity
                    && looks_like_autoantibody(&t.object.surface)
            },
            apply: |t| {
                t.predicate = "CAUSED_BY".into();
                t.object.type_label = Autoantibody;
            },
        },
        CorrectionRule {
            id: RuleId::R17,
            name: "measurement_to_diagnosis",
            rationale: "Antibody measurements indicate diagnosis",
            matches: |t| {
                t.subject.type_label == Measurement
                    && t.predicate == "ASSOCIATED_WITH"
                    && t.object.type_label == Disease
            },
            apply: |t| t.predicate = "USED_FOR_DIAG".into(),
        },
    ]
}

/// The correction engine: 18 rules applied single-pass in a fixed order.
pub struct RuleEngine {
    rules: Vec<CorrectionRule>,
}

/// Application order: rule 16 fires first so ALL-CAPS autoantibody strings
/// never reach rule 14's uppercase guard, then ascending rule ids.
pub const DEFAULT_RULE_ORDER: [RuleId; 18] = [
    RuleId::R16,
    RuleId::R1,
    RuleId::R2,
    RuleId::R3,
    RuleId::R3b,
    RuleId::R4,
    RuleId::R5,
    RuleId::R6,
    RuleId::R7,
    RuleId::R8,
    RuleId::R9,
    RuleId::R10,
    RuleId::R11,
    RuleId::R12,
    RuleId::R13,
    RuleId::R14,
    RuleId::R15,
    RuleId::R17,
];

impl RuleEngine {
    pub fn new() -> Self {
        RuleEngine::with_order(&DEFAULT_RULE_ORDER).expect("default order covers every rule")
    }

    /// Build with an explicit order. Every rule must appear exactly once.
    pub fn with_order(order: &[RuleId]) -> Result<Self> {
        let mut table: Vec<Option<CorrectionRule>> = rule_table().into_iter().map(Some).collect();
        let mut rules = Vec::with_capacity(table.len());
        for id in order {
            let slot = table
                .iter_mut()
                .find(|r| r.as_ref().is_some_and(|r| r.id == *id))
                .ok_or_else(|| {
                    Error::InvalidInput(format!("rule {} missing or duplicated in order", id.label()))
                })?;
            rules.push(slot.take().unwrap());
        }
        if table.iter().any(|r| r.is_some()) {
            return Err(Error::InvalidInput(
                "rule order does not cover the full table".into(),
            ));
        }
        Ok(RuleEngine { rules })
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Apply the rules in order, at most one transform per rule.
    /// Returns the corrected triplet and the fired rule ids.
    pub fn apply(&self, triplet: &NormalizedTriplet) -> (NormalizedTriplet, Vec<RuleId>) {
        let mut t = triplet.clone();
        let mut fired = Vec::new();
        for rule in &self.rules {
            if (rule.matches)(&t) {
                (rule.apply)(&mut t);
                fired.push(rule.id);
            }
        }
        (t, fired)
    }
}

impl Default for RuleEngine {
    fn default() -> Self {
        RuleEngine::new()
    }
}

/// Apply the default-ordered rule engine to one triplet.
pub fn apply_correction_rules(triplet: &NormalizedTriplet) -> (NormalizedTriplet, Vec<RuleId>) {
    RuleEngine::new().apply(triplet)
}

fn entity(surface: &str, type_label: EntityType) -> NormalizedEntity {
    NormalizedEntity {
        surface: surface.into(),
        cui: None,
        type_label,
        resolver_used: ResolverKind::None,
    }
}

fn example(
    subject: (&str, EntityType),
    predicate: &str,
    object: (&str, EntityType),
    quote: &str,
) -> NormalizedTriplet {
    NormalizedTriplet {
        subject: entity(subject.0, subject.1),
        predicate: predicate.into(),
        object: entity(object.0, object.1),
        evidence_quote: quote.into(),
        source_model: "model-a".into(),
        pmid: "123456".into(),
        temporal_phrase: None,
        anchor: None,
    }
}

/// Canonical worked example per rule, keyed by the rule it must fire.
pub fn canonical_rule_examples() -> Vec<(RuleId, NormalizedTriplet)> {
    use EntityType::*;
    vec![
        (
            RuleId::R1,
            example(("DMD", Gene), "CAUSED_BY_MUTATION", ("Duchenne muscular dystrophy", Disease), "caused by mutations in the dystrophin gene"),
        ),
        (
            RuleId::R2,
            example(("prednisone", Treatment), "TREATED_WITH", ("Duchenne muscular dystrophy", Disease), "patients were treated with prednisone daily"),
        ),
        (
            RuleId::R3,
            example(("muscle biopsy", Procedure), "TREATED_WITH", ("Becker muscular dystrophy", Disease), "muscle biopsy was performed in all patients"),
        ),
        (
            RuleId::R3b,
            example(("plasmapheresis", Procedure), "TREATED_WITH", ("myasthenia gravis", Disease), "plasmapheresis improved strength within days"),
        ),
        (
            RuleId::R4,
            example(("exon 51 deletion", Mutation), "ASSOCIATED_WITH", ("DMD gene", Gene), "deletions of exon 51 in the DMD gene"),
        ),
        (
            RuleId::R5,
            example(("Duchenne muscular dystrophy", Disease), "ASSOCIATED_WITH", ("x-linked recessive pattern", Entity), "inherited in an x-linked recessive pattern"),
        ),
        (
            RuleId::R6,
            example(("corticosteroid regimen", Entity), "TREATED_WITH", ("Duchenne muscular dystrophy", Disease), "managed with a corticosteroid regimen"),
        ),
        (
            RuleId::R7,
            example(("creatine kinase", Measurement), "TREATED_WITH", ("Becker muscular dystrophy", Disease), "creatine kinase levels guided follow-up"),
        ),
        (
            RuleId::R8,
            example(("ambulatory boys", PatientGroup), "HAS_ONSET_AGE", ("proximal weakness", Symptom), "proximal weakness emerged in early childhood"),
        ),
        (
            RuleId::R9,
            example(("treated patients", PatientGroup), "DEVELOPS_COMPLICATION_AT", ("independent ambulation", PhysiologicalFunction), "loss of independent ambulation occurred around age 11"),
        ),
        (
            RuleId::R10,
            example(("nerve conduction study", Entity), "ASSOCIATED_WITH", ("chronic inflammatory demyelinating polyneuropathy", Disease), "nerve conduction study findings were diagnostic"),
        ),
        (
            RuleId::R11,
            example(("screened children", PatientGroup), "TREATED_WITH", ("echocardiogram surveillance", Procedure), "children underwent echocardiogram surveillance"),
        ),
        (
            RuleId::R12,
            example(("repetitive nerve stimulation", Procedure), "ASSOCIATED_WITH", ("Lambert-Eaton myasthenic syndrome", Disease), "repetitive nerve stimulation supported the diagnosis"),
        ),
        (
            RuleId::R13,
            example(("Duchenne muscular dystrophy", Disease), "CAUSED_BY_MUTATION", ("dystrophin deficiency", Entity), "complete dystrophin deficiency underlies the phenotype"),
        ),
        (
            RuleId::R14,
            example(("Becker muscular dystrophy", Disease), "CAUSED_BY_MUTATION", ("DMD", Entity), "in-frame deletions of DMD preserve partial function"),
        ),
        (
            RuleId::R15,
            example(("acetylcholine receptor", Protein), "ASSOCIATED_WITH", ("myasthenia gravis", Disease), "acetylcholine receptor is the antigenic target"),
        ),
        (
            RuleId::R16,
            example(("myasthenia gravis", Disease), "CAUSED_BY_MUTATION", ("ANTI-ACHR", Entity), "ANTI-ACHR antibodies were detected in most patients"),
        ),
        (
            RuleId::R17,
            example(("anti-MuSK titer", Measurement), "ASSOCIATED_WITH", ("myasthenia gravis", Disease), "anti-MuSK titer correlated with severity"),
        ),
    ]
}
