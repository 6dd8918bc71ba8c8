//! Disease-pair configuration: the YAML schema that drives the whole
//! pipeline, the closed retrieval-predicate set, and disease-context
//! classification of text spans.
//!
//! Adding a new disease pair means adding one YAML file; no code changes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::temporal::{default_tables, IsoDuration, TemporalTables};

/// The 20 retrieval predicates with their category flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Predicate {
    AssociatedWith,
    ManifestsAs,
    TreatedWith,
    RespondsTo,
    HasMeasurement,
    HasOnsetAge,
    HasSeverity,
    HasPrevalence,
    LacksFeature,
    HasDiagnosisAge,
    HasDuration,
    GeneralizedAt,
    RemissionAt,
    Precedes,
    CrisisAt,
    DevelopsComplicationAt,
    PreservesFunction,
    HasSurvivalTo,
    DifferentiatesFrom,
    RequiresInterventionAt,
}

impl Predicate {
    pub const ALL: [Predicate; 20] = [
        Predicate::AssociatedWith,
        Predicate::ManifestsAs,
        Predicate::TreatedWith,
        Predicate::RespondsTo,
        Predicate::HasMeasurement,
        Predicate::HasOnsetAge,
        Predicate::HasSeverity,
        Predicate::HasPrevalence,
        Predicate::LacksFeature,
        Predicate::HasDiagnosisAge,
        Predicate::HasDuration,
        Predicate::GeneralizedAt,
        Predicate::RemissionAt,
        Predicate::Precedes,
        Predicate::CrisisAt,
        Predicate::DevelopsComplicationAt,
        Predicate::PreservesFunction,
        Predicate::HasSurvivalTo,
        Predicate::DifferentiatesFrom,
        Predicate::RequiresInterventionAt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Predicate::AssociatedWith => "ASSOCIATED_WITH",
            Predicate::ManifestsAs => "MANIFESTS_AS",
            Predicate::TreatedWith => "TREATED_WITH",
            Predicate::RespondsTo => "RESPONDS_TO",
            Predicate::HasMeasurement => "HAS_MEASUREMENT",
            Predicate::HasOnsetAge => "HAS_ONSET_AGE",
            Predicate::HasSeverity => "HAS_SEVERITY",
            Predicate::HasPrevalence => "HAS_PREVALENCE",
            Predicate::LacksFeature => "LACKS_FEATURE",
            Predicate::HasDiagnosisAge => "HAS_DIAGNOSIS_AGE",
            Predicate::HasDuration => "HAS_DURATION",
            Predicate::GeneralizedAt => "GENERALIZED_AT",
            Predicate::RemissionAt => "REMISSION_AT",
            Predicate::Precedes => "PRECEDES",
            Predicate::CrisisAt => "CRISIS_AT",
            Predicate::DevelopsComplicationAt => "DEVELOPS_COMPLICATION_AT",
            Predicate::PreservesFunction => "PRESERVES_FUNCTION",
            Predicate::HasSurvivalTo => "HAS_SURVIVAL_TO",
            Predicate::DifferentiatesFrom => "DIFFERENTIATES_FROM",
            Predicate::RequiresInterventionAt => "REQUIRES_INTERVENTION_AT",
        }
    }

    pub fn from_name(name: &str) -> Option<Predicate> {
        Predicate::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn is_temporal(&self) -> bool {
        matches!(
            self,
            Predicate::HasOnsetAge
                | Predicate::HasDiagnosisAge
                | Predicate::GeneralizedAt
                | Predicate::CrisisAt
                | Predicate::RemissionAt
                | Predicate::DevelopsComplicationAt
                | Predicate::RequiresInterventionAt
                | Predicate::HasSurvivalTo
                | Predicate::HasDuration
                | Predicate::Precedes
        )
    }

    pub fn is_treatment(&self) -> bool {
        matches!(self, Predicate::TreatedWith | Predicate::RespondsTo)
    }

    pub fn is_differential(&self) -> bool {
        matches!(
            self,
            Predicate::ManifestsAs
                | Predicate::AssociatedWith
                | Predicate::TreatedWith
                | Predicate::RespondsTo
                | Predicate::LacksFeature
                | Predicate::DifferentiatesFrom
                | Predicate::HasPrevalence
                | Predicate::HasOnsetAge
                | Predicate::HasSeverity
        )
    }
}

/// Extraction-schema predicates that are not retrieval predicates but can
/// legitimately appear on edges (several are produced by the correction
/// rules). Anything outside `known_predicate` is pass-through and flagged.
pub const EXTRACTION_PREDICATES: [&str; 8] = [
    "CAUSED_BY_MUTATION",
    "CAUSED_BY",
    "MONITORED_WITH",
    "OCCURS_IN",
    "HAS_INHERITANCE",
    "USED_FOR_DIAG",
    "SYMPTOM_ONSET_AT",
    "LOSES_FUNCTION_AT",
];

pub fn known_predicate(name: &str) -> bool {
    Predicate::from_name(name).is_some() || EXTRACTION_PREDICATES.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiseaseSpec {
    pub short_name: String,
    pub full_name: String,
    pub cuis: Vec<String>,
    pub text_patterns: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ontology_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mondo_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParentSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cui: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SharedSpec {
    #[serde(default)]
    pub cuis: Vec<String>,
    #[serde(default)]
    pub text_patterns: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<ParentSpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Classification {
    #[serde(default)]
    pub diseases: Vec<DiseaseSpec>,
    #[serde(default)]
    pub shared: SharedSpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PubmedSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_year: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_year: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_abstracts_per_query: Option<u32>,
    #[serde(default)]
    pub mesh_terms: Vec<String>,
    #[serde(default)]
    pub differential_terms: Vec<String>,
    #[serde(default)]
    pub progression_terms: Vec<String>,
    #[serde(default)]
    pub anchor_categories: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExtractionSection {
    #[serde(default)]
    pub prompt_context: String,
    #[serde(default)]
    pub screening_keywords: Vec<String>,
    #[serde(default)]
    pub few_shot_examples: Vec<String>,
}

/// Fuzzy/stage phrase tables in the config file: phrase -> [start, end].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TemporalSection {
    #[serde(default)]
    pub fuzzy: BTreeMap<String, (IsoDuration, IsoDuration)>,
    #[serde(default)]
    pub stage: BTreeMap<String, (IsoDuration, IsoDuration)>,
}

/// One disease pair's full configuration, laid out field-for-field like
/// the on-disk YAML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiseasePairConfig {
    #[serde(rename = "disease_pair")]
    pub pair_id: String,
    #[serde(default)]
    pub label: String,
    pub classification: Classification,
    #[serde(default)]
    pub pubmed: PubmedSection,
    #[serde(default)]
    pub temporal_predicates: Vec<String>,
    #[serde(default)]
    pub relevance_keywords: Vec<String>,
    #[serde(default)]
    pub temporal: TemporalSection,
    #[serde(default)]
    pub extraction: ExtractionSection,
}

impl DiseasePairConfig {
    pub fn diseases(&self) -> &[DiseaseSpec] {
        &self.classification.diseases
    }

    pub fn disease(&self, short_name: &str) -> Option<&DiseaseSpec> {
        self.diseases()
            .iter()
            .find(|d| d.short_name.eq_ignore_ascii_case(short_name))
    }

    pub fn short_names(&self) -> Vec<String> {
        self.diseases().iter().map(|d| d.short_name.clone()).collect()
    }

    /// Merged fuzzy/stage tables: config entries override same-key
    /// defaults, new phrases extend them.
    pub fn temporal_tables(&self) -> TemporalTables {
        let mut tables = default_tables();
        for (section, target) in [
            (&self.temporal.fuzzy, &mut tables.fuzzy),
            (&self.temporal.stage, &mut tables.stage),
        ] {
            for (phrase, (start, end)) in section {
                let key = phrase.to_lowercase();
                target.retain(|(k, _, _)| *k != key);
                target.push((key, *start, *end));
            }
        }
        tables.sorted()
    }

    /// Dictionary resolver synonyms: every disease pattern and full name
    /// maps to the disease's primary CUI; shared patterns to shared CUIs.
    pub fn synonym_table(&self) -> Vec<(String, String)> {
        let mut table = Vec::new();
        for d in self.diseases() {
            if let Some(primary) = d.cuis.first() {
                table.push((d.full_name.to_lowercase(), primary.clone()));
                for p in &d.text_patterns {
                    table.push((p.to_lowercase(), primary.clone()));
                }
            }
        }
        if let Some(first_shared) = self.classification.shared.cuis.first() {
            for p in &self.classification.shared.text_patterns {
                table.push((p.to_lowercase(), first_shared.clone()));
            }
        }
        table
    }

    pub fn mesh_terms(&self) -> &[String] {
        &self.pubmed.mesh_terms
    }

    fn validate(&self) -> Result<()> {
        if self.pair_id.trim().is_empty() {
            return Err(Error::config("disease_pair", "must be non-empty"));
        }
        if self.classification.diseases.is_empty() {
            return Err(Error::config(
                "classification.diseases",
                "at least one disease is required",
            ));
        }
        for (i, d) in self.classification.diseases.iter().enumerate() {
            let at = |field: &str| format!("classification.diseases[{i}].{field}");
            if d.short_name.trim().is_empty() {
                return Err(Error::config(at("short_name"), "must be non-empty"));
            }
            if d.cuis.is_empty() {
                return Err(Error::config(at("cuis"), "at least one CUI is required"));
            }
            for cui in &d.cuis {
                if !is_cui(cui) {
                    return Err(Error::config(
                        at("cuis"),
                        format!("`{cui}` is not a CUI (expected C + 7 digits)"),
                    ));
                }
            }
            if d.text_patterns.is_empty() {
                return Err(Error::config(
                    at("text_patterns"),
                    "at least one text pattern is required",
                ));
            }
        }
        for (i, p) in self.temporal_predicates.iter().enumerate() {
            if !known_predicate(p) {
                return Err(Error::Config {
                    path: format!("temporal_predicates[{i}]"),
                    message: format!("unknown predicate `{p}`"),
                });
            }
        }
        if self.relevance_keywords.is_empty() {
            return Err(Error::config(
                "relevance_keywords",
                "at least one relevance keyword is required",
            ));
        }
        Ok(())
    }
}

/// CUI lexical shape: letter C followed by 7 digits.
pub fn is_cui(s: &str) -> bool {
    let bytes = s.as_bytes();
    bytes.len() == 8 && bytes[0] == b'C' && bytes[1..].iter().all(|b| b.is_ascii_digit())
}

/// Parse and validate a configuration document.
pub fn load_config(text: &str) -> Result<DiseasePairConfig> {
    let cfg: DiseasePairConfig = serde_yaml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config_file(path: impl AsRef<Path>) -> Result<DiseasePairConfig> {
    let text = std::fs::read_to_string(path.as_ref())?;
    load_config(&text)
}

pub fn to_yaml(cfg: &DiseasePairConfig) -> Result<String> {
    Ok(serde_yaml::to_string(cfg)?)
}

/// Diseases whose text patterns or CUIs occur in `text`, case-insensitive
/// substring. A span that matches only shared patterns belongs to both
/// diseases; a specific match suppresses the shared fallback.
pub fn classify_disease_context(text: &str, cfg: &DiseasePairConfig) -> Vec<String> {
    let folded = text.to_lowercase();
    let mut matched: Vec<String> = Vec::new();
    for d in cfg.diseases() {
        let hit = d
            .text_patterns
            .iter()
            .any(|p| folded.contains(&p.to_lowercase()))
            || d.cuis.iter().any(|c| folded.contains(&c.to_lowercase()));
        if hit {
            matched.push(d.short_name.clone());
        }
    }
    if matched.is_empty() {
        let shared = &cfg.classification.shared;
        let hit = shared
            .text_patterns
            .iter()
            .any(|p| folded.contains(&p.to_lowercase()))
            || shared.cuis.iter().any(|c| folded.contains(&c.to_lowercase()));
        if hit {
            matched = cfg.short_names();
        }
    }
    matched
}
