//! Relevance screening and schema-guided triplet extraction with
//! evidence-quote enforcement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairconfig::{known_predicate, DiseasePairConfig};
use crate::providers::ModelProvider;

pub const SCREEN_CONFIDENCE_THRESHOLD: f64 = 0.85;

/// A PubMed abstract record as carried through the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Abstract {
    pub pmid: String,
    pub title: String,
    pub text: String,
    #[serde(default)]
    pub mesh_terms: Vec<String>,
    #[serde(default)]
    pub year: Option<i32>,
}

impl Abstract {
    pub fn validate(&self) -> Result<()> {
        if !is_pmid(&self.pmid) {
            return Err(Error::InvalidInput(format!(
                "abstract pmid `{}` must be 6-9 digits",
                self.pmid
            )));
        }
        if self.text.trim().is_empty() {
            return Err(Error::InvalidInput(format!(
                "abstract {} has empty text",
                self.pmid
            )));
        }
        Ok(())
    }
}

pub fn is_pmid(s: &str) -> bool {
    (6..=9).contains(&s.len()) && s.bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityMention {
    pub surface: String,
    pub type_label: String,
}

/// One extracted subject-predicate-object triplet before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTriplet {
    pub subject: EntityMention,
    pub predicate: String,
    pub object: EntityMention,
    pub evidence_quote: String,
    #[serde(default)]
    pub source_model: String,
    #[serde(default)]
    pub pmid: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temporal_phrase: Option<String>,
}

impl RawTriplet {
    /// Predicates outside the retrieval + extraction schema are kept as
    /// pass-through strings and flagged for the pipeline report.
    pub fn out_of_schema(&self) -> bool {
        !known_predicate(&self.predicate)
    }
}

/// Raw screen reply from a provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningReply {
    pub extract: bool,
    pub confidence: f64,
}

/// Logged screening decision for one abstract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningDecision {
    pub pmid: String,
    pub extract: bool,
    pub confidence: f64,
    pub passed: bool,
}

impl ScreeningDecision {
    pub fn from_reply(pmid: &str, reply: &ScreeningReply) -> Self {
        ScreeningDecision {
            pmid: pmid.to_string(),
            extract: reply.extract,
            confidence: reply.confidence,
            passed: reply.extract && reply.confidence >= SCREEN_CONFIDENCE_THRESHOLD,
        }
    }
}

/// Screen one abstract through the given provider. Passing requires
/// `extract = true` with confidence at or above the 0.85 threshold.
pub fn screen_relevance(
    abstr: &Abstract,
    cfg: &DiseasePairConfig,
    provider: &dyn ModelProvider,
) -> Result<ScreeningDecision> {
    let reply = provider.screen(abstr, cfg)?;
    Ok(ScreeningDecision::from_reply(&abstr.pmid, &reply))
}

/// Outcome of multi-provider extraction over one abstract.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExtractionOutcome {
    pub triplets: Vec<RawTriplet>,
    /// Triplets dropped for failing evidence-quote validation.
    pub dropped_invalid_quote: usize,
    /// Triplets kept with a predicate outside the schema.
    pub flagged_out_of_schema: usize,
    /// Transport failures from individual providers (non-fatal while at
    /// least one provider answers).
    pub provider_warnings: Vec<String>,
}

/// Union of per-provider triplets, each stamped with its source model and
/// the abstract's PMID. Quote-invalid triplets are dropped and counted.
pub fn extract_triplets(
    abstr: &Abstract,
    cfg: &DiseasePairConfig,
    providers: &[&dyn ModelProvider],
) -> Result<ExtractionOutcome> {
    if providers.is_empty() {
        return Err(Error::InvalidInput(
            "extract_triplets: at least one provider required".into(),
        ));
    }
    let mut outcome = ExtractionOutcome::default();
    let mut any_ok = false;
    for provider in providers {
        match provider.extract(abstr, cfg) {
            Ok(triplets) => {
                any_ok = true;
                for mut t in triplets {
                    t.source_model = provider.id().to_string();
                    t.pmid = abstr.pmid.clone();
                    if !validate_evidence_quote(&t, abstr) {
                        outcome.dropped_invalid_quote += 1;
                        continue;
                    }
                    if t.out_of_schema() {
                        outcome.flagged_out_of_schema += 1;
                    }
                    outcome.triplets.push(t);
                }
            }
            Err(e) if e.is_retriable() => {
                outcome
                    .provider_warnings
                    .push(format!("{}: {e}", provider.id()));
            }
            Err(e) => return Err(e),
        }
    }
    if !any_ok {
        return Err(Error::ProviderTransport {
            provider: "all".into(),
            message: format!(
                "every provider failed for {}: {:?}",
                abstr.pmid, outcome.provider_warnings
            ),
        });
    }
    Ok(outcome)
}

/// Case-fold, collapse whitespace runs and strip token-edge punctuation.
fn normalize_tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()).to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

/// True iff the quote shares a contiguous run of at least 3 tokens with
/// the abstract text, after normalization.
pub fn validate_evidence_quote(triplet: &RawTriplet, abstr: &Abstract) -> bool {
    let quote = normalize_tokens(&triplet.evidence_quote);
    let text = normalize_tokens(&abstr.text);
    if quote.len() < 3 || text.len() < 3 {
        return false;
    }
    quote
        .windows(3)
        .any(|w| text.windows(3).any(|t| t == w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::FixtureProvider;

    fn cfg() -> DiseasePairConfig {
        crate::pairconfig::load_config(TEST_CFG).unwrap()
    }

    const TEST_CFG: &str = r#"
disease_pair: mg_lems
classification:
  diseases:
    - short_name: MG
      full_name: Myasthenia gravis
      cuis: [C0026896]
      text_patterns: [myasthenia, mg]
    - short_name: LEMS
      full_name: Lambert-Eaton myasthenic syndrome
      cuis: [C0022972]
      text_patterns: [lambert-eaton, lems]
relevance_keywords: [myasthenia, lambert-eaton]
"#;

    fn sample_abstract() -> Abstract {
        Abstract {
            pmid: "123456".into(),
            title: "Myasthenia gravis outcomes".into(),
            text: "Myasthenia gravis is treated with pyridostigmine in most adults. \
                   Symptoms worsen with exertion and improve with rest."
                .into(),
            mesh_terms: vec!["Myasthenia Gravis".into()],
            year: Some(2021),
        }
    }

    fn triplet(quote: &str) -> RawTriplet {
        RawTriplet {
            subject: EntityMention {
                surface: "myasthenia gravis".into(),
                type_label: "Disease".into(),
            },
            predicate: "TREATED_WITH".into(),
            object: EntityMention {
                surface: "pyridostigmine".into(),
                type_label: "Treatment".into(),
            },
            evidence_quote: quote.into(),
            source_model: String::new(),
            pmid: String::new(),
            temporal_phrase: None,
        }
    }

    #[test]
    fn screen_threshold_is_strict() {
        let mut p = FixtureProvider::new("fix-a");
        p.record_screen("123456", true, 0.92);
        let d = screen_relevance(&sample_abstract(), &cfg(), &p).unwrap();
        assert!(d.passed);

        let mut p = FixtureProvider::new("fix-a");
        p.record_screen("123456", true, 0.84);
        let d = screen_relevance(&sample_abstract(), &cfg(), &p).unwrap();
        assert!(!d.passed, "0.84 sits below the 0.85 threshold");

        let mut p = FixtureProvider::new("fix-a");
        p.record_screen("123456", false, 0.99);
        assert!(!screen_relevance(&sample_abstract(), &cfg(), &p).unwrap().passed);
    }

    #[test]
    fn screen_transport_failure_is_retriable() {
        let p = FixtureProvider::new("fix-a");
        let err = screen_relevance(&sample_abstract(), &cfg(), &p).unwrap_err();
        assert!(err.is_retriable());
    }

    #[test]
    fn extract_unions_and_stamps() {
        let a = sample_abstract();
        let mut p1 = FixtureProvider::new("model-a");
        p1.record_extract(
            "123456",
            vec![
                triplet("treated with pyridostigmine in most adults"),
                triplet("Symptoms worsen with exertion"),
                triplet("improve with rest and treated"),
            ],
        );
        let mut p2 = FixtureProvider::new("model-b");
        p2.record_extract(
            "123456",
            vec![
                triplet("Myasthenia gravis is treated"),
                triplet("worsen with exertion and improve"),
                triplet("is treated with pyridostigmine"),
            ],
        );
        let out = extract_triplets(&a, &cfg(), &[&p1, &p2]).unwrap();
        assert_eq!(out.triplets.len(), 6, "union before dedup");
        assert!(out.triplets[..3].iter().all(|t| t.source_model == "model-a"));
        assert!(out.triplets[3..].iter().all(|t| t.source_model == "model-b"));
        assert!(out.triplets.iter().all(|t| t.pmid == "123456"));
    }

    #[test]
    fn fabricated_quote_dropped() {
        let a = sample_abstract();
        let mut p = FixtureProvider::new("model-a");
        p.record_extract(
            "123456",
            vec![triplet("xyz abc def"), triplet("is treated with pyridostigmine")],
        );
        let out = extract_triplets(&a, &cfg(), &[&p]).unwrap();
        assert_eq!(out.triplets.len(), 1);
        assert_eq!(out.dropped_invalid_quote, 1);
    }

    #[test]
    fn out_of_schema_predicate_kept_and_flagged() {
        let a = sample_abstract();
        let mut bad = triplet("is treated with pyridostigmine");
        bad.predicate = "EXHIBITS_PATTERN".into();
        let mut p = FixtureProvider::new("model-a");
        p.record_extract("123456", vec![bad]);
        let out = extract_triplets(&a, &cfg(), &[&p]).unwrap();
        // Pass-through predicate retained; the flag count is the oracle.
        assert_eq!(out.triplets.len(), 1);
        assert_eq!(out.flagged_out_of_schema, 1);
        assert_eq!(out.triplets[0].predicate, "EXHIBITS_PATTERN");
    }

    #[test]
    fn one_provider_down_is_warning_all_down_is_error() {
        let a = sample_abstract();
        let mut ok = FixtureProvider::new("model-a");
        ok.record_extract("123456", vec![triplet("is treated with pyridostigmine")]);
        let down = FixtureProvider::new("model-b");
        let out = extract_triplets(&a, &cfg(), &[&ok, &down]).unwrap();
        assert_eq!(out.provider_warnings.len(), 1);
        assert_eq!(out.triplets.len(), 1);

        let down_a = FixtureProvider::new("model-a");
        let down_b = FixtureProvider::new("model-b");
        assert!(extract_triplets(&a, &cfg(), &[&down_a, &down_b]).is_err());
        assert!(extract_triplets(&a, &cfg(), &[]).is_err());
    }

    #[test]
    fn quote_validation_rules() {
        let a = sample_abstract();
        // Exact sentence from the abstract.
        assert!(validate_evidence_quote(
            &triplet("Symptoms worsen with exertion and improve with rest."),
            &a
        ));
        // Two words only: below the 3-gram floor.
        assert!(!validate_evidence_quote(&triplet("pyridostigmine adults"), &a));
        // Whitespace runs collapse before matching; oracle = collapse then
        // substring search over the normalized text.
        let spaced = "Symptoms   worsen \n  with exertion";
        let collapsed = spaced.split_whitespace().collect::<Vec<_>>().join(" ");
        assert!(a.text.to_lowercase().contains(&collapsed.to_lowercase()));
        assert!(validate_evidence_quote(&triplet(spaced), &a));
        // Absent text fails.
        assert!(!validate_evidence_quote(&triplet("completely different claim here"), &a));
    }

    #[test]
    fn fixture_extraction_is_reproducible() {
        let a = sample_abstract();
        let mut p = FixtureProvider::new("model-a");
        p.record_extract("123456", vec![triplet("is treated with pyridostigmine")]);
        let out1 = extract_triplets(&a, &cfg(), &[&p]).unwrap();
        let out2 = extract_triplets(&a, &cfg(), &[&p]).unwrap();
        assert_eq!(
            serde_json::to_string(&out1.triplets).unwrap(),
            serde_json::to_string(&out2.triplets).unwrap()
        );
    }

    #[test]
    fn pmid_shape() {
        assert!(is_pmid("123456"));
        assert!(is_pmid("293959891"));
        assert!(!is_pmid("12345"));
        assert!(!is_pmid("1234567890"));
        assert!(!is_pmid("12a456"));
        let mut a = sample_abstract();
        a.pmid = "12345".into();
        assert!(a.validate().is_err());
    }
}
