//! Three-arm clinical synthesis: prompt assembly, evidence-block
//! formatting, chunk retrieval for the text-RAG baseline, and the privacy
//! gate that keeps patient data on local endpoints.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::consensus::Edge;
use crate::error::{Error, Result};
use crate::providers::{GenerationParams, ModelProvider};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    Vanilla,
    GuidelineRag,
    HegTkg,
}

impl Arm {
    pub const ALL: [Arm; 3] = [Arm::Vanilla, Arm::GuidelineRag, Arm::HegTkg];

    pub fn label(&self) -> &'static str {
        match self {
            Arm::Vanilla => "vanilla",
            Arm::GuidelineRag => "guideline_rag",
            Arm::HegTkg => "heg_tkg",
        }
    }

    pub fn parse(s: &str) -> Result<Arm> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vanilla" => Ok(Arm::Vanilla),
            "guideline_rag" | "guideline-rag" | "rag" => Ok(Arm::GuidelineRag),
            "heg_tkg" | "heg-tkg" | "kg" => Ok(Arm::HegTkg),
            other => Err(Error::InvalidInput(format!("unknown arm `{other}`"))),
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputType {
    Differential,
    TemporalComparative,
    Temporal,
    Treatment,
}

impl OutputType {
    pub fn label(&self) -> &'static str {
        match self {
            OutputType::Differential => "differential",
            OutputType::TemporalComparative => "temporal_comparative",
            OutputType::Temporal => "temporal",
            OutputType::Treatment => "treatment",
        }
    }

    pub fn parse(s: &str) -> Result<OutputType> {
        match s.trim() {
            "differential" => Ok(OutputType::Differential),
            "temporal_comparative" => Ok(OutputType::TemporalComparative),
            "temporal" => Ok(OutputType::Temporal),
            "treatment" => Ok(OutputType::Treatment),
            other => Err(Error::InvalidInput(format!("unknown output type `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClinicalScenario {
    pub id: String,
    pub disease_pair: String,
    pub output_type: OutputType,
    pub scenario_text: String,
    #[serde(default)]
    pub source_reference: String,
    pub expected_key_features: Vec<String>,
}

impl ClinicalScenario {
    pub fn validate(&self) -> Result<()> {
        if self.expected_key_features.is_empty() {
            return Err(Error::InvalidInput(format!(
                "scenario {}: expected_key_features must be non-empty",
                self.id
            )));
        }
        Ok(())
    }
}

/// One retrieved edge in an output's evidence manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub edge_id: String,
    pub pmid_list: Vec<String>,
    pub tier: String,
}

impl ManifestEntry {
    pub fn from_edge(e: &Edge) -> Self {
        ManifestEntry {
            edge_id: e.edge_id.clone(),
            pmid_list: e.pmid_list.iter().cloned().collect(),
            tier: e.quality_tier.label().to_string(),
        }
    }
}

/// One arm's synthesized text plus its evidence manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClinicalOutput {
    pub scenario_id: String,
    pub arm: Arm,
    pub text: String,
    /// Retrieved edges (graph-grounded arm only).
    #[serde(default)]
    pub evidence_manifest: Vec<ManifestEntry>,
    /// Retrieved chunk ids (text-RAG arm only).
    #[serde(default)]
    pub chunk_ids: Vec<String>,
    pub provider: String,
    pub phi_compliant: bool,
    pub params: GenerationParams,
}

impl ClinicalOutput {
    pub fn manifest_pmids(&self) -> BTreeSet<String> {
        self.evidence_manifest
            .iter()
            .flat_map(|m| m.pmid_list.iter().cloned())
            .collect()
    }
}

/// Render retrieved edges as structured evidence blocks, three lines per
/// edge, in input order:
///   [Subject] ->PREDICATE-> [Object]
///   PMID: {pmids} | Tier: {tier} | Temporal: {anchor}
///   Evidence: "{quote}"
/// The Temporal field is omitted for non-temporal edges.
pub fn format_evidence_block(edges: &[&Edge]) -> String {
    let mut out = String::new();
    for (i, e) in edges.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let pmids = if e.pmid_list.is_empty() {
            "curated".to_string()
        } else {
            e.pmid_list.iter().cloned().collect::<Vec<_>>().join(", ")
        };
        out.push_str(&format!(
            "[{}] ->{}-> [{}]\n",
            e.subject.surface, e.predicate, e.object.surface
        ));
        match &e.anchor {
            Some(anchor) if anchor.is_resolved() => {
                out.push_str(&format!(
                    "PMID: {} | Tier: {} | Temporal: {}\n",
                    pmids,
                    e.quality_tier.label(),
                    anchor.display()
                ));
            }
            _ => {
                out.push_str(&format!("PMID: {} | Tier: {}\n", pmids, e.quality_tier.label()));
            }
        }
        out.push_str(&format!("Evidence: \"{}\"\n", e.evidence_sample));
    }
    out
}

pub const CHUNK_SIZE: usize = 500;
pub const CHUNK_OVERLAP: usize = 80;
pub const CHUNK_STRIDE: usize = CHUNK_SIZE - CHUNK_OVERLAP;
pub const RAG_TOP_K: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub id: String,
    pub doc_id: String,
    /// Character offset of the chunk start within its document.
    pub offset: usize,
    pub text: String,
}

/// Fixed-size character chunks with overlap; the final short chunk is kept.
pub fn chunk_document(doc: &Document) -> Vec<Chunk> {
    let chars: Vec<char> = doc.text.chars().collect();
    let mut chunks = Vec::new();
    let mut start = 0usize;
    while start < chars.len() {
        let end = (start + CHUNK_SIZE).min(chars.len());
        chunks.push(Chunk {
            id: format!("{}#{:06}", doc.id, start),
            doc_id: doc.id.clone(),
            offset: start,
            text: chars[start..end].iter().collect(),
        });
        if end == chars.len() {
            break;
        }
        start += CHUNK_STRIDE;
    }
    chunks
}

pub fn chunk_corpus(corpus: &[Document]) -> Vec<Chunk> {
    corpus.iter().flat_map(chunk_document).collect()
}

/// Text embedding used for chunk ranking.
pub trait Embedder: Send + Sync {
    fn embed(&self, text: &str) -> Vec<f32>;
}

/// Deterministic test-time fallback: character 3-grams feature-hashed to a
/// fixed-width vector. Ranking behavior, not embedding quality, is what
/// hermetic runs exercise.
pub struct HashingEmbedder {
    dim: usize,
}

impl HashingEmbedder {
    pub fn new() -> Self {
        HashingEmbedder { dim: 256 }
    }
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        Self::new()
    }
}

impl Embedder for HashingEmbedder {
    fn embed(&self, text: &str) -> Vec<f32> {
        let folded: Vec<char> = text.to_lowercase().chars().collect();
        let mut v = vec![0.0f32; self.dim];
        for w in folded.windows(3) {
            // FNV-1a over the 3-gram.
            let mut h: u64 = 0xcbf29ce484222325;
            for c in w {
                let mut buf = [0u8; 4];
                for b in c.encode_utf8(&mut buf).as_bytes() {
                    h ^= *b as u64;
                    h = h.wrapping_mul(0x100000001b3);
                }
            }
            v[(h % self.dim as u64) as usize] += 1.0;
        }
        let norm: f32 = v.iter().map(|x| x * x).sum::<f32>().sqrt();
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
        }
        v
    }
}

fn cosine(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Top-k chunks by cosine similarity against the query, ties broken by
/// chunk id.
pub fn retrieve_rag_chunks(
    corpus: &[Document],
    query: &str,
    k: usize,
    embedder: &dyn Embedder,
) -> Result<Vec<Chunk>> {
    if corpus.is_empty() {
        return Err(Error::InvalidInput("retrieve_rag_chunks: empty corpus".into()));
    }
    let chunks = chunk_corpus(corpus);
    let qv = embedder.embed(query);
    let mut scored: Vec<(f32, Chunk)> = chunks
        .into_iter()
        .map(|c| (cosine(&qv, &embedder.embed(&c.text)), c))
        .collect();
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.id.cmp(&b.1.id))
    });
    Ok(scored.into_iter().take(k).map(|(_, c)| c).collect())
}

const HEG_DIFFERENTIAL: &str = r#"You are a senior clinical neurologist writing an evidence-grounded differential
diagnosis for a colleague. You have access to a curated knowledge graph with
hierarchical evidence tiers.

Your response should be as DETAILED and COMPREHENSIVE as a clinical consultation
note -- not a brief summary. For each differentiating feature, provide the clinical
reasoning, not just the fact. Think like a neurologist explaining to a fellow.

EVIDENCE CITATION RULES:
- The knowledge graph evidence uses PMID-based citations like [PMID:36637960, GOLD].
  Preserve these exact citation tags when referencing evidence.
- GOLD = Tier 1 curated sources (GeneReviews, OMIM, clinical guidelines) -- highest reliability.
- SILVER = Cross-validated across multiple extraction models -- good confidence.
- BRONZE = Single study or single model -- use with appropriate caveats.
- You MAY -- and SHOULD -- supplement with your clinical expertise to explain WHY
  a feature differentiates, to add pathophysiological context, and to cover
  features that are clinically important but absent from the KG evidence. Clearly
  distinguish: "[PMID:..., GOLD]" for KG-backed claims vs "Clinically, ..." for
  your expert knowledge.
- When evidence conflicts are flagged, present BOTH sides and discuss the
  likely explanation.
- If the KG evidence is sparse for a feature category, state this explicitly and
  supplement with your clinical knowledge, clearly marked as such.

STRUCTURE your response as:
1. A structured comparison table covering: Clinical Features, Antibodies/Biomarkers,
   Autonomic Features, Reflexes/EMG, Treatment Approach, Temporal Course, Associated Conditions
2. For each feature, explain the pathophysiological basis for the difference
3. A clinical synthesis paragraph: what features in this specific patient point toward
   which diagnosis, what tests to order, and what red flags to watch for
4. An evidence quality note: summarize what is backed by guidelines vs single studies"#;

const HEG_TEMPORAL: &str = r#"You are a senior clinical neurologist writing a disease progression comparison
for a colleague. You have access to temporal evidence from a curated knowledge
graph with specific time anchors derived from clinical guidelines and literature.

Your response should be DETAILED -- a clinical teaching case, not a bullet list.
For each time window, explain what is happening pathophysiologically, what the
clinician should monitor, and what interventions are indicated.

EVIDENCE CITATION RULES:
- Preserve the PMID-based citation tags from the evidence (e.g., [PMID:36637960, GOLD]).
- GOLD = curated guidelines, SILVER = cross-validated, BRONZE = single study.
- You MAY -- and SHOULD -- add clinical interpretation around the temporal data,
  explain what clinicians should do at each time window, and fill gaps where the
  KG evidence is sparse. Clearly mark KG-backed claims (with citations) vs your
  expert supplementation (with "Clinically, ...").
- When comparing two diseases, explicitly highlight where their temporal trajectories
  DIVERGE -- these are the clinically actionable differences for differential diagnosis.
- If a time window has no KG evidence, say so and provide expert guidance.

STRUCTURE your response as:
1. A quick-reference milestone comparison (side-by-side table or timeline)
2. Detailed time-window-by-time-window analysis with clinical implications
3. For each divergence point: explain why the difference matters clinically
4. A synthesis: key temporal red flags that distinguish these conditions
5. Note evidence gaps -- which time windows lack high-quality data"#;

const HEG_TREATMENT: &str = r#"You are a senior clinical neurologist writing treatment recommendations for a
colleague. You have access to treatment evidence from a curated knowledge graph
with hierarchical quality tiers.

Your response should be as DETAILED as a treatment protocol -- dosing, monitoring,
expected timelines, and escalation logic. Think like a neurologist writing a
management plan.

EVIDENCE CITATION RULES:
- Preserve PMID-based citation tags from the evidence (e.g., [PMID:36637960, GOLD]).
- GOLD = guideline-level evidence, SILVER = cross-validated, BRONZE = single study.
- Present treatments ordered by evidence quality (GOLD-supported first).
- You MAY -- and SHOULD -- explain mechanisms of action, dosing protocols, monitoring
  parameters, and clinical rationale using your expertise. Treatments mentioned in the
  KG evidence must cite their source. You may also mention clinically important
  treatments NOT in the KG evidence if they are well-established, but clearly
  mark them as "Clinically established (not in current KG)" so the provenance
  distinction is transparent.

STRUCTURE your response as:
1. First-line treatment with evidence tier, dosing, and rationale
2. Second-line options with escalation criteria and timing
3. For each treatment: mechanism, expected response timeline, monitoring requirements
4. Emerging therapies / newer agents with evidence tier
5. Treatments with conflicting evidence: present both sides with tiers
6. Clinical synthesis: recommended treatment algorithm for this specific patient
7. Evidence quality summary: what is guideline-backed vs. emerging vs. expert opinion"#;

const VANILLA_DIFFERENTIAL: &str = r#"You are a clinical neurology expert. Provide a detailed, evidence-based
differential diagnosis for the clinical scenario presented. Cover clinical
features, antibodies/biomarkers, treatment differences, temporal course,
and associated conditions."#;

const VANILLA_TEMPORAL: &str = r#"You are a clinical neurology expert. Provide a detailed disease progression
timeline for the clinical scenario presented. Include onset patterns, key
milestones, treatment timing, and long-term prognosis."#;

const VANILLA_TREATMENT: &str = r#"You are a clinical neurology expert. Provide comprehensive, evidence-based
treatment recommendations for the clinical scenario presented. Cover first-line
and second-line options, mechanisms, and expected outcomes."#;

const GUIDELINE_RAG: &str = r#"You are a clinical neurology expert. You have been provided with reference
text from authoritative clinical sources (GeneReviews, OMIM, clinical
guidelines). Use this reference material to inform your answer.

Your response should be DETAILED and clinically comprehensive. Where possible,
indicate which source a claim comes from (e.g., "per GeneReviews..." or
"according to OMIM..."). You may supplement with your clinical knowledge but
prioritise the provided reference text.

Be as thorough as you would be when writing a clinical consultation report."#;

/// System template for an (arm, output type) pair. The temporal template
/// serves both temporal output types.
pub fn template_for(arm: Arm, output_type: OutputType) -> &'static str {
    match (arm, output_type) {
        (Arm::HegTkg, OutputType::Differential) => HEG_DIFFERENTIAL,
        (Arm::HegTkg, OutputType::TemporalComparative | OutputType::Temporal) => HEG_TEMPORAL,
        (Arm::HegTkg, OutputType::Treatment) => HEG_TREATMENT,
        (Arm::Vanilla, OutputType::Differential) => VANILLA_DIFFERENTIAL,
        (Arm::Vanilla, OutputType::TemporalComparative | OutputType::Temporal) => VANILLA_TEMPORAL,
        (Arm::Vanilla, OutputType::Treatment) => VANILLA_TREATMENT,
        (Arm::GuidelineRag, _) => GUIDELINE_RAG,
    }
}

/// Assembled prompt. The scenario block is identical across arms; every
/// arm-specific byte lives in the system template or the evidence context.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptParts {
    pub system: String,
    pub scenario_block: String,
    pub evidence_block: Option<String>,
}

impl PromptParts {
    pub fn full_text(&self) -> String {
        let mut text = format!("{}\n\n{}", self.system, self.scenario_block);
        if let Some(evidence) = &self.evidence_block {
            text.push_str("\n\n");
            text.push_str(evidence);
        }
        text
    }
}

/// Build the prompt for one (arm, scenario) pair. `evidence_or_chunks` is
/// the formatted evidence block for the graph arm, the concatenated chunk
/// context for the text-RAG arm, and must be None for vanilla.
pub fn build_prompt(
    arm: Arm,
    scenario: &ClinicalScenario,
    evidence_or_chunks: Option<&str>,
) -> Result<PromptParts> {
    let system = template_for(arm, scenario.output_type).to_string();
    let scenario_block = format!("## Clinical Scenario\n{}", scenario.scenario_text);
    let evidence_block = match (arm, evidence_or_chunks) {
        (Arm::Vanilla, None) => None,
        (Arm::Vanilla, Some(_)) => {
            return Err(Error::InvalidInput(
                "vanilla arm takes no evidence context".into(),
            ))
        }
        (Arm::HegTkg, Some(evidence)) => {
            Some(format!("## Knowledge Graph Evidence\n{evidence}"))
        }
        (Arm::GuidelineRag, Some(chunks)) => Some(format!("## Reference Text\n{chunks}")),
        (_, None) => {
            return Err(Error::InvalidInput(format!(
                "arm {arm} requires an evidence context"
            )))
        }
    };
    Ok(PromptParts {
        system,
        scenario_block,
        evidence_block,
    })
}

/// Run synthesis through a provider and assemble the output record with
/// its manifest. Generation parameters are recorded on the output.
pub fn synthesize(
    scenario: &ClinicalScenario,
    arm: Arm,
    prompt: &PromptParts,
    evidence_manifest: Vec<ManifestEntry>,
    chunk_ids: Vec<String>,
    provider: &dyn ModelProvider,
    params: &GenerationParams,
) -> Result<ClinicalOutput> {
    let text = provider.complete(&prompt.full_text(), params)?;
    Ok(ClinicalOutput {
        scenario_id: scenario.id.clone(),
        arm,
        text,
        evidence_manifest,
        chunk_ids,
        provider: provider.id().to_string(),
        phi_compliant: provider.is_local(),
        params: params.clone(),
    })
}

/// Endpoint registry inspected by the privacy gate: only components that
/// see scenario text (potential PHI) belong here.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PrivacyConfig {
    /// (component name, endpoint URL). Fixture/offline components carry
    /// no endpoint and are always compliant.
    pub components: Vec<(String, Option<String>)>,
}

impl PrivacyConfig {
    pub fn with_component(mut self, name: &str, endpoint: Option<String>) -> Self {
        self.components.push((name.to_string(), endpoint));
        self
    }
}

/// Deployment-time check. Strict mode: any component routing to a
/// non-local host is an error naming the component. Non-strict: the same
/// findings come back as warnings.
pub fn validate_privacy_config(cfg: &PrivacyConfig, strict: bool) -> Result<Vec<String>> {
    let mut warnings = Vec::new();
    for (component, endpoint) in &cfg.components {
        if let Some(url) = endpoint {
            if !crate::providers::host_is_local(url) {
                if strict {
                    return Err(Error::Privacy {
                        component: component.clone(),
                        host: url.clone(),
                    });
                }
                warnings.push(format!(
                    "component `{component}` routes to non-local host `{url}`"
                ));
            }
        }
    }
    Ok(warnings)
}
