//! Blinded and citation-aware judge rounds, claim extraction for the
//! claim-support audit, the stratified sampler, and panel aggregation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::citeverify::{render_audit_report, CitationAudit};
use crate::error::{Error, Result};
use crate::evalmetrics::segment_claims;
use crate::providers::{GenerationParams, ModelProvider};
use crate::statkit::{self, SplitMix64};
use crate::synthesis::{Arm, ClinicalOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Round {
    V1,
    V2,
}

impl Round {
    pub fn label(&self) -> &'static str {
        match self {
            Round::V1 => "v1",
            Round::V2 => "v2",
        }
    }
}

pub const DIMENSIONS: [&str; 5] = ["D1", "D2", "D3", "D4", "D5"];

/// One judge's scores for one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertScores {
    pub case_id: String,
    pub judge: String,
    pub round: Round,
    pub d1: u8,
    pub d2: u8,
    pub d3: u8,
    pub d4: u8,
    pub d5: u8,
    pub brief_justification: String,
}

impl LikertScores {
    pub fn dims(&self) -> [u8; 5] {
        [self.d1, self.d2, self.d3, self.d4, self.d5]
    }
}

/// What a judge sees: the scenario and one anonymous output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlindedCase {
    pub blinded_id: String,
    pub scenario_text: String,
    pub output_text: String,
    pub disease_pair: String,
}

/// Input to blinding: one (scenario, arm) output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseInput {
    pub scenario_id: String,
    pub arm: Arm,
    pub disease_pair: String,
    pub scenario_text: String,
    pub output_text: String,
}

/// Maps blinded ids back to (scenario, arm); sealed until scoring closes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SealedKey {
    pub map: BTreeMap<String, (String, Arm)>,
}

/// Assign opaque ids and shuffle deterministically under the seed.
pub fn blind_and_shuffle(cases: &[CaseInput], seed: u64) -> Result<(Vec<BlindedCase>, SealedKey)> {
    let mut seen = BTreeSet::new();
    for c in cases {
        if !seen.insert((c.scenario_id.clone(), c.arm)) {
            return Err(Error::InvalidInput(format!(
                "duplicate case id ({}, {})",
                c.scenario_id, c.arm
            )));
        }
    }
    let mut rng = SplitMix64::new(seed);
    let mut order: Vec<usize> = (0..cases.len()).collect();
    rng.shuffle(&mut order);
    let mut blinded = Vec::with_capacity(cases.len());
    let mut key = SealedKey::default();
    let mut used_ids = BTreeSet::new();
    for &i in &order {
        let case = &cases[i];
        let mut id;
        loop {
            id = format!("CASE-{:08x}", rng.next_u64() as u32);
            if used_ids.insert(id.clone()) {
                break;
            }
        }
        key.map
            .insert(id.clone(), (case.scenario_id.clone(), case.arm));
        blinded.push(BlindedCase {
            blinded_id: id,
            scenario_text: case.scenario_text.clone(),
            output_text: case.output_text.clone(),
            disease_pair: case.disease_pair.clone(),
        });
    }
    Ok((blinded, key))
}

const JUDGE_RUBRIC: &str = r#"  D1 (Verifiability): Score 1-5 on whether clinical claims can be traced to
      specific published evidence. Does the output cite specific PMIDs, studies,
      or guidelines? Can a clinician verify each claim within 1 minute?
      Score 5 if most claims have verifiable citations; 1 if no citations.
  D2 (Actionability): Score 1-5 on whether the output provides actionable
      clinical guidance. Does it specify concrete next steps, dosing, monitoring,
      or referral criteria? Score 5 if immediately actionable; 1 if only general
      information.
  D3 (Temporal Precision): Score 1-5 on whether the output provides specific
      time points for disease milestones, treatment response windows, and
      monitoring intervals. Score 5 if precise temporal anchoring; 1 if only
      vague temporal language.
  D4 (Non-Expert Safety): Score 1-5 on whether the output is safe for a
      non-specialist (e.g., GP) to act on. Are red flags clearly flagged? Are
      dangerous diagnostic pitfalls highlighted? Score 5 if safe for non-expert
      use; 1 if serious safety risks without specialist oversight.
  D5 (Clinical Completeness): Score 1-5 on whether the output covers ALL
      clinically important features for this scenario: key differentiating
      features, relevant investigations, treatment options, prognosis, and
      red flags."#;

const V2_D1_INSTRUCTION: &str = r#"IMPORTANT: For D1 (Verifiability), use the Citation Audit Report above
as ground truth. If the audit shows 0 PMIDs or mostly wrong-field citations,
D1 should be LOW (1-2). If the audit shows most PMIDs are real and relevant,
D1 should be HIGH (4-5)."#;

const RESPONSE_FORMAT: &str = r#"## Response Format
Respond ONLY with a JSON object (no markdown, no explanation):
{
  "D1_verifiability": <1-5>,
  "D2_actionability": <1-5>,
  "D3_temporal_precision": <1-5>,
  "D4_nonexpert_safety": <1-5>,
  "D5_clinical_completeness": <1-5>,
  "brief_justification": "<2-3 sentences explaining your overall assessment>"
}"#;

/// Build the judge prompt. The citation-aware round differs from the
/// blind round by exactly two additions: the rendered audit report after
/// the output, and the D1 ground-truth instruction before the dimensions.
pub fn build_judge_prompt(case: &BlindedCase, round: Round, audit: Option<&CitationAudit>) -> String {
    let mut prompt = String::from(
        "You are an expert clinical evaluator (board-certified neurologist with 15+ years\n\
         of experience in neuromuscular diseases). You are evaluating an AI-generated\n\
         clinical output for a rare neuromuscular disease scenario.\n\n",
    );
    prompt.push_str("## Clinical Scenario\n");
    prompt.push_str(&case.scenario_text);
    prompt.push_str("\n\n## AI-Generated Output\n");
    prompt.push_str(&case.output_text);
    prompt.push_str("\n\n");
    if round == Round::V2 {
        if let Some(audit) = audit {
            prompt.push_str(&render_audit_report(audit));
            prompt.push('\n');
        }
        prompt.push_str(V2_D1_INSTRUCTION);
        prompt.push_str("\n\n");
    }
    prompt.push_str(
        "## Evaluation Task\nRate this output on EACH of the following 5 dimensions using a 1-5 Likert scale:\n",
    );
    prompt.push_str(JUDGE_RUBRIC);
    prompt.push_str("\n\n");
    prompt.push_str(RESPONSE_FORMAT);
    prompt
}

fn parse_judge_reply(case_id: &str, judge: &str, round: Round, raw: &str) -> Result<LikertScores> {
    let value: serde_json::Value =
        serde_json::from_str(raw.trim()).map_err(|e| Error::ProviderReply {
            provider: judge.to_string(),
            message: format!("judge reply is not JSON: {e}"),
            raw: raw.to_string(),
        })?;
    let mut dims = [0u8; 5];
    for (i, key) in [
        "D1_verifiability",
        "D2_actionability",
        "D3_temporal_precision",
        "D4_nonexpert_safety",
        "D5_clinical_completeness",
    ]
    .iter()
    .enumerate()
    {
        let v = value[key].as_i64().ok_or_else(|| Error::ProviderReply {
            provider: judge.to_string(),
            message: format!("missing dimension {key}"),
            raw: raw.to_string(),
        })?;
        if !(1..=5).contains(&v) {
            return Err(Error::ProviderReply {
                provider: judge.to_string(),
                message: format!("dimension {key} = {v} outside 1-5"),
                raw: raw.to_string(),
            });
        }
        dims[i] = v as u8;
    }
    Ok(LikertScores {
        case_id: case_id.to_string(),
        judge: judge.to_string(),
        round,
        d1: dims[0],
        d2: dims[1],
        d3: dims[2],
        d4: dims[3],
        d5: dims[4],
        brief_justification: value["brief_justification"]
            .as_str()
            .unwrap_or_default()
            .to_string(),
    })
}

/// Score one case. The citation-aware round requires an audit. A
/// malformed reply earns one re-prompt; a second failure surfaces as an
/// error the caller records as a missing case.
pub fn judge_case(
    case: &BlindedCase,
    round: Round,
    audit: Option<&CitationAudit>,
    judge: &dyn ModelProvider,
) -> Result<LikertScores> {
    if round == Round::V2 && audit.is_none() {
        return Err(Error::InvalidInput(
            "judge_case: citation-aware round requires an audit".into(),
        ));
    }
    let prompt = build_judge_prompt(case, round, audit);
    let params = GenerationParams {
        temperature: 0.0,
        max_tokens: 2000,
    };
    let first = judge.complete(&prompt, &params)?;
    match parse_judge_reply(&case.blinded_id, judge.id(), round, &first) {
        Ok(scores) => Ok(scores),
        Err(_) => {
            let retry_prompt = format!(
                "{prompt}\n\nYour previous reply could not be parsed. Respond ONLY with the JSON object."
            );
            let second = judge.complete(&retry_prompt, &params)?;
            parse_judge_reply(&case.blinded_id, judge.id(), round, &second)
        }
    }
}

/// One row of a released score file: unblinded identifiers plus scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub disease_pair: String,
    pub scenario_id: String,
    pub arm: Arm,
    pub judge: String,
    pub round: Round,
    pub d1: u8,
    pub d2: u8,
    pub d3: u8,
    pub d4: u8,
    pub d5: u8,
}

impl ScoreRecord {
    pub fn dim(&self, index: usize) -> u8 {
        [self.d1, self.d2, self.d3, self.d4, self.d5][index]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contrast {
    pub disease_pair: String,
    pub dimension: String,
    pub baseline: Arm,
    pub delta: f64,
    pub cohens_d: f64,
    pub p_value: f64,
    pub q_value: f64,
}

/// Per-(pair, arm, dimension) means and the graph-vs-baseline contrasts
/// with multiplicity correction across the six comparisons per dimension.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PanelTables {
    pub per_pair: BTreeMap<(String, Arm, String), CellSummary>,
    pub pooled: BTreeMap<(Arm, String), CellSummary>,
    pub contrasts: Vec<Contrast>,
}

fn summarize(values: &[f64]) -> CellSummary {
    CellSummary {
        mean: statkit::mean(values),
        sd: statkit::sample_sd(values),
        n: values.len(),
    }
}

/// Aggregate one round's score records. Permutation-invariant in input
/// order. With a single arm present, no contrasts are emitted.
pub fn aggregate_panel(records: &[ScoreRecord]) -> Result<PanelTables> {
    let mut cells: HashMap<(String, Arm, usize), Vec<f64>> = HashMap::new();
    let mut pooled: HashMap<(Arm, usize), Vec<f64>> = HashMap::new();
    let mut pairs: BTreeSet<String> = BTreeSet::new();
    for r in records {
        pairs.insert(r.disease_pair.clone());
        for dim in 0..5 {
            cells
                .entry((r.disease_pair.clone(), r.arm, dim))
                .or_default()
                .push(r.dim(dim) as f64);
            pooled.entry((r.arm, dim)).or_default().push(r.dim(dim) as f64);
        }
    }
    let mut tables = PanelTables::default();
    for ((pair, arm, dim), values) in &cells {
        tables.per_pair.insert(
            (pair.clone(), *arm, DIMENSIONS[*dim].to_string()),
            summarize(values),
        );
    }
    for ((arm, dim), values) in &pooled {
        tables
            .pooled
            .insert((*arm, DIMENSIONS[*dim].to_string()), summarize(values));
    }

    // Contrasts per dimension: graph arm vs each baseline per pair,
    // BH-corrected across the 6 comparisons (3 pairs x 2 baselines).
    #[allow(clippy::needless_range_loop)]
    for dim in 0..5 {
        let mut contrasts: Vec<Contrast> = Vec::new();
        let mut p_values: Vec<f64> = Vec::new();
        for pair in &pairs {
            for baseline in [Arm::Vanilla, Arm::GuidelineRag] {
                let heg = cells.get(&(pair.clone(), Arm::HegTkg, dim));
                let base = cells.get(&(pair.clone(), baseline, dim));
                let (Some(heg), Some(base)) = (heg, base) else {
                    continue;
                };
                let delta = statkit::mean(heg) - statkit::mean(base);
                let d = statkit::cohens_d(
                    statkit::mean(base),
                    statkit::sample_sd(base),
                    base.len(),
                    statkit::mean(heg),
                    statkit::sample_sd(heg),
                    heg.len(),
                )
                .unwrap_or(0.0);
                let p = statkit::mann_whitney_u(base, heg)?.p_value;
                p_values.push(p);
                contrasts.push(Contrast {
                    disease_pair: pair.clone(),
                    dimension: DIMENSIONS[dim].to_string(),
                    baseline,
                    delta,
                    cohens_d: d,
                    p_value: p,
                    q_value: p,
                });
            }
        }
        if !contrasts.is_empty() {
            let q = statkit::bh_correct(&p_values)?;
            for (c, q) in contrasts.iter_mut().zip(q) {
                c.q_value = q;
            }
            tables.contrasts.extend(contrasts);
        }
    }
    Ok(tables)
}

/// One (claim, PMID) candidate for the claim-support audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimPmid {
    pub scenario_id: String,
    pub disease_pair: String,
    pub claim: String,
    pub pmid: String,
    pub tier: String,
}

/// Meta-statement patterns: sentences that describe the evidence-tier
/// framework itself rather than clinical content.
pub fn default_meta_patterns() -> Vec<String> {
    [
        "tier 1 curated",
        "tier 2",
        "gold =",
        "silver =",
        "bronze =",
        "gold tier",
        "silver tier",
        "bronze tier",
        "evidence tier",
        "quality tier",
        "citation audit",
        "evidence quality note",
        "knowledge graph evidence is sparse",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn tag_pattern() -> &'static regex::Regex {
    static RE: std::sync::OnceLock<regex::Regex> = std::sync::OnceLock::new();
    RE.get_or_init(|| {
        regex::Regex::new(r"\[PMID:\s*(\d{6,9})(?:\s*,\s*([A-Z]+))?\]").unwrap()
    })
}

/// Sentence-level claims carrying PMID tags; a sentence with two tags
/// yields two pairs. Meta-statements are filtered by the pattern list.
pub fn extract_claims(
    outputs: &[(String, String, ClinicalOutput)],
    meta_patterns: &[String],
) -> Vec<ClaimPmid> {
    let mut pairs = Vec::new();
    for (scenario_id, disease_pair, output) in outputs {
        for claim in segment_claims(&output.text) {
            let folded = claim.to_lowercase();
            if meta_patterns.iter().any(|p| folded.contains(&p.to_lowercase())) {
                continue;
            }
            for caps in tag_pattern().captures_iter(&claim) {
                pairs.push(ClaimPmid {
                    scenario_id: scenario_id.clone(),
                    disease_pair: disease_pair.clone(),
                    claim: claim.clone(),
                    pmid: caps[1].to_string(),
                    tier: caps
                        .get(2)
                        .map(|t| t.as_str().to_string())
                        .unwrap_or_else(|| "BRONZE".to_string()),
                });
            }
        }
    }
    pairs
}

/// Stratified sample over (disease pair x tier) cells with a per-PMID cap
/// and a per-cell floor. Equal base quotas; shortfall is redistributed
/// proportionally to remaining cell capacity. Deterministic under seed.
pub fn stratified_sample(
    pairs: &[ClaimPmid],
    n: usize,
    seed: u64,
    floor: usize,
    cap: usize,
) -> Result<Vec<ClaimPmid>> {
    // Cells in deterministic order.
    let mut cells: BTreeMap<(String, String), Vec<ClaimPmid>> = BTreeMap::new();
    for p in pairs {
        cells
            .entry((p.disease_pair.clone(), p.tier.clone()))
            .or_default()
            .push(p.clone());
    }
    let cell_keys: Vec<(String, String)> = cells.keys().cloned().collect();
    if cell_keys.is_empty() {
        return Err(Error::InvalidInput("stratified_sample: no candidates".into()));
    }

    // Capped availability over all cells bounds the draw.
    let mut per_pmid_available: HashMap<&str, usize> = HashMap::new();
    for p in pairs {
        *per_pmid_available.entry(p.pmid.as_str()).or_default() += 1;
    }
    let total_available: usize = per_pmid_available.values().map(|c| (*c).min(cap)).sum();
    if total_available < n {
        return Err(Error::InvalidInput(format!(
            "stratified_sample: only {total_available} rows available under the per-PMID cap, {n} requested (shortfall {})",
            n - total_available
        )));
    }

    // Shuffle each cell under its own substream.
    let mut shuffled: BTreeMap<(String, String), Vec<ClaimPmid>> = BTreeMap::new();
    for (i, key) in cell_keys.iter().enumerate() {
        let mut items = cells[key].clone();
        let mut rng = SplitMix64::substream(seed, i as u64);
        rng.shuffle(&mut items);
        shuffled.insert(key.clone(), items);
    }

    let mut pmid_counts: HashMap<String, usize> = HashMap::new();
    let mut drawn: BTreeMap<(String, String), Vec<ClaimPmid>> = BTreeMap::new();
    let mut cursor: BTreeMap<(String, String), usize> = BTreeMap::new();
    for key in &cell_keys {
        drawn.insert(key.clone(), Vec::new());
        cursor.insert(key.clone(), 0);
    }

    let draw_from_cell = |key: &(String, String),
                          want: usize,
                          shuffled: &BTreeMap<(String, String), Vec<ClaimPmid>>,
                          drawn: &mut BTreeMap<(String, String), Vec<ClaimPmid>>,
                          cursor: &mut BTreeMap<(String, String), usize>,
                          pmid_counts: &mut HashMap<String, usize>|
     -> usize {
        let items = &shuffled[key];
        let mut taken = 0;
        let pos = cursor.get_mut(key).unwrap();
        while taken < want && *pos < items.len() {
            let candidate = items[*pos].clone();
            *pos += 1;
            let count = pmid_counts.entry(candidate.pmid.clone()).or_default();
            if *count < cap {
                *count += 1;
                drawn.get_mut(key).unwrap().push(candidate);
                taken += 1;
            }
        }
        taken
    };

    // Base pass: equal quota, at least the floor, bounded by availability.
    let base = n / cell_keys.len();
    let mut total = 0usize;
    for key in &cell_keys {
        let want = base.max(floor);
        total += draw_from_cell(key, want, &shuffled, &mut drawn, &mut cursor, &mut pmid_counts);
    }

    // Trim overdraw deterministically from the largest cells, never below
    // the floor (or a cell's full take when smaller).
    while total > n {
        let key = cell_keys
            .iter()
            .max_by_key(|k| drawn[*k].len())
            .unwrap()
            .clone();
        let cell = drawn.get_mut(&key).unwrap();
        if cell.len() <= floor {
            break;
        }
        if let Some(removed) = cell.pop() {
            *pmid_counts.get_mut(&removed.pmid).unwrap() -= 1;
            total -= 1;
        }
    }

    // Redistribute shortfall proportional to each cell's remaining
    // capacity, at least one row per round for any cell with headroom.
    // Cells are served smallest headroom first so nearly-full cells are
    // topped up before the bulk cells absorb the rest.
    while total < n {
        let mut remaining: Vec<((String, String), usize)> = Vec::new();
        for key in &cell_keys {
            let items = &shuffled[key];
            let pos = cursor[key];
            let headroom = items[pos..]
                .iter()
                .filter(|c| pmid_counts.get(&c.pmid).copied().unwrap_or(0) < cap)
                .count();
            if headroom > 0 {
                remaining.push((key.clone(), headroom));
            }
        }
        let capacity: usize = remaining.iter().map(|(_, h)| h).sum();
        if capacity == 0 {
            return Err(Error::InvalidInput(format!(
                "stratified_sample: exhausted capacity at {total} of {n} rows"
            )));
        }
        remaining.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        let shortfall = n - total;
        for (key, headroom) in remaining {
            if total >= n {
                break;
            }
            let share = ((shortfall * headroom) / capacity).max(1).min(n - total);
            total += draw_from_cell(&key, share, &shuffled, &mut drawn, &mut cursor, &mut pmid_counts);
        }
    }

    let mut sample: Vec<ClaimPmid> = Vec::with_capacity(n);
    for key in &cell_keys {
        sample.extend(drawn[key].iter().cloned());
    }
    Ok(sample)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NliLabel {
    Entails,
    Neutral,
    Contradicts,
}

impl NliLabel {
    pub fn label(&self) -> &'static str {
        match self {
            NliLabel::Entails => "ENTAILS",
            NliLabel::Neutral => "NEUTRAL",
            NliLabel::Contradicts => "CONTRADICTS",
        }
    }

    pub fn parse(s: &str) -> Option<NliLabel> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ENTAILS" => Some(NliLabel::Entails),
            "NEUTRAL" => Some(NliLabel::Neutral),
            "CONTRADICTS" => Some(NliLabel::Contradicts),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NliVerdict {
    pub claim: String,
    pub pmid: String,
    pub label: NliLabel,
    pub confidence: f64,
}

/// Claim-support judge prompt. Review and guideline abstracts are usually
/// meta-summaries, so absence of a specific claim is NEUTRAL, not
/// CONTRADICTS.
pub fn build_nli_prompt(claim: &str, pmid: &str, title: &str, abstract_text: &str) -> String {
    format!(
        "You are auditing whether a cited source supports a clinical claim.\n\
         Label the pair with exactly one of: ENTAILS, NEUTRAL, or CONTRADICTS.\n\
         - ENTAILS: the abstract directly states, demonstrates, or implies the claim.\n\
         - NEUTRAL: the abstract is on-topic but does not directly assert the specific\n\
           claim. PubMed abstracts of review or guideline papers are typically\n\
           meta-summaries describing paper structure rather than detailed clinical\n\
           findings; absence of a specific claim from the abstract is therefore\n\
           NEUTRAL, not CONTRADICTS.\n\
         - CONTRADICTS: the abstract refutes the claim.\n\n\
         ## Claim\n{claim}\n\n## Cited PMID\n{pmid}\n\n## Title\n{title}\n\n\
         ## Abstract\n{abstract_text}\n\n\
         Respond ONLY with JSON: {{\"label\": \"ENTAILS|NEUTRAL|CONTRADICTS\", \"confidence\": <0.0-1.0>}}"
    )
}

/// Run the claim-support judge on one (claim, PMID) pair.
pub fn nli_judge(
    claim: &str,
    pmid: &str,
    title: &str,
    abstract_text: &str,
    provider: &dyn ModelProvider,
) -> Result<NliVerdict> {
    let prompt = build_nli_prompt(claim, pmid, title, abstract_text);
    let raw = provider.complete(
        &prompt,
        &GenerationParams {
            temperature: 0.0,
            max_tokens: 200,
        },
    )?;
    let value: serde_json::Value =
        serde_json::from_str(raw.trim()).map_err(|e| Error::ProviderReply {
            provider: provider.id().to_string(),
            message: format!("claim-support reply is not JSON: {e}"),
            raw: raw.clone(),
        })?;
    let label = value["label"]
        .as_str()
        .and_then(NliLabel::parse)
        .ok_or_else(|| Error::ProviderReply {
            provider: provider.id().to_string(),
            message: "missing or unknown label".into(),
            raw: raw.clone(),
        })?;
    Ok(NliVerdict {
        claim: claim.to_string(),
        pmid: pmid.to_string(),
        label,
        confidence: value["confidence"].as_f64().unwrap_or(0.0),
    })
}

/// One row of a released verdict file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NliRow {
    pub scenario_id: String,
    pub disease_pair: String,
    pub tier: String,
    pub claim: String,
    pub pmid: String,
    pub label: NliLabel,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierBreakdown {
    pub tier: String,
    pub n: usize,
    pub entails: usize,
    pub neutral: usize,
    pub contradicts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NliSummary {
    pub n: usize,
    pub entails: usize,
    pub neutral: usize,
    pub contradicts: usize,
    pub contradiction_rate: f64,
    pub contradiction_ci: (f64, f64),
    pub non_contradiction_rate: f64,
    pub non_contradiction_ci: (f64, f64),
    pub entailment_rate: f64,
    pub entailment_ci: (f64, f64),
    pub by_tier: Vec<TierBreakdown>,
}

/// Label rates with seeded bootstrap intervals and the per-tier table.
pub fn aggregate_nli(rows: &[NliRow], seed: u64) -> Result<NliSummary> {
    if rows.is_empty() {
        return Err(Error::InvalidInput("aggregate_nli: no verdicts".into()));
    }
    let n = rows.len();
    let count = |label: NliLabel| rows.iter().filter(|r| r.label == label).count();
    let entails = count(NliLabel::Entails);
    let neutral = count(NliLabel::Neutral);
    let contradicts = count(NliLabel::Contradicts);

    let indicator = |pred: &dyn Fn(&NliRow) -> bool| -> Vec<f64> {
        rows.iter().map(|r| if pred(r) { 1.0 } else { 0.0 }).collect()
    };
    let ci = |values: &[f64]| statkit::bootstrap_ci(values, statkit::mean, 10_000, seed, 0.95);

    let contra = indicator(&|r| r.label == NliLabel::Contradicts);
    let noncontra = indicator(&|r| r.label != NliLabel::Contradicts);
    let entailed = indicator(&|r| r.label == NliLabel::Entails);

    let mut by_tier: BTreeMap<String, TierBreakdown> = BTreeMap::new();
    for r in rows {
        let entry = by_tier.entry(r.tier.clone()).or_insert(TierBreakdown {
            tier: r.tier.clone(),
            n: 0,
            entails: 0,
            neutral: 0,
            contradicts: 0,
        });
        entry.n += 1;
        match r.label {
            NliLabel::Entails => entry.entails += 1,
            NliLabel::Neutral => entry.neutral += 1,
            NliLabel::Contradicts => entry.contradicts += 1,
        }
    }

    Ok(NliSummary {
        n,
        entails,
        neutral,
        contradicts,
        contradiction_rate: contradicts as f64 / n as f64,
        contradiction_ci: ci(&contra)?,
        non_contradiction_rate: (n - contradicts) as f64 / n as f64,
        non_contradiction_ci: ci(&noncontra)?,
        entailment_rate: entails as f64 / n as f64,
        entailment_ci: ci(&entailed)?,
        by_tier: by_tier.into_values().collect(),
    })
}
