//! Model-provider contract and the shipped implementations: byte-replay
//! fixtures, deterministic offline providers for hermetic runs, and a
//! minimal HTTP client for live endpoints.

use std::collections::HashMap;
use std::path::Path;

use md5::{Digest, Md5};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::{Abstract, RawTriplet, ScreeningReply};
use crate::pairconfig::DiseasePairConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            temperature: 0.0,
            max_tokens: 8000,
        }
    }
}

/// Contract over extraction/synthesis/judge models. Implementations must
/// tolerate concurrent calls.
pub trait ModelProvider: Send + Sync {
    fn id(&self) -> &str;

    /// Relevance screening for one abstract.
    fn screen(&self, abstr: &Abstract, cfg: &DiseasePairConfig) -> Result<ScreeningReply>;

    /// Schema-guided triplet extraction from one abstract.
    fn extract(&self, abstr: &Abstract, cfg: &DiseasePairConfig) -> Result<Vec<RawTriplet>>;

    /// Free-text completion; synthesis, judging and NLI calls go through
    /// this surface.
    fn complete(&self, prompt: &str, params: &GenerationParams) -> Result<String>;

    /// Whether this provider keeps data on the local host.
    fn is_local(&self) -> bool {
        true
    }
}

fn md5_hex(text: &str) -> String {
    let mut hasher = Md5::new();
    hasher.update(text.as_bytes());
    format!("{:x}", hasher.finalize())
}

/// One recorded fixture response.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "call", rename_all = "snake_case")]
pub enum FixtureRecord {
    Screen {
        provider: String,
        pmid: String,
        extract: bool,
        confidence: f64,
    },
    Extract {
        provider: String,
        pmid: String,
        triplets: Vec<RawTriplet>,
    },
    Complete {
        provider: String,
        /// MD5 of the exact prompt text.
        prompt_md5: String,
        text: String,
    },
}

/// Replays recorded responses byte-identically; any unrecorded call is a
/// transport error so fixture gaps surface immediately.
pub struct FixtureProvider {
    id: String,
    screen: HashMap<String, ScreeningReply>,
    extract: HashMap<String, Vec<RawTriplet>>,
    complete: HashMap<String, String>,
}

impl FixtureProvider {
    pub fn new(id: impl Into<String>) -> Self {
        FixtureProvider {
            id: id.into(),
            screen: HashMap::new(),
            extract: HashMap::new(),
            complete: HashMap::new(),
        }
    }

    /// Load every record for `id` from a JSONL fixture file.
    pub fn from_jsonl(id: impl Into<String>, path: impl AsRef<Path>) -> Result<Self> {
        let id = id.into();
        let mut provider = FixtureProvider::new(id.clone());
        let text = std::fs::read_to_string(path.as_ref())?;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let record: FixtureRecord = serde_json::from_str(line)?;
            provider.insert(record);
        }
        Ok(provider)
    }

    pub fn insert(&mut self, record: FixtureRecord) {
        match record {
            FixtureRecord::Screen {
                provider,
                pmid,
                extract,
                confidence,
            } => {
                if provider == self.id {
                    self.screen.insert(pmid, ScreeningReply { extract, confidence });
                }
            }
            FixtureRecord::Extract {
                provider,
                pmid,
                triplets,
            } => {
                if provider == self.id {
                    self.extract.insert(pmid, triplets);
                }
            }
            FixtureRecord::Complete {
                provider,
                prompt_md5,
                text,
            } => {
                if provider == self.id {
                    self.complete.insert(prompt_md5, text);
                }
            }
        }
    }

    pub fn record_screen(&mut self, pmid: &str, extract: bool, confidence: f64) {
        self.screen
            .insert(pmid.to_string(), ScreeningReply { extract, confidence });
    }

    pub fn record_extract(&mut self, pmid: &str, triplets: Vec<RawTriplet>) {
        self.extract.insert(pmid.to_string(), triplets);
    }

    pub fn record_complete(&mut self, prompt: &str, text: &str) {
        self.complete.insert(md5_hex(prompt), text.to_string());
    }

    fn missing(&self, what: &str) -> Error {
        Error::ProviderTransport {
            provider: self.id.clone(),
            message: format!("no fixture recorded for {what}"),
        }
    }
}

impl ModelProvider for FixtureProvider {
    fn id(&self) -> &str {
        &self.id
    }

    fn screen(&self, abstr: &Abstract, _cfg: &DiseasePairConfig) -> Result<ScreeningReply> {
        self.screen
            .get(&abstr.pmid)
            .cloned()
            .ok_or_else(|| self.missing(&format!("screen/{}", abstr.pmid)))
    }

    fn extract(&self, abstr: &Abstract, _cfg: &DiseasePairConfig) -> Result<Vec<RawTriplet>> {
        self.extract
            .get(&abstr.pmid)
            .cloned()
            .ok_or_else(|| self.missing(&format!("extract/{}", abstr.pmid)))
    }

    fn complete(&self, prompt: &str, _params: &GenerationParams) -> Result<String> {
        self.complete
            .get(&md5_hex(prompt))
            .cloned()
            .ok_or_else(|| self.missing("complete/<prompt>"))
    }
}

/// Deterministic synthesis stand-in: echoes every evidence citation tag
/// from the prompt into a fixed narrative shape. Hermetic runs use it in
/// place of a cloud synthesis model.
pub struct EchoProvider {
    id: String,
}

impl EchoProvider {
    pub fn new() -> Self {
        EchoProvider {
            id: "echo-synth".into(),
        }
    }
}

impl Default for EchoProvider {
    fn default() -> Self {
        Self::new()
    }
}

impl ModelProvider for EchoProvider {
    fn id(&self) -> &str {
        &self.id
    }

    fn screen(&self, _abstr: &Abstract, _cfg: &DiseasePairConfig) -> Result<ScreeningReply> {
        Ok(ScreeningReply {
            extract: true,
            confidence: 0.9,
        })
    }

    fn extract(&self, _abstr: &Abstract, _cfg: &DiseasePairConfig) -> Result<Vec<RawTriplet>> {
        Ok(vec![])
    }

    fn complete(&self, prompt: &str, _params: &GenerationParams) -> Result<String> {
        let triple_re =
            regex::Regex::new(r"(?m)^\[(?P<s>[^\]]+)\] ->(?P<p>[A-Z_]+)-> \[(?P<o>[^\]]+)\]\n(?P<meta>PMID: [^\n]+)$")
                .unwrap();
        let meta_re = regex::Regex::new(
            r"^PMID: (?P<pmids>[^|]+) \| Tier: (?P<tier>[A-Z]+)(?: \| Temporal: (?P<anchor>\S+))?$",
        )
        .unwrap();
        let mut out = String::from("Clinical synthesis.\n");
        let mut cited = 0usize;
        for caps in triple_re.captures_iter(prompt) {
            let Some(meta) = meta_re.captures(&caps["meta"]) else {
                continue;
            };
            let tier = &meta["tier"];
            let first_pmid = meta["pmids"].split(',').next().unwrap_or("").trim().to_string();
            let tag = if first_pmid == "curated" || first_pmid.is_empty() {
                format!("[{tier}]")
            } else {
                format!("[PMID:{first_pmid}, {tier}]")
            };
            let (s, p, o) = (&caps["s"], &caps["p"], &caps["o"]);
            match meta.name("anchor") {
                Some(anchor) => out.push_str(&format!(
                    "{s} relates to {o} through {p} at {} {tag}.\n",
                    anchor.as_str()
                )),
                None => out.push_str(&format!("{s} relates to {o} through {p} {tag}.\n")),
            }
            // Every pmid behind the edge gets an inline mention so the
            // manifest stays traceable from the text alone.
            for extra in meta["pmids"].split(',').skip(1) {
                let extra = extra.trim();
                if !extra.is_empty() && extra != "curated" {
                    out.push_str(&format!("Corroborating evidence is indexed [PMID:{extra}, {tier}].\n"));
                }
            }
            cited += 1;
        }
        if cited == 0 {
            out.push_str(
                "The presentation is assessed on clinical grounds; \
                 management follows standard practice for the suspected condition.\n",
            );
        }
        Ok(out)
    }
}

/// Deterministic judge: follows the scoring instructions in the prompt.
/// Verifiability tracks the citation audit when one is attached (the
/// citation-aware round), otherwise surface citation density.
pub struct HeuristicJudgeProvider {
    id: String,
}

impl HeuristicJudgeProvider {
    pub fn new(id: impl Into<String>) -> Self {
        HeuristicJudgeProvider { id: id.into() }
    }
}

impl ModelProvider for HeuristicJudgeProvider {
    fn id(&self) -> &str {
        &self.id
    }

    fn screen(&self, _abstr: &Abstract, _cfg: &DiseasePairConfig) -> Result<ScreeningReply> {
        Err(Error::ProviderTransport {
            provider: self.id.clone(),
            message: "judge provider does not screen".into(),
        })
    }

    fn extract(&self, _abstr: &Abstract, _cfg: &DiseasePairConfig) -> Result<Vec<RawTriplet>> {
        Err(Error::ProviderTransport {
            provider: self.id.clone(),
            message: "judge provider does not extract".into(),
        })
    }

    fn complete(&self, prompt: &str, _params: &GenerationParams) -> Result<String> {
        if prompt.contains("ENTAILS") && prompt.contains("CONTRADICTS") {
            // NLI call: entail when the claim text occurs in the abstract.
            let claim = extract_block(prompt, "## Claim");
            let abstract_text = extract_block(prompt, "## Abstract").to_lowercase();
            let label = if !claim.is_empty() && abstract_text.contains(&claim.to_lowercase()) {
                "ENTAILS"
            } else {
                "NEUTRAL"
            };
            return Ok(format!(
                "{{\"label\": \"{label}\", \"confidence\": 0.95}}"
            ));
        }
        let d1 = if prompt.contains("## Citation Audit Report") {
            if prompt.contains("**0 PubMed identifiers (PMIDs)**") {
                1
            } else if prompt.contains("[RELEVANT]") {
                5
            } else {
                2
            }
        } else {
            // Blind round: judge surface plausibility only.
            if prompt.contains("[PMID:") {
                5
            } else {
                4
            }
        };
        Ok(format!(
            "{{\"D1_verifiability\": {d1}, \"D2_actionability\": 4, \
              \"D3_temporal_precision\": 4, \"D4_nonexpert_safety\": 4, \
              \"D5_clinical_completeness\": 4, \
              \"brief_justification\": \"scored by rule\"}}"
        ))
    }
}

fn extract_block<'a>(prompt: &'a str, header: &str) -> &'a str {
    if let Some(start) = prompt.find(header) {
        let body = &prompt[start + header.len()..];
        let end = body.find("\n##").unwrap_or(body.len());
        body[..end].trim()
    } else {
        ""
    }
}

/// Minimal chat-completions client for live endpoints. The endpoint host
/// decides PHI locality; the privacy gate inspects it before any call.
pub struct HttpProvider {
    id: String,
    endpoint: String,
    api_key: Option<String>,
    model: String,
}

impl HttpProvider {
    pub fn new(
        id: impl Into<String>,
        endpoint: impl Into<String>,
        model: impl Into<String>,
        api_key: Option<String>,
    ) -> Self {
        HttpProvider {
            id: id.into(),
            endpoint: endpoint.into(),
            model: model.into(),
            api_key,
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn post(&self, prompt: &str, params: &GenerationParams) -> Result<String> {
        let body = serde_json::json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        });
        let mut request = ureq::post(&self.endpoint);
        if let Some(key) = &self.api_key {
            request = request.header("Authorization", &format!("Bearer {key}"));
        }
        let mut response = request
            .header("Content-Type", "application/json")
            .send(body.to_string())
            .map_err(|e| Error::ProviderTransport {
                provider: self.id.clone(),
                message: e.to_string(),
            })?;
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::ProviderTransport {
                provider: self.id.clone(),
                message: e.to_string(),
            })?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::ProviderReply {
                provider: self.id.clone(),
                message: e.to_string(),
                raw: text.clone(),
            })?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(|s| s.to_string())
            .ok_or_else(|| Error::ProviderReply {
                provider: self.id.clone(),
                message: "missing choices[0].message.content".into(),
                raw: text,
            })
    }
}

pub fn host_is_local(endpoint: &str) -> bool {
    let host = endpoint
        .trim_start_matches("https://")
        .trim_start_matches("http://")
        .split(['/', ':'])
        .next()
        .unwrap_or("");
    matches!(host, "localhost" | "127.0.0.1" | "::1" | "0.0.0.0")
}

impl ModelProvider for HttpProvider {
    fn id(&self) -> &str {
        &self.id
    }

    fn screen(&self, abstr: &Abstract, cfg: &DiseasePairConfig) -> Result<ScreeningReply> {
        let prompt = format!(
            "Decide whether this abstract contains extractable {} content.\n\
             Reply ONLY with JSON {{\"extract\": true|false, \"confidence\": 0.0-1.0}}.\n\n\
             Title: {}\n\nAbstract: {}",
            cfg.label, abstr.title, abstr.text
        );
        let raw = self.post(&prompt, &GenerationParams { temperature: 0.0, max_tokens: 200 })?;
        serde_json::from_str(raw.trim()).map_err(|e| Error::ProviderReply {
            provider: self.id.clone(),
            message: e.to_string(),
            raw,
        })
    }

    fn extract(&self, abstr: &Abstract, cfg: &DiseasePairConfig) -> Result<Vec<RawTriplet>> {
        let prompt = format!(
            "{}\nExtract subject-predicate-object triplets from the abstract. Every triplet \
             must include a verbatim evidence quote. Reply ONLY with a JSON array of objects \
             {{subject: {{surface, type_label}}, predicate, object: {{surface, type_label}}, \
             evidence_quote, temporal_phrase}}.\n\nPMID: {}\nAbstract: {}",
            cfg.extraction.prompt_context, abstr.pmid, abstr.text
        );
        let raw = self.post(&prompt, &GenerationParams { temperature: 0.0, max_tokens: 4000 })?;
        let mut triplets: Vec<RawTriplet> =
            serde_json::from_str(raw.trim()).map_err(|e| Error::ProviderReply {
                provider: self.id.clone(),
                message: e.to_string(),
                raw,
            })?;
        for t in &mut triplets {
            t.source_model = self.id.clone();
            t.pmid = abstr.pmid.clone();
        }
        Ok(triplets)
    }

    fn complete(&self, prompt: &str, params: &GenerationParams) -> Result<String> {
        self.post(prompt, params)
    }

    fn is_local(&self) -> bool {
        host_is_local(&self.endpoint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_replay_is_byte_identical() {
        let mut p = FixtureProvider::new("fix-a");
        p.record_complete("prompt text", "reply text");
        let a = p.complete("prompt text", &GenerationParams::default()).unwrap();
        let b = p.complete("prompt text", &GenerationParams::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, "reply text");
        assert!(p
            .complete("other prompt", &GenerationParams::default())
            .unwrap_err()
            .is_retriable());
    }

    #[test]
    fn echo_provider_cites_prompt_pmids() {
        let p = EchoProvider::new();
        let prompt = "evidence:\n[Subject] ->TREATED_WITH-> [Object]\n\
                      PMID: 29395989 | Tier: GOLD\nEvidence: \"q\"\n\n\
                      [Gowers' sign] ->HAS_ONSET_AGE-> [presentation]\n\
                      PMID: 111111, 222222 | Tier: SILVER | Temporal: P3Y-P5Y\nEvidence: \"q\"";
        let out = p.complete(prompt, &GenerationParams::default()).unwrap();
        assert!(out.contains("[PMID:29395989, GOLD]"));
        assert!(out.contains("[PMID:111111, SILVER]"));
        assert!(out.contains("[PMID:222222, SILVER]"));
        assert!(out.contains("P3Y-P5Y"), "temporal anchor echoed: {out}");
        let vanilla = p.complete("no evidence here", &GenerationParams::default()).unwrap();
        assert!(!vanilla.contains("PMID"));
    }

    #[test]
    fn heuristic_judge_follows_audit_instruction() {
        let judge = HeuristicJudgeProvider::new("rule-judge");
        let v2_zero = "## Citation Audit Report\nThis output contains **0 PubMed identifiers (PMIDs)**.\n D1";
        let reply = judge.complete(v2_zero, &GenerationParams::default()).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&reply).unwrap();
        assert!(parsed["D1_verifiability"].as_i64().unwrap() <= 2);
    }

    #[test]
    fn local_host_detection() {
        assert!(host_is_local("http://localhost:11434/v1/chat"));
        assert!(host_is_local("http://127.0.0.1:8080"));
        assert!(!host_is_local("https://api.example.com/v1"));
    }
}
