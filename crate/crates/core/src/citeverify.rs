//! Citation verification: PMID extraction from outputs, summary lookup
//! against the E-utilities wire protocol (or a local fixture index),
//! relevance classification and audit-report rendering.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairconfig::DiseasePairConfig;
use crate::synthesis::ClinicalOutput;

/// Ordered unique PMIDs cited in a text. Matches a case-insensitive
/// `PMID` token, optional colon/whitespace, then 6-9 digits; longer digit
/// runs are not identifiers.
pub fn extract_pmids(text: &str) -> Vec<String> {
    let bytes = text.as_bytes();
    let folded = text.to_lowercase();
    let mut out: Vec<String> = Vec::new();
    let mut search = 0usize;
    while let Some(pos) = folded[search..].find("pmid") {
        let mut i = search + pos + 4;
        while i < bytes.len() && (bytes[i] == b':' || bytes[i].is_ascii_whitespace()) {
            i += 1;
        }
        let digits_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let run = &text[digits_start..i];
        if (6..=9).contains(&run.len()) && !out.iter().any(|p| p == run) {
            out.push(run.to_string());
        }
        search = search + pos + 4;
    }
    out
}

/// Summary record for one PMID.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub pmid: String,
    pub exists: bool,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub journal: String,
    #[serde(default)]
    pub mesh_terms: Vec<String>,
}

/// Lookup surface over PubMed summaries; live or fixture-backed.
pub trait PubmedClient: Send + Sync {
    fn fetch_summary(&self, pmid: &str) -> Result<SummaryRecord>;
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct IndexEntry {
    title: String,
    #[serde(default)]
    journal: String,
    #[serde(default)]
    mesh_terms: Vec<String>,
}

/// Local key-value index standing in for the live endpoint. PMIDs absent
/// from the index resolve to `exists = false`.
#[derive(Debug, Default)]
pub struct FixtureIndex {
    entries: HashMap<String, IndexEntry>,
}

impl FixtureIndex {
    pub fn new() -> Self {
        FixtureIndex::default()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let entries: HashMap<String, IndexEntry> = serde_json::from_str(&text)?;
        Ok(FixtureIndex { entries })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let ordered: std::collections::BTreeMap<_, _> = self.entries.iter().collect();
        std::fs::write(path, serde_json::to_string_pretty(&ordered)?)?;
        Ok(())
    }

    pub fn insert(&mut self, pmid: &str, title: &str, journal: &str, mesh: &[&str]) {
        self.entries.insert(
            pmid.to_string(),
            IndexEntry {
                title: title.to_string(),
                journal: journal.to_string(),
                mesh_terms: mesh.iter().map(|m| m.to_string()).collect(),
            },
        );
    }

    pub fn insert_record(&mut self, record: &SummaryRecord) {
        if record.exists {
            self.entries.insert(
                record.pmid.clone(),
                IndexEntry {
                    title: record.title.clone(),
                    journal: record.journal.clone(),
                    mesh_terms: record.mesh_terms.clone(),
                },
            );
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl PubmedClient for FixtureIndex {
    fn fetch_summary(&self, pmid: &str) -> Result<SummaryRecord> {
        Ok(match self.entries.get(pmid) {
            Some(e) => SummaryRecord {
                pmid: pmid.to_string(),
                exists: true,
                title: e.title.clone(),
                journal: e.journal.clone(),
                mesh_terms: e.mesh_terms.clone(),
            },
            None => SummaryRecord {
                pmid: pmid.to_string(),
                exists: false,
                ..SummaryRecord::default()
            },
        })
    }
}

/// Clock abstraction so the rate limiter is testable without waiting.
pub trait Clock: Send + Sync {
    fn now_millis(&self) -> u64;
    fn sleep_millis(&self, ms: u64);
}

pub struct SystemClock {
    origin: std::time::Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock {
            origin: std::time::Instant::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now_millis(&self) -> u64 {
        self.origin.elapsed().as_millis() as u64
    }

    fn sleep_millis(&self, ms: u64) {
        std::thread::sleep(std::time::Duration::from_millis(ms));
    }
}

/// Virtual clock: sleeping advances time instantly and is accounted.
#[derive(Default)]
pub struct MockClock {
    now: Mutex<u64>,
    slept: Mutex<u64>,
}

impl MockClock {
    pub fn new() -> Self {
        MockClock::default()
    }

    pub fn total_slept_millis(&self) -> u64 {
        *self.slept.lock().unwrap()
    }

    pub fn now(&self) -> u64 {
        *self.now.lock().unwrap()
    }
}

impl Clock for MockClock {
    fn now_millis(&self) -> u64 {
        *self.now.lock().unwrap()
    }

    fn sleep_millis(&self, ms: u64) {
        *self.now.lock().unwrap() += ms;
        *self.slept.lock().unwrap() += ms;
    }
}

pub const MIN_REQUEST_INTERVAL_MS: u64 = 350;

/// Serializes requests behind a minimum inter-request spacing. One
/// limiter instance is shared by every live client in the process.
pub struct RateLimiter {
    min_interval_ms: u64,
    last: Mutex<Option<u64>>,
    clock: Arc<dyn Clock>,
}

impl RateLimiter {
    pub fn new(min_interval_ms: u64, clock: Arc<dyn Clock>) -> Self {
        RateLimiter {
            min_interval_ms,
            last: Mutex::new(None),
            clock,
        }
    }

    /// Block until the next request may proceed.
    pub fn acquire(&self) {
        let mut last = self.last.lock().unwrap();
        let now = self.clock.now_millis();
        if let Some(prev) = *last {
            let elapsed = now.saturating_sub(prev);
            if elapsed < self.min_interval_ms {
                self.clock.sleep_millis(self.min_interval_ms - elapsed);
            }
        }
        *last = Some(self.clock.now_millis());
    }
}

/// Live E-utilities client (esummary endpoint, XML payloads).
pub struct LiveClient {
    base_url: String,
}

pub const EUTILS_ESUMMARY: &str = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/esummary.fcgi";

/// One rate-limited queue shared by every live client in the process.
fn shared_limiter() -> &'static RateLimiter {
    static LIMITER: std::sync::OnceLock<RateLimiter> = std::sync::OnceLock::new();
    LIMITER.get_or_init(|| {
        RateLimiter::new(MIN_REQUEST_INTERVAL_MS, Arc::new(SystemClock::new()))
    })
}

impl LiveClient {
    pub fn new() -> Self {
        LiveClient::with_base_url(EUTILS_ESUMMARY)
    }

    pub fn with_base_url(base_url: impl Into<String>) -> Self {
        LiveClient {
            base_url: base_url.into(),
        }
    }

    /// Parse the esummary XML payload for one DocSum.
    pub fn parse_esummary(pmid: &str, xml: &str) -> Result<SummaryRecord> {
        use quick_xml::events::Event;
        use quick_xml::Reader;

        if xml.contains("<ERROR>") {
            return Ok(SummaryRecord {
                pmid: pmid.to_string(),
                exists: false,
                ..SummaryRecord::default()
            });
        }
        let mut reader = Reader::from_str(xml);
        let mut record = SummaryRecord {
            pmid: pmid.to_string(),
            exists: false,
            ..SummaryRecord::default()
        };
        let mut current_item: Option<String> = None;
        loop {
            match reader.read_event() {
                Ok(Event::Start(e)) if e.name().as_ref() == b"Item" => {
                    let name = e
                        .attributes()
                        .flatten()
                        .find(|a| a.key.as_ref() == b"Name")
                        .and_then(|a| String::from_utf8(a.value.to_vec()).ok());
                    current_item = name;
                }
                Ok(Event::Start(e)) if e.name().as_ref() == b"DocSum" => {
                    record.exists = true;
                }
                Ok(Event::Text(t)) => {
                    let text = t
                        .decode()
                        .map_err(|e| Error::ProviderReply {
                            provider: "pubmed".into(),
                            message: e.to_string(),
                            raw: xml.to_string(),
                        })?
                        .to_string();
                    match current_item.as_deref() {
                        Some("Title") => record.title = text,
                        Some("FullJournalName") | Some("Source") => {
                            if record.journal.is_empty() {
                                record.journal = text;
                            }
                        }
                        Some("MeshTerm") => record.mesh_terms.push(text),
                        _ => {}
                    }
                }
                Ok(Event::End(e)) if e.name().as_ref() == b"Item" => current_item = None,
                Ok(Event::Eof) => break,
                Err(e) => {
                    return Err(Error::ProviderReply {
                        provider: "pubmed".into(),
                        message: e.to_string(),
                        raw: xml.to_string(),
                    })
                }
                _ => {}
            }
        }
        Ok(record)
    }
}

impl Default for LiveClient {
    fn default() -> Self {
        Self::new()
    }
}

impl PubmedClient for LiveClient {
    fn fetch_summary(&self, pmid: &str) -> Result<SummaryRecord> {
        shared_limiter().acquire();
        let url = format!("{}?db=pubmed&id={}&retmode=xml", self.base_url, pmid);
        let mut response = ureq::get(&url).call().map_err(|e| Error::ProviderTransport {
            provider: "pubmed".into(),
            message: e.to_string(),
        })?;
        let xml = response
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::ProviderTransport {
                provider: "pubmed".into(),
                message: e.to_string(),
            })?;
        Self::parse_esummary(pmid, &xml)
    }
}

/// Cache-on-fetch wrapper: every response lands in the fixture index so
/// repeated runs converge to offline determinism.
pub struct CachingClient<C: PubmedClient> {
    inner: C,
    index: Mutex<FixtureIndex>,
    path: Option<PathBuf>,
}

impl<C: PubmedClient> CachingClient<C> {
    pub fn new(inner: C, index: FixtureIndex, path: Option<PathBuf>) -> Self {
        CachingClient {
            inner,
            index: Mutex::new(index),
            path,
        }
    }
}

impl<C: PubmedClient> PubmedClient for CachingClient<C> {
    fn fetch_summary(&self, pmid: &str) -> Result<SummaryRecord> {
        {
            let index = self.index.lock().unwrap();
            let cached = index.fetch_summary(pmid)?;
            if cached.exists {
                return Ok(cached);
            }
        }
        let record = self.inner.fetch_summary(pmid)?;
        let mut index = self.index.lock().unwrap();
        index.insert_record(&record);
        if let Some(path) = &self.path {
            index.save(path)?;
        }
        Ok(record)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Relevant,
    WrongField,
    NotFound,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Relevant => "RELEVANT",
            Verdict::WrongField => "WRONG FIELD",
            Verdict::NotFound => "NOT FOUND",
        }
    }
}

/// Three-way classification: NotFound when the record is absent; Relevant
/// when any pair keyword occurs (case-insensitive) in the title or, unless
/// `title_only`, in the MeSH terms; WrongField otherwise.
pub fn classify_relevance(
    record: &SummaryRecord,
    cfg: &DiseasePairConfig,
    title_only: bool,
) -> Verdict {
    if !record.exists {
        return Verdict::NotFound;
    }
    let haystack = if title_only {
        record.title.to_lowercase()
    } else {
        format!(
            "{} {}",
            record.title.to_lowercase(),
            record.mesh_terms.join(" ").to_lowercase()
        )
    };
    if cfg
        .relevance_keywords
        .iter()
        .any(|k| haystack.contains(&k.to_lowercase()))
    {
        Verdict::Relevant
    } else {
        Verdict::WrongField
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuthorYearClass {
    Specific,
    Ambiguous,
    Wrong,
    NotFound,
    TooVague,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorYearRef {
    pub raw: String,
    pub author: String,
    pub year: Option<u32>,
    pub resolution: AuthorYearClass,
}

/// Search index for author-year references: "lastname year" -> PMIDs.
/// Live author-year search is out of scope; classification is
/// fixture-index only.
#[derive(Debug, Default)]
pub struct AuthorYearIndex {
    entries: HashMap<String, Vec<String>>,
}

impl AuthorYearIndex {
    pub fn new() -> Self {
        AuthorYearIndex::default()
    }

    pub fn insert(&mut self, author: &str, year: u32, pmid: &str) {
        self.entries
            .entry(format!("{} {}", author.to_lowercase(), year))
            .or_default()
            .push(pmid.to_string());
    }

    fn lookup(&self, author: &str, year: u32) -> Option<&Vec<String>> {
        self.entries.get(&format!("{} {}", author.to_lowercase(), year))
    }
}

fn author_year_pattern() -> &'static regex::Regex {
    static RE: std::sync::OnceLock<regex::Regex> = std::sync::OnceLock::new();
    RE.get_or_init(|| {
        // "Wolfe et al., 2016" | "Wolfe et al. 2016" | "Gilhus NE, Neurology 2016"
        // | bare "Wolfe et al." (too vague to search).
        regex::Regex::new(
            r"(?x)
            \b([A-Z][a-z]+)\s+et\s+al\.?,?\s*(\d{4})?
          | \b([A-Z][a-z]+)\s+[A-Z]{1,3},\s+[A-Za-z][A-Za-z .]*\s+(\d{4})
            ",
        )
        .unwrap()
    })
}

/// Extract author-year references and classify each against the fixture
/// search index and the PubMed index.
pub fn extract_author_year_refs(
    text: &str,
    search: &AuthorYearIndex,
    pubmed: &dyn PubmedClient,
    cfg: &DiseasePairConfig,
) -> Result<Vec<AuthorYearRef>> {
    let mut refs = Vec::new();
    for caps in author_year_pattern().captures_iter(text) {
        let (author, year) = if let Some(name) = caps.get(1) {
            (name.as_str().to_string(), caps.get(2).and_then(|y| y.as_str().parse().ok()))
        } else {
            (
                caps.get(3).map(|m| m.as_str().to_string()).unwrap_or_default(),
                caps.get(4).and_then(|y| y.as_str().parse().ok()),
            )
        };
        let raw = caps.get(0).unwrap().as_str().trim().to_string();
        let resolution = match year {
            None => AuthorYearClass::TooVague,
            Some(y) => match search.lookup(&author, y) {
                None => AuthorYearClass::NotFound,
                Some(pmids) if pmids.len() > 1 => AuthorYearClass::Ambiguous,
                Some(pmids) => {
                    let record = pubmed.fetch_summary(&pmids[0])?;
                    match classify_relevance(&record, cfg, false) {
                        Verdict::Relevant => AuthorYearClass::Specific,
                        _ => AuthorYearClass::Wrong,
                    }
                }
            },
        };
        refs.push(AuthorYearRef {
            raw,
            author,
            year,
            resolution,
        });
    }
    Ok(refs)
}

/// Per-PMID verification verdicts and counts for one output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationAudit {
    pub output_id: String,
    pub pmids: Vec<String>,
    pub verdicts: Vec<(String, Verdict, Option<String>, Option<String>)>,
    pub relevant: usize,
    pub wrong_field: usize,
    pub not_found: usize,
    #[serde(default)]
    pub author_year_refs: Vec<AuthorYearRef>,
}

impl CitationAudit {
    pub fn total(&self) -> usize {
        self.pmids.len()
    }

    pub fn percent_relevant(&self) -> f64 {
        if self.pmids.is_empty() {
            0.0
        } else {
            self.relevant as f64 / self.pmids.len() as f64 * 100.0
        }
    }
}

/// Compose extraction, lookup and classification for one output.
/// Deterministic in fixture mode.
pub fn audit_output(
    output: &ClinicalOutput,
    cfg: &DiseasePairConfig,
    client: &dyn PubmedClient,
    title_only: bool,
) -> Result<CitationAudit> {
    let pmids = extract_pmids(&output.text);
    let mut verdicts = Vec::with_capacity(pmids.len());
    let (mut relevant, mut wrong_field, mut not_found) = (0, 0, 0);
    for pmid in &pmids {
        let record = client.fetch_summary(pmid)?;
        let verdict = classify_relevance(&record, cfg, title_only);
        match verdict {
            Verdict::Relevant => relevant += 1,
            Verdict::WrongField => wrong_field += 1,
            Verdict::NotFound => not_found += 1,
        }
        let (title, journal) = if record.exists {
            (Some(record.title), Some(record.journal))
        } else {
            (None, None)
        };
        verdicts.push((pmid.clone(), verdict, title, journal));
    }
    Ok(CitationAudit {
        output_id: output.scenario_id.clone(),
        pmids,
        verdicts,
        relevant,
        wrong_field,
        not_found,
        author_year_refs: Vec::new(),
    })
}

/// Per-PMID detail lines are capped; the remainder is summarized.
pub const AUDIT_REPORT_DETAIL_CAP: usize = 10;

/// Render the audit report appended to citation-aware judge prompts.
/// Regeneration over the same audit is byte-identical.
pub fn render_audit_report(audit: &CitationAudit) -> String {
    if audit.pmids.is_empty() {
        return "## Citation Audit Report\n\
                This output contains **0 PubMed identifiers (PMIDs)**. No specific citations\n\
                can be verified against PubMed. All clinical claims rely on unverifiable\n\
                parametric knowledge.\n"
            .to_string();
    }
    let n = audit.pmids.len();
    let pct = |count: usize| count as f64 / n as f64 * 100.0;
    let mut out = String::from("## Citation Audit Report\n");
    out.push_str(&format!(
        "This output cites **{n} unique PMIDs**. We verified each against the PubMed database:\n"
    ));
    out.push_str(&format!(
        "- **{}** ({:.1}%) clinically relevant\n",
        audit.relevant,
        pct(audit.relevant)
    ));
    out.push_str(&format!(
        "- **{}** ({:.1}%) real but wrong field\n",
        audit.wrong_field,
        pct(audit.wrong_field)
    ));
    out.push_str(&format!(
        "- **{}** ({:.1}%) not found in PubMed\n",
        audit.not_found,
        pct(audit.not_found)
    ));
    out.push('\n');
    for (pmid, verdict, title, journal) in audit.verdicts.iter().take(AUDIT_REPORT_DETAIL_CAP) {
        match (title, journal) {
            (Some(t), Some(j)) => {
                out.push_str(&format!(
                    "  PMID:{pmid} [{}] -- \"{t}\" ({j})\n",
                    verdict.label()
                ));
            }
            _ => {
                out.push_str(&format!("  PMID:{pmid} [{}]\n", verdict.label()));
            }
        }
    }
    if audit.verdicts.len() > AUDIT_REPORT_DETAIL_CAP {
        out.push_str(&format!(
            "  ... and {} more PMIDs verified\n",
            audit.verdicts.len() - AUDIT_REPORT_DETAIL_CAP
        ));
    }
    out
}
