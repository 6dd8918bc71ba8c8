//! Readers and writers for the on-disk artifact formats shared by the
//! CLI, the pipeline and the evaluation stack.

use std::path::Path;

use crate::error::Result;
use crate::extraction::Abstract;
use crate::judgepanel::{NliRow, ScoreRecord};
use crate::synthesis::{Arm, ClinicalOutput, ClinicalScenario};

/// Scenarios ship as one JSON array.
pub fn load_scenarios(path: impl AsRef<Path>) -> Result<Vec<ClinicalScenario>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let scenarios: Vec<ClinicalScenario> = serde_json::from_str(&text)?;
    for s in &scenarios {
        s.validate()?;
    }
    Ok(scenarios)
}

/// Abstract corpora are one JSON record per line.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Abstract>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut corpus = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let a: Abstract = serde_json::from_str(line)?;
        a.validate()?;
        corpus.push(a);
    }
    Ok(corpus)
}

pub fn write_jsonl<T: serde::Serialize>(items: &[T], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item)?);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut items = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        items.push(serde_json::from_str(line)?);
    }
    Ok(items)
}

pub fn load_score_records(path: impl AsRef<Path>) -> Result<Vec<ScoreRecord>> {
    read_jsonl(path)
}

pub fn load_nli_rows(path: impl AsRef<Path>) -> Result<Vec<NliRow>> {
    read_jsonl(path)
}

pub fn load_output(path: impl AsRef<Path>) -> Result<ClinicalOutput> {
    let text = std::fs::read_to_string(path.as_ref())?;
    Ok(serde_json::from_str(&text)?)
}

/// One row of the per-scenario metrics table.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MetricsRow {
    pub scenario_id: String,
    pub output_type: String,
    pub arm: Arm,
    pub fc: f64,
    pub ets: f64,
    pub pg: f64,
}

/// The metrics table is a plain CSV with a fixed header.
pub const METRICS_HEADER: &str = "scenario_id,output_type,arm,fc,ets,pg";

pub fn write_metrics_csv(rows: &[MetricsRow], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.2},{:.2},{:.2}\n",
            r.scenario_id,
            r.output_type,
            r.arm.label(),
            r.fc,
            r.ets,
            r.pg
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_metrics_csv(path: impl AsRef<Path>) -> Result<Vec<MetricsRow>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 6 {
            return Err(crate::error::Error::Parse(format!(
                "metrics row {i}: expected 6 columns, got {}",
                parts.len()
            )));
        }
        rows.push(MetricsRow {
            scenario_id: parts[0].to_string(),
            output_type: parts[1].to_string(),
            arm: Arm::parse(parts[2])?,
            fc: parts[3].parse().map_err(|e| {
                crate::error::Error::Parse(format!("metrics row {i} fc: {e}"))
            })?,
            ets: parts[4].parse().map_err(|e| {
                crate::error::Error::Parse(format!("metrics row {i} ets: {e}"))
            })?,
            pg: parts[5].parse().map_err(|e| {
                crate::error::Error::Parse(format!("metrics row {i} pg: {e}"))
            })?,
        });
    }
    Ok(rows)
}
