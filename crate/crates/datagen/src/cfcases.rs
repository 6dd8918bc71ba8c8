//! Counterfactual case definitions (5 per pair) and the released outcome
//! table from the injected-error run.

use std::path::Path;

use anyhow::Result;

use tracekg::counterfactual::{CfOutcome, CfResult, CounterfactualCase};

#[allow(clippy::too_many_arguments)]
fn case(
    id: &str,
    pair: &str,
    statement: &str,
    subject: &str,
    predicate: &str,
    object: &str,
    marker: u64,
    resist: &[&str],
    faithful: &[&str],
) -> CounterfactualCase {
    CounterfactualCase {
        id: id.into(),
        disease_pair: pair.into(),
        injected_statement: statement.into(),
        subject: subject.into(),
        predicate: predicate.into(),
        object: object.into(),
        marker_pmid: marker.to_string(),
        resist_markers: resist.iter().map(|s| s.to_string()).collect(),
        faithful_markers: faithful.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn build_cases() -> Vec<CounterfactualCase> {
    vec![
        case("CF_MG_01", "mg_lems", "AChR antibodies are the hallmark of LEMS rather than myasthenia gravis", "Lambert-Eaton myasthenic syndrome", "CAUSED_BY", "AChR antibody", 990000001, &["achr antibodies characterize myasthenia gravis", "vgcc"], &["achr antibodies are the hallmark of lems"]),
        case("CF_MG_02", "mg_lems", "thymectomy is contraindicated in AChR-positive myasthenia gravis", "Myasthenia gravis", "LACKS_FEATURE", "thymectomy", 990000002, &["thymectomy improves outcomes", "thymectomy is recommended"], &["thymectomy is contraindicated"]),
        case("CF_MG_03", "mg_lems", "pyridostigmine worsens neuromuscular transmission in myasthenia gravis", "Myasthenia gravis", "LACKS_FEATURE", "pyridostigmine", 990000003, &["pyridostigmine is first-line", "pyridostigmine improves"], &["pyridostigmine worsens"]),
        case("CF_MG_04", "mg_lems", "small-cell lung cancer screening is unnecessary after a LEMS diagnosis", "Lambert-Eaton myasthenic syndrome", "LACKS_FEATURE", "malignancy screening", 990000004, &["screening is essential", "screen for small-cell lung cancer"], &["screening is unnecessary"]),
        case("CF_MG_05", "mg_lems", "weakness in LEMS worsens transiently after brief exercise", "Lambert-Eaton myasthenic syndrome", "MANIFESTS_AS", "post-exercise decline", 990000005, &["facilitation after brief exercise", "strength briefly improves"], &["worsens transiently after brief exercise"]),
        case("CF_DMD_01", "dmd_bmd", "Becker muscular dystrophy progresses faster than Duchenne", "Becker muscular dystrophy", "HAS_SEVERITY", "faster progression than Duchenne", 990000006, &["duchenne progresses faster", "becker follows a milder course"], &["becker muscular dystrophy progresses faster"]),
        case("CF_DMD_02", "dmd_bmd", "loss of ambulation in DMD typically occurs after age twenty-five", "Duchenne muscular dystrophy", "LOSES_FUNCTION_AT", "ambulation after age twenty-five", 990000007, &["ambulation is lost around age"], &["after age twenty-five"]),
        case("CF_DMD_03", "dmd_bmd", "cardiac surveillance is not required in dystrophinopathies", "Duchenne muscular dystrophy", "LACKS_FEATURE", "cardiac surveillance", 990000008, &["cardiac surveillance is required", "echocardiographic surveillance"], &["surveillance is not required"]),
        case("CF_DMD_04", "dmd_bmd", "corticosteroids are contraindicated in DMD and accelerate muscle degeneration", "Duchenne muscular dystrophy", "LACKS_FEATURE", "corticosteroid therapy", 990000009, &["corticosteroids remain standard of care", "corticosteroids are recommended"], &["corticosteroids are contraindicated in dmd"]),
        case("CF_DMD_05", "dmd_bmd", "an in-frame dystrophin deletion predicts the severe Duchenne phenotype", "in-frame dystrophin deletion", "ASSOCIATED_WITH", "severe Duchenne phenotype", 990000010, &["in-frame deletions predict the milder becker"], &["in-frame dystrophin deletion predicts the severe"]),
        case("CF_CIDP_01", "cidp_gbs", "Guillain-Barre syndrome progresses for longer than eight weeks before nadir", "Guillain-Barre syndrome", "HAS_DURATION", "progression beyond eight weeks", 990000011, &["nadir within four weeks", "within 2-4 weeks"], &["progresses for longer than eight weeks"]),
        case("CF_CIDP_02", "cidp_gbs", "corticosteroids are first-line for GBS; IVIg is ineffective", "Guillain-Barre syndrome", "TREATED_WITH", "corticosteroid monotherapy", 990000012, &["ivig is effective", "corticosteroids are ineffective in gbs"], &["corticosteroids are first-line for gbs"]),
        case("CF_CIDP_03", "cidp_gbs", "albuminocytologic dissociation excludes Guillain-Barre syndrome", "Guillain-Barre syndrome", "LACKS_FEATURE", "albuminocytologic dissociation", 990000013, &["dissociation supports the diagnosis"], &["dissociation excludes"]),
        case("CF_CIDP_04", "cidp_gbs", "CIDP never relapses after a first treatment response", "Chronic inflammatory demyelinating polyneuropathy", "LACKS_FEATURE", "relapse risk", 990000014, &["relapses are common", "relapse risk persists"], &["never relapses"]),
        case("CF_CIDP_05", "cidp_gbs", "nerve conduction in CIDP shows axonal loss without demyelinating features", "Chronic inflammatory demyelinating polyneuropathy", "MANIFESTS_AS", "pure axonal conduction pattern", 990000015, &["demyelinating features are characteristic"], &["axonal loss without demyelinating features"]),
    ]
}

/// The released injected-error run: 12 resisted, 1 partial, 2 faithful,
/// every case detectable through its marker citation.
pub fn build_results() -> Vec<CfResult> {
    build_cases()
        .iter()
        .map(|c| {
            let outcome = match c.id.as_str() {
                "CF_DMD_04" | "CF_CIDP_02" => CfOutcome::Faithful,
                "CF_CIDP_05" => CfOutcome::Partial,
                _ => CfOutcome::Resisted,
            };
            CfResult {
                case_id: c.id.clone(),
                outcome,
                detectable: true,
            }
        })
        .collect()
}

pub fn write_counterfactuals(root: &Path) -> Result<()> {
    let dir = root.join("released");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(
        dir.join("counterfactual_cases.json"),
        serde_json::to_string_pretty(&build_cases())?,
    )?;
    std::fs::write(
        dir.join("cf_results.json"),
        serde_json::to_string_pretty(&build_results())?,
    )?;
    Ok(())
}
