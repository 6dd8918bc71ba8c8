//! The released per-scenario metrics table (FC/ETS/PG per arm).

use anyhow::Result;
use std::path::Path;

use tracekg::files::{write_metrics_csv, MetricsRow};
use tracekg::synthesis::Arm;

/// scenario, type, vanilla (fc, ets, pg), guideline_rag, heg_tkg.
type ArmTriple = (f64, f64, f64);
#[allow(clippy::type_complexity)]
pub const S9_ROWS: [(&str, &str, ArmTriple, ArmTriple, ArmTriple); 36] = [
    ("CIDP_GBS_DDX_01", "differential", (0.75, 0.00, 0.75), (0.38, 0.00, 0.38), (0.50, 0.41, 0.11)),
    ("CIDP_GBS_DDX_02", "differential", (0.44, 0.00, 0.44), (0.89, 0.00, 0.89), (0.67, 0.36, 0.32)),
    ("CIDP_GBS_DDX_03", "differential", (1.00, 0.00, 1.00), (1.00, 0.00, 1.00), (0.89, 0.47, 0.43)),
    ("CIDP_GBS_DDX_04", "differential", (0.50, 0.00, 0.50), (0.50, 0.00, 0.50), (0.38, 0.28, 0.11)),
    ("CIDP_GBS_SAFETY_01", "differential", (0.62, 0.00, 0.62), (0.62, 0.00, 0.62), (0.62, 0.41, 0.23)),
    ("CIDP_GBS_TEMP_01", "temporal_comparative", (0.71, 0.00, 0.71), (0.57, 0.00, 0.57), (0.71, 0.31, 0.41)),
    ("CIDP_GBS_TEMP_02", "temporal_comparative", (0.67, 0.00, 0.67), (0.67, 0.00, 0.67), (0.67, 0.24, 0.43)),
    ("CIDP_GBS_TEMP_03", "temporal", (0.86, 0.00, 0.86), (0.86, 0.00, 0.86), (0.86, 0.12, 0.74)),
    ("CIDP_GBS_TEMP_04", "temporal", (0.88, 0.00, 0.88), (0.62, 0.00, 0.62), (0.62, 0.07, 0.56)),
    ("CIDP_GBS_TX_01", "treatment", (0.71, 0.00, 0.71), (0.57, 0.00, 0.57), (0.71, 0.43, 0.29)),
    ("CIDP_GBS_TX_02", "treatment", (0.75, 0.00, 0.75), (0.62, 0.00, 0.62), (0.75, 0.73, 0.04)),
    ("CIDP_GBS_TX_03", "treatment", (0.62, 0.00, 0.62), (0.38, 0.00, 0.38), (0.75, 0.46, 0.30)),
    ("DMD_BMD_DDX_01", "differential", (0.80, 0.00, 0.80), (0.70, 0.00, 0.70), (0.90, 0.48, 0.43)),
    ("DMD_BMD_DDX_02", "differential", (0.86, 0.00, 0.86), (0.86, 0.00, 0.86), (0.71, 0.32, 0.41)),
    ("DMD_BMD_DDX_03", "differential", (0.75, 0.00, 0.75), (0.75, 0.00, 0.75), (0.38, 0.45, 0.00)),
    ("DMD_BMD_DDX_04", "differential", (0.50, 0.00, 0.50), (0.62, 0.00, 0.62), (0.62, 0.42, 0.21)),
    ("DMD_BMD_SAFETY_01", "differential", (0.75, 0.00, 0.75), (0.75, 0.00, 0.75), (0.75, 0.36, 0.40)),
    ("DMD_BMD_TEMP_01", "temporal_comparative", (1.00, 0.00, 1.00), (0.67, 0.00, 0.67), (1.00, 0.20, 0.80)),
    ("DMD_BMD_TEMP_02", "temporal_comparative", (1.00, 0.00, 1.00), (0.71, 0.00, 0.71), (0.86, 0.46, 0.41)),
    ("DMD_BMD_TEMP_03", "temporal", (0.75, 0.00, 0.75), (0.62, 0.00, 0.62), (0.62, 0.30, 0.33)),
    ("DMD_BMD_TEMP_04", "temporal", (0.43, 0.00, 0.43), (0.57, 0.00, 0.57), (0.29, 0.23, 0.06)),
    ("DMD_BMD_TX_01", "treatment", (0.67, 0.00, 0.67), (0.78, 0.00, 0.78), (0.78, 0.50, 0.29)),
    ("DMD_BMD_TX_02", "treatment", (0.88, 0.00, 0.88), (0.75, 0.00, 0.75), (0.62, 0.93, 0.00)),
    ("DMD_BMD_TX_03", "treatment", (0.88, 0.00, 0.88), (0.50, 0.00, 0.50), (0.38, 0.27, 0.12)),
    ("MG_LEMS_DDX_01", "differential", (0.60, 0.00, 0.60), (0.90, 0.00, 0.90), (1.00, 0.32, 0.69)),
    ("MG_LEMS_DDX_02", "differential", (1.00, 0.00, 1.00), (0.90, 0.00, 0.90), (1.00, 0.22, 0.78)),
    ("MG_LEMS_DDX_03", "differential", (0.62, 0.00, 0.62), (0.75, 0.00, 0.75), (0.62, 0.27, 0.36)),
    ("MG_LEMS_DDX_04", "differential", (0.70, 0.00, 0.70), (0.70, 0.00, 0.70), (0.60, 0.15, 0.45)),
    ("MG_LEMS_SAFETY_01", "differential", (0.50, 0.00, 0.50), (0.75, 0.00, 0.75), (0.88, 0.25, 0.63)),
    ("MG_LEMS_TEMP_01", "temporal_comparative", (1.00, 0.00, 1.00), (0.88, 0.00, 0.88), (0.88, 0.26, 0.62)),
    ("MG_LEMS_TEMP_02", "temporal_comparative", (0.86, 0.00, 0.86), (0.86, 0.00, 0.86), (0.71, 0.35, 0.37)),
    ("MG_LEMS_TEMP_03", "temporal", (0.86, 0.00, 0.86), (0.71, 0.00, 0.71), (1.00, 0.43, 0.58)),
    ("MG_LEMS_TEMP_04", "temporal", (0.43, 0.00, 0.43), (0.43, 0.00, 0.43), (0.43, 0.00, 0.43)),
    ("MG_LEMS_TX_01", "treatment", (0.88, 0.00, 0.88), (0.88, 0.00, 0.88), (0.88, 0.41, 0.48)),
    ("MG_LEMS_TX_02", "treatment", (0.86, 0.00, 0.86), (0.29, 0.00, 0.29), (1.00, 0.83, 0.20)),
    ("MG_LEMS_TX_03", "treatment", (0.67, 0.00, 0.67), (0.78, 0.00, 0.78), (0.78, 0.69, 0.11)),
];

pub fn rows() -> Vec<MetricsRow> {
    let mut out = Vec::with_capacity(108);
    for (id, output_type, vanilla, rag, heg) in S9_ROWS {
        for (arm, (fc, ets, pg)) in [
            (Arm::Vanilla, vanilla),
            (Arm::GuidelineRag, rag),
            (Arm::HegTkg, heg),
        ] {
            out.push(MetricsRow {
                scenario_id: id.to_string(),
                output_type: output_type.to_string(),
                arm,
                fc,
                ets,
                pg,
            });
        }
    }
    out
}

pub fn write_metrics(root: &Path) -> Result<()> {
    let dir = root.join("released");
    std::fs::create_dir_all(&dir)?;
    write_metrics_csv(&rows(), dir.join("metrics_s9.csv"))?;
    Ok(())
}

/// HEG ETS per scenario, keyed by id (drives the released-output shape).
pub fn heg_ets(id: &str) -> f64 {
    S9_ROWS
        .iter()
        .find(|(sid, ..)| *sid == id)
        .map(|(_, _, _, _, heg)| heg.1)
        .expect("scenario id in table")
}
