//! Released judge-score synthesis: integer 1-5 score vectors whose
//! per-(pair, arm, round, dimension) mean and sample SD reproduce the
//! released tables, with per-judge verifiability sub-structure.

use std::collections::HashSet;
use std::path::Path;

use anyhow::{ensure, Context, Result};

use tracekg::statkit;
use tracekg::synthesis::Arm;

pub const JUDGES: [&str; 3] = ["gpt-4o-mini", "deepseek-v3", "claude-3-haiku"];

/// (pair, round, arm) -> [(mean, sd); 5] for D1..D5, n = 36 each.
#[allow(clippy::type_complexity)]
pub const CELLS: [((&str, &str, &str), [(f64, f64); 5]); 18] = [
    (("mg_lems", "v1", "vanilla"), [(4.42, 0.69), (4.47, 0.51), (4.33, 0.83), (4.03, 0.51), (4.50, 0.61)]),
    (("mg_lems", "v1", "guideline_rag"), [(4.53, 0.56), (4.31, 0.47), (3.47, 1.25), (3.94, 0.47), (4.17, 0.65)]),
    (("mg_lems", "v1", "heg_tkg"), [(4.50, 0.56), (4.50, 0.51), (4.25, 0.77), (4.11, 0.52), (4.61, 0.49)]),
    (("dmd_bmd", "v1", "vanilla"), [(4.25, 0.94), (4.44, 0.50), (4.47, 0.65), (4.14, 0.49), (4.33, 0.68)]),
    (("dmd_bmd", "v1", "guideline_rag"), [(4.67, 0.53), (4.31, 0.52), (4.14, 0.80), (4.08, 0.37), (4.17, 0.77)]),
    (("dmd_bmd", "v1", "heg_tkg"), [(4.75, 0.44), (4.61, 0.49), (4.75, 0.44), (4.19, 0.47), (4.64, 0.49)]),
    (("cidp_gbs", "v1", "vanilla"), [(4.36, 0.72), (4.44, 0.50), (4.64, 0.54), (4.06, 0.41), (4.39, 0.69)]),
    (("cidp_gbs", "v1", "guideline_rag"), [(4.56, 0.56), (4.22, 0.48), (4.28, 0.97), (4.06, 0.33), (4.28, 0.70)]),
    (("cidp_gbs", "v1", "heg_tkg"), [(4.53, 0.65), (4.47, 0.51), (4.69, 0.47), (4.08, 0.44), (4.64, 0.54)]),
    (("mg_lems", "v2", "vanilla"), [(1.39, 0.49), (4.08, 0.28), (4.06, 0.83), (3.81, 0.47), (4.11, 0.46)]),
    (("mg_lems", "v2", "guideline_rag"), [(1.39, 0.49), (3.94, 0.33), (3.11, 1.33), (3.75, 0.44), (3.86, 0.35)]),
    (("mg_lems", "v2", "heg_tkg"), [(4.44, 1.05), (4.56, 0.50), (4.33, 0.68), (4.06, 0.41), (4.72, 0.45)]),
    (("dmd_bmd", "v2", "vanilla"), [(1.39, 0.49), (4.03, 0.17), (4.25, 0.69), (3.86, 0.35), (4.03, 0.38)]),
    (("dmd_bmd", "v2", "guideline_rag"), [(1.50, 0.51), (3.86, 0.42), (3.78, 0.83), (3.92, 0.37), (3.75, 0.55)]),
    (("dmd_bmd", "v2", "heg_tkg"), [(4.92, 0.28), (4.69, 0.47), (4.81, 0.40), (4.11, 0.32), (4.72, 0.45)]),
    (("cidp_gbs", "v2", "vanilla"), [(1.36, 0.49), (4.03, 0.29), (4.47, 0.51), (3.83, 0.38), (4.11, 0.57)]),
    (("cidp_gbs", "v2", "guideline_rag"), [(1.39, 0.49), (3.89, 0.32), (4.00, 1.12), (3.78, 0.42), (3.86, 0.35)]),
    (("cidp_gbs", "v2", "heg_tkg"), [(4.58, 0.77), (4.56, 0.50), (4.75, 0.44), (4.11, 0.32), (4.75, 0.44)]),
];

/// Per-judge verifiability means (12 cases per judge per cell).
#[allow(clippy::type_complexity)]
pub const D1_JUDGE_MEANS: [((&str, &str, &str), [f64; 3]); 18] = [
    (("mg_lems", "v1", "vanilla"), [4.58, 3.67, 5.00]),
    (("mg_lems", "v1", "guideline_rag"), [4.67, 3.92, 5.00]),
    (("mg_lems", "v1", "heg_tkg"), [4.67, 4.08, 4.75]),
    (("dmd_bmd", "v1", "vanilla"), [4.42, 3.33, 5.00]),
    (("dmd_bmd", "v1", "guideline_rag"), [5.00, 4.00, 5.00]),
    (("dmd_bmd", "v1", "heg_tkg"), [4.92, 4.33, 5.00]),
    (("cidp_gbs", "v1", "vanilla"), [4.50, 3.58, 5.00]),
    (("cidp_gbs", "v1", "guideline_rag"), [4.75, 3.92, 5.00]),
    (("cidp_gbs", "v1", "heg_tkg"), [4.75, 4.08, 4.75]),
    (("mg_lems", "v2", "vanilla"), [1.17, 1.00, 2.00]),
    (("mg_lems", "v2", "guideline_rag"), [1.08, 1.08, 2.00]),
    (("mg_lems", "v2", "heg_tkg"), [4.50, 4.08, 4.75]),
    (("dmd_bmd", "v2", "vanilla"), [1.17, 1.00, 2.00]),
    (("dmd_bmd", "v2", "guideline_rag"), [1.42, 1.08, 2.00]),
    (("dmd_bmd", "v2", "heg_tkg"), [4.92, 4.83, 5.00]),
    (("cidp_gbs", "v2", "vanilla"), [1.08, 1.00, 2.00]),
    (("cidp_gbs", "v2", "guideline_rag"), [1.17, 1.00, 2.00]),
    (("cidp_gbs", "v2", "heg_tkg"), [4.67, 4.25, 4.83]),
];

#[allow(clippy::manual_is_multiple_of)]
/// Every feasible sum-of-squares for n values in 1..=5 with a fixed sum.
fn feasible_sumsq(n: usize, sum: usize) -> Vec<usize> {
    let mut out = HashSet::new();
    for c5 in 0..=n {
        for c4 in 0..=(n - c5) {
            for c3 in 0..=(n - c5 - c4) {
                for c2 in 0..=(n - c5 - c4 - c3) {
                    let c1 = n - c5 - c4 - c3 - c2;
                    if 5 * c5 + 4 * c4 + 3 * c3 + 2 * c2 + c1 == sum {
                        out.insert(25 * c5 + 16 * c4 + 9 * c3 + 4 * c2 + c1);
                    }
                }
            }
        }
    }
    let mut v: Vec<usize> = out.into_iter().collect();
    v.sort_unstable();
    v
}

/// Realize a concrete descending vector for (n, sum, sumsq).
fn realize(n: usize, sum: usize, sumsq: usize) -> Option<Vec<u8>> {
    for c5 in 0..=n {
        for c4 in 0..=(n - c5) {
            for c3 in 0..=(n - c5 - c4) {
                for c2 in 0..=(n - c5 - c4 - c3) {
                    let c1 = n - c5 - c4 - c3 - c2;
                    if 5 * c5 + 4 * c4 + 3 * c3 + 2 * c2 + c1 == sum
                        && 25 * c5 + 16 * c4 + 9 * c3 + 4 * c2 + c1 == sumsq
                    {
                        let mut v = Vec::with_capacity(n);
                        v.extend(std::iter::repeat_n(5u8, c5));
                        v.extend(std::iter::repeat_n(4u8, c4));
                        v.extend(std::iter::repeat_n(3u8, c3));
                        v.extend(std::iter::repeat_n(2u8, c2));
                        v.extend(std::iter::repeat_n(1u8, c1));
                        return Some(v);
                    }
                }
            }
        }
    }
    None
}

fn sd_of(n: usize, sum: usize, sumsq: usize) -> f64 {
    let nf = n as f64;
    let var = (sumsq as f64 - (sum * sum) as f64 / nf) / (nf - 1.0);
    var.max(0.0).sqrt()
}

const TOL: f64 = 0.0095;

/// Solve a free 36-score vector for (mean, sd).
fn solve_free(mean: f64, sd: f64) -> Result<Vec<u8>> {
    let n = 36usize;
    let mut best: Option<(f64, usize, usize)> = None;
    for sum in n..=5 * n {
        let mean_err = (sum as f64 / n as f64 - mean).abs();
        if mean_err > TOL {
            continue;
        }
        for sumsq in feasible_sumsq(n, sum) {
            let sd_err = (sd_of(n, sum, sumsq) - sd).abs();
            if sd_err > TOL {
                continue;
            }
            let err = mean_err.max(sd_err);
            if best.is_none_or(|(e, _, _)| err < e) {
                best = Some((err, sum, sumsq));
            }
        }
    }
    let (_, sum, sumsq) = best.with_context(|| format!("no 36-vector for mean {mean} sd {sd}"))?;
    realize(n, sum, sumsq).context("realization")
}

/// Solve verifiability scores: three 12-score judge groups with fixed
/// per-judge sums, jointly matching the pooled sd.
fn solve_d1(mean: f64, sd: f64, judge_means: [f64; 3]) -> Result<[Vec<u8>; 3]> {
    let subsums: Vec<usize> = judge_means
        .iter()
        .map(|m| {
            let s = (m * 12.0).round() as usize;
            ensure!((s as f64 / 12.0 - m).abs() < 0.005 + 1e-9, "judge mean {m} not on a twelfth");
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let total: usize = subsums.iter().sum();
    ensure!(
        (total as f64 / 36.0 - mean).abs() <= TOL,
        "judge sums disagree with the pooled mean {mean}"
    );
    let fs: Vec<Vec<usize>> = subsums.iter().map(|&s| feasible_sumsq(12, s)).collect();
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for &q1 in &fs[0] {
        for &q2 in &fs[1] {
            for &q3 in &fs[2] {
                let sd_err = (sd_of(36, total, q1 + q2 + q3) - sd).abs();
                if sd_err <= TOL && best.is_none_or(|(e, ..)| sd_err < e) {
                    best = Some((sd_err, q1, q2, q3));
                }
            }
        }
    }
    let (_, q1, q2, q3) =
        best.with_context(|| format!("no judge split for mean {mean} sd {sd}"))?;
    Ok([
        realize(12, subsums[0], q1).context("group 1")?,
        realize(12, subsums[1], q2).context("group 2")?,
        realize(12, subsums[2], q3).context("group 3")?,
    ])
}

fn arm_of(label: &str) -> Arm {
    Arm::parse(label).expect("arm label")
}

/// Generate the released score file: one JSON record per
/// (scenario, arm, judge, round) with all five dimensions.
pub fn write_judge_scores(
    root: &Path,
    scenario_ids: &dyn Fn(&str) -> Vec<String>,
) -> Result<()> {
    let mut lines: Vec<String> = Vec::new();
    for ((pair, round, arm_label), dims) in CELLS {
        let ids = scenario_ids(pair);
        ensure!(ids.len() == 12, "12 scenarios for {pair}");
        let d1_groups = {
            let judge_means = D1_JUDGE_MEANS
                .iter()
                .find(|(k, _)| *k == (pair, round, arm_label))
                .map(|(_, m)| *m)
                .context("judge means present")?;
            solve_d1(dims[0].0, dims[0].1, judge_means)
                .with_context(|| format!("{pair}/{round}/{arm_label} D1"))?
        };
        let mut other: Vec<Vec<u8>> = Vec::new();
        for (mean, sd) in dims.iter().skip(1) {
            other.push(
                solve_free(*mean, *sd)
                    .with_context(|| format!("{pair}/{round}/{arm_label} ({mean}, {sd})"))?,
            );
        }
        for (j, judge) in JUDGES.iter().enumerate() {
            for (s, scenario_id) in ids.iter().enumerate() {
                let slot = j * 12 + s;
                let record = serde_json::json!({
                    "disease_pair": pair,
                    "scenario_id": scenario_id,
                    "arm": arm_of(arm_label),
                    "judge": judge,
                    "round": round,
                    "d1": d1_groups[j][s],
                    "d2": other[0][slot],
                    "d3": other[1][slot],
                    "d4": other[2][slot],
                    "d5": other[3][slot],
                    "justification": "released panel score",
                });
                lines.push(record.to_string());
            }
        }
    }
    let dir = root.join("released");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("judge_scores.jsonl"), lines.join("\n") + "\n")?;
    Ok(())
}

/// Post-generation check: recompute every cell and compare.
pub fn verify_judge_scores(root: &Path) -> Result<()> {
    let records = tracekg::files::load_score_records(root.join("released/judge_scores.jsonl"))?;
    ensure!(records.len() == 648, "648 score rows expected, got {}", records.len());
    for ((pair, round, arm_label), dims) in CELLS {
        let arm = arm_of(arm_label);
        let round = match round {
            "v1" => tracekg::judgepanel::Round::V1,
            _ => tracekg::judgepanel::Round::V2,
        };
        for (d, (mean, sd)) in dims.iter().enumerate() {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.disease_pair == pair && r.arm == arm && r.round == round)
                .map(|r| r.dim(d) as f64)
                .collect();
            ensure!(values.len() == 36, "cell size 36");
            let m = statkit::mean(&values);
            let s = statkit::sample_sd(&values);
            ensure!(
                (m - mean).abs() <= 0.01 && (s - sd).abs() <= 0.01,
                "{pair}/{arm_label} D{}: got ({m:.4}, {s:.4}), want ({mean}, {sd})",
                d + 1
            );
        }
    }
    Ok(())
}
