//! Statistics primitives shared across the evaluation stack: rank tests,
//! effect sizes, resampling intervals, multiplicity correction and
//! agreement coefficients.
//!
//! Every seeded operation draws from [`SplitMix64`], the crate's fixed
//! 64-bit generator, so results are reproducible within this implementation.

use crate::error::{Error, Result};

/// SplitMix64 (Vigna). The generator of record for every seeded operation
/// in this crate. Increment constant 0x9E3779B97F4A7C15.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent substream `i` of a base seed. Resampling loops use one
    /// substream per resample so the draw order never depends on scheduling.
    pub fn substream(seed: u64, i: u64) -> Self {
        SplitMix64::new(seed.wrapping_add((i.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, n) via multiply-shift reduction.
    pub fn next_below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Result of a statistical test or coefficient computation.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub ci: Option<(f64, f64)>,
    /// Sample size per group.
    pub n: Vec<usize>,
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n-1 denominator).
pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Average ranks over a pooled sample, ties share the mean rank.
fn average_ranks(pooled: &[f64]) -> Vec<f64> {
    let n = pooled.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pooled[a].partial_cmp(&pooled[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn u_from_rank_sum(rank_sum_a: f64, n_a: usize) -> f64 {
    rank_sum_a - (n_a * (n_a + 1)) as f64 / 2.0
}

/// Mann-Whitney U test, two-sided. The statistic is U for the first sample.
///
/// Exact enumeration over group assignments when `n_a * n_b <= 64`,
/// otherwise a normal approximation with tie and continuity correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("mann_whitney_u: empty sample".into()));
    }
    let (n_a, n_b) = (a.len(), b.len());
    let n = n_a + n_b;
    let mut pooled = Vec::with_capacity(n);
    pooled.extend_from_slice(a);
    pooled.extend_from_slice(b);
    let ranks = average_ranks(&pooled);
    let rank_sum_a: f64 = ranks[..n_a].iter().sum();
    let u_a = u_from_rank_sum(rank_sum_a, n_a);
    let mu = (n_a * n_b) as f64 / 2.0;

    let p = if n_a * n_b <= 64 {
        exact_two_sided_p(&ranks, n_a, u_a, mu)
    } else {
        // Tie-corrected variance.
        let mut tie_term = 0.0;
        let mut sorted = pooled.clone();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && sorted[j + 1] == sorted[i] {
                j += 1;
            }
            let t = (j - i + 1) as f64;
            tie_term += t * t * t - t;
            i = j + 1;
        }
        let var = (n_a * n_b) as f64 / 12.0
            * ((n as f64 + 1.0) - tie_term / (n as f64 * (n as f64 - 1.0)));
        if var <= 0.0 {
            1.0
        } else {
            // Continuity correction toward the mean.
            let z = ((u_a - mu).abs() - 0.5).max(0.0) / var.sqrt();
            2.0 * (1.0 - normal_cdf(z))
        }
    };

    Ok(TestResult {
        statistic: u_a,
        p_value: p.clamp(0.0, 1.0),
        ci: None,
        n: vec![n_a, n_b],
    })
}

/// Exact two-sided p: share of assignments with |U - mu| at least as large
/// as observed, enumerated over all C(n, n_a) group labellings of the
/// pooled ranks.
fn exact_two_sided_p(ranks: &[f64], n_a: usize, u_obs: f64, mu: f64) -> f64 {
    let threshold = (u_obs - mu).abs() - 1e-9;
    let mut extreme = 0u64;
    let mut total = 0u64;
    let mut chosen = Vec::with_capacity(n_a);
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        ranks: &[f64],
        start: usize,
        left: usize,
        sum: f64,
        n_a: usize,
        mu: f64,
        threshold: f64,
        extreme: &mut u64,
        total: &mut u64,
        chosen: &mut Vec<usize>,
    ) {
        if left == 0 {
            let u = u_from_rank_sum(sum, n_a);
            *total += 1;
            if (u - mu).abs() >= threshold {
                *extreme += 1;
            }
            return;
        }
        if ranks.len() - start < left {
            return;
        }
        for i in start..=ranks.len() - left {
            chosen.push(i);
            recurse(
                ranks,
                i + 1,
                left - 1,
                sum + ranks[i],
                n_a,
                mu,
                threshold,
                extreme,
                total,
                chosen,
            );
            chosen.pop();
        }
    }
    recurse(
        ranks, 0, n_a, 0.0, n_a, mu, threshold, &mut extreme, &mut total, &mut chosen,
    );
    extreme as f64 / total as f64
}

/// Cohen's d from group summaries, pooled SD with (n-1) weighting.
/// Positive when group b exceeds group a.
pub fn cohens_d(
    mean_a: f64,
    sd_a: f64,
    n_a: usize,
    mean_b: f64,
    sd_b: f64,
    n_b: usize,
) -> Result<f64> {
    if n_a < 2 || n_b < 2 {
        return Err(Error::InvalidInput(
            "cohens_d: each group needs n >= 2".into(),
        ));
    }
    let pooled = (((n_a - 1) as f64 * sd_a * sd_a + (n_b - 1) as f64 * sd_b * sd_b)
        / (n_a + n_b - 2) as f64)
        .sqrt();
    if pooled == 0.0 {
        return Ok(0.0);
    }
    Ok((mean_b - mean_a) / pooled)
}

/// Percentile bootstrap confidence interval. Deterministic for a fixed
/// (values, seed, resamples): resample `i` draws from substream `i`.
pub fn bootstrap_ci<F>(
    values: &[f64],
    statistic: F,
    resamples: usize,
    seed: u64,
    level: f64,
) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if values.is_empty() {
        return Err(Error::InvalidInput("bootstrap_ci: empty input".into()));
    }
    if !(0.0..1.0).contains(&level) || level <= 0.0 {
        return Err(Error::InvalidInput("bootstrap_ci: level must be in (0,1)".into()));
    }
    let n = values.len();
    let mut stats = Vec::with_capacity(resamples);
    let mut sample = vec![0.0f64; n];
    for i in 0..resamples {
        let mut rng = SplitMix64::substream(seed, i as u64);
        for slot in sample.iter_mut() {
            *slot = values[rng.next_below(n as u64) as usize];
        }
        stats.push(statistic(&sample));
    }
    stats.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let alpha = (1.0 - level) / 2.0;
    Ok((quantile_sorted(&stats, alpha), quantile_sorted(&stats, 1.0 - alpha)))
}

/// Linear-interpolation quantile over an ascending slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Benjamini-Hochberg step-up q-values, monotone, in input order.
pub fn bh_correct(p_values: &[f64]) -> Result<Vec<f64>> {
    for &p in p_values {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "bh_correct: p-value {p} outside [0,1]"
            )));
        }
    }
    let m = p_values.len();
    if m == 0 {
        return Ok(vec![]);
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].partial_cmp(&p_values[b]).unwrap());
    let mut q_sorted = vec![0.0; m];
    for (i, &idx) in order.iter().enumerate() {
        q_sorted[i] = p_values[idx] * m as f64 / (i + 1) as f64;
    }
    for i in (0..m.saturating_sub(1)).rev() {
        q_sorted[i] = q_sorted[i].min(q_sorted[i + 1]);
    }
    let mut q = vec![0.0; m];
    for (i, &idx) in order.iter().enumerate() {
        q[idx] = q_sorted[i].min(1.0);
    }
    Ok(q)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_ci(successes: usize, n: usize, level: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidInput("wilson_ci: n = 0".into()));
    }
    if successes > n {
        return Err(Error::InvalidInput("wilson_ci: successes > n".into()));
    }
    let z = normal_quantile(1.0 - (1.0 - level) / 2.0);
    let nf = n as f64;
    let p = successes as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let center = (p + z * z / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// Distance metric for Krippendorff's alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaMetric {
    Nominal,
    Ordinal,
    Interval,
}

/// Krippendorff's alpha over an items x raters matrix with missing entries.
/// Units with fewer than two ratings are excluded pairwise.
pub fn krippendorff_alpha(ratings: &[Vec<Option<f64>>], metric: AlphaMetric) -> Result<f64> {
    // Value domain, ascending.
    let mut domain: Vec<f64> = Vec::new();
    for row in ratings {
        for v in row.iter().flatten() {
            if !domain.iter().any(|d| d == v) {
                domain.push(*v);
            }
        }
    }
    domain.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = domain.len();
    let idx_of = |v: f64| domain.iter().position(|d| *d == v).unwrap();

    // Coincidence matrix.
    let mut coincidence = vec![vec![0.0f64; k]; k];
    let mut any_pairable = false;
    for row in ratings {
        let vals: Vec<f64> = row.iter().flatten().copied().collect();
        let m = vals.len();
        if m < 2 {
            continue;
        }
        any_pairable = true;
        for (i, &vi) in vals.iter().enumerate() {
            for (j, &vj) in vals.iter().enumerate() {
                if i != j {
                    coincidence[idx_of(vi)][idx_of(vj)] += 1.0 / (m as f64 - 1.0);
                }
            }
        }
    }
    if !any_pairable {
        return Err(Error::InvalidInput(
            "krippendorff_alpha: fewer than 2 raters overlap on any unit".into(),
        ));
    }
    let marginals: Vec<f64> = (0..k).map(|c| coincidence[c].iter().sum()).collect();
    let total: f64 = marginals.iter().sum();

    let delta_sq = |c: usize, g: usize| -> f64 {
        match metric {
            AlphaMetric::Nominal => {
                if c == g {
                    0.0
                } else {
                    1.0
                }
            }
            AlphaMetric::Interval => {
                let d = domain[c] - domain[g];
                d * d
            }
            AlphaMetric::Ordinal => {
                let (lo, hi) = if c <= g { (c, g) } else { (g, c) };
                let span: f64 = (lo..=hi).map(|t| marginals[t]).sum();
                let d = span - (marginals[lo] + marginals[hi]) / 2.0;
                d * d
            }
        }
    };

    let mut d_o = 0.0;
    let mut d_e = 0.0;
    for c in 0..k {
        for g in 0..k {
            if c == g {
                continue;
            }
            d_o += coincidence[c][g] * delta_sq(c, g);
            d_e += marginals[c] * marginals[g] * delta_sq(c, g);
        }
    }
    d_o /= total;
    d_e /= total * (total - 1.0);
    if d_e == 0.0 {
        // Single observed category: perfect agreement by convention.
        return Ok(1.0);
    }
    Ok(1.0 - d_o / d_e)
}

/// Cohen's quadratic-weighted kappa over a declared category range.
/// A half-step grid (hedged scores like 3.5) is supported by doubling.
pub fn weighted_kappa_quadratic(
    rater_a: &[f64],
    rater_b: &[f64],
    range: (f64, f64),
) -> Result<f64> {
    if rater_a.len() != rater_b.len() {
        return Err(Error::InvalidInput(
            "weighted_kappa_quadratic: length mismatch".into(),
        ));
    }
    if rater_a.is_empty() {
        return Err(Error::InvalidInput(
            "weighted_kappa_quadratic: empty input".into(),
        ));
    }
    // Double the grid so half-steps land on integers.
    let to_cell = |v: f64| -> Result<usize> {
        let doubled = v * 2.0;
        if (doubled - doubled.round()).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "weighted_kappa_quadratic: value {v} is not on the half-step grid"
            )));
        }
        let cell = doubled.round() - range.0 * 2.0;
        if cell < 0.0 || doubled.round() > range.1 * 2.0 {
            return Err(Error::InvalidInput(format!(
                "weighted_kappa_quadratic: value {v} outside declared range"
            )));
        }
        Ok(cell as usize)
    };
    let k = ((range.1 - range.0) * 2.0).round() as usize + 1;
    let n = rater_a.len() as f64;
    let mut observed = vec![vec![0.0f64; k]; k];
    for (&va, &vb) in rater_a.iter().zip(rater_b) {
        observed[to_cell(va)?][to_cell(vb)?] += 1.0 / n;
    }
    let row: Vec<f64> = (0..k).map(|i| observed[i].iter().sum()).collect();
    let col: Vec<f64> = (0..k).map(|j| (0..k).map(|i| observed[i][j]).sum()).collect();
    let weight = |i: usize, j: usize| -> f64 {
        if k == 1 {
            return 1.0;
        }
        let d = i as f64 - j as f64;
        1.0 - d * d / ((k - 1) as f64 * (k - 1) as f64)
    };
    let mut po = 0.0;
    let mut pe = 0.0;
    for i in 0..k {
        for j in 0..k {
            po += weight(i, j) * observed[i][j];
            pe += weight(i, j) * row[i] * col[j];
        }
    }
    if (1.0 - pe).abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok((po - pe) / (1.0 - pe))
}

/// ICC(2,1): two-way random effects, single measurement, absolute agreement.
/// Requires a complete items x raters matrix.
pub fn icc_2_1(ratings: &[Vec<f64>]) -> Result<f64> {
    let n = ratings.len();
    if n < 2 {
        return Err(Error::InvalidInput("icc_2_1: need >= 2 items".into()));
    }
    let k = ratings[0].len();
    if k < 2 {
        return Err(Error::InvalidInput("icc_2_1: need >= 2 raters".into()));
    }
    if ratings.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidInput(
            "icc_2_1: ragged matrix (missing cells not allowed)".into(),
        ));
    }
    let nf = n as f64;
    let kf = k as f64;
    let grand = ratings.iter().flatten().sum::<f64>() / (nf * kf);
    let row_means: Vec<f64> = ratings.iter().map(|r| mean(r)).collect();
    let col_means: Vec<f64> = (0..k)
        .map(|j| ratings.iter().map(|r| r[j]).sum::<f64>() / nf)
        .collect();
    let ss_rows = kf * row_means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>();
    let ss_cols = nf * col_means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>();
    let ss_total: f64 = ratings
        .iter()
        .flatten()
        .map(|v| (v - grand) * (v - grand))
        .sum();
    let ss_err = ss_total - ss_rows - ss_cols;
    let msr = ss_rows / (nf - 1.0);
    let msc = ss_cols / (kf - 1.0);
    let mse = ss_err / ((nf - 1.0) * (kf - 1.0));
    let denom = msr + (kf - 1.0) * mse + kf * (msc - mse) / nf;
    if denom.abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok((msr - mse) / denom)
}

/// Spearman rank correlation with average ranks for ties; p-value from the
/// t approximation with n-2 degrees of freedom.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput("spearman_rho: length mismatch".into()));
    }
    let n = a.len();
    if n < 3 {
        return Err(Error::InvalidInput("spearman_rho: need n >= 3".into()));
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let ma = mean(&ra);
    let mb = mean(&rb);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for i in 0..n {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::InvalidInput(
            "spearman_rho: zero rank variance".into(),
        ));
    }
    let rho = cov / (va.sqrt() * vb.sqrt());
    let p = if rho.abs() >= 1.0 - 1e-12 {
        0.0
    } else {
        let df = (n - 2) as f64;
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        2.0 * (1.0 - student_t_cdf(t.abs(), df))
    };
    Ok(TestResult {
        statistic: rho,
        p_value: p.clamp(0.0, 1.0),
        ci: None,
        n: vec![n],
    })
}

/// Standard normal CDF (Abramowitz & Stegun 26.2.17, ~1e-7 absolute error).
pub fn normal_cdf(z: f64) -> f64 {
    if z < 0.0 {
        return 1.0 - normal_cdf(-z);
    }
    let t = 1.0 / (1.0 + 0.2316419 * z);
    let poly = t
        * (0.319381530
            + t * (-0.356563782 + t * (1.781477937 + t * (-1.821255978 + t * 1.330274429))));
    let pdf = (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    1.0 - pdf * poly
}

/// Inverse standard normal CDF (Acklam's rational approximation).
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "normal_quantile domain");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}

/// Student t CDF via the regularized incomplete beta function.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    let prob = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
    if t > 0.0 {
        1.0 - prob
    } else {
        prob
    }
}

/// Regularized incomplete beta I_x(a, b) by continued fraction.
fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let front = (a * x.ln() + b * (1.0 - x).ln() - ln_beta).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - (a * x.ln() + b * (1.0 - x).ln() - ln_beta).exp() * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 200;
    const EPS: f64 = 3e-14;
    const FPMIN: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Lanczos log-gamma.
fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000000000190015;
    for g in G {
        y += 1.0;
        ser += g / y;
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_vectors() {
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xe220a8397b1dcdaf);
        assert_eq!(rng.next_u64(), 0x6e789e6aa1b965f4);
        assert_eq!(rng.next_u64(), 0x06c45d188009454f);
        let mut rng = SplitMix64::new(42);
        assert_eq!(rng.next_u64(), 0xbdd732262feb6e95);
        assert_eq!(rng.next_u64(), 0x28efe333b266f103);
        assert_eq!(rng.next_u64(), 0x47526757130f9f52);
    }

    #[test]
    fn mann_whitney_no_separation() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!(r.p_value >= 0.99, "p = {}", r.p_value);
    }

    #[test]
    fn mann_whitney_complete_separation_exact() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        // Exactly two of C(6,3)=20 labellings are as extreme (U=0 and U=9).
        assert!((r.p_value - 0.1).abs() < 1e-12, "p = {}", r.p_value);
    }

    // Independent brute-force oracle: enumerate labellings directly over the
    // pooled values, recomputing tied ranks from scratch each time.
    fn oracle_exact(a: &[f64], b: &[f64]) -> (f64, f64) {
        let n_a = a.len();
        let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
        let n = pooled.len();
        let rank = |v: f64| -> f64 {
            let below = pooled.iter().filter(|&&x| x < v).count() as f64;
            let equal = pooled.iter().filter(|&&x| x == v).count() as f64;
            below + (equal + 1.0) / 2.0
        };
        let u_of = |idx: &[usize]| -> f64 {
            let rs: f64 = idx.iter().map(|&i| rank(pooled[i])).sum();
            rs - (n_a * (n_a + 1)) as f64 / 2.0
        };
        let obs: Vec<usize> = (0..n_a).collect();
        let u_obs = u_of(&obs);
        let mu = (n_a * (n - n_a)) as f64 / 2.0;
        let mut extreme = 0usize;
        let mut total = 0usize;
        // Enumerate subsets of size n_a via bitmask (n small in tests).
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n_a {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let u = u_of(&idx);
            total += 1;
            if (u - mu).abs() >= (u_obs - mu).abs() - 1e-9 {
                extreme += 1;
            }
        }
        (u_obs, extreme as f64 / total as f64)
    }

    #[test]
    fn mann_whitney_ties_match_permutation_oracle() {
        let a = [1.0, 2.0];
        let b = [2.0, 3.0];
        let (u_expected, p_expected) = oracle_exact(&a, &b);
        let r = mann_whitney_u(&a, &b).unwrap();
        assert_eq!(r.statistic, u_expected);
        assert!((r.p_value - p_expected).abs() < 1e-12);
    }

    #[test]
    fn mann_whitney_u_sum_identity() {
        let a = [3.1, 4.0, 4.0, 7.2, 9.9];
        let b = [1.0, 4.0, 5.5, 8.8];
        let r_ab = mann_whitney_u(&a, &b).unwrap();
        let r_ba = mann_whitney_u(&b, &a).unwrap();
        assert!((r_ab.statistic + r_ba.statistic - (a.len() * b.len()) as f64).abs() < 1e-9);
    }

    #[test]
    fn mann_whitney_empty_errors() {
        assert!(mann_whitney_u(&[], &[1.0]).is_err());
    }

    #[test]
    fn cohens_d_published_summaries() {
        // Values checked against a hand computation of the pooled-SD formula.
        let d = cohens_d(2.50, 0.55, 6, 3.80, 0.45, 5).unwrap();
        assert!((d - 2.5591).abs() < 1e-3, "d = {d}");
        let d = cohens_d(2.35, 0.70, 17, 4.00, 1.08, 18).unwrap();
        assert!((d - 1.8020).abs() < 1e-3, "d = {d}");
        let d = cohens_d(3.03, 0.88, 36, 3.69, 0.98, 36).unwrap();
        assert!((d - 0.7087).abs() < 1e-3, "d = {d}");
    }

    #[test]
    fn cohens_d_equal_means_and_sign() {
        assert_eq!(cohens_d(3.0, 1.0, 5, 3.0, 1.0, 5).unwrap(), 0.0);
        let fwd = cohens_d(1.0, 0.5, 8, 2.0, 0.5, 8).unwrap();
        let rev = cohens_d(2.0, 0.5, 8, 1.0, 0.5, 8).unwrap();
        assert!((fwd + rev).abs() < 1e-12);
        assert!(cohens_d(1.0, 0.0, 1, 2.0, 1.0, 5).is_err());
    }

    #[test]
    fn bootstrap_constant_vector_degenerate() {
        let (lo, hi) = bootstrap_ci(&[0.4; 12], mean, 1000, 42, 0.95).unwrap();
        assert!((lo - 0.4).abs() < 1e-12 && (hi - 0.4).abs() < 1e-12);
        assert_eq!(lo, hi);
    }

    #[test]
    fn bootstrap_seed_deterministic() {
        let data = [0.1, 0.5, 0.9, 0.3, 0.7, 0.2, 0.8];
        let a = bootstrap_ci(&data, mean, 2000, 42, 0.95).unwrap();
        let b = bootstrap_ci(&data, mean, 2000, 42, 0.95).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_ci(&data, mean, 2000, 43, 0.95).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bootstrap_binomial_sanity() {
        // 60 ones among 200: bootstrap CI of the mean should sit near the
        // analytic binomial (Wald) interval 0.3 +/- 1.96*sqrt(pq/n).
        let mut data = vec![0.0; 140];
        data.extend(vec![1.0; 60]);
        let (lo, hi) = bootstrap_ci(&data, mean, 10_000, 42, 0.95).unwrap();
        let se = (0.3f64 * 0.7 / 200.0).sqrt();
        assert!((lo - (0.3 - 1.96 * se)).abs() < 0.02, "lo = {lo}");
        assert!((hi - (0.3 + 1.96 * se)).abs() < 0.02, "hi = {hi}");
    }

    #[test]
    fn bh_correct_basics() {
        assert_eq!(bh_correct(&[0.03]).unwrap(), vec![0.03]);
        for q in bh_correct(&[0.2, 0.2, 0.2]).unwrap() {
            assert!((q - 0.2).abs() < 1e-12);
        }
        // Hand-computed step-up for {0.01..0.05}: every q collapses to 0.05.
        let q = bh_correct(&[0.01, 0.02, 0.03, 0.04, 0.05]).unwrap();
        for v in q {
            assert!((v - 0.05).abs() < 1e-12);
        }
        assert!(bh_correct(&[1.2]).is_err());
    }

    #[test]
    fn bh_correct_dominates_raw_p() {
        let p = [0.4, 0.01, 0.9, 0.02, 0.33];
        let q = bh_correct(&p).unwrap();
        for (pi, qi) in p.iter().zip(&q) {
            assert!(qi >= pi);
        }
    }

    #[test]
    fn wilson_published_intervals() {
        let (lo, hi) = wilson_ci(12, 15, 0.95).unwrap();
        assert!((lo - 0.548).abs() < 1e-3, "lo = {lo}");
        assert!((hi - 0.930).abs() < 1e-3, "hi = {hi}");
        let (lo, hi) = wilson_ci(2, 15, 0.95).unwrap();
        assert!((lo - 0.037).abs() < 1e-3, "lo = {lo}");
        assert!((hi - 0.379).abs() < 1e-3, "hi = {hi}");
    }

    #[test]
    fn wilson_edge_cases() {
        let (lo, _) = wilson_ci(0, 20, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert!(wilson_ci(16, 15, 0.95).is_err());
    }

    #[test]
    fn alpha_perfect_agreement() {
        let m = vec![
            vec![Some(1.0), Some(1.0), Some(1.0)],
            vec![Some(3.0), Some(3.0), Some(3.0)],
            vec![Some(5.0), Some(5.0), Some(5.0)],
        ];
        assert_eq!(krippendorff_alpha(&m, AlphaMetric::Ordinal).unwrap(), 1.0);
    }

    #[test]
    fn alpha_systematic_disagreement_below_chance() {
        let m = vec![
            vec![Some(1.0), Some(2.0)],
            vec![Some(2.0), Some(1.0)],
            vec![Some(1.0), Some(2.0)],
            vec![Some(2.0), Some(1.0)],
        ];
        let a = krippendorff_alpha(&m, AlphaMetric::Ordinal).unwrap();
        assert!(a <= 0.0, "alpha = {a}");
    }

    #[test]
    fn alpha_requires_overlap() {
        let m = vec![vec![Some(1.0), None], vec![None, Some(2.0)]];
        assert!(krippendorff_alpha(&m, AlphaMetric::Ordinal).is_err());
    }

    // Independent coincidence-matrix oracle for a 3-rater 5-item ordinal
    // fixture, written from the textbook definition rather than shared code.
    #[test]
    fn alpha_ordinal_matches_hand_oracle() {
        let items: Vec<Vec<Option<f64>>> = vec![
            vec![Some(1.0), Some(1.0), Some(2.0)],
            vec![Some(2.0), Some(2.0), Some(2.0)],
            vec![Some(3.0), Some(3.0), Some(4.0)],
            vec![Some(4.0), Some(4.0), Some(4.0)],
            vec![Some(2.0), Some(3.0), None],
        ];
        // Oracle computation.
        let domain = [1.0, 2.0, 3.0, 4.0];
        let pos = |v: f64| domain.iter().position(|d| *d == v).unwrap();
        let mut o = [[0.0f64; 4]; 4];
        for row in &items {
            let vals: Vec<f64> = row.iter().flatten().copied().collect();
            let m = vals.len() as f64;
            if m < 2.0 {
                continue;
            }
            for i in 0..vals.len() {
                for j in 0..vals.len() {
                    if i != j {
                        o[pos(vals[i])][pos(vals[j])] += 1.0 / (m - 1.0);
                    }
                }
            }
        }
        let nc: Vec<f64> = (0..4).map(|c| o[c].iter().sum()).collect();
        let n: f64 = nc.iter().sum();
        let dsq = |c: usize, k: usize| {
            let (lo, hi) = if c <= k { (c, k) } else { (k, c) };
            let span: f64 = (lo..=hi).map(|t| nc[t]).sum();
            let d = span - (nc[lo] + nc[hi]) / 2.0;
            d * d
        };
        let mut d_o = 0.0;
        let mut d_e = 0.0;
        for c in 0..4 {
            for k in 0..4 {
                if c != k {
                    d_o += o[c][k] * dsq(c, k);
                    d_e += nc[c] * nc[k] * dsq(c, k);
                }
            }
        }
        let expected = 1.0 - (d_o / n) / (d_e / (n * (n - 1.0)));

        let got = krippendorff_alpha(&items, AlphaMetric::Ordinal).unwrap();
        assert!((got - expected).abs() < 1e-12, "got {got}, want {expected}");
    }

    #[test]
    fn kappa_identical_and_half_steps() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(weighted_kappa_quadratic(&a, &a, (1.0, 5.0)).unwrap(), 1.0);
        let h = [1.5, 2.5, 3.0];
        assert!(weighted_kappa_quadratic(&h, &h, (1.0, 5.0)).is_ok());
        assert!(weighted_kappa_quadratic(&[1.0], &[1.0, 2.0], (1.0, 5.0)).is_err());
    }

    #[test]
    fn kappa_uniform_independence_near_zero() {
        // Joint counts exactly uniform over a 2x2 table: po_w = pe_w, kappa 0.
        let a = [1.0, 1.0, 2.0, 2.0];
        let b = [1.0, 2.0, 1.0, 2.0];
        let k = weighted_kappa_quadratic(&a, &b, (1.0, 2.0)).unwrap();
        assert!(k.abs() < 1e-12, "kappa = {k}");
    }

    #[test]
    fn kappa_matches_hand_contingency() {
        // 3x3 contingency with quadratic weights, worked by hand:
        // pairs: (1,1) x3, (2,2) x2, (3,3) x2, (1,2) x1, (3,2) x1, (2,3) x1.
        let a = [1.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 1.0, 3.0, 2.0];
        let b = [1.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 2.0, 2.0, 3.0];
        // Hand oracle computed from the definition.
        let n = 10.0;
        let grid = [1.0f64, 2.0, 3.0];
        let mut obs = [[0.0f64; 3]; 3];
        for (x, y) in a.iter().zip(&b) {
            let i = grid.iter().position(|g| g == x).unwrap();
            let j = grid.iter().position(|g| g == y).unwrap();
            obs[i][j] += 1.0 / n;
        }
        let row: Vec<f64> = (0..3).map(|i| obs[i].iter().sum()).collect();
        let col: Vec<f64> = (0..3).map(|j| (0..3).map(|i| obs[i][j]).sum()).collect();
        let w = |i: usize, j: usize| 1.0 - ((i as f64 - j as f64).powi(2)) / 4.0;
        let mut po = 0.0;
        let mut pe = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                po += w(i, j) * obs[i][j];
                pe += w(i, j) * row[i] * col[j];
            }
        }
        let expected = (po - pe) / (1.0 - pe);

        // The implementation doubles the grid internally; weights are
        // invariant under that rescaling, so results must agree.
        let got = weighted_kappa_quadratic(&a, &b, (1.0, 3.0)).unwrap();
        assert!((got - expected).abs() < 1e-12, "got {got}, want {expected}");
    }

    #[test]
    fn icc_identical_raters() {
        let m = vec![
            vec![1.0, 1.0],
            vec![2.0, 2.0],
            vec![3.0, 3.0],
            vec![4.0, 4.0],
        ];
        assert!((icc_2_1(&m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn icc_penalizes_constant_offset() {
        let m = vec![
            vec![1.0, 2.0],
            vec![2.0, 3.0],
            vec![3.0, 4.0],
            vec![4.0, 5.0],
        ];
        let icc = icc_2_1(&m).unwrap();
        assert!(icc < 1.0, "icc = {icc}");
        assert!(icc > 0.0);
    }

    #[test]
    fn icc_matches_hand_anova() {
        // 6 items x 2 raters, ANOVA decomposition worked independently.
        let m = vec![
            vec![3.0, 4.0],
            vec![2.0, 2.0],
            vec![4.0, 5.0],
            vec![1.0, 2.0],
            vec![5.0, 5.0],
            vec![3.0, 3.0],
        ];
        let n = 6.0;
        let k = 2.0;
        let grand: f64 = m.iter().flatten().sum::<f64>() / (n * k);
        let ss_rows: f64 = k
            * m.iter()
                .map(|r| {
                    let rm = (r[0] + r[1]) / 2.0;
                    (rm - grand) * (rm - grand)
                })
                .sum::<f64>();
        let c0: f64 = m.iter().map(|r| r[0]).sum::<f64>() / n;
        let c1: f64 = m.iter().map(|r| r[1]).sum::<f64>() / n;
        let ss_cols = n * ((c0 - grand).powi(2) + (c1 - grand).powi(2));
        let ss_total: f64 = m.iter().flatten().map(|v| (v - grand) * (v - grand)).sum();
        let ss_err = ss_total - ss_rows - ss_cols;
        let msr = ss_rows / (n - 1.0);
        let msc = ss_cols / (k - 1.0);
        let mse = ss_err / ((n - 1.0) * (k - 1.0));
        let expected = (msr - mse) / (msr + (k - 1.0) * mse + k * (msc - mse) / n);

        let got = icc_2_1(&m).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!(icc_2_1(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn spearman_monotone_and_reverse() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let up = [2.0, 4.0, 9.0, 16.0, 25.0];
        assert!((spearman_rho(&a, &up).unwrap().statistic - 1.0).abs() < 1e-9);
        let down = [25.0, 16.0, 9.0, 4.0, 2.0];
        assert!((spearman_rho(&a, &down).unwrap().statistic + 1.0).abs() < 1e-9);
        assert!(spearman_rho(&[1.0, 2.0], &[2.0, 3.0]).is_err());
    }

    #[test]
    fn spearman_ties_match_rank_oracle() {
        let a = [1.0, 2.0, 2.0, 4.0, 5.0, 5.0];
        let b = [1.0, 3.0, 2.0, 4.0, 6.0, 6.0];
        // Brute-force rank oracle: Pearson over explicitly averaged ranks.
        let rank = |xs: &[f64]| -> Vec<f64> {
            xs.iter()
                .map(|&v| {
                    let below = xs.iter().filter(|&&x| x < v).count() as f64;
                    let equal = xs.iter().filter(|&&x| x == v).count() as f64;
                    below + (equal + 1.0) / 2.0
                })
                .collect()
        };
        let ra = rank(&a);
        let rb = rank(&b);
        let ma = mean(&ra);
        let mb = mean(&rb);
        let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = ra.iter().map(|x| (x - ma) * (x - ma)).sum();
        let vb: f64 = rb.iter().map(|y| (y - mb) * (y - mb)).sum();
        let expected = cov / (va.sqrt() * vb.sqrt());
        let got = spearman_rho(&a, &b).unwrap().statistic;
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn normal_helpers_roundtrip() {
        assert!((normal_cdf(1.959964) - 0.975).abs() < 1e-6);
        assert!((normal_quantile(0.975) - 1.959964).abs() < 1e-6);
        assert!((student_t_cdf(0.0, 10.0) - 0.5).abs() < 1e-12);
    }
}
