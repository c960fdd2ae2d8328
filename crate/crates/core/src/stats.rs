//! Paired statistics for solver comparisons: Wilcoxon signed-rank with an
//! exact small-sample null, Spearman rank correlation with a percentile
//! bootstrap, and the dwell-quality correlation table over run records.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::audit::{cell_key_of, RunRecord};
use crate::error::{Error, Result};
use crate::rng::{self, StreamTag};

/// Sample size at or below which the signed-rank null is enumerated exactly.
pub const EXACT_WILCOXON_LIMIT: usize = 25;

pub mod describe {
    //! Small descriptive helpers shared across modules.

    pub fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    /// Unbiased sample variance (divisor n-1); None for fewer than 2 points.
    pub fn sample_variance(xs: &[f64]) -> Option<f64> {
        if xs.len() < 2 {
            return None;
        }
        let m = mean(xs);
        Some(xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64)
    }

    pub fn sample_std(xs: &[f64]) -> Option<f64> {
        sample_variance(xs).map(f64::sqrt)
    }

    /// Linear-interpolation quantile on a sorted slice (type 7).
    pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
        assert!(!sorted.is_empty());
        let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        if lo == hi {
            sorted[lo]
        } else {
            let w = pos - lo as f64;
            sorted[lo] * (1.0 - w) + sorted[hi] * w
        }
    }

    pub fn median(xs: &[f64]) -> f64 {
        let mut v = xs.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        quantile_sorted(&v, 0.5)
    }

    pub fn iqr(xs: &[f64]) -> f64 {
        let mut v = xs.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25)
    }
}

/// Average ranks (1-based) with ties sharing the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0; // positions are 1-based
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// First member of each pair is smaller.
    Less,
    /// First member of each pair is larger.
    Greater,
    TwoSided,
}

/// Labeled paired observations, e.g. two solvers' objectives on the same
/// instance set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSample {
    pub label_a: String,
    pub label_b: String,
    pub pairs: Vec<(f64, f64)>,
}

impl PairedSample {
    pub fn new(
        label_a: impl Into<String>,
        label_b: impl Into<String>,
        pairs: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InsufficientData("paired sample is empty".into()));
        }
        Ok(PairedSample {
            label_a: label_a.into(),
            label_b: label_b.into(),
            pairs,
        })
    }

    pub fn wilcoxon(&self, alternative: Alternative) -> Result<WilcoxonResult> {
        wilcoxon_signed_rank(&self.pairs, alternative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of ranks of positive differences (a - b).
    pub w_statistic: f64,
    pub p_value: f64,
    /// Pairs remaining after zero differences are dropped.
    pub n_effective: usize,
    pub method: WilcoxonMethod,
}

/// Signed-rank test on paired samples. Zero differences are dropped, tied
/// magnitudes get average ranks, and for up to [`EXACT_WILCOXON_LIMIT`]
/// effective pairs the p-value comes from full enumeration of the 2^n sign
/// assignments (conditioned on the observed tie pattern). Larger samples use
/// the tie-corrected normal approximation with continuity correction.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)], alternative: Alternative) -> Result<WilcoxonResult> {
    if pairs.is_empty() {
        return Err(Error::InsufficientData("no pairs supplied".into()));
    }
    let diffs: Vec<f64> = pairs
        .iter()
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            w_statistic: 0.0,
            p_value: 1.0,
            n_effective: 0,
            method: WilcoxonMethod::Exact,
        });
    }
    let mags: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&mags);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    let (p_le, p_ge, method) = if n <= EXACT_WILCOXON_LIMIT {
        exact_tail_masses(&ranks, w_plus)
    } else {
        normal_tail_masses(&ranks, w_plus)?
    };
    let p_value = match alternative {
        Alternative::Less => p_le,
        Alternative::Greater => p_ge,
        Alternative::TwoSided => (2.0 * p_le.min(p_ge)).min(1.0),
    };
    Ok(WilcoxonResult {
        w_statistic: w_plus,
        p_value,
        n_effective: n,
        method,
    })
}

/// Exact tail masses P(W+ <= w) and P(W+ >= w) by subset-sum counting over
/// doubled ranks (average ranks are half-integers, so doubling gives
/// integers and keeps the arithmetic exact).
fn exact_tail_masses(ranks: &[f64], w_plus: f64) -> (f64, f64, WilcoxonMethod) {
    let scaled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = scaled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &r in &scaled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let denom = 2f64.powi(ranks.len() as i32);
    let w_scaled = (2.0 * w_plus).round() as usize;
    let below: u64 = counts[..=w_scaled.min(total)].iter().sum();
    let above: u64 = counts[w_scaled.min(total)..].iter().sum();
    (
        below as f64 / denom,
        above as f64 / denom,
        WilcoxonMethod::Exact,
    )
}

fn normal_tail_masses(ranks: &[f64], w_plus: f64) -> Result<(f64, f64, WilcoxonMethod)> {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    // Tie correction: subtract sum(t^3 - t)/48 over tie groups.
    let mut sorted = ranks.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return Err(Error::Undefined(
            "signed-rank variance vanished under ties".into(),
        ));
    }
    let sd = var.sqrt();
    let norm = Normal::new(0.0, 1.0).expect("unit normal");
    let p_le = norm.cdf((w_plus + 0.5 - mean) / sd);
    let p_ge = 1.0 - norm.cdf((w_plus - 0.5 - mean) / sd);
    Ok((p_le, p_ge, WilcoxonMethod::NormalApprox))
}

/// Spearman rank correlation with average ranks. Errors when either input
/// is constant (rank variance zero makes the coefficient undefined).
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(format!(
            "x has {} points, y has {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData(
            "correlation needs at least 2 points".into(),
        ));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let mx = describe::mean(&rx);
    let my = describe::mean(&ry);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..rx.len() {
        let dx = rx[i] - mx;
        let dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined(
            "constant input, rank variance is zero".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_resamples: u32,
    /// Resamples dropped after exhausting undefined-correlation retries.
    pub excluded_resamples: u32,
    pub seed: u64,
}

const BOOTSTRAP_RETRY_CAP: u32 = 100;

/// Percentile bootstrap interval for Spearman rho with paired resampling.
/// Resamples whose correlation is undefined (constant draw) are redrawn up
/// to a retry cap, then excluded with the count reported.
pub fn bootstrap_ci(
    x: &[f64],
    y: &[f64],
    n_resamples: u32,
    level: f64,
    seed: u64,
) -> Result<CorrelationResult> {
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "bootstrap needs at least 3 points, got {}",
            x.len()
        )));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidConfig(format!("level {level} outside (0, 1)")));
    }
    if n_resamples == 0 {
        return Err(Error::InvalidConfig("need at least one resample".into()));
    }
    let rho = spearman_rho(x, y)?;
    let n = x.len();
    let mut rhos = Vec::with_capacity(n_resamples as usize);
    let mut excluded = 0u32;
    let mut bx = vec![0.0; n];
    let mut by = vec![0.0; n];
    for b in 0..n_resamples {
        let mut rng = rng::stream(seed, StreamTag::Bootstrap, b as u64);
        let mut kept = None;
        for _ in 0..BOOTSTRAP_RETRY_CAP {
            for t in 0..n {
                let idx = rng::uniform_index(&mut rng, n);
                bx[t] = x[idx];
                by[t] = y[idx];
            }
            if let Ok(r) = spearman_rho(&bx, &by) {
                kept = Some(r);
                break;
            }
        }
        match kept {
            Some(r) => rhos.push(r),
            None => excluded += 1,
        }
    }
    if rhos.is_empty() {
        return Err(Error::Undefined(
            "every bootstrap resample had undefined correlation".into(),
        ));
    }
    rhos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = 1.0 - level;
    Ok(CorrelationResult {
        rho,
        ci_low: describe::quantile_sorted(&rhos, alpha / 2.0),
        ci_high: describe::quantile_sorted(&rhos, 1.0 - alpha / 2.0),
        n_resamples,
        excluded_resamples: excluded,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DwellGrouping {
    /// Correlate t_qpu against objective across repeats inside each cell.
    WithinCell,
    /// Correlate per-cell means across cells at fixed (solver, n).
    CrossCell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DwellClass {
    BelowZero,
    AboveZero,
    StraddlesZero,
    /// Constant inputs (deterministic cell) or too few points.
    Undefined,
}

impl DwellClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            DwellClass::BelowZero => "below_zero",
            DwellClass::AboveZero => "above_zero",
            DwellClass::StraddlesZero => "straddles_zero",
            DwellClass::Undefined => "undefined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DwellRow {
    pub group_key: String,
    /// Number of correlation points in the group.
    pub n: usize,
    pub rho: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub classification: DwellClass,
}

/// Correlates service dwell time against solution quality. Groups with
/// fewer than 3 usable points or constant columns are kept as undefined
/// rows rather than dropped, so deterministic cells stay visible.
pub fn dwell_quality_table(
    records: &[RunRecord],
    grouping: DwellGrouping,
    n_resamples: u32,
    level: f64,
    seed: u64,
) -> Result<Vec<DwellRow>> {
    use std::collections::BTreeMap;

    // (group key, points) in canonical order.
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    match grouping {
        DwellGrouping::WithinCell => {
            for r in records {
                let (Some(t_qpu), objective) = (r.t_qpu_s, r.objective_value) else {
                    continue;
                };
                let key = cell_key_of(r).to_string();
                groups.entry(key).or_default().push((t_qpu, objective));
            }
        }
        DwellGrouping::CrossCell => {
            // First average per full cell, then group those means by (solver, n).
            let mut cells: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
            let mut cell_to_group: BTreeMap<String, String> = BTreeMap::new();
            for r in records {
                let Some(t_qpu) = r.t_qpu_s else { continue };
                let key = cell_key_of(r).to_string();
                cell_to_group
                    .entry(key.clone())
                    .or_insert_with(|| format!("{}|n{:03}", r.solver_name, r.n));
                cells.entry(key).or_default().push((t_qpu, r.objective_value));
            }
            for (cell, pts) in cells {
                let mt = describe::mean(&pts.iter().map(|p| p.0).collect::<Vec<_>>());
                let mo = describe::mean(&pts.iter().map(|p| p.1).collect::<Vec<_>>());
                let group = cell_to_group[&cell].clone();
                groups.entry(group).or_default().push((mt, mo));
            }
        }
    }

    let mut rows = Vec::new();
    for (key, pts) in groups {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let row = if pts.len() < 3 {
            DwellRow {
                group_key: key,
                n: pts.len(),
                rho: None,
                ci_low: None,
                ci_high: None,
                classification: DwellClass::Undefined,
            }
        } else {
            match bootstrap_ci(&xs, &ys, n_resamples, level, seed) {
                Ok(ci) => {
                    let classification = if ci.ci_high < 0.0 {
                        DwellClass::BelowZero
                    } else if ci.ci_low > 0.0 {
                        DwellClass::AboveZero
                    } else {
                        DwellClass::StraddlesZero
                    };
                    DwellRow {
                        group_key: key,
                        n: pts.len(),
                        rho: Some(ci.rho),
                        ci_low: Some(ci.ci_low),
                        ci_high: Some(ci.ci_high),
                        classification,
                    }
                }
                Err(_) => DwellRow {
                    group_key: key,
                    n: pts.len(),
                    rho: None,
                    ci_low: None,
                    ci_high: None,
                    classification: DwellClass::Undefined,
                },
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

/// CSV rendering with columns group_key,n,rho,ci_low,ci_high,classification.
pub fn dwell_table_csv(rows: &[DwellRow]) -> String {
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("group_key,n,rho,ci_low,ci_high,classification\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.group_key,
            r.n,
            fmt(r.rho),
            fmt(r.ci_low),
            fmt(r.ci_high),
            r.classification.as_str()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    #[test]
    fn paired_sample_labels_and_delegation() {
        let pairs = vec![(1.0, 2.0), (3.0, 2.5), (0.0, 0.5), (4.0, 4.1), (2.0, 2.2), (1.1, 1.4)];
        let sample = super::PairedSample::new("sa", "tabu", pairs.clone()).unwrap();
        assert_eq!(sample.label_a, "sa");
        let via_sample = sample.wilcoxon(super::Alternative::TwoSided).unwrap();
        let direct = super::wilcoxon_signed_rank(&pairs, super::Alternative::TwoSided).unwrap();
        assert_eq!(via_sample.w_statistic, direct.w_statistic);
        assert_eq!(via_sample.p_value, direct.p_value);
        assert!(super::PairedSample::new("a", "b", vec![]).is_err());
    }

    use super::*;

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 3.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(average_ranks(&[5.0, 1.0, 3.0]), vec![3.0, 1.0, 2.0]);
        assert_eq!(average_ranks(&[2.0, 2.0, 2.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn wilcoxon_nine_uniform_wins() {
        // Nine pairs, first always smaller: one-sided p = 1/512.
        let pairs: Vec<(f64, f64)> = (0..9).map(|i| (i as f64, i as f64 + 1.0)).collect();
        let r = wilcoxon_signed_rank(&pairs, Alternative::Less).unwrap();
        assert_eq!(r.n_effective, 9);
        assert_eq!(r.w_statistic, 0.0);
        assert_eq!(r.p_value, 0.001953125);
        assert_eq!(r.method, WilcoxonMethod::Exact);
        let two = wilcoxon_signed_rank(&pairs, Alternative::TwoSided).unwrap();
        assert_eq!(two.p_value, 0.00390625);
    }

    #[test]
    fn wilcoxon_zeros_dropped() {
        // Five informative pairs plus four exact ties: p = 1/32 on n_eff = 5.
        let mut pairs: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, i as f64 + 2.0)).collect();
        pairs.extend((0..4).map(|i| (i as f64, i as f64)));
        let r = wilcoxon_signed_rank(&pairs, Alternative::Less).unwrap();
        assert_eq!(r.n_effective, 5);
        assert_eq!(r.p_value, 0.03125);
    }

    #[test]
    fn wilcoxon_all_zero_is_flagged_unit_p() {
        let pairs = vec![(1.0, 1.0), (2.0, 2.0)];
        let r = wilcoxon_signed_rank(&pairs, Alternative::Less).unwrap();
        assert_eq!(r.n_effective, 0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn wilcoxon_exact_matches_brute_force_enumeration() {
        // Independent oracle: enumerate all sign patterns directly on the
        // observed ranks, including tied magnitudes.
        let cases: Vec<Vec<(f64, f64)>> = vec![
            vec![(1.0, 2.0), (3.0, 1.5), (4.0, 4.5), (2.0, 2.5), (5.0, 4.0)],
            vec![(1.0, 2.0), (2.0, 3.0), (3.0, 3.5), (4.0, 3.5), (5.0, 5.5), (6.0, 5.5)],
            // Heavy ties in |d|.
            vec![(0.0, 1.0), (1.0, 0.0), (2.0, 3.0), (3.0, 2.0), (4.0, 5.0), (5.0, 6.0), (7.0, 6.0)],
        ];
        for pairs in cases {
            let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
            let mags: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
            let ranks = average_ranks(&mags);
            let w_obs: f64 = diffs
                .iter()
                .zip(&ranks)
                .filter(|(d, _)| **d > 0.0)
                .map(|(_, r)| r)
                .sum();
            let n = ranks.len();
            let mut le = 0u64;
            let mut ge = 0u64;
            for mask in 0u32..(1 << n) {
                let w: f64 = (0..n).filter(|i| (mask >> i) & 1 == 1).map(|i| ranks[i]).sum();
                if w <= w_obs + 1e-12 {
                    le += 1;
                }
                if w >= w_obs - 1e-12 {
                    ge += 1;
                }
            }
            let denom = (1u64 << n) as f64;
            let r_less = wilcoxon_signed_rank(&pairs, Alternative::Less).unwrap();
            let r_greater = wilcoxon_signed_rank(&pairs, Alternative::Greater).unwrap();
            assert!((r_less.p_value - le as f64 / denom).abs() < 1e-12);
            assert!((r_greater.p_value - ge as f64 / denom).abs() < 1e-12);
        }
    }

    #[test]
    fn wilcoxon_large_sample_uses_normal_approx() {
        let pairs: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let x = i as f64;
                // Alternating small wins and losses with a drift.
                (x, x + if i % 3 == 0 { -0.5 } else { 1.0 })
            })
            .collect();
        let r = wilcoxon_signed_rank(&pairs, Alternative::Less).unwrap();
        assert_eq!(r.method, WilcoxonMethod::NormalApprox);
        assert!(r.p_value > 0.0 && r.p_value < 1.0);
        // The drift favors b, so the one-sided p should be small.
        assert!(r.p_value < 0.01, "p = {}", r.p_value);
    }

    #[test]
    fn wilcoxon_approx_agrees_with_exact_near_boundary() {
        // At n = 25 both routes are available; they should roughly agree.
        let pairs: Vec<(f64, f64)> = (0..25)
            .map(|i| {
                let x = i as f64;
                (x, x + if i % 4 == 0 { -1.2 } else { 0.8 })
            })
            .collect();
        let exact = wilcoxon_signed_rank(&pairs, Alternative::Less).unwrap();
        assert_eq!(exact.method, WilcoxonMethod::Exact);
        let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
        let ranks = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
        let (p_le, _, _) = normal_tail_masses(&ranks, exact.w_statistic).unwrap();
        assert!((exact.p_value - p_le).abs() < 0.02);
    }

    #[test]
    fn spearman_frozen_example() {
        let rho = spearman_rho(&[1.0, 2.0, 3.0], &[2.0, 1.0, 3.0]).unwrap();
        assert!((rho - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spearman_monotone_and_reversed() {
        let x = [1.0, 2.0, 5.0, 9.0];
        let up = [2.0, 4.0, 5.0, 100.0];
        let down = [3.0, 1.0, 0.5, -2.0];
        assert_eq!(spearman_rho(&x, &up).unwrap(), 1.0);
        assert_eq!(spearman_rho(&x, &down).unwrap(), -1.0);
    }

    #[test]
    fn spearman_is_scale_invariant() {
        let x = [0.3, 1.8, 0.9, 2.7, 1.1];
        let y = [4.0, 1.0, 9.0, 2.0, 5.0];
        let base = spearman_rho(&x, &y).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| 100.0 * v - 7.0).collect();
        let ys: Vec<f64> = y.iter().map(|v| 0.01 * v + 3.0).collect();
        assert!((spearman_rho(&xs, &ys).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn spearman_constant_input_undefined() {
        match spearman_rho(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]) {
            Err(Error::Undefined(_)) => {}
            other => panic!("expected undefined, got {other:?}"),
        }
    }

    #[test]
    fn bootstrap_degenerate_perfect_correlation() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 4.0, 6.0, 8.0, 10.0];
        let ci = bootstrap_ci(&x, &y, 200, 0.95, 0).unwrap();
        assert_eq!(ci.rho, 1.0);
        assert_eq!(ci.ci_low, 1.0);
        assert_eq!(ci.ci_high, 1.0);
    }

    #[test]
    fn bootstrap_deterministic_in_seed() {
        let x = [1.0, 5.0, 2.0, 8.0, 3.0, 9.0, 4.0];
        let y = [2.0, 1.0, 7.0, 3.0, 9.0, 5.0, 4.0];
        let a = bootstrap_ci(&x, &y, 500, 0.95, 42).unwrap();
        let b = bootstrap_ci(&x, &y, 500, 0.95, 42).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_ci(&x, &y, 500, 0.95, 43).unwrap();
        assert!(a.ci_low != c.ci_low || a.ci_high != c.ci_high);
    }

    #[test]
    fn bootstrap_rejects_tiny_samples_and_bad_level() {
        assert!(bootstrap_ci(&[1.0, 2.0], &[1.0, 2.0], 100, 0.95, 0).is_err());
        assert!(bootstrap_ci(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 100, 1.0, 0).is_err());
        assert!(bootstrap_ci(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 0, 0.9, 0).is_err());
    }

    #[test]
    fn bootstrap_interval_covers_null_for_independent_data() {
        // 200 independent datasets of 30 points: the 95% interval should
        // contain zero most of the time. Loose bound to stay seed-robust.
        let mut covered = 0;
        for ds in 0..200u64 {
            let mut rng = rng::stream(ds, StreamTag::Bootstrap, 999);
            let x: Vec<f64> = (0..30).map(|_| rng::normal(&mut rng)).collect();
            let y: Vec<f64> = (0..30).map(|_| rng::normal(&mut rng)).collect();
            let ci = bootstrap_ci(&x, &y, 400, 0.95, ds).unwrap();
            if ci.ci_low <= 0.0 && ci.ci_high >= 0.0 {
                covered += 1;
            }
        }
        assert!(covered >= 170, "covered {covered}/200");
    }
}
