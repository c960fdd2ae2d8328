//! Financial overlay: industry return ingestion, holding-window
//! reconstruction, and risk-adjusted performance metrics.
//!
//! Selections produced by the solvers are mapped to equal-weight portfolios
//! over daily industry returns, held for the calendar month after the
//! rebalance date, and scored with annualized Sharpe, max drawdown, and the
//! probabilistic / deflated Sharpe ratios. Returns are raw (risk-free rate
//! zero throughout).

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::stats::describe;

pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Values at or below this are missing-data sentinels (-99.99, -999, ...),
/// expressed in the file's percent units.
const SENTINEL_THRESHOLD: f64 = -99.0;

/// Daily simple returns (decimal fractions) on strictly increasing dates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub label: String,
    pub dates: Vec<NaiveDate>,
    pub returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(label: impl Into<String>, dates: Vec<NaiveDate>, returns: Vec<f64>) -> Result<Self> {
        let s = ReturnSeries {
            label: label.into(),
            dates,
            returns,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dates.len() != self.returns.len() {
            return Err(Error::LengthMismatch(format!(
                "series '{}': {} dates vs {} values",
                self.label,
                self.dates.len(),
                self.returns.len()
            )));
        }
        if self.dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(format!(
                "series '{}' dates are not strictly increasing",
                self.label
            )));
        }
        if let Some(r) = self.returns.iter().find(|r| **r <= -1.0) {
            return Err(Error::InvalidConfig(format!(
                "series '{}' contains impossible return {r}",
                self.label
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn value_on(&self, date: NaiveDate) -> Option<f64> {
        self.dates
            .binary_search(&date)
            .ok()
            .map(|i| self.returns[i])
    }
}

/// Parsed daily industry panel. `dates` is the full trading calendar of the
/// file; individual series omit days where the file held a missing-value
/// sentinel, so coverage gaps surface as absent dates, never as zeros.
#[derive(Debug, Clone)]
pub struct IndustryPanel {
    /// Column order as it appeared in the file.
    pub industries: Vec<String>,
    pub series: BTreeMap<String, ReturnSeries>,
    pub dates: Vec<NaiveDate>,
}

impl IndustryPanel {
    pub fn trading_days_in_month(&self, year: i32, month: u32) -> Vec<NaiveDate> {
        self.dates
            .iter()
            .copied()
            .filter(|d| d.year() == year && d.month() == month)
            .collect()
    }
}

fn parse_yyyymmdd(field: &str) -> Option<NaiveDate> {
    let t = field.trim();
    if t.len() != 8 || !t.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let y: i32 = t[0..4].parse().ok()?;
    let m: u32 = t[4..6].parse().ok()?;
    let d: u32 = t[6..8].parse().ok()?;
    NaiveDate::from_ymd_opt(y, m, d)
}

/// Parse the daily value-weighted industry return block from the public
/// data-library CSV layout. The block is located by scanning for its
/// section header; a bare CSV with a header row and YYYYMMDD rows (as used
/// by test fixtures) parses the same way. Percent values are converted to
/// decimals and sentinel values become missing days.
pub fn parse_ff49_daily(text: &str) -> Result<IndustryPanel> {
    let lines: Vec<&str> = text.lines().collect();
    let mut start = 0usize;
    for (i, line) in lines.iter().enumerate() {
        let lower = line.to_ascii_lowercase();
        if lower.contains("average value weighted returns") && lower.contains("daily") {
            start = i + 1;
            break;
        }
    }

    // Header row: first data-bearing line after the marker whose first cell
    // is not a date and which has at least two columns.
    let mut header_idx = None;
    for (i, line) in lines.iter().enumerate().skip(start) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() >= 2 && parse_yyyymmdd(fields[0]).is_none() {
            header_idx = Some(i);
            break;
        }
        if parse_yyyymmdd(fields[0]).is_some() {
            return Err(Error::Parse {
                line: i + 1,
                msg: "data row appears before industry header row".into(),
            });
        }
    }
    let header_idx = header_idx.ok_or(Error::Parse {
        line: lines.len(),
        msg: "no industry header row found".into(),
    })?;
    let industries: Vec<String> = lines[header_idx]
        .split(',')
        .skip(1)
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if industries.is_empty() {
        return Err(Error::Parse {
            line: header_idx + 1,
            msg: "industry header row has no names".into(),
        });
    }

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut columns: Vec<Vec<(NaiveDate, f64)>> = vec![Vec::new(); industries.len()];
    let mut seen_data = false;
    for (i, line) in lines.iter().enumerate().skip(header_idx + 1) {
        if line.trim().is_empty() {
            if seen_data {
                break; // blank line terminates the section
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let date = match parse_yyyymmdd(fields[0]) {
            Some(d) => d,
            None if seen_data => break, // next section header
            None => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected YYYYMMDD date, got '{}'", fields[0].trim()),
                })
            }
        };
        if fields.len() != industries.len() + 1 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!(
                    "expected {} value columns, got {}",
                    industries.len(),
                    fields.len() - 1
                ),
            });
        }
        if let Some(prev) = dates.last() {
            if *prev >= date {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("dates not strictly increasing at {date}"),
                });
            }
        }
        for (c, field) in fields[1..].iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad numeric value '{}'", field.trim()),
            })?;
            if v <= SENTINEL_THRESHOLD {
                continue; // missing marker
            }
            let r = v / 100.0;
            if r <= -1.0 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("impossible daily return {r}"),
                });
            }
            columns[c].push((date, r));
        }
        dates.push(date);
        seen_data = true;
    }
    if dates.is_empty() {
        return Err(Error::Parse {
            line: header_idx + 1,
            msg: "no data rows in value-weighted daily section".into(),
        });
    }

    let mut series = BTreeMap::new();
    for (name, col) in industries.iter().zip(columns) {
        let (ds, rs): (Vec<_>, Vec<_>) = col.into_iter().unzip();
        series.insert(name.clone(), ReturnSeries::new(name.clone(), ds, rs)?);
    }
    Ok(IndustryPanel {
        industries,
        series,
        dates,
    })
}

pub fn load_ff49_daily(path: &Path) -> Result<IndustryPanel> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_ff49_daily(&text)
}

/// A saved selection to be held for the month after `rebalance_date`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RebalanceWindow {
    pub rebalance_date: NaiveDate,
    pub selected: Vec<String>,
    pub n: usize,
    pub config_id: String,
}

impl RebalanceWindow {
    pub fn validate(&self) -> Result<()> {
        if self.selected.is_empty() || self.selected.len() != self.n {
            return Err(Error::InvalidConfig(format!(
                "window {}: selected list has {} entries, n = {}",
                self.config_id,
                self.selected.len(),
                self.n
            )));
        }
        Ok(())
    }
}

pub fn load_windows(path: &Path) -> Result<Vec<RebalanceWindow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let w: RebalanceWindow = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        w.validate()?;
        out.push(w);
    }
    Ok(out)
}

/// Year and month of the calendar month strictly after `date`.
pub fn month_after(date: NaiveDate) -> (i32, u32) {
    if date.month() == 12 {
        (date.year() + 1, 1)
    } else {
        (date.year(), date.month() + 1)
    }
}

/// The five month-end rebalance dates of the reference campaign.
pub fn default_rebalance_dates() -> Vec<NaiveDate> {
    [
        (1927, 5, 31),
        (1951, 12, 31),
        (1976, 8, 31),
        (2001, 4, 30),
        (2025, 12, 31),
    ]
    .iter()
    .map(|&(y, m, d)| NaiveDate::from_ymd_opt(y, m, d).unwrap())
    .collect()
}

/// Equal-weight daily portfolio returns of the selected industries over the
/// calendar month after the rebalance date. Every selected industry must
/// cover every trading day of that month; a sentinel gap is a hard error,
/// never a silent zero.
pub fn reconstruct_window(panel: &IndustryPanel, window: &RebalanceWindow) -> Result<ReturnSeries> {
    window.validate()?;
    let (year, month) = month_after(window.rebalance_date);
    let days = panel.trading_days_in_month(year, month);
    if days.is_empty() {
        return Err(Error::MissingData(format!(
            "no trading days for {year}-{month:02} in panel"
        )));
    }
    let mut acc = vec![0.0f64; days.len()];
    for ind in &window.selected {
        let series = panel.series.get(ind).ok_or_else(|| {
            Error::MissingData(format!("industry '{ind}' not present in panel"))
        })?;
        for (i, day) in days.iter().enumerate() {
            match series.value_on(*day) {
                Some(v) => acc[i] += v,
                None => {
                    return Err(Error::MissingData(format!(
                        "industry '{ind}' has no return on {day}"
                    )))
                }
            }
        }
    }
    let k = window.selected.len() as f64;
    let returns: Vec<f64> = acc.into_iter().map(|s| s / k).collect();
    ReturnSeries::new(window.config_id.clone(), days, returns)
}

/// Equal-weight portfolio across all industries with data on each trading
/// day of the given month. Industries missing a day are excluded from that
/// day's average rather than imputed; a day with no data at all is an error.
pub fn one_over_n_baseline(panel: &IndustryPanel, year: i32, month: u32) -> Result<ReturnSeries> {
    let days = panel.trading_days_in_month(year, month);
    if days.is_empty() {
        return Err(Error::MissingData(format!(
            "no trading days for {year}-{month:02} in panel"
        )));
    }
    let mut returns = Vec::with_capacity(days.len());
    for day in &days {
        let mut sum = 0.0;
        let mut count = 0usize;
        for series in panel.series.values() {
            if let Some(v) = series.value_on(*day) {
                sum += v;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::MissingData(format!(
                "no industry has data on {day}"
            )));
        }
        returns.push(sum / count as f64);
    }
    ReturnSeries::new("1/N", days, returns)
}

/// Annualized Sharpe ratio: sqrt(252) * mean / sample std (divisor n-1).
pub fn sharpe_annualized(returns: &[f64]) -> Result<f64> {
    let std = describe::sample_std(returns).ok_or_else(|| {
        Error::InsufficientData(format!(
            "sharpe ratio needs 2 observations, got {}",
            returns.len()
        ))
    })?;
    if std == 0.0 {
        return Err(Error::Undefined("sharpe of a zero-variance series".into()));
    }
    Ok(TRADING_DAYS_PER_YEAR.sqrt() * describe::mean(returns) / std)
}

/// Maximum peak-to-trough drawdown of compounded wealth starting at 1.
pub fn max_drawdown(returns: &[f64]) -> f64 {
    let mut wealth = 1.0f64;
    let mut peak = 1.0f64;
    let mut mdd = 0.0f64;
    for r in returns {
        wealth *= 1.0 + r;
        peak = peak.max(wealth);
        mdd = mdd.max(1.0 - wealth / peak);
    }
    mdd
}

fn central_moments(returns: &[f64]) -> (f64, f64, f64, f64) {
    let n = returns.len() as f64;
    let mean = describe::mean(returns);
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for r in returns {
        let d = r - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    (mean, m2 / n, m3 / n, m4 / n)
}

/// Probabilistic Sharpe ratio: probability that the true per-period Sharpe
/// exceeds `sr_benchmark`, adjusting for skewness and (raw) kurtosis of the
/// observed returns. Uses the per-period (non-annualized) Sharpe with the
/// sample-std divisor n-1; moment estimators use divisor n.
pub fn psr(returns: &[f64], sr_benchmark: f64) -> Result<f64> {
    if returns.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "probabilistic sharpe ratio needs 4 observations, got {}",
            returns.len()
        )));
    }
    let n = returns.len() as f64;
    let std1 = describe::sample_std(returns).expect("len >= 4");
    if std1 == 0.0 {
        return Err(Error::Undefined("sharpe of a zero-variance series".into()));
    }
    let (mean, m2, m3, m4) = central_moments(returns);
    let sr_hat = mean / std1;
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    let disc = 1.0 - skew * sr_hat + (kurt - 1.0) / 4.0 * sr_hat * sr_hat;
    if disc <= 0.0 {
        return Err(Error::Undefined(
            "non-positive variance in sharpe deviation".into(),
        ));
    }
    let z = (sr_hat - sr_benchmark) * (n - 1.0).sqrt() / disc.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    Ok(normal.cdf(z))
}

/// Per-period (non-annualized) Sharpe of a series, as used by PSR/DSR.
pub fn sharpe_per_period(returns: &[f64]) -> Result<f64> {
    let std = describe::sample_std(returns).ok_or_else(|| {
        Error::InsufficientData(format!(
            "per-period sharpe needs 2 observations, got {}",
            returns.len()
        ))
    })?;
    if std == 0.0 {
        return Err(Error::Undefined("sharpe of a zero-variance series".into()));
    }
    Ok(describe::mean(returns) / std)
}

/// Expected maximum Sharpe under the null across `n_trials` tries, scaled
/// by the cross-trial dispersion; the deflation benchmark for DSR.
pub fn deflated_benchmark(trial_sharpes: &[f64]) -> Result<f64> {
    if trial_sharpes.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "deflated sharpe benchmark needs 2 trials, got {}",
            trial_sharpes.len()
        )));
    }
    let sd = describe::sample_std(trial_sharpes).expect("len >= 2");
    let n_t = trial_sharpes.len() as f64;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let q1 = normal.inverse_cdf(1.0 - 1.0 / n_t);
    let q2 = normal.inverse_cdf(1.0 - 1.0 / (n_t * std::f64::consts::E));
    Ok(sd * ((1.0 - EULER_GAMMA) * q1 + EULER_GAMMA * q2))
}

/// Deflated Sharpe ratio: PSR against the expected-max benchmark over the
/// trial Sharpes that were searched.
pub fn dsr(returns: &[f64], trial_sharpes: &[f64]) -> Result<f64> {
    let sr_star = deflated_benchmark(trial_sharpes)?;
    psr(returns, sr_star)
}

/// Window-level performance summary. `psr` is against the zero benchmark;
/// `dsr` deflates by the trial count. Both are absent when the respective
/// formula is undefined on the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpeReport {
    pub label: String,
    pub sharpe_annual: f64,
    pub max_drawdown: f64,
    pub psr: Option<f64>,
    pub dsr: Option<f64>,
    pub n_obs: usize,
    pub n_trials: usize,
}

pub fn sharpe_report(series: &ReturnSeries, trial_sharpes: &[f64]) -> Result<SharpeReport> {
    series.validate()?;
    let sharpe_annual = sharpe_annualized(&series.returns)?;
    let psr_v = psr(&series.returns, 0.0).ok();
    let dsr_v = if trial_sharpes.len() >= 2 {
        dsr(&series.returns, trial_sharpes).ok()
    } else {
        None
    };
    Ok(SharpeReport {
        label: series.label.clone(),
        sharpe_annual,
        max_drawdown: max_drawdown(&series.returns),
        psr: psr_v,
        dsr: dsr_v,
        n_obs: series.len(),
        n_trials: trial_sharpes.len(),
    })
}

/// One row of the five-window comparison table: annualized Sharpes of the
/// size-10/20/30 selections next to the equal-weight baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpeTableRow {
    pub window: String,
    pub qpu_n10: Option<f64>,
    pub qpu_n20: Option<f64>,
    pub qpu_n30: Option<f64>,
    pub baseline: Option<f64>,
}

pub fn sharpe_table_csv(rows: &[SharpeTableRow]) -> String {
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:+.2}")).unwrap_or_default();
    let mut out = String::from("window,qpu_n10,qpu_n20,qpu_n30,baseline\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.window,
            fmt(r.qpu_n10),
            fmt(r.qpu_n20),
            fmt(r.qpu_n30),
            fmt(r.baseline)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    /// Three industries over late May / June 1927, library layout, with a
    /// sentinel for Ccc on June 2.
    fn fixture_text() -> String {
        let mut s = String::new();
        s.push_str("This file was created from synthetic data for tests\n");
        s.push('\n');
        s.push_str("  Average Value Weighted Returns -- Daily\n");
        s.push_str(",Aaa,Bbb ,Ccc\n");
        s.push_str("19270531,  1.00, -1.00,  0.50\n");
        s.push_str("19270601,  1.23, -1.23,  0.10\n");
        s.push_str("19270602,  2.00, -2.00,-99.99\n");
        s.push_str("19270603, -0.50,  0.50,  0.20\n");
        s.push_str("19270701,  0.10,  0.10,  0.10\n");
        s.push('\n');
        s.push_str("  Average Equal Weighted Returns -- Daily\n");
        s.push_str(",Aaa,Bbb,Ccc\n");
        s.push_str("19270531, 99.0, 99.0, 99.0\n");
        s
    }

    fn fixture_panel() -> IndustryPanel {
        parse_ff49_daily(&fixture_text()).unwrap()
    }

    #[test]
    fn parse_converts_percents_and_sentinels() {
        let panel = fixture_panel();
        assert_eq!(panel.industries, vec!["Aaa", "Bbb", "Ccc"]);
        assert_eq!(panel.dates.len(), 5);
        let aaa = &panel.series["Aaa"];
        assert!((aaa.value_on(date(1927, 6, 1)).unwrap() - 0.0123).abs() < 1e-12);
        // Sentinel day is absent from the series, not zero.
        let ccc = &panel.series["Ccc"];
        assert_eq!(ccc.value_on(date(1927, 6, 2)), None);
        assert_eq!(ccc.len(), 4);
        // The equal-weighted section below the blank line is not ingested.
        assert!((aaa.value_on(date(1927, 5, 31)).unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn parse_without_marker_accepts_bare_csv() {
        let bare = "\
,Aaa,Bbb
19270601, 1.00, 2.00
19270602, 0.50, 0.25
";
        let panel = parse_ff49_daily(bare).unwrap();
        assert_eq!(panel.industries.len(), 2);
        assert_eq!(panel.dates.len(), 2);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let bad = "\
,Aaa,Bbb
19270601, 1.00, 2.00
19270602, 1.00, oops
";
        match parse_ff49_daily(bad) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("oops"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let short = "\
,Aaa,Bbb
19270601, 1.00
";
        assert!(matches!(
            parse_ff49_daily(short),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn month_after_rolls_over_year_end() {
        assert_eq!(month_after(date(1927, 5, 31)), (1927, 6));
        assert_eq!(month_after(date(1951, 12, 31)), (1952, 1));
        assert_eq!(month_after(date(1927, 5, 1)), (1927, 6));
    }

    fn window(selected: &[&str]) -> RebalanceWindow {
        RebalanceWindow {
            rebalance_date: date(1927, 5, 31),
            selected: selected.iter().map(|s| s.to_string()).collect(),
            n: selected.len(),
            config_id: "test-config".into(),
        }
    }

    #[test]
    fn reconstruct_spans_the_following_month_only() {
        let panel = fixture_panel();
        let series = reconstruct_window(&panel, &window(&["Aaa"])).unwrap();
        assert_eq!(
            series.dates,
            vec![date(1927, 6, 1), date(1927, 6, 2), date(1927, 6, 3)]
        );
        assert!((series.returns[0] - 0.0123).abs() < 1e-12);
    }

    #[test]
    fn reconstruct_averages_selected_industries() {
        let panel = fixture_panel();
        // Aaa and Bbb are mirror images: the mean is zero every day.
        let series = reconstruct_window(&panel, &window(&["Aaa", "Bbb"])).unwrap();
        for r in &series.returns {
            assert!(r.abs() < 1e-15);
        }
    }

    #[test]
    fn reconstruct_errors_on_gaps() {
        let panel = fixture_panel();
        // Ccc has a sentinel on June 2.
        match reconstruct_window(&panel, &window(&["Aaa", "Ccc"])) {
            Err(Error::MissingData(msg)) => assert!(msg.contains("Ccc")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            reconstruct_window(&panel, &window(&["Nope"])),
            Err(Error::MissingData(_))
        ));
        let mut w = window(&["Aaa"]);
        w.n = 2;
        assert!(matches!(
            reconstruct_window(&panel, &w),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn reconstruction_is_linear_in_the_selection() {
        let panel = fixture_panel();
        let a = reconstruct_window(&panel, &window(&["Aaa"])).unwrap();
        let b = reconstruct_window(&panel, &window(&["Bbb"])).unwrap();
        let ab = reconstruct_window(&panel, &window(&["Aaa", "Bbb"])).unwrap();
        for i in 0..ab.len() {
            assert!((ab.returns[i] - 0.5 * (a.returns[i] + b.returns[i])).abs() < 1e-15);
        }
    }

    #[test]
    fn baseline_uses_available_industries_per_day() {
        let panel = fixture_panel();
        let series = one_over_n_baseline(&panel, 1927, 6).unwrap();
        assert_eq!(series.len(), 3);
        // June 2: Ccc is missing, so the mean is over Aaa and Bbb only.
        assert!((series.returns[1] - (0.02 + -0.02) / 2.0).abs() < 1e-15);
        // June 1: all three present.
        assert!((series.returns[0] - (0.0123 - 0.0123 + 0.001) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn baseline_on_single_industry_panel_is_that_industry() {
        let bare = "\
,Solo
19270601, 1.00
19270602, 0.50
";
        let panel = parse_ff49_daily(bare).unwrap();
        let series = one_over_n_baseline(&panel, 1927, 6).unwrap();
        assert_eq!(series.returns, panel.series["Solo"].returns);
    }

    #[test]
    fn sharpe_formula_and_edge_cases() {
        // Alternating +-1%: mean zero, so Sharpe is zero.
        let alt: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 0.01 } else { -0.01 }).collect();
        assert!(sharpe_annualized(&alt).unwrap().abs() < 1e-15);

        let r = vec![0.01, 0.02, 0.03, 0.04];
        let mean = 0.025;
        let std = describe::sample_std(&r).unwrap();
        let expect = 252_f64.sqrt() * mean / std;
        assert!((sharpe_annualized(&r).unwrap() - expect).abs() < 1e-12);

        assert!(matches!(
            sharpe_annualized(&[0.01]),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            sharpe_annualized(&[0.01; 5]),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn sharpe_is_scale_invariant() {
        let r = vec![0.01, -0.004, 0.02, 0.013, -0.007];
        let base = sharpe_annualized(&r).unwrap();
        let scaled: Vec<f64> = r.iter().map(|x| 3.5 * x).collect();
        assert!((sharpe_annualized(&scaled).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn drawdown_cases() {
        assert_eq!(max_drawdown(&[0.01, 0.02, 0.005, 0.03]), 0.0);
        assert!((max_drawdown(&[-0.10]) - 0.10).abs() < 1e-15);
        // Trough is measured against the post-gain peak.
        assert!((max_drawdown(&[0.10, -0.10]) - 0.10).abs() < 1e-15);
        let r = vec![0.5, -0.5, 0.99, -0.9];
        let d = max_drawdown(&r);
        assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn psr_at_own_sharpe_is_half() {
        let r = vec![0.012, -0.003, 0.007, 0.001, -0.009, 0.015, 0.004];
        let sr_hat = sharpe_per_period(&r).unwrap();
        assert_eq!(psr(&r, sr_hat).unwrap(), 0.5);
    }

    #[test]
    fn psr_matches_direct_formula() {
        let r = vec![
            0.011, -0.002, 0.004, 0.009, -0.006, 0.013, 0.001, -0.004, 0.008, 0.002,
        ];
        let got = psr(&r, 0.0).unwrap();

        // Independent evaluation of the closed form.
        let n = r.len() as f64;
        let mean = r.iter().sum::<f64>() / n;
        let var1 = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let sr = mean / var1.sqrt();
        let m2 = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m3 = r.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
        let m4 = r.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2);
        let z = sr * (n - 1.0).sqrt() / (1.0 - skew * sr + (kurt - 1.0) / 4.0 * sr * sr).sqrt();
        let expect = Normal::new(0.0, 1.0).unwrap().cdf(z);
        assert!((got - expect).abs() < 1e-15);
        assert!((0.0..=1.0).contains(&got));
    }

    #[test]
    fn psr_increases_as_benchmark_falls() {
        let r = vec![0.01, 0.002, -0.004, 0.013, 0.006, -0.001, 0.009, 0.003];
        let lo = psr(&r, -0.5).unwrap();
        let mid = psr(&r, 0.0).unwrap();
        let hi = psr(&r, 0.5).unwrap();
        assert!(lo > mid && mid > hi);
    }

    #[test]
    fn psr_needs_four_observations() {
        assert!(matches!(
            psr(&[0.01, 0.02, 0.03], 0.0),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn dsr_benchmark_behavior() {
        let r = vec![0.01, 0.002, -0.004, 0.013, 0.006, -0.001, 0.009, 0.003];
        // Identical trials carry zero dispersion: benchmark 0, DSR = PSR(0).
        let equal = vec![0.3; 6];
        assert!((deflated_benchmark(&equal).unwrap()).abs() < 1e-15);
        assert_eq!(dsr(&r, &equal).unwrap(), psr(&r, 0.0).unwrap());

        // Dispersed trials raise the benchmark and deflate the probability.
        let spread = vec![0.1, 0.5, -0.2, 0.3, 0.0, 0.6];
        assert!(deflated_benchmark(&spread).unwrap() > 0.0);
        assert!(dsr(&r, &spread).unwrap() < psr(&r, 0.0).unwrap());

        // Two equal trials still work: the std factor zeroes everything.
        assert!((deflated_benchmark(&[0.4, 0.4]).unwrap()).abs() < 1e-15);
        assert!(matches!(
            deflated_benchmark(&[0.4]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn sharpe_report_assembles_all_metrics() {
        let series = ReturnSeries::new(
            "w0",
            (1..=8).map(|d| date(1927, 6, d)).collect(),
            vec![0.01, 0.002, -0.004, 0.013, 0.006, -0.001, 0.009, 0.003],
        )
        .unwrap();
        let report = sharpe_report(&series, &[0.1, 0.5, -0.2, 0.3, 0.0, 0.6]).unwrap();
        assert_eq!(report.n_obs, 8);
        assert_eq!(report.n_trials, 6);
        assert!(report.psr.unwrap() > report.dsr.unwrap());
        assert!((0.0..=1.0).contains(&report.max_drawdown));
    }

    #[test]
    fn table_csv_layout() {
        let rows = vec![SharpeTableRow {
            window: "0 (1927-05-31)".into(),
            qpu_n10: Some(1.41),
            qpu_n20: None,
            qpu_n30: Some(-0.5),
            baseline: Some(-1.21),
        }];
        let csv = sharpe_table_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "window,qpu_n10,qpu_n20,qpu_n30,baseline");
        assert_eq!(lines.next().unwrap(), "0 (1927-05-31),+1.41,,-0.50,-1.21");
    }

    #[test]
    fn windows_jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("windows.jsonl");
        let w = window(&["Aaa", "Bbb"]);
        std::fs::write(&path, format!("{}\n", serde_json::to_string(&w).unwrap())).unwrap();
        assert_eq!(load_windows(&path).unwrap(), vec![w]);
    }

    #[test]
    fn five_default_windows() {
        let dates = default_rebalance_dates();
        assert_eq!(dates.len(), 5);
        assert_eq!(dates[0], date(1927, 5, 31));
        assert_eq!(month_after(dates[4]), (2026, 1));
    }
}
