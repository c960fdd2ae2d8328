//! Operational audit of solver run records.
//!
//! Ingests JSONL run telemetry, computes the per-cell metrics (QPU wall-clock
//! share, anchored optimality gap, encoding density amplification, repeat
//! variance) and evaluates the seven-point reporting checklist. Reports are
//! deterministic: the same input file always yields byte-identical output.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::encoding::SupportReport;
use crate::error::{Error, Result};
use crate::instances::Family;
use crate::stats::describe;

/// One solver run. Core identity fields are required; timing, feasibility
/// and provenance fields are optional at the schema level so that their
/// absence can be surfaced by the checklist instead of crashing ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub problem_id: String,
    pub solver_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_identity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub campaign_start: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub campaign_end: Option<NaiveDate>,
    pub n: usize,
    pub family: Family,
    pub seed: u64,
    pub k: usize,
    /// Nominal per-run budget; cell key component after normalization.
    pub budget_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_run_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_charge_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_qpu_s: Option<f64>,
    pub objective_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible_raw: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible_post: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl Default for RunRecord {
    fn default() -> Self {
        RunRecord {
            schema_version: crate::SCHEMA_VERSION,
            problem_id: String::new(),
            solver_name: String::new(),
            solver_identity: None,
            campaign_start: None,
            campaign_end: None,
            n: 0,
            family: Family::Diagonal,
            seed: 0,
            k: 0,
            budget_s: 0.0,
            t_run_s: None,
            t_charge_s: None,
            t_qpu_s: None,
            objective_value: 0.0,
            feasible_raw: None,
            feasible_post: None,
            z: None,
            extra: BTreeMap::new(),
        }
    }
}

/// Unit of the vendor timing fields. Never auto-detected: microsecond
/// inputs must be declared explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Seconds,
    Microseconds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedRecord {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordFlag {
    pub record_index: usize,
    pub problem_id: String,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct Ingest {
    pub records: Vec<RunRecord>,
    pub rejected: Vec<RejectedRecord>,
    /// Internally inconsistent but retained records (e.g. t_qpu > t_run).
    pub flags: Vec<RecordFlag>,
}

/// Round a budget to the 3-decimal cell grid.
pub fn normalize_budget(budget_s: f64) -> f64 {
    (budget_s * 1000.0).round() / 1000.0
}

/// Parse a JSONL run file. A line that is not valid JSON is a hard error
/// with its line number; a JSON object that fails the record schema is
/// rejected with a reason and ingestion continues. Timing fields are
/// converted to seconds per `unit`, budgets are normalized to the cell
/// grid, and impossible timings are flagged but retained.
pub fn ingest_runs(path: &Path, unit: TimeUnit) -> Result<Ingest> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Ingest::default();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
        match serde_json::from_value::<RunRecord>(value) {
            Ok(mut rec) => {
                let scale = match unit {
                    TimeUnit::Seconds => 1.0,
                    TimeUnit::Microseconds => 1e-6,
                };
                for t in [&mut rec.t_run_s, &mut rec.t_charge_s, &mut rec.t_qpu_s] {
                    if let Some(v) = t.as_mut() {
                        *v *= scale;
                    }
                }
                rec.budget_s = normalize_budget(rec.budget_s);
                let index = out.records.len();
                if let (Some(t_qpu), Some(t_run)) = (rec.t_qpu_s, rec.t_run_s) {
                    if t_qpu > t_run {
                        out.flags.push(RecordFlag {
                            record_index: index,
                            problem_id: rec.problem_id.clone(),
                            reason: format!("t_qpu_s {t_qpu} exceeds t_run_s {t_run}"),
                        });
                    }
                }
                if let Some(t_run) = rec.t_run_s {
                    if t_run <= 0.0 {
                        out.flags.push(RecordFlag {
                            record_index: index,
                            problem_id: rec.problem_id.clone(),
                            reason: format!("t_run_s {t_run} is not positive"),
                        });
                    }
                }
                out.records.push(rec);
            }
            Err(e) => out.rejected.push(RejectedRecord {
                line: lineno,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

pub fn save_runs(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut buf = String::new();
    for r in records {
        buf.push_str(&serde_json::to_string(r)?);
        buf.push('\n');
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Wall-clock share of QPU time: t_qpu / t_run.
pub fn metric_r_qpu(rec: &RunRecord) -> Result<f64> {
    let t_run = rec
        .t_run_s
        .ok_or_else(|| Error::RecordRejected(format!("{}: t_run_s absent", rec.problem_id)))?;
    let t_qpu = rec
        .t_qpu_s
        .ok_or_else(|| Error::RecordRejected(format!("{}: t_qpu_s absent", rec.problem_id)))?;
    if t_run <= 0.0 {
        return Err(Error::RecordRejected(format!(
            "{}: t_run_s {t_run} is not positive",
            rec.problem_id
        )));
    }
    if t_qpu < 0.0 {
        return Err(Error::RecordRejected(format!(
            "{}: t_qpu_s {t_qpu} is negative",
            rec.problem_id
        )));
    }
    Ok(t_qpu / t_run)
}

/// Regularized optimality gap (f_s - f_star) / max(1, |f_star|).
pub fn metric_g_f(f_s: f64, f_star: f64) -> f64 {
    (f_s - f_star) / f_star.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VService {
    Ok { value: f64, count: usize },
    /// Fewer than 10 repeats: variance is not reported.
    Insufficient { count: usize },
}

/// Sample variance (divisor n-1) of repeated objectives, requiring at least
/// 10 repeats before reporting a number.
pub fn metric_v_service(objectives: &[f64]) -> VService {
    if objectives.len() < 10 {
        return VService::Insufficient {
            count: objectives.len(),
        };
    }
    VService::Ok {
        value: describe::sample_variance(objectives).expect("len >= 10"),
        count: objectives.len(),
    }
}

/// Cell identity: problem size, family, normalized budget, solver.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellKey {
    pub n: usize,
    pub family: Family,
    /// Budget in integer milliseconds (3-decimal grid).
    pub budget_milli_s: i64,
    pub solver_name: String,
}

impl CellKey {
    pub fn budget_s(&self) -> f64 {
        self.budget_milli_s as f64 / 1000.0
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n{:03}|{}|b{:.3}|{}",
            self.n,
            self.family,
            self.budget_s(),
            self.solver_name
        )
    }
}

pub fn cell_key_of(rec: &RunRecord) -> CellKey {
    CellKey {
        n: rec.n,
        family: rec.family,
        budget_milli_s: (normalize_budget(rec.budget_s) * 1000.0).round() as i64,
        solver_name: rec.solver_name.clone(),
    }
}

/// Group records into audit cells in canonical key order.
pub fn group_cells(records: &[RunRecord]) -> BTreeMap<CellKey, Vec<usize>> {
    let mut map: BTreeMap<CellKey, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        map.entry(cell_key_of(r)).or_default().push(i);
    }
    map
}

/// Anchor objective for a problem, with provenance metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub problem_id: String,
    pub f_star: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_solver: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_wall_clock_s: Option<f64>,
}

pub fn load_anchors(path: &Path) -> Result<BTreeMap<String, Anchor>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut map = BTreeMap::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let a: Anchor = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        map.insert(a.problem_id.clone(), a);
    }
    Ok(map)
}

/// Which encoding pipeline a solver's records went through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Penalty,
    Native,
    Exact,
    Unknown,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Formulation::Penalty => "penalty",
            Formulation::Native => "native",
            Formulation::Exact => "exact",
            Formulation::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// Classify a solver name by naming convention; used to decide which
/// checklist obligations apply to its records.
pub fn classify_formulation(solver_name: &str) -> Formulation {
    let s = solver_name.to_ascii_lowercase();
    if s.contains("penalty") || s.contains("bqm") || s.contains("qubo") {
        Formulation::Penalty
    } else if s.contains("native") || s.contains("cqm") || s.contains("constrained") {
        Formulation::Native
    } else if s.contains("exact") || s.contains("oracle") || s.contains("gurobi") || s.contains("miqp") {
        Formulation::Exact
    } else {
        Formulation::Unknown
    }
}

/// Support analysis attached to a problem/formulation pair, as exchanged in
/// encodings JSONL files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingInfo {
    pub problem_id: String,
    pub formulation: Formulation,
    #[serde(flatten)]
    pub support: SupportReport,
}

pub fn load_encodings(path: &Path) -> Result<Vec<EncodingInfo>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let e: EncodingInfo = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        out.push(e);
    }
    Ok(out)
}

fn ser_opt_damp<S: serde::Serializer>(
    v: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(x) if x.is_infinite() => s.serialize_str("inf"),
        Some(x) => s.serialize_f64(*x),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditCell {
    pub n: usize,
    pub family: Family,
    pub budget_s: f64,
    pub solver_name: String,
    pub count: usize,
    /// Mean of per-record t_qpu/t_run ratios.
    pub r_qpu_mean_of_ratios: Option<f64>,
    /// sum(t_qpu) / sum(t_run); reported alongside, never silently swapped.
    pub r_qpu_ratio_of_means: Option<f64>,
    pub r_qpu_iqr: Option<f64>,
    /// Records whose ratio could not be computed.
    pub r_qpu_missing: usize,
    pub g_f_mean: Option<f64>,
    pub g_f_median: Option<f64>,
    pub g_f_std: Option<f64>,
    /// Records with an anchored gap.
    pub g_f_count: usize,
    #[serde(serialize_with = "ser_opt_damp")]
    pub d_amp_mean: Option<f64>,
    pub d_amp_count: usize,
    pub v_service: VService,
    pub flagged: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChecklistItem {
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

impl ChecklistItem {
    fn pass() -> Self {
        ChecklistItem {
            verdict: Verdict::Pass,
            reasons: Vec::new(),
        }
    }

    fn of(verdict: Verdict, mut reasons: Vec<String>) -> Self {
        reasons.sort();
        reasons.dedup();
        // Keep reports readable when thousands of records misbehave.
        if reasons.len() > 8 {
            let extra = reasons.len() - 8;
            reasons.truncate(8);
            reasons.push(format!("... and {extra} more"));
        }
        ChecklistItem { verdict, reasons }
    }
}

/// Reporting checklist verdicts. Field names follow the protocol items:
/// timing completeness, dispersion, anchoring, encoding disclosure,
/// feasibility disclosure, repeat count, provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checklist {
    #[serde(rename = "P1")]
    pub p1_timing_fields: ChecklistItem,
    #[serde(rename = "P2")]
    pub p2_ratio_dispersion: ChecklistItem,
    #[serde(rename = "P3")]
    pub p3_anchor: ChecklistItem,
    #[serde(rename = "P4")]
    pub p4_encoding_reports: ChecklistItem,
    #[serde(rename = "P5")]
    pub p5_feasibility_flags: ChecklistItem,
    #[serde(rename = "P6")]
    pub p6_repeats: ChecklistItem,
    #[serde(rename = "P7")]
    pub p7_provenance: ChecklistItem,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub schema_version: u32,
    /// Latest campaign_end across records; input-derived so that identical
    /// inputs produce byte-identical reports.
    pub generated_at: Option<NaiveDate>,
    pub cells: Vec<AuditCell>,
    pub checklist: Checklist,
    pub caveats: Vec<String>,
}

fn fixed_caveats() -> Vec<String> {
    vec![
        "r_QPU bounds the wall-clock share of the quantum processor; it does not measure causal contribution to solution quality.".into(),
        "Timing fields are client-side observations; queueing and transport latency are not separated out.".into(),
        "Solver identity is self-reported at submission time; service-side version drift within the campaign window is invisible to this audit.".into(),
    ]
}

/// Assemble the deterministic audit report from ingested records, optional
/// per-problem anchors, and encoding support reports.
pub fn build_audit_report(
    ingest: &Ingest,
    anchors: &BTreeMap<String, Anchor>,
    encodings: &[EncodingInfo],
) -> AuditReport {
    let records = &ingest.records;
    let cells = group_cells(records);

    let mut enc_by_problem: BTreeMap<(&str, Formulation), &EncodingInfo> = BTreeMap::new();
    for e in encodings {
        enc_by_problem.insert((e.problem_id.as_str(), e.formulation), e);
    }
    let flagged_indices: std::collections::BTreeSet<usize> =
        ingest.flags.iter().map(|f| f.record_index).collect();

    let mut out_cells = Vec::with_capacity(cells.len());
    let mut p2_fail = Vec::new();
    let mut p3_warn = Vec::new();
    let mut p6_warn = Vec::new();
    for (key, idxs) in &cells {
        let members: Vec<&RunRecord> = idxs.iter().map(|&i| &records[i]).collect();
        let formulation = classify_formulation(&key.solver_name);

        let mut ratios = Vec::new();
        let mut sum_qpu = 0.0;
        let mut sum_run = 0.0;
        let mut missing = 0usize;
        for r in &members {
            match metric_r_qpu(r) {
                Ok(v) => {
                    ratios.push(v);
                    sum_qpu += r.t_qpu_s.unwrap();
                    sum_run += r.t_run_s.unwrap();
                }
                Err(_) => missing += 1,
            }
        }
        let (mean_of_ratios, ratio_of_means, iqr) = if ratios.is_empty() {
            (None, None, None)
        } else {
            (
                Some(describe::mean(&ratios)),
                (sum_run > 0.0).then(|| sum_qpu / sum_run),
                Some(describe::iqr(&ratios)),
            )
        };
        if ratios.len() < 2 {
            p2_fail.push(format!("cell {key} has {} usable ratios", ratios.len()));
        }

        let gaps: Vec<f64> = members
            .iter()
            .filter_map(|r| {
                anchors
                    .get(&r.problem_id)
                    .map(|a| metric_g_f(r.objective_value, a.f_star))
            })
            .collect();
        if gaps.is_empty() {
            p3_warn.push(format!("cell {key} has no anchored reference objective"));
        }
        let (g_mean, g_median, g_std) = if gaps.is_empty() {
            (None, None, None)
        } else {
            (
                Some(describe::mean(&gaps)),
                Some(describe::median(&gaps)),
                describe::sample_std(&gaps),
            )
        };

        let damps: Vec<f64> = members
            .iter()
            .filter_map(|r| {
                enc_by_problem
                    .get(&(r.problem_id.as_str(), formulation))
                    .map(|e| e.support.d_amp)
            })
            .collect();
        let d_amp_mean = if damps.is_empty() {
            None
        } else if damps.iter().any(|d| d.is_infinite()) {
            Some(f64::INFINITY)
        } else {
            Some(describe::mean(&damps))
        };

        let objectives: Vec<f64> = members.iter().map(|r| r.objective_value).collect();
        if objectives.len() < 10 {
            p6_warn.push(format!(
                "cell {key} has {} repeats, need 10",
                objectives.len()
            ));
        }
        let flagged = idxs.iter().filter(|i| flagged_indices.contains(i)).count();

        out_cells.push(AuditCell {
            n: key.n,
            family: key.family,
            budget_s: key.budget_s(),
            solver_name: key.solver_name.clone(),
            count: members.len(),
            r_qpu_mean_of_ratios: mean_of_ratios,
            r_qpu_ratio_of_means: ratio_of_means,
            r_qpu_iqr: iqr,
            r_qpu_missing: missing,
            g_f_mean: g_mean,
            g_f_median: g_median,
            g_f_std: g_std,
            g_f_count: gaps.len(),
            d_amp_mean,
            d_amp_count: damps.len(),
            v_service: metric_v_service(&objectives),
            flagged,
        });
    }

    // P1: timing fields present on every record; flagged timings only warn.
    let mut p1_missing = Vec::new();
    for r in records {
        let mut absent = Vec::new();
        if r.t_run_s.is_none() {
            absent.push("t_run_s");
        }
        if r.t_charge_s.is_none() {
            absent.push("t_charge_s");
        }
        if r.t_qpu_s.is_none() {
            absent.push("t_qpu_s");
        }
        if !absent.is_empty() {
            p1_missing.push(format!("{} missing {}", r.problem_id, absent.join("+")));
        }
    }
    let p1 = if !p1_missing.is_empty() {
        ChecklistItem::of(Verdict::Fail, p1_missing)
    } else if !ingest.flags.is_empty() {
        ChecklistItem::of(
            Verdict::Warn,
            ingest.flags.iter().map(|f| format!("{}: {}", f.problem_id, f.reason)).collect(),
        )
    } else {
        ChecklistItem::pass()
    };

    let p2 = if p2_fail.is_empty() {
        ChecklistItem::pass()
    } else {
        ChecklistItem::of(Verdict::Fail, p2_fail)
    };

    // P3: anchors must exist and carry solver + wall-clock provenance.
    let mut p3_reasons = p3_warn;
    for a in anchors.values() {
        if a.anchor_solver.is_none() || a.anchor_wall_clock_s.is_none() {
            p3_reasons.push(format!(
                "anchor for {} lacks solver or wall-clock metadata",
                a.problem_id
            ));
        }
    }
    let p3 = if p3_reasons.is_empty() {
        ChecklistItem::pass()
    } else {
        ChecklistItem::of(Verdict::Warn, p3_reasons)
    };

    // P4: every encoded formulation seen in the records needs a support report.
    let mut p4_reasons = Vec::new();
    let mut p4_verdict = Verdict::Pass;
    for r in records {
        let f = classify_formulation(&r.solver_name);
        match f {
            Formulation::Penalty | Formulation::Native => {
                if !enc_by_problem.contains_key(&(r.problem_id.as_str(), f)) {
                    p4_verdict = Verdict::Fail;
                    p4_reasons.push(format!(
                        "no {f} encoding report for {}",
                        r.problem_id
                    ));
                }
            }
            Formulation::Exact => {}
            Formulation::Unknown => {
                if p4_verdict == Verdict::Pass {
                    p4_verdict = Verdict::Warn;
                }
                p4_reasons.push(format!(
                    "solver '{}' has no recognizable formulation",
                    r.solver_name
                ));
            }
        }
    }
    let p4 = if p4_reasons.is_empty() {
        ChecklistItem::pass()
    } else {
        ChecklistItem::of(p4_verdict, p4_reasons)
    };

    // P5: penalty-path records must disclose pre- and post-repair feasibility.
    let mut p5_reasons = Vec::new();
    for r in records {
        if classify_formulation(&r.solver_name) == Formulation::Penalty
            && (r.feasible_raw.is_none() || r.feasible_post.is_none())
        {
            p5_reasons.push(format!("{} lacks feasibility flags", r.problem_id));
        }
    }
    let p5 = if p5_reasons.is_empty() {
        ChecklistItem::pass()
    } else {
        ChecklistItem::of(Verdict::Fail, p5_reasons)
    };

    let p6 = if p6_warn.is_empty() {
        ChecklistItem::pass()
    } else {
        ChecklistItem::of(Verdict::Warn, p6_warn)
    };

    let mut p7_reasons = Vec::new();
    for r in records {
        if r.solver_identity.is_none() {
            p7_reasons.push(format!("{} lacks solver identity", r.problem_id));
        }
        if r.campaign_start.is_none() || r.campaign_end.is_none() {
            p7_reasons.push(format!("{} lacks campaign window", r.problem_id));
        }
    }
    let p7 = if p7_reasons.is_empty() {
        ChecklistItem::pass()
    } else {
        ChecklistItem::of(Verdict::Fail, p7_reasons)
    };

    let generated_at = records.iter().filter_map(|r| r.campaign_end).max();

    AuditReport {
        schema_version: crate::SCHEMA_VERSION,
        generated_at,
        cells: out_cells,
        checklist: Checklist {
            p1_timing_fields: p1,
            p2_ratio_dispersion: p2,
            p3_anchor: p3,
            p4_encoding_reports: p4,
            p5_feasibility_flags: p5,
            p6_repeats: p6,
            p7_provenance: p7,
        },
        caveats: fixed_caveats(),
    }
}

/// Flat per-cell CSV companion to the JSON report.
pub fn audit_cells_csv(report: &AuditReport) -> String {
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from(
        "n,family,budget_s,solver,count,r_qpu_mean_of_ratios,r_qpu_ratio_of_means,r_qpu_iqr,\
         g_f_mean,g_f_median,g_f_std,d_amp_mean,v_service,flagged\n",
    );
    for c in &report.cells {
        let v_service = match &c.v_service {
            VService::Ok { value, .. } => value.to_string(),
            VService::Insufficient { count } => format!("insufficient({count})"),
        };
        let d_amp = match c.d_amp_mean {
            Some(v) if v.is_infinite() => "inf".to_string(),
            Some(v) => v.to_string(),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            c.n,
            c.family,
            c.budget_s,
            c.solver_name,
            c.count,
            fmt(c.r_qpu_mean_of_ratios),
            fmt(c.r_qpu_ratio_of_means),
            fmt(c.r_qpu_iqr),
            fmt(c.g_f_mean),
            fmt(c.g_f_median),
            fmt(c.g_f_std),
            d_amp,
            v_service,
            c.flagged
        ));
    }
    out
}
