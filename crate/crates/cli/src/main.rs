//! `mvt`: command line driver for the benchmark and audit toolkit.
//!
//! Subcommands cover the full pipeline: instance generation, encoding to
//! penalty or constraint-native form, single solves, grid campaigns, the
//! operational audit report, paired and rank statistics, the financial
//! overlay, and plot-ready table exports. Every subcommand that writes a
//! file refuses to overwrite unless --force is passed, and prints a one
//! line JSON summary to stdout so runs can be scripted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mvt_core::audit::{self, Formulation, TimeUnit};
use mvt_core::campaign::{self, GridSpec, PlotKind, SingleRunConfig};
use mvt_core::embedding::{overhead_table, overhead_table_csv, TopologySpec};
use mvt_core::encoding::{build_cqm, build_penalty_qubo, QuboConvention};
use mvt_core::error::{Error, Result};
use mvt_core::finance::{
    self, month_after, sharpe_table_csv, RebalanceWindow, SharpeReport, SharpeTableRow,
};
use mvt_core::instances::{self, Family, GeneratorConfig};
use mvt_core::solvers::SolverKind;
use mvt_core::stats::{
    dwell_quality_table, dwell_table_csv, Alternative, DwellGrouping, PairedSample,
};

#[derive(Parser)]
#[command(
    name = "mvt",
    version,
    about = "Benchmark and audit toolkit for cardinality-constrained portfolio selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate problem instances and write them as JSONL.
    Generate(GenerateArgs),
    /// Encode instances as penalty QUBOs or constraint-native models.
    Encode(EncodeArgs),
    /// Solve each instance in a file with one solver configuration.
    Solve(SolveArgs),
    /// Grid campaigns over (n, family, seed, solver, budget, penalty).
    Campaign(CampaignCmd),
    /// Build the operational audit report from run telemetry.
    Audit(AuditArgs),
    /// Paired and rank statistics over run telemetry.
    Stats(StatsCmd),
    /// Held-month performance overlay on daily industry returns.
    Finance(FinanceArgs),
    /// Plot-ready CSV tables from run telemetry or structural models.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Exact,
    SaPenalty,
    TabuPenalty,
    SwapNative,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> SolverKind {
        match s {
            SolverArg::Exact => SolverKind::Exact,
            SolverArg::SaPenalty => SolverKind::SaPenalty,
            SolverArg::TabuPenalty => SolverKind::TabuPenalty,
            SolverArg::SwapNative => SolverKind::SwapNative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormulationArg {
    Penalty,
    Native,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Symmetric,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TimeUnitArg {
    S,
    Us,
}

impl From<TimeUnitArg> for TimeUnit {
    fn from(u: TimeUnitArg) -> TimeUnit {
        match u {
            TimeUnitArg::S => TimeUnit::Seconds,
            TimeUnitArg::Us => TimeUnit::Microseconds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TopologyArg {
    Pegasus,
    Zephyr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupingArg {
    WithinCell,
    CrossCell,
}

#[derive(Args)]
struct GenerateArgs {
    /// Family name (diagonal, block, dense) or "all".
    #[arg(long, default_value = "all")]
    family: String,
    /// Comma separated instance sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Seeds: inclusive range "0..4", comma list "0,3,7", or one value.
    #[arg(long, default_value = "0")]
    seeds: String,
    #[arg(long)]
    out: PathBuf,
    /// Overwrite the output file if it exists.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct EncodeArgs {
    /// Instance JSONL produced by generate.
    #[arg(long)]
    instances: PathBuf,
    #[arg(long, value_enum, default_value_t = FormulationArg::Penalty)]
    formulation: FormulationArg,
    /// Penalty weight for the squared cardinality term.
    #[arg(long, default_value_t = 4.0)]
    penalty_a: f64,
    /// Coefficient convention of serialized QUBO matrices.
    #[arg(long, value_enum, default_value_t = ConventionArg::Symmetric)]
    convention: ConventionArg,
    #[arg(long)]
    out: PathBuf,
    /// Also write per-instance off-diagonal support reports here.
    #[arg(long)]
    support_out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instances: PathBuf,
    #[arg(long, value_enum)]
    solver: SolverArg,
    #[arg(long, default_value_t = 4.0)]
    penalty_a: f64,
    /// Wall clock budget per instance for the search solvers.
    #[arg(long)]
    budget_s: Option<f64>,
    /// Iteration cap replacing the wall clock budget.
    #[arg(long)]
    iters: Option<u64>,
    /// Annealing restarts per instance.
    #[arg(long, default_value_t = 1000)]
    reads: u32,
    /// Sweeps per annealing read.
    #[arg(long, default_value_t = 1000)]
    sweeps: u32,
    /// Solver RNG seed override; defaults to each instance seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Zero wall clocks and pin dates so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct CampaignCmd {
    #[command(subcommand)]
    action: CampaignAction,
}

#[derive(Subcommand)]
enum CampaignAction {
    /// Run every cell of a TOML grid spec and write the campaign files.
    Run(CampaignRunArgs),
}

#[derive(Args)]
struct CampaignRunArgs {
    /// Grid spec (TOML).
    #[arg(long)]
    spec: PathBuf,
    /// Output directory; receives runs.jsonl, failures.jsonl,
    /// anchors.jsonl and encodings.jsonl.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct AuditArgs {
    /// Run telemetry JSONL.
    #[arg(long)]
    runs: PathBuf,
    /// Oracle anchors JSONL for gap metrics.
    #[arg(long)]
    anchors: Option<PathBuf>,
    /// Encoding support reports JSONL for the density checklist item.
    #[arg(long)]
    encodings: Option<PathBuf>,
    /// Unit of the timing fields in the runs file.
    #[arg(long, value_enum, default_value_t = TimeUnitArg::S)]
    time_unit: TimeUnitArg,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-cell metric table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct StatsCmd {
    #[command(subcommand)]
    action: StatsAction,
}

#[derive(Subcommand)]
enum StatsAction {
    /// Exact Wilcoxon signed-rank test on a two column CSV of pairs.
    Wilcoxon(WilcoxonArgs),
    /// Spearman dwell-quality table over run records.
    Dwell(DwellArgs),
}

#[derive(Args)]
struct WilcoxonArgs {
    /// CSV with one pair per line; a header line is skipped if present.
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long, default_value = "a")]
    label_a: String,
    #[arg(long, default_value = "b")]
    label_b: String,
}

#[derive(Args)]
struct DwellArgs {
    #[arg(long)]
    runs: PathBuf,
    #[arg(long, value_enum, default_value_t = TimeUnitArg::S)]
    time_unit: TimeUnitArg,
    #[arg(long, value_enum, default_value_t = GroupingArg::WithinCell)]
    grouping: GroupingArg,
    /// Bootstrap resamples for the confidence interval.
    #[arg(long, default_value_t = 2000)]
    resamples: u32,
    /// Confidence level of the bootstrap interval.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct FinanceArgs {
    /// Daily industry returns in percent; values at or below -99 mark
    /// missing days.
    #[arg(long)]
    ff49: PathBuf,
    /// Saved selections JSONL; omit for baseline-only rows over the
    /// default rebalance dates.
    #[arg(long)]
    windows: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// gap-vs-n, budget-curves, repeat-box, ablation, or overhead.
    #[arg(long)]
    table: String,
    #[arg(long)]
    runs: Option<PathBuf>,
    #[arg(long)]
    anchors: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TimeUnitArg::S)]
    time_unit: TimeUnitArg,
    /// Sizes for the overhead table.
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    #[arg(long, value_enum, default_value_t = TopologyArg::Pegasus)]
    topology: TopologyArg,
    /// Observed physical qubit counts as n=count pairs: "30=750,40=1300".
    #[arg(long)]
    observed: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli.command) {
        eprintln!("error: {e}");
        println!("{}", serde_json::json!({ "error": e.to_string() }));
        std::process::exit(1);
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Generate(a) => cmd_generate(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Campaign(c) => match c.action {
            CampaignAction::Run(a) => cmd_campaign_run(a),
        },
        Command::Audit(a) => cmd_audit(a),
        Command::Stats(s) => match s.action {
            StatsAction::Wilcoxon(a) => cmd_wilcoxon(a),
            StatsAction::Dwell(a) => cmd_dwell(a),
        },
        Command::Finance(a) => cmd_finance(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn check_out(path: &Path, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::WouldOverwrite(format!(
            "{} exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

fn parse_families(s: &str) -> Result<Vec<Family>> {
    if s == "all" {
        return Ok(Family::ALL.to_vec());
    }
    s.split(',')
        .map(|tok| match tok.trim() {
            "diagonal" => Ok(Family::Diagonal),
            "block" => Ok(Family::Block),
            "dense" => Ok(Family::Dense),
            other => Err(Error::InvalidConfig(format!(
                "unknown family '{other}' (expected diagonal, block, dense, or all)"
            ))),
        })
        .collect()
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = |tok: &str| Error::InvalidConfig(format!("bad seed token '{tok}'"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad(lo))?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad(hi))?;
        if hi < lo {
            return Err(Error::InvalidConfig(format!("empty seed range '{s}'")));
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|tok| tok.trim().parse().map_err(|_| bad(tok)))
        .collect()
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    check_out(&a.out, a.force)?;
    let families = parse_families(&a.family)?;
    let seeds = parse_seeds(&a.seeds)?;
    let cfg = GeneratorConfig::default();
    let mut insts = Vec::new();
    for &f in &families {
        for &n in &a.n {
            for &s in &seeds {
                insts.push(instances::generate(f, n, s, &cfg)?);
            }
        }
    }
    instances::save_instances(&insts, &a.out)?;
    println!(
        "{}",
        serde_json::json!({ "instances": insts.len(), "path": a.out })
    );
    Ok(())
}

fn cmd_encode(a: EncodeArgs) -> Result<()> {
    check_out(&a.out, a.force)?;
    if let Some(p) = &a.support_out {
        check_out(p, a.force)?;
    }
    let insts = instances::load_instances(&a.instances)?;
    let encoded = match a.formulation {
        FormulationArg::Penalty => {
            let convention = match a.convention {
                ConventionArg::Symmetric => QuboConvention::Symmetric,
                ConventionArg::Upper => QuboConvention::Upper,
            };
            let exports = insts
                .iter()
                .map(|inst| Ok(build_penalty_qubo(inst, a.penalty_a)?.export(convention)))
                .collect::<Result<Vec<_>>>()?;
            campaign::save_jsonl(&exports, &a.out)?;
            exports.len()
        }
        FormulationArg::Native => {
            let models = insts.iter().map(build_cqm).collect::<Result<Vec<_>>>()?;
            campaign::save_jsonl(&models, &a.out)?;
            models.len()
        }
    };
    let mut summary = serde_json::json!({ "encoded": encoded, "path": a.out });
    if let Some(p) = &a.support_out {
        let want = match a.formulation {
            FormulationArg::Penalty => Formulation::Penalty,
            FormulationArg::Native => Formulation::Native,
        };
        let reports: Vec<_> = campaign::encodings_for_instances(&insts, a.penalty_a)?
            .into_iter()
            .filter(|e| e.formulation == want)
            .collect();
        campaign::save_jsonl(&reports, p)?;
        summary["support_path"] = serde_json::json!(p);
    }
    println!("{summary}");
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    check_out(&a.out, a.force)?;
    let insts = instances::load_instances(&a.instances)?;
    let cfg = SingleRunConfig {
        solver: a.solver.into(),
        penalty_a: a.penalty_a,
        budget_s: a.budget_s,
        max_iterations: a.iters,
        sa_reads: a.reads,
        sa_sweeps: a.sweeps,
        seed: a.seed,
        deterministic: a.deterministic,
    };
    let records = insts
        .iter()
        .map(|inst| campaign::run_single(inst, &cfg))
        .collect::<Result<Vec<_>>>()?;
    audit::save_runs(&records, &a.out)?;
    println!(
        "{}",
        serde_json::json!({ "records": records.len(), "path": a.out })
    );
    Ok(())
}

fn cmd_campaign_run(a: CampaignRunArgs) -> Result<()> {
    let spec = GridSpec::load(&a.spec)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(a.out.display().to_string(), e))?;
    let runs_path = a.out.join("runs.jsonl");
    let failures_path = a.out.join("failures.jsonl");
    let anchors_path = a.out.join("anchors.jsonl");
    let encodings_path = a.out.join("encodings.jsonl");
    for p in [&runs_path, &failures_path, &anchors_path, &encodings_path] {
        check_out(p, a.force)?;
    }

    let outcome = campaign::run_grid(&spec)?;
    audit::save_runs(&outcome.records, &runs_path)?;
    campaign::save_jsonl(&outcome.failures, &failures_path)?;
    let anchors = campaign::anchors_from_records(&outcome.records);
    campaign::save_jsonl(&anchors, &anchors_path)?;

    // One support report per (instance, formulation), at the first penalty
    // weight of the grid.
    let cfg = GeneratorConfig::default();
    let mut insts = Vec::new();
    for &f in &spec.families {
        for &n in &spec.n_list {
            for &s in &spec.seeds {
                insts.push(instances::generate(f, n, s, &cfg)?);
            }
        }
    }
    let encodings = campaign::encodings_for_instances(&insts, spec.penalty_list[0])?;
    campaign::save_jsonl(&encodings, &encodings_path)?;

    println!(
        "{}",
        serde_json::json!({
            "cells": spec.cells().len(),
            "records": outcome.records.len(),
            "failures": outcome.failures.len(),
            "anchors": anchors.len(),
            "out": a.out,
        })
    );
    Ok(())
}

fn cmd_audit(a: AuditArgs) -> Result<()> {
    if let Some(p) = &a.out {
        check_out(p, a.force)?;
    }
    if let Some(p) = &a.csv {
        check_out(p, a.force)?;
    }
    let ingest = audit::ingest_runs(&a.runs, a.time_unit.into())?;
    let anchors = match &a.anchors {
        Some(p) => audit::load_anchors(p)?,
        None => BTreeMap::new(),
    };
    let encodings = match &a.encodings {
        Some(p) => audit::load_encodings(p)?,
        None => Vec::new(),
    };
    let report = audit::build_audit_report(&ingest, &anchors, &encodings);
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(p) = &a.csv {
        write_text(p, &audit::audit_cells_csv(&report))?;
    }
    match &a.out {
        Some(p) => {
            write_text(p, &json)?;
            println!(
                "{}",
                serde_json::json!({
                    "cells": report.cells.len(),
                    "rejected": ingest.rejected.len(),
                    "flagged": ingest.flags.len(),
                    "path": p,
                })
            );
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_wilcoxon(a: WilcoxonArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.pairs)
        .map_err(|e| Error::io(a.pairs.display().to_string(), e))?;
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let parsed = match (cols.next(), cols.next()) {
            (Some(x), Some(y)) => x
                .trim()
                .parse::<f64>()
                .and_then(|x| y.trim().parse::<f64>().map(|y| (x, y))),
            _ => "missing column".parse::<f64>().map(|x| (x, x)),
        };
        match parsed {
            Ok(pair) => pairs.push(pair),
            // Tolerate one header line at the top; anything later is data.
            Err(_) if idx == 0 => continue,
            Err(e) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: e.to_string(),
                })
            }
        }
    }
    let sample = PairedSample::new(&a.label_a, &a.label_b, pairs)?;
    let one = sample.wilcoxon(Alternative::Greater)?;
    let two = sample.wilcoxon(Alternative::TwoSided)?;
    println!(
        "{}",
        serde_json::json!({
            "label_a": sample.label_a,
            "label_b": sample.label_b,
            "n_pairs": sample.pairs.len(),
            "n_effective": two.n_effective,
            "w_statistic": two.w_statistic,
            "p_one_sided": one.p_value,
            "p_two_sided": two.p_value,
            "method": two.method,
        })
    );
    Ok(())
}

fn cmd_dwell(a: DwellArgs) -> Result<()> {
    if let Some(p) = &a.out {
        check_out(p, a.force)?;
    }
    let ingest = audit::ingest_runs(&a.runs, a.time_unit.into())?;
    let grouping = match a.grouping {
        GroupingArg::WithinCell => DwellGrouping::WithinCell,
        GroupingArg::CrossCell => DwellGrouping::CrossCell,
    };
    let rows = dwell_quality_table(&ingest.records, grouping, a.resamples, a.level, a.seed)?;
    let csv = dwell_table_csv(&rows);
    match &a.out {
        Some(p) => {
            write_text(p, &csv)?;
            println!(
                "{}",
                serde_json::json!({ "groups": rows.len(), "path": p })
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}

/// Per-size cell in the held-month table: every config of that size is a
/// trial, so each config report is deflated by the cell's trial count.
fn finance_cell(
    panel: &finance::IndustryPanel,
    windows: &[&RebalanceWindow],
) -> (Option<f64>, Vec<SharpeReport>) {
    let mut series = Vec::new();
    for w in windows {
        match finance::reconstruct_window(panel, w) {
            Ok(s) => series.push(s),
            Err(e) => log::warn!("skipping {} ({}): {e}", w.config_id, w.rebalance_date),
        }
    }
    let trials: Vec<f64> = series
        .iter()
        .filter_map(|s| finance::sharpe_per_period(&s.returns).ok())
        .collect();
    let mut reports = Vec::new();
    for s in &series {
        match finance::sharpe_report(s, &trials) {
            Ok(r) => reports.push(r),
            Err(e) => log::warn!("no report for {}: {e}", s.label),
        }
    }
    let mean = if reports.is_empty() {
        None
    } else {
        Some(reports.iter().map(|r| r.sharpe_annual).sum::<f64>() / reports.len() as f64)
    };
    (mean, reports)
}

fn cmd_finance(a: FinanceArgs) -> Result<()> {
    if let Some(p) = &a.out_json {
        check_out(p, a.force)?;
    }
    if let Some(p) = &a.out_csv {
        check_out(p, a.force)?;
    }
    let panel = finance::load_ff49_daily(&a.ff49)?;
    let windows = match &a.windows {
        Some(p) => finance::load_windows(p)?,
        None => Vec::new(),
    };
    let mut dates: Vec<_> = if windows.is_empty() {
        finance::default_rebalance_dates()
    } else {
        let mut d: Vec<_> = windows.iter().map(|w| w.rebalance_date).collect();
        d.sort();
        d.dedup();
        d
    };
    dates.sort();

    let mut rows = Vec::new();
    let mut detail = Vec::new();
    for date in dates {
        let (year, month) = month_after(date);
        let label = format!("{year}-{month:02}");
        let baseline = match finance::one_over_n_baseline(&panel, year, month) {
            Ok(series) => finance::sharpe_report(&series, &[]).ok(),
            Err(e) => {
                log::warn!("no baseline for {label}: {e}");
                None
            }
        };

        let mut cells = Vec::new();
        let mut by_n: BTreeMap<usize, Vec<&RebalanceWindow>> = BTreeMap::new();
        for w in windows.iter().filter(|w| w.rebalance_date == date) {
            by_n.entry(w.n).or_default().push(w);
        }
        let (mut q10, mut q20, mut q30) = (None, None, None);
        for (&n, ws) in &by_n {
            let (mean, reports) = finance_cell(&panel, ws);
            match n {
                10 => q10 = mean,
                20 => q20 = mean,
                30 => q30 = mean,
                _ => {}
            }
            cells.push(serde_json::json!({
                "n": n,
                "configs": ws.len(),
                "mean_sharpe": mean,
                "reports": reports,
            }));
        }
        rows.push(SharpeTableRow {
            window: label.clone(),
            qpu_n10: q10,
            qpu_n20: q20,
            qpu_n30: q30,
            baseline: baseline.as_ref().map(|r| r.sharpe_annual),
        });
        detail.push(serde_json::json!({
            "window": label,
            "rebalance_date": date,
            "baseline": baseline,
            "cells": cells,
        }));
    }

    let csv = sharpe_table_csv(&rows);
    if let Some(p) = &a.out_csv {
        write_text(p, &csv)?;
    }
    if let Some(p) = &a.out_json {
        let doc = serde_json::json!({ "windows": detail });
        write_text(p, &serde_json::to_string_pretty(&doc)?)?;
    }
    match (&a.out_csv, &a.out_json) {
        (None, None) => print!("{csv}"),
        _ => println!(
            "{}",
            serde_json::json!({
                "windows": rows.len(),
                "csv": a.out_csv,
                "json": a.out_json,
            })
        ),
    }
    Ok(())
}

fn parse_observed(s: &str) -> Result<BTreeMap<usize, f64>> {
    let mut map = BTreeMap::new();
    for tok in s.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let (n, v) = tok.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("expected n=count, got '{tok}'"))
        })?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad size in '{tok}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad count in '{tok}'")))?;
        map.insert(n, v);
    }
    Ok(map)
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    if let Some(p) = &a.out {
        check_out(p, a.force)?;
    }
    let need_runs = |p: &Option<PathBuf>| -> Result<Vec<mvt_core::RunRecord>> {
        let p = p
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("this table needs --runs".into()))?;
        Ok(audit::ingest_runs(p, a.time_unit.into())?.records)
    };
    let load_anchor_map = |p: &Option<PathBuf>| -> Result<BTreeMap<String, audit::Anchor>> {
        match p {
            Some(p) => audit::load_anchors(p),
            None => Ok(BTreeMap::new()),
        }
    };

    let csv = match a.table.as_str() {
        "overhead" => {
            if a.n_grid.is_empty() {
                return Err(Error::InvalidConfig(
                    "the overhead table needs --n-grid".into(),
                ));
            }
            let topo = match a.topology {
                TopologyArg::Pegasus => TopologySpec::pegasus(),
                TopologyArg::Zephyr => TopologySpec::zephyr(),
            };
            let observed = match &a.observed {
                Some(s) => parse_observed(s)?,
                None => BTreeMap::new(),
            };
            overhead_table_csv(&overhead_table(&a.n_grid, &topo, &observed)?)
        }
        "ablation" => {
            let records = need_runs(&a.runs)?;
            let anchors = load_anchor_map(&a.anchors)?;
            campaign::ablation_csv(&campaign::ablation_compare(&records, &anchors))
        }
        other => {
            let kind: PlotKind = other.parse()?;
            let records = need_runs(&a.runs)?;
            let anchors = load_anchor_map(&a.anchors)?;
            if kind == PlotKind::GapVsN && anchors.is_empty() {
                return Err(Error::InvalidConfig(
                    "the gap-vs-n table needs --anchors".into(),
                ));
            }
            campaign::plot_csv(&records, &anchors, kind)
        }
    };
    match &a.out {
        Some(p) => {
            write_text(p, &csv)?;
            println!("{}", serde_json::json!({ "path": p }));
        }
        None => print!("{csv}"),
    }
    Ok(())
}
