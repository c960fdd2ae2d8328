//! Experiment grid orchestration.
//!
//! Sweeps the Cartesian product of problem size, family, seed, solver,
//! budget and penalty weight, emits the shared run-record schema (classical
//! solvers report t_qpu = 0), and produces anchors, encoding reports,
//! ablation tables and plot-ready CSVs. A failed cell becomes a failure
//! record; it never aborts the grid. In deterministic mode all solvers run
//! iteration-capped, wall-clock fields are zeroed and the campaign dates
//! are pinned to the epoch so output files are byte-identical across runs.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::{Anchor, EncodingInfo, Formulation, RunRecord};
use crate::encoding::{
    build_penalty_qubo, density_amplification, offdiag_support, verify_support_theorem,
    SupportReport,
};
use crate::error::{Error, Result};
use crate::instances::{self, Family, GeneratorConfig, ProblemInstance, SUPPORT_TOL};
use crate::solvers::{
    exact_solve, feasible_swap_search, simulated_annealing, tabu_search, AnnealConfig, SolveResult,
    SolverKind, SwapConfig, TabuConfig,
};
use crate::stats::describe;

fn default_penalty_list() -> Vec<f64> {
    vec![4.0]
}

fn default_workers() -> usize {
    1
}

fn default_sa_reads() -> u32 {
    1000
}

fn default_sa_sweeps() -> u32 {
    1000
}

fn default_tabu_iters() -> u64 {
    20_000
}

fn default_swap_iters() -> u64 {
    20_000
}

/// Declarative grid description, loaded from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_list: Vec<usize>,
    pub families: Vec<Family>,
    pub seeds: Vec<u64>,
    pub solvers: Vec<SolverKind>,
    pub budgets_s: Vec<f64>,
    /// Penalty weights; the axis applies to penalty-path solvers only.
    #[serde(default = "default_penalty_list")]
    pub penalty_list: Vec<f64>,
    /// Iteration-capped solvers, zeroed wall clocks, epoch dates.
    #[serde(default)]
    pub deterministic: bool,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_sa_reads")]
    pub sa_reads: u32,
    #[serde(default = "default_sa_sweeps")]
    pub sa_sweeps: u32,
    #[serde(default = "default_tabu_iters")]
    pub tabu_iters: u64,
    #[serde(default = "default_swap_iters")]
    pub swap_iters: u64,
}

/// One grid point. Penalty weight is carried only by penalty-path solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub n: usize,
    pub family: Family,
    pub seed: u64,
    pub solver: SolverKind,
    pub budget_s: f64,
    pub penalty_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedCell {
    pub problem_id: String,
    pub solver_name: String,
    pub n: usize,
    pub family: Family,
    pub seed: u64,
    pub budget_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty_a: Option<f64>,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct CampaignOutcome {
    pub records: Vec<RunRecord>,
    pub failures: Vec<FailedCell>,
}

impl GridSpec {
    pub fn from_toml_str(text: &str) -> Result<GridSpec> {
        let spec: GridSpec =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<GridSpec> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        GridSpec::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, empty) in [
            ("n_list", self.n_list.is_empty()),
            ("families", self.families.is_empty()),
            ("seeds", self.seeds.is_empty()),
            ("solvers", self.solvers.is_empty()),
            ("budgets_s", self.budgets_s.is_empty()),
            ("penalty_list", self.penalty_list.is_empty()),
        ] {
            if empty {
                return Err(Error::InvalidConfig(format!("{name} must not be empty")));
            }
        }
        if self.budgets_s.iter().any(|b| *b <= 0.0 || !b.is_finite()) {
            return Err(Error::InvalidConfig("budgets_s must be positive".into()));
        }
        if self.penalty_list.iter().any(|a| *a <= 0.0 || !a.is_finite()) {
            return Err(Error::InvalidConfig("penalty_list must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Expand the grid in canonical order: each axis sorted and deduplicated,
    /// nested as (n, family, seed, solver, budget, penalty).
    pub fn cells(&self) -> Vec<CellSpec> {
        let mut n_list = self.n_list.clone();
        n_list.sort_unstable();
        n_list.dedup();
        let mut families = self.families.clone();
        families.sort_unstable();
        families.dedup();
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        let mut solvers = self.solvers.clone();
        solvers.sort_unstable();
        solvers.dedup();
        let mut budgets: Vec<f64> = self.budgets_s.iter().map(|b| crate::audit::normalize_budget(*b)).collect();
        budgets.sort_by(f64::total_cmp);
        budgets.dedup();
        let mut penalties = self.penalty_list.clone();
        penalties.sort_by(f64::total_cmp);
        penalties.dedup();

        let mut cells = Vec::new();
        for &n in &n_list {
            for &family in &families {
                for &seed in &seeds {
                    for &solver in &solvers {
                        for &budget_s in &budgets {
                            if solver.is_penalty_path() {
                                for &penalty_a in &penalties {
                                    cells.push(CellSpec {
                                        n,
                                        family,
                                        seed,
                                        solver,
                                        budget_s,
                                        penalty_a: Some(penalty_a),
                                    });
                                }
                            } else {
                                cells.push(CellSpec {
                                    n,
                                    family,
                                    seed,
                                    solver,
                                    budget_s,
                                    penalty_a: None,
                                });
                            }
                        }
                    }
                }
            }
        }
        cells
    }
}

fn campaign_date(deterministic: bool) -> NaiveDate {
    if deterministic {
        NaiveDate::from_ymd_opt(1970, 1, 1).unwrap()
    } else {
        chrono::Utc::now().date_naive()
    }
}

fn solver_params(cell: &CellSpec, spec: &GridSpec) -> String {
    match cell.solver {
        SolverKind::Exact => "enumeration".to_string(),
        SolverKind::SaPenalty => format!(
            "reads={},sweeps={},A={}",
            spec.sa_reads,
            spec.sa_sweeps,
            cell.penalty_a.unwrap_or_default()
        ),
        SolverKind::TabuPenalty => {
            let stop = if spec.deterministic {
                format!("iters={}", spec.tabu_iters)
            } else {
                format!("budget={}s", cell.budget_s)
            };
            format!("{stop},A={}", cell.penalty_a.unwrap_or_default())
        }
        SolverKind::SwapNative => {
            if spec.deterministic {
                format!("iters={}", spec.swap_iters)
            } else {
                format!("budget={}s", cell.budget_s)
            }
        }
    }
}

fn run_cell(
    inst: &ProblemInstance,
    cell: &CellSpec,
    spec: &GridSpec,
    solver_seed: u64,
) -> Result<SolveResult> {
    match cell.solver {
        SolverKind::Exact => exact_solve(inst),
        SolverKind::SaPenalty => {
            let q = build_penalty_qubo(inst, cell.penalty_a.expect("penalty axis"))?;
            simulated_annealing(
                inst,
                &q,
                &AnnealConfig {
                    reads: spec.sa_reads,
                    sweeps: spec.sa_sweeps,
                    beta_hot: None,
                    beta_cold: None,
                    seed: solver_seed,
                },
            )
        }
        SolverKind::TabuPenalty => {
            let q = build_penalty_qubo(inst, cell.penalty_a.expect("penalty axis"))?;
            let cfg = if spec.deterministic {
                TabuConfig {
                    budget_s: None,
                    max_iterations: Some(spec.tabu_iters),
                    seed: solver_seed,
                }
            } else {
                TabuConfig {
                    budget_s: Some(cell.budget_s),
                    max_iterations: None,
                    seed: solver_seed,
                }
            };
            tabu_search(inst, &q, &cfg)
        }
        SolverKind::SwapNative => {
            let cfg = if spec.deterministic {
                SwapConfig {
                    budget_s: None,
                    max_iterations: Some(spec.swap_iters),
                    seed: solver_seed,
                }
            } else {
                SwapConfig {
                    budget_s: Some(cell.budget_s),
                    max_iterations: None,
                    seed: solver_seed,
                }
            };
            feasible_swap_search(inst, &cfg)
        }
    }
}

fn record_from(
    inst: &ProblemInstance,
    cell: &CellSpec,
    spec: &GridSpec,
    result: &SolveResult,
    wall_s: f64,
    date: NaiveDate,
) -> RunRecord {
    let wall = if spec.deterministic { 0.0 } else { wall_s };
    let mut extra = BTreeMap::new();
    if let Some(a) = cell.penalty_a {
        extra.insert("penalty_a".to_string(), serde_json::json!(a));
    }
    extra.insert(
        "iterations".to_string(),
        serde_json::json!(result.iterations),
    );
    if result.proven_optimal {
        extra.insert("proven_optimal".to_string(), serde_json::json!(true));
    }
    if let Some(raw) = &result.raw_best {
        extra.insert(
            "raw_objective".to_string(),
            serde_json::json!(raw.objective),
        );
    }
    RunRecord {
        schema_version: crate::SCHEMA_VERSION,
        problem_id: inst.instance_id.clone(),
        solver_name: cell.solver.as_str().to_string(),
        solver_identity: Some(format!(
            "mvt-core/{} {}({})",
            env!("CARGO_PKG_VERSION"),
            cell.solver,
            solver_params(cell, spec)
        )),
        campaign_start: Some(date),
        campaign_end: Some(date),
        n: inst.n,
        family: inst.family,
        seed: inst.seed,
        k: inst.k,
        budget_s: cell.budget_s,
        t_run_s: Some(wall),
        t_charge_s: Some(wall),
        // Classical solvers hold no QPU time by definition.
        t_qpu_s: Some(0.0),
        objective_value: result.best.objective,
        feasible_raw: Some(
            result
                .raw_best
                .as_ref()
                .map(|p| p.feasible)
                .unwrap_or(result.best.feasible),
        ),
        feasible_post: Some(result.best.feasible),
        z: Some(result.best.z.clone()),
        extra,
    }
}

/// Run every cell of the grid. Instances are generated once per
/// (family, n, seed) triple and shared across solver cells. The outcome
/// always satisfies records + failures = cells.
pub fn run_grid(spec: &GridSpec) -> Result<CampaignOutcome> {
    spec.validate()?;
    let cells = spec.cells();
    let date = campaign_date(spec.deterministic);

    let mut triples: Vec<(Family, usize, u64)> = cells
        .iter()
        .map(|c| (c.family, c.n, c.seed))
        .collect();
    triples.sort_unstable();
    triples.dedup();
    let gen_cfg = GeneratorConfig::default();
    let mut cache: BTreeMap<(Family, usize, u64), Result<ProblemInstance>> = BTreeMap::new();
    for &(family, n, seed) in &triples {
        cache.insert(
            (family, n, seed),
            instances::generate(family, n, seed, &gen_cfg),
        );
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let results: Vec<std::result::Result<RunRecord, String>> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let inst = match &cache[&(cell.family, cell.n, cell.seed)] {
                    Ok(inst) => inst,
                    Err(e) => return Err(format!("instance generation failed: {e}")),
                };
                let t0 = Instant::now();
                match run_cell(inst, cell, spec, inst.seed) {
                    Ok(result) => Ok(record_from(
                        inst,
                        cell,
                        spec,
                        &result,
                        t0.elapsed().as_secs_f64(),
                        date,
                    )),
                    Err(e) => Err(e.to_string()),
                }
            })
            .collect()
    });

    let mut outcome = CampaignOutcome::default();
    for (cell, res) in cells.iter().zip(results) {
        match res {
            Ok(rec) => outcome.records.push(rec),
            Err(reason) => outcome.failures.push(FailedCell {
                problem_id: cache
                    .get(&(cell.family, cell.n, cell.seed))
                    .and_then(|r| r.as_ref().ok())
                    .map(|i| i.instance_id.clone())
                    .unwrap_or_else(|| {
                        format!("{}-n{:03}-s{:03}", cell.family, cell.n, cell.seed)
                    }),
                solver_name: cell.solver.as_str().to_string(),
                n: cell.n,
                family: cell.family,
                seed: cell.seed,
                budget_s: cell.budget_s,
                penalty_a: cell.penalty_a,
                reason,
            }),
        }
    }
    Ok(outcome)
}

/// One-off solve of an already-loaded instance, emitting the shared record
/// schema. Used by the CLI's solve subcommand; grids regenerate instances
/// from their coordinates instead.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleRunConfig {
    pub solver: SolverKind,
    pub penalty_a: f64,
    pub budget_s: Option<f64>,
    pub max_iterations: Option<u64>,
    pub sa_reads: u32,
    pub sa_sweeps: u32,
    /// Solver RNG seed; defaults to the instance seed.
    pub seed: Option<u64>,
    pub deterministic: bool,
}

impl Default for SingleRunConfig {
    fn default() -> Self {
        SingleRunConfig {
            solver: SolverKind::Exact,
            penalty_a: 4.0,
            budget_s: None,
            max_iterations: None,
            sa_reads: default_sa_reads(),
            sa_sweeps: default_sa_sweeps(),
            seed: None,
            deterministic: false,
        }
    }
}

pub fn run_single(inst: &ProblemInstance, cfg: &SingleRunConfig) -> Result<RunRecord> {
    let budget_s = crate::audit::normalize_budget(cfg.budget_s.unwrap_or(5.0));
    let iters = cfg.max_iterations.unwrap_or(default_tabu_iters());
    let spec = GridSpec {
        n_list: vec![inst.n],
        families: vec![inst.family],
        seeds: vec![inst.seed],
        solvers: vec![cfg.solver],
        budgets_s: vec![budget_s],
        penalty_list: vec![cfg.penalty_a],
        // Iteration caps replace the budget whenever one is requested.
        deterministic: cfg.deterministic || cfg.max_iterations.is_some(),
        workers: 1,
        sa_reads: cfg.sa_reads,
        sa_sweeps: cfg.sa_sweeps,
        tabu_iters: iters,
        swap_iters: iters,
    };
    let cell = CellSpec {
        n: inst.n,
        family: inst.family,
        seed: inst.seed,
        solver: cfg.solver,
        budget_s,
        penalty_a: cfg.solver.is_penalty_path().then_some(cfg.penalty_a),
    };
    let date = campaign_date(cfg.deterministic);
    let t0 = Instant::now();
    let result = run_cell(inst, &cell, &spec, cfg.seed.unwrap_or(inst.seed))?;
    let mut record = record_from(inst, &cell, &spec, &result, t0.elapsed().as_secs_f64(), date);
    if !cfg.deterministic && cfg.max_iterations.is_some() {
        // Iteration-capped but not deterministic: keep the measured clock.
        record.t_run_s = Some(t0.elapsed().as_secs_f64());
        record.t_charge_s = record.t_run_s;
    }
    record
        .extra
        .insert("single_run".into(), serde_json::json!(true));
    Ok(record)
}

/// Extract per-problem anchors from proven-optimal records.
pub fn anchors_from_records(records: &[RunRecord]) -> Vec<Anchor> {
    let mut map: BTreeMap<String, Anchor> = BTreeMap::new();
    for r in records {
        if r.solver_name != SolverKind::Exact.as_str() {
            continue;
        }
        map.entry(r.problem_id.clone()).or_insert_with(|| Anchor {
            problem_id: r.problem_id.clone(),
            f_star: r.objective_value,
            anchor_solver: Some(r.solver_name.clone()),
            anchor_wall_clock_s: r.t_run_s,
        });
    }
    map.into_values().collect()
}

/// Support analysis for each instance under both formulations: the penalty
/// encoding against the exact-cardinality constraint, and the native form
/// whose quadratic support is the covariance support unchanged.
pub fn encodings_for_instances(
    instances: &[ProblemInstance],
    penalty_a: f64,
) -> Result<Vec<EncodingInfo>> {
    let mut out = Vec::with_capacity(instances.len() * 2);
    for inst in instances {
        let ones = vec![1.0; inst.n];
        let support = verify_support_theorem(&inst.sigma, inst.n, &ones, penalty_a)?;
        out.push(EncodingInfo {
            problem_id: inst.instance_id.clone(),
            formulation: Formulation::Penalty,
            support,
        });
        let e_orig = offdiag_support(&inst.sigma, inst.n, SUPPORT_TOL).len();
        out.push(EncodingInfo {
            problem_id: inst.instance_id.clone(),
            formulation: Formulation::Native,
            support: SupportReport {
                n: inst.n,
                e_orig,
                e_enc: e_orig,
                d_amp: density_amplification(e_orig, e_orig),
                is_complete: e_orig == inst.n * (inst.n - 1) / 2,
                cancelled_pairs: Vec::new(),
            },
        });
    }
    Ok(out)
}

pub fn save_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<()> {
    let mut buf = String::new();
    for item in items {
        buf.push_str(&serde_json::to_string(item)?);
        buf.push('\n');
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Per-key solver-vs-oracle and solver-vs-solver objective deltas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub n: usize,
    pub family: Family,
    pub seed: u64,
    pub oracle_obj: f64,
    pub tabu_obj: f64,
    pub swap_obj: f64,
    pub tabu_minus_oracle: f64,
    pub swap_minus_oracle: f64,
    pub tabu_minus_swap: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AblationTable {
    pub rows: Vec<AblationRow>,
    pub mean_abs_tabu_vs_oracle: Option<f64>,
    pub max_abs_tabu_vs_oracle: Option<f64>,
    pub mean_abs_swap_vs_oracle: Option<f64>,
    pub max_abs_swap_vs_oracle: Option<f64>,
    pub mean_abs_tabu_vs_swap: Option<f64>,
    pub max_abs_tabu_vs_swap: Option<f64>,
    /// Keys that could not be matched across all three solvers.
    pub unmatched: Vec<String>,
}

/// Compare tabu and swap records against oracle anchors on matched
/// (n, family, seed) keys. When a solver has several records for a key
/// (budget or penalty sweep) its best objective is used.
pub fn ablation_compare(records: &[RunRecord], anchors: &BTreeMap<String, Anchor>) -> AblationTable {
    type Key = (usize, Family, u64);
    let mut tabu: BTreeMap<Key, (f64, String)> = BTreeMap::new();
    let mut swap: BTreeMap<Key, (f64, String)> = BTreeMap::new();
    for r in records {
        let key = (r.n, r.family, r.seed);
        let target = if r.solver_name == SolverKind::TabuPenalty.as_str() {
            &mut tabu
        } else if r.solver_name == SolverKind::SwapNative.as_str() {
            &mut swap
        } else {
            continue;
        };
        target
            .entry(key)
            .and_modify(|(best, _)| {
                if r.objective_value < *best {
                    *best = r.objective_value;
                }
            })
            .or_insert((r.objective_value, r.problem_id.clone()));
    }

    let mut keys: Vec<Key> = tabu.keys().chain(swap.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();

    let mut table = AblationTable::default();
    for key in keys {
        let (n, family, seed) = key;
        match (tabu.get(&key), swap.get(&key)) {
            (Some((t_obj, problem_id)), Some((s_obj, _))) => {
                match anchors.get(problem_id) {
                    Some(anchor) => table.rows.push(AblationRow {
                        n,
                        family,
                        seed,
                        oracle_obj: anchor.f_star,
                        tabu_obj: *t_obj,
                        swap_obj: *s_obj,
                        tabu_minus_oracle: t_obj - anchor.f_star,
                        swap_minus_oracle: s_obj - anchor.f_star,
                        tabu_minus_swap: t_obj - s_obj,
                    }),
                    None => table
                        .unmatched
                        .push(format!("{problem_id}: no oracle anchor")),
                }
            }
            (Some(_), None) => table
                .unmatched
                .push(format!("{family}-n{n:03}-s{seed:03}: no swap-native record")),
            (None, Some(_)) => table
                .unmatched
                .push(format!("{family}-n{n:03}-s{seed:03}: no tabu-penalty record")),
            (None, None) => unreachable!("key came from one of the maps"),
        }
    }

    if !table.rows.is_empty() {
        let agg = |f: fn(&AblationRow) -> f64| {
            let abs: Vec<f64> = table.rows.iter().map(|r| f(r).abs()).collect();
            let max = abs.iter().copied().fold(0.0f64, f64::max);
            (Some(describe::mean(&abs)), Some(max))
        };
        (table.mean_abs_tabu_vs_oracle, table.max_abs_tabu_vs_oracle) =
            agg(|r| r.tabu_minus_oracle);
        (table.mean_abs_swap_vs_oracle, table.max_abs_swap_vs_oracle) =
            agg(|r| r.swap_minus_oracle);
        (table.mean_abs_tabu_vs_swap, table.max_abs_tabu_vs_swap) = agg(|r| r.tabu_minus_swap);
    }
    table
}

pub fn ablation_csv(table: &AblationTable) -> String {
    let mut out = String::from(
        "n,family,seed,oracle_obj,tabu_obj,swap_obj,tabu_minus_oracle,swap_minus_oracle,tabu_minus_swap\n",
    );
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.family,
            r.seed,
            r.oracle_obj,
            r.tabu_obj,
            r.swap_obj,
            r.tabu_minus_oracle,
            r.swap_minus_oracle,
            r.tabu_minus_swap
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    BudgetCurves,
    GapVsN,
    RepeatBox,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<PlotKind> {
        match s {
            "budget_curves" | "budget-curves" => Ok(PlotKind::BudgetCurves),
            "gap_vs_n" | "gap-vs-n" => Ok(PlotKind::GapVsN),
            "repeat_box" | "repeat-box" => Ok(PlotKind::RepeatBox),
            other => Err(Error::InvalidConfig(format!("unknown plot kind '{other}'"))),
        }
    }
}

/// Deterministic plot-ready CSV emission. Anchors are only consulted for
/// the gap-vs-size table; records without an anchor are skipped there.
pub fn plot_csv(
    records: &[RunRecord],
    anchors: &BTreeMap<String, Anchor>,
    kind: PlotKind,
) -> String {
    match kind {
        PlotKind::BudgetCurves => {
            let mut groups: BTreeMap<(usize, String, i64), Vec<f64>> = BTreeMap::new();
            for r in records {
                let key = (
                    r.n,
                    r.solver_name.clone(),
                    (crate::audit::normalize_budget(r.budget_s) * 1000.0).round() as i64,
                );
                groups.entry(key).or_default().push(r.objective_value);
            }
            let mut out = String::from("n,solver,budget_s,objective\n");
            for ((n, solver, budget_ms), objectives) in groups {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    n,
                    solver,
                    budget_ms as f64 / 1000.0,
                    describe::mean(&objectives)
                ));
            }
            out
        }
        PlotKind::GapVsN => {
            let mut groups: BTreeMap<(usize, String), Vec<f64>> = BTreeMap::new();
            for r in records {
                if let Some(anchor) = anchors.get(&r.problem_id) {
                    let gap = crate::audit::metric_g_f(r.objective_value, anchor.f_star);
                    groups
                        .entry((r.n, r.solver_name.clone()))
                        .or_default()
                        .push(gap);
                }
            }
            let mut out = String::from("n,solver,gap_mean,gap_std\n");
            for ((n, solver), gaps) in groups {
                let std = describe::sample_std(&gaps)
                    .map(|s| s.to_string())
                    .unwrap_or_default();
                out.push_str(&format!("{},{},{},{}\n", n, solver, describe::mean(&gaps), std));
            }
            out
        }
        PlotKind::RepeatBox => {
            let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for r in records {
                groups
                    .entry(crate::audit::cell_key_of(r).to_string())
                    .or_default()
                    .push(r.objective_value);
            }
            let mut out = String::from("cell,objectives\n");
            for (cell, mut objectives) in groups {
                objectives.sort_by(f64::total_cmp);
                let joined: Vec<String> = objectives.iter().map(|o| o.to_string()).collect();
                out.push_str(&format!("{},{}\n", cell, joined.join(";")));
            }
            out
        }
    }
}
