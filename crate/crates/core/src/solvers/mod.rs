//! Exact and heuristic solvers for the cardinality-constrained MVT problem.
//!
//! `exact_solve` is the enumeration oracle that anchors every gap metric.
//! The heuristics come in two shapes: penalty-path solvers (annealing, tabu)
//! that walk the unconstrained QUBO and project their answer back onto the
//! exact-k set, and the constraint-native swap search that never leaves it.

mod anneal;
mod state;
mod swap;
mod tabu;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::ProblemInstance;

pub use anneal::{simulated_annealing, AnnealConfig};
pub use swap::{feasible_swap_search, SwapConfig};
pub use tabu::{tabu_search, TabuConfig};

/// Enumeration oracle cap on C(n, k).
pub const ORACLE_CAP: u128 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Exact,
    SaPenalty,
    TabuPenalty,
    SwapNative,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::Exact,
        SolverKind::SaPenalty,
        SolverKind::TabuPenalty,
        SolverKind::SwapNative,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::SaPenalty => "sa-penalty",
            SolverKind::TabuPenalty => "tabu-penalty",
            SolverKind::SwapNative => "swap-native",
        }
    }

    /// Penalty-path solvers emit a pre-projection raw state.
    pub fn is_penalty_path(&self) -> bool {
        matches!(self, SolverKind::SaPenalty | SolverKind::TabuPenalty)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SolverKind::Exact),
            "sa-penalty" => Ok(SolverKind::SaPenalty),
            "tabu-penalty" => Ok(SolverKind::TabuPenalty),
            "swap-native" => Ok(SolverKind::SwapNative),
            other => Err(Error::InvalidConfig(format!("unknown solver '{other}'"))),
        }
    }
}

/// A candidate selection with its MVT objective value. `feasible` records
/// whether the selection holds exactly k assets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portfolio {
    pub z: Vec<u8>,
    pub objective: f64,
    pub feasible: bool,
}

impl Portfolio {
    pub fn from_z(inst: &ProblemInstance, z: Vec<u8>) -> Result<Portfolio> {
        let objective = evaluate_mvt(inst, &z)?;
        let ones: usize = z.iter().map(|&b| b as usize).sum();
        Ok(Portfolio {
            z,
            objective,
            feasible: ones == inst.k,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solver: SolverKind,
    pub best: Portfolio,
    /// Pre-projection state for penalty-path solvers, absent otherwise.
    pub raw_best: Option<Portfolio>,
    pub wall_clock_s: f64,
    pub iterations: u64,
    pub budget_s: Option<f64>,
    /// True only for the enumeration oracle.
    pub proven_optimal: bool,
}

/// MVT objective: -mu^T z + lambda z^T sigma z + tau^T |z - z_prev|.
/// Defined for any 0/1 vector, feasible or not.
pub fn evaluate_mvt(inst: &ProblemInstance, z: &[u8]) -> Result<f64> {
    let n = inst.n;
    if z.len() != n {
        return Err(Error::LengthMismatch(format!(
            "z has {} entries, instance has n={n}",
            z.len()
        )));
    }
    let mut linear = 0.0;
    let mut quad = 0.0;
    for i in 0..n {
        if z[i] == 0 {
            continue;
        }
        linear += -inst.mu[i] + inst.tau_shift(i);
        quad += inst.sigma_at(i, i);
        for j in (i + 1)..n {
            if z[j] == 1 {
                quad += 2.0 * inst.sigma_at(i, j);
            }
        }
    }
    Ok(linear + inst.lambda * quad + inst.tau_offset())
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if acc > ORACLE_CAP * 1000 {
            return u128::MAX;
        }
    }
    acc
}

/// True if `a` selects a lexicographically smaller bit vector than `b`.
/// Both are sorted index sets of equal size; a later first selected index
/// means an earlier zero, hence a smaller vector.
fn selects_lex_smaller(a: &[usize], b: &[usize]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// Exhaustive enumeration of all C(n, k) selections. Errors when the count
/// exceeds [`ORACLE_CAP`]. Objective ties resolve to the lexicographically
/// smallest bit vector.
pub fn exact_solve(inst: &ProblemInstance) -> Result<SolveResult> {
    let n = inst.n;
    let k = inst.k;
    let count = binomial(n, k);
    if count > ORACLE_CAP {
        return Err(Error::OracleUnavailable(format!(
            "C({n},{k}) = {count} exceeds cap {ORACLE_CAP}"
        )));
    }
    let start = std::time::Instant::now();
    // Per-asset linear part: -mu_i + tau_i (1 - 2 z_prev_i) + lambda sigma_ii.
    let d: Vec<f64> = (0..n)
        .map(|i| -inst.mu[i] + inst.tau_shift(i) + inst.lambda * inst.sigma_at(i, i))
        .collect();
    let tau_offset = inst.tau_offset();

    let mut combo: Vec<usize> = (0..k).collect();
    let mut best_obj = f64::INFINITY;
    let mut best: Vec<usize> = combo.clone();
    let mut visited: u64 = 0;
    loop {
        visited += 1;
        let mut obj = tau_offset;
        for (t, &i) in combo.iter().enumerate() {
            obj += d[i];
            for &j in &combo[t + 1..] {
                obj += 2.0 * inst.lambda * inst.sigma_at(i, j);
            }
        }
        if obj < best_obj || (obj == best_obj && selects_lex_smaller(&combo, &best)) {
            best_obj = obj;
            best.copy_from_slice(&combo);
        }
        // Advance to the next combination in index-lexicographic order.
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if combo[pos] != pos + n - k {
                combo[pos] += 1;
                for t in pos + 1..k {
                    combo[t] = combo[t - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                let mut z = vec![0u8; n];
                for &i in &best {
                    z[i] = 1;
                }
                let portfolio = Portfolio::from_z(inst, z)?;
                debug_assert!((portfolio.objective - best_obj).abs() < 1e-9);
                return Ok(SolveResult {
                    solver: SolverKind::Exact,
                    best: portfolio,
                    raw_best: None,
                    wall_clock_s: start.elapsed().as_secs_f64(),
                    iterations: visited,
                    budget_s: None,
                    proven_optimal: true,
                });
            }
        }
    }
}

/// Repair an arbitrary selection to exactly k assets by greedy marginal
/// moves on the true objective: drop the selected asset whose removal
/// improves the objective most while oversized, add the best marginal asset
/// while undersized. Ties resolve to the smallest asset index. A feasible
/// input is returned unchanged.
pub fn greedy_project(inst: &ProblemInstance, z_raw: &[u8]) -> Result<Portfolio> {
    let n = inst.n;
    if z_raw.len() != n {
        return Err(Error::LengthMismatch(format!(
            "z_raw has {} entries, instance has n={n}",
            z_raw.len()
        )));
    }
    let mut z: Vec<u8> = z_raw.iter().map(|&b| (b > 0) as u8).collect();
    let mut ones: usize = z.iter().map(|&b| b as usize).sum();
    // s_i = sum_j sigma_ij z_j, maintained across moves.
    let mut s: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| z[j] == 1)
                .map(|j| inst.sigma_at(i, j))
                .sum()
        })
        .collect();
    let lin: Vec<f64> = (0..n).map(|i| -inst.mu[i] + inst.tau_shift(i)).collect();

    while ones > inst.k {
        let mut pick = usize::MAX;
        let mut pick_delta = f64::INFINITY;
        for i in 0..n {
            if z[i] == 1 {
                let delta = -lin[i] + inst.lambda * (inst.sigma_at(i, i) - 2.0 * s[i]);
                if delta < pick_delta {
                    pick_delta = delta;
                    pick = i;
                }
            }
        }
        z[pick] = 0;
        ones -= 1;
        for a in 0..n {
            s[a] -= inst.sigma_at(a, pick);
        }
    }
    while ones < inst.k {
        let mut pick = usize::MAX;
        let mut pick_delta = f64::INFINITY;
        for i in 0..n {
            if z[i] == 0 {
                let delta = lin[i] + inst.lambda * (inst.sigma_at(i, i) + 2.0 * s[i]);
                if delta < pick_delta {
                    pick_delta = delta;
                    pick = i;
                }
            }
        }
        z[pick] = 1;
        ones += 1;
        for a in 0..n {
            s[a] += inst.sigma_at(a, pick);
        }
    }
    Portfolio::from_z(inst, z)
}
