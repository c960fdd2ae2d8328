//! Best-of-reads single-flip Metropolis annealer on the penalty QUBO.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::FlipState;
use super::{greedy_project, Portfolio, SolveResult, SolverKind};
use crate::encoding::EncodedQubo;
use crate::error::{Error, Result};
use crate::instances::ProblemInstance;
use crate::rng::{self, StreamTag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub reads: u32,
    /// Sweeps per read; 0 is allowed and returns the random initial states.
    pub sweeps: u32,
    /// Geometric schedule endpoints. When absent they are auto-scaled from
    /// the coefficient range: beta_hot * dE_max = 1, beta_cold * dE_min = 10.
    pub beta_hot: Option<f64>,
    pub beta_cold: Option<f64>,
    pub seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            reads: 1000,
            sweeps: 1000,
            beta_hot: None,
            beta_cold: None,
            seed: 0,
        }
    }
}

/// Largest and smallest single-flip energy scales of the QUBO.
fn energy_scales(q: &EncodedQubo) -> (f64, f64) {
    let n = q.n;
    let mut max_scale: f64 = 0.0;
    let mut min_scale = f64::INFINITY;
    for i in 0..n {
        let mut reach = q.q_at(i, i).abs();
        for j in 0..n {
            if j != i {
                reach += 2.0 * q.q_at(i, j).abs();
            }
        }
        max_scale = max_scale.max(reach);
        let diag = q.q_at(i, i).abs();
        if diag > 0.0 {
            min_scale = min_scale.min(diag);
        }
        for j in 0..n {
            if j != i {
                let c = 2.0 * q.q_at(i, j).abs();
                if c > 0.0 {
                    min_scale = min_scale.min(c);
                }
            }
        }
    }
    if !min_scale.is_finite() {
        min_scale = 1.0;
    }
    if max_scale == 0.0 {
        max_scale = 1.0;
    }
    (max_scale, min_scale)
}

fn geometric_schedule(beta_hot: f64, beta_cold: f64, sweeps: u32) -> Vec<f64> {
    if sweeps == 0 {
        return Vec::new();
    }
    if sweeps == 1 {
        return vec![beta_hot];
    }
    let ratio = (beta_cold / beta_hot).ln() / (sweeps - 1) as f64;
    (0..sweeps)
        .map(|t| beta_hot * (ratio * t as f64).exp())
        .collect()
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n)
        .map(|_| (rng::uniform(rng) < 0.5) as u8)
        .collect()
}

/// Run the annealer and project the best raw sample onto the exact-k set.
/// Deterministic in `cfg.seed`; reads use decorrelated seed lanes.
pub fn simulated_annealing(
    inst: &ProblemInstance,
    q: &EncodedQubo,
    cfg: &AnnealConfig,
) -> Result<SolveResult> {
    if cfg.reads == 0 {
        return Err(Error::InvalidConfig("reads must be >= 1".into()));
    }
    if q.n != inst.n {
        return Err(Error::LengthMismatch(format!(
            "qubo has n={}, instance has n={}",
            q.n, inst.n
        )));
    }
    let start = std::time::Instant::now();
    let (de_max, de_min) = energy_scales(q);
    let beta_hot = cfg.beta_hot.unwrap_or(1.0 / de_max);
    let beta_cold = cfg.beta_cold.unwrap_or(10.0 / de_min);
    if !(beta_hot > 0.0) || beta_cold < beta_hot {
        return Err(Error::InvalidConfig(format!(
            "bad beta schedule endpoints ({beta_hot}, {beta_cold})"
        )));
    }
    let schedule = geometric_schedule(beta_hot, beta_cold, cfg.sweeps);
    let n = q.n;

    let mut best_energy = f64::INFINITY;
    let mut best_z: Vec<u8> = Vec::new();
    let mut proposals: u64 = 0;
    for read in 0..cfg.reads {
        let mut rng = rng::stream(cfg.seed, StreamTag::Solver, read as u64);
        let mut state = FlipState::new(q, random_state(&mut rng, n));
        for &beta in &schedule {
            for i in 0..n {
                proposals += 1;
                let delta = state.flip_delta(i);
                if delta <= 0.0 || rng::uniform(&mut rng) < (-beta * delta).exp() {
                    state.flip(i);
                }
            }
        }
        let energy = state.exact_energy();
        if energy < best_energy {
            best_energy = energy;
            best_z = state.z.clone();
        }
    }

    let raw = Portfolio::from_z(inst, best_z)?;
    let best = greedy_project(inst, &raw.z)?;
    Ok(SolveResult {
        solver: SolverKind::SaPenalty,
        best,
        raw_best: Some(raw),
        wall_clock_s: start.elapsed().as_secs_f64(),
        iterations: proposals,
        budget_s: None,
        proven_optimal: false,
    })
}
