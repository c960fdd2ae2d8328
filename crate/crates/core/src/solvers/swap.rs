//! Constraint-native steepest-descent search over 1-in/1-out swaps.
//! Every visited state holds exactly k assets, so no projection or penalty
//! calibration is ever needed.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Portfolio, SolveResult, SolverKind};
use crate::error::{Error, Result};
use crate::instances::ProblemInstance;
use crate::rng::{self, StreamTag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapConfig {
    pub budget_s: Option<f64>,
    pub max_iterations: Option<u64>,
    pub seed: u64,
}

impl Default for SwapConfig {
    fn default() -> Self {
        SwapConfig {
            budget_s: Some(5.0),
            max_iterations: None,
            seed: 0,
        }
    }
}

struct SwapState<'a> {
    inst: &'a ProblemInstance,
    z: Vec<u8>,
    /// s_i = sum_j sigma_ij z_j.
    s: Vec<f64>,
    objective: f64,
}

impl<'a> SwapState<'a> {
    fn new(inst: &'a ProblemInstance, z: Vec<u8>) -> Self {
        let n = inst.n;
        let s = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| z[j] == 1)
                    .map(|j| inst.sigma_at(i, j))
                    .sum()
            })
            .collect();
        let objective = super::evaluate_mvt(inst, &z).expect("state vector sized to instance");
        SwapState {
            inst,
            z,
            s,
            objective,
        }
    }

    /// Objective change of swapping selected `out` for unselected `inn`.
    #[inline]
    fn swap_delta(&self, out: usize, inn: usize) -> f64 {
        let inst = self.inst;
        let lin = (inst.mu[out] - inst.tau_shift(out)) - (inst.mu[inn] - inst.tau_shift(inn));
        let quad = inst.sigma_at(out, out) + inst.sigma_at(inn, inn) - 2.0 * self.s[out]
            + 2.0 * self.s[inn]
            - 2.0 * inst.sigma_at(out, inn);
        lin + inst.lambda * quad
    }

    fn apply(&mut self, out: usize, inn: usize, delta: f64) {
        debug_assert_eq!(self.z[out], 1);
        debug_assert_eq!(self.z[inn], 0);
        self.z[out] = 0;
        self.z[inn] = 1;
        self.objective += delta;
        let n = self.inst.n;
        for a in 0..n {
            self.s[a] += self.inst.sigma_at(a, inn) - self.inst.sigma_at(a, out);
        }
    }
}

fn random_exact_k(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<u8> {
    let picked = rng::choose_indices(rng, n, k);
    let mut z = vec![0u8; n];
    for i in picked {
        z[i] = 1;
    }
    z
}

/// Multistart steepest descent: apply the best strictly improving swap until
/// a local minimum, then restart from a fresh random exact-k state. At least
/// one of budget or iteration cap must be set. When k = n the feasible set
/// is a single point which is returned immediately.
pub fn feasible_swap_search(inst: &ProblemInstance, cfg: &SwapConfig) -> Result<SolveResult> {
    if cfg.budget_s.is_none() && cfg.max_iterations.is_none() {
        return Err(Error::InvalidConfig(
            "swap search needs a wall-clock budget or an iteration cap".into(),
        ));
    }
    if let Some(b) = cfg.budget_s {
        if !(b > 0.0) {
            return Err(Error::InvalidConfig(format!("budget must be positive, got {b}")));
        }
    }
    let start = std::time::Instant::now();
    let n = inst.n;
    let k = inst.k;
    let mut rng = rng::stream(cfg.seed, StreamTag::Solver, 0);

    if k == n {
        let best = Portfolio::from_z(inst, vec![1u8; n])?;
        return Ok(SolveResult {
            solver: SolverKind::SwapNative,
            best,
            raw_best: None,
            wall_clock_s: start.elapsed().as_secs_f64(),
            iterations: 0,
            budget_s: cfg.budget_s,
            proven_optimal: false,
        });
    }

    let mut state = SwapState::new(inst, random_exact_k(&mut rng, n, k));
    let mut best_obj = state.objective;
    let mut best_z = state.z.clone();
    let mut iter: u64 = 0;

    loop {
        if let Some(cap) = cfg.max_iterations {
            if iter >= cap {
                break;
            }
        }
        if let Some(budget) = cfg.budget_s {
            if start.elapsed().as_secs_f64() >= budget {
                break;
            }
        }
        iter += 1;

        let mut pick: Option<(usize, usize)> = None;
        let mut pick_delta = -1e-15;
        for out in 0..n {
            if state.z[out] == 0 {
                continue;
            }
            for inn in 0..n {
                if state.z[inn] == 1 {
                    continue;
                }
                let delta = state.swap_delta(out, inn);
                if delta < pick_delta {
                    pick_delta = delta;
                    pick = Some((out, inn));
                }
            }
        }
        match pick {
            Some((out, inn)) => {
                state.apply(out, inn, pick_delta);
                debug_assert_eq!(
                    state.z.iter().map(|&b| b as usize).sum::<usize>(),
                    k,
                    "swap left the feasible set"
                );
                if state.objective < best_obj {
                    best_obj = state.objective;
                    best_z = state.z.clone();
                }
            }
            None => {
                // Local minimum under the swap neighbourhood; restart.
                state = SwapState::new(inst, random_exact_k(&mut rng, n, k));
                if state.objective < best_obj {
                    best_obj = state.objective;
                    best_z = state.z.clone();
                }
            }
        }
    }

    let best = Portfolio::from_z(inst, best_z)?;
    debug_assert!(best.feasible);
    Ok(SolveResult {
        solver: SolverKind::SwapNative,
        best,
        raw_best: None,
        wall_clock_s: start.elapsed().as_secs_f64(),
        iterations: iter,
        budget_s: cfg.budget_s,
        proven_optimal: false,
    })
}
