//! Single-flip tabu search on the penalty QUBO.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::FlipState;
use super::{greedy_project, Portfolio, SolveResult, SolverKind};
use crate::encoding::EncodedQubo;
use crate::error::{Error, Result};
use crate::instances::ProblemInstance;
use crate::rng::{self, StreamTag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabuConfig {
    /// Wall-clock budget. Optional so CI runs can be purely iteration-capped.
    pub budget_s: Option<f64>,
    /// Hard iteration cap for reproducible runs.
    pub max_iterations: Option<u64>,
    pub seed: u64,
}

impl Default for TabuConfig {
    fn default() -> Self {
        TabuConfig {
            budget_s: Some(5.0),
            max_iterations: None,
            seed: 0,
        }
    }
}

/// Tabu walk with tenure about n/4 and aspiration on the incumbent.
/// After a stretch of non-improving moves the walk diversifies, cycling
/// through a random exact-k state, a perturbation of the best state seen,
/// and a uniform random state. Restarting on the k-shell matters: the
/// penalty term walls off feasible states from each other by height about
/// the penalty weight, and uniform restarts funnel into whichever basin
/// the strongest linear scores carve out. At least one of budget or
/// iteration cap must be set. The best raw state is projected onto the
/// exact-k set before returning.
pub fn tabu_search(inst: &ProblemInstance, q: &EncodedQubo, cfg: &TabuConfig) -> Result<SolveResult> {
    if cfg.budget_s.is_none() && cfg.max_iterations.is_none() {
        return Err(Error::InvalidConfig(
            "tabu needs a wall-clock budget or an iteration cap".into(),
        ));
    }
    if let Some(b) = cfg.budget_s {
        if !(b > 0.0) {
            return Err(Error::InvalidConfig(format!("budget must be positive, got {b}")));
        }
    }
    if q.n != inst.n {
        return Err(Error::LengthMismatch(format!(
            "qubo has n={}, instance has n={}",
            q.n, inst.n
        )));
    }
    let start = std::time::Instant::now();
    let n = q.n;
    let tenure = (n as u64 / 4).clamp(4, 20);
    let stagnation_limit = (20 * n as u64).max(200);

    let mut rng: ChaCha8Rng = rng::stream(cfg.seed, StreamTag::Solver, 0);
    let mut state = FlipState::new(q, random_k_subset(&mut rng, n, q.k));
    let mut restarts: u64 = 0;
    let mut tabu_until = vec![0u64; n];
    let mut best_energy = state.exact_energy();
    let mut best_z = state.z.clone();
    let mut since_improvement: u64 = 0;
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

        // Best admissible flip: non-tabu, or tabu but beating the incumbent.
        let mut pick: Option<usize> = None;
        let mut pick_delta = f64::INFINITY;
        for i in 0..n {
            let delta = state.flip_delta(i);
            let admissible =
                tabu_until[i] <= iter || state.energy + delta < best_energy - 1e-15;
            if admissible && delta < pick_delta {
                pick_delta = delta;
                pick = Some(i);
            }
        }

        let restart = match pick {
            None => true,
            Some(_) => since_improvement >= stagnation_limit,
        };
        if restart {
            restarts += 1;
            let bits = match restarts % 3 {
                0 => random_bits(&mut rng, n),
                1 => random_k_subset(&mut rng, n, q.k),
                _ => perturb(&mut rng, &best_z),
            };
            state = FlipState::new(q, bits);
            tabu_until.iter_mut().for_each(|t| *t = 0);
            since_improvement = 0;
            continue;
        }
        let i = pick.unwrap();
        state.flip(i);
        tabu_until[i] = iter + tenure;
        // Confirm improvements against the exact energy: the incremental
        // accumulator drifts by rounding, and treating a revisited state as
        // an improvement would reset the stagnation counter forever.
        if state.energy < best_energy - 1e-15 {
            let exact = state.exact_energy();
            if exact < best_energy - 1e-15 {
                best_energy = exact;
                best_z = state.z.clone();
                since_improvement = 0;
            } else {
                state.energy = exact;
                since_improvement += 1;
            }
        } else {
            since_improvement += 1;
        }
    }

    let raw = Portfolio::from_z(inst, best_z)?;
    let best = greedy_project(inst, &raw.z)?;
    Ok(SolveResult {
        solver: SolverKind::TabuPenalty,
        best,
        raw_best: Some(raw),
        wall_clock_s: start.elapsed().as_secs_f64(),
        iterations: iter,
        budget_s: cfg.budget_s,
        proven_optimal: false,
    })
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| (rng::uniform(rng) < 0.5) as u8).collect()
}

/// Uniform random state with exactly k ones (partial Fisher-Yates).
fn random_k_subset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<u8> {
    let mut idx: Vec<usize> = (0..n).collect();
    let k = k.min(n);
    for t in 0..k {
        let r = t + ((rng::uniform(rng) * (n - t) as f64) as usize).min(n - t - 1);
        idx.swap(t, r);
    }
    let mut z = vec![0u8; n];
    for &i in &idx[..k] {
        z[i] = 1;
    }
    z
}

/// Kick applied to `best` before resuming the walk: exchange one or two
/// selected indices with unselected ones. Preserving the count keeps the
/// restart on (or near) the feasible shell, and the two-exchange variant
/// is exactly the move single-flip descent cannot compose when a pair of
/// assets only pays off jointly. Degenerate states fall back to one flip.
fn perturb(rng: &mut ChaCha8Rng, best: &[u8]) -> Vec<u8> {
    let n = best.len();
    let mut z = best.to_vec();
    let ones: Vec<usize> = (0..n).filter(|&i| z[i] == 1).collect();
    let zeros: Vec<usize> = (0..n).filter(|&i| z[i] == 0).collect();
    let width = if rng::uniform(rng) < 0.5 { 1 } else { 2 };
    let swaps = width.min(ones.len()).min(zeros.len());
    if swaps == 0 {
        let i = (rng::uniform(rng) * n as f64) as usize;
        z[i.min(n - 1)] ^= 1;
        return z;
    }
    for (pool, fill) in [(&ones, 0u8), (&zeros, 1u8)] {
        let mut pool = pool.clone();
        for _ in 0..swaps {
            let r = (rng::uniform(rng) * pool.len() as f64) as usize;
            let i = pool.swap_remove(r.min(pool.len() - 1));
            z[i] = fill;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::build_penalty_qubo;
    use crate::instances::{generate, Family, GeneratorConfig};
    use crate::solvers::exact_solve;

    #[test]
    fn needs_some_stopping_rule() {
        let inst = generate(Family::Dense, 6, 0, &GeneratorConfig::default()).unwrap();
        let q = build_penalty_qubo(&inst, 4.0).unwrap();
        let cfg = TabuConfig {
            budget_s: None,
            max_iterations: None,
            seed: 0,
        };
        assert!(tabu_search(&inst, &q, &cfg).is_err());
    }

    #[test]
    fn iteration_capped_run_is_deterministic_and_optimal_at_n10() {
        let gen_cfg = GeneratorConfig::default();
        for family in Family::ALL {
            let inst = generate(family, 10, 2, &gen_cfg).unwrap();
            let q = build_penalty_qubo(&inst, 4.0).unwrap();
            let oracle = exact_solve(&inst).unwrap();
            let cfg = TabuConfig {
                budget_s: None,
                max_iterations: Some(5000),
                seed: 3,
            };
            let a = tabu_search(&inst, &q, &cfg).unwrap();
            let b = tabu_search(&inst, &q, &cfg).unwrap();
            assert_eq!(a.best.z, b.best.z);
            assert_eq!(a.iterations, 5000);
            assert!(
                (a.best.objective - oracle.best.objective).abs() < 1e-9,
                "{family}: tabu {} oracle {}",
                a.best.objective,
                oracle.best.objective
            );
        }
    }

    #[test]
    fn tiny_budget_still_returns_feasible_portfolio() {
        let inst = generate(Family::Block, 16, 0, &GeneratorConfig::default()).unwrap();
        let q = build_penalty_qubo(&inst, 4.0).unwrap();
        let cfg = TabuConfig {
            budget_s: Some(0.01),
            max_iterations: None,
            seed: 0,
        };
        let res = tabu_search(&inst, &q, &cfg).unwrap();
        assert!(res.best.feasible);
        assert!(res.raw_best.is_some());
    }
}
