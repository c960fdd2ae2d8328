//! Degree-counting model of minor-embedding overhead on fixed-degree
//! annealer topologies, plus a coarse chain-break probability model.
//!
//! Embedding a complete logical graph on N variables into a host of maximum
//! degree d needs at least N(N-1)/d physical qubits: the N(N-1) logical edge
//! endpoints must be distributed over chains whose members supply at most d
//! couplers each.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySpec {
    pub name: String,
    /// Maximum qubit degree of the host graph.
    pub degree: u32,
}

impl TopologySpec {
    pub fn pegasus() -> Self {
        TopologySpec {
            name: "pegasus".into(),
            degree: 15,
        }
    }

    pub fn zephyr() -> Self {
        TopologySpec {
            name: "zephyr".into(),
            degree: 20,
        }
    }
}

/// Lower bound N(N-1)/d on physical qubits for a complete logical graph.
pub fn embedding_lower_bound(n: usize, topo: &TopologySpec) -> Result<f64> {
    if topo.degree == 0 {
        return Err(Error::InvalidConfig("topology degree must be positive".into()));
    }
    Ok((n as f64) * (n as f64 - 1.0) / topo.degree as f64)
}

/// Integer version of the bound, reported alongside the real value.
pub fn embedding_lower_bound_ceil(n: usize, topo: &TopologySpec) -> Result<u64> {
    Ok(embedding_lower_bound(n, topo)?.ceil() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainModelParams {
    /// Per-coupler independent break probability in [0, 1].
    pub p_link: f64,
    /// Mean chain length (physical qubits per logical variable), >= 1.
    pub mean_chain_len: f64,
}

/// Probability that a chain of ceil(mean_chain_len) qubits breaks when each
/// of its internal couplers fails independently with p_link:
/// 1 - (1 - p)^(ceil(L) - 1). Monotone in both arguments.
pub fn chain_break_probability(params: &ChainModelParams) -> Result<f64> {
    let ChainModelParams {
        p_link,
        mean_chain_len,
    } = *params;
    if !(0.0..=1.0).contains(&p_link) {
        return Err(Error::InvalidConfig(format!(
            "p_link {p_link} outside [0, 1]"
        )));
    }
    if !(mean_chain_len >= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "mean chain length {mean_chain_len} below 1"
        )));
    }
    let links = mean_chain_len.ceil() as i32 - 1;
    Ok(1.0 - (1.0 - p_link).powi(links))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverheadFlag {
    Ok,
    /// Observed physical count below the structural lower bound.
    BelowBound,
    NoObservation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadRow {
    pub n: usize,
    pub degree: u32,
    pub bound_real: f64,
    pub bound_ceil: u64,
    pub observed_phys: Option<f64>,
    /// observed / bound_real; absent without an observation.
    pub ratio: Option<f64>,
    pub flag: OverheadFlag,
}

/// Tabulate the bound over a size grid, joining observed physical-qubit
/// counts where available. Observations below the bound are kept but
/// flagged: the bound is structural, so such a record is inconsistent.
pub fn overhead_table(
    n_grid: &[usize],
    topo: &TopologySpec,
    observed: &std::collections::BTreeMap<usize, f64>,
) -> Result<Vec<OverheadRow>> {
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let bound_real = embedding_lower_bound(n, topo)?;
        let bound_ceil = bound_real.ceil() as u64;
        let (observed_phys, ratio, flag) = match observed.get(&n) {
            Some(&obs) => {
                let flag = if obs + 1e-9 < bound_real {
                    OverheadFlag::BelowBound
                } else {
                    OverheadFlag::Ok
                };
                let ratio = if bound_real > 0.0 {
                    Some(obs / bound_real)
                } else {
                    None
                };
                (Some(obs), ratio, flag)
            }
            None => (None, None, OverheadFlag::NoObservation),
        };
        rows.push(OverheadRow {
            n,
            degree: topo.degree,
            bound_real,
            bound_ceil,
            observed_phys,
            ratio,
            flag,
        });
    }
    Ok(rows)
}

/// CSV rendering with columns n,d,bound_real,bound_ceil,observed_phys,ratio,flag.
pub fn overhead_table_csv(rows: &[OverheadRow]) -> String {
    let mut out = String::from("n,d,bound_real,bound_ceil,observed_phys,ratio,flag\n");
    for r in rows {
        let obs = r
            .observed_phys
            .map(|v| v.to_string())
            .unwrap_or_default();
        let ratio = r.ratio.map(|v| v.to_string()).unwrap_or_default();
        let flag = match r.flag {
            OverheadFlag::Ok => "ok",
            OverheadFlag::BelowBound => "below_bound",
            OverheadFlag::NoObservation => "no_observation",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n, r.degree, r.bound_real, r.bound_ceil, obs, ratio, flag
        ));
    }
    out
}
