//! Synthetic instance families for the cardinality-constrained
//! mean-variance-turnover problem.
//!
//! Three covariance families span the off-diagonal density axis:
//! `diagonal` (near-banded, density about 2/n), `block` (equicorrelated
//! contiguous blocks, density roughly 0.11 to 0.25), and `dense` (rescaled
//! Wishart, density 1). Expected returns, variances, structure draws and the
//! previous portfolio come from independent seed streams, so instances are
//! byte-reproducible from `(family, n, seed, config)`.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, StreamTag};
use crate::SCHEMA_VERSION;

/// Zero tolerance when classifying off-diagonal support.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Diagonal,
    Block,
    Dense,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Diagonal, Family::Block, Family::Dense];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Diagonal => "diagonal",
            Family::Block => "block",
            Family::Dense => "dense",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal" => Ok(Family::Diagonal),
            "block" => Ok(Family::Block),
            "dense" => Ok(Family::Dense),
            other => Err(Error::InvalidConfig(format!("unknown family '{other}'"))),
        }
    }
}

/// Knobs for the synthetic generators. Serialized into each instance so a
/// stored file is self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Magnitude of first-off-diagonal noise in the diagonal family.
    pub epsilon_nn: f64,
    /// Fraction of first-off-diagonal slots that carry noise.
    pub band_coverage: f64,
    pub mu_mean: f64,
    pub mu_std: f64,
    pub var_low: f64,
    pub var_high: f64,
    /// Within-block correlation of the block family.
    pub block_rho: f64,
    /// Block size rule: clamp(round(block_frac * n) + 1, 3, n/2).
    pub block_frac: f64,
    /// Wishart degrees of freedom as a multiple of n.
    pub wishart_df_factor: usize,
    /// Constant per-asset turnover cost.
    pub tau_const: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            epsilon_nn: 0.02,
            band_coverage: 0.95,
            mu_mean: 0.05,
            mu_std: 0.02,
            var_low: 0.02,
            var_high: 0.08,
            block_rho: 0.3,
            block_frac: 0.15,
            wishart_df_factor: 2,
            tau_const: 0.005,
        }
    }
}

/// One problem instance. `sigma` is the dense row-major covariance matrix;
/// symmetry and positive definiteness are generation invariants checked by
/// [`ProblemInstance::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub schema_version: u32,
    pub instance_id: String,
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub lambda: f64,
    pub mu: Vec<f64>,
    pub tau: Vec<f64>,
    pub z_prev: Vec<u8>,
    pub sigma: Vec<f64>,
    pub generator_config: GeneratorConfig,
}

impl ProblemInstance {
    #[inline]
    pub fn sigma_at(&self, i: usize, j: usize) -> f64 {
        self.sigma[i * self.n + j]
    }

    /// Linearized turnover coefficient tau_i * (1 - 2 z_prev_i).
    #[inline]
    pub fn tau_shift(&self, i: usize) -> f64 {
        self.tau[i] * (1.0 - 2.0 * self.z_prev[i] as f64)
    }

    /// Constant term sum_i tau_i * z_prev_i of the linearized turnover.
    pub fn tau_offset(&self) -> f64 {
        self.tau
            .iter()
            .zip(&self.z_prev)
            .map(|(t, &zp)| t * zp as f64)
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidDimension("n must be positive".into()));
        }
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidConfig(format!(
                "k={} outside 1..={n}",
                self.k
            )));
        }
        if self.mu.len() != n || self.tau.len() != n || self.z_prev.len() != n {
            return Err(Error::LengthMismatch(format!(
                "mu/tau/z_prev must have length n={n}"
            )));
        }
        if self.sigma.len() != n * n {
            return Err(Error::LengthMismatch(format!(
                "sigma has {} entries, expected {}",
                self.sigma.len(),
                n * n
            )));
        }
        if self.tau.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidConfig("tau must be nonnegative".into()));
        }
        if self.z_prev.iter().any(|&b| b > 1) {
            return Err(Error::InvalidConfig("z_prev entries must be 0/1".into()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (self.sigma_at(i, j) - self.sigma_at(j, i)).abs() > SUPPORT_TOL {
                    return Err(Error::InvalidConfig(format!(
                        "sigma not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        if !cholesky_ok(&self.sigma, n) {
            return Err(Error::InvalidConfig(
                "sigma is not positive definite".into(),
            ));
        }
        Ok(())
    }
}

/// Cardinality used by the generators: nearest integer to 0.3 n, at least 1.
pub fn default_k(n: usize) -> usize {
    ((0.3 * n as f64).round() as usize).clamp(1, n)
}

/// Block size rule for the block family.
pub fn block_size(n: usize, frac: f64) -> usize {
    let raw = (frac * n as f64).round() as usize + 1;
    let hi = (n / 2).max(3);
    raw.clamp(3, hi)
}

/// Contiguous block sizes: ceil(n/b) blocks, sizes as even as possible.
pub fn block_partition(n: usize, b: usize) -> Vec<usize> {
    let m = n.div_ceil(b);
    let q = n / m;
    let r = n % m;
    let mut sizes = vec![q + 1; r];
    sizes.extend(std::iter::repeat(q).take(m - r));
    sizes
}

/// Fraction of strictly-upper entries with magnitude above `tol`.
pub fn offdiag_density(sigma: &[f64], n: usize, tol: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut nonzero = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if sigma[i * n + j].abs() > tol {
                nonzero += 1;
            }
        }
    }
    nonzero as f64 / (n * (n - 1) / 2) as f64
}

pub fn cholesky_ok(sigma: &[f64], n: usize) -> bool {
    DMatrix::from_row_slice(n, n, sigma).cholesky().is_some()
}

fn min_eigenvalue(sigma: &[f64], n: usize) -> f64 {
    let m = DMatrix::from_row_slice(n, n, sigma);
    let eig = m.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Generate an instance of the requested family.
pub fn generate(family: Family, n: usize, seed: u64, cfg: &GeneratorConfig) -> Result<ProblemInstance> {
    match family {
        Family::Diagonal => gen_diagonal(n, seed, cfg),
        Family::Block => gen_block(n, seed, cfg),
        Family::Dense => gen_dense(n, seed, cfg),
    }
}

fn draw_mu(n: usize, seed: u64, cfg: &GeneratorConfig) -> Vec<f64> {
    let mut r = rng::stream(seed, StreamTag::Mu, 0);
    (0..n).map(|_| cfg.mu_mean + cfg.mu_std * rng::normal(&mut r)).collect()
}

fn draw_variances(n: usize, seed: u64, cfg: &GeneratorConfig) -> Vec<f64> {
    let mut r = rng::stream(seed, StreamTag::Variance, 0);
    (0..n).map(|_| rng::uniform_in(&mut r, cfg.var_low, cfg.var_high)).collect()
}

fn draw_z_prev(n: usize, k: usize, seed: u64) -> Vec<u8> {
    let mut r = rng::stream(seed, StreamTag::PrevPortfolio, 0);
    let picked = rng::choose_indices(&mut r, n, k);
    let mut z = vec![0u8; n];
    for i in picked {
        z[i] = 1;
    }
    z
}

fn assemble(
    family: Family,
    n: usize,
    seed: u64,
    cfg: &GeneratorConfig,
    sigma: Vec<f64>,
) -> ProblemInstance {
    let k = default_k(n);
    ProblemInstance {
        schema_version: SCHEMA_VERSION,
        instance_id: format!("{family}-n{n:03}-k{k:02}-s{seed:03}"),
        family,
        n,
        k,
        seed,
        lambda: 0.5,
        mu: draw_mu(n, seed, cfg),
        tau: vec![cfg.tau_const; n],
        z_prev: draw_z_prev(n, default_k(n), seed),
        sigma,
        generator_config: cfg.clone(),
    }
}

/// Near-banded family: variances on the diagonal, +/- epsilon noise on a
/// seeded subset of ceil(band_coverage * (n-1)) first-off-diagonal slots,
/// then a uniform diagonal inflation of |lambda_min| + 1e-8 if the result is
/// not positive definite. Off-diagonal density is (kept slots) / C(n,2),
/// about 2/n.
pub fn gen_diagonal(n: usize, seed: u64, cfg: &GeneratorConfig) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "diagonal family needs n >= 2, got {n}"
        )));
    }
    let vars = draw_variances(n, seed, cfg);
    let mut sigma = vec![0.0; n * n];
    for (i, v) in vars.iter().enumerate() {
        sigma[i * n + i] = *v;
    }
    let slots = n - 1;
    let keep = ((cfg.band_coverage * slots as f64).ceil() as usize).min(slots);
    let mut r = rng::stream(seed, StreamTag::Structure, 0);
    let chosen = rng::choose_indices(&mut r, slots, keep);
    for s in chosen {
        let sign = if rng::uniform(&mut r) < 0.5 { -1.0 } else { 1.0 };
        let v = sign * cfg.epsilon_nn;
        sigma[s * n + (s + 1)] = v;
        sigma[(s + 1) * n + s] = v;
    }
    if !cholesky_ok(&sigma, n) {
        let lam = min_eigenvalue(&sigma, n);
        let bump = lam.abs() + 1e-8;
        for i in 0..n {
            sigma[i * n + i] += bump;
        }
    }
    let density = offdiag_density(&sigma, n, SUPPORT_TOL);
    let (lo, hi) = (1.5 / n as f64, 2.5 / n as f64);
    if density < lo || density > hi {
        return Err(Error::InvalidConfig(format!(
            "diagonal density {density} outside [{lo}, {hi}] at n={n}"
        )));
    }
    Ok(assemble(Family::Diagonal, n, seed, cfg, sigma))
}

/// Block family: contiguous equicorrelated blocks with correlation
/// `block_rho`, zero across blocks. Positive definite by construction for
/// rho in (-1/(b-1), 1). The density band [0.11, 0.25] is enforced for
/// n >= 10; below that the few-blocks geometry can exceed it.
pub fn gen_block(n: usize, seed: u64, cfg: &GeneratorConfig) -> Result<ProblemInstance> {
    if n < 4 {
        return Err(Error::InvalidDimension(format!(
            "block family needs n >= 4, got {n}"
        )));
    }
    let b = block_size(n, cfg.block_frac);
    if b < 2 {
        return Err(Error::InvalidConfig(format!(
            "block rule produced size {b} < 2"
        )));
    }
    let vars = draw_variances(n, seed, cfg);
    let sizes = block_partition(n, b);
    let mut sigma = vec![0.0; n * n];
    let mut start = 0usize;
    for sz in &sizes {
        for i in start..start + sz {
            for j in start..start + sz {
                sigma[i * n + j] = if i == j {
                    vars[i]
                } else {
                    cfg.block_rho * (vars[i] * vars[j]).sqrt()
                };
            }
        }
        start += sz;
    }
    if !cholesky_ok(&sigma, n) {
        return Err(Error::InvalidConfig(
            "block covariance unexpectedly not positive definite".into(),
        ));
    }
    let density = offdiag_density(&sigma, n, SUPPORT_TOL);
    if n >= 10 && !(0.11..=0.25).contains(&density) {
        return Err(Error::InvalidConfig(format!(
            "block density {density} outside [0.11, 0.25] at n={n}"
        )));
    }
    Ok(assemble(Family::Block, n, seed, cfg, sigma))
}

/// Dense family: Wishart draw W = G G^T / m with m = wishart_df_factor * n,
/// rescaled so the diagonal lands on fresh U(var_low, var_high) variances,
/// plus 1e-8 jitter. All off-diagonals are nonzero almost surely.
pub fn gen_dense(n: usize, seed: u64, cfg: &GeneratorConfig) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "dense family needs n >= 2, got {n}"
        )));
    }
    let m = cfg.wishart_df_factor * n;
    if m < n {
        return Err(Error::InvalidConfig(format!(
            "wishart df {m} below n={n}"
        )));
    }
    let mut r: ChaCha8Rng = rng::stream(seed, StreamTag::Structure, 0);
    let g: Vec<f64> = (0..n * m).map(|_| rng::normal(&mut r)).collect();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for t in 0..m {
                acc += g[i * m + t] * g[j * m + t];
            }
            let v = acc / m as f64;
            w[i * n + j] = v;
            w[j * n + i] = v;
        }
    }
    let vars = draw_variances(n, seed, cfg);
    let mut sigma = vec![0.0; n * n];
    for i in 0..n {
        if w[i * n + i] <= 0.0 {
            return Err(Error::InvalidConfig(
                "degenerate wishart diagonal".into(),
            ));
        }
    }
    for i in 0..n {
        for j in 0..n {
            sigma[i * n + j] = if i == j {
                vars[i] + 1e-8
            } else {
                w[i * n + j] * (vars[i] * vars[j] / (w[i * n + i] * w[j * n + j])).sqrt()
            };
        }
    }
    if !cholesky_ok(&sigma, n) {
        return Err(Error::InvalidConfig(
            "dense covariance unexpectedly not positive definite".into(),
        ));
    }
    let density = offdiag_density(&sigma, n, SUPPORT_TOL);
    if density < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "dense density {density} below 1.0 at n={n}"
        )));
    }
    Ok(assemble(Family::Dense, n, seed, cfg, sigma))
}

pub fn save_instances(instances: &[ProblemInstance], path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?,
    );
    for inst in instances {
        serde_json::to_writer(&mut out, inst)?;
        out.write_all(b"\n")
            .map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    out.flush()
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

pub fn load_instances(path: &Path) -> Result<Vec<ProblemInstance>> {
    let file =
        std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let inst: ProblemInstance = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        inst.validate().map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        out.push(inst);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_k_rounds_to_nearest() {
        assert_eq!(default_k(10), 3);
        assert_eq!(default_k(16), 5);
        assert_eq!(default_k(20), 6);
        assert_eq!(default_k(22), 7);
        assert_eq!(default_k(80), 24);
        assert_eq!(default_k(2), 1); // floor at 1
    }

    #[test]
    fn diagonal_density_matches_band_model() {
        let cfg = GeneratorConfig::default();
        let inst = gen_diagonal(10, 0, &cfg).unwrap();
        // ceil(0.95 * 9) = 9 kept slots out of C(10,2) = 45 pairs.
        let d = offdiag_density(&inst.sigma, 10, SUPPORT_TOL);
        assert!((d - 0.20).abs() < 1e-12, "density {d}");

        let inst = gen_diagonal(200, 1, &cfg).unwrap();
        let d = offdiag_density(&inst.sigma, 200, SUPPORT_TOL);
        // ceil(0.95 * 199) = 190 slots out of 19900 pairs.
        assert!((d - 190.0 / 19900.0).abs() < 1e-12);
        assert!(d < 0.01);
    }

    #[test]
    fn diagonal_band_holds_across_sizes() {
        let cfg = GeneratorConfig::default();
        for n in [10usize, 30, 80, 120, 200] {
            let inst = gen_diagonal(n, 3, &cfg).unwrap();
            let d = offdiag_density(&inst.sigma, n, SUPPORT_TOL);
            assert!(d >= 1.5 / n as f64 && d <= 2.5 / n as f64, "n={n} d={d}");
        }
    }

    #[test]
    fn diagonal_noise_sits_on_first_offdiagonal_only() {
        let inst = gen_diagonal(12, 5, &GeneratorConfig::default()).unwrap();
        for i in 0..12 {
            for j in (i + 2)..12 {
                assert_eq!(inst.sigma_at(i, j), 0.0, "({i},{j}) should be zero");
            }
        }
    }

    #[test]
    fn block_size_rule_frozen_values() {
        assert_eq!(block_size(10, 0.15), 3);
        assert_eq!(block_size(20, 0.15), 4);
        assert_eq!(block_size(30, 0.15), 6);
        assert_eq!(block_size(80, 0.15), 13);
        assert_eq!(block_size(640, 0.15), 97);
        // Lower clamp engages for small n.
        assert_eq!(block_size(4, 0.15), 3);
    }

    #[test]
    fn block_partition_even_and_complete() {
        assert_eq!(block_partition(10, 3), vec![3, 3, 2, 2]);
        assert_eq!(block_partition(12, 3), vec![3, 3, 3, 3]);
        assert_eq!(block_partition(80, 13), vec![12, 12, 12, 11, 11, 11, 11]);
        for n in 4..200 {
            let b = block_size(n, 0.15);
            let sizes = block_partition(n, b);
            assert_eq!(sizes.iter().sum::<usize>(), n);
            assert!(sizes.iter().all(|&s| s >= 1 && s <= b));
        }
    }

    #[test]
    fn block_density_frozen_cases() {
        let cfg = GeneratorConfig::default();
        // n=10 partitions as [3,3,2,2]: 8 within-block pairs over 45.
        let inst = gen_block(10, 0, &cfg).unwrap();
        let d = offdiag_density(&inst.sigma, 10, SUPPORT_TOL);
        assert!((d - 8.0 / 45.0).abs() < 1e-12, "density {d}");
        // n=12 divides evenly into blocks of 3: density (b-1)/(n-1) = 2/11.
        let inst = gen_block(12, 0, &cfg).unwrap();
        let d = offdiag_density(&inst.sigma, 12, SUPPORT_TOL);
        assert!((d - 2.0 / 11.0).abs() < 1e-12, "density {d}");
    }

    #[test]
    fn block_band_holds_for_benchmark_sizes() {
        let cfg = GeneratorConfig::default();
        for n in [10usize, 16, 20, 22, 30, 50, 80, 120, 200] {
            let inst = gen_block(n, 7, &cfg).unwrap();
            let d = offdiag_density(&inst.sigma, n, SUPPORT_TOL);
            assert!((0.11..=0.25).contains(&d), "n={n} d={d}");
        }
    }

    #[test]
    fn block_has_no_cross_block_correlation() {
        let cfg = GeneratorConfig::default();
        let inst = gen_block(10, 2, &cfg).unwrap();
        // sizes [3,3,2,2] -> asset 0 and asset 5 live in different blocks.
        assert_eq!(inst.sigma_at(0, 5), 0.0);
        assert_eq!(inst.sigma_at(0, 9), 0.0);
        assert!(inst.sigma_at(0, 1).abs() > 0.0);
    }

    #[test]
    fn dense_is_fully_dense_with_target_variances() {
        let cfg = GeneratorConfig::default();
        let inst = gen_dense(15, 4, &cfg).unwrap();
        assert_eq!(offdiag_density(&inst.sigma, 15, SUPPORT_TOL), 1.0);
        for i in 0..15 {
            let v = inst.sigma_at(i, i);
            assert!(v >= cfg.var_low && v <= cfg.var_high + 1e-6, "var {v}");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GeneratorConfig::default();
        for family in Family::ALL {
            let a = generate(family, 12, 9, &cfg).unwrap();
            let b = generate(family, 12, 9, &cfg).unwrap();
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap()
            );
        }
    }

    #[test]
    fn seeds_change_content() {
        let cfg = GeneratorConfig::default();
        let a = gen_dense(10, 0, &cfg).unwrap();
        let b = gen_dense(10, 1, &cfg).unwrap();
        assert_ne!(a.mu, b.mu);
        assert_ne!(a.sigma, b.sigma);
    }

    #[test]
    fn instances_validate_and_have_exact_k_prev_portfolio() {
        let cfg = GeneratorConfig::default();
        for family in Family::ALL {
            for seed in 0..3u64 {
                let inst = generate(family, 14, seed, &cfg).unwrap();
                inst.validate().unwrap();
                let held: u32 = inst.z_prev.iter().map(|&b| b as u32).sum();
                assert_eq!(held as usize, inst.k);
                assert!(inst.tau.iter().all(|&t| t == cfg.tau_const));
                assert_eq!(inst.lambda, 0.5);
            }
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let cfg = GeneratorConfig::default();
        let instances: Vec<_> = Family::ALL
            .iter()
            .map(|&f| generate(f, 10, 1, &cfg).unwrap())
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.jsonl");
        save_instances(&instances, &path).unwrap();
        let loaded = load_instances(&path).unwrap();
        assert_eq!(instances, loaded);
    }

    #[test]
    fn load_reports_bad_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        let cfg = GeneratorConfig::default();
        let inst = gen_dense(6, 0, &cfg).unwrap();
        let good = serde_json::to_string(&inst).unwrap();
        std::fs::write(&path, format!("{good}\nnot json\n")).unwrap();
        match load_instances(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_broken_instances() {
        let cfg = GeneratorConfig::default();
        let mut inst = gen_dense(6, 0, &cfg).unwrap();
        inst.k = 0;
        assert!(inst.validate().is_err());

        let mut inst = gen_dense(6, 0, &cfg).unwrap();
        inst.sigma[1] += 1.0; // breaks symmetry
        assert!(inst.validate().is_err());

        let mut inst = gen_dense(6, 0, &cfg).unwrap();
        for i in 0..6 {
            inst.sigma[i * 6 + i] = -1.0;
        }
        assert!(inst.validate().is_err());
    }

    #[test]
    fn too_small_n_rejected() {
        let cfg = GeneratorConfig::default();
        assert!(gen_diagonal(1, 0, &cfg).is_err());
        assert!(gen_block(3, 0, &cfg).is_err());
        assert!(gen_dense(1, 0, &cfg).is_err());
    }
}
