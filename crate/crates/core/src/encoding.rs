//! Two encodings of the MVT objective and the structural analysis of what
//! each does to off-diagonal support.
//!
//! The penalty encoding folds the cardinality constraint into the quadratic
//! via A (1^T z - k)^2, which adds A to every off-diagonal coefficient and
//! generically completes the coupling graph. The constraint-native encoding
//! keeps the constraint as metadata and leaves the quadratic support equal
//! to the covariance support.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{ProblemInstance, SUPPORT_TOL};

/// Symmetric QUBO: energy(z) = z^T q z + offset, with q stored dense
/// row-major and off-diagonal pairs counted once per unordered pair in the
/// analysis helpers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedQubo {
    pub n: usize,
    pub k: usize,
    pub penalty_a: f64,
    pub q: Vec<f64>,
    pub offset: f64,
    pub source_instance_id: String,
}

impl EncodedQubo {
    #[inline]
    pub fn q_at(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    /// z^T q z + offset for a 0/1 vector.
    pub fn energy(&self, z: &[u8]) -> f64 {
        let n = self.n;
        let mut acc = self.offset;
        for i in 0..n {
            if z[i] == 0 {
                continue;
            }
            acc += self.q_at(i, i);
            for j in (i + 1)..n {
                if z[j] == 1 {
                    acc += 2.0 * self.q_at(i, j);
                }
            }
        }
        acc
    }
}

/// Matrix coefficient convention for serialized QUBO exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuboConvention {
    /// q_ij = q_ji, energy counts each unordered pair twice.
    Symmetric,
    /// Upper-triangular with doubled off-diagonals, energy counts once.
    Upper,
}

/// Serializable export of an [`EncodedQubo`] under an explicit convention.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuboExport {
    pub schema_version: u32,
    pub n: usize,
    pub k: usize,
    pub penalty_a: f64,
    pub offset: f64,
    pub convention: QuboConvention,
    pub q: Vec<f64>,
    pub source_instance_id: String,
}

/// Linear equality constraint a^T z = rhs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

/// Constraint-native model: quadratic + linear objective with the
/// cardinality constraint kept separate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedModel {
    pub n: usize,
    pub k: usize,
    /// Quadratic objective lambda * sigma, dense row-major.
    pub q_obj: Vec<f64>,
    pub linear_obj: Vec<f64>,
    pub obj_offset: f64,
    pub constraint: LinearConstraint,
    pub source_instance_id: String,
}

impl ConstrainedModel {
    #[inline]
    pub fn q_at(&self, i: usize, j: usize) -> f64 {
        self.q_obj[i * self.n + j]
    }

    /// Objective value for a 0/1 vector (constraint not enforced here).
    pub fn objective(&self, z: &[u8]) -> f64 {
        let n = self.n;
        let mut acc = self.obj_offset;
        for i in 0..n {
            if z[i] == 0 {
                continue;
            }
            acc += self.linear_obj[i] + self.q_at(i, i);
            for j in (i + 1)..n {
                if z[j] == 1 {
                    acc += 2.0 * self.q_at(i, j);
                }
            }
        }
        acc
    }

    pub fn is_feasible(&self, z: &[u8]) -> bool {
        let lhs: f64 = self
            .constraint
            .coeffs
            .iter()
            .zip(z)
            .map(|(c, &b)| c * b as f64)
            .sum();
        (lhs - self.constraint.rhs).abs() < 1e-9
    }
}

/// Off-diagonal support comparison between an original cost matrix and its
/// encoded counterpart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub n: usize,
    pub e_orig: usize,
    pub e_enc: usize,
    /// Density amplification; serialized as the string "inf" when the
    /// original support is empty and the encoded one is not.
    #[serde(
        serialize_with = "ser_damp",
        deserialize_with = "de_damp"
    )]
    pub d_amp: f64,
    pub is_complete: bool,
    /// Pairs (i, j), i < j, where the penalty shift exactly cancelled an
    /// original coefficient. Empty for generic penalty values.
    pub cancelled_pairs: Vec<(usize, usize)>,
}

fn ser_damp<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_damp<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    use serde::de::Error as _;
    let v = serde_json::Value::deserialize(d)?;
    match v {
        serde_json::Value::Number(num) => num
            .as_f64()
            .ok_or_else(|| D::Error::custom("d_amp not representable as f64")),
        serde_json::Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        other => Err(D::Error::custom(format!("bad d_amp value {other}"))),
    }
}

/// Rewrite |z_i - z_prev_i| as z_prev_i + (1 - 2 z_prev_i) z_i, returning
/// the per-asset linear coefficients and the constant term.
pub fn linearize_turnover(z_prev: &[u8], tau: &[f64]) -> Result<(Vec<f64>, f64)> {
    if z_prev.len() != tau.len() {
        return Err(Error::LengthMismatch(format!(
            "z_prev has {} entries, tau has {}",
            z_prev.len(),
            tau.len()
        )));
    }
    let coeffs: Vec<f64> = tau
        .iter()
        .zip(z_prev)
        .map(|(t, &zp)| t * (1.0 - 2.0 * zp as f64))
        .collect();
    let constant = tau
        .iter()
        .zip(z_prev)
        .map(|(t, &zp)| t * zp as f64)
        .sum();
    Ok((coeffs, constant))
}

/// Penalty encoding: q_ij = lambda sigma_ij + A off the diagonal and
/// q_ii = -mu_i + lambda sigma_ii + A - 2 A k + tau_i (1 - 2 z_prev_i),
/// with offset A k^2 + tau^T z_prev. Energy then equals the MVT objective
/// plus A (1^T z - k)^2 for every 0/1 vector.
pub fn build_penalty_qubo(inst: &ProblemInstance, penalty_a: f64) -> Result<EncodedQubo> {
    if !(penalty_a > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "penalty must be positive, got {penalty_a}"
        )));
    }
    let n = inst.n;
    let k = inst.k as f64;
    let (tau_shift, tau_const) = linearize_turnover(&inst.z_prev, &inst.tau)?;
    let mut q = vec![0.0; n * n];
    let mut cancelled = 0usize;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                q[i * n + i] = -inst.mu[i] + inst.lambda * inst.sigma_at(i, i) + penalty_a
                    - 2.0 * penalty_a * k
                    + tau_shift[i];
            } else {
                let v = inst.lambda * inst.sigma_at(i, j) + penalty_a;
                if v.abs() <= SUPPORT_TOL && inst.sigma_at(i, j).abs() > SUPPORT_TOL {
                    cancelled += 1;
                }
                q[i * n + j] = v;
            }
        }
    }
    if cancelled > 0 {
        log::warn!(
            "penalty {penalty_a} cancels {} off-diagonal coefficients of {}",
            cancelled / 2,
            inst.instance_id
        );
    }
    Ok(EncodedQubo {
        n,
        k: inst.k,
        penalty_a,
        q,
        offset: penalty_a * k * k + tau_const,
        source_instance_id: inst.instance_id.clone(),
    })
}

/// Constraint-native encoding: quadratic lambda sigma, linear
/// -mu_i + tau_i (1 - 2 z_prev_i), offset tau^T z_prev, and an explicit
/// all-ones equality constraint at k.
pub fn build_cqm(inst: &ProblemInstance) -> Result<ConstrainedModel> {
    let n = inst.n;
    let (tau_shift, tau_const) = linearize_turnover(&inst.z_prev, &inst.tau)?;
    let q_obj: Vec<f64> = inst.sigma.iter().map(|s| inst.lambda * s).collect();
    let linear_obj: Vec<f64> = (0..n).map(|i| -inst.mu[i] + tau_shift[i]).collect();
    Ok(ConstrainedModel {
        n,
        k: inst.k,
        q_obj,
        linear_obj,
        obj_offset: tau_const,
        constraint: LinearConstraint {
            coeffs: vec![1.0; n],
            rhs: inst.k as f64,
        },
        source_instance_id: inst.instance_id.clone(),
    })
}

impl EncodedQubo {
    pub fn export(&self, convention: QuboConvention) -> QuboExport {
        let n = self.n;
        let q = match convention {
            QuboConvention::Symmetric => self.q.clone(),
            QuboConvention::Upper => {
                let mut out = vec![0.0; n * n];
                for i in 0..n {
                    out[i * n + i] = self.q_at(i, i);
                    for j in (i + 1)..n {
                        out[i * n + j] = 2.0 * self.q_at(i, j);
                    }
                }
                out
            }
        };
        QuboExport {
            schema_version: crate::SCHEMA_VERSION,
            n,
            k: self.k,
            penalty_a: self.penalty_a,
            offset: self.offset,
            convention,
            q,
            source_instance_id: self.source_instance_id.clone(),
        }
    }
}

/// Unordered index pairs (i < j) whose coefficient magnitude exceeds `tol`.
pub fn offdiag_support(matrix: &[f64], n: usize, tol: f64) -> BTreeSet<(usize, usize)> {
    let mut set = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if matrix[i * n + j].abs() > tol {
                set.insert((i, j));
            }
        }
    }
    set
}

/// Edge-count amplification ratio with the two degenerate cases made
/// explicit: empty original support maps to infinity when the encoding adds
/// edges and to 1 when both supports are empty.
pub fn density_amplification(e_enc: usize, e_orig: usize) -> f64 {
    if e_orig > 0 {
        e_enc as f64 / e_orig as f64
    } else if e_enc > 0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Compare supp_off(c + penalty_a * a a^T) against the prediction
/// supp_off(c) union {(i,j) : a_i a_j != 0}, recording exact cancellations.
pub fn verify_support_theorem(
    c: &[f64],
    n: usize,
    constraint_coeffs: &[f64],
    penalty_a: f64,
) -> Result<SupportReport> {
    if c.len() != n * n {
        return Err(Error::LengthMismatch(format!(
            "cost matrix has {} entries, expected {}",
            c.len(),
            n * n
        )));
    }
    if constraint_coeffs.len() != n {
        return Err(Error::LengthMismatch(format!(
            "constraint has {} coefficients, expected {n}",
            constraint_coeffs.len()
        )));
    }
    let orig = offdiag_support(c, n, SUPPORT_TOL);
    let mut encoded = BTreeSet::new();
    let mut predicted = orig.clone();
    let mut cancelled = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let aa = constraint_coeffs[i] * constraint_coeffs[j];
            let v = c[i * n + j] + penalty_a * aa;
            if v.abs() > SUPPORT_TOL {
                encoded.insert((i, j));
            }
            if aa.abs() > SUPPORT_TOL {
                predicted.insert((i, j));
                if v.abs() <= SUPPORT_TOL {
                    // Penalty landed exactly on -c_ij / (a_i a_j).
                    cancelled.push((i, j));
                }
            }
        }
    }
    // The encoded support must match the prediction minus exact cancellations.
    let mut expected = predicted.clone();
    for pair in &cancelled {
        expected.remove(pair);
    }
    debug_assert_eq!(expected, encoded, "support bookkeeping drift");
    let total_pairs = n * (n - 1) / 2;
    let e_orig = orig.len();
    let e_enc = encoded.len();
    Ok(SupportReport {
        n,
        e_orig,
        e_enc,
        d_amp: density_amplification(e_enc, e_orig),
        is_complete: e_enc == total_pairs,
        cancelled_pairs: cancelled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_dense, generate, Family, GeneratorConfig};
    use crate::solvers::evaluate_mvt;

    fn all_bit_vectors(n: usize) -> impl Iterator<Item = Vec<u8>> {
        (0u64..(1 << n)).map(move |m| (0..n).map(|i| ((m >> i) & 1) as u8).collect())
    }

    #[test]
    fn turnover_linearization_is_exact_per_bit() {
        // |z - zp| == zp + (1 - 2 zp) z over the four bit combinations.
        for zp in [0u8, 1] {
            for z in [0u8, 1] {
                let lhs = (z as f64 - zp as f64).abs();
                let rhs = zp as f64 + (1.0 - 2.0 * zp as f64) * z as f64;
                assert_eq!(lhs, rhs);
            }
        }
        let (coeffs, constant) = linearize_turnover(&[1, 0, 1], &[0.01, 0.02, 0.03]).unwrap();
        assert_eq!(coeffs, vec![-0.01, 0.02, -0.03]);
        assert!((constant - 0.04).abs() < 1e-15);
    }

    #[test]
    fn turnover_length_mismatch_rejected() {
        assert!(linearize_turnover(&[1, 0], &[0.01]).is_err());
    }

    #[test]
    fn pure_penalty_qubo_frozen_example() {
        // n=2, k=1, mu=0, sigma=0, tau=0, A=1.
        let inst = ProblemInstance {
            schema_version: crate::SCHEMA_VERSION,
            instance_id: "manual".into(),
            family: Family::Diagonal,
            n: 2,
            k: 1,
            seed: 0,
            lambda: 0.5,
            mu: vec![0.0, 0.0],
            tau: vec![0.0, 0.0],
            z_prev: vec![0, 0],
            sigma: vec![0.0; 4],
            generator_config: GeneratorConfig::default(),
        };
        let q = build_penalty_qubo(&inst, 1.0).unwrap();
        assert_eq!(q.q, vec![-1.0, 1.0, 1.0, -1.0]);
        assert_eq!(q.offset, 1.0);
        // Feasible states (one bit set) have energy 0, infeasible are higher.
        assert_eq!(q.energy(&[1, 0]), 0.0);
        assert_eq!(q.energy(&[0, 1]), 0.0);
        assert_eq!(q.energy(&[0, 0]), 1.0);
        assert_eq!(q.energy(&[1, 1]), 1.0);
    }

    #[test]
    fn penalty_energy_equals_objective_plus_penalty_everywhere() {
        let cfg = GeneratorConfig::default();
        for family in Family::ALL {
            let inst = generate(family, 8, 2, &cfg).unwrap();
            let q = build_penalty_qubo(&inst, 4.0).unwrap();
            for z in all_bit_vectors(8) {
                let count: i64 = z.iter().map(|&b| b as i64).sum();
                let viol = (count - inst.k as i64) as f64;
                let expect = evaluate_mvt(&inst, &z).unwrap() + 4.0 * viol * viol;
                let got = q.energy(&z);
                assert!(
                    (got - expect).abs() <= 1e-9,
                    "{family} z={z:?} got {got} expect {expect}"
                );
            }
        }
    }

    #[test]
    fn cqm_objective_equals_mvt_on_and_off_feasible_set() {
        let cfg = GeneratorConfig::default();
        let inst = generate(Family::Block, 9, 5, &cfg).unwrap();
        let m = build_cqm(&inst).unwrap();
        for z in all_bit_vectors(9) {
            let expect = evaluate_mvt(&inst, &z).unwrap();
            assert!((m.objective(&z) - expect).abs() <= 1e-9);
        }
        let mut z = vec![0u8; 9];
        for i in 0..inst.k {
            z[i] = 1;
        }
        assert!(m.is_feasible(&z));
        z[0] = 0;
        assert!(!m.is_feasible(&z));
    }

    #[test]
    fn cqm_support_matches_sigma_support() {
        let cfg = GeneratorConfig::default();
        let inst = generate(Family::Diagonal, 20, 3, &cfg).unwrap();
        let m = build_cqm(&inst).unwrap();
        assert_eq!(
            offdiag_support(&m.q_obj, 20, SUPPORT_TOL),
            offdiag_support(&inst.sigma, 20, SUPPORT_TOL)
        );
    }

    #[test]
    fn nonpositive_penalty_rejected() {
        let inst = gen_dense(6, 0, &GeneratorConfig::default()).unwrap();
        assert!(build_penalty_qubo(&inst, 0.0).is_err());
        assert!(build_penalty_qubo(&inst, -1.0).is_err());
    }

    #[test]
    fn d_amp_three_cases() {
        assert_eq!(density_amplification(45, 9), 5.0);
        assert_eq!(density_amplification(3, 0), f64::INFINITY);
        assert_eq!(density_amplification(0, 0), 1.0);
    }

    #[test]
    fn support_theorem_generic_penalty_completes_graph() {
        let cfg = GeneratorConfig::default();
        let inst = generate(Family::Diagonal, 10, 0, &cfg).unwrap();
        let c: Vec<f64> = inst.sigma.iter().map(|s| inst.lambda * s).collect();
        let rep = verify_support_theorem(&c, 10, &vec![1.0; 10], 4.0).unwrap();
        assert!(rep.is_complete);
        assert_eq!(rep.e_enc, 45);
        assert_eq!(rep.e_orig, 9);
        assert_eq!(rep.d_amp, 5.0);
        assert!(rep.cancelled_pairs.is_empty());
    }

    #[test]
    fn support_theorem_detects_exact_cancellation() {
        // c_01 = -4 cancels against A=4 on the all-ones constraint.
        let n = 3;
        let mut c = vec![0.0; 9];
        c[1] = -4.0;
        c[3] = -4.0;
        let rep = verify_support_theorem(&c, n, &[1.0; 3], 4.0).unwrap();
        assert_eq!(rep.cancelled_pairs, vec![(0, 1)]);
        assert!(!rep.is_complete);
        assert_eq!(rep.e_enc, 2);
    }

    #[test]
    fn support_theorem_respects_sparse_constraints() {
        // a = (1, 1, 0): pair (0,1) gains an edge, pairs touching index 2 do not.
        let n = 3;
        let c = vec![0.0; 9];
        let rep = verify_support_theorem(&c, n, &[1.0, 1.0, 0.0], 2.0).unwrap();
        assert_eq!(rep.e_orig, 0);
        assert_eq!(rep.e_enc, 1);
        assert!(!rep.is_complete);
        assert_eq!(rep.d_amp, f64::INFINITY);
    }

    #[test]
    fn qubo_export_conventions_agree_on_energy() {
        let cfg = GeneratorConfig::default();
        let inst = generate(Family::Dense, 7, 1, &cfg).unwrap();
        let q = build_penalty_qubo(&inst, 4.0).unwrap();
        let upper = q.export(QuboConvention::Upper);
        let sym = q.export(QuboConvention::Symmetric);
        for z in all_bit_vectors(7) {
            // Upper convention: sum_i q_ii z_i + sum_{i<j} q_ij z_i z_j.
            let mut e_up = upper.offset;
            for i in 0..7 {
                if z[i] == 0 {
                    continue;
                }
                e_up += upper.q[i * 7 + i];
                for j in (i + 1)..7 {
                    if z[j] == 1 {
                        e_up += upper.q[i * 7 + j];
                    }
                }
            }
            assert!((e_up - q.energy(&z)).abs() < 1e-9);
        }
        assert_eq!(sym.q, q.q);
    }

    #[test]
    fn support_report_serializes_inf_as_string() {
        let rep = SupportReport {
            n: 3,
            e_orig: 0,
            e_enc: 3,
            d_amp: f64::INFINITY,
            is_complete: true,
            cancelled_pairs: vec![],
        };
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"d_amp\":\"inf\""), "{json}");
        let back: SupportReport = serde_json::from_str(&json).unwrap();
        assert!(back.d_amp.is_infinite());
    }
}
