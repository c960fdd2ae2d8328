//! Desk-scale benchmark and audit toolkit for cardinality-constrained
//! mean-variance-turnover (MVT) portfolio selection.
//!
//! The crate covers the full pipeline: synthetic instance generation
//! ([`instances`]), penalty-QUBO and constraint-native encodings
//! ([`encoding`]), exact and heuristic solvers ([`solvers`]), a structural
//! model of annealer embedding overhead ([`embedding`]), an operational audit
//! of vendor run telemetry ([`audit`]), paired statistics ([`stats`]), a
//! financial backtest overlay ([`finance`]), and grid orchestration
//! ([`campaign`]).

pub mod audit;
pub mod campaign;
pub mod embedding;
pub mod encoding;
pub mod error;
pub mod finance;
pub mod instances;
pub mod rng;
pub mod solvers;
pub mod stats;

pub use audit::{AuditCell, AuditReport, RunRecord};
pub use embedding::{ChainModelParams, TopologySpec};
pub use encoding::{ConstrainedModel, EncodedQubo, SupportReport};
pub use error::Error;
pub use instances::{Family, GeneratorConfig, ProblemInstance};
pub use solvers::{AnnealConfig, Portfolio, SolveResult, SolverKind};

/// Version tag written into every serialized artifact.
pub const SCHEMA_VERSION: u32 = 1;
