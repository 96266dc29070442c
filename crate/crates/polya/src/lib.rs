//! Pólya string models: random string-duplication processes on binary
//! strings, with exact capacity formulas, capacity bounds, an exact
//! rational enumeration oracle, and reproducible parallel Monte Carlo
//! estimation.
//!
//! A model starts from a nonempty seed string. Each step duplicates a
//! uniformly random symbol through a noisy binary channel (a 0 flips with
//! probability delta0, a 1 with delta1) and inserts the duplicate at the
//! end of the string, right after its source, or at an independent
//! uniform position — the end, tandem, and interspersed rules.
//!
//! - [`word`]: packed binary words and counting statistics.
//! - [`info`]: binary entropy, harmonic numbers, Beta quadrature.
//! - [`models`]: the three rules, trajectory runners, history replay.
//! - [`exact`]: closed-form capacities, bounds, and limit values.
//! - [`oracle`]: exact rational enumeration and the permutation-signature
//!   combinatorics behind the complement-tandem model.
//! - [`montecarlo`]: trial-parallel estimators verifying the limits.

pub mod error;
pub mod exact;
pub mod info;
pub mod models;
pub mod montecarlo;
pub mod oracle;
pub mod word;

pub use error::{Error, Result};
pub use exact::{CapacityKind, CapacityValue};
pub use models::{History, ModelSpec, NoiseParams, RngStream, Rule, StepRecord};
pub use montecarlo::{EstimateResult, RecordMode, SimConfig};
pub use word::Word;
