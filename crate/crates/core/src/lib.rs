//! Tests of the star order ("more IFRA") built on the U-statistic
//! `δ̂ = E max{X₁, X₂} / E X`, with the exact exponential null law, rival
//! tests of exponentiality, lifetime families, Pitman efficiencies and a
//! reproducible Monte Carlo harness.

pub mod dd;
pub mod efficiency;
pub mod error;
pub mod estimator;
pub mod exact_null;
pub mod families;
pub mod montecarlo;
pub mod normal;
pub mod quad;
pub mod rivals;
pub mod sample;
pub mod testing;

pub use efficiency::{pae_delta, pare, PaeResult};
pub use error::{Error, Result};
pub use estimator::{delta_hat, sigma2_hat, StarEstimate, VarianceEstimate};
pub use exact_null::{critical_table, null_cdf, null_quantile, CriticalTable, ExactNull};
pub use families::{Family, FamilyKind};
pub use montecarlo::{DecisionRule, Scenario, SimConfig, SimReport, SimTest};
pub use rivals::{KernelTwoSample, OneSampleTest};
pub use sample::Sample;
pub use testing::{one_sample_test, reference_moments, two_sample_test, Method, ReferenceMoments, TestReport};
