//! Fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use starstat_core::montecarlo::{DecisionRule, Scenario, SimConfig};
use starstat_core::{Family, Sample};

/// A unit-exponential sample of size `n`, fixed by `seed`.
pub fn exponential_sample(n: usize, seed: u64) -> Sample {
    Family::exponential(1.0)
        .unwrap()
        .sample(n, &mut ChaCha8Rng::seed_from_u64(seed))
        .unwrap()
}

pub fn size_config(test: &str, n: usize, reps: u64) -> SimConfig {
    SimConfig {
        test: test.parse().unwrap(),
        scenario: Scenario::exponential_null(),
        n,
        m: None,
        alpha: 0.05,
        reps,
        seed: 1,
        rule: DecisionRule::Asymptotic,
    }
}
