//! Deterministic, parallel Monte Carlo estimation of size and power.
//!
//! Replicate `r` draws its uniforms from a ChaCha8 stream keyed by
//! `(seed, r)`, so the result of a run does not depend on how rayon schedules
//! the work. Every test in a study sees the same uniforms for the same
//! `(seed, r)`, which gives common random numbers across tests and families.

use crate::error::{Error, Result};
use crate::estimator;
use crate::exact_null::{self, Tail as ExactTail, MAX_EXACT_N};
use crate::families::{Family, FamilyKind};
use crate::normal;
use crate::rivals::{KernelTwoSample, OneSampleTest, Tail};
use crate::sample::Sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Replication count used for the published tables.
pub const TABLE_REPS: u64 = 10_000;
/// Replication count for calibrating rival critical points.
pub const CALIBRATION_REPS: u64 = 1_000_000;
/// Calibration runs use streams from this offset upwards so that they never
/// share uniforms with the run being calibrated.
const CALIBRATION_STREAM_OFFSET: u64 = 1 << 62;

/// A test that the harness can run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimTest {
    /// One-sample statistic; `OneSampleTest::Delta` in a two-sample scenario
    /// means the two-sample δ̂(F, G) test.
    OneSample(OneSampleTest),
    /// Two-sample kernel statistic Δ̂(F, G).
    Ik(KernelTwoSample),
}

impl SimTest {
    pub const DELTA: SimTest = SimTest::OneSample(OneSampleTest::Delta);

    pub fn name(&self) -> &'static str {
        match self {
            SimTest::OneSample(t) => t.name(),
            SimTest::Ik(k) if k.include_diagonal => "ik",
            SimTest::Ik(_) => "ik_offdiag",
        }
    }

    pub fn tail(&self) -> Tail {
        match self {
            SimTest::OneSample(t) => t.tail(),
            SimTest::Ik(_) => Tail::Upper,
        }
    }

    fn is_delta(&self) -> bool {
        matches!(self, SimTest::OneSample(OneSampleTest::Delta))
    }
}

impl fmt::Display for SimTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SimTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let one = |t| Ok(SimTest::OneSample(t));
        match s.trim().to_ascii_lowercase().as_str() {
            "delta" => one(OneSampleTest::Delta),
            "deshpande" => one(OneSampleTest::deshpande()),
            "kochar" => one(OneSampleTest::Kochar),
            "link" => one(OneSampleTest::Link),
            "ahmad" => one(OneSampleTest::ahmad()),
            "el_bassiouny" | "el-bassiouny" => one(OneSampleTest::ElBassiounyR0),
            "ik" => Ok(SimTest::Ik(KernelTwoSample::default())),
            "ik_offdiag" | "ik-offdiag" => Ok(SimTest::Ik(KernelTwoSample {
                include_diagonal: false,
                ..KernelTwoSample::default()
            })),
            other => Err(Error::Parse {
                input: other.to_string(),
                reason: "unknown test (expected delta, deshpande, kochar, link, ahmad, el_bassiouny, ik or ik_offdiag)"
                    .into(),
            }),
        }
    }
}

fn serialize_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// The distributions the samples are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    OneSample {
        #[serde(serialize_with = "serialize_display")]
        family: Family,
    },
    TwoSample {
        #[serde(serialize_with = "serialize_display")]
        f: Family,
        #[serde(serialize_with = "serialize_display")]
        g: Family,
    },
}

impl Scenario {
    pub fn exponential_null() -> Self {
        Scenario::OneSample {
            family: Family::unchecked(FamilyKind::Exponential, 1.0, 1.0),
        }
    }

    fn is_two_sample(&self) -> bool {
        matches!(self, Scenario::TwoSample { .. })
    }
}

/// How a replicate's statistic is turned into a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecisionRule {
    /// Normal critical point for the standardized statistic.
    Asymptotic,
    /// Exact small-sample critical value (one-sample δ̂ only).
    Exact,
    /// Empirical null quantile from `reps` unit-exponential samples.
    McCalibrated { reps: u64, seed: u64 },
}

impl DecisionRule {
    pub fn name(&self) -> &'static str {
        match self {
            DecisionRule::Asymptotic => "asymptotic",
            DecisionRule::Exact => "exact",
            DecisionRule::McCalibrated { .. } => "mc_calibrated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    #[serde(serialize_with = "serialize_display")]
    pub test: SimTest,
    pub scenario: Scenario,
    pub n: usize,
    /// Second sample size; required for two-sample scenarios.
    pub m: Option<usize>,
    pub alpha: f64,
    pub reps: u64,
    pub seed: u64,
    pub rule: DecisionRule,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::param("reps", "must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::param("alpha", format!("must lie in (0, 0.5), got {}", self.alpha)));
        }
        if self.n < 2 {
            return Err(Error::param("n", format!("must be at least 2, got {}", self.n)));
        }
        if let SimTest::OneSample(t) = self.test {
            t.validate()?;
        }
        match (self.scenario, self.m) {
            (Scenario::TwoSample { .. }, None) => {
                return Err(Error::param("m", "a two-sample scenario needs m"));
            }
            (Scenario::TwoSample { .. }, Some(m)) if m < 2 => {
                return Err(Error::param("m", format!("must be at least 2, got {m}")));
            }
            (Scenario::OneSample { .. }, Some(_)) => {
                return Err(Error::param("m", "a one-sample scenario takes no m"));
            }
            _ => {}
        }
        match (self.test, self.scenario.is_two_sample()) {
            (SimTest::Ik(k), true) => {
                k.statistic_values(&[1.0, 2.0], &[1.0, 2.0])?;
            }
            (SimTest::Ik(_), false) => {
                return Err(Error::param("test", "ik is a two-sample test"));
            }
            (t, true) if !t.is_delta() => {
                return Err(Error::param(
                    "test",
                    format!("{} is a one-sample test; two-sample runs support delta and ik", t.name()),
                ));
            }
            _ => {}
        }
        match self.rule {
            DecisionRule::Exact => {
                if !self.test.is_delta() || self.scenario.is_two_sample() {
                    return Err(Error::param("rule", "the exact rule applies to the one-sample delta test only"));
                }
                if self.n > MAX_EXACT_N {
                    return Err(Error::param("n", format!("exact rule supports n <= {MAX_EXACT_N}")));
                }
            }
            DecisionRule::Asymptotic if matches!(self.test, SimTest::Ik(_)) => {
                return Err(Error::param("rule", "ik has no asymptotic rule; use mc_calibrated"));
            }
            DecisionRule::McCalibrated { reps, .. } if reps < 2 => {
                return Err(Error::param("rule", "calibration needs at least 2 replications"));
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub rejections: u64,
    pub reps: u64,
    pub rejection_rate: f64,
    pub mc_standard_error: f64,
    pub seed: u64,
    /// Critical point on the decision scale (see [`decision_score`]).
    pub critical_value: f64,
}

impl SimReport {
    pub const CSV_HEADER: [&'static str; 14] = [
        "test",
        "scenario",
        "f",
        "g",
        "n",
        "m",
        "alpha",
        "rule",
        "reps",
        "seed",
        "critical_value",
        "rejections",
        "rejection_rate",
        "mc_se",
    ];

    /// Fields in [`Self::CSV_HEADER`] order; reals use `precision` decimals.
    pub fn csv_record(&self, precision: usize) -> Vec<String> {
        let c = &self.config;
        let (scenario, f, g) = match c.scenario {
            Scenario::OneSample { family } => ("one_sample", family.to_string(), String::new()),
            Scenario::TwoSample { f, g } => ("two_sample", f.to_string(), g.to_string()),
        };
        vec![
            c.test.name().to_string(),
            scenario.to_string(),
            f,
            g,
            c.n.to_string(),
            c.m.map(|m| m.to_string()).unwrap_or_default(),
            c.alpha.to_string(),
            c.rule.name().to_string(),
            self.reps.to_string(),
            self.seed.to_string(),
            format!("{:.*}", precision, self.critical_value),
            self.rejections.to_string(),
            format!("{:.*}", precision, self.rejection_rate),
            format!("{:.*}", precision, self.mc_standard_error),
        ]
    }
}

/// An empirical null quantile with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub critical_value: f64,
    pub standard_error: f64,
    pub reps: u64,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw(family: &Family, count: usize, rng: &mut ChaCha8Rng) -> Sample {
    Sample::from_vec_unchecked(family.draw(count, rng))
}

/// Two-sample standardized δ̂ statistic; NaN when the pooled variance vanishes.
fn two_sample_z(x: &Sample, y: &Sample) -> f64 {
    let (n, m) = (x.len(), y.len());
    let s2 = estimator::pooled_from_parts(
        n,
        estimator::sigma2_hat(x).sigma2_hat,
        m,
        estimator::sigma2_hat(y).sigma2_hat,
    );
    if !(s2 > 0.0) {
        return f64::NAN;
    }
    ((n + m) as f64).sqrt() * (estimator::delta_hat(x).delta_hat - estimator::delta_hat(y).delta_hat) / s2.sqrt()
}

/// The value a decision is based on: the standardized statistic for the
/// δ̂ and one-sample rival tests, the raw statistic for IK.
pub fn decision_score(test: &SimTest, x: &Sample, y: Option<&Sample>) -> f64 {
    match (test, y) {
        (SimTest::OneSample(OneSampleTest::Delta), Some(y)) => two_sample_z(x, y),
        (SimTest::OneSample(t), _) => t.standardized(x),
        (SimTest::Ik(k), Some(y)) => k.statistic(x, y),
        (SimTest::Ik(_), None) => f64::NAN,
    }
}

fn replicate_score(config: &SimConfig, stream: u64, seed: u64, null: bool) -> f64 {
    let mut rng = stream_rng(seed, stream);
    let exp = Family::unchecked(FamilyKind::Exponential, 1.0, 1.0);
    match config.scenario {
        Scenario::OneSample { family } => {
            let family = if null { exp } else { family };
            decision_score(&config.test, &draw(&family, config.n, &mut rng), None)
        }
        Scenario::TwoSample { f, g } => {
            let (f, g) = if null { (exp, exp) } else { (f, g) };
            let x = draw(&f, config.n, &mut rng);
            let y = draw(&g, config.m.unwrap_or(config.n), &mut rng);
            decision_score(&config.test, &x, Some(&y))
        }
    }
}

fn rejects(tail: Tail, score: f64, critical: f64) -> bool {
    match tail {
        Tail::Lower => score < critical,
        Tail::Upper => score > critical,
    }
}

/// Empirical quantile at probability `p` of sorted values, as the order
/// statistic of rank `⌈p·R⌉`; its standard error is half the distance between
/// the order statistics one binomial standard deviation either side.
fn order_statistic_quantile(sorted: &[f64], p: f64) -> (f64, f64) {
    let r = sorted.len();
    let k = ((p * r as f64).ceil() as usize).clamp(1, r);
    let d = ((r as f64 * p * (1.0 - p)).sqrt().ceil() as usize).max(1);
    let lo = sorted[k.saturating_sub(1 + d)];
    let hi = sorted[(k - 1 + d).min(r - 1)];
    (sorted[k - 1], 0.5 * (hi - lo))
}

/// Level-α critical point of `config.test` under i.i.d. unit-exponential
/// samples of the configured size(s), on the [`decision_score`] scale.
/// Lower-tail tests get the α-quantile, upper-tail tests the (1−α)-quantile.
pub fn mc_calibrate_null(config: &SimConfig, reps: u64, seed: u64) -> Result<Calibration> {
    if reps < 2 {
        return Err(Error::param("reps", "calibration needs at least 2 replications"));
    }
    let mut scores: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| replicate_score(config, CALIBRATION_STREAM_OFFSET + r, seed, true))
        .collect();
    // Degenerate two-sample variance yields NaN; it never rejects, so it sits
    // beyond either tail.
    let p = match config.test.tail() {
        Tail::Lower => config.alpha,
        Tail::Upper => 1.0 - config.alpha,
    };
    scores.sort_by(|a, b| a.total_cmp(b));
    let finite = scores.iter().filter(|s| !s.is_nan()).count();
    if finite < 2 {
        return Err(Error::DegenerateVariance);
    }
    let (critical_value, standard_error) = order_statistic_quantile(&scores[..finite], p);
    Ok(Calibration {
        critical_value,
        standard_error,
        reps,
    })
}

/// Critical point for the configured rule on the [`decision_score`] scale.
pub fn critical_value(config: &SimConfig) -> Result<f64> {
    config.validate()?;
    Ok(match config.rule {
        DecisionRule::Asymptotic => match config.test.tail() {
            Tail::Lower => normal::quantile(config.alpha),
            Tail::Upper => normal::quantile(1.0 - config.alpha),
        },
        DecisionRule::Exact => exact_null::critical_value(config.n, config.alpha, ExactTail::Lower)?,
        DecisionRule::McCalibrated { reps, seed } => mc_calibrate_null(config, reps, seed)?.critical_value,
    })
}

/// Runs the configured study on the current rayon pool.
pub fn simulate(config: &SimConfig) -> Result<SimReport> {
    let critical = critical_value(config)?;
    let tail = config.test.tail();
    let rejections = (0..config.reps)
        .into_par_iter()
        .filter(|&r| rejects(tail, replicate_score(config, r, config.seed, false), critical))
        .count() as u64;
    let p = rejections as f64 / config.reps as f64;
    log::debug!("{} {:?}: {rejections}/{} rejections", config.test, config.scenario, config.reps);
    Ok(SimReport {
        config: *config,
        rejections,
        reps: config.reps,
        rejection_rate: p,
        mc_standard_error: (p * (1.0 - p) / config.reps as f64).sqrt(),
        seed: config.seed,
        critical_value: critical,
    })
}

/// Size under the unit exponential null.
pub fn simulate_size(config: &SimConfig) -> Result<SimReport> {
    match config.scenario {
        Scenario::OneSample { family } if family.is_exponential() => simulate(config),
        _ => Err(Error::param("scenario", "size runs need a one-sample exponential null")),
    }
}

/// One-sample power against a Weibull, LFR or Makeham alternative.
pub fn simulate_power(config: &SimConfig) -> Result<SimReport> {
    match config.scenario {
        Scenario::OneSample { family }
            if matches!(family.kind, FamilyKind::Weibull | FamilyKind::Lfr | FamilyKind::Makeham) =>
        {
            simulate(config)
        }
        _ => Err(Error::param("scenario", "power runs need a weibull, lfr or makeham alternative")),
    }
}

/// Two-sample power for pairs of gamma, Weibull or beta distributions.
pub fn simulate_power_two_sample(config: &SimConfig) -> Result<SimReport> {
    let allowed = |f: &Family| matches!(f.kind, FamilyKind::Gamma | FamilyKind::Weibull | FamilyKind::Beta);
    match config.scenario {
        Scenario::TwoSample { f, g } if allowed(&f) && allowed(&g) => simulate(config),
        _ => Err(Error::param("scenario", "two-sample runs need gamma, weibull or beta distributions")),
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool
/// when `threads` is `None`. Results never depend on the thread count.
pub fn with_threads<T, F>(threads: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::param("threads", "must be at least 1")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::param("threads", e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size_config(test: SimTest, n: usize, rule: DecisionRule) -> SimConfig {
        SimConfig {
            test,
            scenario: Scenario::exponential_null(),
            n,
            m: None,
            alpha: 0.05,
            reps: 2000,
            seed: 7,
            rule,
        }
    }

    #[test]
    fn exact_rule_is_size_exact() {
        let r = simulate_size(&size_config(SimTest::DELTA, 10, DecisionRule::Exact)).unwrap();
        assert!((r.rejection_rate - 0.05).abs() < 3.5 * r.mc_standard_error, "{r:?}");
        assert_eq!(r.mc_standard_error, (r.rejection_rate * (1.0 - r.rejection_rate) / 2000.0).sqrt());
    }

    #[test]
    fn deterministic_across_pools() {
        let c = size_config("kochar".parse().unwrap(), 12, DecisionRule::Asymptotic);
        let a = with_threads(Some(1), || simulate(&c)).unwrap().unwrap();
        let b = with_threads(Some(4), || simulate(&c)).unwrap().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn calibration_matches_exact_quantile() {
        let c = size_config(SimTest::DELTA, 10, DecisionRule::Asymptotic);
        let cal = mc_calibrate_null(&c, 200_000, 3).unwrap();
        let exact = exact_null::critical_value(10, 0.05, ExactTail::Lower).unwrap();
        assert!((cal.critical_value - exact).abs() < 0.02, "{cal:?} vs {exact}");
        assert!(cal.standard_error > 0.0 && cal.standard_error < 0.02);
    }

    #[test]
    fn order_statistic_quantile_on_grid() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let (q, se) = order_statistic_quantile(&v, 0.05);
        assert_eq!(q, 5.0);
        assert_eq!(se, 0.5 * (v[4 + 3] - v[4 - 3]));
        assert_eq!(order_statistic_quantile(&v, 0.95).0, 95.0);
    }

    #[test]
    fn invalid_configs() {
        let mut c = size_config(SimTest::DELTA, 10, DecisionRule::Exact);
        c.reps = 0;
        assert!(simulate(&c).is_err());
        let c = size_config("kochar".parse().unwrap(), 10, DecisionRule::Exact);
        assert!(simulate(&c).is_err());
        let c = size_config("ik".parse().unwrap(), 10, DecisionRule::Asymptotic);
        assert!(simulate(&c).is_err());
        let mut c = size_config(SimTest::DELTA, 10, DecisionRule::Asymptotic);
        c.alpha = 0.7;
        assert!(simulate(&c).is_err());
        let c = SimConfig {
            scenario: Scenario::TwoSample {
                f: Family::weibull(3.0).unwrap(),
                g: Family::weibull(1.5).unwrap(),
            },
            ..size_config(SimTest::DELTA, 10, DecisionRule::Asymptotic)
        };
        assert!(simulate(&c).is_err(), "missing m");
        assert!(simulate_power(&size_config(SimTest::DELTA, 10, DecisionRule::Exact)).is_err());
        assert!("nope".parse::<SimTest>().is_err());
    }

    #[test]
    fn two_sample_power_and_null() {
        let base = SimConfig {
            test: SimTest::DELTA,
            scenario: Scenario::TwoSample {
                f: Family::weibull(3.0).unwrap(),
                g: Family::weibull(1.5).unwrap(),
            },
            n: 40,
            m: Some(40),
            alpha: 0.05,
            reps: 1000,
            seed: 11,
            rule: DecisionRule::Asymptotic,
        };
        let r = simulate_power_two_sample(&base).unwrap();
        assert!(r.rejection_rate > 0.9, "{r:?}");
        let ik = SimConfig {
            test: "ik".parse().unwrap(),
            rule: DecisionRule::McCalibrated { reps: 2000, seed: 5 },
            reps: 300,
            ..base
        };
        let r = simulate_power_two_sample(&ik).unwrap();
        assert!(r.rejection_rate > 0.5, "{r:?}");
    }

    #[test]
    fn csv_record_shape() {
        let r = simulate_size(&size_config(SimTest::DELTA, 10, DecisionRule::Exact)).unwrap();
        let rec = r.csv_record(6);
        assert_eq!(rec.len(), SimReport::CSV_HEADER.len());
        assert_eq!(rec[0], "delta");
        assert_eq!(rec[2], "exp:1");
        assert_eq!(rec[7], "exact");
    }
}
