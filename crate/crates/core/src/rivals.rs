//! Competing statistics for exponentiality against IFRA alternatives, and the
//! two-sample kernel statistic used as a comparison in the two-sample study.

use crate::error::{Error, Result};
use crate::estimator;
use crate::normal;
use crate::sample::Sample;
use serde::Serialize;
use std::f64::consts::LN_2;

pub const DESHPANDE_DEFAULT_B: f64 = 0.9;
/// Ahmad's recommended bandwidth `a_n = n^{−1/2}`.
pub const AHMAD_BANDWIDTH_EXPONENT: f64 = -0.5;
/// Bandwidths `n^{−2/5}`, `m^{−2/5}` for the two-sample kernel statistic.
pub const IK_BANDWIDTH_EXPONENT: f64 = -0.4;

/// Null mean of Link's Γ: 2 log 2 − 1.
pub const LINK_NULL_MEAN: f64 = 2.0 * LN_2 - 1.0;
pub const LINK_NULL_VARIANCE: f64 = 0.048225;
/// Null variance of √n T_n is 17/108.
pub const KOCHAR_NULL_VARIANCE: f64 = 17.0 / 108.0;
pub const AHMAD_NULL_MEAN: f64 = 0.25;
/// Null variance of √n Δ̂_F is 5/108.
pub const AHMAD_NULL_VARIANCE: f64 = 5.0 / 108.0;

/// Which tail of the standardized statistic is evidence for IFRA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Lower,
    Upper,
}

/// One-sample tests of exponentiality against IFRA alternatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OneSampleTest {
    Delta,
    Deshpande { b: f64 },
    Kochar,
    Link,
    Ahmad { bandwidth_exponent: f64 },
    ElBassiounyR0,
}

impl OneSampleTest {
    pub fn deshpande() -> Self {
        OneSampleTest::Deshpande {
            b: DESHPANDE_DEFAULT_B,
        }
    }

    pub fn ahmad() -> Self {
        OneSampleTest::Ahmad {
            bandwidth_exponent: AHMAD_BANDWIDTH_EXPONENT,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OneSampleTest::Delta => "delta",
            OneSampleTest::Deshpande { .. } => "deshpande",
            OneSampleTest::Kochar => "kochar",
            OneSampleTest::Link => "link",
            OneSampleTest::Ahmad { .. } => "ahmad",
            OneSampleTest::ElBassiounyR0 => "el_bassiouny",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            OneSampleTest::Deshpande { b } if !(b > 0.0 && b < 1.0) => {
                Err(Error::param("b", format!("must lie in (0, 1), got {b}")))
            }
            OneSampleTest::Ahmad { bandwidth_exponent } if !(bandwidth_exponent < 0.0) => Err(
                Error::param("bandwidth_exponent", format!("must be negative, got {bandwidth_exponent}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn tail(&self) -> Tail {
        match self {
            OneSampleTest::Delta => Tail::Lower,
            _ => Tail::Upper,
        }
    }

    /// Raw statistic value.
    pub fn statistic(&self, sample: &Sample) -> f64 {
        match *self {
            OneSampleTest::Delta => estimator::delta_hat(sample).delta_hat,
            OneSampleTest::Deshpande { b } => deshpande_j_raw(sample.values(), b),
            OneSampleTest::Kochar => kochar_t(sample),
            OneSampleTest::Link => link_gamma(sample),
            OneSampleTest::Ahmad { bandwidth_exponent } => {
                let n = sample.len() as f64;
                ahmad_raw(sample.values(), n.powf(bandwidth_exponent))
            }
            OneSampleTest::ElBassiounyR0 => el_bassiouny_delta1(sample),
        }
    }

    /// Statistic centred and scaled by its null asymptotics so that it is
    /// approximately N(0, 1) under exponentiality.
    pub fn standardized(&self, sample: &Sample) -> f64 {
        let t = self.statistic(sample);
        let rn = (sample.len() as f64).sqrt();
        match *self {
            OneSampleTest::Delta => rn * (t - 1.5) / (1.0f64 / 12.0).sqrt(),
            OneSampleTest::Deshpande { b } => {
                let (mean, var) = deshpande_null(b);
                rn * (t - mean) / var.sqrt()
            }
            OneSampleTest::Kochar => rn * t / KOCHAR_NULL_VARIANCE.sqrt(),
            OneSampleTest::Link => rn * (t - LINK_NULL_MEAN) / LINK_NULL_VARIANCE.sqrt(),
            OneSampleTest::Ahmad { .. } => rn * (t - AHMAD_NULL_MEAN) / AHMAD_NULL_VARIANCE.sqrt(),
            // Δ̂₁ = 3/2 − δ̂, so its null scale matches δ̂'s.
            OneSampleTest::ElBassiounyR0 => rn * t / (1.0f64 / 12.0).sqrt(),
        }
    }

    /// Level-α decision from the asymptotic normal critical point.
    pub fn rejects_asymptotic(&self, standardized: f64, alpha: f64) -> bool {
        match self.tail() {
            Tail::Lower => standardized < normal::quantile(alpha),
            Tail::Upper => standardized > normal::quantile(1.0 - alpha),
        }
    }
}

/// Null mean `1/(b+1)` and null variance `4ξ` of √n·J_b.
pub fn deshpande_null(b: f64) -> (f64, f64) {
    let xi = 0.25
        * (1.0 + b / (b + 2.0) + 1.0 / (2.0 * b + 1.0) + 2.0 * (1.0 - b) / (b + 1.0)
            - 2.0 * b / (b * b + b + 1.0)
            - 4.0 / ((b + 1.0) * (b + 1.0)));
    (1.0 / (b + 1.0), 4.0 * xi)
}

fn deshpande_j_raw(x: &[f64], b: f64) -> f64 {
    let n = x.len();
    let mut hits = 0usize;
    for i in 0..n {
        for j in 0..n {
            if i != j && x[i] > b * x[j] {
                hits += 1;
            }
        }
    }
    hits as f64 / (n * (n - 1)) as f64
}

/// Deshpande's J_b: the fraction of ordered pairs with `Xᵢ > b·Xⱼ`.
pub fn deshpande_j(sample: &Sample, b: f64) -> Result<f64> {
    OneSampleTest::Deshpande { b }.validate()?;
    Ok(deshpande_j_raw(sample.values(), b))
}

/// Kochar's score function `J(u) = 2(1−u)[1 − log(1−u)] − 1`.
pub fn kochar_score(u: f64) -> f64 {
    let v = 1.0 - u;
    2.0 * v * (1.0 - v.ln()) - 1.0
}

/// Kochar's T_n = Σ J(i/(n+1)) X₍ᵢ₎ / (n X̄).
pub fn kochar_t(sample: &Sample) -> f64 {
    let s = sample.sorted();
    let n = s.len();
    let total: f64 = s.iter().sum();
    let weighted: f64 = s
        .iter()
        .enumerate()
        .map(|(i, v)| kochar_score((i + 1) as f64 / (n + 1) as f64) * v)
        .sum();
    weighted / total
}

/// Link's Γ: the mean over pairs of `min/max`.
pub fn link_gamma(sample: &Sample) -> f64 {
    let s = sample.sorted();
    let n = s.len();
    let mut sum = 0.0;
    for j in 1..n {
        let inv = 1.0 / s[j];
        for v in &s[..j] {
            sum += v * inv;
        }
    }
    2.0 * sum / (n * (n - 1)) as f64
}

fn ahmad_raw(x: &[f64], a: f64) -> f64 {
    let n = x.len();
    let inv_a = 1.0 / a;
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            // k is even, so the (i, j) and (j, i) terms share one kernel value.
            sum += (x[i] + x[j]) * normal::pdf((x[i] - x[j]) * inv_a);
        }
    }
    sum / ((n * (n - 1)) as f64 * a)
}

/// Ahmad's kernel statistic with the Gaussian kernel. `bandwidth` defaults to
/// `n^{−1/2}`.
pub fn ahmad_delta(sample: &Sample, bandwidth: Option<f64>) -> Result<f64> {
    let a = bandwidth.unwrap_or_else(|| (sample.len() as f64).powf(AHMAD_BANDWIDTH_EXPONENT));
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::param("bandwidth", format!("must be positive, got {a}")));
    }
    Ok(ahmad_raw(sample.values(), a))
}

/// El-Bassiouny's Δ̂₁ = 2 Σ_{i<j} min{Xᵢ, Xⱼ} / (n(n−1) X̄) − 1/2.
pub fn el_bassiouny_delta1(sample: &Sample) -> f64 {
    let x = sample.values();
    let n = x.len();
    let mut pair_min = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            pair_min += x[i].min(x[j]);
        }
    }
    2.0 * pair_min / (n as f64 * (n - 1) as f64 * sample.mean()) - 0.5
}

/// Settings for the two-sample kernel statistic Δ̂(F, G).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelTwoSample {
    pub bandwidth_exponent: f64,
    /// Keep the `i = j` terms of the double sums (the literal reading).
    pub include_diagonal: bool,
}

impl Default for KernelTwoSample {
    fn default() -> Self {
        KernelTwoSample {
            bandwidth_exponent: IK_BANDWIDTH_EXPONENT,
            include_diagonal: true,
        }
    }
}

impl KernelTwoSample {
    fn term(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let a = (n as f64).powf(self.bandwidth_exponent);
        let inv_a = 1.0 / a;
        let mut sum = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                sum += (x[i] + x[j]) * normal::pdf((x[i] - x[j]) * inv_a);
            }
        }
        if self.include_diagonal {
            sum += normal::pdf(0.0) * x.iter().sum::<f64>();
        }
        let pairs = if self.include_diagonal {
            (n * n) as f64
        } else {
            (n * (n - 1)) as f64
        };
        sum / (pairs * a)
    }

    /// Δ̂(F, G) on raw slices. Without the diagonal each slice needs two values.
    pub fn statistic_values(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if !(self.bandwidth_exponent < 0.0) {
            return Err(Error::param(
                "bandwidth_exponent",
                format!("must be negative, got {}", self.bandwidth_exponent),
            ));
        }
        let min_len = if self.include_diagonal { 1 } else { 2 };
        if x.len() < min_len || y.len() < min_len {
            return Err(Error::InvalidSample {
                label: None,
                reason: format!("need at least {min_len} observations per sample"),
            });
        }
        Ok(self.term(x) - self.term(y))
    }

    pub fn statistic(&self, x: &Sample, y: &Sample) -> f64 {
        self.term(x.values()) - self.term(y.values())
    }
}

/// Δ̂(F, G) with the Gaussian kernel and bandwidths n^{−2/5}, m^{−2/5}.
pub fn ik_two_sample(x: &Sample, y: &Sample) -> f64 {
    KernelTwoSample::default().statistic(x, y)
}
