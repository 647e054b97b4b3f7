//! One- and two-sample decision procedures for H₀: F =* G against the
//! one-sided alternative that F is more IFRA than G.

use crate::error::{Error, Result};
use crate::estimator::{self, pooled_from_parts};
use crate::exact_null::{ExactNull, GUARANTEED_EXACT_N};
use crate::families::{Family, FamilyKind};
use crate::normal;
use crate::sample::Sample;
use serde::Serialize;
use std::str::FromStr;

/// Largest sample size for which `Method::Auto` picks the exact law.
pub const AUTO_EXACT_MAX_N: usize = 40;

/// Null constants of the reference distribution G₀.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceMoments {
    pub delta_ref: f64,
    pub sigma2_ref: f64,
    pub label: String,
    /// Whether the reference is an exponential law (enables the exact test).
    pub exponential: bool,
}

impl ReferenceMoments {
    pub fn exponential() -> Self {
        ReferenceMoments {
            delta_ref: 1.5,
            sigma2_ref: 1.0 / 12.0,
            label: "exp".to_string(),
            exponential: true,
        }
    }
}

/// δ_{G₀} and σ²_{G₀} for a reference family. Exponential references use the
/// closed forms (3/2, 1/12); everything else goes through quadrature.
pub fn reference_moments(dist: &Family) -> Result<ReferenceMoments> {
    if dist.kind == FamilyKind::Exponential {
        return Ok(ReferenceMoments {
            label: dist.to_string(),
            ..ReferenceMoments::exponential()
        });
    }
    Ok(ReferenceMoments {
        delta_ref: dist.star_ratio_delta()?,
        sigma2_ref: dist.star_variance()?,
        label: dist.to_string(),
        exponential: dist.is_exponential(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Auto,
    Exact,
    Asymptotic,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "exact" => Ok(Method::Exact),
            "asymptotic" => Ok(Method::Asymptotic),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected auto, exact or asymptotic".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    OneSample,
    TwoSample,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Detail {
    OneSample {
        delta_hat: f64,
        delta_ref: f64,
        sigma2_ref: f64,
        reference: String,
    },
    TwoSample {
        delta_x: f64,
        delta_y: f64,
        sigma2_x: f64,
        sigma2_y: f64,
        sigma2_pooled: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub statistic: f64,
    pub standardized: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    /// Resolved method: never `Auto`.
    pub method: Method,
    pub hypothesis: Hypothesis,
    pub n: usize,
    pub m: Option<usize>,
    pub detail: Detail,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("must lie in (0, 0.5), got {alpha}")))
    }
}

/// Tests H₀: F =* G₀ with the lower-tail rule `√n(δ̂ − δ_{G₀})/σ_{G₀} < z_α`,
/// or with the exact exponential law of δ̂ when requested.
pub fn one_sample_test(
    sample: &Sample,
    reference: &ReferenceMoments,
    alpha: f64,
    method: Method,
) -> Result<TestReport> {
    check_alpha(alpha)?;
    let n = sample.len();
    let method = match method {
        Method::Exact if !reference.exponential => {
            return Err(Error::ExactRequiresExponential(reference.label.clone()))
        }
        Method::Exact if n > GUARANTEED_EXACT_N => {
            log::warn!(
                "exact null law not guaranteed beyond n = {GUARANTEED_EXACT_N} (n = {n}); using the asymptotic rule"
            );
            Method::Asymptotic
        }
        Method::Auto if reference.exponential && n <= AUTO_EXACT_MAX_N => Method::Exact,
        Method::Auto => Method::Asymptotic,
        m => m,
    };
    if !(reference.sigma2_ref > 0.0) {
        return Err(Error::DegenerateVariance);
    }

    let delta_hat = estimator::delta_hat(sample).delta_hat;
    let statistic = delta_hat - reference.delta_ref;
    let standardized = (n as f64).sqrt() * statistic / reference.sigma2_ref.sqrt();
    let p_value = match method {
        Method::Exact => ExactNull::new(n)?.cdf(delta_hat),
        _ => normal::cdf(standardized),
    };
    Ok(TestReport {
        statistic,
        standardized,
        p_value,
        alpha,
        reject: p_value < alpha,
        method,
        hypothesis: Hypothesis::OneSample,
        n,
        m: None,
        detail: Detail::OneSample {
            delta_hat,
            delta_ref: reference.delta_ref,
            sigma2_ref: reference.sigma2_ref,
            reference: reference.label.clone(),
        },
    })
}

/// Tests H₀: F =* G with unknown G: rejects when `√N δ̂(F,G)/σ̂_{F,G} < z_α`.
pub fn two_sample_test(x: &Sample, y: &Sample, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let (n, m) = (x.len(), y.len());
    let delta_x = estimator::delta_hat(x).delta_hat;
    let delta_y = estimator::delta_hat(y).delta_hat;
    let sigma2_x = estimator::sigma2_hat(x).sigma2_hat;
    let sigma2_y = estimator::sigma2_hat(y).sigma2_hat;
    let sigma2_pooled = pooled_from_parts(n, sigma2_x, m, sigma2_y);
    if !(sigma2_pooled > 0.0 && sigma2_pooled.is_finite()) {
        return Err(Error::DegenerateVariance);
    }
    let statistic = delta_x - delta_y;
    let standardized = ((n + m) as f64).sqrt() * statistic / sigma2_pooled.sqrt();
    let p_value = normal::cdf(standardized);
    Ok(TestReport {
        statistic,
        standardized,
        p_value,
        alpha,
        reject: standardized < normal::quantile(alpha),
        method: Method::Asymptotic,
        hypothesis: Hypothesis::TwoSample,
        n,
        m: Some(m),
        detail: Detail::TwoSample {
            delta_x,
            delta_y,
            sigma2_x,
            sigma2_y,
            sigma2_pooled,
        },
    })
}
