//! Pitman asymptotic efficiency of the δ̂ test of exponentiality.
//!
//! Under local alternatives θₙ = θ₀ + k n^{−1/2} around an exponential θ₀,
//! `PAE = (∂δ_θ/∂θ |θ₀)² / σ²_{θ₀}` with σ²_{θ₀} = 1/12.

use crate::error::{Error, Result};
use crate::families::{Family, FamilyKind};
use serde::Serialize;

/// Relative step used for derivatives at an interior θ₀.
pub const INTERIOR_STEP: f64 = 1e-4;
/// Absolute step used at the boundary θ₀ = 0.
pub const BOUNDARY_STEP: f64 = 1e-4;

const NULL_VARIANCE: f64 = 1.0 / 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PaeResult {
    pub family: FamilyKind,
    pub theta0: f64,
    pub pae: f64,
    pub derivative: f64,
    pub null_variance: f64,
}

/// The value of θ at which each supported family is exponential.
pub fn null_parameter(kind: FamilyKind) -> Result<f64> {
    match kind {
        FamilyKind::Weibull => Ok(1.0),
        FamilyKind::Lfr | FamilyKind::Makeham => Ok(0.0),
        other => Err(Error::param(
            "family",
            format!("PAE is defined for weibull, lfr and makeham, not {}", other.name()),
        )),
    }
}

fn delta_at(kind: FamilyKind, theta: f64) -> Result<f64> {
    Family::unchecked(kind, theta, 1.0).star_ratio_delta()
}

/// Central difference with one Richardson extrapolation step.
pub fn central_derivative(kind: FamilyKind, theta0: f64, rel_step: f64) -> Result<f64> {
    let h = rel_step * theta0.abs().max(1.0);
    let d = |h: f64| -> Result<f64> {
        Ok((delta_at(kind, theta0 + h)? - delta_at(kind, theta0 - h)?) / (2.0 * h))
    };
    let (d1, d2) = (d(h)?, d(2.0 * h)?);
    Ok((4.0 * d1 - d2) / 3.0)
}

/// Second-order forward difference `(−3f₀ + 4f₁ − f₂)/(2h)`.
pub fn forward_derivative_2(kind: FamilyKind, theta0: f64, h: f64) -> Result<f64> {
    let f0 = delta_at(kind, theta0)?;
    let f1 = delta_at(kind, theta0 + h)?;
    let f2 = delta_at(kind, theta0 + 2.0 * h)?;
    Ok((-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h))
}

/// Third-order forward difference, used to cross-check the boundary stencil.
pub fn forward_derivative_3(kind: FamilyKind, theta0: f64, h: f64) -> Result<f64> {
    let f: Vec<f64> = (0..4)
        .map(|k| delta_at(kind, theta0 + k as f64 * h))
        .collect::<Result<_>>()?;
    Ok((-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * h))
}

/// PAE of the δ̂ test against the family's local alternatives.
pub fn pae_delta(kind: FamilyKind) -> Result<PaeResult> {
    let theta0 = null_parameter(kind)?;
    let derivative = if theta0 > 0.0 {
        central_derivative(kind, theta0, INTERIOR_STEP)?
    } else {
        forward_derivative_2(kind, theta0, BOUNDARY_STEP)?
    };
    Ok(PaeResult {
        family: kind,
        theta0,
        pae: derivative * derivative / NULL_VARIANCE,
        derivative,
        null_variance: NULL_VARIANCE,
    })
}

/// Pitman asymptotic relative efficiency PAE_a / PAE_b.
pub fn pare(pae_a: f64, pae_b: f64) -> Result<f64> {
    if !(pae_b > 0.0) {
        return Err(Error::param("pae_b", format!("must be positive, got {pae_b}")));
    }
    Ok(pae_a / pae_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RivalTest {
    Deshpande,
    Kochar,
    Link,
    Ahmad,
}

impl RivalTest {
    pub const ALL: [RivalTest; 4] = [RivalTest::Deshpande, RivalTest::Kochar, RivalTest::Link, RivalTest::Ahmad];

    pub fn label(self) -> &'static str {
        match self {
            RivalTest::Deshpande => "J_0.9",
            RivalTest::Kochar => "T_n",
            RivalTest::Link => "Gamma",
            RivalTest::Ahmad => "Delta_F",
        }
    }
}

/// Published PAE constants of a rival test under the three alternative families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RivalPae {
    pub test: RivalTest,
    pub weibull: f64,
    pub lfr: f64,
    pub makeham: f64,
}

impl RivalPae {
    pub fn get(&self, kind: FamilyKind) -> Option<f64> {
        match kind {
            FamilyKind::Weibull => Some(self.weibull),
            FamilyKind::Lfr => Some(self.lfr),
            FamilyKind::Makeham => Some(self.makeham),
            _ => None,
        }
    }
}

/// PAE constants of the rival tests as published; these are not recomputed.
pub fn rival_pae_constants() -> [RivalPae; 4] {
    [
        RivalPae { test: RivalTest::Deshpande, weibull: 1.35, lfr: 0.3369, makeham: 0.0666 },
        RivalPae { test: RivalTest::Kochar, weibull: 1.247, lfr: 0.8933, makeham: 0.0784 },
        RivalPae { test: RivalTest::Link, weibull: 1.3867, lfr: 0.2681, makeham: 0.0563 },
        RivalPae { test: RivalTest::Ahmad, weibull: 1.35, lfr: 0.3375, makeham: 0.0667 },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PareEntry {
    pub test: RivalTest,
    pub rival_pae: f64,
    pub pare: f64,
}

/// PARE of the δ̂ test against each rival for one family, from a given PAE of δ̂.
pub fn pare_row(kind: FamilyKind, pae_of_delta: f64) -> Result<Vec<PareEntry>> {
    null_parameter(kind)?;
    rival_pae_constants()
        .iter()
        .map(|r| {
            let rival_pae = r.get(kind).expect("supported family");
            Ok(PareEntry {
                test: r.test,
                rival_pae,
                pare: pare(pae_of_delta, rival_pae)?,
            })
        })
        .collect()
}
