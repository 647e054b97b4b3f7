//! Exact null law of δ̂ under an exponential parent.
//!
//! Under exponentiality the normalized spacings are i.i.d., so δ̂ is a fixed
//! linear combination `Σ cᵢ Wᵢ` of a uniform point on the simplex. Its CDF is
//! the alternating Lagrange-type sum
//!
//! ```text
//! P{δ̂ ≤ x} = 1 − Σᵢ Π_{j≠i} (cᵢ − x)/(cᵢ − cⱼ) · 1{x < cᵢ}
//! ```
//!
//! The terms grow combinatorially with `n`, so each one is evaluated in
//! double-double precision and the sum is taken over whichever side of `x`
//! has the smaller terms (the full sum over all nodes is exactly one).

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use serde::Serialize;

/// Largest `n` accepted by the exact machinery.
pub const MAX_EXACT_N: usize = 200;
/// Largest `n` for which the CDF is accurate to 1e-9 absolute.
pub const GUARANTEED_EXACT_N: usize = 60;

const BISECT_WIDTH: f64 = 1e-12;

/// `c_{i:n} = 2 Σ_{j=i}^{n} (j−1) / ((n−1)(n−i+1))`, for i = 1..n.
pub fn spacing_coefficients(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| {
            // Σ_{j=i}^{n} (j−1) as an exact integer.
            let sum: u64 = (i as u64..=n as u64).map(|j| j - 1).sum();
            (2 * sum) as f64 / ((n - 1) as f64 * (n - i + 1) as f64)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Lower,
    Upper,
}

/// The exact null distribution of δ̂ for a fixed sample size.
#[derive(Debug, Clone)]
pub struct ExactNull {
    n: usize,
    coeffs: Vec<f64>,
    nodes: Vec<DoubleDouble>,
    // (−1)^{n−i} C(n−1, i−1) (n−1)^{n−1} / (n−1)!
    weights: Vec<DoubleDouble>,
}

impl ExactNull {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", format!("need n >= 2, got {n}")));
        }
        if n > MAX_EXACT_N {
            return Err(Error::param(
                "n",
                format!("exact null law supported for n <= {MAX_EXACT_N}, got {n}"),
            ));
        }
        let m = n - 1;
        let md = DoubleDouble::new(m as f64);
        let nodes = (1..=n)
            .map(|i| DoubleDouble::new((n + i - 2) as f64) / md)
            .collect();

        // m^m / m! as a running product of m/k.
        let mut scale = DoubleDouble::ONE;
        for k in 1..=m {
            scale = scale * (md / DoubleDouble::new(k as f64));
        }
        let mut weights = Vec::with_capacity(n);
        let mut binom = DoubleDouble::ONE;
        for i in 1..=n {
            if i > 1 {
                let k = (i - 1) as f64;
                binom = binom * DoubleDouble::new((m + 1) as f64 - k) / DoubleDouble::new(k);
            }
            let w = binom * scale;
            weights.push(if (n - i).is_multiple_of(2) { w } else { -w });
        }

        Ok(ExactNull {
            n,
            coeffs: spacing_coefficients(n),
            nodes,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `P{δ̂ ≤ x}` under exponentiality.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= 1.0 {
            return 0.0;
        }
        if x >= 2.0 {
            return 1.0;
        }
        let xd = DoubleDouble::new(x);
        let power = self.n - 1;
        let lower_side = x < 1.5;
        let mut acc = DoubleDouble::ZERO;
        for (node, w) in self.nodes.iter().zip(&self.weights) {
            let gap = *node - xd;
            let right_of_x = gap.hi > 0.0;
            if right_of_x == lower_side {
                continue;
            }
            acc = acc + *w * powi(gap, power);
        }
        let p = if lower_side {
            acc.to_f64()
        } else {
            (DoubleDouble::ONE - acc).to_f64()
        };
        p.clamp(0.0, 1.0)
    }

    /// Inverts [`ExactNull::cdf`] by bisection on (1, 2) followed by one
    /// secant step inside the final bracket.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param("p", format!("must lie in (0, 1), got {p}")));
        }
        let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
        let (mut f_lo, mut f_hi) = (0.0, 1.0);
        while hi - lo > BISECT_WIDTH {
            let mid = 0.5 * (lo + hi);
            let f = self.cdf(mid);
            if f < p {
                lo = mid;
                f_lo = f;
            } else {
                hi = mid;
                f_hi = f;
            }
        }
        if f_hi > f_lo {
            let x = lo + (p - f_lo) * (hi - lo) / (f_hi - f_lo);
            Ok(x.clamp(lo, hi))
        } else {
            Ok(0.5 * (lo + hi))
        }
    }

    /// Critical value of the standardized statistic `√(12n)(δ̂ − 3/2)`.
    pub fn critical_value(&self, alpha: f64, tail: Tail) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::param("alpha", format!("must lie in (0, 0.5), got {alpha}")));
        }
        let p = match tail {
            Tail::Lower => alpha,
            Tail::Upper => 1.0 - alpha,
        };
        let q = self.quantile(p)?;
        Ok((12.0 * self.n as f64).sqrt() * (q - 1.5))
    }
}

fn powi(base: DoubleDouble, mut exp: usize) -> DoubleDouble {
    let mut result = DoubleDouble::ONE;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b;
        }
        b = b * b;
        exp >>= 1;
    }
    result
}

pub fn null_cdf(n: usize, x: f64) -> Result<f64> {
    Ok(ExactNull::new(n)?.cdf(x))
}

pub fn null_quantile(n: usize, p: f64) -> Result<f64> {
    ExactNull::new(n)?.quantile(p)
}

pub fn critical_value(n: usize, alpha: f64, tail: Tail) -> Result<f64> {
    ExactNull::new(n)?.critical_value(alpha, tail)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalRow {
    pub n: usize,
    /// One entry per alpha, in ascending alpha order.
    pub lower: Vec<f64>,
    /// One entry per alpha, in descending alpha order.
    pub upper: Vec<f64>,
}

/// Grid of standardized exact critical values, laid out as lower-tail columns
/// followed by mirrored upper-tail columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalTable {
    pub alphas: Vec<f64>,
    pub rows: Vec<CriticalRow>,
}

pub fn critical_table(n_max: usize, alphas: &[f64]) -> Result<CriticalTable> {
    if !(2..=MAX_EXACT_N).contains(&n_max) {
        return Err(Error::param(
            "n_max",
            format!("must lie in 2..={MAX_EXACT_N}, got {n_max}"),
        ));
    }
    if alphas.is_empty() {
        return Err(Error::param("alphas", "at least one level is required"));
    }
    if n_max > GUARANTEED_EXACT_N {
        log::warn!(
            "exact critical values beyond n = {GUARANTEED_EXACT_N} carry reduced accuracy"
        );
    }
    let mut asc = alphas.to_vec();
    asc.sort_by(f64::total_cmp);
    asc.dedup();
    let mut rows = Vec::with_capacity(n_max - 1);
    for n in 2..=n_max {
        let law = ExactNull::new(n)?;
        let lower = asc
            .iter()
            .map(|&a| law.critical_value(a, Tail::Lower))
            .collect::<Result<Vec<_>>>()?;
        let upper = asc
            .iter()
            .rev()
            .map(|&a| law.critical_value(a, Tail::Upper))
            .collect::<Result<Vec<_>>>()?;
        rows.push(CriticalRow { n, lower, upper });
    }
    Ok(CriticalTable { alphas: asc, rows })
}

fn alpha_label(a: f64) -> String {
    let s = format!("{a}");
    match s.split_once('.') {
        Some((_, frac)) if frac.len() < 2 => format!("{a:.2}"),
        _ => s,
    }
}

impl CriticalTable {
    pub fn header(&self) -> Vec<String> {
        let mut cols = vec!["n".to_string()];
        cols.extend(self.alphas.iter().map(|a| format!("lower_{}", alpha_label(*a))));
        cols.extend(
            self.alphas
                .iter()
                .rev()
                .map(|a| format!("upper_{}", alpha_label(*a))),
        );
        cols
    }

    pub fn to_csv(&self, precision: usize) -> String {
        let mut out = self.header().join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.n.to_string());
            for v in row.lower.iter().chain(&row.upper) {
                out.push_str(&format!(",{v:.precision$}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self, precision: usize) -> String {
        let header = self.header();
        let width = header
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max(precision + 4);
        let mut out = String::new();
        out.push_str(&format!("{:>4}", header[0]));
        for h in &header[1..] {
            out.push_str(&format!(" {h:>width$}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:>4}", row.n));
            for v in row.lower.iter().chain(&row.upper) {
                out.push_str(&format!(" {v:>width$.precision$}"));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coefficient_examples() {
        assert_eq!(spacing_coefficients(2), vec![1.0, 2.0]);
        assert_eq!(spacing_coefficients(3), vec![1.0, 1.5, 2.0]);
        for n in 2..=100 {
            let c = spacing_coefficients(n);
            for (i, ci) in c.iter().enumerate() {
                let closed = (n + i - 1) as f64 / (n - 1) as f64;
                assert_relative_eq!(*ci, closed, max_relative = 1e-15);
                assert_relative_eq!(ci + c[n - 1 - i], 3.0, max_relative = 1e-15);
            }
            assert!(c.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(c[0], 1.0);
            assert_eq!(c[n - 1], 2.0);
        }
    }

    #[test]
    fn cdf_examples() {
        assert_relative_eq!(null_cdf(2, 1.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(null_cdf(2, 1.3).unwrap(), 0.3, epsilon = 1e-15);
        let x = 1.158112;
        let hand = 1.0 - (-4.0 * (1.5 - x) * (1.5_f64 - x) + 2.0 * (2.0 - x) * (2.0_f64 - x));
        assert_relative_eq!(null_cdf(3, x).unwrap(), hand, epsilon = 1e-14);
        assert!((null_cdf(3, x).unwrap() - 0.05).abs() < 1e-4);
        assert_relative_eq!(null_cdf(10, 1.5).unwrap(), 0.5, epsilon = 1e-12);
        assert_eq!(null_cdf(10, 0.9).unwrap(), 0.0);
        assert_eq!(null_cdf(10, 2.1).unwrap(), 1.0);
    }

    #[test]
    fn quantile_examples() {
        assert!((null_quantile(2, 0.05).unwrap() - 1.05).abs() < 1e-11);
        for n in [2, 3, 7, 25, 60] {
            assert!((null_quantile(n, 0.5).unwrap() - 1.5).abs() < 1e-9);
        }
        let q = null_quantile(10, 0.05).unwrap();
        assert!((q - (1.5 - 1.736865 / 120f64.sqrt())).abs() < 1e-6);
        assert!(null_quantile(10, 0.0).is_err());
        assert!(null_quantile(10, 1.0).is_err());
    }

    #[test]
    fn critical_value_examples() {
        assert!((critical_value(2, 0.05, Tail::Lower).unwrap() + 2.204541).abs() < 1e-6);
        // Published values carry noise in the fifth decimal for larger n.
        assert!((critical_value(20, 0.01, Tail::Lower).unwrap() + 2.371340).abs() < 1e-4);
        assert!((critical_value(40, 0.1, Tail::Upper).unwrap() - 1.300159).abs() < 1e-4);
        assert!(critical_value(10, 0.5, Tail::Lower).is_err());
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(ExactNull::new(1).is_err());
        assert!(ExactNull::new(MAX_EXACT_N + 1).is_err());
        assert!(critical_table(1, &[0.05]).is_err());
        assert!(critical_table(201, &[0.05]).is_err());
    }

    #[test]
    fn table_shape_and_header() {
        let t = critical_table(2, &[0.1, 0.01, 0.05]).unwrap();
        assert_eq!(t.rows.len(), 1);
        let csv = t.to_csv(6);
        assert!(csv.starts_with(
            "n,lower_0.01,lower_0.05,lower_0.10,upper_0.10,upper_0.05,upper_0.01\n"
        ));
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "2,-2.400500,-2.204541,-1.959592,1.959592,2.204541,2.400500"
        );
        let row = &t.rows[0];
        for (l, u) in row.lower.iter().zip(row.upper.iter().rev()) {
            assert!((l + u).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_about_three_halves() {
        for n in [3, 8, 21, 40, 60] {
            let law = ExactNull::new(n).unwrap();
            for k in 1..50 {
                let t = k as f64 * 0.0099;
                let s = law.cdf(1.5 - t) + law.cdf(1.5 + t);
                assert!((s - 1.0).abs() < 1e-9, "n={n} t={t} sum={s}");
            }
        }
    }

    #[test]
    fn strictly_increasing_on_grid() {
        for n in [2, 5, 30, 60] {
            let law = ExactNull::new(n).unwrap();
            let mut prev = 0.0;
            for k in 1..1000 {
                let f = law.cdf(1.0 + k as f64 * 1e-3);
                // Only the f64 grid just below 1 may plateau.
                assert!(f > prev || (f == prev && 1.0 - f < 1e-15), "n={n} k={k}");
                prev = f;
            }
        }
    }
}
