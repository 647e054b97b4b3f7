//! The max-kernel U-statistic δ̂, its influence values and variance estimators.
//!
//! δ̂ estimates `E max{X₁, X₂} / E X`. It equals 3/2 for every exponential
//! parent and decreases as the parent ages faster in the star order.

use crate::sample::Sample;

/// Sample sizes above this use the O(n log n) order-statistic forms.
pub const PAIRWISE_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarEstimate {
    pub delta_hat: f64,
    pub n: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceEstimate {
    pub sigma2_hat: f64,
    pub influence_values: Vec<f64>,
}

/// δ̂ for `sample`, choosing pair enumeration for small samples and the
/// sorted form otherwise.
pub fn delta_hat(sample: &Sample) -> StarEstimate {
    if sample.len() <= PAIRWISE_LIMIT {
        delta_hat_pairwise(sample)
    } else {
        delta_hat_sorted(sample)
    }
}

/// δ̂ by direct enumeration of all unordered pairs.
pub fn delta_hat_pairwise(sample: &Sample) -> StarEstimate {
    let x = sample.values();
    let n = x.len();
    let mut pair_max = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            pair_max += x[i].max(x[j]);
        }
    }
    let mean = sample.mean();
    StarEstimate {
        delta_hat: 2.0 * pair_max / (n as f64 * (n - 1) as f64 * mean),
        n,
        mean,
    }
}

/// δ̂ as `2 Σ (i−1) X₍ᵢ₎ / (n(n−1) X̄)` over the order statistics.
pub fn delta_hat_sorted(sample: &Sample) -> StarEstimate {
    let s = sample.sorted();
    let n = s.len();
    let weighted: f64 = s.iter().enumerate().map(|(i, v)| i as f64 * v).sum();
    let mean = sample.mean();
    StarEstimate {
        delta_hat: 2.0 * weighted / (n as f64 * (n - 1) as f64 * mean),
        n,
        mean,
    }
}

/// Normalized spacings `Dᵢ = (n−i+1)(X₍ᵢ₎ − X₍ᵢ₋₁₎)` with `X₍₀₎ = 0`.
pub fn normalized_spacings(sample: &Sample) -> Vec<f64> {
    let s = sample.sorted();
    let n = s.len();
    let mut prev = 0.0;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let d = (n - i) as f64 * (v - prev);
            prev = v;
            d
        })
        .collect()
}

/// δ̂ as the weighted spacings ratio `Σ cᵢ Dᵢ / Σ Dᵢ`.
pub fn delta_hat_spacings(sample: &Sample) -> StarEstimate {
    let n = sample.len();
    let d = normalized_spacings(sample);
    let coeffs = crate::exact_null::spacing_coefficients(n);
    let num: f64 = coeffs.iter().zip(&d).map(|(c, d)| c * d).sum();
    let den: f64 = d.iter().sum();
    StarEstimate {
        delta_hat: num / den,
        n,
        mean: sample.mean(),
    }
}

/// Plug-in influence values φ̂(Xᵢ), using the sample's own δ̂.
pub fn influence_values(sample: &Sample) -> Vec<f64> {
    let x = sample.values();
    let n = x.len();
    let half_delta = delta_hat(sample).delta_hat / 2.0;
    let total: f64 = x.iter().sum();

    let max_sums: Vec<f64> = if n <= PAIRWISE_LIMIT {
        x.iter()
            .enumerate()
            .map(|(i, &xi)| {
                x.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &xj)| xi.max(xj))
                    .sum()
            })
            .collect()
    } else {
        // Order statistic k (0-based) is the max against the k values below it.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
        let mut out = vec![0.0; n];
        let mut above: f64 = total;
        for (k, &idx) in order.iter().enumerate() {
            above -= x[idx];
            out[idx] = k as f64 * x[idx] + above;
        }
        out
    };

    x.iter()
        .zip(max_sums)
        .map(|(&xi, max_sum)| {
            let pair_sum = (n - 2) as f64 * xi + total;
            (max_sum - half_delta * pair_sum) / (n - 1) as f64
        })
        .collect()
}

/// σ̂²_F = 4 Σ φ̂²(Xᵢ) / (n X̄²).
pub fn sigma2_hat(sample: &Sample) -> VarianceEstimate {
    let phi = influence_values(sample);
    let n = sample.len() as f64;
    let mean = sample.mean();
    let sum_sq: f64 = phi.iter().map(|p| p * p).sum();
    VarianceEstimate {
        sigma2_hat: 4.0 * sum_sq / (n * mean * mean),
        influence_values: phi,
    }
}

/// δ̂(F, G) = δ̂_F − δ̂_G.
pub fn two_sample_delta(x: &Sample, y: &Sample) -> f64 {
    delta_hat(x).delta_hat - delta_hat(y).delta_hat
}

/// σ̂²_{F,G} = (N/n) σ̂²_F + (N/m) σ̂²_G with N = n + m.
pub fn sigma2_pooled(x: &Sample, y: &Sample) -> f64 {
    pooled_from_parts(
        x.len(),
        sigma2_hat(x).sigma2_hat,
        y.len(),
        sigma2_hat(y).sigma2_hat,
    )
}

pub(crate) fn pooled_from_parts(n: usize, s2x: f64, m: usize, s2y: f64) -> f64 {
    let big_n = (n + m) as f64;
    big_n / n as f64 * s2x + big_n / m as f64 * s2y
}
