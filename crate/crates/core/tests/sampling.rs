use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use starstat_core::Family;

/// Kolmogorov–Smirnov distance between draws and a continuous CDF.
fn ks(mut draws: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    draws.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

fn draws(family: &Family, count: usize, seed: u64) -> Vec<f64> {
    family.draw(count, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn weibull3_million_draws() {
    let d = ks(draws(&Family::weibull(3.0).unwrap(), 1_000_000, 1), |x| 1.0 - (-x.powi(3)).exp());
    assert!(d < 0.002, "{d}");
}

#[test]
fn makeham_zero_is_exponential() {
    let d = ks(draws(&Family::makeham(0.0).unwrap(), 1_000_000, 2), |x| 1.0 - (-x).exp());
    assert!(d < 0.002, "{d}");
}

#[test]
fn every_reproduction_family_matches_its_cdf() {
    let specs = [
        "lfr:0.2", "lfr:2.5", "makeham:1", "makeham:2.5", "weibull:1.2", "gamma:1.5,1", "gamma:4,1", "beta:1,1.5",
        "beta:1.5,5", "beta:1.5,2",
    ];
    for (k, spec) in specs.iter().enumerate() {
        let f: Family = spec.parse().unwrap();
        let d = ks(draws(&f, 100_000, 10 + k as u64), |x| f.cdf(x));
        // 0.0052 is the 1% critical value at this sample size.
        assert!(d < 0.0052, "{spec}: {d}");
    }
}

#[test]
fn quantile_round_trip() {
    let specs = [
        "exp:1", "weibull:1.2", "weibull:2", "weibull:3", "weibull:4,1", "lfr:0.2", "lfr:1", "lfr:2.5", "makeham:0.2",
        "makeham:1", "makeham:2.5", "gamma:1.5,1", "gamma:2,1", "gamma:3,1", "gamma:4,1", "beta:1,1.5", "beta:1,3",
        "beta:1.5,2", "beta:1.5,5",
    ];
    for spec in specs {
        let f: Family = spec.parse().unwrap();
        for k in 1..1000 {
            let u = k as f64 / 1000.0;
            let x = f.quantile(u).unwrap();
            assert!((f.cdf(x) - u).abs() < 1e-9, "{spec} u={u}");
        }
    }
}

#[test]
fn same_seed_same_stream() {
    let f = Family::makeham(1.0).unwrap();
    let (a, b) = (draws(&f, 1000, 77), draws(&f, 1000, 77));
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_ne!(a, draws(&f, 1000, 78));
}
