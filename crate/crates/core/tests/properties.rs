use proptest::prelude::*;
use starstat_core::estimator::{
    delta_hat, delta_hat_pairwise, delta_hat_sorted, delta_hat_spacings, influence_values, sigma2_hat, sigma2_pooled,
    two_sample_delta,
};
use starstat_core::rivals::{deshpande_j, el_bassiouny_delta1, ik_two_sample, kochar_t, link_gamma};
use starstat_core::testing::{one_sample_test, two_sample_test, Method, ReferenceMoments};
use starstat_core::{null_cdf, Sample};

fn lifetimes(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..1e3, 2..max_len)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn forms_agree(v in lifetimes(150)) {
        let s = Sample::new(v).unwrap();
        let p = delta_hat_pairwise(&s).delta_hat;
        prop_assert!(close(p, delta_hat_sorted(&s).delta_hat, 1e-12));
        prop_assert!(close(p, delta_hat_spacings(&s).delta_hat, 1e-12));
    }

    #[test]
    fn range(v in lifetimes(80)) {
        let d = delta_hat(&Sample::new(v).unwrap()).delta_hat;
        prop_assert!((1.0 - 1e-12..2.0).contains(&d));
    }

    #[test]
    fn scale_invariance(v in lifetimes(80), c in prop::sample::select(vec![1e-3, 0.37, 1.0, 42.0, 1e3])) {
        let s = Sample::new(v).unwrap();
        let t = s.scaled(c).unwrap();
        prop_assert!(close(delta_hat(&s).delta_hat, delta_hat(&t).delta_hat, 1e-12));
        let (a, b) = (sigma2_hat(&s).sigma2_hat, sigma2_hat(&t).sigma2_hat);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-3));
        prop_assert!(close(deshpande_j(&s, 0.9).unwrap(), deshpande_j(&t, 0.9).unwrap(), 1e-12));
        prop_assert!((kochar_t(&s) - kochar_t(&t)).abs() < 1e-12);
        prop_assert!(close(link_gamma(&s), link_gamma(&t), 1e-12));
        prop_assert!((el_bassiouny_delta1(&s) - el_bassiouny_delta1(&t)).abs() < 1e-12);
    }

    #[test]
    fn influence_sums_to_zero(v in lifetimes(120)) {
        let phi = influence_values(&Sample::new(v).unwrap());
        let scale = phi.len() as f64 * phi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        prop_assert!(phi.iter().sum::<f64>().abs() <= 1e-10 * scale.max(1e-300));
    }

    #[test]
    fn el_bassiouny_identity(v in lifetimes(60)) {
        let s = Sample::new(v).unwrap();
        prop_assert!((delta_hat(&s).delta_hat - 1.5 + el_bassiouny_delta1(&s)).abs() < 1e-12);
    }

    #[test]
    fn two_sample_antisymmetry(x in lifetimes(40), y in lifetimes(40)) {
        let (x, y) = (Sample::new(x).unwrap(), Sample::new(y).unwrap());
        prop_assert_eq!(two_sample_delta(&x, &y), -two_sample_delta(&y, &x));
        prop_assert!(close(sigma2_pooled(&x, &y), sigma2_pooled(&y, &x), 1e-14));
        prop_assert_eq!(ik_two_sample(&x, &y), -ik_two_sample(&y, &x));
        if let (Ok(a), Ok(b)) = (two_sample_test(&x, &y, 0.05), two_sample_test(&y, &x, 0.05)) {
            prop_assert!((a.standardized + b.standardized).abs() < 1e-12);
            prop_assert!((a.p_value + b.p_value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deshpande_nonincreasing_in_b(v in lifetimes(40), b1 in 0.01f64..0.99, b2 in 0.01f64..0.99) {
        let s = Sample::new(v).unwrap();
        let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
        prop_assert!(deshpande_j(&s, lo).unwrap() >= deshpande_j(&s, hi).unwrap());
    }

    #[test]
    fn exact_law_symmetric(n in 2usize..=60, t in 0.0f64..0.5) {
        let s = null_cdf(n, 1.5 - t).unwrap() + null_cdf(n, 1.5 + t).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn decisions_scale_invariant(v in lifetimes(50), c in 1e-2f64..1e2) {
        let s = Sample::new(v).unwrap();
        let t = s.scaled(c).unwrap();
        let r = ReferenceMoments::exponential();
        for method in [Method::Exact, Method::Asymptotic] {
            let a = one_sample_test(&s, &r, 0.05, method).unwrap();
            let b = one_sample_test(&t, &r, 0.05, method).unwrap();
            prop_assert_eq!(a.reject, b.reject);
            prop_assert!((a.p_value - b.p_value).abs() < 1e-10);
            prop_assert!((a.statistic - b.statistic).abs() < 1e-12);
        }
    }
}

#[test]
fn constant_samples() {
    for n in [2, 3, 10, 100] {
        let s = Sample::new(vec![2.5; n]).unwrap();
        assert!((delta_hat(&s).delta_hat - 1.0).abs() < 1e-15);
        assert_eq!(sigma2_hat(&s).sigma2_hat, 0.0);
        assert!((el_bassiouny_delta1(&s) - 0.5).abs() < 1e-15);
        assert_eq!(deshpande_j(&s, 0.5).unwrap(), 1.0);
        assert_eq!(link_gamma(&s), 1.0);
    }
}

#[test]
fn ik_identical_samples_cancel() {
    let x = Sample::new(vec![0.4, 1.3, 2.2, 0.9]).unwrap();
    assert_eq!(ik_two_sample(&x, &x), 0.0);
}
