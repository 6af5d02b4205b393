mod common;

use cvqss::haar::{haar_density, sample_haar, samplers, EulerAngles, EulerSampler, RngSeed, UnitarySampler};
use cvqss::linalg::max_abs_diff;
use proptest::prelude::*;

fn u11_squared(sampler: &dyn UnitarySampler, n: usize, seed: u64, count: usize) -> Vec<f64> {
    let mut rng = RngSeed(seed).rng();
    (0..count).map(|_| sampler.sample_unitary(n, &mut rng)[(0, 0)].norm_sqr()).collect()
}

#[test]
fn euler_marginals_are_haar_for_several_sizes() {
    for n in [2, 4, 5] {
        let xs = u11_squared(&EulerSampler::hurwitz(), n, 40 + n as u64, 5000);
        let d = common::ks_statistic(&xs, |x| 1.0 - (1.0 - x).powi(n as i32 - 1));
        assert!(d < common::ks_critical(xs.len()), "n = {n}: D = {d}");
    }
}

#[test]
fn literal_sine_weight_is_not_haar() {
    // at n = 2 the sine-only weight makes |U11|^2 = cos^2(phi) ~ Beta(1/2, 1)
    let xs = u11_squared(&EulerSampler::sine_only(), 2, 7, 5000);
    let uniform = common::ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
    assert!(uniform > 5.0 * common::ks_critical(xs.len()), "D = {uniform}");
    let beta_half_one = common::ks_statistic(&xs, |x| x.clamp(0.0, 1.0).sqrt());
    assert!(beta_half_one < common::ks_critical(xs.len()), "D = {beta_half_one}");
}

#[test]
fn density_at_zero_angles_vanishes() {
    assert_eq!(haar_density(&EulerAngles::zeros(3)), 0.0);
    assert!(haar_density(&EulerAngles::zeros(1)) > 0.0);
}

#[test]
fn registry_knows_all_methods() {
    assert_eq!(samplers().names(), vec!["euler", "orthonormalize", "euler-literal"]);
    assert!(sample_haar(3, RngSeed(0), "magic").is_err());
    assert!(sample_haar(0, RngSeed(0), "euler").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampling_is_deterministic(n in 1usize..=6, seed in any::<u64>()) {
        for method in samplers().names() {
            let a = sample_haar(n, RngSeed(seed), method).unwrap().matrix();
            let b = sample_haar(n, RngSeed(seed), method).unwrap().matrix();
            prop_assert_eq!(max_abs_diff(&a, &b), 0.0);
        }
    }

    #[test]
    fn child_seeds_differ(seed in any::<u64>(), i in 0u64..1000, j in 0u64..1000) {
        prop_assume!(i != j);
        prop_assert_ne!(RngSeed(seed).child(i), RngSeed(seed).child(j));
    }
}
