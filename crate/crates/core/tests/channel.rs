mod common;

use cvqss::channel::{
    db_grid, fidelity_coherent, fidelity_gaussian, noise_matrix, nu_max, r_to_db, sweep, NoiseMatrix,
};
use cvqss::scheme_file::fixture;
use cvqss::sharing::PlayerSubset;
use cvqss::symplectic::SqueezerProfile;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn b_matrix(rows: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1usize..=6).prop_flat_map(move |cols| {
        prop::collection::vec(-3.0..3.0f64, rows * cols)
            .prop_map(move |v| DMatrix::from_row_slice(rows, cols, &v))
    })
}

fn power_iteration(a: &DMatrix<f64>) -> f64 {
    let mut v = DVector::from_element(a.nrows(), 1.0).normalize();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w = a * &v;
        let next = v.dot(&w);
        v = w.normalize();
        if (next - lambda).abs() <= 1e-15 * next.abs() {
            break;
        }
        lambda = next;
    }
    lambda
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn noise_scales_exactly(b in b_matrix(2), r in 0.0..5.0f64) {
        let n0 = noise_matrix(&b, &SqueezerProfile::uniform(b.ncols(), 0.0)).unwrap();
        let nr = noise_matrix(&b, &SqueezerProfile::uniform(b.ncols(), r)).unwrap();
        let scaled = n0.matrix() * (-2.0 * r).exp();
        prop_assert!((nr.matrix() - &scaled).amax() <= 1e-12 * scaled.amax().max(1e-300));
        let nu0 = nu_max(&n0);
        if nu0 > 0.0 {
            prop_assert!((nu_max(&nr) - (-2.0 * r).exp() * nu0).abs() <= 1e-12 * nu0);
        }
    }

    #[test]
    fn closed_form_fidelity_matches(b in b_matrix(2), r in 0.0..4.0f64) {
        let f = fidelity_coherent(&b, r).unwrap();
        let g = fidelity_gaussian(&noise_matrix(&b, &SqueezerProfile::uniform(b.ncols(), r)).unwrap());
        prop_assert!((f - g).abs() <= 1e-12);
    }

    #[test]
    fn fidelity_rises_with_squeezing(b in b_matrix(2), r in 0.0..3.0f64, dr in 0.01..1.0f64) {
        prop_assume!(b.amax() > 1e-3);
        prop_assert!(fidelity_coherent(&b, r + dr).unwrap() > fidelity_coherent(&b, r).unwrap());
        let n = |r: f64| nu_max(&noise_matrix(&b, &SqueezerProfile::uniform(b.ncols(), r)).unwrap());
        prop_assert!(n(r + dr) < n(r));
    }

    #[test]
    fn nu_max_matches_power_iteration(b in b_matrix(4)) {
        let n = noise_matrix(&b, &SqueezerProfile::uniform(b.ncols(), 0.3)).unwrap();
        let top = nu_max(&n);
        prop_assume!(top > 1e-6);
        prop_assert!((power_iteration(n.matrix()) - top).abs() <= 1e-8 * top.max(1.0));
    }
}

#[test]
fn two_mode_fidelity_matches_wigner_overlap() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..3 {
        let n = NoiseMatrix::new(common::random_psd(&mut rng, 4, 1.5)).unwrap();
        let oracle = common::wigner_overlap(n.matrix(), 4.5, 0.3);
        assert!((fidelity_gaussian(&n) - oracle).abs() < 1e-5, "{} vs {oracle}", fidelity_gaussian(&n));
    }
}

#[test]
fn rejects_invalid_noise() {
    assert!(NoiseMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0])).is_err());
    assert!(NoiseMatrix::new(DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0])).is_err());
    assert!(fidelity_coherent(&DMatrix::zeros(4, 2), 0.0).is_err());
    assert_eq!(fidelity_coherent(&DMatrix::zeros(2, 3), 0.0).unwrap(), 1.0);
}

#[test]
fn sweep_rows_and_labels() {
    let s = fixture("m1n2good").unwrap().to_scheme().unwrap();
    let parties = s.subsets_of_size(2);
    let points = sweep(&s, &parties, &db_grid(0.0, 40.0, 41)).unwrap();
    assert_eq!(points.len(), 41);
    let (w0, b0) = (points[0].worst.clone(), points[0].best.clone());
    let mut last = 0.0;
    for p in &points {
        assert!((p.db - r_to_db(p.r)).abs() < 1e-12);
        assert_eq!(p.parties.len(), 3);
        assert_eq!((&p.worst, &p.best), (&w0, &b0));
        assert!(p.best_quality().nu_max <= p.worst_quality().nu_max);
        assert!(p.worst_quality().fidelity > last);
        last = p.worst_quality().fidelity;
    }
    let at0 = &points[0];
    for q in &at0.parties {
        let dec = cvqss::sharing::decoding_plan(&s, &q.party).unwrap();
        let b = &dec.decoder().unwrap().b;
        let lam = (b * b.transpose()).symmetric_eigen().eigenvalues.max();
        assert!((q.nu_max - lam / 2.0).abs() < 1e-12);
    }
}

#[test]
fn sweep_rejects_non_decodable_party() {
    let s = fixture("m1n2good").unwrap().to_scheme().unwrap();
    let single = PlayerSubset::new(vec![1], 3).unwrap();
    assert!(sweep(&s, &[single], &[0.0]).is_err());
}

#[test]
fn bad_fixture_is_worse_everywhere() {
    let grid = db_grid(0.0, 40.0, 81);
    let worst = |name: &str| {
        let s = fixture(name).unwrap().to_scheme().unwrap();
        let parties = s.subsets_of_size(s.threshold());
        sweep(&s, &parties, &grid).unwrap().iter().map(|p| p.worst_quality().nu_max).collect::<Vec<_>>()
    };
    let bad = worst("m1n2bad");
    let good = worst("m1n2good");
    assert!(bad.iter().zip(&good).all(|(b, g)| b >= g));
}
