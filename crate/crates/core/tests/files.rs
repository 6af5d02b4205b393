mod common;

use cvqss::channel::{db_grid, sweep};
use cvqss::curve::{curve_rows, parse_csv, to_csv, HEADER};
use cvqss::scheme_file::{fixture, sampled, SchemeFile, FIXTURE_NAMES};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampled_files_round_trip(n in 1usize..=4, m in 1usize..=2, seed in any::<u64>()) {
        let s = common::scheme(n, m, seed);
        let file = sampled(&s, seed, "orthonormalize");
        let text = file.to_json().unwrap();
        let back = SchemeFile::from_json(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.to_json().unwrap(), text);
        let reloaded = back.to_scheme().unwrap();
        prop_assert_eq!(reloaded.interferometer(), s.interferometer());
    }
}

#[test]
fn files_on_disk_round_trip() {
    let dir = std::env::temp_dir().join(format!("cvqss-files-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for name in FIXTURE_NAMES {
        let path = dir.join(format!("{name}.json"));
        let f = fixture(name).unwrap();
        f.save(&path).unwrap();
        assert_eq!(SchemeFile::load(&path).unwrap(), f);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn curve_is_sorted_and_reproducible() {
    let s = fixture("m1n4").unwrap().to_scheme().unwrap();
    let parties = s.subsets_of_size(s.threshold());
    let grid = db_grid(0.0, 40.0, 9);
    let a = to_csv(&curve_rows(&sweep(&s, &parties, &grid).unwrap()));
    let b = to_csv(&curve_rows(&sweep(&s, &parties, &grid).unwrap()));
    assert_eq!(a, b);
    assert!(a.starts_with(HEADER));
    let rows = parse_csv(&a).unwrap();
    assert_eq!(rows.len(), grid.len() * (parties.len() + 2));
    for w in rows.windows(2) {
        assert!(w[0].db < w[1].db || (w[0].db == w[1].db && w[0].party < w[1].party));
    }
    let markers: Vec<_> = rows.iter().filter(|r| r.db == 0.0 && r.party.contains('=')).collect();
    assert_eq!(markers.len(), 2);
    assert!(markers[0].party.starts_with("best=") && markers[1].party.starts_with("worst="));
    assert!(markers[0].nu_max <= markers[1].nu_max);
}
