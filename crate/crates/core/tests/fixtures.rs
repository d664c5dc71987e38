//! Regression checks tying each embedded fixture to the counts it must reproduce.

mod common;

use carpetdim::counting::preimage_count;
use carpetdim::fixtures;
use carpetdim::spectral::perron_eigenvalue;
use carpetdim::specfile::{factor_to_json, parse_spec};
use carpetdim::validate_sft;
use num_bigint::BigUint;

use common::word;

fn count(fs: &carpetdim::FactorSystem, s: &str) -> BigUint {
    preimage_count(fs, &word(fs, s)).unwrap()
}

#[test]
fn fixtures_round_trip_and_mix() {
    for (file, text) in fixtures::files() {
        let spec = parse_spec(text).unwrap();
        let fs = spec.factor_system().unwrap();
        let back = parse_spec(&factor_to_json(&fs, spec.name.as_deref(), &spec.notes)).unwrap();
        assert_eq!(back.factor_system().unwrap(), fs, "{file}");
        assert!(validate_sft(fs.source()).mixing, "{file}");
        assert_eq!(fs.image_size(), 2, "{file}");
    }
}

#[test]
fn clump_not_additive_shape_and_parity() {
    let fs = fixtures::clump_not_additive();
    assert_eq!(fs.source().alphabet_size(), 5);
    assert_eq!(fs.fiber(0).len(), 1);
    assert_eq!(fs.fiber(1).len(), 4);
    for n in 1..=16 {
        let want = if n % 2 == 1 {
            BigUint::from(1u32)
        } else {
            (BigUint::from(1u32) << (n / 2 - 1)) + 1u32
        };
        assert_eq!(count(&fs, &format!("1{}1", "2".repeat(n))), want, "n = {n}");
    }
}

#[test]
fn clump_additive_counts_factor_over_clump() {
    let fs = fixtures::clump_additive();
    for n in 1..=6 {
        for k in 1..=6 {
            let joined = count(&fs, &format!("1{}11{}1", "2".repeat(n), "2".repeat(k)));
            let parts = count(&fs, &format!("1{}1", "2".repeat(n))) * count(&fs, &format!("1{}1", "2".repeat(k)));
            assert_eq!(joined, parts);
        }
    }
}

#[test]
fn no_clump_fibers_are_golden_and_full() {
    let fs = fixtures::no_clump_additive();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let two = fs.image_index("2").unwrap();
    let one = fs.image_index("1").unwrap();
    let a = perron_eigenvalue(&fs.block(two, two).to_dense()).unwrap();
    assert!((a.value - golden).abs() < 1e-12);
    let b = perron_eigenvalue(&fs.block(one, one).to_dense()).unwrap();
    assert!((b.value - 2.0).abs() < 1e-12);
    assert_eq!(count(&fs, "12"), BigUint::from(2u32));
    assert_eq!(count(&fs, "21"), BigUint::from(2u32));
    assert_eq!(count(&fs, "2"), BigUint::from(2u32));
    for n in 1..=12 {
        let twos = "2".repeat(n);
        assert_eq!(count(&fs, &format!("1{twos}1")), count(&fs, &twos));
    }
}

#[test]
fn not_gibbs_continuous_shape() {
    let fs = fixtures::not_gibbs_continuous();
    assert_eq!(fs.source().alphabet_size(), 3);
    // lifts of 1 2^n 1 are 1 2^a 3^b 1 with a >= 1, a + b = n
    for n in 1..=12 {
        assert_eq!(count(&fs, &format!("1{}1", "2".repeat(n))), BigUint::from(n));
    }
}
