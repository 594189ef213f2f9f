use proptest::prelude::*;
use resonant::corpus::{check_rng, random_set, WeightKind};
use resonant::io::{read_weighted_set, write_weighted_set, Mode};
use resonant::resonance::{omega_single_bucketed, omega_single_oracle, ResonanceConfig};
use resonant::weighted::Scalar;

fn round_trip(kind: WeightKind, mode: Mode, seed: u64) {
    let mut rng = check_rng(seed, "pipeline");
    let f = random_set(&mut rng, 30, 4, kind).unwrap();
    let mut buf = Vec::new();
    write_weighted_set(&mut buf, &f).unwrap();
    let g = read_weighted_set(buf.as_slice(), mode).unwrap();
    assert_eq!(f, g);
    let cfg = ResonanceConfig::default();
    let a = omega_single_bucketed(&f, &cfg).unwrap();
    let b = omega_single_oracle(&g, &cfg).unwrap();
    match (&a.omega, &b.omega) {
        (Scalar::Exact(x), Scalar::Exact(y)) => assert_eq!(x, y),
        // same terms, different summation order
        (x, y) => assert!((x.to_f64() - y.to_f64()).abs() <= 1e-12 * y.to_f64().abs(), "{x:?} vs {y:?}"),
    }
}

#[test]
fn exact_sets_survive_csv() {
    for seed in 0..4 {
        round_trip(WeightKind::Rational, Mode::Exact, seed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn complex_sets_survive_csv(seed in any::<u64>()) {
        round_trip(WeightKind::Complex, Mode::Numeric, seed);
    }
}
