use lognsum::{arithmetic_mean, geometric_mean, tangential_mean, WeightVector};
use proptest::prelude::*;

#[test]
fn documented_values() {
    assert_eq!(arithmetic_mean(&[1.0, 3.0]).unwrap(), 2.0);
    assert_eq!(arithmetic_mean(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
    assert!((geometric_mean(&[1.0, 4.0]).unwrap() - 2.0).abs() < 1e-15);
    assert!((geometric_mean(&[1e-300, 1e300]).unwrap() - 1.0).abs() < 1e-12);
    assert!((tangential_mean(&[1.0, 1.0, 1.0], 5.0, None).unwrap() - 1.0).abs() < 1e-15);
    let tm = tangential_mean(&[1.0, 2.0], 1.0, None).unwrap();
    assert!((tm - (6f64.sqrt() - 1.0)).abs() < 1e-15);
    let far = tangential_mean(&[1.0, 2.0], 1e9, None).unwrap();
    assert!((far - 1.5).abs() < 1e-8);
    assert_eq!(tangential_mean(&[7.0], 3.0, None).unwrap(), 7.0);
}

#[test]
fn weighted_tangential_mean() {
    let w = WeightVector::new(vec![0.25, 0.75]).unwrap();
    let tm = tangential_mean(&[1.0, 5.0], 3.0, Some(&w)).unwrap();
    assert!((tm - (4f64.powf(0.25) * 8f64.powf(0.75) - 3.0)).abs() < 1e-14);
    assert!(WeightVector::new(vec![0.5, 0.6]).is_err());
    assert!(WeightVector::new(vec![1.5, -0.5]).is_err());
    let short = WeightVector::uniform(3).unwrap();
    assert!(tangential_mean(&[1.0, 2.0], 1.0, Some(&short)).is_err());
}

#[test]
fn invalid_inputs() {
    assert!(arithmetic_mean(&[]).is_err());
    assert!(geometric_mean(&[1.0, 0.0]).is_err());
    assert!(tangential_mean(&[1.0, -2.0], 1.0, None).is_err());
    assert!(tangential_mean(&[1.0, 2.0], f64::NAN, None).is_err());
}

fn vectors() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 2..=10)
        .prop_map(|v| v.into_iter().map(|e| 10f64.powf(e)).collect())
}

proptest! {
    #[test]
    fn mean_chain(y in vectors(), ln_d in -7.0f64..6.9) {
        let d = ln_d.exp();
        let am = arithmetic_mean(&y).unwrap();
        let gm = geometric_mean(&y).unwrap();
        let tm = tangential_mean(&y, d, None).unwrap();
        prop_assert!(gm <= tm + 1e-12 * am);
        prop_assert!(tm <= am + 1e-12 * am);
        let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = y.iter().cloned().fold(0.0, f64::max);
        for m in [am, gm, tm] {
            prop_assert!(m >= lo * (1.0 - 1e-12) && m <= hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn increasing_in_delta(y in vectors(), a in -5.0f64..6.0, b in -5.0f64..6.0) {
        let (d1, d2) = (a.min(b).exp(), a.max(b).exp());
        let am = arithmetic_mean(&y).unwrap();
        prop_assert!(
            tangential_mean(&y, d2, None).unwrap() >= tangential_mean(&y, d1, None).unwrap() - 1e-12 * am
        );
    }

    #[test]
    fn gap_halves_when_delta_doubles(y in vectors(), k in 0.0f64..4.0) {
        let hi = y.iter().cloned().fold(0.0, f64::max);
        let d = 100.0 * hi * 10f64.powf(k);
        let am = arithmetic_mean(&y).unwrap();
        let g1 = am - tangential_mean(&y, d, None).unwrap();
        let g2 = am - tangential_mean(&y, 2.0 * d, None).unwrap();
        // skip vectors whose spread leaves the gap at rounding level
        prop_assume!(g1 > 1e-9 * am);
        let r = g2 / g1;
        prop_assert!((r - 0.5).abs() <= 0.05, "ratio {r}");
    }

    #[test]
    fn constant_vectors_are_fixed(c in 1e-3f64..1e3, n in 1usize..10, d in 1e-3f64..1e3) {
        let y = vec![c; n];
        prop_assert!((tangential_mean(&y, d, None).unwrap() - c).abs() <= 1e-12 * c);
        prop_assert!((geometric_mean(&y).unwrap() - c).abs() <= 1e-12 * c);
        prop_assert!((arithmetic_mean(&y).unwrap() - c).abs() <= 1e-12 * c);
    }
}
