use std::f64::consts::PI;

use proptest::prelude::*;
use wfunc::numerics::{gamma, pochhammer, reciprocal_gamma, Complex};

fn off_poles(re: f64, im: f64) -> Option<Complex> {
    let z = Complex::new(re, im);
    let nearest = z.re.round();
    if nearest <= 0.0 && (z - Complex::new(nearest, 0.0)).norm() < 1e-3 {
        None
    } else {
        Some(z)
    }
}

fn arb_z(r: f64) -> impl Strategy<Value = Complex> {
    (-r..r, -r..r).prop_filter_map("near a pole", move |(re, im)| {
        off_poles(re, im).filter(|z| z.norm() <= r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn functional_equation(z in arb_z(50.0)) {
        if let (Ok(g1), Ok(g)) = (gamma(z + 1.0), gamma(z)) {
            prop_assert!((g1 - z * g).norm() <= 1e-11 * g1.norm(), "z = {z}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reflection(z in arb_z(20.0)) {
        prop_assume!((z.re - z.re.round()).abs() > 1e-3 || z.im.abs() > 1e-3);
        let prod = gamma(z).unwrap() * gamma(Complex::new(1.0, 0.0) - z).unwrap() * (z * PI).sin() / PI;
        prop_assert!((prod - 1.0).norm() <= 1e-10, "z = {z}: {prod}");
    }

    #[test]
    fn reciprocal_times_gamma(z in arb_z(30.0)) {
        if let Ok(g) = gamma(z) {
            prop_assert!((reciprocal_gamma(z) * g - 1.0).norm() <= 1e-12);
        }
    }

    #[test]
    fn pochhammer_splits(a in arb_z(10.0), m in 0u64..80, n in 0u64..80) {
        let whole = pochhammer(a, m + n).unwrap();
        let split = pochhammer(a, m).unwrap() * pochhammer(a + m as f64, n).unwrap();
        prop_assert!((whole - split).norm() <= 1e-12 * whole.norm().max(1e-300), "{whole} {split}");
    }
}
