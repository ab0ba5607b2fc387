use proptest::prelude::*;
use sirtail_core::pathloss::PathLossModel;

fn bounded() -> impl Strategy<Value = PathLossModel> {
    prop_oneof![
        (2u32..4, 1.1f64..5.0).prop_map(|(d, beta)| PathLossModel::BoundedPower { d, beta }),
        (2u32..4, 1.1f64..5.0, 0.0f64..3.0).prop_map(|(d, beta, a)| PathLossModel::BoundedPowerLog { d, beta, a }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bounded_is_a_nonincreasing_attenuation(p in bounded(), r in 0.0f64..50.0, dr in 0.0f64..5.0) {
        let (a, b) = (p.eval(r).unwrap(), p.eval(r + dr).unwrap());
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(b <= a);
    }

    #[test]
    fn g_inverse_inverts(p in bounded(), s in 0.0f64..1e4) {
        let z = p.g(s).unwrap();
        let back = p.g_inverse(z).unwrap();
        prop_assert!((p.g(back).unwrap() - z).abs() <= 1e-8 * z.max(1.0));
    }

    #[test]
    fn power_law_is_homogeneous(d in 2u32..4, beta in 1.1f64..5.0, r in 0.01f64..100.0, c in 0.1f64..10.0) {
        let p = PathLossModel::PowerLaw { d, beta };
        let lhs = p.eval(c * r).unwrap();
        let rhs = c.powf(-(d as f64) * beta) * p.eval(r).unwrap();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn descriptor_round_trip(p in bounded()) {
        prop_assert_eq!(p.to_string().parse::<PathLossModel>().unwrap(), p);
    }
}

#[test]
fn power_law_is_singular_and_unbounded() {
    let p = PathLossModel::PowerLaw { d: 2, beta: 2.0 };
    assert!(p.eval(0.0).is_err());
    assert!(!p.is_bounded());
    assert!(p.g(1.0).is_err());
    assert!("powerlaw:d=2,beta=0.5".parse::<PathLossModel>().and_then(|p| p.validate()).is_err());
}
