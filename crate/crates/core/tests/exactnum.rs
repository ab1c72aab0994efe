use proptest::prelude::*;

use projrk::exactnum::{composition_alphas, cubic_inv, cubic_mul, to_float, CubicNum, Rational, Scalar, Scheme};

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=40).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn cubic() -> impl Strategy<Value = CubicNum> {
    (rational(), rational(), rational()).prop_map(|(a, b, c)| CubicNum::new(a, b, c))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop_oneof![rational().prop_map(Scalar::from), cubic().prop_map(Scalar::from)]
}

/// f64 evaluation of r0 + r1·θ + r2·θ² with θ = cbrt(2).
fn cubic_f64(x: &CubicNum) -> (f64, f64) {
    let t = 2f64.cbrt();
    let [a, b, c] = x.coeffs();
    let terms = [a.to_f64(), b.to_f64() * t, c.to_f64() * t * t];
    (terms.iter().sum(), terms.iter().map(|v| v.abs()).sum())
}

/// Difference of two exact values at 200 bits, as a double.
fn mp_gap(x: &Scalar, decimal: &str) -> f64 {
    let reference = Scalar::parse(decimal).unwrap();
    (to_float(x, 200).unwrap() - to_float(&reference, 200).unwrap()).to_f64().abs()
}

#[test]
fn theta_cubed_is_two() {
    let t = CubicNum::theta();
    let t3 = cubic_mul(&cubic_mul(&t, &t), &t);
    assert_eq!(t3, CubicNum::from_rational(Rational::from_int(2)));
}

#[test]
fn composition_constants_at_high_precision() {
    // references from an independent 50-digit evaluation
    let tj = composition_alphas(Scheme::TripleJump4);
    assert!(mp_gap(&tj[0], "1.3512071919596576340476878089714608269219993762171") < 1e-45);
    assert!(mp_gap(&tj[1], "-1.7024143839193152680953756179429216538439987524343") < 1e-45);
    let sz = composition_alphas(Scheme::Suzuki4);
    assert!(mp_gap(&sz[0], "0.41449077179437573714235406286076149571177460401671") < 1e-45);
    let theta = Scalar::from(CubicNum::theta());
    assert!(mp_gap(&theta, "1.2599210498948731647672106072782283505702514647015") < 1e-45);
}

#[test]
fn float_rounding_of_rationals() {
    for (n, d) in [(1, 3), (-2, 7), (22, 7), (1, 10), (123456789, 1000)] {
        let x = Scalar::ratio(n, d);
        assert_eq!(to_float(&x, 53).unwrap().to_f64(), n as f64 / d as f64, "{n}/{d}");
    }
    assert!(to_float(&Scalar::one(), 8).is_err());
}

proptest! {
    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Scalar::zero());
        prop_assert_eq!(&a * &Scalar::one(), a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b) * &b.inv().unwrap(), a.clone());
            prop_assert_eq!(a.checked_div(&b).unwrap(), &a * &b.inv().unwrap());
        }
    }

    #[test]
    fn cubic_inverse(x in cubic()) {
        prop_assume!(!x.is_zero());
        let inv = cubic_inv(&x).unwrap();
        prop_assert_eq!(cubic_mul(&x, &inv), CubicNum::one());
    }

    #[test]
    fn zero_has_no_inverse(_x in 0..1) {
        prop_assert!(cubic_inv(&CubicNum::zero()).is_err());
        prop_assert!(Scalar::zero().inv().is_err());
    }

    #[test]
    fn rational_embedding(a in rational(), b in rational()) {
        let ea = Scalar::from(CubicNum::from_rational(a.clone()));
        let eb = Scalar::from(CubicNum::from_rational(b.clone()));
        let sa = Scalar::from(a.clone());
        let sb = Scalar::from(b.clone());
        prop_assert_eq!(&ea, &sa);
        prop_assert_eq!(&ea * &eb, &sa * &sb);
        prop_assert_eq!(&ea + &sb, &sa + &eb);
        prop_assert_eq!((&sa * &eb).as_rational().cloned(), Some(&a * &b));
    }

    #[test]
    fn cubic_rounding_matches_double_evaluation(x in cubic()) {
        let (value, scale) = cubic_f64(&x);
        let got = to_float(&Scalar::from(x), 53).unwrap().to_f64();
        prop_assert!((got - value).abs() <= 4.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn parse_display_round_trip(a in rational()) {
        let s = Scalar::from(a);
        prop_assert_eq!(Scalar::parse(&s.to_string()).unwrap(), s.clone());
        let json = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<Scalar>(&json).unwrap(), s);
    }

    #[test]
    fn cubic_json_round_trip(x in cubic()) {
        let s = Scalar::from(x);
        let json = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<Scalar>(&json).unwrap(), s);
    }
}
