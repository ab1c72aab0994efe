use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use projrk::analysis::{analyze, classical_order, is_symplectic, Order};
use projrk::cli::verify::random_alternating;
use projrk::exactnum::{Scalar, Scheme};
use projrk::linalg::is_zero_matrix;
use projrk::tableau::{
    alternating_substeps, eliminate_constraints, m_matrix, midpoint_projection_tableau, monoimplicit_decompose,
    monoimplicit_form, monoimplicit_tableau, quadratic_preservation_check, symmetric_projection_extended,
    symmetric_projection_tableau, ButcherTableau, CompositionCoefficients,
};
use projrk::Error;

fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn alternating(seed: u64, len: usize) -> CompositionCoefficients {
    random_alternating(&mut ChaCha8Rng::seed_from_u64(seed), len)
}

/// Random leapfrog fractions summing to one.
fn fractions(raw: &[i64]) -> Vec<Scalar> {
    let mut xs: Vec<Scalar> = raw.iter().map(|&n| q(n, 11)).collect();
    let partial = xs.iter().fold(Scalar::zero(), |acc, x| acc + x);
    xs.push(Scalar::one() - partial);
    xs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn elimination_equals_closed_form(seed in any::<u64>(), k in 1usize..=3) {
        let list = alternating(seed, 2 * k + 1);
        let ext = symmetric_projection_extended(&list).unwrap();
        prop_assert!(quadratic_preservation_check(&ext).preserving);
        let eliminated = eliminate_constraints(&ext).unwrap();
        let closed = monoimplicit_tableau(&list).unwrap();
        prop_assert_eq!(eliminated.a(), closed.a());
        prop_assert_eq!(eliminated.b(), closed.b());
        prop_assert!(is_zero_matrix(&m_matrix(closed.a(), closed.b())));
        prop_assert!(is_symplectic(&closed));
    }

    #[test]
    fn monoimplicit_structure(seed in any::<u64>(), k in 1usize..=3) {
        let list = alternating(seed, 2 * k + 1);
        let form = monoimplicit_form(&list).unwrap();
        let tab = form.to_tableau().unwrap();
        // b = a/2 and L strictly lower triangular
        for (bi, ai) in tab.b().iter().zip(list.as_slice()) {
            prop_assert_eq!(bi, &(&q(1, 2) * ai));
        }
        for (i, row) in form.l.iter().enumerate() {
            prop_assert!(row[i..].iter().all(Scalar::is_zero));
        }
        let back = monoimplicit_decompose(&tab).unwrap().to_tableau().unwrap();
        prop_assert_eq!(back.a(), tab.a());
    }

    #[test]
    fn midpoint_tableau_shape(raw in proptest::collection::vec(-9i64..=9, 0..4)) {
        let alphas = fractions(&raw);
        let s = alphas.len();
        let tab = midpoint_projection_tableau(&CompositionCoefficients::new(alphas.clone())).unwrap();
        prop_assert_eq!(tab.stages(), 2 * s + 1);
        prop_assert!(tab.is_explicit());
        let total = tab.b().iter().fold(Scalar::zero(), |acc, x| acc + x);
        prop_assert_eq!(total, Scalar::one());
        let order = classical_order(&tab, 3).unwrap().order;
        prop_assert!(order.lower_bound().unwrap() >= 1);
        // merged alternating weights: 2s+1 entries, both families sum to one
        let merged = alternating_substeps(&alphas);
        prop_assert_eq!(merged.len(), 2 * s + 1);
        CompositionCoefficients::new(merged).check_alternating().unwrap();
    }

    #[test]
    fn palindromic_fractions_give_second_order(raw in proptest::collection::vec(-9i64..=9, 1..3)) {
        let mut half: Vec<Scalar> = raw.iter().map(|&n| q(n, 13)).collect();
        let partial = half.iter().fold(Scalar::zero(), |acc, x| acc + x);
        let middle = Scalar::one() - Scalar::int(2) * &partial;
        let mut alphas = half.clone();
        alphas.push(middle);
        half.reverse();
        alphas.extend(half);
        let tab = midpoint_projection_tableau(&CompositionCoefficients::new(alphas)).unwrap();
        prop_assert!(classical_order(&tab, 4).unwrap().order.lower_bound().unwrap() >= 2);
    }
}

#[test]
fn symmetric_routes_agree_for_schemes() {
    for scheme in Scheme::ALL {
        let list = CompositionCoefficients::alternating(scheme);
        let a = symmetric_projection_tableau(&list).unwrap();
        let b = monoimplicit_tableau(&list).unwrap();
        assert_eq!((a.a(), a.b()), (b.a(), b.b()), "{scheme}");
        assert_eq!(a.stages(), 2 * composition_len(scheme) + 1);
    }
}

fn composition_len(scheme: Scheme) -> usize {
    match scheme {
        Scheme::Leapfrog2 => 1,
        Scheme::TripleJump4 => 3,
        Scheme::Suzuki4 => 5,
    }
}

#[test]
fn inconsistent_coefficients_are_rejected() {
    let bad = CompositionCoefficients::new(vec![q(1, 2), q(1, 3)]);
    assert!(matches!(midpoint_projection_tableau(&bad), Err(Error::Consistency(_))));
    let not_alternating = CompositionCoefficients::new(vec![q(1, 2), q(1, 1), q(1, 3)]);
    assert!(matches!(monoimplicit_tableau(&not_alternating), Err(Error::Consistency(_))));
}

#[test]
fn json_round_trip_analyzes_identically() {
    for scheme in [Scheme::Leapfrog2, Scheme::TripleJump4] {
        for tab in [
            midpoint_projection_tableau(&CompositionCoefficients::leapfrog_fractions(scheme)).unwrap(),
            monoimplicit_tableau(&CompositionCoefficients::alternating(scheme)).unwrap(),
        ] {
            let json = serde_json::to_string(&tab).unwrap();
            let back: ButcherTableau = serde_json::from_str(&json).unwrap();
            assert_eq!(back, tab);
            let (r1, r2) = (analyze(&tab, 6).unwrap(), analyze(&back, 6).unwrap());
            assert_eq!(serde_json::to_value(&r1).unwrap(), serde_json::to_value(&r2).unwrap());
        }
    }
}

#[test]
fn hand_written_json_is_accepted() {
    let text = r#"{"m":3,"A":[["1/8","-1/4","1/8"],["3/8","1/4","-1/8"],["1/8","3/4","1/8"]],
        "b":["1/4","1/2","1/4"],"meta":{"construction":"monoimplicit","alphas":["1/2","1","1/2"]}}"#;
    let tab: ButcherTableau = serde_json::from_str(text).unwrap();
    assert!(is_symplectic(&tab));
    assert_eq!(classical_order(&tab, 4).unwrap().order, Order::Finite(2));
    assert_eq!(tab.c(), &[q(0, 1), q(1, 2), q(1, 1)]);
}
