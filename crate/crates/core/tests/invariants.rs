//! Property tests for the order, the slices, the exponent bookkeeping,
//! and the norm axioms.

use proptest::prelude::*;

use odot_core::matrix::GradedMatrix;
use odot_core::multiindex::{binomial_u128, compare, enumerate_slice, MultiIndex};
use odot_core::norm::{rho_norm, RhoExponent};
use odot_core::scalar::Scalar;

fn rho_strategy() -> impl Strategy<Value = RhoExponent> {
    prop_oneof![
        Just(RhoExponent::one()),
        Just(RhoExponent::two()),
        Just(RhoExponent::infinity()),
        (1.0f64..8.0).prop_map(|v| RhoExponent::new(v).unwrap()),
    ]
}

proptest! {
    #[test]
    fn order_is_translation_invariant(
        len in 1usize..=4,
        seed_a in proptest::collection::vec(0u32..=6, 4),
        seed_b in proptest::collection::vec(0u32..=6, 4),
        seed_c in proptest::collection::vec(0u32..=6, 4),
    ) {
        let a = MultiIndex::new(seed_a[..len].to_vec()).unwrap();
        let b = MultiIndex::new(seed_b[..len].to_vec()).unwrap();
        let c = MultiIndex::new(seed_c[..len].to_vec()).unwrap();
        let before = compare(&a, &b).unwrap();
        let after = compare(&a.checked_add(&c).unwrap(), &b.checked_add(&c).unwrap()).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn slices_are_sorted_and_counted(vars in 1usize..=4, degree in 0usize..=8) {
        let slice = enumerate_slice(vars, degree).unwrap();
        let expected = binomial_u128((degree + vars - 1) as u64, (vars - 1) as u64).unwrap();
        prop_assert_eq!(slice.len() as u128, expected);
        for window in slice.windows(2) {
            prop_assert_eq!(
                compare(&window[0], &window[1]).unwrap(),
                std::cmp::Ordering::Less
            );
        }
        for alpha in &slice {
            prop_assert_eq!(alpha.degree(), degree);
        }
    }

    #[test]
    fn conjugation_is_an_exact_involution(value in 1.0f64..50.0) {
        let rho = RhoExponent::new(value).unwrap();
        prop_assert_eq!(rho.conjugate().conjugate(), rho);
        if value > 1.0 {
            let one = 1.0 / rho.value() + 1.0 / rho.conjugate_value();
            prop_assert!((one - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn norms_satisfy_the_axioms(
        rho in rho_strategy(),
        data in proptest::collection::vec(-1.0f64..1.0, 36),
        lambda in -3.0f64..3.0,
        row_degree in 0usize..=3,
        col_degree in 0usize..=3,
    ) {
        let a = {
            let rows = enumerate_slice(2, row_degree).unwrap().len();
            let cols = enumerate_slice(2, col_degree).unwrap().len();
            GradedMatrix::from_real(2, 2, row_degree, col_degree, &data[..rows * cols]).unwrap()
        };
        let b = GradedMatrix::from_real(
            2, 2, row_degree, col_degree,
            &data[..a.rows() * a.cols()].iter().map(|x| 1.0 - x).collect::<Vec<_>>(),
        ).unwrap();

        let norm_a = rho_norm(&a, rho);
        prop_assert!(norm_a >= 0.0);
        prop_assert_eq!(norm_a == 0.0, a.is_zero());

        let scaled = rho_norm(&a.scale(Scalar::Real(lambda)).unwrap(), rho);
        let expected = lambda.abs() * norm_a;
        prop_assert!((scaled - expected).abs() <= 1e-9 * expected.max(1e-12));

        let triangle = rho_norm(&a.add(&b).unwrap(), rho);
        let bound = norm_a + rho_norm(&b, rho);
        prop_assert!(triangle <= bound * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn odot_norm_is_submultiplicative(
        rho in rho_strategy(),
        data in proptest::collection::vec(-1.0f64..1.0, 24),
        p in 0usize..=2,
        q in 0usize..=2,
    ) {
        let rows_a = enumerate_slice(2, p).unwrap().len();
        let rows_b = enumerate_slice(2, q).unwrap().len();
        let a = GradedMatrix::from_real(2, 2, p, 1, &data[..rows_a * 2]).unwrap();
        let b = GradedMatrix::from_real(2, 2, q, 1, &data[rows_a * 2..rows_a * 2 + rows_b * 2]).unwrap();
        let lhs = rho_norm(&a.odot(&b).unwrap(), rho);
        let rhs = rho_norm(&a, rho) * rho_norm(&b, rho);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
    }
}
