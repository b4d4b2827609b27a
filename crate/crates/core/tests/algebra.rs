mod common;

use common::*;
use epr_core::states::eval_poly;
use epr_core::{PhasePoint, StateFunctional, WeylPolynomial, C64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_is_associative(p in poly(4, 4), q in poly(4, 4), r in poly(4, 4)) {
        let left = p.multiply(&q).unwrap().multiply(&r).unwrap();
        let right = p.multiply(&q.multiply(&r).unwrap()).unwrap();
        prop_assert!(max_coef_diff(&left, &right) <= 1e-10);
    }

    #[test]
    fn adjoint_reverses_products(p in poly(4, 5), q in poly(4, 5)) {
        let left = p.multiply(&q).unwrap().adjoint();
        let right = q.adjoint().multiply(&p.adjoint()).unwrap();
        prop_assert!(max_coef_diff(&left, &right) <= 1e-10);
        prop_assert!(max_coef_diff(&p.adjoint().adjoint(), &p) == 0.0);
    }

    #[test]
    fn product_coefficients_match_weyl_phase(x in point(4), y in point(4)) {
        let wx = WeylPolynomial::monomial(x.clone(), C64::new(1.0, 0.0)).unwrap();
        let wy = WeylPolynomial::monomial(y.clone(), C64::new(1.0, 0.0)).unwrap();
        let prod = wx.multiply(&wy).unwrap();
        let sum = x.checked_add(&y).unwrap();
        prop_assert_eq!(prod.len(), 1);
        let want = cis(sigma(&f(&x), &f(&y)));
        prop_assert!((prod.coefficient(&sum) - want).norm() <= 1e-12);
    }

    #[test]
    fn monomials_are_unitary(x in point(4)) {
        let w = WeylPolynomial::monomial(x, C64::new(1.0, 0.0)).unwrap();
        let id = WeylPolynomial::identity(4).unwrap();
        prop_assert!(max_coef_diff(&w.multiply(&w.adjoint()).unwrap(), &id) <= 1e-15);
        prop_assert!(max_coef_diff(&w.adjoint().multiply(&w).unwrap(), &id) <= 1e-15);
    }

    #[test]
    fn functional_is_hermitian(p in poly(4, 6), lambda in -4.0f64..4.0, mu in -4.0f64..4.0) {
        for st in [StateFunctional::epr(lambda, mu), StateFunctional::regular()] {
            let a = eval_poly(&st, &p.adjoint()).unwrap();
            let b = eval_poly(&st, &p).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn tensor_slots_commute(x in point(2), y in point(2)) {
        let a = WeylPolynomial::monomial(x, C64::new(1.0, 0.0)).unwrap().tensor_embed(1).unwrap();
        let b = WeylPolynomial::monomial(y, C64::new(1.0, 0.0)).unwrap().tensor_embed(2).unwrap();
        prop_assert!(max_coef_diff(&a.multiply(&b).unwrap(), &b.multiply(&a).unwrap()) == 0.0);
    }
}

#[test]
fn term_cap_is_enforced_on_products() {
    let pts: Vec<_> = (0..70).map(|i| (PhasePoint::from_ints(&[i, 0, 0, 0]).unwrap(), C64::new(1.0, 0.0))).collect();
    let p = WeylPolynomial::from_terms(4, pts).unwrap();
    let q = WeylPolynomial::from_terms(4, (0..70).map(|i| (PhasePoint::from_ints(&[0, i * 100, 0, 0]).unwrap(), C64::new(1.0, 0.0)))).unwrap();
    // 70 x 70 distinct sums exceed 4096
    assert!(matches!(p.multiply(&q), Err(epr_core::Error::TermCap { .. })));
    assert!(p.multiply_capped(&q, 5000).is_ok());
}
