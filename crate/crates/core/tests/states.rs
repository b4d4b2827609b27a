mod common;

use common::*;
use epr_core::states::{
    class_phase, derived_value, eval_point, eval_poly, kernel_form, kernel_matrix, positivity_check, psd_check,
    rank_one_class_check, support_relation, uniqueness_support_check,
};
use epr_core::weyl::int;
use epr_core::{PhasePoint, StateFunctional};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = (f64, f64)> {
    (-5.0f64..5.0, -5.0f64..5.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_matches_definition(pts in clustered_points(12, 3), (lambda, mu) in params()) {
        let st = StateFunctional::epr(lambda, mu);
        let m = kernel_matrix(&st, &pts).unwrap();
        for (j, x) in pts.iter().enumerate() {
            for (k, y) in pts.iter().enumerate() {
                let want = kernel(Oracle::Epr(lambda, mu), x, y);
                prop_assert!((m.matrix()[(j, k)] - want).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn epr_kernel_is_psd(pts in clustered_points(64, 5), (lambda, mu) in params()) {
        let st = StateFunctional::epr(lambda, mu);
        let m = kernel_matrix(&st, &pts).unwrap();
        let r = psd_check(m.matrix(), 1e-10).unwrap();
        prop_assert!(r.pass, "min eigenvalue {}", r.min_eigenvalue);
    }

    #[test]
    fn regular_kernel_is_psd(pts in proptest::collection::vec(point(4), 1..24)) {
        let pts = dedup(pts);
        let st = StateFunctional::regular();
        let m = kernel_matrix(&st, &pts).unwrap();
        for (j, x) in pts.iter().enumerate() {
            for (k, y) in pts.iter().enumerate() {
                prop_assert!((m.matrix()[(j, k)] - kernel(Oracle::Regular, x, y)).norm() <= 1e-12);
            }
        }
        prop_assert!(psd_check(m.matrix(), 1e-10).unwrap().pass);
    }

    #[test]
    fn support_classes_are_rank_one(pts in clustered_points(40, 4), (lambda, mu) in params()) {
        let st = StateFunctional::epr(lambda, mu);
        let m = kernel_matrix(&st, &pts).unwrap();
        let part = support_relation(&pts, &st).unwrap();
        // classes are exactly the shared keys
        let mut keys = std::collections::BTreeSet::new();
        for p in &pts {
            let v = p.coords();
            keys.insert((&v[0] + &v[2], &v[1] - &v[3]));
        }
        prop_assert_eq!(part.len(), keys.len());
        let rep = rank_one_class_check(m.matrix(), &part, 1e-12);
        prop_assert!(rep.pass, "{:?}", rep);
        // factorization through the class phase
        for class in part.classes() {
            for &j in class {
                for &k in class {
                    let aj = class_phase(&st, &pts[j]).unwrap();
                    let ak = class_phase(&st, &pts[k]).unwrap();
                    prop_assert!((m.matrix()[(j, k)] - aj * ak.conj()).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn gram_form_matches_positivity(p in poly(4, 8), (lambda, mu) in params()) {
        for (st, o) in [
            (StateFunctional::epr(lambda, mu), Oracle::Epr(lambda, mu)),
            (StateFunctional::regular(), Oracle::Regular),
        ] {
            let pos = positivity_check(&st, &p).unwrap();
            let form = kernel_form(&st, &p).unwrap();
            let oracle = gram_form(o, &p);
            prop_assert!(pos.pass);
            prop_assert!((form.re - pos.value).abs() <= 1e-9 && (form.im - pos.imaginary).abs() <= 1e-9);
            prop_assert!((oracle.re - pos.value).abs() <= 1e-9);
        }
    }

    #[test]
    fn clustered_polynomials_stay_positive(pts in clustered_points(16, 2), cs in proptest::collection::vec(coef(), 16), (lambda, mu) in params()) {
        // cancellations only happen inside a class, so cluster the support
        let p = epr_core::WeylPolynomial::from_terms(4, pts.into_iter().zip(cs)).unwrap();
        let st = StateFunctional::epr(lambda, mu);
        let pos = positivity_check(&st, &p).unwrap();
        prop_assert!(pos.pass, "{:?}", pos);
        prop_assert!((gram_form(Oracle::Epr(lambda, mu), &p).re - pos.value).abs() <= 1e-9);
    }

    #[test]
    fn trichotomy(x in point(4), (lambda, mu) in params()) {
        let st = StateFunctional::epr(lambda, mu);
        let r = uniqueness_support_check(&st, &x).unwrap();
        prop_assert!(r.pass);
        prop_assert_eq!(r.value, eval_point(&st, &x).unwrap());
        prop_assert!((r.value - g(Oracle::Epr(lambda, mu), &x)).norm() <= 1e-12);
    }

    #[test]
    fn derivation_reproduces_values(a in rational(), b in rational(), off in prop::bool::ANY, c in rational(), (lambda, mu) in params()) {
        let st = StateFunctional::epr(lambda, mu);
        let x = if off {
            PhasePoint::new(vec![a.clone(), b.clone(), c, b]).unwrap()
        } else {
            PhasePoint::new(vec![a.clone(), b.clone(), -a, b]).unwrap()
        };
        let d = derived_value(&st, &x).unwrap();
        prop_assert!((d - eval_point(&st, &x).unwrap()).norm() <= 1e-12);
    }
}

#[test]
fn two_point_kernel() {
    let st = StateFunctional::epr(0.0, 0.0);
    let pts = vec![PhasePoint::from_ints(&[0, 0, 0, 0]).unwrap(), PhasePoint::from_ints(&[1, 0, -1, 0]).unwrap()];
    let m = kernel_matrix(&st, &pts).unwrap();
    let r = psd_check(m.matrix(), 1e-10).unwrap();
    assert!(r.pass);
    assert!(r.min_eigenvalue.abs() <= 1e-12);
}

#[test]
fn corrupted_kernel_fails() {
    let st = StateFunctional::regular().with_corrupted_kernel();
    let pts: Vec<_> = (0..6).map(|i| PhasePoint::from_ints(&[i, 0, 0, 0]).unwrap()).collect();
    let m = kernel_matrix(&st, &pts).unwrap();
    assert!(!psd_check(m.matrix(), 1e-10).unwrap().pass);
}

#[test]
fn correlator_values() {
    let st = StateFunctional::epr(1.0, 0.0);
    let p = epr_core::states::position_correlator(&int(1));
    let v = eval_poly(&st, &p).unwrap();
    assert!((v - cis(1.0)).norm() <= 1e-15);
}
