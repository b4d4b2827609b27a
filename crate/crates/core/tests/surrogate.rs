use epr_core::surrogate::{
    a_theta, build_model, chsh_at, chsh_value, correlation, cyclic_rank, double_deviation, double_of, expect_first,
    expect_product, gamma, projection_rank,
};
use epr_core::{CMatrix, Error, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2};

fn random_matrix(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_hermitian(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
    let a = random_matrix(rng, m);
    a.add(&a.adjoint()).scale(C64::new(0.5, 0.0))
}

/// `<Omega, (A (x) B) Omega>` with the Kronecker product formed explicitly.
fn kron_expectation(a: &CMatrix, b: &CMatrix) -> C64 {
    let m = a.rows();
    let omega: Vec<C64> = (0..m * m).map(|k| if k / m == k % m { C64::new(1.0 / (m as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) }).collect();
    let mut s = C64::new(0.0, 0.0);
    for r in 0..m * m {
        for c in 0..m * m {
            let k = a[(r / m, c / m)] * b[(r % m, c % m)];
            s += omega[r].conj() * k * omega[c];
        }
    }
    s
}

#[test]
fn coefficient_form_matches_kronecker() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in [2, 4, 6] {
        let model = build_model(m).unwrap();
        for _ in 0..10 {
            let a = random_matrix(&mut rng, m);
            let b = random_matrix(&mut rng, m);
            assert!((expect_product(&model, &a, &b) - kron_expectation(&a, &b)).norm() < 1e-12);
        }
    }
}

#[test]
fn omega_is_a_trace_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for m in [2, 4, 8, 16] {
        let model = build_model(m).unwrap();
        for _ in 0..10 {
            let a = random_matrix(&mut rng, m);
            let b = random_matrix(&mut rng, m);
            assert!((expect_first(&model, &a) - a.trace() / m as f64).norm() < 1e-12);
            let ab = expect_first(&model, &a.matmul(&b));
            let ba = expect_first(&model, &b.matmul(&a));
            assert!((ab - ba).norm() < 1e-12);
        }
        assert_eq!(projection_rank(model.projection()), m / 2);
    }
}

#[test]
fn omega_is_cyclic() {
    for m in [2, 4, 8] {
        let model = build_model(m).unwrap();
        assert_eq!(cyclic_rank(&model).unwrap(), m * m);
    }
    assert!(matches!(cyclic_rank(&build_model(18).unwrap()), Err(Error::BadModelDimension(18))));
}

#[test]
fn a_theta_is_a_symmetry() {
    let model = build_model(6).unwrap();
    for t in [0.0, 0.3, -2.0, PI] {
        let a = a_theta(&model, t);
        assert!(a.hermitian_deviation() < 1e-15);
        assert!(a.matmul(&a).max_abs_diff(&CMatrix::identity(6)) < 1e-15);
    }
}

#[test]
fn chsh_is_sqrt_two_in_every_dimension() {
    for m in (2..=64).step_by(2) {
        let model = build_model(m).unwrap();
        let r = chsh_value(&model);
        assert!((r.value - SQRT_2).abs() < 1e-12, "m = {m}: {}", r.value);
    }
    for m in [0, 1, 5, 66] {
        assert!(matches!(build_model(m), Err(Error::BadModelDimension(_))));
    }
}

#[test]
fn chsh_never_exceeds_sqrt_two_on_a_grid() {
    // correlators depend on angle differences only, so tabulate them once
    let model = build_model(4).unwrap();
    let n = (2.0 * PI / 0.05) as usize;
    let ang: Vec<f64> = (0..n).map(|i| i as f64 * 0.05).collect();
    let table: Vec<Vec<f64>> = ang.iter().map(|&s| ang.iter().map(|&t| correlation(&model, s, t)).collect()).collect();
    let mut best = f64::NEG_INFINITY;
    for a2 in 0..n {
        for b1 in 0..n {
            for b2 in 0..n {
                let v = 0.5 * (table[0][b1] + table[0][b2] + table[a2][b1] - table[a2][b2]);
                best = best.max(v);
            }
        }
    }
    assert!(best <= SQRT_2 + 1e-9);
    assert!(best > SQRT_2 - 1e-2);
    // table entries agree with the full CHSH path
    let r = chsh_at(&model, [0.0, ang[7], ang[3], ang[11]]);
    let v = 0.5 * (table[0][3] + table[0][11] + table[7][3] - table[7][11]);
    assert!((r.value - v).abs() < 1e-12);
}

#[test]
fn doubles_of_random_observables() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for m in [2, 4, 8] {
        let model = build_model(m).unwrap();
        for _ in 0..20 {
            let a = random_hermitian(&mut rng, m);
            let d = double_of(&model, &a).unwrap();
            assert!(d.deviation.abs() <= 1e-12);
            assert_eq!(d.double, gamma(&model, &a));
            let shifted = d.double.add(&CMatrix::identity(m).scale(C64::new(0.1, 0.0)));
            let dev = double_deviation(&model, &a, &shifted);
            assert!((dev - 0.01).abs() < 1e-12, "{dev}");
            // plain A on the second factor is not a double unless A is symmetric
            let skew = CMatrix::from_fn(m, m, |i, j| if i < j { C64::new(0.0, 1.0) } else if i > j { C64::new(0.0, -1.0) } else { C64::new(0.0, 0.0) });
            assert!(double_deviation(&model, &skew, &skew) >= 0.01);
        }
        let id = CMatrix::identity(m);
        let d = double_of(&model, &id).unwrap();
        assert_eq!(d.double, id);
        assert_eq!(d.deviation, 0.0);
        assert!(double_of(&model, &random_matrix(&mut rng, m)).is_err());
    }
}
