//! Individual verification checks. Each returns one [`CheckRecord`].

use std::f64::consts::SQRT_2;

use epr_core::bell::{
    bell_value, double_deviation as weyl_double_deviation, monomial_family, monomial_family_value, weyl_double,
    BellCandidate, SearchConfig, SearchProblem, SearchResult, BELL_BOUND, BOUND_TOL, MONOMIAL_FAMILY_MAX,
};
use epr_core::gns::{build_frame, collinearity_check, trace_vector_check};
use epr_core::states::{
    derived_value, kernel_form, kernel_matrix, multiplicativity_check, positivity_check, psd_check,
    rank_one_class_check, support_from_matrix, traciality_check, uniqueness_support_check,
};
use epr_core::surrogate::{
    build_model, chsh_value, correlation_table, cyclic_rank, double_deviation, double_of, projection_rank,
    MAX_RANK_DIM,
};
use epr_core::{CMatrix, PhasePoint, Rational, StateFunctional, WeylPolynomial, C64};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::formats::{points_to_records, polynomial_to_records, StateSpec};
use crate::gen;
use crate::report::{complex, num, run_check, CheckRecord};

/// Largest point set accepted by [`kernel_psd`].
pub const MAX_KERNEL_POINTS: usize = 256;
/// Tolerance for unit modulus and the cocycle identity inside a class.
pub const CLASS_TOL: f64 = 1e-12;
pub const PHASE_TOL: f64 = 1e-12;
pub const PAIR_TOL: f64 = 1e-10;
pub const GRAM_FORM_TOL: f64 = 1e-9;
pub const FAMILY_TOL: f64 = 1e-6;
pub const CLOSED_FORM_TOL: f64 = 1e-10;
pub const CHSH_TOL: f64 = 1e-12;
pub const DOUBLE_TOL: f64 = 1e-12;
/// Negative controls must be at least this far from a perfect double.
pub const CONTROL_MIN: f64 = 0.01;
/// Angle spacing of the correlation grid.
pub const GRID_STEP: f64 = 1e-2;

fn unit(x: PhasePoint) -> WeylPolynomial {
    WeylPolynomial::monomial(x, C64::new(1.0, 0.0)).unwrap()
}

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(m.as_slice().iter().map(|z| complex(*z)).collect())
}

fn candidate_json(c: &BellCandidate) -> Value {
    json!({
        "a1": polynomial_to_records(&c.a1),
        "a2": polynomial_to_records(&c.a2),
        "b1": polynomial_to_records(&c.b1),
        "b2": polynomial_to_records(&c.b2),
    })
}

fn rationals(v: &[&Rational]) -> Vec<String> {
    v.iter().map(|r| epr_core::weyl::format_rational(r)).collect()
}

/// Kernel matrix, its smallest eigenvalue, the support relation and, for the
/// EPR state, the rank-one structure of each class.
pub fn kernel_psd(name: &str, spec: &StateSpec, st: &StateFunctional, points: &[PhasePoint], tol: f64) -> Result<CheckRecord> {
    if points.len() > MAX_KERNEL_POINTS {
        return Err(CliError::Format(format!(
            "at most {MAX_KERNEL_POINTS} points are accepted, got {}",
            points.len()
        )));
    }
    let m = kernel_matrix(st, points)?;
    let inputs = json!({ "state": spec, "points": points_to_records(points), "tol": tol });
    run_check(name, "the kernel F(x, y) = G(x - y) exp(-i s(x, y)) is positive semidefinite", tol, &inputs, |meas| {
        meas.set("points", points.len());
        let psd = psd_check(m.matrix(), tol)?;
        meas.real("min_eigenvalue", psd.min_eigenvalue);
        let mut pass = psd.pass;
        match support_from_matrix(m.matrix()) {
            Ok(part) => {
                meas.set("classes", part.len());
                if st.is_epr() {
                    let r = rank_one_class_check(m.matrix(), &part, CLASS_TOL);
                    meas.real("class_modulus_deviation", r.modulus_deviation);
                    meas.real("class_cocycle_deviation", r.cocycle_deviation);
                    meas.real("cross_class_max", r.cross_class);
                    meas.real("class_tolerance", CLASS_TOL);
                    pass &= r.pass;
                }
            }
            Err(e) => {
                meas.set("support_error", e.to_string());
                pass = false;
            }
        }
        Ok(pass)
    })
}

/// `batteries` random clustered point sets of `n` points each.
pub fn kernel_battery(spec: &StateSpec, st: &StateFunctional, seed: u64, batteries: usize, n: usize, tol: f64) -> Result<CheckRecord> {
    let mut rng = gen::rng(seed, 1);
    let sets: Vec<Vec<PhasePoint>> = (0..batteries).map(|_| gen::clustered_points(&mut rng, n, 6)).collect();
    let inputs = json!({ "state": spec, "seed": seed, "batteries": batteries, "points": n, "tol": tol });
    run_check("kernel_psd_battery", "the kernel F(x, y) = G(x - y) exp(-i s(x, y)) is positive semidefinite", tol, &inputs, |meas| {
        let mut worst = f64::INFINITY;
        let mut cocycle = 0.0f64;
        let mut pass = true;
        for pts in &sets {
            let rec = kernel_psd("kernel_psd", spec, st, pts, tol)?;
            pass &= rec.pass;
            if let Some(v) = rec.measured.get("min_eigenvalue").and_then(Value::as_f64) {
                worst = worst.min(v);
            }
            if let Some(v) = rec.measured.get("class_cocycle_deviation").and_then(Value::as_f64) {
                cocycle = cocycle.max(v);
            }
        }
        meas.set("batteries", batteries);
        meas.set("points_per_battery", n);
        meas.real("min_eigenvalue", worst);
        meas.real("max_cocycle_deviation", cocycle);
        Ok(pass)
    })
}

/// Zero off `{c = -a, d = b}`, the prescribed phase on it, and agreement
/// with the value derived from the commutation relations.
pub fn uniqueness_battery(spec: &StateSpec, st: &StateFunctional, seed: u64, n: usize) -> Result<CheckRecord> {
    let mut rng = gen::rng(seed, 2);
    let pts: Vec<PhasePoint> = (0..n)
        .map(|i| if i % 2 == 0 { gen::manifold_point(&mut rng) } else { gen::point(&mut rng, 4) })
        .collect();
    let inputs = json!({ "state": spec, "points": points_to_records(&pts) });
    run_check("uniqueness_support", "omega(W(x)) is 0 off {c = -a, d = b} and exp(i(a lambda + b mu)) on it", PHASE_TOL, &inputs, |meas| {
        let (mut on, mut on_dev, mut off_nonzero, mut derived_dev, mut pass) = (0usize, 0.0f64, 0usize, 0.0f64, true);
        for x in &pts {
            let r = uniqueness_support_check(st, x)?;
            pass &= r.pass;
            if r.on_manifold {
                on += 1;
                on_dev = on_dev.max((r.value - r.expected).norm());
            } else if r.value != C64::new(0.0, 0.0) {
                off_nonzero += 1;
            }
            derived_dev = derived_dev.max((derived_value(st, x)? - r.value).norm());
        }
        meas.set("monomials", n);
        meas.set("on_manifold", on);
        meas.real("max_on_manifold_deviation", on_dev);
        meas.set("off_manifold_nonzero", off_nonzero);
        meas.real("max_derived_deviation", derived_dev);
        Ok(pass && on_dev <= PHASE_TOL && off_nonzero == 0 && derived_dev <= PHASE_TOL)
    })
}

pub fn multiplicativity_battery(spec: &StateSpec, st: &StateFunctional, seed: u64, n: usize) -> Result<CheckRecord> {
    let mut rng = gen::rng(seed, 3);
    let cases: Vec<(Rational, Rational, Vec<WeylPolynomial>)> = (0..n)
        .map(|_| {
            let (s, t) = (gen::rational(&mut rng), gen::rational(&mut rng));
            let samples = vec![unit(gen::manifold_point(&mut rng)), unit(gen::point(&mut rng, 4)), gen::polynomial(&mut rng, 3)];
            (s, t, samples)
        })
        .collect();
    let inputs: Vec<Value> = cases
        .iter()
        .map(|(s, t, xs)| json!({ "s": rationals(&[s]), "t": rationals(&[t]), "samples": xs.iter().map(polynomial_to_records).collect::<Vec<_>>() }))
        .collect();
    let inputs = json!({ "state": spec, "cases": inputs });
    run_check("multiplicativity", "omega is multiplicative on the correlator algebra", PAIR_TOL, &inputs, |meas| {
        let mut dev = 0.0f64;
        for (s, t, xs) in &cases {
            dev = dev.max(multiplicativity_check(st, s, t, xs)?.max_deviation);
        }
        meas.set("pairs", n);
        meas.real("max_deviation", dev);
        Ok(dev <= PAIR_TOL)
    })
}

pub fn traciality_battery(spec: &StateSpec, st: &StateFunctional, seed: u64, n: usize) -> Result<CheckRecord> {
    let mut rng = gen::rng(seed, 4);
    let pairs: Vec<(PhasePoint, PhasePoint)> = (0..n)
        .map(|i| {
            let a = gen::point(&mut rng, 2);
            let b = if i % 4 == 0 { -&a } else { gen::point(&mut rng, 2) };
            (a, b)
        })
        .collect();
    let polys: Vec<(WeylPolynomial, WeylPolynomial)> = (0..n / 4)
        .map(|_| {
            let two = |rng: &mut rand_chacha::ChaCha8Rng| {
                let pts = vec![gen::point(rng, 2), gen::point(rng, 2)];
                gen::polynomial_on(rng, pts)
            };
            (two(&mut rng), two(&mut rng))
        })
        .collect();
    let inputs = json!({
        "state": spec,
        "pairs": pairs.iter().map(|(a, b)| [a.to_strings(), b.to_strings()]).collect::<Vec<_>>(),
        "polynomials": polys.iter().map(|(p, q)| [polynomial_to_records(p), polynomial_to_records(q)]).collect::<Vec<_>>(),
    });
    run_check("traciality", "Omega is a trace vector for each tensor factor", PAIR_TOL, &inputs, |meas| {
        let (mut dev, mut pass) = (0.0f64, true);
        for (a, b) in &pairs {
            for slot in [1, 2] {
                let r = traciality_check(st, a, b, slot)?;
                pass &= r.pass;
                dev = dev.max((r.forward - r.backward).norm());
            }
        }
        for (p, q) in &polys {
            for slot in [1, 2] {
                let r = trace_vector_check(st, p, q, slot)?;
                pass &= r.pass;
                dev = dev.max((r.forward - r.backward).norm());
            }
        }
        meas.set("pairs", pairs.len());
        meas.set("polynomial_pairs", polys.len());
        meas.real("max_deviation", dev);
        Ok(pass && dev <= PAIR_TOL)
    })
}

pub fn collinearity_battery(spec: &StateSpec, st: &StateFunctional, seed: u64, n: usize) -> Result<CheckRecord> {
    let mut rng = gen::rng(seed, 5);
    let quads: Vec<[Rational; 4]> = (0..n).map(|_| std::array::from_fn(|_| gen::rational(&mut rng))).collect();
    let inputs = json!({ "state": spec, "quadruples": quads.iter().map(|q| rationals(&[&q[0], &q[1], &q[2], &q[3]])).collect::<Vec<_>>() });
    run_check("collinearity", "|<psi, phi>| = 1 with phase exp(it) exp(ic lambda) exp(-id mu), t = (ad + bc)/2", PHASE_TOL, &inputs, |meas| {
        let (mut modulus, mut phase, mut pass) = (0.0f64, 0.0f64, true);
        for [a, b, c, d] in &quads {
            let r = collinearity_check(st, a, b, c, d)?;
            pass &= r.pass;
            modulus = modulus.max((r.modulus - 1.0).abs());
            phase = phase.max(r.phase_deviation);
        }
        meas.set("quadruples", n);
        meas.real("max_modulus_deviation", modulus);
        meas.real("max_phase_deviation", phase);
        Ok(pass && modulus <= PHASE_TOL && phase <= PHASE_TOL)
    })
}

/// Monomial vectors of a single tensor factor form an orthonormal family.
pub fn gram_orthonormality(spec: &StateSpec, st: &StateFunctional, seed: u64, n: usize) -> Result<CheckRecord> {
    let mut rng = gen::rng(seed, 6);
    let zero = epr_core::weyl::int(0);
    let mut pts: Vec<PhasePoint> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    while pts.len() < n {
        let (a, b) = (gen::rational(&mut rng), gen::rational(&mut rng));
        let v = if pts.len() % 2 == 0 {
            vec![a, b, zero.clone(), zero.clone()]
        } else {
            vec![zero.clone(), zero.clone(), a, b]
        };
        let p = PhasePoint::new(v).unwrap();
        if seen.insert(p.clone()) {
            pts.push(p);
        }
    }
    let first: Vec<PhasePoint> = pts.iter().step_by(2).cloned().collect();
    let second: Vec<PhasePoint> = pts.iter().skip(1).step_by(2).cloned().collect();
    let inputs = json!({ "state": spec, "first": points_to_records(&first), "second": points_to_records(&second) });
    run_check("gram_orthonormality", "single-factor monomial vectors W(x) Omega are orthonormal", PHASE_TOL, &inputs, |meas| {
        let mut dev = 0.0f64;
        let mut grams = Vec::new();
        for set in [&first, &second] {
            let frame = build_frame(st, set)?;
            let g = frame.gram().matrix();
            dev = dev.max(g.max_abs_diff(&CMatrix::identity(set.len())));
            grams.push(matrix_json(g));
        }
        meas.set("frame_size", first.len());
        meas.real("max_deviation_from_identity", dev);
        meas.set("gram_first_factor", grams.remove(0));
        Ok(dev <= PHASE_TOL)
    })
}

/// `omega(P^* P)` against the kernel form `zeta^* M zeta`.
pub fn gram_form_battery(spec: &StateSpec, st: &StateFunctional, seed: u64, n: usize) -> Result<CheckRecord> {
    let mut rng = gen::rng(seed, 7);
    let polys: Vec<WeylPolynomial> = (0..n).map(|_| gen::polynomial(&mut rng, 8)).collect();
    let inputs = json!({ "state": spec, "polynomials": polys.iter().map(polynomial_to_records).collect::<Vec<_>>() });
    run_check("gram_form", "omega(P* P) equals the kernel quadratic form and is non-negative", GRAM_FORM_TOL, &inputs, |meas| {
        let (mut dev, mut min, mut pass) = (0.0f64, f64::INFINITY, true);
        for p in &polys {
            let pos = positivity_check(st, p)?;
            let form = kernel_form(st, p)?;
            pass &= pos.pass;
            min = min.min(pos.value);
            dev = dev.max((form - C64::new(pos.value, pos.imaginary)).norm());
        }
        meas.set("polynomials", n);
        meas.real("max_deviation", dev);
        meas.real("min_value", min);
        Ok(pass && dev <= GRAM_FORM_TOL)
    })
}

/// Restarts run on the rayon pool; the merge does not depend on scheduling.
pub fn run_search(st: &StateFunctional, cfg: &SearchConfig) -> Result<SearchResult> {
    let problem = SearchProblem::new(st, cfg)?;
    let outcomes = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| problem.run_restart(i))
        .collect::<epr_core::Result<Vec<_>>>()?;
    Ok(problem.finish(outcomes)?)
}

pub fn search_record(name: &str, spec: &StateSpec, cfg_json: &Value, r: &SearchResult) -> Result<CheckRecord> {
    let inputs = json!({ "state": spec, "config": cfg_json });
    run_check(name, "omega(R) over certified contractions is a lower bound for the Bell value, at most sqrt 2", BOUND_TOL, &inputs, |meas| {
        meas.real("value", r.value);
        meas.real("max_seen", r.max_seen);
        meas.real("bound", BELL_BOUND);
        meas.set("restart", r.restart);
        meas.set("terms", r.best.term_count());
        meas.set("candidate", candidate_json(&r.best));
        meas.set("trace", Value::Array(r.trace.iter().map(|&(i, v)| json!([i, num(v)])).collect()));
        Ok(r.best.validate().is_ok() && r.value <= BELL_BOUND + BOUND_TOL && r.max_seen <= BELL_BOUND + BOUND_TOL)
    })
}

/// Optimizer on the monomial family against the closed form.
pub fn bell_family(spec: &StateSpec, st: &StateFunctional, seed: u64) -> Result<CheckRecord> {
    let mut rng = gen::rng(seed, 8);
    let (a, b) = (gen::nonzero_rational(&mut rng), gen::rational(&mut rng));
    let mut cfg = SearchConfig::monomial_family(&a, &b);
    cfg.seed = seed;
    let angles: Vec<[f64; 4]> = (0..100).map(|_| std::array::from_fn(|_| rng.gen_range(-4.0..4.0))).collect();
    let inputs = json!({ "state": spec, "a": rationals(&[&a]), "b": rationals(&[&b]), "seed": seed, "angles": angles });
    let result = run_search(st, &cfg)?;
    run_check("bell_monomial_family", "the monomial family reaches sqrt 2 / 2 and no candidate exceeds sqrt 2", FAMILY_TOL, &inputs, |meas| {
        let mut closed = 0.0f64;
        for ang in &angles {
            let c = monomial_family(&a, &b, *ang)?;
            closed = closed.max((bell_value(st, &c)? - monomial_family_value(&a, &b, *ang, st)?).abs());
        }
        let gap = (result.value - MONOMIAL_FAMILY_MAX).abs();
        meas.real("value", result.value);
        meas.real("analytic_max", MONOMIAL_FAMILY_MAX);
        meas.real("gap", gap);
        meas.real("max_seen", result.max_seen);
        meas.real("closed_form_max_deviation", closed);
        meas.set("candidate", candidate_json(&result.best));
        let identity = bell_value(st, &BellCandidate::identity())?;
        meas.real("identity_value", identity);
        Ok(gap <= FAMILY_TOL
            && result.max_seen <= BELL_BOUND + BOUND_TOL
            && closed <= CLOSED_FORM_TOL
            && (identity - 1.0).abs() <= 1e-12)
    })
}

fn grid_angles() -> Vec<f64> {
    let n = (2.0 * std::f64::consts::PI / GRID_STEP).ceil() as usize;
    (0..n).map(|i| i as f64 * GRID_STEP).collect()
}

pub fn surrogate_model(m: usize) -> Result<CheckRecord> {
    let model = build_model(m)?;
    run_check("surrogate_model", "Omega is a cyclic trace vector and P ~ I - P via V", 0.0, &json!({ "dim": m }), |meas| {
        let rank = projection_rank(model.projection());
        meas.set("dim", m);
        meas.set("projection_rank", rank);
        let mut pass = rank * 2 == m;
        if m <= MAX_RANK_DIM {
            let c = cyclic_rank(&model)?;
            meas.set("cyclic_rank", c);
            pass &= c == m * m;
        }
        Ok(pass)
    })
}

pub fn correlation_grid(m: usize) -> Result<CheckRecord> {
    let model = build_model(m)?;
    let angles = grid_angles();
    run_check("surrogate_correlation", "<Omega, A(t1) A(t2) Omega> = cos(t1 - t2)", CHSH_TOL, &json!({ "dim": m, "step": GRID_STEP }), |meas| {
        let table = correlation_table(&model, &angles);
        let mut dev = 0.0f64;
        for (i, row) in table.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                dev = dev.max((v - (angles[i] - angles[j]).cos()).abs());
            }
        }
        meas.set("grid_points", angles.len() * angles.len());
        meas.real("max_deviation", dev);
        Ok(dev < CHSH_TOL)
    })
}

pub fn surrogate_chsh(dims: &[usize]) -> Result<CheckRecord> {
    let models = dims.iter().map(|&m| build_model(m)).collect::<epr_core::Result<Vec<_>>>()?;
    run_check("surrogate_chsh", "CHSH value 2 cos(pi/4) = sqrt 2 in the matrix model", CHSH_TOL, &json!({ "dims": dims }), |meas| {
        let mut dev = 0.0f64;
        let mut values = Vec::new();
        for model in &models {
            let r = chsh_value(model);
            dev = dev.max((r.value - SQRT_2).abs());
            values.push(num(r.value));
            if model.dim() == dims[0] {
                meas.set("angles", r.angles.iter().map(|&a| num(a)).collect::<Vec<_>>());
                meas.set("correlators", r.correlators.iter().map(|&a| num(a)).collect::<Vec<_>>());
                meas.real("value", r.value);
            }
        }
        meas.set("dims", dims.to_vec());
        meas.set("values", values);
        meas.real("max_deviation", dev);
        Ok(dev < CHSH_TOL)
    })
}

/// Random self-adjoint matrices have the double `gamma(A)`. Shifting the
/// double by `e I` costs exactly `e^2`: the `0.1 I` shift must give `0.01`
/// to within the double tolerance, and the `0.2 I` shift, which sits clear of
/// the threshold, must give at least [`CONTROL_MIN`].
pub fn surrogate_doubles(dims: &[usize], seed: u64, samples: usize) -> Result<CheckRecord> {
    let mut rng = gen::rng(seed, 9);
    let mats: Vec<(usize, Vec<CMatrix>)> = dims.iter().map(|&m| (m, (0..samples).map(|_| gen::hermitian(&mut rng, m)).collect())).collect();
    let inputs = json!({ "dims": dims, "seed": seed, "samples": samples });
    run_check("surrogate_doubles", "every self-adjoint A has the double gamma(A) with <(A - A')^2> = 0", DOUBLE_TOL, &inputs, |meas| {
        let (mut dev, mut shift_dev, mut control) = (0.0f64, 0.0f64, f64::INFINITY);
        for (m, list) in &mats {
            let model = build_model(*m)?;
            let shift = CMatrix::identity(*m).scale(C64::new(0.1, 0.0));
            let wide = CMatrix::identity(*m).scale(C64::new(0.2, 0.0));
            for a in list {
                let d = double_of(&model, a)?;
                dev = dev.max(d.deviation.abs());
                let shifted = double_deviation(&model, a, &d.double.add(&shift));
                shift_dev = shift_dev.max((shifted - 0.01).abs());
                control = control.min(double_deviation(&model, a, &d.double.add(&wide)));
            }
        }
        meas.real("max_deviation", dev);
        meas.real("max_shift_control_error", shift_dev);
        meas.real("min_control_deviation", control);
        meas.real("control_threshold", CONTROL_MIN);
        Ok(dev <= DOUBLE_TOL && shift_dev <= DOUBLE_TOL && control >= CONTROL_MIN)
    })
}

/// `U = W(a,b) (x) I` and `U' = exp(i(a lambda + b mu)) I (x) W(a,-b)`.
pub fn weyl_doubles(spec: &StateSpec, st: &StateFunctional, seed: u64, n: usize) -> Result<CheckRecord> {
    let mut rng = gen::rng(seed, 10);
    let pairs: Vec<(Rational, Rational)> = (0..n).map(|_| (gen::rational(&mut rng), gen::nonzero_rational(&mut rng))).collect();
    let inputs = json!({ "state": spec, "pairs": pairs.iter().map(|(a, b)| rationals(&[a, b])).collect::<Vec<_>>() });
    run_check("weyl_doubles", "omega((U - U')* (U - U')) = 0 for U' = exp(i(a lambda + b mu)) I (x) W(a, -b)", DOUBLE_TOL, &inputs, |meas| {
        let zero = epr_core::weyl::int(0);
        let (mut dev, mut sa, mut control) = (0.0f64, 0.0f64, f64::INFINITY);
        for (a, b) in &pairs {
            let d = weyl_double(a, b, st)?;
            dev = dev.max(d.deviation.abs()).max(d.deviation_formula.abs());
            sa = sa.max(d.self_adjoint_deviation.abs());
            let u = unit(PhasePoint::new(vec![a.clone(), b.clone(), zero.clone(), zero.clone()])?);
            // partner point (a, b) instead of (a, -b)
            let wrong = unit(PhasePoint::new(vec![zero.clone(), zero.clone(), a.clone(), b.clone()])?).scale(d.phase);
            control = control.min(weyl_double_deviation(st, &u, &wrong)?);
        }
        meas.set("pairs", n);
        meas.real("max_deviation", dev);
        meas.real("max_self_adjoint_deviation", sa);
        meas.real("min_control_deviation", control);
        meas.real("control_threshold", CONTROL_MIN);
        Ok(dev <= DOUBLE_TOL && sa <= PAIR_TOL && control >= CONTROL_MIN)
    })
}
