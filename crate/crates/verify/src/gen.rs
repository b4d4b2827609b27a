//! Seeded random inputs for the verification batteries.

use epr_core::weyl::ratio;
use epr_core::{PhasePoint, Rational, WeylPolynomial, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// Independent generator for battery `stream` under `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn rational(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(-24..=24), rng.gen_range(1..=8))
}

pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let r = rational(rng);
        if r != ratio(0, 1) {
            return r;
        }
    }
}

pub fn point(rng: &mut impl Rng, dim: usize) -> PhasePoint {
    PhasePoint::new((0..dim).map(|_| rational(rng)).collect()).unwrap()
}

/// A point of `{c = -a, d = b}`.
pub fn manifold_point(rng: &mut impl Rng) -> PhasePoint {
    let (a, b) = (rational(rng), rational(rng));
    PhasePoint::new(vec![a.clone(), b.clone(), -a, b]).unwrap()
}

/// `n` distinct points spread over `keys` shared `(a + c, b - d)` values,
/// so that kernel support classes have many members.
pub fn clustered_points(rng: &mut impl Rng, n: usize, keys: usize) -> Vec<PhasePoint> {
    let ks: Vec<(Rational, Rational)> = (0..keys).map(|_| (rational(rng), rational(rng))).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (u, v) = &ks[rng.gen_range(0..keys)];
        let (a, b) = (rational(rng), rational(rng));
        let p = PhasePoint::new(vec![a.clone(), b.clone(), u - &a, &b - v]).unwrap();
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

pub fn coefficient(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn polynomial_on(rng: &mut impl Rng, points: Vec<PhasePoint>) -> WeylPolynomial {
    let dim = points.first().map_or(4, PhasePoint::dim);
    let terms: Vec<_> = points.into_iter().map(|p| (p, coefficient(rng))).collect();
    WeylPolynomial::from_terms(dim, terms).unwrap()
}

/// Up to `n` terms, clustered on two support classes so that the positivity
/// value involves genuine cancellations.
pub fn polynomial(rng: &mut impl Rng, n: usize) -> WeylPolynomial {
    let k = rng.gen_range(1..=n);
    let pts = clustered_points(rng, k, 2);
    polynomial_on(rng, pts)
}

pub fn hermitian(rng: &mut impl Rng, m: usize) -> epr_core::CMatrix {
    let a = epr_core::CMatrix::from_fn(m, m, |_, _| coefficient(rng));
    a.add(&a.adjoint()).scale(C64::new(0.5, 0.0))
}
