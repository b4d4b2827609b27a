#![allow(dead_code)]

// Independent f64 oracles: nothing here calls into the engine's kernel or
// state evaluation.

use epr_core::weyl::{ratio, rational_to_f64};
use epr_core::{PhasePoint, Rational, WeylPolynomial, C64};
use num_traits::Zero;
use proptest::prelude::*;

pub fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

pub fn point(dim: usize) -> impl Strategy<Value = PhasePoint> {
    proptest::collection::vec(rational(), dim).prop_map(|v| PhasePoint::new(v).unwrap())
}

pub fn coef() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| C64::new(re, im))
}

pub fn poly(dim: usize, max_terms: usize) -> impl Strategy<Value = WeylPolynomial> {
    proptest::collection::vec((point(dim), coef()), 1..=max_terms)
        .prop_map(move |terms| WeylPolynomial::from_terms(dim, terms).unwrap())
}

/// Points drawn on a handful of shared `(a + c, b - d)` keys so that support
/// classes have several members.
pub fn clustered_points(n: usize, keys: usize) -> impl Strategy<Value = Vec<PhasePoint>> {
    (
        proptest::collection::vec((rational(), rational()), keys),
        proptest::collection::vec((0..keys, rational(), rational()), n),
    )
        .prop_map(|(ks, raw)| dedup(raw.into_iter().map(|(k, a, b)| on_key(&ks[k], a, b)).collect()))
}

pub fn on_key(key: &(Rational, Rational), a: Rational, b: Rational) -> PhasePoint {
    let c = &key.0 - &a;
    let d = &b - &key.1;
    PhasePoint::new(vec![a, b, c, d]).unwrap()
}

pub fn dedup(mut v: Vec<PhasePoint>) -> Vec<PhasePoint> {
    let mut seen = std::collections::BTreeSet::new();
    v.retain(|p| seen.insert(p.clone()));
    v
}

pub fn f(p: &PhasePoint) -> Vec<f64> {
    p.coords().iter().map(rational_to_f64).collect()
}

/// `sigma (+) sigma`, computed in floating point.
pub fn sigma(x: &[f64], y: &[f64]) -> f64 {
    x.chunks(2).zip(y.chunks(2)).map(|(u, v)| 0.5 * (u[0] * v[1] - u[1] * v[0])).sum()
}

pub fn cis(t: f64) -> C64 {
    C64::new(t.cos(), t.sin())
}

#[derive(Clone, Copy, Debug)]
pub enum Oracle {
    Epr(f64, f64),
    Regular,
}

/// `omega(W(x))` straight from the definition.
pub fn g(state: Oracle, x: &PhasePoint) -> C64 {
    let v = x.coords();
    match state {
        Oracle::Epr(lambda, mu) => {
            if (&v[0] + &v[2]).is_zero() && v[1] == v[3] {
                cis(rational_to_f64(&v[0]) * lambda + rational_to_f64(&v[1]) * mu)
            } else {
                C64::zero()
            }
        }
        Oracle::Regular => {
            let n: f64 = f(x).iter().map(|t| t * t).sum();
            C64::new((-n / 4.0).exp(), 0.0)
        }
    }
}

/// `G(x - y) exp(-i sigma(x, y))`.
pub fn kernel(state: Oracle, x: &PhasePoint, y: &PhasePoint) -> C64 {
    g(state, &x.checked_sub(y).unwrap()) * cis(-sigma(&f(x), &f(y)))
}

/// `omega(P^* P)` expanded term by term.
pub fn gram_form(state: Oracle, p: &WeylPolynomial) -> C64 {
    let terms: Vec<_> = p.terms().map(|(x, c)| (x.clone(), *c)).collect();
    let mut s = C64::zero();
    for (xj, cj) in &terms {
        for (xk, ck) in &terms {
            s += cj.conj() * ck * kernel(state, &-xj, &-xk);
        }
    }
    s
}

/// `omega(P)` expanded term by term.
pub fn value(state: Oracle, p: &WeylPolynomial) -> C64 {
    p.terms().map(|(x, c)| c * g(state, x)).sum()
}

pub fn max_coef_diff(p: &WeylPolynomial, q: &WeylPolynomial) -> f64 {
    let d = p.sub(q).unwrap();
    d.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}
