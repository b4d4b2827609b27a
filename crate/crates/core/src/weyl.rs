//! Weyl operators over `R^2` and `R^4` with exact rational arguments.
//!
//! A [`WeylPolynomial`] is a finite sum `sum_k c_k W(x_k)`. Products follow
//! the Weyl relation `W(x) W(y) = exp(i s(x, y)) W(x + y)` where `s` is the
//! symplectic form `s((a, b), (a', b')) = (a b' - b a') / 2` on one degree of
//! freedom and its direct sum on two. Phase points are exact rationals so that
//! support decisions (is this coordinate exactly zero?) never depend on
//! rounding; coefficients and phases are `f64` complex numbers.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Neg;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result, C64};

/// Exact rational coordinate.
pub type Rational = BigRational;

/// Coefficients with modulus below this are dropped on canonicalization.
pub const ZERO_THRESHOLD: f64 = 1e-15;

/// Default upper bound on the number of terms a polynomial may carry.
pub const DEFAULT_TERM_CAP: usize = 4096;

/// Builds the rational `num / den`. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let r = Rational::from_str(t).map_err(|_| Error::ParseRational(s.to_string()))?;
    Ok(r)
}

/// Formats a rational as `"p/q"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    alloc::format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A point of `R^2` or `R^4` with exact rational coordinates.
///
/// For two degrees of freedom the coordinates are `(a, b, c, d)`, where
/// `(a, b)` parametrizes the first factor and `(c, d)` the second.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhasePoint(Vec<Rational>);

impl PhasePoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        match coords.len() {
            2 | 4 => Ok(Self(coords)),
            n => Err(Error::BadDimension(n)),
        }
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&n| int(n)).collect())
    }

    pub fn parse<S: AsRef<str>>(coords: &[S]) -> Result<Self> {
        let v = coords
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(v)
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new((0..dim).map(|_| Rational::zero()).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect()))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(x, y)| x - y).collect()))
    }

    /// Squared Euclidean length, as a float.
    pub fn norm_sqr_f64(&self) -> f64 {
        self.0.iter().map(|x| {
            let v = rational_to_f64(x);
            v * v
        }).sum()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }
}

impl Neg for &PhasePoint {
    type Output = PhasePoint;

    fn neg(self) -> PhasePoint {
        PhasePoint(self.0.iter().map(|x| -x).collect())
    }
}

impl Neg for PhasePoint {
    type Output = PhasePoint;

    fn neg(self) -> PhasePoint {
        -&self
    }
}

impl fmt::Debug for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Symplectic form on `R^2`: `((a, b), (a', b')) -> (a b' - b a') / 2`.
pub fn symplectic_form(x: &PhasePoint, y: &PhasePoint) -> Result<Rational> {
    check_dim(2, x.dim())?;
    check_dim(2, y.dim())?;
    Ok(pair_form(&x.0[0], &x.0[1], &y.0[0], &y.0[1]))
}

/// Direct sum of two copies of [`symplectic_form`] on `R^4`.
pub fn direct_sum_form(x: &PhasePoint, y: &PhasePoint) -> Result<Rational> {
    check_dim(4, x.dim())?;
    check_dim(4, y.dim())?;
    Ok(pair_form(&x.0[0], &x.0[1], &y.0[0], &y.0[1])
        + pair_form(&x.0[2], &x.0[3], &y.0[2], &y.0[3]))
}

/// The form matching the dimension of the arguments.
pub fn weyl_form(x: &PhasePoint, y: &PhasePoint) -> Result<Rational> {
    match x.dim() {
        2 => symplectic_form(x, y),
        4 => direct_sum_form(x, y),
        n => Err(Error::BadDimension(n)),
    }
}

fn pair_form(a: &Rational, b: &Rational, a2: &Rational, b2: &Rational) -> Rational {
    (a * b2 - b * a2) / int(2)
}

/// A unimodular scalar `exp(i theta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase(C64);

impl Phase {
    /// `exp(i theta)`; exactly `1` when `theta` is exactly zero.
    pub fn of_angle(theta: &Rational) -> Self {
        if theta.is_zero() {
            return Self(C64::new(1.0, 0.0));
        }
        Self::of_f64(rational_to_f64(theta))
    }

    pub fn of_f64(theta: f64) -> Self {
        Self(C64::from_polar(1.0, theta))
    }

    #[inline]
    pub fn value(self) -> C64 {
        self.0
    }
}

/// A finite complex combination of Weyl operators in canonical form.
///
/// At most one term is stored per phase point and coefficients with modulus
/// below [`ZERO_THRESHOLD`] are removed. Terms iterate in the total order of
/// [`PhasePoint`], so every derived quantity is deterministic.
#[derive(Clone, PartialEq)]
pub struct WeylPolynomial {
    dim: usize,
    terms: BTreeMap<PhasePoint, C64>,
}

impl WeylPolynomial {
    pub fn zero(dim: usize) -> Result<Self> {
        match dim {
            2 | 4 => Ok(Self { dim, terms: BTreeMap::new() }),
            n => Err(Error::BadDimension(n)),
        }
    }

    /// `W(0)`, the unit of the algebra.
    pub fn identity(dim: usize) -> Result<Self> {
        Self::monomial(PhasePoint::zero(dim)?, C64::new(1.0, 0.0))
    }

    pub fn monomial(point: PhasePoint, coef: C64) -> Result<Self> {
        let mut p = Self::zero(point.dim())?;
        p.add_term(point, coef);
        Ok(p)
    }

    /// Sums the given terms; repeated points are merged.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PhasePoint, C64)>,
    {
        let mut p = Self::zero(dim)?;
        for (x, c) in terms {
            check_dim(dim, x.dim())?;
            p.accumulate(x, c);
        }
        p.canonicalize();
        Ok(p)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PhasePoint, &C64)> + '_ {
        self.terms.iter()
    }

    pub fn points(&self) -> impl Iterator<Item = &PhasePoint> + '_ {
        self.terms.keys()
    }

    pub fn coefficient(&self, x: &PhasePoint) -> C64 {
        self.terms.get(x).copied().unwrap_or_default()
    }

    fn accumulate(&mut self, x: PhasePoint, c: C64) {
        *self.terms.entry(x).or_default() += c;
    }

    fn add_term(&mut self, x: PhasePoint, c: C64) {
        self.accumulate(x.clone(), c);
        if self.terms[&x].norm() < ZERO_THRESHOLD {
            self.terms.remove(&x);
        }
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|_, c| c.norm() >= ZERO_THRESHOLD);
    }

    fn check_cap(&self, limit: usize) -> Result<()> {
        if self.len() > limit {
            Err(Error::TermCap { terms: self.len(), limit })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, C64::new(-1.0, 0.0))
    }

    fn combine(&self, other: &Self, sign: C64) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.accumulate(x.clone(), sign * c);
        }
        out.canonicalize();
        out.check_cap(DEFAULT_TERM_CAP)?;
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= s);
        out.canonicalize();
        out
    }

    /// Product under the Weyl relations, with the default term cap.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_capped(other, DEFAULT_TERM_CAP)
    }

    pub fn multiply_capped(&self, other: &Self, limit: usize) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        self.check_cap(limit)?;
        other.check_cap(limit)?;
        let mut out = Self { dim: self.dim, terms: BTreeMap::new() };
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                let phase = Phase::of_angle(&weyl_form(x, y)?);
                out.accumulate(x.checked_add(y)?, cx * cy * phase.value());
            }
        }
        out.canonicalize();
        out.check_cap(limit)?;
        Ok(out)
    }

    /// `(sum c_k W(x_k))^* = sum conj(c_k) W(-x_k)`.
    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(x, c)| (-x, c.conj())).collect(),
        }
    }

    /// Embeds a polynomial over `R^2` into `R^4` as `P (x) I` (slot 1) or
    /// `I (x) P` (slot 2).
    pub fn tensor_embed(&self, slot: u8) -> Result<Self> {
        check_dim(2, self.dim)?;
        let zero = Rational::zero;
        let lift = |x: &PhasePoint| -> PhasePoint {
            let [a, b] = [x.0[0].clone(), x.0[1].clone()];
            let v = match slot {
                1 => alloc::vec![a, b, zero(), zero()],
                _ => alloc::vec![zero(), zero(), a, b],
            };
            PhasePoint(v)
        };
        if slot != 1 && slot != 2 {
            return Err(Error::BadSlot(slot));
        }
        Ok(Self {
            dim: 4,
            terms: self.terms.iter().map(|(x, c)| (lift(x), *c)).collect(),
        })
    }

    /// `sum |c_k|`, an upper bound for the C*-norm since each `W(x)` is
    /// unitary.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        match self.sub(&self.adjoint()) {
            Ok(d) => d.one_norm() <= tol,
            Err(_) => false,
        }
    }
}

impl fmt::Debug for WeylPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (x, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i) W{:?}", c.re, c.im, x)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pt(c: &[i64]) -> PhasePoint {
        PhasePoint::from_ints(c).unwrap()
    }

    fn w(c: &[i64]) -> WeylPolynomial {
        WeylPolynomial::monomial(pt(c), C64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn symplectic_examples() {
        assert_eq!(symplectic_form(&pt(&[1, 0]), &pt(&[0, 1])).unwrap(), ratio(1, 2));
        assert_eq!(symplectic_form(&pt(&[3, 5]), &pt(&[3, 5])).unwrap(), int(0));
        assert_eq!(symplectic_form(&pt(&[2, 3]), &pt(&[5, 7])).unwrap(), ratio(-1, 2));
        assert!(matches!(
            symplectic_form(&pt(&[1, 0, 0, 0]), &pt(&[0, 1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn direct_sum_examples() {
        assert_eq!(direct_sum_form(&pt(&[1, 0, 0, 0]), &pt(&[0, 1, 0, 0])).unwrap(), ratio(1, 2));
        let x = pt(&[3, -1, 4, 7]);
        assert_eq!(direct_sum_form(&x, &x).unwrap(), int(0));
        assert_eq!(direct_sum_form(&pt(&[1, 0, 1, 0]), &pt(&[0, 1, 0, 1])).unwrap(), int(1));
        assert!(direct_sum_form(&pt(&[1, 0]), &pt(&[0, 1])).is_err());
    }

    #[test]
    fn product_of_generators() {
        let p = w(&[1, 0]).multiply(&w(&[0, 1])).unwrap();
        assert_eq!(p.len(), 1);
        let c = p.coefficient(&pt(&[1, 1]));
        assert!((c - C64::from_polar(1.0, 0.5)).norm() < 1e-15);

        let id = WeylPolynomial::identity(2).unwrap();
        let q = w(&[2, -3]).add(&w(&[1, 1]).scale(C64::new(0.0, 2.0))).unwrap();
        assert_eq!(id.multiply(&q).unwrap(), q);
        assert_eq!(q.multiply(&id).unwrap(), q);

        let u = w(&[4, -7]).multiply(&w(&[-4, 7])).unwrap();
        assert_eq!(u, id);
    }

    #[test]
    fn adjoint_examples() {
        let p = WeylPolynomial::monomial(pt(&[1, 2]), C64::new(0.0, 1.0)).unwrap();
        let a = p.adjoint();
        assert_eq!(a.coefficient(&pt(&[-1, -2])), C64::new(0.0, -1.0));
        let id = WeylPolynomial::identity(2).unwrap();
        assert_eq!(id.adjoint(), id);
        assert_eq!(p.adjoint().adjoint(), p);
    }

    #[test]
    fn tensor_embedding() {
        let p = w(&[1, 2]);
        assert_eq!(p.tensor_embed(1).unwrap(), w(&[1, 2, 0, 0]));
        assert_eq!(p.tensor_embed(2).unwrap(), w(&[0, 0, 1, 2]));
        assert_eq!(p.tensor_embed(3), Err(Error::BadSlot(3)));
        assert!(w(&[1, 2, 3, 4]).tensor_embed(1).is_err());

        // (A (x) I)(I (x) B) = A (x) B with no phase
        let ab = w(&[3, 5]).tensor_embed(1).unwrap()
            .multiply(&w(&[-2, 7]).tensor_embed(2).unwrap())
            .unwrap();
        assert_eq!(ab, w(&[3, 5, -2, 7]));
    }

    #[test]
    fn one_norm_examples() {
        assert_eq!(w(&[1, 1]).one_norm(), 1.0);
        let half = C64::new(0.5, 0.0);
        let p = WeylPolynomial::from_terms(2, vec![(pt(&[1, 0]), half), (pt(&[0, 1]), half)]).unwrap();
        assert_eq!(p.one_norm(), 1.0);
        assert_eq!(WeylPolynomial::zero(4).unwrap().one_norm(), 0.0);
    }

    #[test]
    fn self_adjointness() {
        assert!(w(&[2, 1]).add(&w(&[-2, -1])).unwrap().is_self_adjoint(0.0));
        let ip = WeylPolynomial::monomial(pt(&[1, 0]), C64::new(0.0, 1.0)).unwrap();
        assert!(!ip.is_self_adjoint(1e-12));
        let e = C64::from_polar(1.0, 0.3);
        let p = WeylPolynomial::from_terms(2, vec![(pt(&[1, 3]), e), (pt(&[-1, -3]), e.conj())]).unwrap();
        assert!(p.is_self_adjoint(1e-15));
    }

    #[test]
    fn canonical_form_drops_residue() {
        let p = w(&[1, 1]);
        let z = p.sub(&p).unwrap();
        assert!(z.is_empty());
        let tiny = WeylPolynomial::monomial(pt(&[1, 1]), C64::new(1e-16, 0.0)).unwrap();
        assert!(tiny.is_empty());
    }

    #[test]
    fn term_cap_is_enforced() {
        let p = WeylPolynomial::from_terms(2, (0..10).map(|k| (pt(&[k, 0]), C64::new(1.0, 0.0)))).unwrap();
        let q = WeylPolynomial::from_terms(2, (0..10).map(|k| (pt(&[0, k]), C64::new(1.0, 0.0)))).unwrap();
        assert_eq!(p.multiply_capped(&q, 50), Err(Error::TermCap { terms: 100, limit: 50 }));
        assert_eq!(p.multiply_capped(&q, 100).unwrap().len(), 100);
        assert!(matches!(p.multiply_capped(&q, 5), Err(Error::TermCap { terms: 10, limit: 5 })));
    }

    #[test]
    fn commutation_phases_match_closed_form() {
        // [W(s,0) (x) W(-s,0)] X = e^{is(b-d)} X [W(s,0) (x) W(-s,0)]
        let (a, b, c, d) = (ratio(2, 3), ratio(-1, 2), ratio(5, 4), ratio(3, 7));
        let x = WeylPolynomial::monomial(
            PhasePoint::new(vec![a.clone(), b.clone(), c.clone(), d.clone()]).unwrap(),
            C64::new(1.0, 0.0),
        )
        .unwrap();
        let s = ratio(3, 2);
        let t = ratio(-2, 5);
        let shift = |v: Vec<Rational>| WeylPolynomial::monomial(PhasePoint::new(v).unwrap(), C64::new(1.0, 0.0)).unwrap();
        let am = shift(vec![s.clone(), int(0), -s.clone(), int(0)]);
        let bm = shift(vec![int(0), t.clone(), int(0), t.clone()]);

        let ratio_of = |p: &WeylPolynomial, q: &WeylPolynomial| {
            let (xp, cp) = p.terms().next().unwrap();
            let (xq, cq) = q.terms().next().unwrap();
            assert_eq!(xp, xq);
            cp / cq
        };
        let r1 = ratio_of(&am.multiply(&x).unwrap(), &x.multiply(&am).unwrap());
        let want1 = C64::from_polar(1.0, rational_to_f64(&(&s * (&b - &d))));
        assert!((r1 - want1).norm() < 1e-12);

        let r2 = ratio_of(&bm.multiply(&x).unwrap(), &x.multiply(&bm).unwrap());
        let want2 = C64::from_polar(1.0, -rational_to_f64(&(&t * (&a + &c))));
        assert!((r2 - want2).norm() < 1e-12);
    }

    #[test]
    fn rational_text_round_trip() {
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(r, ratio(-3, 2));
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(format_rational(&int(5)), "5/1");
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }
}
