//! State functionals on the Weyl algebra over `R^4`.
//!
//! The EPR state with parameters `(lambda, mu)` is fixed by its values on Weyl
//! operators:
//!
//! ```text
//! G(a, b, c, d) = delta(a + c) delta(b - d) exp(i (a lambda + b mu))
//! ```
//!
//! where `delta` is the indicator of `{0}`. Since coordinates are exact
//! rationals, `delta` is an exact equality test. A Gaussian regular state is
//! provided for contrast.
//!
//! Besides evaluation, this module carries the executable structure of the
//! state: kernel positivity, the support partition of a point set, the
//! rank-one phase factorization on each class, vanishing off the support
//! manifold, multiplicativity on the abelian subalgebra generated by
//! `W(s,0) (x) W(-s,0)` and `W(0,t) (x) W(0,t)`, and traciality on each
//! tensor factor.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::linalg::{CMatrix, HermitianMatrix};
use crate::weyl::{
    direct_sum_form, int, rational_to_f64, Phase, PhasePoint, Rational, WeylPolynomial,
};
use crate::{Error, Result, C64};

/// Tolerance used when a kernel or Gram matrix is checked for Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default lower bound accepted for the smallest kernel eigenvalue.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateKind {
    /// The EPR state with relative position `lambda` and total momentum `mu`.
    Epr { lambda: f64, mu: f64 },
    /// Gaussian regular state, `G(x) = exp(-|x|^2 / 4)`.
    Regular,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateFunctional {
    kind: StateKind,
    corrupt_kernel: bool,
}

impl StateFunctional {
    pub fn epr(lambda: f64, mu: f64) -> Self {
        Self { kind: StateKind::Epr { lambda, mu }, corrupt_kernel: false }
    }

    pub fn regular() -> Self {
        Self { kind: StateKind::Regular, corrupt_kernel: false }
    }

    /// Returns a copy whose [`kernel_matrix`] doubles every off-diagonal
    /// entry. Only meant for negative-control runs of the positivity checks.
    #[doc(hidden)]
    pub fn with_corrupted_kernel(mut self) -> Self {
        self.corrupt_kernel = true;
        self
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn is_kernel_corrupted(&self) -> bool {
        self.corrupt_kernel
    }

    pub fn is_epr(&self) -> bool {
        matches!(self.kind, StateKind::Epr { .. })
    }

    fn params(&self) -> Result<(f64, f64)> {
        match self.kind {
            StateKind::Epr { lambda, mu } => Ok((lambda, mu)),
            StateKind::Regular => Err(Error::NotEpr),
        }
    }
}

/// `true` iff the point lies on `{c = -a, d = b}`.
pub fn on_support(x: &PhasePoint) -> bool {
    let v = x.coords();
    (&v[0] + &v[2]).is_zero() && v[1] == v[3]
}

/// The value `exp(i (a lambda + b mu))` prescribed on the support manifold.
pub fn manifold_phase(lambda: f64, mu: f64, a: &Rational, b: &Rational) -> C64 {
    Phase::of_f64(rational_to_f64(a) * lambda + rational_to_f64(b) * mu).value()
}

/// `omega(W(x))` for a point of `R^4`.
pub fn eval_point(state: &StateFunctional, x: &PhasePoint) -> Result<C64> {
    if x.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: x.dim() });
    }
    match state.kind {
        StateKind::Epr { lambda, mu } => {
            if !on_support(x) {
                return Ok(C64::new(0.0, 0.0));
            }
            let v = x.coords();
            if v[0].is_zero() && v[1].is_zero() {
                return Ok(C64::new(1.0, 0.0));
            }
            Ok(manifold_phase(lambda, mu, &v[0], &v[1]))
        }
        StateKind::Regular => {
            if x.is_zero() {
                return Ok(C64::new(1.0, 0.0));
            }
            Ok(C64::new((-x.norm_sqr_f64() / 4.0).exp(), 0.0))
        }
    }
}

/// Linear extension of [`eval_point`].
pub fn eval_poly(state: &StateFunctional, p: &WeylPolynomial) -> Result<C64> {
    if p.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: p.dim() });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (x, c) in p.terms() {
        acc += c * eval_point(state, x)?;
    }
    Ok(acc)
}

fn check_distinct(points: &[PhasePoint]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (i, x) in points.iter().enumerate() {
        if x.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: x.dim() });
        }
        if !seen.insert(x) {
            return Err(Error::DuplicatePoint(i));
        }
    }
    Ok(())
}

/// `F(x, y) = G(x - y) exp(-i s(x, y))` with `s` the direct-sum form.
pub fn kernel_entry(state: &StateFunctional, x: &PhasePoint, y: &PhasePoint) -> Result<C64> {
    let g = eval_point(state, &x.checked_sub(y)?)?;
    if g.re == 0.0 && g.im == 0.0 {
        return Ok(g);
    }
    let form = direct_sum_form(x, y)?;
    Ok(g * Phase::of_angle(&-form).value())
}

/// The kernel matrix `M[j][k] = F(x_j, x_k)` on distinct points.
pub fn kernel_matrix(state: &StateFunctional, points: &[PhasePoint]) -> Result<HermitianMatrix> {
    check_distinct(points)?;
    let n = points.len();
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = kernel_entry(state, &points[j], &points[k])?;
        }
    }
    if state.corrupt_kernel {
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    m[(j, k)] *= 2.0;
                }
            }
        }
    }
    HermitianMatrix::new(m, HERMITIAN_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub pass: bool,
}

/// Passes iff the smallest eigenvalue is at least `-tol`.
pub fn psd_check(m: &CMatrix, tol: f64) -> Result<PsdReport> {
    let h = HermitianMatrix::new(m.clone(), tol.max(HERMITIAN_TOL))?;
    let min_eigenvalue = h.min_eigenvalue();
    Ok(PsdReport { min_eigenvalue, pass: min_eigenvalue >= -tol })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Positivity {
    /// `Re omega(P^* P)`.
    pub value: f64,
    pub imaginary: f64,
    pub pass: bool,
}

/// `omega(P^* P)`, which must be real and non-negative.
pub fn positivity_check(state: &StateFunctional, p: &WeylPolynomial) -> Result<Positivity> {
    let pp = p.adjoint().multiply(p)?;
    let v = eval_poly(state, &pp)?;
    Ok(Positivity {
        value: v.re,
        imaginary: v.im,
        pass: v.im.abs() <= 1e-10 && v.re >= -1e-10,
    })
}

/// `zeta^* M zeta`, with `zeta` the coefficients of `P` and `M` the kernel
/// on the negated points of `P`; equals `omega(P^* P)`.
pub fn kernel_form(state: &StateFunctional, p: &WeylPolynomial) -> Result<C64> {
    let points: Vec<PhasePoint> = p.points().map(|x| -x).collect();
    let zeta: Vec<C64> = p.terms().map(|(_, c)| *c).collect();
    let m = kernel_matrix(state, &points)?;
    Ok(m.matrix().quadratic_form(&zeta))
}

/// Disjoint index classes covering `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportPartition {
    classes: Vec<Vec<usize>>,
}

impl SupportPartition {
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class containing `i`.
    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&i))
    }
}

/// Partitions the points by the relation `F(x_j, x_k) != 0`.
///
/// The relation is checked for reflexivity, symmetry and transitivity before
/// the classes are read off; a kernel whose support is not an equivalence
/// relation is reported as [`Error::NotEquivalence`].
pub fn support_relation(points: &[PhasePoint], state: &StateFunctional) -> Result<SupportPartition> {
    let m = kernel_matrix(state, points)?;
    support_from_matrix(m.matrix())
}

pub fn support_from_matrix(m: &CMatrix) -> Result<SupportPartition> {
    let n = m.rows();
    let rel = |j: usize, k: usize| {
        let v = m[(j, k)];
        v.re != 0.0 || v.im != 0.0
    };
    for j in 0..n {
        if !rel(j, j) {
            return Err(Error::NotEquivalence(format!("not reflexive at {j}")));
        }
        for k in 0..n {
            if rel(j, k) != rel(k, j) {
                return Err(Error::NotEquivalence(format!("not symmetric at ({j}, {k})")));
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            if !rel(j, k) {
                continue;
            }
            for l in 0..n {
                if rel(k, l) && !rel(j, l) {
                    return Err(Error::NotEquivalence(format!("not transitive at ({j}, {k}, {l})")));
                }
            }
        }
    }
    let mut assigned = alloc::vec![false; n];
    let mut classes = Vec::new();
    for j in 0..n {
        if assigned[j] {
            continue;
        }
        let class: Vec<usize> = (j..n).filter(|&k| rel(j, k)).collect();
        for &k in &class {
            assigned[k] = true;
        }
        classes.push(class);
    }
    Ok(SupportPartition { classes })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassReport {
    pub pass: bool,
    /// Largest `| |M[j][k]| - 1 |` inside a class.
    pub modulus_deviation: f64,
    /// Largest `|M[j][k] M[k][l] - M[j][l]|` inside a class.
    pub cocycle_deviation: f64,
    /// Largest `|M[j][k]|` across different classes.
    pub cross_class: f64,
}

/// Checks that the kernel restricted to each class factorizes as
/// `alpha_j conj(alpha_k)`, via unit modulus plus the cocycle identity, and
/// vanishes across classes.
pub fn rank_one_class_check(m: &CMatrix, partition: &SupportPartition, tol: f64) -> ClassReport {
    let mut modulus_deviation = 0.0f64;
    let mut cocycle_deviation = 0.0f64;
    let mut cross_class = 0.0f64;
    let n = m.rows();
    let mut class_id = alloc::vec![usize::MAX; n];
    for (ci, class) in partition.classes().iter().enumerate() {
        for &j in class {
            if j < n {
                class_id[j] = ci;
            }
        }
    }
    for class in partition.classes() {
        for &j in class {
            for &k in class {
                modulus_deviation = modulus_deviation.max((m[(j, k)].norm() - 1.0).abs());
                for &l in class {
                    let d = (m[(j, k)] * m[(k, l)] - m[(j, l)]).norm();
                    cocycle_deviation = cocycle_deviation.max(d);
                }
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            if class_id[j] != class_id[k] {
                cross_class = cross_class.max(m[(j, k)].norm());
            }
        }
    }
    let covered = class_id.iter().all(|&c| c != usize::MAX);
    ClassReport {
        pass: covered && modulus_deviation <= tol && cocycle_deviation <= tol && cross_class <= tol,
        modulus_deviation,
        cocycle_deviation,
        cross_class,
    }
}

/// The class phase `alpha` of a point under the EPR kernel.
///
/// With `u = a + c` and `v = b - d` (constant on a support class),
/// `alpha(x) = exp(i (a lambda + b mu)) exp(i (u b - v a) / 2)`, and
/// `F(x_j, x_k) = alpha(x_j) conj(alpha(x_k))` whenever the two points share a
/// class.
pub fn class_phase(state: &StateFunctional, x: &PhasePoint) -> Result<C64> {
    let (lambda, mu) = state.params()?;
    if x.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: x.dim() });
    }
    let v = x.coords();
    let u = &v[0] + &v[2];
    let w = &v[1] - &v[3];
    let cross = (&u * &v[1] - &w * &v[0]) / int(2);
    Ok(manifold_phase(lambda, mu, &v[0], &v[1]) * Phase::of_angle(&cross).value())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniquenessReport {
    pub on_manifold: bool,
    pub value: C64,
    pub expected: C64,
    pub pass: bool,
}

/// Exact trichotomy: zero off `{c = -a, d = b}`, the prescribed phase on it.
pub fn uniqueness_support_check(state: &StateFunctional, x: &PhasePoint) -> Result<UniquenessReport> {
    let (lambda, mu) = state.params()?;
    let value = eval_point(state, x)?;
    let on = on_support(x);
    let v = x.coords();
    let (expected, pass) = if on {
        let e = manifold_phase(lambda, mu, &v[0], &v[1]);
        (e, (value - e).norm() <= 1e-12)
    } else {
        let z = C64::new(0.0, 0.0);
        (z, value.re == 0.0 && value.im == 0.0)
    };
    Ok(UniquenessReport { on_manifold: on, value, expected, pass })
}

/// `W(s,0) (x) W(-s,0)`.
pub fn position_correlator(s: &Rational) -> WeylPolynomial {
    let p = PhasePoint::new(alloc::vec![s.clone(), int(0), -s.clone(), int(0)]).unwrap();
    WeylPolynomial::monomial(p, C64::new(1.0, 0.0)).unwrap()
}

/// `W(0,t) (x) W(0,t)`.
pub fn momentum_correlator(t: &Rational) -> WeylPolynomial {
    let p = PhasePoint::new(alloc::vec![int(0), t.clone(), int(0), t.clone()]).unwrap();
    WeylPolynomial::monomial(p, C64::new(1.0, 0.0)).unwrap()
}

/// Reconstructs `omega(W(x))` using only the two defining families of values
/// and the algebra: commutation phases with the correlators force zero off
/// the support manifold, and on it `W(x)` factors into a product of the
/// correlators whose values multiply.
///
/// This never calls [`eval_point`] on `x` itself.
pub fn derived_value(state: &StateFunctional, x: &PhasePoint) -> Result<C64> {
    let (lambda, mu) = state.params()?;
    let xm = WeylPolynomial::monomial(x.clone(), C64::new(1.0, 0.0))?;
    let one = int(1);
    let commutation = |g: &WeylPolynomial| -> Result<C64> {
        let gx = g.multiply(&xm)?;
        let xg = xm.multiply(g)?;
        let (_, a) = gx.terms().next().ok_or(Error::ZeroPoint)?;
        let (_, b) = xg.terms().next().ok_or(Error::ZeroPoint)?;
        Ok(a / b)
    };
    // omega(X) = omega(A X) / omega(A) = omega(X A) / omega(A) = r omega(X) ...
    // so any nontrivial commutation phase r forces omega(X) = 0.
    let r_pos = commutation(&position_correlator(&one))?;
    if (r_pos - 1.0).norm() > 1e-12 {
        return Ok(C64::new(0.0, 0.0));
    }
    let r_mom = commutation(&momentum_correlator(&one))?;
    if (r_mom - 1.0).norm() > 1e-12 {
        return Ok(C64::new(0.0, 0.0));
    }
    let v = x.coords();
    let (a, b) = (&v[0], &v[1]);
    let product = position_correlator(a).multiply(&momentum_correlator(b))?;
    // W(x) = conj(k) * [A_a][B_b] where k is the phase of the product.
    let (px, k) = product.terms().next().ok_or(Error::ZeroPoint)?;
    debug_assert_eq!(px, x);
    let defining = manifold_phase(lambda, 0.0, a, &int(0)) * manifold_phase(0.0, mu, &int(0), b);
    Ok(k.conj() * defining)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplicativityReport {
    pub max_deviation: f64,
    pub pass: bool,
}

/// With `A = W(s,0) (x) W(-s,0)` and `B = W(0,t) (x) W(0,t)`: checks
/// `omega(AB) = omega(A) omega(B)` and, for each sample `X`,
/// `omega(AX) = omega(XA) = omega(A) omega(X)` and the same for `B`.
pub fn multiplicativity_check(
    state: &StateFunctional,
    s: &Rational,
    t: &Rational,
    samples: &[WeylPolynomial],
) -> Result<MultiplicativityReport> {
    let a = position_correlator(s);
    let b = momentum_correlator(t);
    let wa = eval_poly(state, &a)?;
    let wb = eval_poly(state, &b)?;
    let mut dev = (eval_poly(state, &a.multiply(&b)?)? - wa * wb).norm();
    for x in samples {
        let wx = eval_poly(state, x)?;
        for (g, wg) in [(&a, wa), (&b, wb)] {
            let left = eval_poly(state, &g.multiply(x)?)?;
            let right = eval_poly(state, &x.multiply(g)?)?;
            dev = dev.max((left - wg * wx).norm()).max((right - wx * wg).norm());
        }
    }
    Ok(MultiplicativityReport { max_deviation: dev, pass: dev <= 1e-12 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracialityReport {
    pub forward: C64,
    pub backward: C64,
    pub pass: bool,
}

/// `omega(W(a)W(b) (x) I) = omega(W(b)W(a) (x) I)`, both exactly zero unless
/// `a = -b`. `slot` selects the tensor factor.
pub fn traciality_check(
    state: &StateFunctional,
    a: &PhasePoint,
    b: &PhasePoint,
    slot: u8,
) -> Result<TracialityReport> {
    let wa = WeylPolynomial::monomial(a.clone(), C64::new(1.0, 0.0))?;
    let wb = WeylPolynomial::monomial(b.clone(), C64::new(1.0, 0.0))?;
    let forward = eval_poly(state, &wa.multiply(&wb)?.tensor_embed(slot)?)?;
    let backward = eval_poly(state, &wb.multiply(&wa)?.tensor_embed(slot)?)?;
    let mut pass = (forward - backward).norm() <= 1e-12;
    if state.is_epr() && !a.checked_add(b)?.is_zero() {
        pass &= forward == C64::new(0.0, 0.0) && backward == C64::new(0.0, 0.0);
    }
    Ok(TracialityReport { forward, backward, pass })
}

/// Groups point indices by their `(a + c, b - d)` key; handy for building
/// point sets with nontrivial support classes.
pub fn class_keys(points: &[PhasePoint]) -> BTreeMap<(Rational, Rational), Vec<usize>> {
    let mut out: BTreeMap<(Rational, Rational), Vec<usize>> = BTreeMap::new();
    for (i, x) in points.iter().enumerate() {
        let v = x.coords();
        out.entry((&v[0] + &v[2], &v[1] - &v[3])).or_default().push(i);
    }
    out
}
