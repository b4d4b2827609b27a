//! Finite frames of GNS vectors `W(x) Omega`.
//!
//! The GNS space of the EPR state is nonseparable, so every computation is
//! restricted to the span of finitely many monomial vectors. Inner products
//! are `<W(x_j) Omega, W(x_k) Omega> = omega(W(x_j)^* W(x_k))`, and operators
//! are compressed to the frame through the same state.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{CMatrix, HermitianMatrix};
use crate::states::{eval_poly, StateFunctional, HERMITIAN_TOL};
use crate::weyl::{PhasePoint, Rational, WeylPolynomial};
use crate::{Error, Result, C64};

/// Gram eigenvalues at or below this are treated as null directions.
pub const WHITENING_FLOOR: f64 = 1e-12;

/// Frames with a nonzero Gram eigenvalue below this get a condition warning.
pub const CONDITION_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct GnsFrame {
    points: Vec<PhasePoint>,
    monomials: Vec<WeylPolynomial>,
    gram: HermitianMatrix,
}

impl GnsFrame {
    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn gram(&self) -> &HermitianMatrix {
        &self.gram
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn unit(x: &PhasePoint) -> Result<WeylPolynomial> {
    WeylPolynomial::monomial(x.clone(), C64::new(1.0, 0.0))
}

/// Builds the Gram matrix of `{W(x_j) Omega}` and verifies it is positive
/// semidefinite.
pub fn build_frame(state: &StateFunctional, points: &[PhasePoint]) -> Result<GnsFrame> {
    let mut seen = alloc::collections::BTreeSet::new();
    for (i, x) in points.iter().enumerate() {
        if x.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: x.dim() });
        }
        if !seen.insert(x) {
            return Err(Error::DuplicatePoint(i));
        }
    }
    let monomials = points.iter().map(unit).collect::<Result<Vec<_>>>()?;
    let n = points.len();
    let mut g = CMatrix::zeros(n, n);
    for j in 0..n {
        let adj = monomials[j].adjoint();
        for k in 0..n {
            g[(j, k)] = eval_poly(state, &adj.multiply(&monomials[k])?)?;
        }
    }
    let gram = HermitianMatrix::new(g, HERMITIAN_TOL)?;
    let min = gram.min_eigenvalue();
    if min < -1e-10 {
        return Err(Error::NotPositive(min));
    }
    Ok(GnsFrame { points: points.to_vec(), monomials, gram })
}

/// `M[j][k] = omega(W(x_j)^* P W(x_k))`.
pub fn compress_operator(state: &StateFunctional, frame: &GnsFrame, p: &WeylPolynomial) -> Result<CMatrix> {
    let n = frame.len();
    let mut m = CMatrix::zeros(n, n);
    let right = frame
        .monomials
        .iter()
        .map(|w| p.multiply(w))
        .collect::<Result<Vec<_>>>()?;
    for j in 0..n {
        let adj = frame.monomials[j].adjoint();
        for k in 0..n {
            m[(j, k)] = eval_poly(state, &adj.multiply(&right[k])?)?;
        }
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Collinearity {
    pub modulus: f64,
    pub value: C64,
    /// `exp(i t) exp(i c lambda) exp(-i d mu)` with `t = (a d + b c) / 2`.
    pub predicted: C64,
    pub phase_deviation: f64,
    pub pass: bool,
}

/// `<psi, phi>` for `psi = W(a,b) (x) W(c,d) Omega` and
/// `phi = W(a+c, b-d) (x) I Omega`. Both are unit vectors, and the inner
/// product has modulus one, so every two-factor monomial vector is a
/// multiple of a first-factor one.
pub fn collinearity_check(
    state: &StateFunctional,
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
) -> Result<Collinearity> {
    let (lambda, mu) = match state.kind() {
        crate::states::StateKind::Epr { lambda, mu } => (lambda, mu),
        crate::states::StateKind::Regular => return Err(Error::NotEpr),
    };
    let zero = Rational::from_integer(0.into());
    let psi = unit(&PhasePoint::new(alloc::vec![a.clone(), b.clone(), c.clone(), d.clone()])?)?;
    let phi = unit(&PhasePoint::new(alloc::vec![a + c, b - d, zero.clone(), zero])?)?;
    let value = eval_poly(state, &psi.adjoint().multiply(&phi)?)?;
    let t = (a * d + b * c) / Rational::from_integer(2.into());
    let angle = crate::weyl::rational_to_f64(&t)
        + crate::weyl::rational_to_f64(c) * lambda
        - crate::weyl::rational_to_f64(d) * mu;
    let predicted = C64::from_polar(1.0, angle);
    let modulus = value.norm();
    let phase_deviation = (value - predicted).norm();
    Ok(Collinearity {
        modulus,
        value,
        predicted,
        phase_deviation,
        pass: (modulus - 1.0).abs() <= 1e-12 && phase_deviation <= 1e-12,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceVectorReport {
    pub forward: C64,
    pub backward: C64,
    pub pass: bool,
}

/// `omega(embed(PQ)) = omega(embed(QP))` on the chosen tensor slot.
pub fn trace_vector_check(
    state: &StateFunctional,
    p: &WeylPolynomial,
    q: &WeylPolynomial,
    slot: u8,
) -> Result<TraceVectorReport> {
    let forward = eval_poly(state, &p.multiply(q)?.tensor_embed(slot)?)?;
    let backward = eval_poly(state, &q.multiply(p)?.tensor_embed(slot)?)?;
    Ok(TraceVectorReport { forward, backward, pass: (forward - backward).norm() <= 1e-10 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBound {
    /// Largest singular value of the whitened compression.
    pub value: f64,
    /// Number of Gram eigenvalues above [`WHITENING_FLOOR`].
    pub rank: usize,
    /// Smallest retained Gram eigenvalue.
    pub min_retained: f64,
    /// Set when a retained Gram eigenvalue is below [`CONDITION_FLOOR`].
    pub ill_conditioned: bool,
}

/// Lower bound on the C*-norm of `P` from its compression to the frame.
///
/// The Gram matrix is diagonalized, null directions are dropped, and the
/// compression is whitened to `K = D^{-1/2} U^* M U D^{-1/2}`, the matrix of
/// the compressed operator in an orthonormal basis of the span. Its largest
/// singular value is returned.
pub fn norm_lower_bound(state: &StateFunctional, frame: &GnsFrame, p: &WeylPolynomial) -> Result<NormBound> {
    let m = compress_operator(state, frame, p)?;
    let eig = frame.gram.eigen();
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] > WHITENING_FLOOR).collect();
    let r = keep.len();
    if r == 0 {
        return Ok(NormBound { value: 0.0, rank: 0, min_retained: 0.0, ill_conditioned: false });
    }
    let n = frame.len();
    let w = CMatrix::from_fn(n, r, |i, j| {
        let col = keep[j];
        eig.vectors[(i, col)] * (1.0 / eig.values[col].sqrt())
    });
    let k = w.adjoint().matmul(&m).matmul(&w);
    let kk = HermitianMatrix::new(k.adjoint().matmul(&k), 1e-8)?;
    let value = kk.max_eigenvalue().max(0.0).sqrt();
    let min_retained = keep.iter().map(|&i| eig.values[i]).fold(f64::INFINITY, f64::min);
    Ok(NormBound { value, rank: r, min_retained, ill_conditioned: min_retained < CONDITION_FLOOR })
}
