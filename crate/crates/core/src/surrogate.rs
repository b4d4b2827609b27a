//! A finite matrix factor with a trace vector.
//!
//! `M_m (x) M_m` acts on `C^m (x) C^m` and `Omega = m^{-1/2} sum_i e_i (x) e_i`
//! is maximally entangled, so `<Omega, (A (x) I) Omega> = tr(A) / m` for every
//! `A`: `Omega` is a cyclic and separating trace vector for the first factor.
//! With `m` even there is a projection `P` of trace one half and a partial
//! isometry `V` with `V V^* = P`, `V^* V = I - P`, and every ingredient of the
//! maximal CHSH construction is available exactly:
//!
//! * `A(theta) = e^{i theta} V + e^{-i theta} V^*` is a self-adjoint unitary;
//! * `<Omega, A(t1) A(t2) Omega> = cos(t1 - t2)`;
//! * `gamma(A) = A^T` on the second factor satisfies `gamma(A) Omega = A Omega`;
//! * with `A1 = A(0)`, `A2 = A(pi/2)`, `B1 = gamma(A(pi/4))`,
//!   `B2 = gamma(A(-pi/4))` the CHSH expectation is `2 cos(pi/4) = sqrt 2`;
//! * every self-adjoint `A` has the perfectly correlated double `gamma(A)`.
//!
//! Vectors of `C^m (x) C^m` are stored as `m x m` coefficient matrices `X`,
//! so that `(A (x) B) X = A X B^T` and the `m^2`-dimensional operators are
//! never formed.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{CMatrix, HermitianMatrix};
use crate::{Error, Result, C64};

/// Tolerance for the structural identities checked at construction.
pub const MODEL_TOL: f64 = 1e-13;

pub const MAX_DIM: usize = 64;

/// Largest dimension accepted by [`cyclic_rank`].
pub const MAX_RANK_DIM: usize = 16;

#[derive(Clone, Debug)]
pub struct MatrixModel {
    m: usize,
    omega: CMatrix,
    p: CMatrix,
    v: CMatrix,
}

impl MatrixModel {
    pub fn dim(&self) -> usize {
        self.m
    }

    /// `Omega` as an `m x m` coefficient matrix.
    pub fn omega(&self) -> &CMatrix {
        &self.omega
    }

    pub fn projection(&self) -> &CMatrix {
        &self.p
    }

    pub fn partial_isometry(&self) -> &CMatrix {
        &self.v
    }
}

/// Builds the model for an even `m` in `2..=64` and verifies its invariants.
pub fn build_model(m: usize) -> Result<MatrixModel> {
    if m < 2 || m > MAX_DIM || m % 2 != 0 {
        return Err(Error::BadModelDimension(m));
    }
    let h = m / 2;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let scale = 1.0 / (m as f64).sqrt();
    let omega = CMatrix::from_fn(m, m, |i, j| if i == j { C64::new(scale, 0.0) } else { zero });
    let p = CMatrix::from_fn(m, m, |i, j| if i == j && i < h { one } else { zero });
    // e_{i+h} -> e_i
    let v = CMatrix::from_fn(m, m, |i, j| if i < h && j == i + h { one } else { zero });
    let model = MatrixModel { m, omega, p, v };
    verify_model(&model)?;
    Ok(model)
}

fn verify_model(model: &MatrixModel) -> Result<()> {
    let m = model.m;
    let id = CMatrix::identity(m);
    let v = &model.v;
    let vs = v.adjoint();
    let checks = [
        v.matmul(&vs).max_abs_diff(&model.p),
        vs.matmul(v).max_abs_diff(&id.sub(&model.p)),
        v.matmul(v).max_abs_diff(&CMatrix::zeros(m, m)),
        vs.matmul(&vs).max_abs_diff(&CMatrix::zeros(m, m)),
        (vector_norm_sqr(&model.omega) - 1.0).abs(),
        (expect_first(model, &model.p).re - 0.5).abs(),
    ];
    let worst = checks.iter().copied().fold(0.0, f64::max);
    if worst > MODEL_TOL {
        return Err(Error::ModelInvariant(worst));
    }
    Ok(())
}

fn vector_norm_sqr(x: &CMatrix) -> f64 {
    x.as_slice().iter().map(|c| c.norm_sqr()).sum()
}

fn inner(x: &CMatrix, y: &CMatrix) -> C64 {
    x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| a.conj() * b).sum()
}

/// `(A (x) B) X` in coefficient form, `A X B^T`.
pub fn apply(model: &MatrixModel, first: Option<&CMatrix>, second: Option<&CMatrix>, x: &CMatrix) -> CMatrix {
    let _ = model;
    let mut out = match first {
        Some(a) => a.matmul(x),
        None => x.clone(),
    };
    if let Some(b) = second {
        out = out.matmul(&b.transpose());
    }
    out
}

/// `<Omega, (A (x) I) Omega>`.
pub fn expect_first(model: &MatrixModel, a: &CMatrix) -> C64 {
    inner(&model.omega, &apply(model, Some(a), None, &model.omega))
}

/// `<Omega, (A (x) B) Omega>`.
pub fn expect_product(model: &MatrixModel, a: &CMatrix, b: &CMatrix) -> C64 {
    inner(&model.omega, &apply(model, Some(a), Some(b), &model.omega))
}

/// `A(theta) = e^{i theta} V + e^{-i theta} V^*`.
pub fn a_theta(model: &MatrixModel, theta: f64) -> CMatrix {
    let e = C64::from_polar(1.0, theta);
    model.v.scale(e).add(&model.v.adjoint().scale(e.conj()))
}

/// The anti-isomorphism onto the commutant, realized as the transpose in the
/// matched basis; the result acts on the second factor.
pub fn gamma(model: &MatrixModel, a: &CMatrix) -> CMatrix {
    let _ = model;
    a.transpose()
}

/// `<Omega, (A(t1) A(t2) (x) I) Omega>`.
pub fn correlation(model: &MatrixModel, theta1: f64, theta2: f64) -> f64 {
    let prod = a_theta(model, theta1).matmul(&a_theta(model, theta2));
    expect_first(model, &prod).re
}

/// `table[i][j] = correlation(model, angles[i], angles[j])`.
///
/// Each `A(theta)` is built once. Since `Omega` is diagonal in coefficient
/// form, `<Omega, (A B (x) I) Omega> = (1/m) sum_k (A B)_kk`, and `A(theta)`
/// has only `m` nonzero entries, so each entry costs `O(m)`.
pub fn correlation_table(model: &MatrixModel, angles: &[f64]) -> Vec<Vec<f64>> {
    let m = model.m;
    let w = model.omega[(0, 0)].norm_sqr();
    let mats: Vec<CMatrix> = angles.iter().map(|&t| a_theta(model, t)).collect();
    let sparse: Vec<Vec<(usize, usize, C64)>> = mats
        .iter()
        .map(|a| {
            let mut nz = Vec::new();
            for i in 0..m {
                for j in 0..m {
                    let v = a[(i, j)];
                    if v.re != 0.0 || v.im != 0.0 {
                        nz.push((i, j, v));
                    }
                }
            }
            nz
        })
        .collect();
    sparse
        .iter()
        .map(|a| {
            mats.iter()
                .map(|b| {
                    let tr: C64 = a.iter().map(|&(i, j, v)| v * b[(j, i)]).sum();
                    (tr * w).re
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ChshReport {
    /// `[A1, A2, B1, B2]` angles; the `B` operators are `gamma(A(theta))`.
    pub angles: [f64; 4],
    pub correlators: [f64; 4],
    pub value: f64,
}

/// `(<A1 B1> + <A1 B2> + <A2 B1> - <A2 B2>) / 2` for first-factor `A_i` and
/// second-factor `B_j`.
pub fn chsh_expectation(model: &MatrixModel, a: [&CMatrix; 2], b: [&CMatrix; 2]) -> ([f64; 4], f64) {
    let e = |i: usize, j: usize| expect_product(model, a[i], b[j]).re;
    let c = [e(0, 0), e(0, 1), e(1, 0), e(1, 1)];
    (c, 0.5 * (c[0] + c[1] + c[2] - c[3]))
}

/// CHSH value of the `A(theta)` family with `B_j = gamma(A(theta_Bj))`.
pub fn chsh_at(model: &MatrixModel, angles: [f64; 4]) -> ChshReport {
    let a1 = a_theta(model, angles[0]);
    let a2 = a_theta(model, angles[1]);
    let b1 = gamma(model, &a_theta(model, angles[2]));
    let b2 = gamma(model, &a_theta(model, angles[3]));
    let (correlators, value) = chsh_expectation(model, [&a1, &a2], [&b1, &b2]);
    ChshReport { angles, correlators, value }
}

pub const OPTIMAL_ANGLES: [f64; 4] = [0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4];

/// CHSH value at `(0, pi/2, pi/4, -pi/4)`, equal to `sqrt 2`.
pub fn chsh_value(model: &MatrixModel) -> ChshReport {
    chsh_at(model, OPTIMAL_ANGLES)
}

#[derive(Clone, Debug)]
pub struct Double {
    pub double: CMatrix,
    pub deviation: f64,
}

/// `|| (A (x) I - I (x) D) Omega ||^2`, which equals
/// `<Omega, (A (x) I - I (x) D)^2 Omega>` for self-adjoint `A` and `D`.
pub fn double_deviation(model: &MatrixModel, a: &CMatrix, d: &CMatrix) -> f64 {
    let x = apply(model, Some(a), None, &model.omega).sub(&apply(model, None, Some(d), &model.omega));
    vector_norm_sqr(&x)
}

/// The double `gamma(A)` of a self-adjoint `A`.
pub fn double_of(model: &MatrixModel, a: &CMatrix) -> Result<Double> {
    if a.rows() != model.m || a.cols() != model.m {
        return Err(Error::DimensionMismatch { expected: model.m, got: a.rows() });
    }
    let dev = a.hermitian_deviation();
    if dev > 1e-12 {
        return Err(Error::NotHermitian(dev));
    }
    let double = gamma(model, a);
    let deviation = double_deviation(model, a, &double);
    Ok(Double { double, deviation })
}

/// Rank of `{(E_ij (x) I) Omega}` over all matrix units; equals `m^2`
/// exactly when `Omega` is cyclic for the first factor.
pub fn cyclic_rank(model: &MatrixModel) -> Result<usize> {
    let m = model.m;
    if m > MAX_RANK_DIM {
        return Err(Error::BadModelDimension(m));
    }
    let mut vecs: Vec<CMatrix> = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let e = CMatrix::from_fn(m, m, |r, c| if r == i && c == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
            vecs.push(apply(model, Some(&e), None, &model.omega));
        }
    }
    let n = vecs.len();
    let g = CMatrix::from_fn(n, n, |r, c| inner(&vecs[r], &vecs[c]));
    let h = HermitianMatrix::new(g, 1e-12)?;
    let ev = h.eigenvalues();
    let top = ev.last().copied().unwrap_or(0.0);
    Ok(ev.iter().filter(|&&l| l > top * 1e-10).count())
}

/// Rank of a projection, read off its trace.
pub fn projection_rank(p: &CMatrix) -> usize {
    p.trace().re.round() as usize
}
