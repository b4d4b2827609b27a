//! Bell operators in the Weyl algebra and lower bounds on the maximal Bell
//! correlation of a state.
//!
//! A Bell operator is `R = (A1 (B1 + B2) + A2 (B1 - B2)) / 2` with self-adjoint
//! contractions `A_i` on the first factor and `B_j` on the second. The
//! contraction property is certified with the one-norm (`sum |c_k|`), which
//! bounds the C*-norm from above, so every value produced here is a genuine
//! lower bound on the supremum of `omega(R)`. The bound `|omega(R)| <= sqrt 2`
//! holds for every admissible candidate.

use alloc::string::ToString;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::cmp::Ordering;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::states::{eval_point, eval_poly, manifold_phase, StateFunctional, StateKind};
use crate::weyl::{rational_to_f64, PhasePoint, Rational, WeylPolynomial, DEFAULT_TERM_CAP};
use crate::{Error, Result, C64};

pub const SELF_ADJOINT_TOL: f64 = 1e-10;
pub const CONTRACTION_TOL: f64 = 1e-12;
/// Slack allowed above `sqrt 2` before a value counts as a violation.
pub const BOUND_TOL: f64 = 1e-9;
pub const IMAG_TOL: f64 = 1e-10;

/// Four local observables: `a1`, `a2` on the first factor and `b1`, `b2` on
/// the second, each a polynomial over `R^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BellCandidate {
    pub a1: WeylPolynomial,
    pub a2: WeylPolynomial,
    pub b1: WeylPolynomial,
    pub b2: WeylPolynomial,
}

impl BellCandidate {
    pub fn new(a1: WeylPolynomial, a2: WeylPolynomial, b1: WeylPolynomial, b2: WeylPolynomial) -> Self {
        Self { a1, a2, b1, b2 }
    }

    /// All four observables equal to the identity.
    pub fn identity() -> Self {
        let id = WeylPolynomial::identity(2).unwrap();
        Self::new(id.clone(), id.clone(), id.clone(), id)
    }

    pub fn components(&self) -> [&WeylPolynomial; 4] {
        [&self.a1, &self.a2, &self.b1, &self.b2]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in ["A1", "A2", "B1", "B2"].iter().zip(self.components()) {
            if p.dim() != 2 {
                return Err(Error::InvalidCandidate(format!("{name} is not a polynomial over R^2")));
            }
            if !p.is_self_adjoint(SELF_ADJOINT_TOL) {
                return Err(Error::InvalidCandidate(format!("{name} is not self-adjoint")));
            }
            let n = p.one_norm();
            if n > 1.0 + CONTRACTION_TOL {
                return Err(Error::InvalidCandidate(format!("{name} has one-norm {n} > 1")));
            }
        }
        Ok(())
    }

    pub fn term_count(&self) -> usize {
        self.components().iter().map(|p| p.len()).sum()
    }

    /// Support points of each component, in canonical order.
    pub fn supports(&self) -> [Vec<PhasePoint>; 4] {
        self.components().map(|p| p.points().cloned().collect())
    }
}

/// Assembles `R` without checking the candidate; zero components are fine.
pub fn assemble_bell_operator(c: &BellCandidate) -> Result<WeylPolynomial> {
    let a1 = c.a1.tensor_embed(1)?;
    let a2 = c.a2.tensor_embed(1)?;
    let b1 = c.b1.tensor_embed(2)?;
    let b2 = c.b2.tensor_embed(2)?;
    let r = a1.multiply(&b1.add(&b2)?)?.add(&a2.multiply(&b1.sub(&b2)?)?)?;
    Ok(r.scale(C64::new(0.5, 0.0)))
}

/// The Bell operator of a validated candidate.
pub fn bell_operator(c: &BellCandidate) -> Result<WeylPolynomial> {
    c.validate()?;
    assemble_bell_operator(c)
}

/// `Re omega(R)`; fails if the imaginary part exceeds [`IMAG_TOL`].
pub fn bell_value(state: &StateFunctional, c: &BellCandidate) -> Result<f64> {
    let r = bell_operator(c)?;
    let v = eval_poly(state, &r)?;
    if v.im.abs() > IMAG_TOL {
        return Err(Error::NonReal(v.im));
    }
    Ok(v.re)
}

fn point2(a: Rational, b: Rational) -> PhasePoint {
    PhasePoint::new(vec![a, b]).unwrap()
}

/// `(e^{i t} W(x) + e^{-i t} W(-x)) / 2`.
fn cosine_observable(x: PhasePoint, angle: f64) -> Result<WeylPolynomial> {
    let e = C64::from_polar(0.5, angle);
    let minus = -&x;
    WeylPolynomial::from_terms(2, [(x, e), (minus, e.conj())])
}

/// The two-point family
/// `A_i = (e^{i alpha_i} W(a,b) + h.c.) / 2`,
/// `B_j = (e^{i beta_j} W(-a,b) + h.c.) / 2`,
/// with `angles = [alpha_1, alpha_2, beta_1, beta_2]`.
pub fn monomial_family(a: &Rational, b: &Rational, angles: [f64; 4]) -> Result<BellCandidate> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let x = point2(a.clone(), b.clone());
    let y = point2(-a.clone(), b.clone());
    Ok(BellCandidate::new(
        cosine_observable(x.clone(), angles[0])?,
        cosine_observable(x, angles[1])?,
        cosine_observable(y.clone(), angles[2])?,
        cosine_observable(y, angles[3])?,
    ))
}

/// Closed form for the Bell value of [`monomial_family`] in the EPR state.
///
/// Only the products `W(a,b) (x) W(-a,b)` and their adjoints survive the
/// state, so each correlator `omega(A_i B_j)` is `cos(phi_ij) / 2` with
/// `phi_ij = alpha_i + beta_j + a lambda + b mu`, and the Bell value is
/// `(cos phi_11 + cos phi_12 + cos phi_21 - cos phi_22) / 4`.
pub fn monomial_family_value(a: &Rational, b: &Rational, angles: [f64; 4], state: &StateFunctional) -> Result<f64> {
    let StateKind::Epr { lambda, mu } = state.kind() else {
        return Err(Error::NotEpr);
    };
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let shift = rational_to_f64(a) * lambda + rational_to_f64(b) * mu;
    let phi = |i: usize, j: usize| angles[i] + angles[2 + j] + shift;
    Ok(0.25 * (phi(0, 0).cos() + phi(0, 1).cos() + phi(1, 0).cos() - phi(1, 1).cos()))
}

/// Angles at which [`monomial_family_value`] reaches `sqrt 2 / 2`.
pub fn optimal_family_angles(a: &Rational, b: &Rational, state: &StateFunctional) -> Result<[f64; 4]> {
    let StateKind::Epr { lambda, mu } = state.kind() else {
        return Err(Error::NotEpr);
    };
    let shift = rational_to_f64(a) * lambda + rational_to_f64(b) * mu;
    Ok([0.0, FRAC_PI_2, -FRAC_PI_4 - shift, FRAC_PI_4 - shift])
}

/// Analytic maximum of the monomial family.
pub const MONOMIAL_FAMILY_MAX: f64 = SQRT_2 / 2.0;

/// Search configuration for [`optimize_bell`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Support sets for `A1, A2, B1, B2`; each closed under negation.
    pub supports: [Vec<PhasePoint>; 4],
    pub restarts: usize,
    /// Maximum number of coordinate sweeps per restart.
    pub max_iters: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub step_decay: f64,
    pub step_floor: f64,
    pub term_cap: usize,
}

impl SearchConfig {
    pub fn new(supports: [Vec<PhasePoint>; 4]) -> Self {
        Self {
            supports,
            restarts: 8,
            max_iters: 5000,
            seed: 0,
            initial_step: 0.5,
            step_decay: 0.5,
            step_floor: 1e-7,
            term_cap: DEFAULT_TERM_CAP,
        }
    }

    /// Supports `{(a,b), (-a,-b)}` for the `A` slots and `{(-a,b), (a,-b)}`
    /// for the `B` slots.
    pub fn monomial_family(a: &Rational, b: &Rational) -> Self {
        let x = point2(a.clone(), b.clone());
        let y = point2(-a.clone(), b.clone());
        let sx = vec![x.clone(), -&x];
        let sy = vec![y.clone(), -&y];
        Self::new([sx.clone(), sx, sy.clone(), sy])
    }

    /// Every slot supported on the origin only.
    pub fn identity_only() -> Self {
        let z = vec![PhasePoint::zero(2).unwrap()];
        Self::new([z.clone(), z.clone(), z.clone(), z])
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if !(self.initial_step > 0.0) || !(self.step_floor > 0.0) {
            return bad("steps must be positive");
        }
        if !(self.step_decay > 0.0 && self.step_decay < 1.0) {
            return bad("step decay must lie in (0, 1)");
        }
        for (i, s) in self.supports.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidConfig(format!("support {i} is empty")));
            }
            let mut sorted: Vec<&PhasePoint> = s.iter().collect();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != s.len() {
                return Err(Error::InvalidConfig(format!("support {i} has duplicate points")));
            }
            for x in s {
                if x.dim() != 2 {
                    return Err(Error::InvalidConfig(format!("support {i} has a point of dimension {}", x.dim())));
                }
                if !s.contains(&-x) {
                    return Err(Error::InvalidConfig(format!("support {i} is not closed under negation at {x}")));
                }
            }
        }
        Ok(())
    }
}

/// Layout of one slot: an optional real coefficient on `W(0)` and a complex
/// coefficient `z` per pair `{x, -x}`, with `z` on `x` and `conj(z)` on `-x`.
#[derive(Clone, Debug)]
struct SlotLayout {
    has_zero: bool,
    reps: Vec<PhasePoint>,
    /// Support listed as `[0?] ++ [x_1, -x_1, x_2, -x_2, ...]`.
    points: Vec<PhasePoint>,
}

impl SlotLayout {
    fn new(support: &[PhasePoint]) -> Self {
        let has_zero = support.iter().any(PhasePoint::is_zero);
        let mut reps: Vec<PhasePoint> = support
            .iter()
            .filter(|x| !x.is_zero() && **x > -*x)
            .cloned()
            .collect();
        reps.sort();
        let mut points = Vec::new();
        if has_zero {
            points.push(PhasePoint::zero(2).unwrap());
        }
        for r in &reps {
            points.push(r.clone());
            points.push(-r);
        }
        Self { has_zero, reps, points }
    }

    fn n_params(&self) -> usize {
        usize::from(self.has_zero) + 2 * self.reps.len()
    }

    /// Coefficients on `self.points`, scaled to one-norm exactly one
    /// (or all zero).
    fn coefficients(&self, params: &[f64]) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.points.len());
        let mut k = 0;
        if self.has_zero {
            out.push(C64::new(params[0], 0.0));
            k = 1;
        }
        for _ in &self.reps {
            let z = C64::new(params[k], params[k + 1]);
            out.push(z);
            out.push(z.conj());
            k += 2;
        }
        let norm: f64 = out.iter().map(|c| c.norm()).sum();
        if norm > 0.0 {
            out.iter_mut().for_each(|c| *c /= norm);
        }
        out
    }

    fn polynomial(&self, params: &[f64]) -> Result<WeylPolynomial> {
        let coefs = self.coefficients(params);
        let p = WeylPolynomial::from_terms(2, self.points.iter().cloned().zip(coefs))?;
        // guard against rounding pushing the one-norm past 1
        let n = p.one_norm();
        if n > 1.0 {
            Ok(p.scale(C64::new(1.0 / n, 0.0)))
        } else {
            Ok(p)
        }
    }
}

/// One completed restart of the coordinate search.
#[derive(Clone, Debug)]
pub struct RestartOutcome {
    pub restart: usize,
    pub candidate: BellCandidate,
    /// Objective value from the bilinear fast path.
    pub value: f64,
    /// Largest objective value evaluated anywhere during the restart.
    pub max_seen: f64,
    /// `(sweep, best value)` after every sweep.
    pub trace: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: BellCandidate,
    /// Certified value, `bell_value(state, best)`.
    pub value: f64,
    pub restart: usize,
    pub max_seen: f64,
    pub trace: Vec<(usize, f64)>,
}

/// Precomputed data shared by all restarts of one search.
#[derive(Clone, Debug)]
pub struct SearchProblem {
    state: StateFunctional,
    cfg: SearchConfig,
    layouts: [SlotLayout; 4],
    /// `tables[i][j]` holds `omega(W(x) (x) W(y))` for `x` in slot `A_{i+1}`
    /// and `y` in slot `B_{j+1}`, row-major.
    tables: [[Vec<C64>; 2]; 2],
}

impl SearchProblem {
    pub fn new(state: &StateFunctional, cfg: &SearchConfig) -> Result<Self> {
        cfg.validate()?;
        let layouts = [
            SlotLayout::new(&cfg.supports[0]),
            SlotLayout::new(&cfg.supports[1]),
            SlotLayout::new(&cfg.supports[2]),
            SlotLayout::new(&cfg.supports[3]),
        ];
        let la = layouts[0].points.len() + layouts[1].points.len();
        let mut bset: Vec<&PhasePoint> = layouts[2].points.iter().chain(&layouts[3].points).collect();
        bset.sort();
        bset.dedup();
        let estimate = la * bset.len();
        if estimate > cfg.term_cap {
            return Err(Error::TermCap { terms: estimate, limit: cfg.term_cap });
        }
        let table = |ai: usize, bj: usize| -> Result<Vec<C64>> {
            let mut t = Vec::new();
            for x in &layouts[ai].points {
                for y in &layouts[bj].points {
                    let mut v = x.coords().to_vec();
                    v.extend_from_slice(y.coords());
                    t.push(eval_point(state, &PhasePoint::new(v)?)?);
                }
            }
            Ok(t)
        };
        let tables = [[table(0, 2)?, table(0, 3)?], [table(1, 2)?, table(1, 3)?]];
        Ok(Self { state: *state, cfg: cfg.clone(), layouts, tables })
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    fn offsets(&self) -> [usize; 5] {
        let mut o = [0; 5];
        for i in 0..4 {
            o[i + 1] = o[i] + self.layouts[i].n_params();
        }
        o
    }

    fn objective(&self, params: &[f64]) -> f64 {
        let o = self.offsets();
        let coefs: [Vec<C64>; 4] = core::array::from_fn(|i| self.layouts[i].coefficients(&params[o[i]..o[i + 1]]));
        let corr = |i: usize, j: usize| -> C64 {
            let t = &self.tables[i][j];
            let b = &coefs[2 + j];
            let mut acc = C64::new(0.0, 0.0);
            for (r, a) in coefs[i].iter().enumerate() {
                let row = &t[r * b.len()..(r + 1) * b.len()];
                let inner: C64 = row.iter().zip(b).map(|(w, c)| w * c).sum();
                acc += a * inner;
            }
            acc
        };
        0.5 * (corr(0, 0) + corr(0, 1) + corr(1, 0) - corr(1, 1)).re
    }

    fn candidate(&self, params: &[f64]) -> Result<BellCandidate> {
        let o = self.offsets();
        let p = |i: usize| self.layouts[i].polynomial(&params[o[i]..o[i + 1]]);
        Ok(BellCandidate::new(p(0)?, p(1)?, p(2)?, p(3)?))
    }

    /// Runs restart `index`: random start, then coordinate search with
    /// geometric step decay.
    pub fn run_restart(&self, index: usize) -> Result<RestartOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(index as u64);
        let n = self.offsets()[4];
        let mut params: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut best = self.objective(&params);
        let mut max_seen = best;
        let mut step = self.cfg.initial_step;
        let mut trace = vec![(0, best)];
        for sweep in 1..=self.cfg.max_iters {
            let mut improved = false;
            for k in 0..n {
                for dir in [1.0, -1.0] {
                    let old = params[k];
                    params[k] = old + dir * step;
                    let v = self.objective(&params);
                    max_seen = max_seen.max(v);
                    if v > best {
                        best = v;
                        improved = true;
                        break;
                    }
                    params[k] = old;
                }
            }
            trace.push((sweep, best));
            if !improved {
                step *= self.cfg.step_decay;
                if step < self.cfg.step_floor {
                    break;
                }
            }
        }
        Ok(RestartOutcome { restart: index, candidate: self.candidate(&params)?, value: best, max_seen, trace })
    }

    /// Picks the winner and certifies it through the full engine.
    pub fn finish(&self, outcomes: Vec<RestartOutcome>) -> Result<SearchResult> {
        let max_seen = outcomes.iter().map(|o| o.max_seen).fold(f64::NEG_INFINITY, f64::max);
        let win = merge_restarts(outcomes).ok_or_else(|| Error::InvalidConfig("no restarts".to_string()))?;
        let value = bell_value(&self.state, &win.candidate)?;
        if (value - win.value).abs() > 1e-10 {
            return Err(Error::InvalidCandidate(format!(
                "engine value {value} disagrees with search value {}",
                win.value
            )));
        }
        Ok(SearchResult {
            best: win.candidate,
            value,
            restart: win.restart,
            max_seen: max_seen.max(value),
            trace: win.trace,
        })
    }
}

fn tie_order(a: &RestartOutcome, b: &RestartOutcome) -> Ordering {
    a.candidate
        .term_count()
        .cmp(&b.candidate.term_count())
        .then_with(|| a.candidate.supports().cmp(&b.candidate.supports()))
        .then_with(|| a.restart.cmp(&b.restart))
}

/// Best value wins; values within `1e-12` tie and are ordered by fewer terms,
/// then smaller support, then restart index. The result does not depend on
/// the order of `outcomes`.
pub fn merge_restarts(mut outcomes: Vec<RestartOutcome>) -> Option<RestartOutcome> {
    outcomes.sort_by_key(|o| o.restart);
    let top = outcomes.iter().map(|o| o.value).fold(f64::NEG_INFINITY, f64::max);
    outcomes
        .into_iter()
        .filter(|o| top - o.value <= 1e-12)
        .min_by(tie_order)
}

/// Sequential lower-bound search for `sup omega(R)` over the configured
/// supports.
pub fn optimize_bell(state: &StateFunctional, cfg: &SearchConfig) -> Result<SearchResult> {
    let problem = SearchProblem::new(state, cfg)?;
    let outcomes = (0..cfg.restarts)
        .map(|i| problem.run_restart(i))
        .collect::<Result<Vec<_>>>()?;
    problem.finish(outcomes)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylDouble {
    /// `(a, -b)`: the second-factor point of the double.
    pub partner: PhasePoint,
    /// `exp(i (a lambda + b mu))`.
    pub phase: C64,
    /// `omega((U - U')^* (U - U'))` from the full expansion.
    pub deviation: f64,
    /// `2 - 2 Re omega(U^* U')`.
    pub deviation_formula: f64,
    /// `omega((A - A')^2)` for `A = U + U^*`, `A' = U' + U'^*`.
    pub self_adjoint_deviation: f64,
}

/// `Re omega((U - V)^* (U - V))`.
pub fn double_deviation(state: &StateFunctional, u: &WeylPolynomial, v: &WeylPolynomial) -> Result<f64> {
    let d = u.sub(v)?;
    Ok(eval_poly(state, &d.adjoint().multiply(&d)?)?.re)
}

/// The perfectly correlated partner of `U = W(a,b) (x) I`:
/// `U' = exp(i (a lambda + b mu)) I (x) W(a,-b)`.
pub fn weyl_double(a: &Rational, b: &Rational, state: &StateFunctional) -> Result<WeylDouble> {
    let StateKind::Epr { lambda, mu } = state.kind() else {
        return Err(Error::NotEpr);
    };
    let zero = Rational::zero();
    let partner = point2(a.clone(), -b.clone());
    let phase = manifold_phase(lambda, mu, a, b);
    let u = WeylPolynomial::monomial(PhasePoint::new(vec![a.clone(), b.clone(), zero.clone(), zero.clone()])?, C64::new(1.0, 0.0))?;
    let up = WeylPolynomial::monomial(PhasePoint::new(vec![zero.clone(), zero, a.clone(), -b.clone()])?, phase)?;
    let deviation = double_deviation(state, &u, &up)?;
    let overlap = eval_poly(state, &u.adjoint().multiply(&up)?)?;
    let deviation_formula = 2.0 - 2.0 * overlap.re;
    let sa = u.add(&u.adjoint())?;
    let sap = up.add(&up.adjoint())?;
    let d = sa.sub(&sap)?;
    let self_adjoint_deviation = eval_poly(state, &d.multiply(&d)?)?.re;
    Ok(WeylDouble { partner, phase, deviation, deviation_formula, self_adjoint_deviation })
}

/// Upper end of the admissible Bell values.
pub const BELL_BOUND: f64 = SQRT_2;
