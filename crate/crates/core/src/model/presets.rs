//! Reference problems used throughout the test suite and shipped as JSON
//! fixtures under `fixtures/` in the repository.

use std::f64::consts::PI;

use crate::model::field::{CoeffField, Monomial, Phase, ScalarField, SpaceFn, TrigPoly, TrigTerm};
use crate::model::spec::{LevelSetDomain, ProblemSpec};

fn trig1(constant: f64, terms: Vec<TrigTerm>, tau: &[f64]) -> ScalarField {
    ScalarField::Trig(vec![TrigPoly::new(constant, terms, tau).unwrap()])
}

fn sin_term(amplitude: f64, harmonic: i32) -> TrigTerm {
    TrigTerm { amplitude, harmonics: vec![harmonic], phase: Phase::Sin }
}

fn cos_term(amplitude: f64, harmonic: i32) -> TrigTerm {
    TrigTerm { amplitude, harmonics: vec![harmonic], phase: Phase::Cos }
}

/// Level-set interval (-1, 1): d(x) = x^2 - 1.
fn interval_domain() -> LevelSetDomain {
    LevelSetDomain {
        d_func: SpaceFn::Poly(vec![
            Monomial { coef: 1.0, powers: vec![2] },
            Monomial { coef: -1.0, powers: vec![0] },
        ]),
        delta: 1.0,
        bbox_lo: vec![-1.5],
        bbox_hi: vec![1.5],
    }
}

/// Canonical end-to-end fixture: two regimes on the unit torus with opposed
/// sine drifts, distinct diffusivities, constant slow drift and killing,
/// symmetric switching at unit rate, interval domain, f = 1, g = x^2.
pub fn benchmark() -> ProblemSpec {
    let tau = vec![1.0];
    let b = ScalarField::Trig(vec![
        TrigPoly::new(0.0, vec![sin_term(1.0, 1)], &tau).unwrap(),
        TrigPoly::new(0.0, vec![sin_term(-1.0, 1)], &tau).unwrap(),
    ]);
    let c = ScalarField::Trig(vec![
        TrigPoly::constant(1.0, 1),
        TrigPoly::constant(1.0, 1),
    ]);
    let sigma = ScalarField::Trig(vec![
        TrigPoly::constant(1.0, 1),
        TrigPoly::constant(std::f64::consts::SQRT_2, 1),
    ]);
    let e = ScalarField::Trig(vec![
        TrigPoly::constant(-1.0, 1),
        TrigPoly::constant(-1.0, 1),
    ]);
    ProblemSpec::new(
        1,
        1,
        2,
        tau,
        CoeffField::new(1, 1, vec![b]).unwrap(),
        CoeffField::new(1, 1, vec![c]).unwrap(),
        CoeffField::new(1, 1, vec![sigma]).unwrap(),
        CoeffField::new(1, 1, vec![e]).unwrap(),
        vec![-1.0, 1.0, 1.0, -1.0],
        Some(interval_domain()),
        SpaceFn::Const(1.0),
        SpaceFn::Poly(vec![Monomial { coef: 1.0, powers: vec![2] }]),
        None,
    )
    .unwrap()
}

/// Gradient-drift instance with Gibbs stationary density: d = 1, n = 1,
/// sigma = 1, b = -V' with V = cos(2 pi x)/2, so b(x) = pi sin(2 pi x).
pub fn gibbs() -> ProblemSpec {
    let tau = vec![1.0];
    ProblemSpec::new(
        1,
        1,
        1,
        tau.clone(),
        CoeffField::new(1, 1, vec![trig1(0.0, vec![sin_term(PI, 1)], &tau)]).unwrap(),
        CoeffField::zero(1, 1, 1, 1),
        CoeffField::new(1, 1, vec![ScalarField::constant(1.0, 1, 1)]).unwrap(),
        CoeffField::zero(1, 1, 1, 1),
        vec![0.0],
        None,
        SpaceFn::Const(0.0),
        SpaceFn::Const(0.0),
        None,
    )
    .unwrap()
}

/// x-independent two-regime instance: b = c = 0, sigma(1) = 1, sigma(2) =
/// sqrt(2), switching rates 1 and 3 (stationary regime weights 3/4, 1/4).
pub fn two_regime_flat() -> ProblemSpec {
    let sigma = ScalarField::Trig(vec![
        TrigPoly::constant(1.0, 1),
        TrigPoly::constant(std::f64::consts::SQRT_2, 1),
    ]);
    ProblemSpec::new(
        1,
        1,
        2,
        vec![1.0],
        CoeffField::zero(1, 1, 1, 2),
        CoeffField::zero(1, 1, 1, 2),
        CoeffField::new(1, 1, vec![sigma]).unwrap(),
        CoeffField::zero(1, 1, 1, 2),
        vec![-1.0, 1.0, 3.0, -3.0],
        None,
        SpaceFn::Const(0.0),
        SpaceFn::Const(0.0),
        None,
    )
    .unwrap()
}

/// Plain Brownian motion on the d-torus: b = c = 0, sigma = I, n = 1.
pub fn pure_bm(d: usize) -> ProblemSpec {
    let mut comps = Vec::new();
    for r in 0..d {
        for c in 0..d {
            comps.push(ScalarField::constant(if r == c { 1.0 } else { 0.0 }, d, 1));
        }
    }
    ProblemSpec::new(
        d,
        d,
        1,
        vec![1.0; d],
        CoeffField::zero(d, 1, d, 1),
        CoeffField::zero(d, 1, d, 1),
        CoeffField::new(d, d, comps).unwrap(),
        CoeffField::zero(1, 1, d, 1),
        vec![0.0],
        None,
        SpaceFn::Const(0.0),
        SpaceFn::Const(0.0),
        None,
    )
    .unwrap()
}

/// Constant-coefficient killed elliptic problem with closed-form solution
/// u(x) = cosh(x)/cosh(1) on (-1, 1): half sigma^2 = 1, e = -1, f = 0, g = 1.
pub fn constant_killed_elliptic() -> ProblemSpec {
    ProblemSpec::new(
        1,
        1,
        1,
        vec![1.0],
        CoeffField::zero(1, 1, 1, 1),
        CoeffField::zero(1, 1, 1, 1),
        CoeffField::new(1, 1, vec![ScalarField::constant(std::f64::consts::SQRT_2, 1, 1)])
            .unwrap(),
        CoeffField::new(1, 1, vec![ScalarField::constant(-1.0, 1, 1)]).unwrap(),
        vec![0.0],
        Some(interval_domain()),
        SpaceFn::Const(0.0),
        SpaceFn::Const(1.0),
        None,
    )
    .unwrap()
}

/// Elliptic spec whose killing coefficient e(x) = -cos(4 pi x) changes sign:
/// the killing-bound check must fail with a witness.
pub fn killing_violation() -> ProblemSpec {
    let tau = vec![1.0];
    ProblemSpec::new(
        1,
        1,
        1,
        tau.clone(),
        CoeffField::zero(1, 1, 1, 1),
        CoeffField::zero(1, 1, 1, 1),
        CoeffField::new(1, 1, vec![ScalarField::constant(1.0, 1, 1)]).unwrap(),
        CoeffField::new(1, 1, vec![trig1(0.0, vec![cos_term(-1.0, 2)], &tau)]).unwrap(),
        vec![0.0],
        Some(interval_domain()),
        SpaceFn::Const(0.0),
        SpaceFn::Const(0.0),
        None,
    )
    .unwrap()
}

/// Single-regime sine-drift instance (no slow drift): the classical 1-d cell
/// problem used for corrector cross-validation.
pub fn sine_drift() -> ProblemSpec {
    let tau = vec![1.0];
    ProblemSpec::new(
        1,
        1,
        1,
        tau.clone(),
        CoeffField::new(1, 1, vec![trig1(0.0, vec![sin_term(1.0, 1)], &tau)]).unwrap(),
        CoeffField::zero(1, 1, 1, 1),
        CoeffField::new(1, 1, vec![ScalarField::constant(1.0, 1, 1)]).unwrap(),
        CoeffField::zero(1, 1, 1, 1),
        vec![0.0],
        None,
        SpaceFn::Const(0.0),
        SpaceFn::Const(0.0),
        None,
    )
    .unwrap()
}

/// Like [`sine_drift`] but with unit slow drift; used for drift-convergence
/// checks where the effective drift is strictly below 1.
pub fn sine_drift_with_c() -> ProblemSpec {
    let mut spec = sine_drift();
    spec.drift_c = CoeffField::new(1, 1, vec![ScalarField::constant(1.0, 1, 1)]).unwrap();
    spec
}
