//! Coefficient fields on the torus and data functions on Euclidean space.
//!
//! Periodic coefficients are trigonometric polynomials per regime (exactly
//! periodic and smooth, so the regularity assumptions hold by construction),
//! or user closures registered by name. Data functions (source, boundary or
//! initial datum, level-set function) are multivariate polynomials or
//! registered closures.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// One trigonometric term `amplitude * cos/sin(2*pi * <harmonics, x / tau>)`.
#[derive(Debug, Clone)]
pub struct TrigTerm {
    pub amplitude: f64,
    /// Integer harmonics per coordinate; the zero vector is allowed (cos
    /// collapses to a constant, sin to zero).
    pub harmonics: Vec<i32>,
    pub phase: Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Cos,
    Sin,
}

/// Trigonometric polynomial for one regime, with angular frequencies
/// precomputed against the periods.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    pub constant: f64,
    pub terms: Vec<TrigTerm>,
    /// omega[t][k] = 2*pi*harmonics[t][k] / tau[k]
    omegas: Vec<Vec<f64>>,
}

impl TrigPoly {
    pub fn new(constant: f64, terms: Vec<TrigTerm>, tau: &[f64]) -> Result<Self> {
        for term in &terms {
            if term.harmonics.len() != tau.len() {
                return Err(Error::Dimension(format!(
                    "trig term has {} harmonics, expected {}",
                    term.harmonics.len(),
                    tau.len()
                )));
            }
        }
        let omegas = terms
            .iter()
            .map(|t| {
                t.harmonics
                    .iter()
                    .zip(tau)
                    .map(|(&k, &p)| TAU * k as f64 / p)
                    .collect()
            })
            .collect();
        Ok(Self { constant, terms, omegas })
    }

    pub fn constant(value: f64, _d: usize) -> Self {
        Self { constant: value, terms: Vec::new(), omegas: Vec::new() }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = self.constant;
        for (term, om) in self.terms.iter().zip(&self.omegas) {
            let mut angle = 0.0;
            for (w, xi) in om.iter().zip(x) {
                angle += w * xi;
            }
            acc += term.amplitude
                * match term.phase {
                    Phase::Cos => angle.cos(),
                    Phase::Sin => angle.sin(),
                };
        }
        acc
    }

    /// Largest |harmonic| appearing in dimension `k` (0 when none).
    pub fn max_harmonic(&self, k: usize) -> i32 {
        self.terms.iter().map(|t| t.harmonics[k].abs()).max().unwrap_or(0)
    }
}

/// Scalar periodic coefficient: one evaluator per regime.
#[derive(Clone)]
pub enum ScalarField {
    Trig(Vec<TrigPoly>),
    Custom {
        name: String,
        f: Arc<dyn Fn(&[f64], usize) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Trig(polys) => f.debug_tuple("Trig").field(&polys.len()).finish(),
            ScalarField::Custom { name, .. } => f.debug_tuple("Custom").field(name).finish(),
        }
    }
}

impl ScalarField {
    #[inline]
    pub fn eval(&self, x: &[f64], regime: usize) -> f64 {
        match self {
            ScalarField::Trig(polys) => polys[regime].eval(x),
            ScalarField::Custom { f, .. } => f(x, regime),
        }
    }

    pub fn zero(d: usize, n: usize) -> Self {
        ScalarField::Trig(vec![TrigPoly::constant(0.0, d); n])
    }

    pub fn constant(v: f64, d: usize, n: usize) -> Self {
        ScalarField::Trig(vec![TrigPoly::constant(v, d); n])
    }

    pub fn max_harmonic(&self, k: usize) -> Option<i32> {
        match self {
            ScalarField::Trig(polys) => polys.iter().map(|p| p.max_harmonic(k)).max(),
            ScalarField::Custom { .. } => None,
        }
    }
}

/// Matrix-valued periodic coefficient stored row-major; vectors are `rows x 1`
/// and scalars `1 x 1`.
#[derive(Debug, Clone)]
pub struct CoeffField {
    pub rows: usize,
    pub cols: usize,
    comps: Vec<ScalarField>,
}

impl CoeffField {
    pub fn new(rows: usize, cols: usize, comps: Vec<ScalarField>) -> Result<Self> {
        if comps.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "coefficient field needs {} components, got {}",
                rows * cols,
                comps.len()
            )));
        }
        Ok(Self { rows, cols, comps })
    }

    pub fn zero(rows: usize, cols: usize, d: usize, n: usize) -> Self {
        Self { rows, cols, comps: vec![ScalarField::zero(d, n); rows * cols] }
    }

    pub fn component(&self, r: usize, c: usize) -> &ScalarField {
        &self.comps[r * self.cols + c]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    /// Evaluate all components into `out` (row-major, length rows*cols).
    #[inline]
    pub fn eval_into(&self, x: &[f64], regime: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.comps.len());
        for (o, c) in out.iter_mut().zip(&self.comps) {
            *o = c.eval(x, regime);
        }
    }

    pub fn eval_vec(&self, x: &[f64], regime: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.comps.len()];
        self.eval_into(x, regime, &mut out);
        out
    }
}

/// Monomial `coef * prod_k x_k^powers[k]`.
#[derive(Debug, Clone)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// Function on Euclidean space (not periodic): boundary/initial data, source
/// term and level-set function.
#[derive(Clone)]
pub enum SpaceFn {
    Const(f64),
    Poly(Vec<Monomial>),
    Custom {
        name: String,
        f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for SpaceFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceFn::Const(c) => f.debug_tuple("Const").field(c).finish(),
            SpaceFn::Poly(ms) => f.debug_tuple("Poly").field(&ms.len()).finish(),
            SpaceFn::Custom { name, .. } => f.debug_tuple("Custom").field(name).finish(),
        }
    }
}

impl SpaceFn {
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            SpaceFn::Const(c) => *c,
            SpaceFn::Poly(monomials) => {
                let mut acc = 0.0;
                for m in monomials {
                    let mut v = m.coef;
                    for (&p, &xi) in m.powers.iter().zip(x) {
                        v *= xi.powi(p as i32);
                    }
                    acc += v;
                }
                acc
            }
            SpaceFn::Custom { f, .. } => f(x),
        }
    }

    /// Central-difference gradient; used for level-set normals.
    pub fn grad(&self, x: &[f64], out: &mut [f64]) {
        let h = 1e-6;
        let mut xp = x.to_vec();
        for k in 0..x.len() {
            xp[k] = x[k] + h;
            let up = self.eval(&xp);
            xp[k] = x[k] - h;
            let um = self.eval(&xp);
            xp[k] = x[k];
            out[k] = (up - um) / (2.0 * h);
        }
    }
}

type PeriodicHook = Arc<dyn Fn(&[f64], usize) -> f64 + Send + Sync>;
type SpaceHook = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Registration hook for user-supplied coefficient code referenced by name
/// from configuration files.
#[derive(Default, Clone)]
pub struct FieldRegistry {
    periodic: HashMap<String, PeriodicHook>,
    space: HashMap<String, SpaceHook>,
}

impl FieldRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_periodic(
        &mut self,
        name: &str,
        f: impl Fn(&[f64], usize) -> f64 + Send + Sync + 'static,
    ) {
        self.periodic.insert(name.to_string(), Arc::new(f));
    }

    pub fn register_space(&mut self, name: &str, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) {
        self.space.insert(name.to_string(), Arc::new(f));
    }

    pub fn periodic(&self, name: &str) -> Result<ScalarField> {
        self.periodic
            .get(name)
            .map(|f| ScalarField::Custom { name: name.to_string(), f: f.clone() })
            .ok_or_else(|| Error::Config(format!("no registered periodic field named '{name}'")))
    }

    pub fn space(&self, name: &str) -> Result<SpaceFn> {
        self.space
            .get(name)
            .map(|f| SpaceFn::Custom { name: name.to_string(), f: f.clone() })
            .ok_or_else(|| Error::Config(format!("no registered space function named '{name}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trig_poly_evaluates_sin() {
        let p = TrigPoly::new(
            0.5,
            vec![TrigTerm { amplitude: 2.0, harmonics: vec![1], phase: Phase::Sin }],
            &[1.0],
        )
        .unwrap();
        assert_relative_eq!(p.eval(&[0.25]), 0.5 + 2.0, max_relative = 1e-12);
        assert_relative_eq!(p.eval(&[0.0]), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn trig_poly_respects_periods() {
        let p = TrigPoly::new(
            0.0,
            vec![TrigTerm { amplitude: 1.0, harmonics: vec![2, 1], phase: Phase::Cos }],
            &[1.0, 2.0],
        )
        .unwrap();
        let a = p.eval(&[0.3, 0.7]);
        let b = p.eval(&[1.3, 2.7]);
        assert_relative_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn poly_eval_and_grad() {
        // x^2 - 1 in one dimension
        let f = SpaceFn::Poly(vec![
            Monomial { coef: 1.0, powers: vec![2] },
            Monomial { coef: -1.0, powers: vec![0] },
        ]);
        assert_relative_eq!(f.eval(&[2.0]), 3.0, max_relative = 1e-12);
        let mut g = [0.0];
        f.grad(&[1.0], &mut g);
        assert_relative_eq!(g[0], 2.0, epsilon = 1e-5);
    }

    #[test]
    fn registry_lookup_and_missing() {
        let mut reg = FieldRegistry::new();
        reg.register_periodic("wobble", |x, i| x[0] + i as f64);
        let f = reg.periodic("wobble").unwrap();
        assert_relative_eq!(f.eval(&[0.5], 2), 2.5, max_relative = 1e-12);
        assert!(reg.periodic("missing").is_err());
        assert!(reg.space("missing").is_err());
    }
}
