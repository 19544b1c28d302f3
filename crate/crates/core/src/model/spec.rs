//! The problem data model: dimensions, periodic coefficients, switching
//! generator, optional level-set domain and data functions.

use crate::model::field::{CoeffField, SpaceFn};
use crate::{Error, Result};

/// Bounded open set `{x : d_func(x) < 0}` with a floor on the boundary
/// gradient, used for exit detection in the elliptic problem.
#[derive(Debug, Clone)]
pub struct LevelSetDomain {
    pub d_func: SpaceFn,
    /// Lower bound for |grad d_func| on the boundary.
    pub delta: f64,
    /// Axis-aligned box `[lo, hi]` containing the closure of the domain.
    pub bbox_lo: Vec<f64>,
    pub bbox_hi: Vec<f64>,
}

impl LevelSetDomain {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.d_func.eval(x) < 0.0
    }
}

/// Declared polynomial growth bound `|f| + |g| <= K (1 + |x|^kappa)` for the
/// parabolic problem.
#[derive(Debug, Clone, Copy)]
pub struct GrowthBound {
    pub k_const: f64,
    pub kappa: f64,
}

/// Full description of one homogenization problem.
///
/// The drift seen by every consumer is `b - b_shift`; the shift starts at
/// zero and is set by the centering stage when the stationary average of the
/// drift must vanish.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    /// State dimension of the continuous component.
    pub d: usize,
    /// Driving Brownian dimension (columns of sigma).
    pub m: usize,
    /// Number of regimes.
    pub n: usize,
    /// Periods per coordinate, strictly positive.
    pub tau: Vec<f64>,
    /// Fast drift, d x 1.
    pub drift_b: CoeffField,
    /// Slow drift, d x 1.
    pub drift_c: CoeffField,
    /// Diffusion coefficient, d x m.
    pub sigma: CoeffField,
    /// Zeroth-order (killing) coefficient, 1 x 1.
    pub killing_e: CoeffField,
    /// Switching generator, n x n row-major. For n = 1 this is forced to 0.
    pub q_matrix: Vec<f64>,
    /// Present for elliptic problems only.
    pub domain: Option<LevelSetDomain>,
    pub source_f: SpaceFn,
    pub boundary_g: SpaceFn,
    pub growth: Option<GrowthBound>,
    /// Constant subtracted from the fast drift (centering); zero by default.
    pub b_shift: Vec<f64>,
}

impl ProblemSpec {
    /// Structural construction checks: shapes and positivity of the periods.
    /// Semantic conditions (generator sign pattern, irreducibility,
    /// ellipticity, periodicity) are checked by the validator, which records
    /// failures instead of refusing construction.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d: usize,
        m: usize,
        n: usize,
        tau: Vec<f64>,
        drift_b: CoeffField,
        drift_c: CoeffField,
        sigma: CoeffField,
        killing_e: CoeffField,
        q_matrix: Vec<f64>,
        domain: Option<LevelSetDomain>,
        source_f: SpaceFn,
        boundary_g: SpaceFn,
        growth: Option<GrowthBound>,
    ) -> Result<Self> {
        if d == 0 || m == 0 || n == 0 {
            return Err(Error::Dimension("d, m, n must be positive".into()));
        }
        if tau.len() != d {
            return Err(Error::Dimension(format!("tau has {} entries, expected {}", tau.len(), d)));
        }
        if tau.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(Error::Dimension("all periods must be strictly positive".into()));
        }
        for (name, field, rows, cols) in [
            ("drift_b", &drift_b, d, 1),
            ("drift_c", &drift_c, d, 1),
            ("sigma", &sigma, d, m),
            ("killing_e", &killing_e, 1, 1),
        ] {
            if field.rows != rows || field.cols != cols {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {rows}x{cols}",
                    field.rows, field.cols
                )));
            }
        }
        // Convention: a single regime means no switching, whatever was given.
        let q_matrix = if n == 1 {
            vec![0.0]
        } else {
            if q_matrix.len() != n * n {
                return Err(Error::Dimension(format!(
                    "q_matrix has {} entries, expected {}",
                    q_matrix.len(),
                    n * n
                )));
            }
            q_matrix
        };
        if let Some(dom) = &domain {
            if dom.bbox_lo.len() != d || dom.bbox_hi.len() != d {
                return Err(Error::Dimension("domain bbox dimension mismatch".into()));
            }
            if !(dom.delta > 0.0) {
                return Err(Error::Dimension("domain delta must be positive".into()));
            }
        }
        Ok(Self {
            d,
            m,
            n,
            tau,
            drift_b,
            drift_c,
            sigma,
            killing_e,
            q_matrix,
            domain,
            source_f,
            boundary_g,
            growth,
            b_shift: vec![0.0; d],
        })
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q_matrix[i * self.n + j]
    }

    /// Representative of `x` in the fundamental cell, written into `out`.
    #[inline]
    pub fn wrap_into(&self, x: &[f64], out: &mut [f64]) {
        for k in 0..self.d {
            out[k] = wrap_coord(x[k], self.tau[k]);
        }
    }

    /// Fast drift including the centering shift.
    #[inline]
    pub fn eval_b(&self, x_wrapped: &[f64], regime: usize, out: &mut [f64]) {
        self.drift_b.eval_into(x_wrapped, regime, out);
        for (o, s) in out.iter_mut().zip(&self.b_shift) {
            *o -= s;
        }
    }

    #[inline]
    pub fn eval_c(&self, x_wrapped: &[f64], regime: usize, out: &mut [f64]) {
        self.drift_c.eval_into(x_wrapped, regime, out);
    }

    #[inline]
    pub fn eval_sigma(&self, x_wrapped: &[f64], regime: usize, out: &mut [f64]) {
        self.sigma.eval_into(x_wrapped, regime, out);
    }

    #[inline]
    pub fn eval_e(&self, x_wrapped: &[f64], regime: usize) -> f64 {
        self.killing_e.component(0, 0).eval(x_wrapped, regime)
    }

    /// `sigma sigma^T` at a wrapped point, row-major d x d.
    pub fn eval_diffusion_matrix(&self, x_wrapped: &[f64], regime: usize, out: &mut [f64]) {
        let mut sig = vec![0.0; self.d * self.m];
        self.eval_sigma(x_wrapped, regime, &mut sig);
        for r in 0..self.d {
            for c in 0..self.d {
                let mut acc = 0.0;
                for k in 0..self.m {
                    acc += sig[r * self.m + k] * sig[c * self.m + k];
                }
                out[r * self.d + c] = acc;
            }
        }
    }

    /// Copy of the spec with the fast drift shifted by an additional constant.
    pub fn with_extra_shift(&self, extra: &[f64]) -> ProblemSpec {
        let mut out = self.clone();
        for (s, e) in out.b_shift.iter_mut().zip(extra) {
            *s += e;
        }
        out
    }

    pub fn is_elliptic(&self) -> bool {
        self.domain.is_some()
    }
}

/// Unique representative of `x` modulo the period lattice, in `[0, tau)`.
#[inline]
pub fn wrap_coord(x: f64, tau: f64) -> f64 {
    let r = x.rem_euclid(tau);
    // rem_euclid may return tau itself when x is a tiny negative number.
    if r >= tau {
        r - tau
    } else {
        r
    }
}

/// Torus projection of a point, allocating variant of [`ProblemSpec::wrap_into`].
pub fn wrap_torus(x: &[f64], tau: &[f64]) -> Vec<f64> {
    x.iter().zip(tau).map(|(&xi, &t)| wrap_coord(xi, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wrap_identity_case() {
        assert_eq!(wrap_torus(&[0.0], &[1.0]), vec![0.0]);
    }

    #[test]
    fn wrap_lattice_shift() {
        let w = wrap_torus(&[2.3], &[1.0]);
        assert_relative_eq!(w[0], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn wrap_negative_and_multi_period() {
        // Hand computation: -0.25 mod 1 = 0.75, 3.5 mod 2 = 1.5.
        let w = wrap_torus(&[-0.25, 3.5], &[1.0, 2.0]);
        assert_relative_eq!(w[0], 0.75, epsilon = 1e-12);
        assert_relative_eq!(w[1], 1.5, epsilon = 1e-12);
    }

    #[test]
    fn wrap_is_idempotent_and_in_cell() {
        let tau = [1.0, 2.0, 0.5];
        let x = [-17.3, 123.456, 0.49999];
        let w = wrap_torus(&x, &tau);
        let ww = wrap_torus(&w, &tau);
        for k in 0..3 {
            assert!(w[k] >= 0.0 && w[k] < tau[k]);
            assert_eq!(w[k], ww[k]);
        }
    }
}
