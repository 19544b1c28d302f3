//! Finite-difference discretization of the torus generator
//! `L = (1/2) Tr(sigma sigma^T D^2) + (b + eps c)^T D + Q` on the grid.
//!
//! Second derivatives use central differences; the mixed terms use the
//! seven-point cross stencil with orientation matched to the sign of the
//! off-diagonal diffusion entry. The drift uses central differences wherever
//! the resulting off-diagonals stay nonnegative and falls back to first-order
//! upwinding otherwise, so the matrix keeps the sign pattern of a generator
//! (nonnegative off-diagonals, zero row sums) whenever the mixed terms allow
//! it at all. Violations that survive (strong anisotropy on a coarse grid)
//! abort with the offending stencil.

use serde::{Deserialize, Serialize};

use crate::cell::csr::CsrMatrix;
use crate::cell::grid::TorusGrid;
use crate::model::ProblemSpec;
use crate::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// First-order upwind drift everywhere.
    Upwind,
    /// Second-order central drift everywhere (sign pattern not guaranteed).
    Central,
    /// Central where the sign pattern survives, upwind otherwise.
    Hybrid,
}

#[derive(Debug, Clone, Copy)]
pub struct GeneratorOptions {
    pub scheme: Scheme,
    /// Off-diagonal entries below `-tol_scale * max_abs_entry` abort.
    pub off_diag_tol_scale: f64,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        Self { scheme: Scheme::Hybrid, off_diag_tol_scale: 1e-12 }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    pub grid: TorusGrid,
    pub eps: f64,
    pub scheme: Scheme,
    pub mat: CsrMatrix,
    pub max_abs_row_sum: f64,
    pub min_off_diagonal: f64,
    /// Fraction of drift stencils that could stay central.
    pub central_fraction: f64,
}

/// Coefficient tables on the grid nodes (linear-index order).
#[derive(Debug, Clone)]
pub struct GridFields {
    pub d: usize,
    pub m: usize,
    /// Shifted fast drift, `len x d`.
    pub b: Vec<f64>,
    /// Slow drift, `len x d`.
    pub c: Vec<f64>,
    /// Diffusion matrix `sigma sigma^T`, `len x d x d`.
    pub a: Vec<f64>,
    /// sigma itself, `len x d x m`.
    pub sigma: Vec<f64>,
    /// Killing coefficient, `len`.
    pub e: Vec<f64>,
}

impl GridFields {
    pub fn evaluate(spec: &ProblemSpec, grid: &TorusGrid) -> Self {
        let d = spec.d;
        let m = spec.m;
        let len = grid.len();
        let mut b = vec![0.0; len * d];
        let mut c = vec![0.0; len * d];
        let mut a = vec![0.0; len * d * d];
        let mut sigma = vec![0.0; len * d * m];
        let mut e = vec![0.0; len];
        for node in 0..len {
            let (multi, regime) = grid.decompose(node);
            let x = grid.point(&multi);
            spec.eval_b(&x, regime, &mut b[node * d..(node + 1) * d]);
            spec.eval_c(&x, regime, &mut c[node * d..(node + 1) * d]);
            spec.eval_sigma(&x, regime, &mut sigma[node * d * m..(node + 1) * d * m]);
            spec.eval_diffusion_matrix(&x, regime, &mut a[node * d * d..(node + 1) * d * d]);
            e[node] = spec.eval_e(&x, regime);
        }
        Self { d, m, b, c, a, sigma, e }
    }

    pub fn b_at(&self, node: usize) -> &[f64] {
        &self.b[node * self.d..(node + 1) * self.d]
    }

    pub fn c_at(&self, node: usize) -> &[f64] {
        &self.c[node * self.d..(node + 1) * self.d]
    }

    pub fn a_at(&self, node: usize) -> &[f64] {
        &self.a[node * self.d * self.d..(node + 1) * self.d * self.d]
    }

    pub fn sigma_at(&self, node: usize) -> &[f64] {
        &self.sigma[node * self.d * self.m..(node + 1) * self.d * self.m]
    }
}

/// Check that the grid resolves the declared Fourier content: at least two
/// cells per shortest harmonic wavelength, strictly.
fn check_nyquist(spec: &ProblemSpec, grid: &TorusGrid) -> Result<()> {
    for k in 0..spec.d {
        let mut max_h = 0i32;
        for field in [&spec.drift_b, &spec.drift_c, &spec.sigma, &spec.killing_e] {
            for comp in field.components() {
                if let Some(h) = comp.max_harmonic(k) {
                    max_h = max_h.max(h);
                }
            }
        }
        if grid.cells[k] as i32 <= 2 * max_h {
            return Err(Error::Precondition(format!(
                "grid dimension {k} has {} cells but the coefficients carry harmonic {max_h}; \
                 need more than {} cells",
                grid.cells[k],
                2 * max_h
            )));
        }
    }
    Ok(())
}

pub fn discretize_generator(
    spec: &ProblemSpec,
    grid: &TorusGrid,
    eps: f64,
    opts: GeneratorOptions,
) -> Result<GeneratorMatrix> {
    if spec.d > 2 {
        return Err(Error::Precondition(format!(
            "grid solver supports d in {{1, 2}}, got d = {}",
            spec.d
        )));
    }
    if grid.dim() != spec.d || grid.n_regimes != spec.n || grid.tau != spec.tau {
        return Err(Error::Dimension("grid does not match spec".into()));
    }
    check_nyquist(spec, grid)?;

    let d = spec.d;
    let n = spec.n;
    let len = grid.len();
    let fields = GridFields::evaluate(spec, grid);
    let h: Vec<f64> = (0..d).map(|k| grid.spacing(k)).collect();

    let mut trips: Vec<(usize, usize, f64)> = Vec::with_capacity(len * (2 * d + n + 2));
    let mut central_count = 0usize;
    let mut drift_count = 0usize;

    for node in 0..len {
        let a = fields.a_at(node);
        let b = fields.b_at(node);
        let c = fields.c_at(node);
        let regime = node % n;
        let cell_base = node - regime;

        let mut diag = 0.0;

        // Diffusion, diagonal part, and the face budget available to the
        // drift without breaking the sign pattern.
        let mut face_budget = vec![0.0; d];
        for k in 0..d {
            let coeff = a[k * d + k] / (2.0 * h[k] * h[k]);
            let up = grid.shift(node, k, 1);
            let dn = grid.shift(node, k, -1);
            trips.push((node, up, coeff));
            trips.push((node, dn, coeff));
            diag -= 2.0 * coeff;
            let mut budget = coeff;
            for l in 0..d {
                if l != k {
                    budget -= a[k * d + l].abs() / (2.0 * h[k] * h[l]);
                }
            }
            face_budget[k] = budget;
        }

        // Mixed derivatives: seven-point cross stencil, orientation by sign.
        for k in 0..d {
            for l in (k + 1)..d {
                let mkl = a[k * d + l];
                if mkl == 0.0 {
                    continue;
                }
                let w = mkl.abs() / (2.0 * h[k] * h[l]);
                let (c1, c2) = if mkl >= 0.0 {
                    (
                        grid.shift(grid.shift(node, k, 1), l, 1),
                        grid.shift(grid.shift(node, k, -1), l, -1),
                    )
                } else {
                    (
                        grid.shift(grid.shift(node, k, 1), l, -1),
                        grid.shift(grid.shift(node, k, -1), l, 1),
                    )
                };
                trips.push((node, c1, w));
                trips.push((node, c2, w));
                diag += 2.0 * w;
                // Faces lose w each; their sign budget was charged above.
                for dim in [k, l] {
                    trips.push((node, grid.shift(node, dim, 1), -w));
                    trips.push((node, grid.shift(node, dim, -1), -w));
                }
            }
        }

        // Drift.
        for k in 0..d {
            let v = b[k] + eps * c[k];
            if v == 0.0 {
                continue;
            }
            drift_count += 1;
            let central_ok = v.abs() / (2.0 * h[k]) <= face_budget[k];
            let use_central = match opts.scheme {
                Scheme::Central => true,
                Scheme::Upwind => false,
                Scheme::Hybrid => central_ok,
            };
            if use_central {
                central_count += 1;
                let w = v / (2.0 * h[k]);
                trips.push((node, grid.shift(node, k, 1), w));
                trips.push((node, grid.shift(node, k, -1), -w));
            } else {
                let w = v.abs() / h[k];
                let dir = if v > 0.0 { 1 } else { -1 };
                trips.push((node, grid.shift(node, k, dir), w));
                diag -= w;
            }
        }

        // Regime coupling.
        for j in 0..n {
            if j == regime {
                diag += spec.q(regime, j);
            } else if spec.q(regime, j) != 0.0 {
                trips.push((node, cell_base + j, spec.q(regime, j)));
            }
        }

        trips.push((node, node, diag));
    }

    let mat = CsrMatrix::from_triplets(len, &trips);
    let max_abs_row_sum = mat.max_abs_row_sum();
    let max_abs_entry = mat.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs_row_sum > ROW_SUM_TOL * (1.0 + max_abs_entry) {
        return Err(Error::Numeric(format!(
            "generator row sums reach {max_abs_row_sum:.3e}; assembly is inconsistent"
        )));
    }
    let min_off_diagonal = mat.min_off_diagonal();
    if min_off_diagonal < -opts.off_diag_tol_scale * max_abs_entry {
        let mut detail = String::new();
        'outer: for r in 0..mat.n {
            let (cols, vals) = mat.row(r);
            for (&cc, &vv) in cols.iter().zip(vals) {
                if cc != r && vv < -opts.off_diag_tol_scale * max_abs_entry {
                    let (multi, regime) = grid.decompose(r);
                    detail = format!(
                        "entry ({r} -> {cc}) = {vv:.3e} at cell {multi:?} regime {regime}"
                    );
                    break 'outer;
                }
            }
        }
        return Err(Error::Numeric(format!(
            "off-diagonal sign condition violated ({detail}); refine the grid or use the \
             Monte Carlo route"
        )));
    }
    Ok(GeneratorMatrix {
        grid: grid.clone(),
        eps,
        scheme: opts.scheme,
        mat,
        max_abs_row_sum,
        min_off_diagonal,
        central_fraction: if drift_count == 0 {
            1.0
        } else {
            central_count as f64 / drift_count as f64
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_specs;

    fn assemble(spec: &ProblemSpec, cells: Vec<usize>, eps: f64) -> GeneratorMatrix {
        let grid = TorusGrid::for_spec(spec, cells).unwrap();
        discretize_generator(spec, &grid, eps, GeneratorOptions::default()).unwrap()
    }

    #[test]
    fn laplacian_stencil_on_four_cells() {
        // b = 0, sigma = 1, tau = 1, cells = 4: rows (1,-2,1)/(2 h^2), h=1/4.
        let spec = test_specs::pure_bm(1);
        let g = assemble(&spec, vec![4], 0.0);
        let coeff = 1.0 / (2.0 * 0.25 * 0.25);
        for r in 0..4 {
            let (cols, vals) = g.mat.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if c == r {
                    assert!((v + 2.0 * coeff).abs() < 1e-12);
                } else {
                    assert!((v - coeff).abs() < 1e-12);
                }
            }
            assert_eq!(cols.len(), 3);
        }
    }

    #[test]
    fn flat_two_regime_generator_is_kronecker_sum() {
        // x-independent coefficients: Q couples regimes at each cell and the
        // per-regime diffusion blocks act within each regime.
        let spec = test_specs::two_regime_flat();
        let g = assemble(&spec, vec![8], 0.0);
        let n = 2;
        for node in 0..g.mat.n {
            let regime = node % n;
            let (cols, vals) = g.mat.row(node);
            for (&c, &v) in cols.iter().zip(vals) {
                if c / n == node / n && c != node {
                    // regime coupling within the cell
                    assert_eq!(v, spec.q(regime, c % n));
                } else if c != node {
                    // diffusion neighbor keeps the regime
                    assert_eq!(c % n, regime);
                }
            }
        }
    }

    #[test]
    fn row_sums_vanish_with_sine_drift() {
        let spec = test_specs::sine_drift();
        let g = assemble(&spec, vec![64], 0.0);
        assert!(g.max_abs_row_sum <= 1e-12 * (1.0 + 64.0 * 64.0));
        assert!(g.min_off_diagonal >= 0.0);
    }

    #[test]
    fn hybrid_uses_central_on_fine_grids() {
        let spec = test_specs::sine_drift();
        let g = assemble(&spec, vec![128], 0.0);
        assert_eq!(g.central_fraction, 1.0);
    }

    #[test]
    fn upwind_scheme_keeps_nonnegative_off_diagonals_on_coarse_grids() {
        // Tiny diffusion and coarse grid force the upwind branch.
        let mut spec = test_specs::sine_drift();
        spec.sigma = crate::model::CoeffField::new(
            1,
            1,
            vec![crate::model::ScalarField::constant(0.05, 1, 1)],
        )
        .unwrap();
        let grid = TorusGrid::for_spec(&spec, vec![8]).unwrap();
        let opts = GeneratorOptions { scheme: Scheme::Upwind, ..Default::default() };
        let g = discretize_generator(&spec, &grid, 0.0, opts).unwrap();
        assert!(g.min_off_diagonal >= 0.0);
        // Central would go negative here.
        let opts_c = GeneratorOptions { scheme: Scheme::Central, ..Default::default() };
        assert!(discretize_generator(&spec, &grid, 0.0, opts_c).is_err());
        // Hybrid falls back to upwind and stays sign-correct.
        let g_h = discretize_generator(&spec, &grid, 0.0, GeneratorOptions::default()).unwrap();
        assert!(g_h.min_off_diagonal >= 0.0);
        assert!(g_h.central_fraction < 1.0);
    }

    #[test]
    fn mixed_diffusion_assembles_and_detects_violations() {
        // Constant correlated diffusion in 2-d.
        use crate::model::{CoeffField, ScalarField, SpaceFn};
        let sigma = CoeffField::new(
            2,
            2,
            vec![
                ScalarField::constant(1.0, 2, 1),
                ScalarField::constant(0.0, 2, 1),
                ScalarField::constant(0.8, 2, 1),
                ScalarField::constant(0.6, 2, 1),
            ],
        )
        .unwrap();
        let spec = ProblemSpec::new(
            2,
            2,
            1,
            vec![1.0, 1.0],
            CoeffField::zero(2, 1, 2, 1),
            CoeffField::zero(2, 1, 2, 1),
            sigma,
            CoeffField::zero(1, 1, 2, 1),
            vec![0.0],
            None,
            SpaceFn::Const(0.0),
            SpaceFn::Const(0.0),
            None,
        )
        .unwrap();
        // Isotropic grid: fine.
        let grid = TorusGrid::for_spec(&spec, vec![16, 16]).unwrap();
        let g = discretize_generator(&spec, &grid, 0.0, GeneratorOptions::default()).unwrap();
        assert!(g.max_abs_row_sum <= 1e-9);
        assert!(g.min_off_diagonal >= 0.0);
        // Strongly anisotropic grid: a = sigma sigma^T has a_12 = 0.8 and
        // a_22 = 1; with h_1 >> h_2 the face budget goes negative.
        let bad = TorusGrid::for_spec(&spec, vec![4, 64]).unwrap();
        let err = discretize_generator(&spec, &bad, 0.0, GeneratorOptions::default());
        assert!(err.is_err());
        let msg = format!("{}", err.unwrap_err());
        assert!(msg.contains("off-diagonal"), "{msg}");
    }

    #[test]
    fn nyquist_bound_enforced() {
        let spec = test_specs::sine_drift();
        let grid = TorusGrid::for_spec(&spec, vec![2]).unwrap();
        assert!(discretize_generator(&spec, &grid, 0.0, GeneratorOptions::default()).is_err());
    }

    #[test]
    fn three_dimensional_grids_are_refused() {
        let spec = test_specs::pure_bm(3);
        let grid = TorusGrid::for_spec(&spec, vec![4, 4, 4]).unwrap();
        assert!(discretize_generator(&spec, &grid, 0.0, GeneratorOptions::default()).is_err());
    }
}
