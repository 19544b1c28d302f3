//! Uniform discretization of the torus times the regime set, with flattened
//! index arithmetic and periodic wrapping.

use crate::model::ProblemSpec;
use crate::{Error, Result};

/// Nodes are `x_j = (j_1 h_1, ..., j_d h_d)` with `h_k = tau_k / cells_k`;
/// the linear index is `cell * n_regimes + regime` with the cell index
/// row-major (first dimension slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    pub cells: Vec<usize>,
    pub tau: Vec<f64>,
    pub n_regimes: usize,
    strides: Vec<usize>,
    n_cells: usize,
}

impl TorusGrid {
    pub fn new(cells: Vec<usize>, tau: Vec<f64>, n_regimes: usize) -> Result<Self> {
        if cells.is_empty() || cells.len() != tau.len() {
            return Err(Error::Dimension("cells and tau must have equal positive length".into()));
        }
        if cells.iter().any(|&c| c < 2) {
            return Err(Error::Dimension("need at least two cells per dimension".into()));
        }
        if n_regimes == 0 {
            return Err(Error::Dimension("need at least one regime".into()));
        }
        let d = cells.len();
        let mut strides = vec![1usize; d];
        for k in (0..d.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * cells[k + 1];
        }
        let n_cells = cells.iter().product();
        Ok(Self { cells, tau, n_regimes, strides, n_cells })
    }

    pub fn for_spec(spec: &ProblemSpec, cells: Vec<usize>) -> Result<Self> {
        Self::new(cells, spec.tau.clone(), spec.n)
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Total unknowns: regimes times cells.
    pub fn len(&self) -> usize {
        self.n_cells * self.n_regimes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, k: usize) -> f64 {
        self.tau[k] / self.cells[k] as f64
    }

    pub fn cell_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(j, s)| j * s).sum()
    }

    pub fn node_index(&self, multi: &[usize], regime: usize) -> usize {
        self.cell_index(multi) * self.n_regimes + regime
    }

    pub fn decompose(&self, node: usize) -> (Vec<usize>, usize) {
        let regime = node % self.n_regimes;
        let mut cell = node / self.n_regimes;
        let mut multi = vec![0; self.dim()];
        for k in 0..self.dim() {
            multi[k] = cell / self.strides[k];
            cell %= self.strides[k];
        }
        (multi, regime)
    }

    /// Grid point of a cell multi-index.
    pub fn point(&self, multi: &[usize]) -> Vec<f64> {
        multi.iter().enumerate().map(|(k, &j)| j as f64 * self.spacing(k)).collect()
    }

    /// Node reached by moving `offset` cells along dimension `k` with
    /// periodic wrap, keeping the regime.
    pub fn shift(&self, node: usize, k: usize, offset: isize) -> usize {
        let regime = node % self.n_regimes;
        let cell = node / self.n_regimes;
        let jk = (cell / self.strides[k]) % self.cells[k];
        let shifted = (jk as isize + offset).rem_euclid(self.cells[k] as isize) as usize;
        let base = cell - jk * self.strides[k];
        (base + shifted * self.strides[k]) * self.n_regimes + regime
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_map_is_a_bijection() {
        let g = TorusGrid::new(vec![3, 4], vec![1.0, 2.0], 2).unwrap();
        let mut seen = vec![false; g.len()];
        for j0 in 0..3 {
            for j1 in 0..4 {
                for r in 0..2 {
                    let idx = g.node_index(&[j0, j1], r);
                    assert!(!seen[idx]);
                    seen[idx] = true;
                    let (multi, regime) = g.decompose(idx);
                    assert_eq!(multi, vec![j0, j1]);
                    assert_eq!(regime, r);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn shift_wraps_periodically() {
        let g = TorusGrid::new(vec![4], vec![1.0], 1).unwrap();
        assert_eq!(g.shift(0, 0, 1), 1);
        assert_eq!(g.shift(3, 0, 1), 0);
        assert_eq!(g.shift(0, 0, -1), 3);
        let g2 = TorusGrid::new(vec![3, 3], vec![1.0, 1.0], 2).unwrap();
        let node = g2.node_index(&[2, 1], 1);
        assert_eq!(g2.shift(node, 0, 1), g2.node_index(&[0, 1], 1));
        assert_eq!(g2.shift(node, 1, 2), g2.node_index(&[2, 0], 1));
    }

    #[test]
    fn spacing_and_points() {
        let g = TorusGrid::new(vec![4], vec![2.0], 1).unwrap();
        assert_eq!(g.spacing(0), 0.5);
        assert_eq!(g.point(&[3]), vec![1.5]);
    }
}
