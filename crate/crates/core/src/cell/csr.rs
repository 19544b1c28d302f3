//! Compressed sparse row matrix with the handful of operations the grid
//! solvers need; factorizations are delegated to faer's sparse LU.

use std::io::Write;
use std::sync::Once;

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::{Error, Result};

/// Square CSR matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from triplets, summing duplicates.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut rows = Vec::with_capacity(sorted.len());
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        for &(r, c, v) in &sorted {
            assert!(r < n && c < n, "triplet out of bounds");
            if rows.last() == Some(&r) && col_idx.last() == Some(&c) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            rows.push(r);
            col_idx.push(c);
            values.push(v);
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self { n, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn row_sum(&self, r: usize) -> f64 {
        let (_, vals) = self.row(r);
        vals.iter().sum()
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n).map(|r| self.row_sum(r).abs()).fold(0.0, f64::max)
    }

    /// Smallest off-diagonal entry (0 when there are none).
    pub fn min_off_diagonal(&self) -> f64 {
        let mut min = f64::INFINITY;
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if c != r && v < min {
                    min = v;
                }
            }
        }
        if min.is_infinite() {
            0.0
        } else {
            min
        }
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
    }

    /// y = A^T x (iterates rows of A).
    pub fn matvec_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v * x[r];
            }
        }
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut trips = Vec::with_capacity(self.nnz());
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                trips.push((c, r, v));
            }
        }
        CsrMatrix::from_triplets(self.n, &trips)
    }

    /// Copy with row `r` replaced by the dense row `new_row`.
    pub fn with_replaced_row(&self, r: usize, new_row: &[f64]) -> CsrMatrix {
        assert_eq!(new_row.len(), self.n);
        let mut trips = Vec::with_capacity(self.nnz() + self.n);
        for row in 0..self.n {
            if row == r {
                continue;
            }
            let (cols, vals) = self.row(row);
            for (&c, &v) in cols.iter().zip(vals) {
                trips.push((row, c, v));
            }
        }
        for (c, &v) in new_row.iter().enumerate() {
            if v != 0.0 {
                trips.push((r, c, v));
            }
        }
        CsrMatrix::from_triplets(self.n, &trips)
    }

    /// Solve `A X = B` for dense right-hand sides via sparse LU.
    pub fn solve(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        pin_faer_sequential();
        let trips: Vec<Triplet<usize, usize, f64>> = (0..self.n)
            .flat_map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(move |(&c, &v)| Triplet::new(r, c, v))
            })
            .collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(self.n, self.n, &trips)
            .map_err(|e| Error::Solver(format!("sparse assembly: {e:?}")))?;
        let lu = mat.sp_lu().map_err(|e| Error::Solver(format!("sparse LU: {e:?}")))?;
        let k = rhs.len();
        let b = Mat::<f64>::from_fn(self.n, k, |i, j| rhs[j][i]);
        let x = faer::linalg::solvers::Solve::solve(&lu, &b);
        let mut out = vec![vec![0.0; self.n]; k];
        for (j, col) in out.iter_mut().enumerate() {
            for (i, v) in col.iter_mut().enumerate() {
                *v = x[(i, j)];
            }
        }
        // LU of a structurally singular matrix can succeed yet return junk;
        // reject non-finite solutions here so callers see a solver error.
        if out.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Solver("sparse LU produced non-finite values".into()));
        }
        Ok(out)
    }

    /// Coordinate-format text export: `row col value` per line.
    pub fn write_coo(&self, mut w: impl Write) -> Result<()> {
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                writeln!(w, "{r} {c} {v}")?;
            }
        }
        Ok(())
    }
}

/// faer may parallelize internally; reductions must not depend on worker
/// count, so solves are pinned to sequential execution once per process.
fn pin_faer_sequential() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplet_assembly_sums_duplicates() {
        let m = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, -1.0)]);
        assert_eq!(m.nnz(), 2);
        let (cols, vals) = m.row(0);
        assert_eq!(cols, &[0]);
        assert_eq!(vals, &[3.0]);
        assert_eq!(m.row_sum(1), -1.0);
    }

    #[test]
    fn matvec_and_transpose_agree() {
        let m = CsrMatrix::from_triplets(
            3,
            &[(0, 1, 2.0), (1, 0, -1.0), (1, 2, 4.0), (2, 2, 5.0)],
        );
        let x = [1.0, 2.0, 3.0];
        let mut y = [0.0; 3];
        m.matvec(&x, &mut y);
        assert_eq!(y, [4.0, 11.0, 15.0]);
        let mut yt = [0.0; 3];
        m.matvec_transpose(&x, &mut yt);
        let mut yt2 = [0.0; 3];
        m.transpose().matvec(&x, &mut yt2);
        assert_eq!(yt, yt2);
    }

    #[test]
    fn solve_small_dense_system() {
        // [[2,1],[1,3]] x = (3, 5) -> x = (4/5, 7/5)
        let m = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)]);
        let x = m.solve(&[vec![3.0, 5.0]]).unwrap();
        assert!((x[0][0] - 0.8).abs() < 1e-12);
        assert!((x[0][1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn replaced_row_changes_only_that_row() {
        let m = CsrMatrix::from_triplets(3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]);
        let m2 = m.with_replaced_row(1, &[1.0, 1.0, 1.0]);
        assert_eq!(m2.row(0), (&[0usize][..], &[1.0][..]));
        assert_eq!(m2.row(1).0, &[0, 1, 2]);
        assert_eq!(m2.row(2), (&[2usize][..], &[1.0][..]));
    }

    #[test]
    fn coo_export_format() {
        let m = CsrMatrix::from_triplets(2, &[(0, 1, 2.5), (1, 0, -1.0)]);
        let mut buf = Vec::new();
        m.write_coo(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1 2.5\n1 0 -1\n");
    }
}
