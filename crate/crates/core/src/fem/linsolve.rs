//! Sparse symmetric positive definite factorization.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMat, Triplet};
use faer::{MatMut, Side};

use crate::error::{Error, Result};

/// Cholesky factor of a sparse SPD matrix given by lower-triangle triplets
/// (duplicates are summed).
pub struct SparseCholesky {
    llt: Llt<usize, f64>,
    n: usize,
}

impl SparseCholesky {
    pub fn factorize(n: usize, lower: &[(usize, usize, f64)]) -> Result<Self> {
        let triplets: Vec<Triplet<usize, usize, f64>> =
            lower.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let llt = a
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(Self { llt, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.n);
        if self.n == 0 {
            return;
        }
        self.llt.solve_in_place(MatMut::from_column_major_slice_mut(rhs, self.n, 1));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system_with_duplicates() {
        // [[4,1],[1,3]] with the diagonal split into two entries.
        let t = [(0, 0, 2.0), (0, 0, 2.0), (1, 0, 1.0), (1, 1, 3.0)];
        let c = SparseCholesky::factorize(2, &t).unwrap();
        let mut b = [1.0, 2.0];
        c.solve_in_place(&mut b);
        assert!((b[0] - 1.0 / 11.0).abs() < 1e-14);
        assert!((b[1] - 7.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn indefinite_matrix_fails() {
        let t = [(0, 0, 1.0), (1, 0, 2.0), (1, 1, 1.0)];
        assert!(SparseCholesky::factorize(2, &t).is_err());
    }
}
