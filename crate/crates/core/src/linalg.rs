//! Dense linear algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Ridge levels tried in order when a covariance is numerically singular.
pub const RIDGE_LEVELS: [f64; 4] = [0.0, 1e-14, 1e-12, 1e-10];

/// Lower Cholesky factor of `cov`, escalating the diagonal ridge through
/// [`RIDGE_LEVELS`]. Returns the factor and the ridge that succeeded.
pub fn cholesky_with_ridge(cov: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    for &ridge in RIDGE_LEVELS.iter() {
        let mut m = cov.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += ridge;
        }
        if let Some(ch) = Cholesky::<f64, Dyn>::new(m) {
            return Ok((ch.unpack(), ridge));
        }
    }
    Err(Error::Factorization { ridges: RIDGE_LEVELS.to_vec() })
}

/// Determinant by partial-pivoted LU, with a 1-norm condition estimate
/// `‖A‖₁‖A⁻¹‖₁` (infinite when the matrix is singular).
#[derive(Debug, Clone, Copy)]
pub struct DetReport {
    pub det: Complex64,
    pub condition: f64,
}

pub fn complex_det(a: &DMatrix<Complex64>) -> DetReport {
    let n = a.nrows();
    if n == 0 {
        return DetReport { det: Complex64::new(1.0, 0.0), condition: 1.0 };
    }
    let lu = a.clone().lu();
    let det = lu.determinant();
    let norm1 = |m: &DMatrix<Complex64>| {
        (0..m.ncols())
            .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let condition = match lu.try_inverse() {
        Some(inv) => norm1(a) * norm1(&inv),
        None => f64::INFINITY,
    };
    DetReport { det, condition }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ridge_rescues_rank_deficient_covariance() {
        // two identical rows: singular, PSD
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let (l, ridge) = cholesky_with_ridge(&cov).unwrap();
        assert!(ridge > 0.0);
        let back = &l * l.transpose();
        assert!((back[(0, 1)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn indefinite_matrix_reports_ridges() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match cholesky_with_ridge(&cov) {
            Err(Error::Factorization { ridges }) => assert_eq!(ridges.len(), 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_det_of_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 3.0),
        ]));
        let r = complex_det(&a);
        assert!((r.det - Complex64::new(0.0, 6.0)).norm() < 1e-14);
        assert!((r.condition - 1.5).abs() < 1e-12);
    }
}
