//! Finite-truncation spectral diagnostic. A weakly supercyclic operator
//! keeps its point spectrum strictly inside the ball of its norm, so a
//! compression whose eigenvalue reaches the norm estimate is obstructed.
//! The verdict always carries a truncation caveat: an N x N compression is
//! not the operator.

use super::{Citation, Conclusion, Fact, Verdict};
use crate::params::Params;
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

const SCHUR_EPS: f64 = 1e-12;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SpectralError {
    #[error("the matrix must be square and nonempty, got {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("the eigensolver did not converge")]
    Eigensolver,
}

/// A dense complex matrix standing in for a finite compression of the
/// operator, with its norm estimate (largest singular value) computed at
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    norm_estimate: f64,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<OperatorMatrix, SpectralError> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(SpectralError::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        for row in 0..entries.nrows() {
            for col in 0..entries.ncols() {
                let v = entries[(row, col)];
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(SpectralError::NonFiniteEntry { row, col });
                }
            }
        }
        let norm_estimate = entries
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .fold(0.0f64, |a, &s| a.max(s));
        Ok(OperatorMatrix {
            entries,
            norm_estimate,
        })
    }

    /// Builds the matrix from nested rows; every row must have the same
    /// length as the row count.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<OperatorMatrix, SpectralError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(SpectralError::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        OperatorMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Truncation of a backward weighted shift: the given entries form the
    /// superdiagonal, everything else is zero. The result is upper
    /// triangular with zero diagonal, hence nilpotent.
    pub fn weighted_shift_truncation(superdiagonal: &[Complex64]) -> Result<OperatorMatrix, SpectralError> {
        let n = superdiagonal.len() + 1;
        OperatorMatrix::new(DMatrix::from_fn(n, n, |i, j| {
            if j == i + 1 {
                superdiagonal[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.entries.nrows())
            .map(|i| (0..self.entries.ncols()).map(|j| self.entries[(i, j)]).collect())
            .collect()
    }

    /// Operator norm of the compression, as the largest singular value.
    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    /// Eigenvalues via a Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>, SpectralError> {
        schur_eigenvalues(self.entries.clone())
    }

    /// Eigenvalues of the conjugate transpose.
    pub fn adjoint_eigenvalues(&self) -> Result<Vec<Complex64>, SpectralError> {
        schur_eigenvalues(self.entries.adjoint())
    }
}

fn schur_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<Complex64>, SpectralError> {
    // Triangular matrices carry their eigenvalues on the diagonal; reading
    // them off directly also covers the nilpotent shift truncations on
    // which the QR iteration stalls (every shift is an exact zero).
    let n = m.nrows();
    let zero = |i: usize, j: usize| m[(i, j)].norm() == 0.0;
    let upper = (1..n).all(|i| (0..i).all(|j| zero(i, j)));
    let lower = (1..n).all(|i| (0..i).all(|j| zero(j, i)));
    if upper || lower {
        return Ok((0..n).map(|i| m[(i, i)]).collect());
    }
    let schur = m
        .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(SpectralError::Eigensolver)?;
    let eig = schur.eigenvalues().ok_or(SpectralError::Eigensolver)?;
    Ok(eig.iter().copied().collect())
}

/// Fires when any eigenvalue of the compression or of its conjugate
/// transpose reaches the norm estimate, up to the configured margin.
pub fn spectral_obstruction(
    t: &OperatorMatrix,
    params: &Params,
) -> Result<Verdict, SpectralError> {
    let mut spectrum = t.eigenvalues()?;
    spectrum.extend(t.adjoint_eigenvalues()?);
    let extremal = spectrum
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("dimension >= 1");
    let norm = t.norm_estimate();
    if extremal.norm() >= norm - params.tolerances.spectral_margin {
        Ok(Verdict::new(
            Conclusion::NotWeaklySupercyclic,
            Citation::Cor10,
            vec![
                Fact::int("dimension", t.dimension() as i64),
                Fact::real("norm estimate", norm),
                Fact::point("extremal eigenvalue", extremal),
                Fact::real("extremal eigenvalue modulus", extremal.norm()),
            ],
        )
        .with_caveat("truncation diagnostic: a finite compression stands in for the operator"))
    } else {
        Ok(Verdict::inconclusive(vec![
            Fact::int("dimension", t.dimension() as i64),
            Fact::real("norm estimate", norm),
            Fact::real("extremal eigenvalue modulus", extremal.norm()),
        ]))
    }
}
