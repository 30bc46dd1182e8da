//! Thomas algorithm for the symmetric tridiagonal systems of the implicit steps.

use crate::error::{KwcError, Result};

/// Solves `A x = rhs` where `A` has sub-diagonal `lower[i] = A[i+1][i]`,
/// diagonal `diag` and super-diagonal `upper[i] = A[i][i+1]`.
pub(crate) fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(rhs.len(), n);
    assert_eq!(lower.len() + 1, n.max(1));
    assert_eq!(upper.len() + 1, n.max(1));
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(KwcError::Scheme("singular tridiagonal system".into()));
    }
    if n > 1 {
        c[0] = upper[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(KwcError::Scheme("singular tridiagonal system".into()));
        }
        if i < n - 1 {
            c[i] = upper[i] / pivot;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}
