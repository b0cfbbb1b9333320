//! Dense linear-algebra helpers over nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Floor used in relative errors so that two zeros compare equal.
pub const REL_EPS: f64 = 1e-300;

pub fn rel_error(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(REL_EPS)
}

/// `|a - b| / max(|a|, |b|)` for `a = exp(log_a)`, `b = exp(log_b)`,
/// without forming either value.
pub fn rel_error_logs(log_a: C64, log_b: C64) -> f64 {
    let d = log_b - log_a;
    if !d.re.is_finite() || !d.im.is_finite() {
        return if log_a == log_b { 0.0 } else { f64::INFINITY };
    }
    let ratio = d.exp();
    (C64::new(1.0, 0.0) - ratio).norm() / ratio.norm().max(1.0)
}

/// Complex logarithm of a determinant, accumulated from the LU diagonal.
/// The imaginary part is the unwound phase, not reduced to (-pi, pi].
pub fn log_det(m: DMatrix<C64>) -> Result<C64> {
    assert!(m.is_square());
    if m.nrows() == 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let lu = m.lu();
    let sign: C64 = lu.p().determinant();
    let mut acc = sign.ln();
    for z in lu.u().diagonal().iter() {
        if z.norm() == 0.0 || !z.norm().is_finite() {
            return Err(Error::SingularMatrix);
        }
        acc += z.ln();
    }
    Ok(acc)
}

/// Sum of complex logarithms of the entries (log of the product).
pub fn log_product<I: IntoIterator<Item = C64>>(items: I) -> C64 {
    items.into_iter().map(|z| z.ln()).sum()
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_symmetric_eigenvalue(m: DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::NEG_INFINITY;
    }
    m.symmetric_eigenvalues().max()
}

/// All eigenvalues of a real square matrix, sorted by decreasing real part
/// then imaginary part.
pub fn eigenvalues(m: DMatrix<f64>) -> Vec<C64> {
    let mut out: Vec<C64> = m.complex_eigenvalues().iter().copied().collect();
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    out
}

/// Largest singular value.
pub fn spectral_norm(m: DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(m: DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = m.singular_values();
    let top = s.max();
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Orthonormal basis (as columns) of the null space of a real matrix,
/// from the eigenvectors of `MᵀM` with eigenvalues below `rel_tol * max`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let gram = m.transpose() * m;
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let cols: Vec<DVector<f64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= rel_tol * top)
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(m.ncols(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthogonal projector onto the complement of the constant vector in R^n.
pub fn mean_zero_projector(n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::from_element(n, n, -1.0 / n as f64);
    for i in 0..n {
        p[(i, i)] += 1.0;
    }
    p
}

/// Inverse of a square complex matrix.
pub fn invert(m: DMatrix<C64>) -> Result<DMatrix<C64>> {
    m.try_inverse().ok_or(Error::SingularMatrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_det_matches_determinant() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(1.0, 2.0),
                C64::new(0.0, 1.0),
                C64::new(3.0, 0.0),
                C64::new(-1.0, 0.5),
                C64::new(2.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.5, 0.5),
                C64::new(1.0, 1.0),
                C64::new(-2.0, 0.0),
            ],
        );
        let det = m.determinant();
        let ld = log_det(m).unwrap();
        assert!(rel_error(ld.exp(), det) < 1e-13);
    }

    #[test]
    fn log_det_of_permutation_sign() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let ld = log_det(to_complex(&m)).unwrap();
        assert!(rel_error(ld.exp(), C64::new(-1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let m = DMatrix::<C64>::zeros(2, 2);
        assert!(matches!(log_det(m), Err(Error::SingularMatrix)));
    }

    #[test]
    fn rel_error_logs_agrees_with_direct() {
        let a = C64::new(3.0, -1.0);
        let b = C64::new(2.9, -1.2);
        let direct = rel_error(a, b);
        let via_logs = rel_error_logs(a.ln(), b.ln() + C64::new(0.0, 2.0 * std::f64::consts::PI));
        assert!((direct - via_logs).abs() < 1e-14);
    }

    #[test]
    fn rank_and_null_space() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0]);
        assert_eq!(numerical_rank(m.clone(), 1e-10), 1);
        let n = null_space(&m, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!((&m * &n).amax() < 1e-12);
    }
}
