//! Dense complex matrix helpers built on nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

#[inline]
pub fn c64(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(d: usize) -> Mat {
    Mat::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> Mat {
    Mat::zeros(rows, cols)
}

/// Rank-one projection onto the first basis vector.
pub fn vacuum_projection(d: usize) -> Mat {
    let mut p = zeros(d, d);
    if d > 0 {
        p[(0, 0)] = c64(1.0);
    }
    p
}

/// `(A + A^*) / 2`.
pub fn symmetrize(a: &Mat) -> Mat {
    (a + a.adjoint()) * c64(0.5)
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Kronecker product with the left factor as the outer (block) index.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let s = a[(i, j)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            for q in 0..bc {
                for p in 0..br {
                    out[(i * br + p, j * bc + q)] = s * b[(p, q)];
                }
            }
        }
    }
    out
}

fn is_diagonal(a: &Mat) -> bool {
    let (r, c) = a.shape();
    for j in 0..c {
        for i in 0..r {
            if i != j && a[(i, j)] != C64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &Mat) -> Vec<f64> {
    assert!(a.is_square());
    if a.nrows() == 0 {
        return Vec::new();
    }
    let h = symmetrize(a);
    let mut ev: Vec<f64> = if is_diagonal(&h) {
        h.diagonal().iter().map(|z| z.re).collect()
    } else {
        h.symmetric_eigenvalues().iter().copied().collect()
    };
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(a: &Mat) -> f64 {
    hermitian_eigenvalues(a)
        .first()
        .copied()
        .unwrap_or(f64::INFINITY)
}

/// Largest singular value.
pub fn op_norm(a: &Mat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if is_diagonal(a) {
        return a.diagonal().iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    }
    a.singular_values().iter().fold(0.0_f64, |acc, &s| acc.max(s))
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-tol, 0)` are clipped
/// to zero; anything below `-tol` is an error.
pub fn psd_sqrt(a: &Mat, tol: f64) -> Result<Mat> {
    let h = symmetrize(a);
    if is_diagonal(&h) {
        let mut out = zeros(h.nrows(), h.ncols());
        for i in 0..h.nrows() {
            let v = h[(i, i)].re;
            if v < -tol {
                return Err(Error::IndefiniteDefect { min_eigenvalue: v, tol });
            }
            out[(i, i)] = c64(v.max(0.0).sqrt());
        }
        return Ok(out);
    }
    let eig = SymmetricEigen::new(h);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::IndefiniteDefect { min_eigenvalue: min, tol });
    }
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let s = c64(lambda.max(0.0).sqrt());
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= s;
        }
    }
    Ok(scaled * q.adjoint())
}

/// Induced 1-norm.
pub fn norm_one(a: &Mat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Product of a list of matrices, identity of size `d` when empty.
pub fn product<'a>(d: usize, factors: impl IntoIterator<Item = &'a Mat>) -> Mat {
    let mut acc = identity(d);
    for f in factors {
        acc = &acc * f;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kron_orders_left_factor_outer() {
        let a = Mat::from_row_slice(2, 2, &[c64(1.0), c64(2.0), c64(3.0), c64(4.0)]);
        let b = identity(2);
        let k = kron(&a, &b);
        assert_eq!(k[(0, 2)], c64(2.0));
        assert_eq!(k[(1, 3)], c64(2.0));
        assert_eq!(k[(2, 0)], c64(3.0));
        assert_eq!(k[(0, 1)], c64(0.0));
    }

    #[test]
    fn eigen_and_norm_of_small_hermitian() {
        let a = Mat::from_row_slice(2, 2, &[c64(2.0), c64(1.0), c64(1.0), c64(2.0)]);
        let ev = hermitian_eigenvalues(&a);
        assert_relative_eq!(ev[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(ev[1], 3.0, epsilon = 1e-12);
        assert_relative_eq!(op_norm(&a), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let a = Mat::from_row_slice(
            2,
            2,
            &[c64(2.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), c64(2.0)],
        );
        let r = psd_sqrt(&a, 1e-12).unwrap();
        assert!(max_abs_diff(&(&r * &r), &a) < 1e-12);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let a = Mat::from_row_slice(2, 2, &[c64(1.0), c64(2.0), c64(2.0), c64(1.0)]);
        assert!(matches!(psd_sqrt(&a, 1e-9), Err(Error::IndefiniteDefect { .. })));
    }
}
