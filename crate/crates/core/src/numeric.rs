//! Small dense helpers shared by the solvers.

use crate::qcore::matrix::{ComplexMatrix, C64};

/// Solves `A x = b` for a row-major `n×n` real `A` by Gaussian elimination
/// with partial pivoting. `None` when `A` is numerically singular.
pub fn solve_linear(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() <= 1e-14 * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        let p = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    Some(x)
}

/// Orthonormal basis of the `n×n` Hermitian matrices under `Re Tr(A B)`.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        basis.push(ComplexMatrix::unit(n, i, i));
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut re = ComplexMatrix::zeros(n, n);
            re[(i, j)] = C64::new(s, 0.0);
            re[(j, i)] = C64::new(s, 0.0);
            basis.push(re);
            let mut im = ComplexMatrix::zeros(n, n);
            im[(i, j)] = C64::new(0.0, -s);
            im[(j, i)] = C64::new(0.0, s);
            basis.push(im);
        }
    }
    basis
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coords(m: &ComplexMatrix, basis: &[ComplexMatrix]) -> Vec<f64> {
    basis.iter().map(|b| b.inner_re(m)).collect()
}

pub fn from_hermitian_coords(x: &[f64], basis: &[ComplexMatrix]) -> ComplexMatrix {
    let n = basis[0].rows();
    let mut m = ComplexMatrix::zeros(n, n);
    for (xi, b) in x.iter().zip(basis) {
        m.axpy(*xi, b);
    }
    m
}
