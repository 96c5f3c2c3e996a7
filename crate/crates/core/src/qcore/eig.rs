//! Cyclic Jacobi eigensolver for small dense Hermitian matrices, and the
//! spectral matrix functions built on it.

use crate::error::{Error, Result};
use crate::qcore::matrix::{ComplexMatrix, C64, ONE, ZERO};

/// Maximum Hermitian deviation accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as exact zeros before logs
/// and square roots.
pub const PSD_CLAMP: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `m = V diag(values) V†` with eigenvalues sorted in
/// descending order and orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvector `k` as a column.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            if fv[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * fv[k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// Eigenvalues with tiny negatives clamped to zero.
    ///
    /// Fails when an eigenvalue is below `-tol`.
    pub fn clamped_values(&self, tol: f64) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|&x| {
                if x < -tol {
                    Err(Error::InvalidState(format!("eigenvalue {x:.3e} is negative")))
                } else {
                    Ok(x.max(0.0))
                }
            })
            .collect()
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let deviation = m.hermitian_deviation();
    if !m.is_square() || deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput { deviation });
    }
    Ok(jacobi(m.hermitian_part()))
}

fn jacobi(mut a: ComplexMatrix) -> HermitianEigen {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let scale = a.frobenius_norm();
    if n > 1 && scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q, scale);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// One rotation annihilating `a[p][q]`. The unitary acting on the `(p, q)`
/// plane is `[[c, s], [-s e^{-iφ}, c e^{-iφ}]]` with `e^{iφ} = a_pq/|a_pq|`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b <= 1e-300 || b <= f64::EPSILON * 1e-3 * scale {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Natural-log matrix logarithm with eigenvalues floored at [`PSD_CLAMP`].
pub fn log_clamped(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(m)?.map(|x| x.max(PSD_CLAMP).ln()))
}

pub fn expm_hermitian(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(m)?.map(f64::exp))
}

/// Principal square root of a PSD matrix.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eig_hermitian(m)?;
    e.clamped_values(PSD_CLAMP)?;
    Ok(e.map(|x| x.max(0.0).sqrt()))
}

/// `m^{-1/2}` for a positive definite matrix.
pub fn inv_sqrt_pd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eig_hermitian(m)?;
    if e.values.last().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::InvalidParameter("matrix is not positive definite".into()));
    }
    Ok(e.map(|x| 1.0 / x.sqrt()))
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.values.iter().map(|x| x.abs()).sum())
}

/// Polar factor `Y (Y†Y)^{-1/2}` of a full-column-rank matrix.
pub fn polar_isometry(y: &ComplexMatrix) -> Result<ComplexMatrix> {
    let gram = y.adjoint().matmul(y);
    Ok(y.matmul(&inv_sqrt_pd(&gram)?))
}

/// Unit vector of the given dimension with a one in position `k`.
pub fn basis_vector(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; n];
    v[k] = ONE;
    v
}
