//! Seeded random states, unitaries and channels for tests, benchmarks and
//! sampling checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::qcore::channel::QuantumChannel;
use crate::qcore::eig::polar_isometry;
use crate::qcore::matrix::{ComplexMatrix, C64};
use crate::qcore::state::DensityMatrix;

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    let v = gaussian_matrix(rng, n, 1).into_vec();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Hilbert–Schmidt random density matrix (Ginibre `G G† / Tr`).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, d, d);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(m.scale(1.0 / tr))
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    let v = random_unit_vector(rng, d);
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&v, &v))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    gaussian_matrix(rng, d, d).hermitian_part()
}

/// Haar-like random isometry `C^n → C^m` (`m ≥ n`).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> ComplexMatrix {
    assert!(m >= n);
    polar_isometry(&gaussian_matrix(rng, m, n)).expect("Gaussian matrices have full column rank")
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    random_isometry(rng, d, d)
}

/// Random channel with `kraus_count` Kraus operators, cut from a random
/// isometry `dim_in → dim_out ⊗ kraus_count`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim_in: usize, dim_out: usize, kraus_count: usize) -> QuantumChannel {
    let v = random_isometry(rng, dim_out * kraus_count, dim_in);
    let kraus = (0..kraus_count).map(|k| v.block(k, 0, dim_out, dim_in)).collect();
    QuantumChannel::from_kraus_unchecked(kraus)
}

/// Random operator with `0 ≤ P ≤ I`.
pub fn random_effect<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let u = random_unitary(rng, d);
    let diag: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    u.conjugate(&ComplexMatrix::from_real_diag(&diag))
}
