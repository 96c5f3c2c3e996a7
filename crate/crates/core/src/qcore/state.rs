use crate::error::{Error, Result};
use crate::qcore::eig::{eig_hermitian, HermitianEigen, PSD_CLAMP};
use crate::qcore::matrix::{partial_trace, tensor_vec, ComplexMatrix, C64, ONE, ZERO};

/// Tolerance for the Hermitian, positivity and trace checks on states.
pub const STATE_TOL: f64 = 1e-10;

/// Eigenvalues above this count towards the rank of a state.
pub const RANK_TOL: f64 = 1e-12;

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        let dev = mat.hermitian_deviation();
        if dev > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let mat = mat.hermitian_part();
        let min = eig_hermitian(&mat)?.values.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix produced by a trusted computation, symmetrizing away
    /// rounding noise.
    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        Self { mat: mat.hermitian_part() }
    }

    /// `|v⟩⟨v|` for a unit vector `v`.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state vector has norm {norm}")));
        }
        Ok(Self::from_matrix_unchecked(ComplexMatrix::outer(v, v)))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { mat: ComplexMatrix::identity(d).scale(1.0 / d as f64) }
    }

    /// Diagonal state in the computational basis.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(probs))
    }

    /// Computational basis state `|k⟩⟨k|`.
    pub fn basis(d: usize, k: usize) -> Self {
        Self { mat: ComplexMatrix::unit(d, k, k) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eigen(&self) -> HermitianEigen {
        eig_hermitian(&self.mat).expect("density matrices are Hermitian")
    }

    /// Spectrum with negatives clamped to zero, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        self.eigen().values.into_iter().map(|x| x.max(0.0)).collect()
    }

    pub fn rank(&self) -> usize {
        self.spectrum().iter().filter(|&&x| x > RANK_TOL).count()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { mat: self.mat.kron(&other.mat) }
    }

    pub fn tensor_power(&self, n: usize) -> Self {
        assert!(n >= 1);
        (1..n).fold(self.clone(), |acc, _| acc.tensor(self))
    }

    /// Reduced state on the subsystems in `keep`.
    pub fn reduce(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        Ok(Self::from_matrix_unchecked(partial_trace(&self.mat, dims, keep)?))
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, w: f64, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("mixing states of different dimension".into()));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("mixing weight {w}")));
        }
        let mut m = self.mat.scale(w);
        m.axpy(1.0 - w, &other.mat);
        Ok(Self { mat: m })
    }
}

/// A pure state `|ψ⟩_{RA}` whose reduced state on `A` is `source`.
///
/// The vector index is `r * dim_a + a` (reference most significant).
#[derive(Clone, Debug)]
pub struct Purification {
    dim_r: usize,
    dim_a: usize,
    vec: Vec<C64>,
    source: DensityMatrix,
}

impl Purification {
    /// Validates a purification given as a vector on `R ⊗ A`.
    pub fn from_vector(vec: Vec<C64>, dim_r: usize, dim_a: usize) -> Result<Self> {
        if vec.len() != dim_r * dim_a {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} on {dim_r}x{dim_a}",
                vec.len()
            )));
        }
        let norm: f64 = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("purification has norm {norm}")));
        }
        let coeffs = ComplexMatrix::new(dim_r, dim_a, vec.clone())?;
        // Tr_R |ψ⟩⟨ψ| = Cᵀ C̄ for the coefficient matrix C.
        let source = DensityMatrix::from_matrix_unchecked(coeffs.transpose().matmul(&coeffs.conj()));
        Ok(Self { dim_r, dim_a, vec, source })
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn vector(&self) -> &[C64] {
        &self.vec
    }

    pub fn source(&self) -> &DensityMatrix {
        &self.source
    }

    /// Coefficient matrix `C` with `|ψ⟩ = Σ C[r,a] |r⟩|a⟩`.
    pub fn coefficients(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.dim_r, self.dim_a, self.vec.clone()).expect("shape fixed at construction")
    }

    /// `|ψ⟩⟨ψ|` on `R ⊗ A`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vec, &self.vec)
    }

    /// `(U ⊗ I)|ψ⟩` for a unitary `U` on the reference.
    pub fn with_reference_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim_r || u.cols() != self.dim_r {
            return Err(Error::DimensionMismatch("reference unitary has the wrong size".into()));
        }
        let full = u.kron(&ComplexMatrix::identity(self.dim_a));
        Self::from_vector(full.mat_vec(&self.vec), self.dim_r, self.dim_a)
    }

    /// `|ψ⟩^{⊗n}` reordered as `R_1…R_n A_1…A_n`.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        let mut v = self.vec.clone();
        for _ in 1..n {
            v = tensor_vec(&v, &self.vec);
        }
        let dims: Vec<usize> = (0..n).flat_map(|_| [self.dim_r, self.dim_a]).collect();
        let perm: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
        let v = crate::qcore::matrix::permute_vector(&v, &dims, &perm)?;
        Self::from_vector(v, self.dim_r.pow(n as u32), self.dim_a.pow(n as u32))
    }
}

/// Canonical purification `Σ_i √λ_i |i⟩_R |v_i⟩_A` over the support of `rho`.
pub fn purify(rho: &DensityMatrix) -> Result<Purification> {
    let e = eig_hermitian(rho.matrix())?;
    let values = e.clamped_values(PSD_CLAMP.max(STATE_TOL))?;
    let support: Vec<usize> = (0..values.len()).filter(|&k| values[k] > RANK_TOL).collect();
    let dim_r = support.len().max(1);
    let dim_a = rho.dim();
    let mut vec = vec![ZERO; dim_r * dim_a];
    let total: f64 = support.iter().map(|&k| values[k]).sum();
    for (r, &k) in support.iter().enumerate() {
        // Renormalize over the retained support so the vector has unit norm.
        let amp = (values[k] / total).sqrt();
        for a in 0..dim_a {
            vec[r * dim_a + a] = e.vectors[(a, k)] * amp;
        }
    }
    if support.is_empty() {
        vec[0] = ONE;
    }
    Purification::from_vector(vec, dim_r, dim_a)
}
