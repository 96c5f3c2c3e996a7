//! The source seen through its canonical purification.
//!
//! With `|ψ⟩ = Σ_i √λ_i |i⟩_R |v_i⟩_A` over the support of `ρ` and `C` the
//! `r×d` coefficient matrix of `ψ`, a channel with Choi matrix `J` produces
//! `ω_RB = (C ⊗ I) J (C ⊗ I)†`. The map `J ↦ ω` is a bijection between
//! channels restricted to the support and the set
//! `{ω ≥ 0, Tr_B ω = diag(λ)}`, which is where the solvers work.

use crate::entropic::{operator_entropy, operator_entropy_gradient};
use crate::error::{Error, Result};
use crate::qcore::channel::ChoiMatrix;
use crate::qcore::eig::{eig_hermitian, inv_sqrt_pd};
use crate::qcore::matrix::{ComplexMatrix, C64};
use crate::qcore::state::{purify, DensityMatrix};

#[derive(Clone, Debug)]
pub(crate) struct SourceModel {
    pub d: usize,
    pub r: usize,
    /// Support eigenvalues, descending, summing to one.
    pub lambdas: Vec<f64>,
    /// `d×r` isometry whose columns are the support eigenvectors.
    pub support: ComplexMatrix,
    /// `r×d` coefficient matrix `C`.
    pub coeffs: ComplexMatrix,
    pub psi: Vec<C64>,
    pub psi_proj: ComplexMatrix,
    pub entropy: f64,
}

impl SourceModel {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let p = purify(rho)?;
        let (r, d) = (p.dim_r(), p.dim_a());
        let coeffs = p.coefficients();
        let lambdas: Vec<f64> = (0..r).map(|i| coeffs.row(i).iter().map(|z| z.norm_sqr()).sum()).collect();
        let support = ComplexMatrix::from_fn(d, r, |a, i| coeffs[(i, a)] / lambdas[i].sqrt());
        let entropy = crate::entropic::entropy_of_spectrum(&lambdas);
        Ok(Self { d, r, lambdas, support, coeffs, psi: p.vector().to_vec(), psi_proj: p.projector(), entropy })
    }

    pub fn lambda_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&self.lambdas)
    }

    fn lift(&self) -> ComplexMatrix {
        self.coeffs.kron(&ComplexMatrix::identity(self.d))
    }

    pub fn omega_from_choi(&self, j: &ComplexMatrix) -> Result<ComplexMatrix> {
        if j.rows() != self.d * self.d || j.cols() != self.d * self.d {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of size {} for a source of dim {}",
                j.rows(),
                self.d
            )));
        }
        Ok(self.lift().conjugate(j))
    }

    /// `⟨ψ|ω|ψ⟩`.
    pub fn fidelity(&self, omega: &ComplexMatrix) -> f64 {
        let w = omega.mat_vec(&self.psi);
        self.psi.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `W_ρ = (C ⊗ I)† Ψ (C ⊗ I)`, so that `F_e = Tr(J W_ρ)`.
    pub fn fidelity_operator(&self) -> ComplexMatrix {
        self.lift().adjoint().conjugate(&self.psi_proj)
    }

    /// `H(ω_R) + H(ω_B) − H(ω)` in bits, with unnormalized entropies so that
    /// the value is defined off the feasible set too.
    pub fn mutual_information(&self, omega: &ComplexMatrix) -> Result<f64> {
        let wr = omega.trace_trailing(self.d);
        let wb = omega.trace_leading(self.r);
        Ok(operator_entropy(&wr)? + operator_entropy(&wb)? - operator_entropy(omega)?)
    }

    /// Gradient of [`Self::mutual_information`] with respect to `ω`.
    pub fn mutual_information_gradient(&self, omega: &ComplexMatrix) -> Result<ComplexMatrix> {
        let gr = operator_entropy_gradient(&omega.trace_trailing(self.d))?;
        let gb = operator_entropy_gradient(&omega.trace_leading(self.r))?;
        let mut g = gr.kron(&ComplexMatrix::identity(self.d));
        g += &ComplexMatrix::identity(self.r).kron(&gb);
        g.axpy(-1.0, &operator_entropy_gradient(omega)?);
        Ok(g)
    }

    /// Pulls an `ω`-space gradient back to Choi space.
    pub fn gradient_to_choi(&self, g_omega: &ComplexMatrix) -> ComplexMatrix {
        self.lift().adjoint().conjugate(g_omega)
    }

    /// Choi matrix on the full input of the channel realising `ω`.
    ///
    /// On the support the channel is read off `ω`; the constraint
    /// `Tr_B ω = diag(λ)` is re-imposed exactly first. Inputs orthogonal to
    /// the support are sent to the top eigenvector of `ρ`, which does not
    /// affect any source-dependent quantity.
    pub fn full_choi(&self, omega: &ComplexMatrix) -> Result<ChoiMatrix> {
        let (r, d) = (self.r, self.d);
        let inv_sqrt: Vec<f64> = self.lambdas.iter().map(|l| 1.0 / l.sqrt()).collect();
        let scale = ComplexMatrix::from_real_diag(&inv_sqrt).kron(&ComplexMatrix::identity(d));
        let raw = clamp_psd(&scale.conjugate(omega))?;
        let t = raw.trace_trailing(d);
        let s = inv_sqrt_pd(&t)?.kron(&ComplexMatrix::identity(d));
        let js = ChoiMatrix::from_matrix_unchecked(r, d, s.conjugate(&raw));
        let v = &self.support;
        let q = &ComplexMatrix::identity(d) - &v.matmul(&v.adjoint());
        let top = ComplexMatrix::outer(&v.column(0), &v.column(0));
        ChoiMatrix::from_linear_map(d, d, |x| {
            let mut out = js.apply(&v.adjoint().matmul(x).matmul(v));
            if r < d {
                out += &top.scale_c(q.trace_product(x));
            }
            out
        })
    }
}

/// Drops the negative part of a Hermitian matrix.
pub(crate) fn clamp_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eig_hermitian(&m.hermitian_part())?;
    Ok(e.map(|x| x.max(0.0)))
}
