//! Entropies, mutual and coherent information, entanglement fidelity and
//! trace distance. Every returned information quantity is in bits.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::qcore::channel::QuantumChannel;
use crate::qcore::eig::{eig_hermitian, trace_norm_hermitian, PSD_CLAMP};
use crate::qcore::matrix::{partial_trace, ComplexMatrix, C64};
use crate::qcore::state::{purify, DensityMatrix, Purification, STATE_TOL};

/// `−Σ x log2 x` over a spectrum, with `0 log 0 = 0` and negatives clamped.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let h: f64 = values.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    h.max(0.0)
}

pub fn binary_entropy(p: f64) -> f64 {
    entropy_of_spectrum(&[p, 1.0 - p])
}

/// `−Tr X log2 X` for a PSD operator of any trace.
///
/// Eigenvalues in `[−1e-12, 0)` count as zero; anything more negative is an
/// error.
pub fn operator_entropy(x: &ComplexMatrix) -> Result<f64> {
    let values = eig_hermitian(x)?.clamped_values(PSD_CLAMP.max(STATE_TOL))?;
    Ok(values.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum())
}

/// Gradient of [`operator_entropy`]: `dH = Re Tr(G dX)` with
/// `G = −(log2 X + I/ln 2)`.
///
/// Eigenvalues are floored at `1e-12` so the gradient stays finite on the
/// boundary of the cone.
pub fn operator_entropy_gradient(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(x)?.map(|v| -(v.max(PSD_CLAMP).log2() + 1.0 / LN_2)))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.spectrum())
}

/// A state on `A ⊗ B`.
#[derive(Clone, Debug)]
pub struct BipartiteState {
    dims: (usize, usize),
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a * d_b != state.dim() {
            return Err(Error::DimensionMismatch(format!("{d_a}x{d_b} does not match state of dim {}", state.dim())));
        }
        Ok(Self { dims: (d_a, d_b), state })
    }

    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix, d_a: usize, d_b: usize) -> Self {
        Self { dims: (d_a, d_b), state: DensityMatrix::from_matrix_unchecked(mat) }
    }

    /// `|v⟩⟨v|` for a unit vector with index `a * d_b + b`.
    pub fn pure(v: &[C64], d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(DensityMatrix::pure(v)?, d_a, d_b)
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        Self { dims: (a.dim(), b.dim()), state: a.tensor(b) }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn reduced_a(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.state.matrix().trace_trailing(self.dims.1))
    }

    pub fn reduced_b(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.state.matrix().trace_leading(self.dims.0))
    }
}

/// `H(A) + H(B) − H(AB)`.
pub fn mutual_information(w: &BipartiteState) -> f64 {
    von_neumann_entropy(&w.reduced_a()) + von_neumann_entropy(&w.reduced_b()) - von_neumann_entropy(w.state())
}

/// `H(B) − H(AB)`.
pub fn coherent_information(w: &BipartiteState) -> f64 {
    von_neumann_entropy(&w.reduced_b()) - von_neumann_entropy(w.state())
}

/// `(id_R ⊗ N)(ψ)` for a purification `ψ` of the channel input.
pub fn channel_output_state(psi: &Purification, n: &QuantumChannel) -> Result<BipartiteState> {
    if psi.dim_a() != n.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "source of dim {} into channel with input dim {}",
            psi.dim_a(),
            n.dim_in()
        )));
    }
    let out = n.apply_on_second(&psi.projector(), psi.dim_r());
    Ok(BipartiteState::from_matrix_unchecked(out, psi.dim_r(), n.dim_out()))
}

/// `⟨ψ|(id ⊗ N)(ψ)|ψ⟩` for the given purification.
pub fn entanglement_fidelity_with(psi: &Purification, n: &QuantumChannel) -> Result<f64> {
    if n.dim_out() != n.dim_in() {
        return Err(Error::DimensionMismatch("entanglement fidelity needs dim_out = dim_in".into()));
    }
    let omega = channel_output_state(psi, n)?;
    let v = psi.vector();
    let w = omega.state().matrix().mat_vec(v);
    let f: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
    Ok(f.clamp(0.0, 1.0))
}

pub fn entanglement_fidelity(rho: &DensityMatrix, n: &QuantumChannel) -> Result<f64> {
    if rho.dim() != n.dim_in() {
        return Err(Error::DimensionMismatch(format!("source of dim {} into channel with input dim {}", rho.dim(), n.dim_in())));
    }
    entanglement_fidelity_with(&purify(rho)?, n)
}

/// `1 − F_e(ρ, N)`.
pub fn distortion(rho: &DensityMatrix, n: &QuantumChannel) -> Result<f64> {
    Ok(1.0 - entanglement_fidelity(rho, n)?)
}

/// Unnormalized trace distance `‖ρ − σ‖₁` (at most 2).
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    trace_norm_difference(rho.matrix(), sigma.matrix())
}

/// `‖A − B‖₁` for Hermitian `A`, `B`.
pub fn trace_norm_difference(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch("trace distance of operators of different size".into()));
    }
    trace_norm_hermitian(&(a - b).hermitian_part())
}

/// `Tr X₋`, the sum of the negative eigenvalues of a Hermitian `X`.
pub fn negative_part_trace(x: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(x)?.values.iter().filter(|&&v| v < 0.0).sum())
}

/// Reduced state on `keep` of a state on the given factors.
pub fn reduced(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_matrix_unchecked(partial_trace(rho.matrix(), dims, keep)?))
}
