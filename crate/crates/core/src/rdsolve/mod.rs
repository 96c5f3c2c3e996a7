//! Entanglement-assisted quantum rate–distortion and classical
//! rate–distortion.
//!
//! The quantum programs minimize `I(R;B)_ω` with `ω = (id ⊗ N)(ψ)` over
//! channels `N` with `1 − F_e(ρ, N) ≤ D`. The objective is convex in the
//! channel and the constraint is affine, so every returned point carries a
//! certified bound (`gap`, bits) on its distance to the true minimum.
//!
//! Choi matrices follow the crate-wide convention
//! `J = Σ_{ij} |i⟩⟨j| ⊗ N(|i⟩⟨j|)`, `Tr_out J = I_in`.

mod classical;
mod curve;
mod lagrange;
mod model;
mod search;

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::parallel::Execution;
use crate::qcore::channel::{ChoiMatrix, QuantumChannel};
use crate::qcore::eig::eig_hermitian;
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::state::DensityMatrix;

pub use classical::{classical_rd, ClassicalRdPoint, ClassicalSource};
pub use curve::{classical_rd_curve, format_sig, rd_curve, CurveFailure, CurveMode, RDCurve};

use lagrange::{blahut_arimoto, initial_state, projected_gradient, LagrangeSolution, LagrangeState};
use model::SourceModel;
use search::{target_search, Eval};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Target certified gap, bits.
    pub tol: f64,
    /// Iteration budget of each inner Lagrangian solve.
    pub max_iter: usize,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 10_000, execution: Execution::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Eac,
    Eaq,
    Classical,
}

/// One point of a rate–distortion curve.
#[derive(Clone, Debug)]
pub struct RDPoint {
    /// Distortion target.
    pub d: f64,
    /// Bits per source symbol.
    pub rate: f64,
    /// Multiplier of the distortion constraint, bits per unit distortion
    /// (infinite at `D = 0`).
    pub lambda: f64,
    pub choi: ChoiMatrix,
    /// Certified bound on `rate − R(D)`, bits.
    pub gap: f64,
    /// Distortion of `choi` on the source.
    pub achieved_distortion: f64,
    /// Whether the optimizer sits on the constraint boundary.
    pub constraint_active: bool,
}

impl RDPoint {
    fn halved(mut self) -> Self {
        self.rate *= 0.5;
        self.lambda *= 0.5;
        self.gap *= 0.5;
        self
    }
}

/// `Tr(J W_ρ)`, the entanglement fidelity of the channel with Choi matrix `j`.
pub fn fe_of_choi(rho: &DensityMatrix, j: &ChoiMatrix) -> Result<f64> {
    check_dims(rho, j)?;
    Ok(fidelity_operator(rho)?.inner_re(j.matrix()))
}

/// The operator `W_ρ` with `F_e(ρ, N) = Tr(J_N W_ρ)`.
pub fn fidelity_operator(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    Ok(SourceModel::new(rho)?.fidelity_operator())
}

/// `I(R;B)` of `(id ⊗ N)(ψ_ρ)` in bits.
pub fn mi_of_choi(rho: &DensityMatrix, j: &ChoiMatrix) -> Result<f64> {
    check_dims(rho, j)?;
    mi_of_choi_matrix(rho, j.matrix())
}

/// [`mi_of_choi`] for any PSD operator in place of a Choi matrix, using
/// unnormalized entropies.
pub fn mi_of_choi_matrix(rho: &DensityMatrix, j: &ComplexMatrix) -> Result<f64> {
    let model = SourceModel::new(rho)?;
    model.mutual_information(&model.omega_from_choi(j)?)
}

/// Gradient `G` of [`mi_of_choi_matrix`] with `dI = Re Tr(G dJ)`.
pub fn mi_gradient_of_choi(rho: &DensityMatrix, j: &ComplexMatrix) -> Result<ComplexMatrix> {
    let model = SourceModel::new(rho)?;
    let omega = model.omega_from_choi(j)?;
    Ok(model.gradient_to_choi(&model.mutual_information_gradient(&omega)?))
}

fn check_dims(rho: &DensityMatrix, j: &ChoiMatrix) -> Result<()> {
    if j.dim_in() != rho.dim() || j.dim_out() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix of a {}->{} channel for a source of dim {}",
            j.dim_in(),
            j.dim_out(),
            rho.dim()
        )));
    }
    Ok(())
}

/// Smallest distortion reachable at zero rate: `1 − λ_max(Tr_R[(ρ_R ⊗ I) ψψ†])`.
///
/// Zero rate forces a product output `ρ_R ⊗ σ`, whose fidelity is
/// `Tr(σ M)` for that operator `M`; the best `σ` is its top eigenvector.
pub fn zero_rate_threshold(rho: &DensityMatrix) -> Result<f64> {
    let model = SourceModel::new(rho)?;
    let (top, _) = best_constant_output(&model)?;
    Ok((1.0 - top).max(0.0))
}

fn best_constant_output(model: &SourceModel) -> Result<(f64, DensityMatrix)> {
    let weighted = model.lambda_matrix().kron(&ComplexMatrix::identity(model.d)).matmul(&model.psi_proj);
    let m = weighted.trace_leading(model.r).hermitian_part();
    let e = eig_hermitian(&m)?;
    let sigma = DensityMatrix::pure(&e.vector(0))?;
    Ok((e.values[0], sigma))
}

fn validate_distortion(d: f64) -> Result<()> {
    if !(0.0..1.0).contains(&d) {
        return Err(Error::InvalidDistortion(d));
    }
    Ok(())
}

/// One Lagrangian solve at `λ` nats, with the projected-gradient fallback.
fn solve_lagrangian(model: &SourceModel, lambda: f64, warm: &LagrangeState, tol: f64, config: &SolverConfig) -> Result<LagrangeSolution> {
    match blahut_arimoto(model, lambda, warm, tol, config.max_iter) {
        Ok(sol) if sol.gap <= tol => Ok(sol),
        first => {
            let from = match &first {
                Ok(sol) => sol.state.omega.clone(),
                Err(_) => warm.omega.clone(),
            };
            let pg = projected_gradient(model, lambda, &from, tol, config.max_iter)?;
            match first {
                Ok(sol) if sol.gap <= pg.gap => Ok(sol),
                _ => Ok(pg),
            }
        }
    }
}

fn point_from_omega(model: &SourceModel, rho: &DensityMatrix, d: f64, lambda: f64, gap: f64, omega: &ComplexMatrix) -> Result<RDPoint> {
    let choi = model.full_choi(omega)?;
    let rate = mi_of_choi(rho, &choi)?.max(0.0);
    let achieved = 1.0 - fe_of_choi(rho, &choi)?;
    Ok(RDPoint { d, rate, lambda, choi, gap, achieved_distortion: achieved, constraint_active: (d - achieved).abs() <= 1e-6 })
}

/// `R_eac(D) = min { I(R;B) : d(ρ, N) ≤ D }`, bits per source symbol.
pub fn solve_r_eac(rho: &DensityMatrix, d: f64, config: &SolverConfig) -> Result<RDPoint> {
    validate_distortion(d)?;
    let model = SourceModel::new(rho)?;
    let (top, sigma) = best_constant_output(&model)?;
    let d0 = (1.0 - top).max(0.0);
    if d >= d0 {
        let choi = QuantumChannel::from_kraus_unchecked(constant_kraus(&sigma, model.d)).choi();
        return Ok(RDPoint {
            d,
            rate: 0.0,
            lambda: 0.0,
            choi,
            gap: 0.0,
            achieved_distortion: d0,
            constraint_active: (d - d0).abs() <= 1e-6,
        });
    }
    if d == 0.0 {
        let choi = QuantumChannel::from_kraus_unchecked(vec![ComplexMatrix::identity(model.d)]).choi();
        return Ok(RDPoint {
            d,
            rate: 2.0 * model.entropy,
            lambda: f64::INFINITY,
            choi,
            gap: 0.0,
            achieved_distortion: 0.0,
            constraint_active: true,
        });
    }
    let inner = 0.25 * config.tol * LN_2;
    let start = initial_state(&model);
    let found = target_search(d, config.tol, |lambda_bits, warm: Option<&LagrangeState>| {
        let sol = solve_lagrangian(&model, lambda_bits * LN_2, warm.unwrap_or(&start), inner, config)?;
        let omega = &sol.state.omega;
        Ok(Eval {
            distortion: 1.0 - model.fidelity(omega),
            rate: model.mutual_information(omega)?,
            gap: sol.gap / LN_2,
            state: sol.state,
        })
    })?;
    if found.certificate > config.tol {
        return Err(Error::SolverDiverged(format!(
            "rate at D = {d} certified only to {:.2e} bits after {} multiplier evaluations",
            found.certificate, found.evaluations
        )));
    }
    point_from_omega(&model, rho, d, found.lambda, found.certificate, &found.eval.state.omega)
}

/// `R_eaq(D) = R_eac(D) / 2` from the same solve.
pub fn solve_r_eaq(rho: &DensityMatrix, d: f64, config: &SolverConfig) -> Result<RDPoint> {
    Ok(solve_r_eac(rho, d, config)?.halved())
}

/// Minimizer of `I + λ·d(ρ, N)` for a fixed multiplier in bits per unit
/// distortion.
pub fn solve_lagrangian_point(rho: &DensityMatrix, lambda_bits: f64, config: &SolverConfig) -> Result<RDPoint> {
    if !lambda_bits.is_finite() || lambda_bits < 0.0 {
        return Err(Error::InvalidParameter(format!("multiplier {lambda_bits}")));
    }
    let model = SourceModel::new(rho)?;
    let inner = 0.25 * config.tol * LN_2;
    let sol = solve_lagrangian(&model, lambda_bits * LN_2, &initial_state(&model), inner, config)?;
    let gap = sol.gap / LN_2;
    if gap > config.tol {
        return Err(Error::SolverDiverged(format!("Lagrangian at λ = {lambda_bits} ended with gap {gap:.2e}")));
    }
    let achieved = 1.0 - model.fidelity(&sol.state.omega);
    point_from_omega(&model, rho, achieved, lambda_bits, gap, &sol.state.omega)
}

fn constant_kraus(sigma: &DensityMatrix, d_in: usize) -> Vec<ComplexMatrix> {
    let e = sigma.eigen();
    let mut kraus = Vec::new();
    for (k, &p) in e.values.iter().enumerate() {
        if p <= 1e-15 {
            continue;
        }
        let v = e.vector(k);
        for i in 0..d_in {
            kraus.push(ComplexMatrix::from_fn(sigma.dim(), d_in, |o, c| if c == i { v[o] * p.sqrt() } else { crate::qcore::matrix::ZERO }));
        }
    }
    kraus
}
