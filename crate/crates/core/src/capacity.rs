//! Single-letter capacities of a channel: Holevo information `χ`, coherent
//! information `Q⁽¹⁾` and the entanglement-assisted mutual information `I`.
//!
//! `χ` and `Q⁽¹⁾` are maximized by multi-start local search and are lower
//! estimates. `I` is concave in the input state and comes with a certified
//! optimality gap.

use std::f64::consts::LN_2;

use crate::entropic::{operator_entropy, operator_entropy_gradient};
use crate::error::{Error, Result};
use crate::optim::{minimize_stiefel, multistart, restart_rng, SearchConfig};
use crate::qcore::channel::QuantumChannel;
use crate::qcore::eig::{eig_hermitian, expm_hermitian, log_clamped};
use crate::qcore::matrix::{ComplexMatrix, C64, ZERO};
use crate::qcore::random::random_unit_vector;
use crate::qcore::state::DensityMatrix;

/// Largest channel input dimension accepted.
pub const MAX_INPUT_DIM: usize = 4;

const GTOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum CapacityOptimizer {
    Ensemble { probabilities: Vec<f64>, states: Vec<DensityMatrix> },
    Input(DensityMatrix),
}

#[derive(Clone, Debug)]
pub struct CapacityEstimate {
    /// Bits per channel use, clamped at zero.
    pub value: f64,
    /// Unclamped maximum (differs from `value` only for coherent information).
    pub raw: f64,
    pub optimizer: CapacityOptimizer,
    pub restarts: usize,
    pub spread: f64,
    /// Whether `value` is a certified global maximum.
    pub certified: bool,
    /// Certified bound on the distance to the maximum, when available.
    pub gap: Option<f64>,
}

fn check_dims(n: &QuantumChannel) -> Result<()> {
    if n.dim_in() > MAX_INPUT_DIM {
        return Err(Error::DimensionTooLarge(format!("channel input dim {} exceeds {MAX_INPUT_DIM}", n.dim_in())));
    }
    Ok(())
}

/// `H(N(x x†))` (unnormalized) and its gradient in `x`.
fn output_entropy_of_vector(n: &QuantumChannel, x: &[C64]) -> Result<(f64, Vec<C64>)> {
    let a = n.apply(&ComplexMatrix::outer(x, x));
    let h = operator_entropy(&a)?;
    let y = n.apply_adjoint(&operator_entropy_gradient(&a)?);
    Ok((h, y.mat_vec(x).into_iter().map(|z| z * 2.0).collect()))
}

/// Holevo information of an ensemble stacked as `x = (x_1, …, x_m)` with
/// `p_j = ‖x_j‖²`, and its gradient:
/// `χ = H(Σ N(x_j x_j†)) − Σ_j [H(N(x_j x_j†)) + p_j log p_j]`.
fn holevo_objective(n: &QuantumChannel, x: &[C64]) -> Result<(f64, Vec<C64>)> {
    let d = n.dim_in();
    let m = x.len() / d;
    let mut avg = ComplexMatrix::zeros(d, d);
    for j in 0..m {
        let xj = &x[j * d..(j + 1) * d];
        avg.axpy(1.0, &ComplexMatrix::outer(xj, xj));
    }
    let out = n.apply(&avg);
    let y0 = n.apply_adjoint(&operator_entropy_gradient(&out)?);
    let mut chi = operator_entropy(&out)?;
    let mut grad = vec![ZERO; x.len()];
    for j in 0..m {
        let xj = &x[j * d..(j + 1) * d];
        let p: f64 = xj.iter().map(|z| z.norm_sqr()).sum();
        let (hj, gj) = output_entropy_of_vector(n, xj)?;
        let dp = if p > 1e-300 {
            chi -= hj + p * p.log2();
            p.log2() + 1.0 / LN_2
        } else {
            0.0
        };
        let y = y0.mat_vec(xj);
        for i in 0..d {
            grad[j * d + i] = y[i] * 2.0 - gj[i] - xj[i] * (2.0 * dp);
        }
    }
    Ok((chi, grad))
}

fn as_column(v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::column_vector(v)
}

/// Best Holevo information over ensembles of `d²` pure input states.
pub fn holevo_capacity(n: &QuantumChannel, config: &SearchConfig) -> Result<CapacityEstimate> {
    check_dims(n)?;
    let d = n.dim_in();
    let m = d * d;
    let best = multistart(config.execution, config.restarts.max(2), |i| {
        let start: Vec<C64> = match i {
            // Uniform mixture over the computational basis.
            0 => (0..m * d).map(|k| if k < m && k % (d + 1) == 0 { C64::new(1.0 / (d as f64).sqrt(), 0.0) } else { ZERO }).collect(),
            _ => random_unit_vector(&mut restart_rng(config.seed, i), m * d),
        };
        let r = minimize_stiefel(&as_column(&start), config.max_iter, GTOL, |v| {
            let (chi, g) = holevo_objective(n, v.as_slice())?;
            Ok((-chi, as_column(&g).scale(-1.0)))
        })?;
        Ok((r.value, r.point))
    })?;
    let x = best.best.as_slice();
    let mut probabilities = Vec::new();
    let mut states = Vec::new();
    for j in 0..m {
        let xj = &x[j * d..(j + 1) * d];
        let p: f64 = xj.iter().map(|z| z.norm_sqr()).sum();
        if p > 1e-12 {
            let unit: Vec<C64> = xj.iter().map(|z| z / p.sqrt()).collect();
            probabilities.push(p);
            states.push(DensityMatrix::pure(&unit)?);
        }
    }
    let raw = -best.value;
    Ok(CapacityEstimate {
        value: raw.max(0.0),
        raw,
        optimizer: CapacityOptimizer::Ensemble { probabilities, states },
        restarts: best.restarts,
        spread: best.spread,
        certified: false,
        gap: None,
    })
}

/// `H(N(ρ)) − H(N_c(ρ))` at `ρ = X X†` (`X` stored row-major in `x`) and
/// its gradient in `X`.
fn coherent_objective(n: &QuantumChannel, nc: &QuantumChannel, x: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
    let rho = x.matmul(&x.adjoint()).hermitian_part();
    let b = n.apply(&rho);
    let e = nc.apply(&rho);
    let value = operator_entropy(&b)? - operator_entropy(&e)?;
    let mut g = n.apply_adjoint(&operator_entropy_gradient(&b)?);
    g.axpy(-1.0, &nc.apply_adjoint(&operator_entropy_gradient(&e)?));
    Ok((value, g.matmul(x).scale(2.0)))
}

fn reshape(v: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::new(d, d, v.as_slice().to_vec()).expect("d² entries")
}

/// Best coherent information `max_ρ I(R⟩B)` found by local search; `raw`
/// keeps the possibly negative maximum, `value` clamps it at zero.
pub fn coherent_info_capacity(n: &QuantumChannel, config: &SearchConfig) -> Result<CapacityEstimate> {
    check_dims(n)?;
    let d = n.dim_in();
    let nc = n.complementary();
    let best = multistart(config.execution, config.restarts.max(2), |i| {
        let start = match i {
            0 => ComplexMatrix::identity(d).scale(1.0 / (d as f64).sqrt()),
            _ => reshape(&as_column(&random_unit_vector(&mut restart_rng(config.seed, i), d * d)), d),
        };
        let start = as_column(start.as_slice());
        let r = minimize_stiefel(&start, config.max_iter, GTOL, |v| {
            let (val, g) = coherent_objective(n, &nc, &reshape(v, d))?;
            Ok((-val, as_column(g.as_slice()).scale(-1.0)))
        })?;
        Ok((r.value, r.point))
    })?;
    let x = reshape(&best.best, d);
    let rho = DensityMatrix::new(x.matmul(&x.adjoint()).hermitian_part())?;
    let raw = -best.value;
    Ok(CapacityEstimate {
        value: raw.max(0.0),
        raw,
        optimizer: CapacityOptimizer::Input(rho),
        restarts: best.restarts,
        spread: best.spread,
        certified: false,
        gap: None,
    })
}

/// `I(R;B)` for input `ρ` (bits): `H(ρ) + H(N(ρ)) − H(N_c(ρ))`, with its
/// gradient `dI = Tr(G dρ)`.
pub fn ea_objective(n: &QuantumChannel, nc: &QuantumChannel, rho: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
    let b = n.apply(rho);
    let e = nc.apply(rho);
    let value = operator_entropy(rho)? + operator_entropy(&b)? - operator_entropy(&e)?;
    let mut g = operator_entropy_gradient(rho)?;
    g.axpy(1.0, &n.apply_adjoint(&operator_entropy_gradient(&b)?));
    g.axpy(-1.0, &nc.apply_adjoint(&operator_entropy_gradient(&e)?));
    Ok((value, g.hermitian_part()))
}

/// `max_ρ I(R;B)` by entropic mirror ascent
/// `log ρ ← log ρ + η G`, certified by the concavity bound
/// `I* − I(ρ) ≤ λ_max(G) − Tr(Gρ)`.
pub fn ea_capacity(n: &QuantumChannel, config: &SearchConfig) -> Result<CapacityEstimate> {
    check_dims(n)?;
    let d = n.dim_in();
    let nc = n.complementary();
    let mut rho = ComplexMatrix::identity(d).scale(1.0 / d as f64);
    let (mut value, mut g) = ea_objective(n, &nc, &rho)?;
    let mut eta = LN_2;
    let mut gap = f64::INFINITY;
    for _ in 0..config.max_iter.max(1) {
        gap = (eig_hermitian(&g)?.values[0] - g.inner_re(&rho)).max(0.0);
        if gap <= config.tol {
            break;
        }
        let log_rho = log_clamped(&rho)?;
        let mut improved = false;
        for _ in 0..30 {
            let mut h = log_rho.clone();
            h.axpy(eta, &g);
            let top = eig_hermitian(&h)?.values[0];
            let mut next = expm_hermitian(&(&h - &ComplexMatrix::identity(d).scale(top)))?;
            let z = next.trace().re;
            next = next.scale(1.0 / z).hermitian_part();
            let (nv, ng) = ea_objective(n, &nc, &next)?;
            if nv >= value {
                rho = next;
                value = nv;
                g = ng;
                improved = true;
                eta = (eta * 1.5).min(16.0);
                break;
            }
            eta *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if gap > config.tol {
        return Err(Error::SolverDiverged(format!("entanglement-assisted capacity certified only to {gap:.2e} bits")));
    }
    Ok(CapacityEstimate {
        value: value.max(0.0),
        raw: value,
        optimizer: CapacityOptimizer::Input(DensityMatrix::new(rho)?),
        restarts: 1,
        spread: 0.0,
        certified: true,
        gap: Some(gap),
    })
}
