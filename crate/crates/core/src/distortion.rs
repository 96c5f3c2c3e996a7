//! Block channels on `n` copies of a source, their single-copy marginals and
//! the average-distortion bound for channel simulations.

use serde::Serialize;

use crate::entropic::{channel_output_state, distortion, trace_norm_difference};
use crate::error::{Error, Result};
use crate::qcore::channel::{ChoiMatrix, QuantumChannel};
use crate::qcore::matrix::{partial_trace, permute_subsystems, tensor_all, ComplexMatrix};
use crate::qcore::state::{purify, DensityMatrix};

/// Largest matrix dimension `d^{2n}` handled by [`lemma1_check`].
pub const MAX_BLOCK_DIM: usize = 64;

/// A channel acting on `n` copies of a `d`-dimensional system.
#[derive(Clone, Debug)]
pub struct BlockChannel {
    n: usize,
    d: usize,
    channel: QuantumChannel,
}

impl BlockChannel {
    /// Infers the single-copy dimension from `dim_in = dim_out = d^n`.
    pub fn new(channel: QuantumChannel, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("block length must be positive".into()));
        }
        if channel.dim_in() != channel.dim_out() {
            return Err(Error::DimensionMismatch("block channel must have dim_in = dim_out".into()));
        }
        let dim = channel.dim_in();
        let d = (1..=dim)
            .find(|d| d.checked_pow(n as u32) == Some(dim))
            .ok_or_else(|| Error::DimensionMismatch(format!("dimension {dim} is not an {n}-th power")))?;
        Ok(Self { n, d, channel })
    }

    /// `N^{⊗n}`.
    pub fn product(single: &QuantumChannel, n: usize) -> Result<Self> {
        Self::new(single.tensor_power(n), n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn channel(&self) -> &QuantumChannel {
        &self.channel
    }
}

/// Single-copy marginal of `f` on copy `i` (1-based) at the source `rho`:
///
/// `X ↦ Tr_{j≠i} F(ρ^{⊗(i−1)} ⊗ X ⊗ ρ^{⊗(n−i)})`.
///
/// At `X = ρ` this is `Tr_{j≠i} F(ρ^{⊗n})`. It is also the map whose action
/// on half of a purification reproduces the `R_i B_i` marginal of
/// `(id ⊗ F)(ψ^{⊗n})`, which is what per-copy entanglement fidelity needs.
pub fn marginal_channel(f: &BlockChannel, i: usize, rho: &DensityMatrix) -> Result<QuantumChannel> {
    if i == 0 || i > f.n {
        return Err(Error::IndexOutOfRange { index: i, n: f.n });
    }
    if rho.dim() != f.d {
        return Err(Error::DimensionMismatch(format!("source of dim {} for block of dim {}", rho.dim(), f.d)));
    }
    let dims = vec![f.d; f.n];
    let choi = ChoiMatrix::from_linear_map(f.d, f.d, |x| {
        let factors: Vec<&ComplexMatrix> = (1..=f.n).map(|j| if j == i { x } else { rho.matrix() }).collect();
        let out = f.channel.apply(&tensor_all(factors));
        partial_trace(&out, &dims, &[i - 1]).expect("block dims are consistent")
    })?;
    choi.to_channel()
}

/// `(1/n) Σ_i d(ρ, F^{(i)})`.
pub fn average_distortion(rho: &DensityMatrix, f: &BlockChannel) -> Result<f64> {
    let mut total = 0.0;
    for i in 1..=f.n {
        total += distortion(rho, &marginal_channel(f, i, rho)?)?;
    }
    Ok(total / f.n as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Report {
    /// `‖(id ⊗ F)(ψ^{⊗n}) − ω^{⊗n}‖₁` with `ω = (id ⊗ N)(ψ)`.
    pub lhs: f64,
    pub dbar: f64,
    /// `d(ρ, N)` of the simulated channel.
    pub target_distortion: f64,
    pub eps: f64,
    /// `lhs ≤ eps`.
    pub premise: bool,
    /// `dbar ≤ target + lhs + 1e-9`; implies the bound at any `eps ≥ lhs`.
    pub bound_holds: bool,
}

/// Checks that a block simulation close to `N^{⊗n}` on the purified source
/// has average distortion close to `d(ρ, N)`.
pub fn lemma1_check(rho: &DensityMatrix, n_target: &QuantumChannel, f: &BlockChannel, eps: f64) -> Result<Lemma1Report> {
    let (d, n) = (f.d, f.n);
    if rho.dim() != d || n_target.dim_in() != d || n_target.dim_out() != d {
        return Err(Error::DimensionMismatch("source, target and block channel dimensions differ".into()));
    }
    match d.checked_pow(2 * n as u32) {
        Some(size) if size <= MAX_BLOCK_DIM => {}
        _ => return Err(Error::BlockTooLarge(format!("d^(2n) = {d}^{} exceeds {MAX_BLOCK_DIM}", 2 * n))),
    }
    let psi = purify(rho)?;
    let r = psi.dim_r();
    let psi_n = psi.tensor_power(n)?;
    // σ on R_1..R_n B_1..B_n.
    let sigma = f.channel.apply_on_second(&psi_n.projector(), psi_n.dim_r());
    let omega = channel_output_state(&psi, n_target)?;
    let omega_n = tensor_all(vec![omega.state().matrix(); n]);
    // ω^{⊗n} is ordered R_1 B_1 R_2 B_2 …; bring it to R_1..R_n B_1..B_n.
    let dims: Vec<usize> = (0..n).flat_map(|_| [r, d]).collect();
    let perm: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
    let omega_n = permute_subsystems(&omega_n, &dims, &perm)?;
    let lhs = trace_norm_difference(&sigma, &omega_n)?;
    let dbar = average_distortion(rho, f)?;
    let target_distortion = distortion(rho, n_target)?;
    Ok(Lemma1Report {
        lhs,
        dbar,
        target_distortion,
        eps,
        premise: lhs <= eps,
        bound_holds: dbar <= target_distortion + lhs + 1e-9,
    })
}
