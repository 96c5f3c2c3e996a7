//! Entanglement of purification and the single-block unassisted
//! rate–distortion upper bound.
//!
//! Both problems minimize an output entropy over channels on a purifying
//! system. A channel `Λ: S → O` is parameterized by an isometry
//! `V: S → O ⊗ K` with row index `k·dim(O) + o`, so that `V_k`, the `k`-th
//! block of `dim(O)` rows, is a Kraus operator. The search is local and
//! multi-start; results are upper estimates, never certified minima.

use serde::Serialize;

use crate::entropic::{operator_entropy, operator_entropy_gradient, von_neumann_entropy, BipartiteState};
use crate::error::{Error, Result};
use crate::optim::{minimize_stiefel, multistart, restart_rng, SearchConfig};
use crate::qcore::channel::QuantumChannel;
use crate::qcore::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::qcore::random::random_isometry;
use crate::qcore::state::{purify, DensityMatrix};
use crate::rdsolve::{solve_r_eac, zero_rate_threshold, SolverConfig};

/// Largest `d_A · d_B` accepted by [`entanglement_of_purification`].
pub const MAX_EOP_DIM: usize = 16;

const GTOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct EopEstimate {
    /// Best entropy found, bits.
    pub value: f64,
    pub restarts: usize,
    /// Largest minus smallest restart value.
    pub spread: f64,
    /// The minimizing channel on the purifying system.
    pub best_map: QuantumChannel,
    /// `H(BE)` of the purification, attained by the identity map.
    pub purification_entropy: f64,
}

/// `σ = Σ_k (I_L ⊗ V_k) μ (I_L ⊗ V_k)†` on `L ⊗ O` and its entropy gradient
/// with respect to `V`.
struct DilatedEntropy<'a> {
    mu: &'a ComplexMatrix,
    left: usize,
    src: usize,
    out: usize,
    kdim: usize,
}

impl DilatedEntropy<'_> {
    fn lifted(&self, v: &ComplexMatrix, k: usize) -> ComplexMatrix {
        let vk = v.block(k, 0, self.out, self.src);
        ComplexMatrix::identity(self.left).kron(&vk)
    }

    fn state(&self, v: &ComplexMatrix) -> ComplexMatrix {
        let n = self.left * self.out;
        let mut sigma = ComplexMatrix::zeros(n, n);
        for k in 0..self.kdim {
            sigma.axpy(1.0, &self.lifted(v, k).conjugate(self.mu));
        }
        sigma.hermitian_part()
    }

    /// Entropy of `σ` in bits with its gradient.
    fn eval(&self, v: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
        let sigma = self.state(v);
        let h = operator_entropy(&sigma)?;
        let x = operator_entropy_gradient(&sigma)?;
        let mut grad = ComplexMatrix::zeros(self.out * self.kdim, self.src);
        for k in 0..self.kdim {
            let m = self.mu.matmul(&self.lifted(v, k).adjoint()).matmul(&x);
            for o in 0..self.out {
                for s in 0..self.src {
                    let mut p = ZERO;
                    for l in 0..self.left {
                        p += m[(l * self.src + s, l * self.out + o)];
                    }
                    // G_k = 2 P_k†.
                    grad[(k * self.out + o, s)] = p.conj() * 2.0;
                }
            }
        }
        Ok((h, grad))
    }
}

fn kraus_of(v: &ComplexMatrix, out: usize, kdim: usize) -> Vec<ComplexMatrix> {
    (0..kdim).map(|k| v.block(k, 0, out, v.cols())).filter(|b| b.max_abs() > 0.0).collect()
}

/// Isometry `|s⟩ ↦ |s⟩_O |0⟩_K` (keeps the system).
fn keep_isometry(src: usize, out: usize, kdim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(out * kdim, src, |r, c| if r == c { ONE } else { ZERO })
}

/// Isometry `|s⟩ ↦ |0⟩_O |s⟩_K` (discards the system).
fn discard_isometry(src: usize, out: usize, kdim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(out * kdim, src, |r, c| if r == c * out { ONE } else { ZERO })
}

/// Upper estimate of `E_p(ω_AB) = min_Λ H((id_B ⊗ Λ_E)(μ_BE))`, where
/// `μ_BE = Tr_A φ` for a purification `φ_ABE` of `ω`.
///
/// `Λ_E` maps `E` to a system of the same dimension with at most `d_E²`
/// Kraus operators. The identity and the full discard are always among the
/// starting points, so the estimate never exceeds `min(H(BE), H(B))`.
pub fn entanglement_of_purification(w: &BipartiteState, config: &SearchConfig) -> Result<EopEstimate> {
    let (da, db) = w.dims();
    if da * db > MAX_EOP_DIM {
        return Err(Error::DimensionTooLarge(format!("d_A·d_B = {} exceeds {MAX_EOP_DIM}", da * db)));
    }
    let phi = purify(w.state())?;
    let de = phi.dim_r();
    let v = phi.vector();
    // μ on B ⊗ E from φ with index e·(d_A d_B) + a·d_B + b.
    let mu = ComplexMatrix::from_fn(db * de, db * de, |r, c| {
        let (b, e) = (r / de, r % de);
        let (b2, e2) = (c / de, c % de);
        let mut s = ZERO;
        for a in 0..da {
            s += v[e * da * db + a * db + b] * v[e2 * da * db + a * db + b2].conj();
        }
        s
    });
    let (out, kdim) = (de, de * de);
    let problem = DilatedEntropy { mu: &mu, left: db, src: de, out, kdim };
    let purification_entropy = operator_entropy(&mu)?;
    let best = multistart(config.execution, config.restarts.max(2), |i| {
        let start = match i {
            0 => keep_isometry(de, out, kdim),
            1 => discard_isometry(de, out, kdim),
            _ => random_isometry(&mut restart_rng(config.seed, i), out * kdim, de),
        };
        let r = minimize_stiefel(&start, config.max_iter, GTOL, |x| problem.eval(x))?;
        Ok((r.value.max(0.0), r.point))
    })?;
    let best_map = QuantumChannel::from_kraus_unchecked(kraus_of(&best.best, out, kdim));
    Ok(EopEstimate {
        value: best.value,
        restarts: best.restarts,
        spread: best.spread,
        best_map,
        purification_entropy,
    })
}

#[derive(Clone, Debug)]
pub struct UnassistedBound {
    /// Bits per source symbol.
    pub value: f64,
    /// The channel `N^{(k)}` on `k` copies attaining `value`.
    pub channel: QuantumChannel,
    /// `d(ρ^{⊗k}, N^{(k)})`.
    pub achieved_distortion: f64,
    pub restarts: usize,
    pub spread: f64,
}

/// Search problem for the `k`-block bound:
/// `min_T H(Tr_K T ρ T†)` over isometries `T: A → B ⊗ E' ⊗ K` whose channel
/// to `B` meets the distortion target.
struct JointProblem<'a> {
    entropy: DilatedEntropy<'a>,
    rho: &'a ComplexMatrix,
    env: usize,
}

impl JointProblem<'_> {
    fn d(&self) -> usize {
        self.entropy.src
    }

    /// Entanglement fidelity `Σ |Tr(ρ K)|²` over Kraus operators
    /// `K[b, a] = T[k·O + b·E' + e, a]`, with its gradient.
    fn fidelity(&self, t: &ComplexMatrix) -> (f64, ComplexMatrix) {
        let (d, env, out) = (self.d(), self.env, self.entropy.out);
        let mut f = 0.0;
        let mut grad = ComplexMatrix::zeros(t.rows(), d);
        for k in 0..self.entropy.kdim {
            for e in 0..env {
                let row = |b: usize| k * out + b * env + e;
                let mut tr = ZERO;
                for b in 0..d {
                    for a in 0..d {
                        tr += self.rho[(a, b)] * t[(row(b), a)];
                    }
                }
                f += tr.norm_sqr();
                for b in 0..d {
                    for a in 0..d {
                        grad[(row(b), a)] = tr * self.rho[(b, a)] * 2.0;
                    }
                }
            }
        }
        (f, grad)
    }

    fn penalized(&self, t: &ComplexMatrix, target: f64, weight: f64) -> Result<(f64, ComplexMatrix)> {
        let (h, mut g) = self.entropy.eval(t)?;
        let (f, gf) = self.fidelity(t);
        let excess = (1.0 - f - target).max(0.0);
        g.axpy(-2.0 * weight * excess, &gf);
        Ok((h + weight * excess * excess, g))
    }

    fn channel(&self, t: &ComplexMatrix) -> QuantumChannel {
        let (d, env, out) = (self.d(), self.env, self.entropy.out);
        let mut kraus = Vec::new();
        for k in 0..self.entropy.kdim {
            for e in 0..env {
                let m = ComplexMatrix::from_fn(d, d, |b, a| t[(k * out + b * env + e, a)]);
                if m.max_abs() > 0.0 {
                    kraus.push(m);
                }
            }
        }
        QuantumChannel::from_kraus_unchecked(kraus)
    }
}

const PENALTY_SCHEDULE: [f64; 5] = [1e1, 1e2, 1e3, 1e4, 1e5];

/// Smallest entropy over the `k = 1` or `k = 2` block formulation: an upper
/// bound on the unassisted quantum rate–distortion function at `D`.
///
/// The distortion of the block channel is the entanglement-fidelity
/// distortion on `ρ^{⊗k}`. The constraint is imposed by a quadratic penalty
/// and any residual violation is removed by mixing in the identity channel,
/// so the reported value is always attained by a feasible channel.
pub fn unassisted_rd_upper(rho: &DensityMatrix, d: f64, config: &SearchConfig) -> Result<UnassistedBound> {
    if !(0.0..1.0).contains(&d) {
        return Err(Error::InvalidDistortion(d));
    }
    let k = config.k;
    let dim = rho.dim();
    if k == 0 || k > 2 || (k == 2 && dim != 2) || dim > 4 {
        return Err(Error::DimensionTooLarge(format!("block length {k} for a source of dim {dim}")));
    }
    let block = rho.tensor_power(k);
    let da = block.dim();
    let h = von_neumann_entropy(&block);
    let identity = QuantumChannel::from_kraus_unchecked(vec![ComplexMatrix::identity(da)]);
    if d == 0.0 || h <= 1e-12 {
        return Ok(UnassistedBound { value: h / k as f64, channel: identity, achieved_distortion: 0.0, restarts: 0, spread: 0.0 });
    }
    if d >= zero_rate_threshold(&block)? {
        // A constant channel leaves R and B in a product state.
        let sigma = best_constant(&block)?;
        let channel = QuantumChannel::from_kraus_unchecked(constant_kraus(&sigma, da));
        let achieved = 1.0 - fidelity_of(&channel, &block);
        return Ok(UnassistedBound { value: 0.0, channel, achieved_distortion: achieved, restarts: 0, spread: 0.0 });
    }
    let env = if k == 1 { da * da } else { da };
    let out = da * env;
    let kdim = da * out;
    let problem = JointProblem { entropy: DilatedEntropy { mu: block.matrix(), left: 1, src: da, out, kdim }, rho: block.matrix(), env };
    let sigma_id = problem.entropy.state(&keep_isometry(da, out, kdim));
    let best = multistart(config.execution, config.restarts.max(1), |i| {
        let mut t = match i {
            0 => near_identity(da, out, kdim, config.seed),
            _ => random_isometry(&mut restart_rng(config.seed, i), out * kdim, da),
        };
        for &weight in &PENALTY_SCHEDULE {
            t = minimize_stiefel(&t, config.max_iter, GTOL, |x| problem.penalized(x, d, weight))?.point;
        }
        let (f, _) = problem.fidelity(&t);
        let achieved = 1.0 - f;
        // Mixing weight s on the identity: distortion (1 − s)·achieved ≤ d.
        let s = if achieved > d { 1.0 - d / achieved } else { 0.0 };
        let mut sigma = problem.entropy.state(&t).scale(1.0 - s);
        sigma.axpy(s, &sigma_id);
        let value = operator_entropy(&sigma)?;
        Ok((value, (t, s)))
    })?;
    let (t, s) = best.best;
    let mut channel = problem.channel(&t);
    if s > 0.0 {
        channel = channel.mix(1.0 - s, &identity)?;
    }
    let achieved = 1.0 - fidelity_of(&channel, &block);
    Ok(UnassistedBound {
        value: best.value / k as f64,
        channel,
        achieved_distortion: achieved,
        restarts: best.restarts,
        spread: best.spread / k as f64,
    })
}

/// Identity embedding slightly rotated, to avoid starting on a saddle.
fn near_identity(da: usize, out: usize, kdim: usize, seed: u64) -> ComplexMatrix {
    let mut t = keep_isometry(da, out, kdim);
    let noise = random_isometry(&mut restart_rng(seed, usize::MAX >> 1), out * kdim, da);
    t.axpy(1e-3, &noise);
    t
}

fn fidelity_of(channel: &QuantumChannel, rho: &DensityMatrix) -> f64 {
    channel.kraus().iter().map(|k| rho.matrix().trace_product(k).norm_sqr()).sum::<f64>().clamp(0.0, 1.0)
}

fn best_constant(rho: &DensityMatrix) -> Result<DensityMatrix> {
    // A constant pure output |v⟩ has F_e = ⟨v|ρ²|v⟩, largest at the top eigenvector.
    let e = rho.eigen();
    DensityMatrix::pure(&e.vector(0))
}

fn constant_kraus(sigma: &DensityMatrix, d_in: usize) -> Vec<ComplexMatrix> {
    let v: Vec<C64> = sigma.eigen().vector(0);
    (0..d_in)
        .map(|i| ComplexMatrix::from_fn(sigma.dim(), d_in, |o, c| if c == i { v[o] } else { ZERO }))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub d: f64,
    /// `R_eaq(D)`.
    pub lower: f64,
    /// The `k`-block unassisted upper bound.
    pub upper: f64,
    /// `lower ≤ upper + 1e-6`.
    pub ok: bool,
    /// Smallest coherent information `I(R⟩B)` over channels meeting the
    /// distortion target. It can be negative, unlike any rate.
    pub coherent_information_min: f64,
}

/// Checks `R_eaq(D) ≤ unassisted upper bound` and evaluates the
/// coherent-information alternative at the same target.
///
/// `I(R⟩B) = I(R;B) − H(ρ)`, so its minimum over feasible channels is
/// `R_eac(D) − H(ρ)` and comes from the same certified solve.
pub fn sandwich_check(rho: &DensityMatrix, d: f64, solver: &SolverConfig, search: &SearchConfig) -> Result<SandwichReport> {
    let eac = solve_r_eac(rho, d, solver)?;
    let upper = unassisted_rd_upper(rho, d, search)?.value;
    let lower = eac.rate / 2.0;
    Ok(SandwichReport {
        d,
        lower,
        upper,
        ok: lower <= upper + 1e-6,
        coherent_information_min: eac.rate - von_neumann_entropy(rho),
    })
}

/// [`unassisted_rd_upper`] on an ascending grid. A channel feasible at one
/// target is feasible at every larger one, so each value is the minimum of
/// its own search and all earlier values.
pub fn unassisted_rd_curve(rho: &DensityMatrix, grid: &[f64], config: &SearchConfig) -> Result<Vec<UnassistedBound>> {
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("distortion grid must be sorted".into()));
    }
    let mut out: Vec<UnassistedBound> = Vec::with_capacity(grid.len());
    for &d in grid {
        let b = unassisted_rd_upper(rho, d, config)?;
        match out.last() {
            Some(prev) if prev.value < b.value => out.push(prev.clone()),
            _ => out.push(b),
        }
    }
    Ok(out)
}
