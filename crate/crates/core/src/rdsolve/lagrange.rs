//! Minimization of `I(R;B)_ω − λ ⟨ψ|ω|ψ⟩` over
//! `S = {ω ≥ 0, Tr_B ω = diag(λ_ρ)}` (natural logarithms throughout).
//!
//! Alternating minimization: `I(R;B)_ω = min_σ D(ω ‖ ρ_R ⊗ σ)`, so for fixed
//! `σ` the minimizer over `S` is `ω = exp(I ⊗ log σ + λΨ + Γ ⊗ I)` with the
//! Hermitian multiplier `Γ` fixed by the partial-trace constraint, and for
//! fixed `ω` the best `σ` is `ω_B`.
//!
//! `Γ` minimizes the convex dual `φ(Γ) = Tr exp(K + Γ⊗I) − Tr(Γ ρ_R)`, solved
//! by damped Newton using the Fréchet derivative of the exponential.
//!
//! Certificate: with `G = ∇f(ω)` and any Hermitian `Γ`,
//! `f(ω) − min_S f ≤ Tr((G − Γ⊗I) ω) − λ_min(G − Γ⊗I)`. At an iterate
//! `G − Γ⊗I = I ⊗ (log σ − log ω_B)`, which gives the cheap bound used below.

use crate::error::{Error, Result};
use crate::numeric::{from_hermitian_coords, hermitian_basis, hermitian_coords, solve_linear};
use crate::qcore::eig::{eig_hermitian, HermitianEigen};
use crate::qcore::matrix::{ComplexMatrix, C64};
use crate::rdsolve::model::{clamp_psd, SourceModel};

const LOG_FLOOR: f64 = 1e-300;
const NEWTON_TOL: f64 = 1e-13;

/// Warm-startable solver state.
#[derive(Clone, Debug)]
pub(crate) struct LagrangeState {
    pub omega: ComplexMatrix,
    pub gamma: ComplexMatrix,
    pub sigma: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub(crate) struct LagrangeSolution {
    pub state: LagrangeState,
    /// Certified suboptimality of the Lagrangian, nats.
    pub gap: f64,
}

fn log_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(m)?.map(|x| x.max(LOG_FLOOR).ln()))
}

pub(crate) fn initial_state(model: &SourceModel) -> LagrangeState {
    let d = model.d;
    let lam = model.lambda_matrix();
    // 0.99 identity channel + 0.01 completely depolarizing.
    let mut omega = model.psi_proj.scale(0.99);
    omega.axpy(0.01 / d as f64, &lam.kron(&ComplexMatrix::identity(d)));
    let sigma = omega.trace_leading(model.r);
    let gamma = ComplexMatrix::from_real_diag(&model.lambdas.iter().map(|l| l.ln()).collect::<Vec<_>>());
    LagrangeState { omega, gamma, sigma }
}

struct ExpData {
    eig: HermitianEigen,
    exp_vals: Vec<f64>,
    omega: ComplexMatrix,
}

fn exp_data(h: &ComplexMatrix) -> Result<ExpData> {
    let eig = eig_hermitian(h)?;
    if eig.values[0] > 700.0 {
        return Err(Error::SolverDiverged("exponent overflow in multiplier update".into()));
    }
    let exp_vals: Vec<f64> = eig.values.iter().map(|v| v.exp()).collect();
    let omega = eig.map(f64::exp);
    Ok(ExpData { eig, exp_vals, omega })
}

/// Finds `Γ` with `Tr_B exp(K + Γ⊗I) = ρ_R`.
fn solve_multiplier(model: &SourceModel, k: &ComplexMatrix, gamma0: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (r, d) = (model.r, model.d);
    let id_b = ComplexMatrix::identity(d);
    let lam = model.lambda_matrix();
    let basis = hermitian_basis(r);
    let lifted: Vec<ComplexMatrix> = basis.iter().map(|b| b.kron(&id_b)).collect();
    let hamiltonian = |g: &ComplexMatrix| {
        let mut h = k.clone();
        h += &g.kron(&id_b);
        h
    };
    // Normalize so that Tr exp(K + Γ⊗I) = 1 before starting.
    let mut gamma = gamma0.clone();
    let vals = eig_hermitian(&hamiltonian(&gamma))?.values;
    let top = vals[0];
    let lse = top + vals.iter().map(|v| (v - top).exp()).sum::<f64>().ln();
    gamma.axpy(-lse, &ComplexMatrix::identity(r));
    let phi = |g: &ComplexMatrix, e: &ExpData| e.exp_vals.iter().sum::<f64>() - g.inner_re(&lam);
    let mut cur = exp_data(&hamiltonian(&gamma))?;
    for _ in 0..100 {
        let grad_m = &cur.omega.trace_trailing(d) - &lam;
        if grad_m.max_abs() <= NEWTON_TOL {
            return Ok((gamma, cur.omega));
        }
        let g = hermitian_coords(&grad_m, &basis);
        let n = basis.len();
        let u = &cur.eig.vectors;
        let h = &cur.eig.values;
        let dim = h.len();
        let mut divided = vec![0.0; dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                let dh = h[a] - h[b];
                divided[a * dim + b] = if dh.abs() < 1e-9 {
                    (0.5 * (h[a] + h[b])).exp() * (1.0 + dh * dh / 24.0)
                } else {
                    (cur.exp_vals[a] - cur.exp_vals[b]) / dh
                };
            }
        }
        let rotated: Vec<ComplexMatrix> = lifted.iter().map(|x| u.adjoint().matmul(x).matmul(u)).collect();
        let mut hess = vec![0.0; n * n];
        for m in 0..n {
            for l in m..n {
                let (xm, xl) = (&rotated[m], &rotated[l]);
                let mut acc = 0.0;
                for a in 0..dim {
                    for b in 0..dim {
                        acc += divided[a * dim + b] * (xm[(b, a)] * xl[(a, b)]).re;
                    }
                }
                hess[m * n + l] = acc;
                hess[l * n + m] = acc;
            }
        }
        let step = solve_linear(hess, g.iter().map(|x| -x).collect())
            .ok_or_else(|| Error::SolverDiverged("singular Hessian in multiplier update".into()))?;
        let slope: f64 = g.iter().zip(&step).map(|(a, b)| a * b).sum();
        let dgamma = from_hermitian_coords(&step, &basis);
        let f0 = phi(&gamma, &cur);
        let r0 = grad_m.max_abs();
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = gamma.clone();
            trial.axpy(t, &dgamma);
            if let Ok(e) = exp_data(&hamiltonian(&trial)) {
                // Near the solution φ changes below its rounding level, so the
                // residual itself is the merit function there.
                let residual = (&e.omega.trace_trailing(d) - &lam).max_abs();
                let armijo = phi(&trial, &e) <= f0 + 1e-4 * t * slope;
                if armijo || (r0 < 1e-6 && residual < 0.5 * r0) {
                    gamma = trial;
                    cur = e;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            // Already at the precision floor of φ.
            let residual = (&cur.omega.trace_trailing(d) - &lam).max_abs();
            if residual <= 1e-10 {
                return Ok((gamma, cur.omega));
            }
            return Err(Error::SolverDiverged(format!("multiplier line search stalled (residual {residual:.2e})")));
        }
    }
    let residual = (&cur.omega.trace_trailing(d) - &lam).max_abs();
    if residual <= 1e-10 {
        Ok((gamma, cur.omega))
    } else {
        Err(Error::SolverDiverged(format!("multiplier update did not converge (residual {residual:.2e})")))
    }
}

/// Alternating minimization from `start` until the certified gap drops to
/// `tol` nats or `max_iter` iterations have been spent.
pub(crate) fn blahut_arimoto(
    model: &SourceModel,
    lambda: f64,
    start: &LagrangeState,
    tol: f64,
    max_iter: usize,
) -> Result<LagrangeSolution> {
    let (r, d) = (model.r, model.d);
    let id_r = ComplexMatrix::identity(r);
    let mut sigma = start.sigma.clone();
    let mut gamma = start.gamma.clone();
    let mut log_sigma = log_psd(&sigma)?;
    let mut best: Option<LagrangeSolution> = None;
    for _ in 0..max_iter {
        let mut k = id_r.kron(&log_sigma);
        k.axpy(lambda, &model.psi_proj);
        let (g, omega) = solve_multiplier(model, &k, &gamma)?;
        gamma = g;
        let omega_b = omega.trace_leading(r);
        let log_b = log_psd(&omega_b)?;
        let delta = (&log_sigma - &log_b).hermitian_part();
        let dmin = eig_hermitian(&delta)?.values[d - 1];
        let gap = (delta.inner_re(&omega_b) - dmin).max(0.0);
        sigma = omega_b;
        log_sigma = log_b;
        let sol = LagrangeSolution {
            state: LagrangeState { omega, gamma: gamma.clone(), sigma: sigma.clone() },
            gap,
        };
        let done = gap <= tol;
        if best.as_ref().is_none_or(|b| gap <= b.gap) {
            best = Some(sol);
        }
        if done {
            break;
        }
    }
    Ok(best.expect("at least one iteration"))
}

/// `f(ω)` in nats.
pub(crate) fn lagrangian(model: &SourceModel, lambda: f64, omega: &ComplexMatrix) -> Result<f64> {
    Ok(model.mutual_information(omega)? * std::f64::consts::LN_2 - lambda * model.fidelity(omega))
}

/// Euclidean projection onto `S` by Dykstra's alternating projections
/// between the PSD cone and the affine constraint set.
pub(crate) fn project_feasible(model: &SourceModel, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (r, d) = (model.r, model.d);
    let lam = model.lambda_matrix();
    let id_b = ComplexMatrix::identity(d);
    let affine = |y: &ComplexMatrix| {
        let excess = &y.trace_trailing(d) - &lam;
        let mut out = y.clone();
        out.axpy(-1.0 / d as f64, &excess.kron(&id_b));
        out
    };
    let mut y = x.hermitian_part();
    let mut p = ComplexMatrix::zeros(r * d, r * d);
    let mut q = ComplexMatrix::zeros(r * d, r * d);
    for _ in 0..500 {
        let a = affine(&(&y + &p));
        p = &(&y + &p) - &a;
        let z = clamp_psd(&(&a + &q))?;
        q = &(&a + &q) - &z;
        let change = z.max_abs_diff(&y);
        y = z;
        if change < 1e-13 {
            break;
        }
    }
    // Finish on the affine set; the residual negativity is at rounding level.
    Ok(affine(&y))
}

/// Frank–Wolfe style bound for an arbitrary feasible `ω`, nats.
pub(crate) fn certify(model: &SourceModel, lambda: f64, omega: &ComplexMatrix) -> Result<f64> {
    let (r, d) = (model.r, model.d);
    // Multiples of the identity in the gradient cancel on S, which has unit trace.
    let mut g = model.mutual_information_gradient(omega)?.scale(std::f64::consts::LN_2);
    g.axpy(-lambda, &model.psi_proj);
    let gamma = g.trace_trailing(d).scale(1.0 / d as f64);
    let shifted = &g - &gamma.kron(&ComplexMatrix::identity(d));
    let m = eig_hermitian(&shifted.hermitian_part())?.values[r * d - 1];
    Ok((shifted.inner_re(omega) - m).max(0.0))
}

/// Projected gradient descent on `S`, used when the alternating scheme
/// stalls.
pub(crate) fn projected_gradient(
    model: &SourceModel,
    lambda: f64,
    start: &ComplexMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<LagrangeSolution> {
    let ln2 = std::f64::consts::LN_2;
    let mut omega = project_feasible(model, start)?;
    let mut f = lagrangian(model, lambda, &omega)?;
    let mut step = 0.1;
    let mut gap = certify(model, lambda, &omega)?;
    for _ in 0..max_iter {
        if gap <= tol {
            break;
        }
        let mut g = model.mutual_information_gradient(&omega)?.scale(ln2);
        g.axpy(-lambda, &model.psi_proj);
        let mut improved = false;
        for _ in 0..40 {
            let mut trial = omega.clone();
            trial.axpy(-step, &g);
            let trial = project_feasible(model, &trial)?;
            let ft = lagrangian(model, lambda, &trial)?;
            let diff = &trial - &omega;
            if ft <= f + 0.5 * g.inner_re(&diff) + 1e-16 * f.abs() {
                omega = trial;
                f = ft;
                improved = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
        gap = certify(model, lambda, &omega)?;
    }
    let sigma = omega.trace_leading(model.r);
    let gamma = ComplexMatrix::from_fn(model.r, model.r, |i, j| if i == j { C64::new(model.lambdas[i].ln(), 0.0) } else { C64::new(0.0, 0.0) });
    Ok(LagrangeSolution { state: LagrangeState { omega, gamma, sigma }, gap })
}
