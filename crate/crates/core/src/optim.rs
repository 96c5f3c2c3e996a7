//! Local search over isometries and the seeded multi-start driver shared by
//! the non-convex estimators (entanglement of purification, Holevo and
//! coherent-information capacities).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Execution};
use crate::qcore::eig::polar_isometry;
use crate::qcore::matrix::ComplexMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Gap tolerance for certified solves, bits.
    pub tol: f64,
    /// Iteration budget of each local search.
    pub max_iter: usize,
    /// Block length of the unassisted bound (1 or 2).
    pub k: usize,
    pub execution: Execution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 32, seed: 42, tol: 1e-6, max_iter: 3000, k: 1, execution: Execution::default() }
    }
}

/// Generator for restart `index`; independent of scheduling order.
pub fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

#[derive(Clone, Debug)]
pub struct LocalMin {
    pub point: ComplexMatrix,
    pub value: f64,
    pub iterations: usize,
    /// Frobenius norm of the Riemannian gradient at `point`.
    pub grad_norm: f64,
}

/// Minimizes `f` over isometries `V` (`V†V = I`) by Riemannian gradient
/// descent with polar retraction and Armijo backtracking.
///
/// `f` returns the value and the Euclidean gradient `G` with
/// `df = Re Tr(G† dV)`.
pub fn minimize_stiefel(
    start: &ComplexMatrix,
    max_iter: usize,
    gtol: f64,
    f: impl Fn(&ComplexMatrix) -> Result<(f64, ComplexMatrix)>,
) -> Result<LocalMin> {
    let mut v = polar_isometry(start)?;
    let (mut fv, g) = f(&v)?;
    let mut t = 1.0;
    let mut stalled = 0;
    let mut iterations = 0;
    let mut xi = tangent(&v, &g);
    let mut norm = xi.frobenius_norm();
    while iterations < max_iter && norm > gtol {
        iterations += 1;
        let slope = norm * norm;
        let mut accepted = None;
        for _ in 0..50 {
            let mut trial = v.clone();
            trial.axpy(-t, &xi);
            let trial = polar_isometry(&trial)?;
            let (ft, gt) = f(&trial)?;
            if ft <= fv - 1e-4 * t * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            t *= 0.5;
        }
        let Some((nv, nf, ng)) = accepted else { break };
        stalled = if fv - nf <= 1e-13 * (1.0 + fv.abs()) { stalled + 1 } else { 0 };
        let nxi = tangent(&nv, &ng);
        // Barzilai–Borwein guess for the next step, alternating the two forms.
        let mut step = nv.clone();
        step.axpy(-1.0, &v);
        let mut dy = nxi.clone();
        dy.axpy(-1.0, &xi);
        let sy = step.inner_re(&dy).abs();
        let bb = if iterations % 2 == 0 { step.inner_re(&step) / sy } else { sy / dy.inner_re(&dy) };
        t = if bb.is_finite() && bb > 0.0 { bb.clamp(1e-10, 1e10) } else { 2.0 * t };
        v = nv;
        fv = nf;
        xi = nxi;
        norm = xi.frobenius_norm();
        if stalled >= 10 {
            break;
        }
    }
    if !fv.is_finite() {
        return Err(Error::SolverDiverged("local search reached a non-finite value".into()));
    }
    Ok(LocalMin { point: v, value: fv, iterations, grad_norm: norm })
}

/// Projection of `g` onto the tangent space at `v`: `G − V herm(V†G)`.
fn tangent(v: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
    let sym = v.adjoint().matmul(g).hermitian_part();
    let mut xi = g.clone();
    xi.axpy(-1.0, &v.matmul(&sym));
    xi
}

/// Best of several independent attempts.
#[derive(Clone, Debug)]
pub struct MultiStart<T> {
    pub best: T,
    pub value: f64,
    /// Attempts that finished.
    pub restarts: usize,
    /// Largest minus smallest finished value.
    pub spread: f64,
}

/// Runs `attempt(i)` for `i < n` (concurrently when enabled) and keeps the
/// smallest value. Ties go to the lowest index, so the result does not
/// depend on scheduling.
pub fn multistart<T: Send>(exec: Execution, n: usize, attempt: impl Fn(usize) -> Result<(f64, T)> + Sync + Send) -> Result<MultiStart<T>> {
    let results = map_indexed(exec, n, attempt);
    let mut best: Option<(f64, T)> = None;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut finished = 0;
    let mut last_err = None;
    for r in results {
        match r {
            Ok((v, t)) => {
                finished += 1;
                lo = lo.min(v);
                hi = hi.max(v);
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, t));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some((value, best)) => Ok(MultiStart { best, value, restarts: finished, spread: hi - lo }),
        None => Err(last_err.unwrap_or_else(|| Error::InvalidParameter("no restarts requested".into()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::gaussian_matrix;

    #[test]
    fn finds_the_bottom_eigenspace() {
        // min Tr(V† H V) over 4×2 isometries is the sum of the two smallest eigenvalues.
        let h = ComplexMatrix::from_real_diag(&[3.0, -1.0, 2.0, 0.5]);
        let mut rng = restart_rng(7, 0);
        let start = gaussian_matrix(&mut rng, 4, 2);
        let r = minimize_stiefel(&start, 2000, 1e-10, |v| {
            let hv = h.matmul(v);
            Ok((v.adjoint().matmul(&hv).trace().re, hv.scale(2.0)))
        })
        .unwrap();
        assert!((r.value + 0.5).abs() < 1e-9, "{} {} {}", r.value, r.iterations, r.grad_norm);
        let gram = r.point.adjoint().matmul(&r.point);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn multistart_is_order_independent() {
        let f = |i: usize| Ok(((i as f64 - 3.0).powi(2), i));
        let a = multistart(Execution::Sequential, 8, f).unwrap();
        let b = multistart(Execution::Parallel, 8, f).unwrap();
        assert_eq!((a.best, a.value, a.spread), (3, 0.0, 16.0));
        assert_eq!((b.best, b.restarts), (3, 8));
    }

    #[test]
    fn restart_streams_differ_and_repeat() {
        use rand::Rng;
        let x: u64 = restart_rng(42, 0).random();
        let y: u64 = restart_rng(42, 1).random();
        assert_ne!(x, y);
        assert_eq!(x, restart_rng(42, 0).random::<u64>());
    }
}
