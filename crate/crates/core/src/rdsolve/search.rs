//! Multiplier search for a distortion target.
//!
//! For a Lagrangian solution `ω_λ` with distortion `D_λ ≤ D` and Lagrangian
//! gap `g`, every feasible point at distortion `D` has rate at least
//! `I(ω_λ) − λ (D − D_λ) − g`. The search therefore stops as soon as
//! `λ (D − D_λ) + g ≤ tol`, which certifies the returned rate.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) struct Eval<S> {
    pub state: S,
    pub distortion: f64,
    pub rate: f64,
    /// Lagrangian gap in bits.
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Found<S> {
    pub lambda: f64,
    pub eval: Eval<S>,
    /// `λ (D − D_λ) + g`, bits.
    pub certificate: f64,
    pub evaluations: usize,
}

const MIN_LAMBDA: f64 = 1e-12;
const MAX_LAMBDA: f64 = 1e9;

/// `eval(λ, warm)` solves the Lagrangian at `λ` (bits per unit distortion).
/// `D_λ` must be non-increasing in `λ`.
pub(crate) fn target_search<S: Clone>(
    target: f64,
    tol: f64,
    mut eval: impl FnMut(f64, Option<&S>) -> Result<Eval<S>>,
) -> Result<Found<S>> {
    let cert = |lambda: f64, e: &Eval<S>| lambda * (target - e.distortion).max(0.0) + e.gap;
    let mut evaluations = 0;
    let mut run = |t: f64, warm: Option<&S>| {
        evaluations += 1;
        eval(t.exp(), warm)
    };
    let mut t = 0.0f64;
    let first = run(t, None)?;
    let mut lo: Option<(f64, Eval<S>)> = None;
    let mut hi: Option<(f64, Eval<S>)>;
    let step = 4.0f64.ln();
    if first.distortion <= target {
        hi = Some((t, first));
        loop {
            let (th, eh) = hi.as_ref().unwrap();
            if cert(th.exp(), eh) <= tol {
                break;
            }
            t -= step;
            if t.exp() < MIN_LAMBDA {
                break;
            }
            let warm = eh.state.clone();
            let e = run(t, Some(&warm))?;
            if e.distortion > target {
                lo = Some((t, e));
                break;
            }
            hi = Some((t, e));
        }
    } else {
        lo = Some((t, first));
        loop {
            t += step;
            if t.exp() > MAX_LAMBDA {
                return Err(Error::SolverDiverged(format!("no multiplier up to {MAX_LAMBDA:e} reaches distortion {target}")));
            }
            let warm = lo.as_ref().unwrap().1.state.clone();
            let e = run(t, Some(&warm))?;
            if e.distortion <= target {
                hi = Some((t, e));
                break;
            }
            lo = Some((t, e));
        }
    }
    let (mut th, mut eh) = hi.expect("bracket has a feasible end");
    // Illinois regula falsi on g(t) = D(e^t) − target.
    let mut side = 0i32;
    if let Some((mut tl, mut el)) = lo {
        let mut gl = el.distortion - target;
        let mut gh = eh.distortion - target;
        for _ in 0..200 {
            if cert(th.exp(), &eh) <= tol || th - tl < 1e-13 {
                break;
            }
            let w = th - tl;
            let mut tn = if gl > gh { tl + gl * w / (gl - gh) } else { 0.5 * (tl + th) };
            if !(tn > tl + 0.02 * w && tn < th - 0.02 * w) {
                tn = 0.5 * (tl + th);
            }
            let warm = if tn - tl < th - tn { el.state.clone() } else { eh.state.clone() };
            let e = run(tn, Some(&warm))?;
            let g = e.distortion - target;
            if g > 0.0 {
                tl = tn;
                el = e;
                gl = g;
                if side == -1 {
                    gh *= 0.5;
                }
                side = -1;
            } else {
                th = tn;
                eh = e;
                gh = g;
                if side == 1 {
                    gl *= 0.5;
                }
                side = 1;
            }
        }
    }
    let certificate = cert(th.exp(), &eh);
    Ok(Found { lambda: th.exp(), eval: eh, certificate, evaluations })
}
