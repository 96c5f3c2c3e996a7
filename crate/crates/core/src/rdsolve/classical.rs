//! Classical rate–distortion by Blahut–Arimoto.

use serde::{Deserialize, Serialize};

use crate::entropic::entropy_of_spectrum;
use crate::error::{Error, Result};
use crate::rdsolve::search::{target_search, Eval};
use crate::rdsolve::SolverConfig;

/// A memoryless source `p(u)` with a distortion matrix `d(u, û) ≥ 0`.
///
/// JSON: `{"pmf": [..], "distortion": [[..], ..]}` with one row per source
/// letter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ClassicalSourceJson")]
pub struct ClassicalSource {
    pmf: Vec<f64>,
    distortion: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassicalSourceJson {
    pmf: Vec<f64>,
    distortion: Vec<Vec<f64>>,
}

impl TryFrom<ClassicalSourceJson> for ClassicalSource {
    type Error = Error;
    fn try_from(j: ClassicalSourceJson) -> Result<Self> {
        Self::new(j.pmf, j.distortion)
    }
}

impl ClassicalSource {
    pub fn new(pmf: Vec<f64>, distortion: Vec<Vec<f64>>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::InvalidParameter("empty alphabet".into()));
        }
        if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidParameter("pmf has a negative or non-finite entry".into()));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("pmf sums to {total}")));
        }
        if distortion.len() != pmf.len() {
            return Err(Error::DimensionMismatch("distortion matrix needs one row per source letter".into()));
        }
        let cols = distortion[0].len();
        if cols == 0 || distortion.iter().any(|row| row.len() != cols) {
            return Err(Error::DimensionMismatch("distortion matrix rows differ in length".into()));
        }
        if distortion.iter().flatten().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParameter("distortion entries must be finite and non-negative".into()));
        }
        Ok(Self { pmf, distortion })
    }

    /// Hamming distortion on the source alphabet.
    pub fn hamming(pmf: Vec<f64>) -> Result<Self> {
        let n = pmf.len();
        let d = (0..n).map(|u| (0..n).map(|v| if u == v { 0.0 } else { 1.0 }).collect()).collect();
        Self::new(pmf, d)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn distortion(&self) -> &[Vec<f64>] {
        &self.distortion
    }

    pub fn reproduction_size(&self) -> usize {
        self.distortion[0].len()
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_spectrum(&self.pmf)
    }

    /// `Σ_u p(u) min_û d(u, û)`, the smallest achievable distortion.
    pub fn min_distortion(&self) -> f64 {
        self.pmf.iter().zip(&self.distortion).map(|(p, row)| p * row.iter().copied().fold(f64::INFINITY, f64::min)).sum()
    }

    /// `min_û Σ_u p(u) d(u, û)`: at or above this a constant guess suffices.
    pub fn zero_rate_distortion(&self) -> (f64, usize) {
        (0..self.reproduction_size())
            .map(|v| (self.expected(|u| self.distortion[u][v]), v))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("non-empty reproduction alphabet")
    }

    fn expected(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.pmf.iter().enumerate().map(|(u, p)| p * f(u)).sum()
    }
}

/// Optimal test channel at one distortion target.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalRdPoint {
    pub d: f64,
    pub rate: f64,
    /// Slope parameter, bits per unit distortion.
    pub lambda: f64,
    /// Certified bound on `rate − R(D)`, bits.
    pub gap: f64,
    pub achieved_distortion: f64,
    /// `q(û | u)`, one row per source letter.
    pub conditional: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
struct BaState {
    log_r: Vec<f64>,
}

struct BaResult {
    state: BaState,
    q: Vec<Vec<f64>>,
    rate: f64,
    distortion: f64,
    /// Lagrangian gap, nats.
    gap: f64,
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Alternating minimization of `I + s E[d]` over test channels supported on
/// `allowed`.
///
/// With `c_u = Σ_û r(û) e^{−s d(u,û)}` and `c(û) = Σ_u p(u) e^{−s d(u,û)}/c_u`,
/// convexity of `r ↦ −Σ_u p(u) log c_u` gives the Lagrangian gap bound
/// `max_û c(û) − 1`.
fn blahut_arimoto(src: &ClassicalSource, s: f64, allowed: &[Vec<bool>], start: &BaState, tol: f64, max_iter: usize) -> BaResult {
    let (nu, nv) = (src.pmf.len(), src.reproduction_size());
    let weight = |u: usize, v: usize| if allowed[u][v] { -s * src.distortion[u][v] } else { f64::NEG_INFINITY };
    let mut log_r = start.log_r.clone();
    let mut out = None;
    for _ in 0..max_iter.max(1) {
        let log_c: Vec<f64> = (0..nu).map(|u| log_sum_exp((0..nv).map(|v| log_r[v] + weight(u, v)))).collect();
        let q: Vec<Vec<f64>> = (0..nu).map(|u| (0..nv).map(|v| (log_r[v] + weight(u, v) - log_c[u]).exp()).collect()).collect();
        let c_hat: Vec<f64> = (0..nv)
            .map(|v| (0..nu).filter(|&u| src.pmf[u] > 0.0).map(|u| src.pmf[u] * (weight(u, v) - log_c[u]).exp()).sum())
            .collect();
        let gap = (c_hat.iter().copied().fold(f64::NEG_INFINITY, f64::max) - 1.0).max(0.0);
        let r_new: Vec<f64> = (0..nv).map(|v| (0..nu).map(|u| src.pmf[u] * q[u][v]).sum()).collect();
        let mut rate = 0.0;
        let mut dist = 0.0;
        for ((pu, qu), du) in src.pmf.iter().zip(&q).zip(&src.distortion) {
            for v in 0..nv {
                let pq = pu * qu[v];
                if pq > 0.0 {
                    rate += pq * (qu[v] / r_new[v]).log2();
                    dist += pq * du[v];
                }
            }
        }
        log_r = r_new.iter().map(|x| x.ln()).collect();
        let done = gap <= tol;
        out = Some(BaResult { state: BaState { log_r: log_r.clone() }, q, rate: rate.max(0.0), distortion: dist, gap });
        if done {
            break;
        }
    }
    out.expect("at least one iteration")
}

fn uniform_start(n: usize) -> BaState {
    BaState { log_r: vec![-(n as f64).ln(); n] }
}

/// `R(D)` of a classical source, in bits.
pub fn classical_rd(source: &ClassicalSource, d: f64, config: &SolverConfig) -> Result<ClassicalRdPoint> {
    let (nu, nv) = (source.pmf.len(), source.reproduction_size());
    let d_min = source.min_distortion();
    if !d.is_finite() || d < 0.0 || d < d_min - 1e-12 {
        return Err(Error::InvalidDistortion(d));
    }
    let (d_max, best) = source.zero_rate_distortion();
    if d >= d_max {
        let conditional = (0..nu).map(|_| (0..nv).map(|v| if v == best { 1.0 } else { 0.0 }).collect()).collect();
        return Ok(ClassicalRdPoint { d, rate: 0.0, lambda: 0.0, gap: 0.0, achieved_distortion: d_max, conditional });
    }
    let ln2 = std::f64::consts::LN_2;
    let inner_tol = 0.25 * config.tol * ln2;
    if d <= d_min {
        // Only minimum-distortion reproductions are allowed.
        let allowed: Vec<Vec<bool>> = source
            .distortion
            .iter()
            .map(|row| {
                let m = row.iter().copied().fold(f64::INFINITY, f64::min);
                row.iter().map(|&x| x <= m).collect()
            })
            .collect();
        let res = blahut_arimoto(source, 0.0, &allowed, &uniform_start(nv), inner_tol, config.max_iter);
        let gap = res.gap / ln2;
        if gap > config.tol {
            return Err(Error::SolverDiverged(format!("classical solve at minimum distortion ended with gap {gap:.2e}")));
        }
        return Ok(ClassicalRdPoint {
            d,
            rate: res.rate,
            lambda: f64::INFINITY,
            gap,
            achieved_distortion: res.distortion,
            conditional: res.q,
        });
    }
    let allowed = vec![vec![true; nv]; nu];
    let found = target_search(d, config.tol, |lambda_bits, warm: Option<&(BaState, Vec<Vec<f64>>)>| {
        let start = warm.map(|w| w.0.clone()).unwrap_or_else(|| uniform_start(nv));
        let res = blahut_arimoto(source, lambda_bits * ln2, &allowed, &start, inner_tol, config.max_iter);
        Ok(Eval { state: (res.state, res.q), distortion: res.distortion, rate: res.rate, gap: res.gap / ln2 })
    })?;
    if found.certificate > config.tol {
        return Err(Error::SolverDiverged(format!("classical solve at D = {d} ended with gap {:.2e}", found.certificate)));
    }
    Ok(ClassicalRdPoint {
        d,
        rate: found.eval.rate,
        lambda: found.lambda,
        gap: found.certificate,
        achieved_distortion: found.eval.distortion,
        conditional: found.eval.state.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropic::binary_entropy;

    fn bit() -> ClassicalSource {
        ClassicalSource::hamming(vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn uniform_bit_goldens() {
        let cfg = SolverConfig::default();
        assert!((classical_rd(&bit(), 0.0, &cfg).unwrap().rate - 1.0).abs() < 1e-6);
        let p = classical_rd(&bit(), 0.1, &cfg).unwrap();
        assert!((p.rate - 0.531004).abs() < 1e-5);
        assert!(p.gap <= cfg.tol && p.achieved_distortion <= 0.1 + 1e-12);
        assert_eq!(classical_rd(&bit(), 0.5, &cfg).unwrap().rate, 0.0);
    }

    #[test]
    fn biased_bit_matches_closed_form() {
        let src = ClassicalSource::hamming(vec![0.8, 0.2]).unwrap();
        let cfg = SolverConfig::default();
        for &d in &[0.02, 0.05, 0.1, 0.15] {
            let rate = classical_rd(&src, d, &cfg).unwrap().rate;
            let exact = binary_entropy(0.2) - binary_entropy(d);
            assert!((rate - exact).abs() < 2e-6, "D = {d}: {rate} vs {exact}");
        }
        assert_eq!(classical_rd(&src, 0.2, &cfg).unwrap().rate, 0.0);
    }

    #[test]
    fn rejects_invalid_sources() {
        assert!(ClassicalSource::hamming(vec![0.5, 0.6]).is_err());
        assert!(ClassicalSource::new(vec![1.0], vec![vec![-1.0]]).is_err());
        assert!(ClassicalSource::new(vec![0.5, 0.5], vec![vec![0.0, 1.0]]).is_err());
        let json = r#"{"pmf": [0.5, 0.5], "distortion": [[0, 1], [1, 0]]}"#;
        let src: ClassicalSource = serde_json::from_str(json).unwrap();
        assert_eq!(src, bit());
        assert!(serde_json::from_str::<ClassicalSource>(r#"{"pmf": [0.9], "distortion": [[0]]}"#).is_err());
    }

    #[test]
    fn below_minimum_distortion_is_invalid() {
        let src = ClassicalSource::new(vec![0.5, 0.5], vec![vec![0.1, 1.0], vec![1.0, 0.1]]).unwrap();
        assert!(matches!(classical_rd(&src, 0.05, &SolverConfig::default()), Err(Error::InvalidDistortion(_))));
        assert!((classical_rd(&src, 0.1, &SolverConfig::default()).unwrap().rate - 1.0).abs() < 1e-6);
    }
}
