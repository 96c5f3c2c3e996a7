//! Exact typical-subspace (Schumacher) compression of `n` copies of a
//! source.
//!
//! In the eigenbasis of `ρ`, `ρ^{⊗n}` is diagonal and its eigenvalues are
//! constant on type classes, so every quantity below is a sum over types.
//! The code keeps the `M = ⌊2^{n·rate}⌋` most likely eigenvectors (`P`
//! projects onto them) and decodes with
//!
//! `Λ(σ) = PσP + Tr((I − P)σ) |φ⟩⟨φ|`,
//!
//! `φ` the most likely eigenvector. The Kraus operators are `P` and
//! `|φ⟩⟨j|` for discarded `j`. Both `ρ^{⊗n}` and `P` are diagonal, so
//! `⟨j|ρ^{⊗n}|φ⟩ = 0` for every discarded `j` and
//!
//! `F_e = |Tr(ρ^{⊗n} P)|² = kept_mass²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::state::DensityMatrix;

/// Largest block length.
pub const MAX_COPIES: usize = 100;
/// Largest number of type classes enumerated.
pub const MAX_TYPES: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompressionReport {
    pub n: usize,
    /// Bits per copy.
    pub rate: f64,
    /// Number of retained eigenvectors, `min(⌊2^{n·rate}⌋, d^n)`.
    pub retained_dim: f64,
    /// `Tr(ρ^{⊗n} P)`.
    pub kept_mass: f64,
    /// Entanglement fidelity of compress-then-decompress.
    pub fidelity: f64,
}

/// One type class: its size and the common eigenvalue, both in logs.
struct TypeClass {
    ln_count: f64,
    ln_prob: f64,
}

fn compositions(n: usize, parts: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
    if parts == 1 {
        cur.push(n);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for k in 0..=n {
        cur.push(k);
        compositions(n - k, parts - 1, out, cur);
        cur.pop();
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn schumacher_fidelity(rho: &DensityMatrix, n: usize, rate: f64) -> Result<CompressionReport> {
    let d = rho.dim();
    let log_d = (d as f64).log2();
    if !rate.is_finite() || rate < 0.0 || rate > log_d + 1e-12 {
        return Err(Error::RateOutOfRange(rate));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    if n > MAX_COPIES {
        return Err(Error::BlockTooLarge(format!("{n} copies exceeds {MAX_COPIES}")));
    }
    let types = binomial(n + d - 1, d - 1);
    if types > MAX_TYPES as f64 {
        return Err(Error::BlockTooLarge(format!("{types:.0} type classes exceeds {MAX_TYPES}")));
    }
    let spectrum: Vec<f64> = rho.spectrum().iter().map(|&x| x.max(0.0)).collect();
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    let mut all = Vec::new();
    compositions(n, d, &mut all, &mut Vec::with_capacity(d));
    let mut classes: Vec<TypeClass> = all
        .iter()
        .map(|ks| {
            let ln_count = ln_fact[n] - ks.iter().map(|&k| ln_fact[k]).sum::<f64>();
            let ln_prob = ks
                .iter()
                .zip(&spectrum)
                .map(|(&k, &p)| if k == 0 { 0.0 } else { k as f64 * p.ln() })
                .sum();
            TypeClass { ln_count, ln_prob }
        })
        .collect();
    classes.sort_by(|a, b| b.ln_prob.total_cmp(&a.ln_prob));
    let full = rate * n as f64 >= n as f64 * log_d - 1e-9;
    let total_dim = (d as f64).powi(n as i32);
    // Nudge against 2^{n·rate} landing just below an integer.
    let m = if full { total_dim } else { (2f64.powf(n as f64 * rate) * (1.0 + 1e-12)).floor().min(total_dim) };
    let mut left = m;
    let mut kept = 0.0;
    for c in &classes {
        if left <= 0.0 {
            break;
        }
        let count = c.ln_count.exp().round();
        let take = count.min(left);
        if c.ln_prob.is_finite() {
            kept += (take.ln() + c.ln_prob).exp();
        }
        left -= take;
    }
    let kept = if full { 1.0 } else { kept.clamp(0.0, 1.0) };
    Ok(CompressionReport { n, rate, retained_dim: m, kept_mass: kept, fidelity: kept * kept })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn biased() -> DensityMatrix {
        DensityMatrix::diagonal(&[0.9, 0.1]).unwrap()
    }

    /// Kept mass from the binomial tail, summing classes with at most `j`
    /// minority symbols in order.
    fn binomial_oracle(n: usize, m: f64, p: f64) -> f64 {
        let mut left = m;
        let mut mass = 0.0;
        for j in 0..=n {
            let c = binomial(n, j);
            let take = c.min(left);
            mass += take * (1.0 - p).powi((n - j) as i32) * p.powi(j as i32);
            left -= take;
            if left <= 0.0 {
                break;
            }
        }
        mass
    }

    #[test]
    fn trivial_cases() {
        let pure = DensityMatrix::basis(2, 0);
        for n in [1, 5, 40] {
            assert_eq!(schumacher_fidelity(&pure, n, 0.0).unwrap().fidelity, 1.0);
        }
        let mm = DensityMatrix::maximally_mixed(2);
        assert_eq!(schumacher_fidelity(&mm, 4, 1.0).unwrap().fidelity, 1.0);
    }

    #[test]
    fn biased_bit_matches_binomial_tail() {
        let r = schumacher_fidelity(&biased(), 20, 0.6).unwrap();
        assert_eq!(r.retained_dim, 4096.0);
        let oracle = binomial_oracle(20, 4096.0, 0.1);
        assert!((r.kept_mass - oracle).abs() < 1e-12);
        assert!(r.kept_mass >= 0.9);
        assert!((r.fidelity - r.kept_mass.powi(2)).abs() < 1e-15);
    }

    #[test]
    fn concentration() {
        let a = schumacher_fidelity(&biased(), 20, 0.6).unwrap();
        let b = schumacher_fidelity(&biased(), 60, 0.6).unwrap();
        assert!(b.fidelity > a.fidelity);
        let low = schumacher_fidelity(&biased(), 60, 0.4).unwrap();
        assert!(low.kept_mass < 0.9);
    }

    #[test]
    fn monotone_in_rate() {
        let rho = DensityMatrix::diagonal(&[0.6, 0.3, 0.1]).unwrap();
        let mut prev = 0.0;
        for k in 0..=16 {
            let r = schumacher_fidelity(&rho, 12, k as f64 * 3f64.log2() / 16.0).unwrap();
            assert!(r.fidelity >= prev);
            prev = r.fidelity;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(schumacher_fidelity(&biased(), 10, 1.5), Err(Error::RateOutOfRange(_))));
        assert!(matches!(schumacher_fidelity(&biased(), 10, -0.1), Err(Error::RateOutOfRange(_))));
        assert!(matches!(schumacher_fidelity(&biased(), 101, 0.5), Err(Error::BlockTooLarge(_))));
    }
}
