//! Source–channel separation verdicts: does one use of the channel per
//! source symbol carry the source at the required fidelity?
//!
//! | theorem | source    | lhs          | rhs       |
//! |---------|-----------|--------------|-----------|
//! | T4      | classical | `H(U)`       | `χ(N)`    |
//! | T5      | classical | `R(D)`       | `χ(N)`    |
//! | T6      | quantum   | `H(ρ)`       | `Q⁽¹⁾(N)` |
//! | T7      | quantum   | `H(ρ)`       | `I(N)/2`  |
//! | T8      | quantum   | `R_eaq(D)`   | `I(N)/2`  |
//!
//! `χ` and `Q⁽¹⁾` are best-found estimates, so T4–T6 verdicts carry a
//! caveat; `I(N)` is certified.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::capacity::{coherent_info_capacity, ea_capacity, holevo_capacity};
use crate::entropic::von_neumann_entropy;
use crate::error::{Error, Result};
use crate::optim::SearchConfig;
use crate::qcore::channel::QuantumChannel;
use crate::qcore::state::DensityMatrix;
use crate::rdsolve::{classical_rd, solve_r_eaq, ClassicalSource, SolverConfig};

/// Margins within this distance of zero are reported as boundary cases.
pub const BOUNDARY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    T4,
    T5,
    T6,
    T7,
    T8,
}

impl Theorem {
    pub fn takes_distortion(self) -> bool {
        matches!(self, Theorem::T5 | Theorem::T8)
    }

    pub fn classical_source(self) -> bool {
        matches!(self, Theorem::T4 | Theorem::T5)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T4" => Ok(Theorem::T4),
            "T5" => Ok(Theorem::T5),
            "T6" => Ok(Theorem::T6),
            "T7" => Ok(Theorem::T7),
            "T8" => Ok(Theorem::T8),
            _ => Err(Error::Parse(format!("unknown theorem {s:?}; expected T4..T8"))),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Source {
    Classical(ClassicalSource),
    Quantum(DensityMatrix),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SepConfig {
    pub solver: SolverConfig,
    pub search: SearchConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationVerdict {
    pub theorem: Theorem,
    pub distortion: Option<f64>,
    pub lhs_bits: f64,
    pub rhs_bits: f64,
    /// `margin ≥ −BOUNDARY_TOL`.
    pub feasible: bool,
    /// `|margin| ≤ BOUNDARY_TOL`.
    pub boundary: bool,
    /// `rhs − lhs`.
    pub margin: f64,
    /// The rhs is an uncertified estimate.
    pub caveat: bool,
}

pub fn check(theorem: Theorem, source: &Source, channel: &QuantumChannel, d: Option<f64>, config: &SepConfig) -> Result<SeparationVerdict> {
    match (theorem.takes_distortion(), d) {
        (true, None) => return Err(Error::MissingDistortion(theorem.to_string())),
        (false, Some(_)) => return Err(Error::UnexpectedDistortion(theorem.to_string())),
        _ => {}
    }
    let lhs = match (theorem, source) {
        (Theorem::T4, Source::Classical(s)) => s.entropy(),
        (Theorem::T5, Source::Classical(s)) => classical_rd(s, d.unwrap_or_default(), &config.solver)?.rate,
        (Theorem::T6 | Theorem::T7, Source::Quantum(rho)) => von_neumann_entropy(rho),
        (Theorem::T8, Source::Quantum(rho)) => solve_r_eaq(rho, d.unwrap_or_default(), &config.solver)?.rate,
        (t, Source::Classical(_)) => return Err(Error::SourceTypeMismatch(format!("{t} needs a quantum source"))),
        (t, Source::Quantum(_)) => return Err(Error::SourceTypeMismatch(format!("{t} needs a classical source"))),
    };
    let search = SearchConfig { tol: config.solver.tol, ..config.search.clone() };
    let rhs = match theorem {
        Theorem::T4 | Theorem::T5 => holevo_capacity(channel, &search)?.value,
        Theorem::T6 => coherent_info_capacity(channel, &search)?.value,
        Theorem::T7 | Theorem::T8 => ea_capacity(channel, &search)?.value / 2.0,
    };
    let margin = rhs - lhs;
    Ok(SeparationVerdict {
        theorem,
        distortion: d,
        lhs_bits: lhs,
        rhs_bits: rhs,
        feasible: margin >= -BOUNDARY_TOL,
        boundary: margin.abs() <= BOUNDARY_TOL,
        margin,
        caveat: matches!(theorem, Theorem::T4 | Theorem::T5 | Theorem::T6),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoStagePlan {
    /// Output rate of the compression stage, bits per source symbol.
    pub compression_rate: f64,
    pub channel_uses_per_symbol: f64,
}

/// Rate bookkeeping for compress-then-channel-code on a feasible verdict.
pub fn two_stage_plan(verdict: &SeparationVerdict, source_rate_bits: f64, channel_capacity_bits: f64) -> Result<TwoStagePlan> {
    if !verdict.feasible {
        return Err(Error::InfeasiblePlan { margin: verdict.margin });
    }
    if channel_capacity_bits <= BOUNDARY_TOL {
        return Err(Error::DegenerateCapacity(channel_capacity_bits));
    }
    Ok(TwoStagePlan {
        compression_rate: source_rate_bits,
        channel_uses_per_symbol: source_rate_bits / channel_capacity_bits,
    })
}
