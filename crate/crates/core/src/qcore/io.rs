//! JSON schemas for states and channels.
//!
//! Complex numbers are `[re, im]` pairs and matrices are lists of rows:
//!
//! ```json
//! {"dim": 2, "mat": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}
//! {"dim_in": 2, "dim_out": 2, "kraus": [ <matrix>, ... ]}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::channel::QuantumChannel;
use crate::qcore::matrix::{ComplexMatrix, C64};
use crate::qcore::state::DensityMatrix;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dim: usize,
    pub mat: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

pub fn matrix_from_json(m: &MatrixJson) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = m.iter().map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect()).collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows()).map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect()).collect()
}

impl StateJson {
    pub fn into_state(self) -> Result<DensityMatrix> {
        let mat = matrix_from_json(&self.mat)?;
        if mat.rows() != self.dim || mat.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "declared dim {} but matrix is {}x{}",
                self.dim,
                mat.rows(),
                mat.cols()
            )));
        }
        DensityMatrix::new(mat)
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self { dim: rho.dim(), mat: matrix_to_json(rho.matrix()) }
    }
}

impl ChannelJson {
    pub fn into_channel(self) -> Result<QuantumChannel> {
        let kraus = self.kraus.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        if kraus.iter().any(|k| k.rows() != self.dim_out || k.cols() != self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators must be {}x{}",
                self.dim_out, self.dim_in
            )));
        }
        QuantumChannel::new(kraus)
    }

    pub fn from_channel(n: &QuantumChannel) -> Self {
        Self { dim_in: n.dim_in(), dim_out: n.dim_out(), kraus: n.kraus().iter().map(matrix_to_json).collect() }
    }
}

pub fn parse_state(json: &str) -> Result<DensityMatrix> {
    serde_json::from_str::<StateJson>(json).map_err(|e| Error::Parse(e.to_string()))?.into_state()
}

pub fn parse_channel(json: &str) -> Result<QuantumChannel> {
    serde_json::from_str::<ChannelJson>(json).map_err(|e| Error::Parse(e.to_string()))?.into_channel()
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&StateJson::from_state(rho)).expect("state serializes")
}

pub fn channel_to_json(n: &QuantumChannel) -> String {
    serde_json::to_string(&ChannelJson::from_channel(n)).expect("channel serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::channel::{standard_channel, StandardChannel};

    #[test]
    fn state_round_trip() {
        let rho = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let back = parse_state(&state_to_json(&rho)).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn channel_round_trip() {
        let n = standard_channel(&StandardChannel::AmplitudeDamping { gamma: 0.25 }).unwrap();
        let back = parse_channel(&channel_to_json(&n)).unwrap();
        assert_eq!(back.kraus(), n.kraus());
    }

    #[test]
    fn parser_rejects_non_density() {
        let json = r#"{"dim": 2, "mat": [[[0.7, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.7, 0.0]]]}"#;
        assert!(matches!(parse_state(json), Err(Error::InvalidState(_))));
    }

    #[test]
    fn parser_rejects_non_cptp() {
        let json = r#"{"dim_in": 1, "dim_out": 1, "kraus": [[[[0.5, 0.0]]]]}"#;
        assert!(matches!(parse_channel(json), Err(Error::NotCPTP(_))));
    }

    #[test]
    fn parser_rejects_malformed() {
        assert!(matches!(parse_state("{\"dim\": 2"), Err(Error::Parse(_))));
        let json = r#"{"dim": 3, "mat": [[[1.0, 0.0]]]}"#;
        assert!(matches!(parse_state(json), Err(Error::DimensionMismatch(_))));
    }
}
