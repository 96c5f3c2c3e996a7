//! Rate–distortion theory for quantum sources: entropic quantities, channel
//! fidelity distortion, entanglement-assisted and unassisted rate–distortion
//! solvers, channel capacities and source–channel separation checks.
//!
//! All reported information quantities are in bits.

pub mod capacity;
pub mod distortion;
pub mod entropic;
pub mod eop;
pub mod error;
pub mod numeric;
pub mod optim;
pub mod parallel;
pub mod protosim;
pub mod qcore;
pub mod rdsolve;
pub mod sepcheck;

pub use error::{Error, Result};
