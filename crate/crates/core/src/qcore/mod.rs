//! Dense complex linear algebra and the state/channel object model.

pub mod channel;
pub mod eig;
pub mod io;
pub mod matrix;
pub mod random;
pub mod state;

pub use channel::{
    apply_channel, convert_representation, standard_channel, stinespring, ChannelRepresentation, ChoiMatrix,
    QuantumChannel, StandardChannel, Stinespring,
};
pub use eig::{eig_hermitian, HermitianEigen};
pub use matrix::{partial_trace, permute_subsystems, tensor, ComplexMatrix, C64};
pub use state::{purify, DensityMatrix, Purification};
