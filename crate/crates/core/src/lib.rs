//! Secrecy-capacity bounds for discrete wiretap channels with noiseless
//! feedback, closed forms for the binary symmetric model, and a small-block
//! random-coding simulator of the feedback schemes.

pub mod binary;
pub mod bounds;
pub mod channel;
pub mod checks;
pub mod info;
mod lp;
pub mod optim;
pub mod sim;

pub use channel::{
    load_channel, make_binary_channel, make_degraded_channel, validate_structure, BinaryWiretapParams,
    ChannelError, StructureTag, WiretapChannel,
};
pub use info::{
    assemble_joint, binary_entropy, conditional_entropy, entropy, mutual_information, star, ConditionalPmf,
    InfoError, JointPmf, Pmf,
};
pub use bounds::{AuxiliarySystem, BoundKind, BoundResult, BoundsConfig, BoundsError};
pub use optim::{OptimizerConfig, OptimizerTrace};
