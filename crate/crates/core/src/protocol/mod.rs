//! Teleportation protocols: correction tables, parties, sessions and the
//! protocol registry.

pub mod corrections;
pub mod family;
pub mod party;
pub mod register;
pub mod registry;
pub mod session;
pub mod transcript;

use thiserror::Error;

use crate::circuits::CircuitError;
use crate::statevector::SimError;

pub use corrections::{
    correction_table_w3, correction_table_w4, CorrectionKey, CorrectionOps, Pauli, Sign,
};
pub use family::{FamilyKind, Party, WFamily, W3, W4};
pub use registry::{BranchSelection, Protocol, ProtocolRegistry};
pub use session::{
    derive_correction_oracle, expected_joint_state, run_bidirectional, run_teleport_w3,
    run_teleport_w4, BidirectionalSession, Branch, Teleport,
};
pub use transcript::{Direction, Leg, OutcomeRecord, Transcript};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("invalid measurement key {0:?}: expected two of +/- then two of 0/1, e.g. \"+-01\"")]
    InvalidKey(String),
    #[error("no qubit labelled {0}")]
    UnknownQubit(String),
    #[error("qubit {qubit} was not reset to |0⟩ (mass on |1⟩ = {mass:e})")]
    NotReset { qubit: String, mass: f64 },
    #[error("joint state after {stage} deviates from its closed form by {deviation:e}")]
    IntermediateState { stage: &'static str, deviation: f64 },
    #[error("{party:?} cannot move from {from:?} to {to:?}")]
    OutOfOrder {
        party: Party,
        from: party::Phase,
        to: party::Phase,
    },
    #[error("no classical message waiting for {0:?}")]
    NoMessage(Party),
    #[error("no Pauli pair restores the state for key {0}")]
    NoCorrection(CorrectionKey),
    #[error("{count} Pauli pairs restore the state for key {key}")]
    AmbiguousCorrection { key: CorrectionKey, count: usize },
    #[error("angles must be finite")]
    NonFiniteParams,
    #[error("protocol takes {expected} parameter set(s), got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("protocol takes {expected} branch key(s), got {got}")]
    KeyCount { expected: usize, got: usize },
    #[error("unknown protocol {0:?}")]
    UnknownProtocol(String),
}
