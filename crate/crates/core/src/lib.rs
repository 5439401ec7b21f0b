//! Simulation of arbitrary-coefficient three- and four-qubit W states and
//! their teleportation over Bell-pair channels.
//!
//! The sender compresses the W state onto two qubits, teleports those two
//! over two Bell pairs with four classical bits, and the receiver expands
//! them again with fresh (or freed) `|0⟩` qubits. [`protocol`] runs the
//! one-way variants and a bidirectional exchange; [`efficiency`] accounts
//! for their resource cost.

pub mod circuits;
pub mod cli;
pub mod efficiency;
pub mod gates;
pub mod protocol;
pub mod statevector;

pub use circuits::{Circuit, WCoefficients, WParams};
pub use gates::{GateKind, GateOp};
pub use statevector::{Basis, MeasurementOutcome, StateVector};
