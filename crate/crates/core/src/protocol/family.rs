use serde::{Deserialize, Serialize};

use crate::circuits::{
    build_postprocess3, build_postprocess4, build_preprocess3, build_preprocess4,
    build_w3_generator, build_w4_generator, state_from_support, w3_coefficients,
    w4_coefficients, Circuit, WCoefficients, WParams, W3_COMPRESSED, W3_SUPPORT, W4_COMPRESSED,
    W4_SUPPORT,
};
use crate::statevector::{SimError, StateVector};

use super::corrections::{correction_table_w3, correction_table_w4, CorrectionKey, CorrectionOps};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    /// Prefix for the party's data qubits (`A0`, `B2`, …).
    pub fn data_label(self, i: usize) -> String {
        match self {
            Party::Alice => format!("A{i}"),
            Party::Bob => format!("B{i}"),
        }
    }

    /// Prefix for the party's channel qubits (`a0`, `b3`, …).
    pub fn channel_label(self, i: usize) -> String {
        match self {
            Party::Alice => format!("a{i}"),
            Party::Bob => format!("b{i}"),
        }
    }
}

/// A W-state variant that can be generated, compressed to two qubits,
/// teleported over two Bell pairs and re-expanded.
pub trait WFamily: Send + Sync {
    fn name(&self) -> &'static str;

    /// Qubits in the uncompressed W state.
    fn register_size(&self) -> usize;

    /// `|0⟩` qubits the receiver needs for post-processing.
    fn ancillas(&self) -> usize {
        self.register_size() - 2
    }

    /// Party holding the state in the unidirectional protocol.
    fn sender(&self) -> Party;

    fn support(&self) -> &'static [&'static str];
    fn compressed_support(&self) -> &'static [&'static str];
    fn coefficients(&self, params: &WParams) -> WCoefficients;
    fn generator(&self, params: &WParams) -> Circuit;
    fn preprocess(&self) -> Circuit;
    fn postprocess(&self) -> Circuit;
    fn correction(&self, key: CorrectionKey) -> CorrectionOps;

    fn receiver(&self) -> Party {
        self.sender().other()
    }

    /// Closed-form W state.
    fn target_state(&self, params: &WParams) -> Result<StateVector, SimError> {
        state_from_support(self.support(), &self.coefficients(params))
    }

    /// Closed-form two-qubit state after pre-processing.
    fn compressed_state(&self, params: &WParams) -> Result<StateVector, SimError> {
        state_from_support(self.compressed_support(), &self.coefficients(params))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct W3;

#[derive(Debug, Clone, Copy, Default)]
pub struct W4;

impl WFamily for W3 {
    fn name(&self) -> &'static str {
        "W3"
    }
    fn register_size(&self) -> usize {
        3
    }
    fn sender(&self) -> Party {
        Party::Alice
    }
    fn support(&self) -> &'static [&'static str] {
        &W3_SUPPORT
    }
    fn compressed_support(&self) -> &'static [&'static str] {
        &W3_COMPRESSED
    }
    fn coefficients(&self, params: &WParams) -> WCoefficients {
        w3_coefficients(params)
    }
    fn generator(&self, params: &WParams) -> Circuit {
        build_w3_generator(params)
    }
    fn preprocess(&self) -> Circuit {
        build_preprocess3()
    }
    fn postprocess(&self) -> Circuit {
        build_postprocess3()
    }
    fn correction(&self, key: CorrectionKey) -> CorrectionOps {
        correction_table_w3(key)
    }
}

impl WFamily for W4 {
    fn name(&self) -> &'static str {
        "W4"
    }
    fn register_size(&self) -> usize {
        4
    }
    fn sender(&self) -> Party {
        Party::Bob
    }
    fn support(&self) -> &'static [&'static str] {
        &W4_SUPPORT
    }
    fn compressed_support(&self) -> &'static [&'static str] {
        &W4_COMPRESSED
    }
    fn coefficients(&self, params: &WParams) -> WCoefficients {
        w4_coefficients(params)
    }
    fn generator(&self, params: &WParams) -> Circuit {
        build_w4_generator(params)
    }
    fn preprocess(&self) -> Circuit {
        build_preprocess4()
    }
    fn postprocess(&self) -> Circuit {
        build_postprocess4()
    }
    fn correction(&self, key: CorrectionKey) -> CorrectionOps {
        correction_table_w4(key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    W3,
    W4,
}

impl FamilyKind {
    pub fn family(self) -> &'static dyn WFamily {
        match self {
            FamilyKind::W3 => &W3,
            FamilyKind::W4 => &W4,
        }
    }
}
