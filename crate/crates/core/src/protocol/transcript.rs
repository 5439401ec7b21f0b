use serde::{Deserialize, Serialize};

use crate::circuits::WParams;
use crate::statevector::Basis;

use super::corrections::{CorrectionKey, CorrectionOps};
use super::family::Party;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "A->B")]
    AliceToBob,
    #[serde(rename = "B->A")]
    BobToAlice,
    #[serde(rename = "bidirectional")]
    Bidirectional,
}

impl Direction {
    pub fn from_sender(sender: Party) -> Direction {
        match sender {
            Party::Alice => Direction::AliceToBob,
            Party::Bob => Direction::BobToAlice,
        }
    }
}

/// One measurement as seen in the transcript. `qubit` indexes the joint
/// register as laid out just before measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub party: Party,
    pub label: String,
    pub qubit: usize,
    pub basis: Basis,
    pub result: u8,
    pub symbol: char,
    pub probability: f64,
}

/// One teleported state: who sent it, what was measured, what the
/// receiver did about it, and how well it arrived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub family: String,
    pub sender: Party,
    pub receiver: Party,
    pub params: WParams,
    pub key: CorrectionKey,
    pub message: [u8; 4],
    pub corrections: CorrectionOps,
    pub classical_bits: usize,
    pub ancillas: Vec<String>,
    pub final_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub direction: Direction,
    pub legs: Vec<Leg>,
    pub outcomes: Vec<OutcomeRecord>,
    pub classical_bits_sent: usize,
}

impl Transcript {
    pub fn min_fidelity(&self) -> f64 {
        self.legs
            .iter()
            .map(|l| l.final_fidelity)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn branch_label(&self) -> String {
        self.legs
            .iter()
            .map(|l| l.key.to_string())
            .collect::<Vec<_>>()
            .join("/")
    }
}
