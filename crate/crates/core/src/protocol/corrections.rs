//! Measurement keys, Pauli correction pairs, and the two lookup tables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::gates::GateOp;

use super::ProtocolError;

/// Outcome of an X-basis measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_bit(bit: u8) -> Sign {
        if bit == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Sender's results: X outcomes on the two data qubits, then Z outcomes on
/// the two sender-side channel qubits. Written like `+-01`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CorrectionKey {
    pub x_results: [Sign; 2],
    pub z_results: [u8; 2],
}

impl CorrectionKey {
    pub fn new(x_results: [Sign; 2], z_results: [u8; 2]) -> Self {
        CorrectionKey {
            x_results,
            z_results,
        }
    }

    /// Wire encoding: `(x0, x1, z0, z1)` with `+ → 0`, `− → 1`.
    pub fn to_bits(self) -> [u8; 4] {
        [
            self.x_results[0].bit(),
            self.x_results[1].bit(),
            self.z_results[0],
            self.z_results[1],
        ]
    }

    pub fn from_bits(bits: [u8; 4]) -> Self {
        CorrectionKey::new(
            [Sign::from_bit(bits[0]), Sign::from_bit(bits[1])],
            [bits[2] & 1, bits[3] & 1],
        )
    }

    /// All 16 keys in table order (`++00`, `++01`, …, `--11`).
    pub fn all() -> impl Iterator<Item = CorrectionKey> {
        (0u8..16).map(|i| CorrectionKey::from_bits([(i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1]))
    }
}

impl fmt::Display for CorrectionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}{}",
            self.x_results[0].symbol(),
            self.x_results[1].symbol(),
            self.z_results[0],
            self.z_results[1]
        )
    }
}

impl FromStr for CorrectionKey {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.trim().chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || ProtocolError::InvalidKey(s.to_string());
        if chars.len() != 4 {
            return Err(bad());
        }
        let sign = |c: char| match c {
            '+' => Ok(Sign::Plus),
            '-' | '−' => Ok(Sign::Minus),
            _ => Err(bad()),
        };
        let bit = |c: char| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(bad()),
        };
        Ok(CorrectionKey::new(
            [sign(chars[0])?, sign(chars[1])?],
            [bit(chars[2])?, bit(chars[3])?],
        ))
    }
}

impl Serialize for CorrectionKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CorrectionKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Z,
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

/// `(z_part)(x_part)` on the receiver's two channel qubits; the X part acts
/// first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorrectionOps {
    pub z_part: [Pauli; 2],
    pub x_part: [Pauli; 2],
}

impl CorrectionOps {
    pub const IDENTITY: CorrectionOps = CorrectionOps {
        z_part: [Pauli::I, Pauli::I],
        x_part: [Pauli::I, Pauli::I],
    };

    /// The 16 candidate pairs, identity first.
    pub fn candidates() -> impl Iterator<Item = CorrectionOps> {
        (0u8..16).map(|i| {
            let z = |b: u8| if b == 1 { Pauli::Z } else { Pauli::I };
            let x = |b: u8| if b == 1 { Pauli::X } else { Pauli::I };
            CorrectionOps {
                z_part: [z((i >> 3) & 1), z((i >> 2) & 1)],
                x_part: [x((i >> 1) & 1), x(i & 1)],
            }
        })
    }

    /// Gates realizing the correction on `qubits`, in application order.
    pub fn gates(&self, qubits: [usize; 2]) -> Vec<GateOp> {
        let xs = self
            .x_part
            .iter()
            .zip(qubits)
            .filter(|(p, _)| **p == Pauli::X)
            .map(|(_, q)| GateOp::x(q));
        let zs = self
            .z_part
            .iter()
            .zip(qubits)
            .filter(|(p, _)| **p == Pauli::Z)
            .map(|(_, q)| GateOp::rz(std::f64::consts::PI, q));
        xs.chain(zs).collect()
    }
}

impl fmt::Display for CorrectionOps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}⊗{})({}⊗{})",
            self.z_part[0], self.z_part[1], self.x_part[0], self.x_part[1]
        )
    }
}

/// A minus on data qubit `i` calls for Z on receiver qubit `i`; a 1 on
/// sender channel qubit `i` calls for X on receiver qubit `i`.
fn pairwise_rule(key: CorrectionKey) -> CorrectionOps {
    let z = |s: Sign| match s {
        Sign::Plus => Pauli::I,
        Sign::Minus => Pauli::Z,
    };
    let x = |b: u8| if b == 1 { Pauli::X } else { Pauli::I };
    CorrectionOps {
        z_part: [z(key.x_results[0]), z(key.x_results[1])],
        x_part: [x(key.z_results[0]), x(key.z_results[1])],
    }
}

/// Receiver corrections for the three-qubit protocol, keyed by `A0 A1 a0 a1`.
pub fn correction_table_w3(key: CorrectionKey) -> CorrectionOps {
    pairwise_rule(key)
}

/// Receiver corrections for the four-qubit protocol, keyed by `B0 B1 b0 b1`.
pub fn correction_table_w4(key: CorrectionKey) -> CorrectionOps {
    pairwise_rule(key)
}
