//! Party lifecycle and the classical side channel.

use std::collections::VecDeque;

use super::corrections::CorrectionKey;
use super::family::Party;
use super::ProtocolError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Idle,
    Preprocessed,
    Entangled,
    Measured,
    Corrected,
    Reconstructed,
}

/// Tracks one party's progress; steps must be taken in order.
#[derive(Debug, Clone)]
pub struct PartyMachine {
    pub party: Party,
    phase: Phase,
}

impl PartyMachine {
    pub fn new(party: Party) -> Self {
        PartyMachine {
            party,
            phase: Phase::Idle,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Moves to `next`, which must come after the current phase. A sender
    /// that receives nothing skips the receiver phases, so gaps are allowed.
    pub fn advance(&mut self, next: Phase) -> Result<(), ProtocolError> {
        if next <= self.phase {
            return Err(ProtocolError::OutOfOrder {
                party: self.party,
                from: self.phase,
                to: next,
            });
        }
        self.phase = next;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalMessage {
    pub from: Party,
    pub to: Party,
    pub bits: [u8; 4],
}

/// In-process FIFO carrying measurement results between parties.
#[derive(Debug, Default)]
pub struct Mailbox {
    queue: VecDeque<ClassicalMessage>,
    bits_sent: usize,
}

impl Mailbox {
    pub fn send(&mut self, from: Party, key: CorrectionKey) -> [u8; 4] {
        let bits = key.to_bits();
        self.queue.push_back(ClassicalMessage {
            from,
            to: from.other(),
            bits,
        });
        self.bits_sent += bits.len();
        bits
    }

    /// Takes the oldest message addressed to `to`.
    pub fn receive(&mut self, to: Party) -> Result<CorrectionKey, ProtocolError> {
        let pos = self
            .queue
            .iter()
            .position(|m| m.to == to)
            .ok_or(ProtocolError::NoMessage(to))?;
        let msg = self.queue.remove(pos).expect("position is in range");
        Ok(CorrectionKey::from_bits(msg.bits))
    }

    pub fn bits_sent(&self) -> usize {
        self.bits_sent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phases_must_advance() {
        let mut m = PartyMachine::new(Party::Alice);
        m.advance(Phase::Preprocessed).unwrap();
        m.advance(Phase::Measured).unwrap();
        assert!(matches!(
            m.advance(Phase::Entangled),
            Err(ProtocolError::OutOfOrder { .. })
        ));
        assert_eq!(m.phase(), Phase::Measured);
    }

    #[test]
    fn mailbox_routes_by_recipient_and_counts_bits() {
        let mut mb = Mailbox::default();
        let ka: CorrectionKey = "+-10".parse().unwrap();
        let kb: CorrectionKey = "--01".parse().unwrap();
        mb.send(Party::Alice, ka);
        mb.send(Party::Bob, kb);
        assert_eq!(mb.bits_sent(), 8);
        assert_eq!(mb.receive(Party::Alice).unwrap(), kb);
        assert_eq!(mb.receive(Party::Bob).unwrap(), ka);
        assert!(matches!(mb.receive(Party::Bob), Err(ProtocolError::NoMessage(Party::Bob))));
    }
}
