//! Name-keyed registry of runnable teleportation protocols.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuits::WParams;

use super::corrections::CorrectionKey;
use super::family::FamilyKind;
use super::session::{BidirectionalSession, Branch, Teleport};
use super::transcript::Transcript;
use super::ProtocolError;

/// How a single run picks its measurement branch.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchSelection {
    /// One key per direction.
    Forced(Vec<CorrectionKey>),
    Sampled { seed: u64 },
}

pub trait Protocol: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;

    /// Number of `WParams` the protocol consumes (one per direction).
    fn param_sets(&self) -> usize;

    /// Branches visited by [`Protocol::enumerate`].
    fn branch_count(&self) -> usize {
        16usize.pow(self.param_sets() as u32)
    }

    fn run(&self, params: &[WParams], branch: &BranchSelection)
        -> Result<Transcript, ProtocolError>;

    /// Every branch, in deterministic table order.
    fn enumerate(&self, params: &[WParams]) -> Result<Vec<Transcript>, ProtocolError>;

    fn check_arity(&self, params: &[WParams], branch: Option<&BranchSelection>) -> Result<(), ProtocolError> {
        let expected = self.param_sets();
        if params.len() != expected {
            return Err(ProtocolError::ParamCount {
                expected,
                got: params.len(),
            });
        }
        if let Some(BranchSelection::Forced(keys)) = branch {
            if keys.len() != expected {
                return Err(ProtocolError::KeyCount {
                    expected,
                    got: keys.len(),
                });
            }
        }
        Ok(())
    }
}

pub struct Unidirectional {
    name: &'static str,
    summary: &'static str,
    family: FamilyKind,
}

impl Unidirectional {
    pub fn w3() -> Self {
        Unidirectional {
            name: "teleport3",
            summary: "three-qubit W state, Alice to Bob, one ancilla",
            family: FamilyKind::W3,
        }
    }

    pub fn w4() -> Self {
        Unidirectional {
            name: "teleport4",
            summary: "four-qubit W state, Bob to Alice, two ancillas",
            family: FamilyKind::W4,
        }
    }
}

impl Protocol for Unidirectional {
    fn name(&self) -> &'static str {
        self.name
    }

    fn summary(&self) -> &'static str {
        self.summary
    }

    fn param_sets(&self) -> usize {
        1
    }

    fn run(
        &self,
        params: &[WParams],
        branch: &BranchSelection,
    ) -> Result<Transcript, ProtocolError> {
        self.check_arity(params, Some(branch))?;
        let t = Teleport::new(self.family);
        let prepared = t.prepare(&params[0])?;
        match branch {
            BranchSelection::Forced(keys) => t.run(&prepared, Branch::Forced(keys[0])),
            BranchSelection::Sampled { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                t.run(&prepared, Branch::Sampled(&mut rng))
            }
        }
    }

    fn enumerate(&self, params: &[WParams]) -> Result<Vec<Transcript>, ProtocolError> {
        self.check_arity(params, None)?;
        Teleport::new(self.family).enumerate(&params[0])
    }
}

/// Alice's W3 and Bob's W4 exchanged over one 8-qubit channel.
pub struct Bidirectional;

impl Protocol for Bidirectional {
    fn name(&self) -> &'static str {
        "bidirectional"
    }

    fn summary(&self) -> &'static str {
        "W3 from Alice and W4 from Bob simultaneously, freed qubits reused as ancillas"
    }

    fn param_sets(&self) -> usize {
        2
    }

    fn run(
        &self,
        params: &[WParams],
        branch: &BranchSelection,
    ) -> Result<Transcript, ProtocolError> {
        self.check_arity(params, Some(branch))?;
        let prepared = BidirectionalSession::prepare(&params[0], &params[1])?;
        match branch {
            BranchSelection::Forced(keys) => {
                BidirectionalSession::run(&prepared, Some((keys[0], keys[1])), None)
            }
            BranchSelection::Sampled { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                BidirectionalSession::run(&prepared, None, Some(&mut rng))
            }
        }
    }

    fn enumerate(&self, params: &[WParams]) -> Result<Vec<Transcript>, ProtocolError> {
        self.check_arity(params, None)?;
        BidirectionalSession::enumerate(&params[0], &params[1])
    }
}

pub struct ProtocolRegistry {
    protocols: Vec<Box<dyn Protocol>>,
}

impl ProtocolRegistry {
    pub fn empty() -> Self {
        ProtocolRegistry { protocols: vec![] }
    }

    /// Registers `protocol`, replacing any existing entry with the same name.
    pub fn register(&mut self, protocol: Box<dyn Protocol>) {
        self.protocols.retain(|p| p.name() != protocol.name());
        self.protocols.push(protocol);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Protocol, ProtocolError> {
        self.protocols
            .iter()
            .find(|p| p.name() == name)
            .map(|p| p.as_ref())
            .ok_or_else(|| ProtocolError::UnknownProtocol(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.protocols.iter().map(|p| p.name())
    }
}

impl Default for ProtocolRegistry {
    fn default() -> Self {
        let mut r = ProtocolRegistry::empty();
        r.register(Box::new(Unidirectional::w3()));
        r.register(Box::new(Unidirectional::w4()));
        r.register(Box::new(Bidirectional));
        r
    }
}
