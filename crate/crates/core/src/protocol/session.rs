//! End-to-end teleportation sessions over a jointly simulated register.
//!
//! Both parties act on one shared [`Register`]; only the 4-bit measurement
//! messages travel through the [`Mailbox`]. Preparation (generation,
//! pre-processing, channel, entangling CNOTs) is split from branch execution
//! so exhaustive enumeration pays for it once.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuits::{build_channel, WParams};
use crate::statevector::{Basis, StateVector};

use super::corrections::{CorrectionKey, CorrectionOps};
use super::family::{FamilyKind, Party, WFamily, W3, W4};
use super::party::{Mailbox, PartyMachine, Phase};
use super::register::Register;
use super::transcript::{Direction, Leg, OutcomeRecord, Transcript};
use super::ProtocolError;

/// Tolerance for intermediate-state checks.
pub const STATE_TOL: f64 = 1e-10;

/// Reset qubits may carry at most this much probability on `|1⟩`.
pub const RESET_TOL: f64 = 1e-20;

/// Fixed seed for the oracle's generic parameter draws.
const ORACLE_SEED: u64 = 0x00c0_ffee;

/// How measurement outcomes are chosen.
pub enum Branch<'r> {
    Forced(CorrectionKey),
    Sampled(&'r mut dyn RngCore),
}

fn labels(f: impl Fn(usize) -> String, range: std::ops::Range<usize>) -> Vec<String> {
    range.map(f).collect()
}

fn check_params(params: &WParams) -> Result<(), ProtocolError> {
    if params.is_finite() {
        Ok(())
    } else {
        Err(ProtocolError::NonFiniteParams)
    }
}

/// The sender's two X measurements and two Z measurements, in key order.
fn measure_sender(
    reg: &mut Register,
    party: Party,
    data: [&str; 2],
    channel: [&str; 2],
    branch: &mut Branch<'_>,
) -> Result<(CorrectionKey, Vec<OutcomeRecord>), ProtocolError> {
    let plan = [
        (data[0], Basis::X),
        (data[1], Basis::X),
        (channel[0], Basis::Z),
        (channel[1], Basis::Z),
    ];
    let forced = match branch {
        Branch::Forced(k) => Some(k.to_bits()),
        Branch::Sampled(_) => None,
    };
    let mut bits = [0u8; 4];
    let mut records = Vec::with_capacity(4);
    for (slot, (label, basis)) in plan.into_iter().enumerate() {
        let outcome = match (&forced, &mut *branch) {
            (Some(f), _) => reg.measure_forced(label, basis, f[slot])?,
            (None, Branch::Sampled(rng)) => reg.measure_sampled(label, basis, &mut **rng)?,
            (None, Branch::Forced(_)) => unreachable!(),
        };
        bits[slot] = outcome.result;
        records.push(OutcomeRecord {
            party,
            label: label.to_string(),
            qubit: outcome.qubit,
            basis,
            result: outcome.result,
            symbol: outcome.symbol(),
            probability: outcome.probability,
        });
    }
    Ok((CorrectionKey::from_bits(bits), records))
}

fn release_measured(reg: &mut Register, records: &[OutcomeRecord]) -> Result<(), ProtocolError> {
    for r in records {
        reg.discard(&r.label, r.basis, r.result)?;
    }
    Ok(())
}

fn apply_correction(
    reg: &mut Register,
    ops: CorrectionOps,
    on: [&str; 2],
) -> Result<(), ProtocolError> {
    let qubits = [reg.index(on[0])?, reg.index(on[1])?];
    for g in ops.gates(qubits) {
        reg.apply(&g)?;
    }
    Ok(())
}

/// The joint state of the compressed data pair, the sender's channel pair
/// and the receiver's channel pair, written term by term: each data basis
/// state `d0 d1` with coefficient `c` contributes `c/2 |d0 d1, i⊕e·d0,
/// j⊕e·d1, i, j⟩` for `i, j ∈ {0,1}`, where `e` is 1 after the entangling
/// CNOTs and 0 before.
pub fn expected_joint_state(
    family: &dyn WFamily,
    params: &WParams,
    entangled: bool,
) -> Result<StateVector, ProtocolError> {
    let coeffs = family.coefficients(params);
    let e = u8::from(entangled);
    let mut terms = Vec::with_capacity(16);
    for (bits, c) in family.compressed_support().iter().zip(&coeffs.values) {
        let d: Vec<u8> = bits.bytes().map(|b| b - b'0').collect();
        for i in 0..2u8 {
            for j in 0..2u8 {
                let s = format!("{}{}{}{}{}{}", d[0], d[1], i ^ (e & d[0]), j ^ (e & d[1]), i, j);
                terms.push((s, *c));
            }
        }
    }
    Ok(StateVector::from_terms(
        6,
        terms.iter().map(|(s, c)| (s.as_str(), *c)),
    )?)
}

fn check_stage(
    stage: &'static str,
    got: &StateVector,
    want: &StateVector,
) -> Result<(), ProtocolError> {
    let deviation = got.max_abs_diff(want)?;
    if deviation > STATE_TOL {
        return Err(ProtocolError::IntermediateState { stage, deviation });
    }
    Ok(())
}

/// A W state prepared, compressed, and entangled with the channel, ready
/// for the sender's measurements.
#[derive(Debug, Clone)]
pub struct PreparedTeleport {
    pub params: WParams,
    /// Closed-form W state the receiver must reconstruct.
    pub target: StateVector,
    /// Simulated two-qubit data state after pre-processing.
    pub compressed: StateVector,
    /// Joint state on `(S0, S1, s0, s1, r0, r1)` before the entangling CNOTs.
    pub joint_before_cnot: StateVector,
    pub register: Register,
}

/// One-way teleportation of a W state from the family's sender.
#[derive(Clone, Copy)]
pub struct Teleport {
    family: FamilyKind,
}

impl Teleport {
    pub fn new(family: FamilyKind) -> Self {
        Teleport { family }
    }

    pub fn family(&self) -> &'static dyn WFamily {
        self.family.family()
    }

    fn sender(&self) -> Party {
        self.family().sender()
    }

    fn receiver(&self) -> Party {
        self.family().receiver()
    }

    fn data(&self, i: usize) -> String {
        self.sender().data_label(i)
    }

    fn send_ch(&self, i: usize) -> String {
        self.sender().channel_label(i)
    }

    fn recv_ch(&self, i: usize) -> String {
        self.receiver().channel_label(i)
    }

    pub fn prepare(&self, params: &WParams) -> Result<PreparedTeleport, ProtocolError> {
        check_params(params)?;
        let family = self.family();
        let n = family.register_size();
        let data = labels(|i| self.data(i), 0..n);

        let mut reg = Register::new(data.clone(), StateVector::new_zero(n)?)?;
        reg.run_on(&family.generator(params), &data)?;
        reg.run_on(&family.preprocess(), &data)?;
        for label in &data[2..] {
            let mass = reg.excited_mass(label)?;
            if mass > RESET_TOL {
                return Err(ProtocolError::NotReset {
                    qubit: label.clone(),
                    mass,
                });
            }
            reg.discard_zero(label)?;
        }
        let compressed = reg.state().clone();

        let mut channel_labels = labels(|i| self.send_ch(i), 0..2);
        channel_labels.extend(labels(|i| self.recv_ch(i), 0..2));
        let channel = Register::new(channel_labels, build_channel(2)?.run_from_zero()?)?;
        let mut reg = reg.join(channel)?;

        let joint_before_cnot = reg.state().clone();
        check_stage(
            "tensor with channel",
            &joint_before_cnot,
            &expected_joint_state(family, params, false)?,
        )?;
        for i in 0..2 {
            reg.cnot(&self.data(i), &self.send_ch(i))?;
        }
        check_stage(
            "entangling CNOTs",
            reg.state(),
            &expected_joint_state(family, params, true)?,
        )?;

        Ok(PreparedTeleport {
            params: *params,
            target: family.target_state(params)?,
            compressed,
            joint_before_cnot,
            register: reg,
        })
    }

    /// Performs the sender's measurements and drops the measured qubits,
    /// leaving only the receiver's `(r0, r1)` pair.
    pub fn measure(
        &self,
        prepared: &PreparedTeleport,
        branch: &mut Branch<'_>,
    ) -> Result<(Register, CorrectionKey, Vec<OutcomeRecord>), ProtocolError> {
        let mut reg = prepared.register.clone();
        let (d0, d1, s0, s1) = (self.data(0), self.data(1), self.send_ch(0), self.send_ch(1));
        let (key, records) = measure_sender(&mut reg, self.sender(), [&d0, &d1], [&s0, &s1], branch)?;
        release_measured(&mut reg, &records)?;
        Ok((reg, key, records))
    }

    pub fn run(
        &self,
        prepared: &PreparedTeleport,
        mut branch: Branch<'_>,
    ) -> Result<Transcript, ProtocolError> {
        let family = self.family();
        let mut sender = PartyMachine::new(self.sender());
        let mut receiver = PartyMachine::new(self.receiver());
        sender.advance(Phase::Preprocessed)?;
        sender.advance(Phase::Entangled)?;
        receiver.advance(Phase::Entangled)?;

        let (mut reg, key, records) = self.measure(prepared, &mut branch)?;
        sender.advance(Phase::Measured)?;

        let mut mailbox = Mailbox::default();
        let message = mailbox.send(self.sender(), key);

        let received = mailbox.receive(self.receiver())?;
        let corrections = family.correction(received);
        let (r0, r1) = (self.recv_ch(0), self.recv_ch(1));
        apply_correction(&mut reg, corrections, [&r0, &r1])?;
        receiver.advance(Phase::Corrected)?;

        let ancillas = labels(|i| format!("anc{i}"), 0..family.ancillas());
        for a in &ancillas {
            reg.push_zero(a)?;
        }
        let mut out = vec![r0, r1];
        out.extend(ancillas.iter().cloned());
        reg.run_on(&family.postprocess(), &out)?;
        receiver.advance(Phase::Reconstructed)?;

        let final_fidelity = reg.fidelity_on(&out, &prepared.target)?;
        Ok(Transcript {
            direction: Direction::from_sender(self.sender()),
            legs: vec![Leg {
                family: family.name().to_string(),
                sender: self.sender(),
                receiver: self.receiver(),
                params: prepared.params,
                key,
                message,
                corrections,
                classical_bits: message.len(),
                ancillas,
                final_fidelity,
            }],
            outcomes: records,
            classical_bits_sent: mailbox.bits_sent(),
        })
    }

    /// Runs every one of the 16 branches, in table order.
    pub fn enumerate(&self, params: &WParams) -> Result<Vec<Transcript>, ProtocolError> {
        let prepared = self.prepare(params)?;
        CorrectionKey::all()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|k| self.run(&prepared, Branch::Forced(k)))
            .collect()
    }
}

fn run_single(
    family: FamilyKind,
    params: &WParams,
    branch: Option<CorrectionKey>,
    rng_seed: Option<u64>,
) -> Result<Transcript, ProtocolError> {
    let t = Teleport::new(family);
    let prepared = t.prepare(params)?;
    match branch {
        Some(k) => t.run(&prepared, Branch::Forced(k)),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed.unwrap_or(0));
            t.run(&prepared, Branch::Sampled(&mut rng))
        }
    }
}

/// Three-qubit W state from Alice to Bob.
pub fn run_teleport_w3(
    params: &WParams,
    branch: Option<CorrectionKey>,
    rng_seed: Option<u64>,
) -> Result<Transcript, ProtocolError> {
    run_single(FamilyKind::W3, params, branch, rng_seed)
}

/// Four-qubit W state from Bob to Alice.
pub fn run_teleport_w4(
    params: &WParams,
    branch: Option<CorrectionKey>,
    rng_seed: Option<u64>,
) -> Result<Transcript, ProtocolError> {
    run_single(FamilyKind::W4, params, branch, rng_seed)
}

/// Recovers the receiver's correction for `key` by simulation alone: run
/// the protocol up to measurement for a few generic parameter draws and keep
/// the Pauli pairs that restore the compressed data state in every draw.
pub fn derive_correction_oracle(
    family: FamilyKind,
    key: CorrectionKey,
) -> Result<CorrectionOps, ProtocolError> {
    let t = Teleport::new(family);
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let mut survivors: Vec<CorrectionOps> = CorrectionOps::candidates().collect();
    for _ in 0..3 {
        let params = WParams::random(&mut rng);
        let prepared = t.prepare(&params)?;
        let (reg, _, _) = t.measure(&prepared, &mut Branch::Forced(key))?;
        let received = reg.state();
        let mut kept = Vec::with_capacity(survivors.len());
        for ops in survivors {
            let mut s = received.clone();
            s.apply_all(&ops.gates([0, 1]))?;
            if s.fidelity(&prepared.compressed)? > 1.0 - STATE_TOL {
                kept.push(ops);
            }
        }
        survivors = kept;
    }
    match survivors.as_slice() {
        [only] => Ok(*only),
        [] => Err(ProtocolError::NoCorrection(key)),
        many => Err(ProtocolError::AmbiguousCorrection {
            key,
            count: many.len(),
        }),
    }
}

/// Alice's W3 and Bob's W4 after pre-processing, sharing the 8-qubit
/// channel, with all four entangling CNOTs applied.
#[derive(Debug, Clone)]
pub struct PreparedBidirectional {
    pub params_a: WParams,
    pub params_b: WParams,
    pub target_a: StateVector,
    pub target_b: StateVector,
    pub register: Register,
}

pub struct BidirectionalSession;

/// Qubit roles in the bidirectional session. Alice sends on pairs 0–1,
/// Bob on pairs 2–3.
mod roles {
    pub const ALICE_DATA: [&str; 2] = ["A0", "A1"];
    pub const ALICE_SEND: [&str; 2] = ["a0", "a1"];
    pub const ALICE_RECV: [&str; 2] = ["a2", "a3"];
    pub const BOB_DATA: [&str; 2] = ["B0", "B1"];
    pub const BOB_SEND: [&str; 2] = ["b2", "b3"];
    pub const BOB_RECV: [&str; 2] = ["b0", "b1"];
    /// Alice's freed data qubit plus one fresh qubit.
    pub const ALICE_ANCILLAS: [&str; 2] = ["A2", "anc0"];
    /// Bob's freed data qubit.
    pub const BOB_ANCILLAS: [&str; 1] = ["B2"];
}

impl BidirectionalSession {
    pub fn prepare(
        params_a: &WParams,
        params_b: &WParams,
    ) -> Result<PreparedBidirectional, ProtocolError> {
        check_params(params_a)?;
        check_params(params_b)?;

        let a_labels = labels(|i| Party::Alice.data_label(i), 0..3);
        let mut alice = Register::new(a_labels.clone(), StateVector::new_zero(3)?)?;
        alice.run_on(&W3.generator(params_a), &a_labels)?;
        alice.run_on(&W3.preprocess(), &a_labels)?;

        let b_labels = labels(|i| Party::Bob.data_label(i), 0..4);
        let mut bob = Register::new(b_labels.clone(), StateVector::new_zero(4)?)?;
        bob.run_on(&W4.generator(params_b), &b_labels)?;
        bob.run_on(&W4.preprocess(), &b_labels)?;

        for (reg, label) in [(&alice, "A2"), (&bob, "B2"), (&bob, "B3")] {
            let mass = reg.excited_mass(label)?;
            if mass > RESET_TOL {
                return Err(ProtocolError::NotReset {
                    qubit: label.to_string(),
                    mass,
                });
            }
        }

        let mut ch_labels = labels(|i| Party::Alice.channel_label(i), 0..4);
        ch_labels.extend(labels(|i| Party::Bob.channel_label(i), 0..4));
        let channel = Register::new(ch_labels, build_channel(4)?.run_from_zero()?)?;

        let mut reg = alice.join(bob)?.join(channel)?;
        for (data, send) in roles::ALICE_DATA.iter().zip(roles::ALICE_SEND) {
            reg.cnot(data, send)?;
        }
        for (data, send) in roles::BOB_DATA.iter().zip(roles::BOB_SEND) {
            reg.cnot(data, send)?;
        }

        Ok(PreparedBidirectional {
            params_a: *params_a,
            params_b: *params_b,
            target_a: W3.target_state(params_a)?,
            target_b: W4.target_state(params_b)?,
            register: reg,
        })
    }

    /// `branches` is `(Alice's key, Bob's key)` when forced.
    pub fn run(
        prepared: &PreparedBidirectional,
        branches: Option<(CorrectionKey, CorrectionKey)>,
        rng: Option<&mut dyn RngCore>,
    ) -> Result<Transcript, ProtocolError> {
        let mut alice = PartyMachine::new(Party::Alice);
        let mut bob = PartyMachine::new(Party::Bob);
        for m in [&mut alice, &mut bob] {
            m.advance(Phase::Preprocessed)?;
            m.advance(Phase::Entangled)?;
        }

        let mut reg = prepared.register.clone();
        let mut fallback = ChaCha8Rng::seed_from_u64(0);
        let rng: &mut dyn RngCore = match rng {
            Some(r) => r,
            None => &mut fallback,
        };
        let (key_a, mut records) = match branches {
            Some((ka, _)) => measure_sender(
                &mut reg,
                Party::Alice,
                roles::ALICE_DATA,
                roles::ALICE_SEND,
                &mut Branch::Forced(ka),
            )?,
            None => measure_sender(
                &mut reg,
                Party::Alice,
                roles::ALICE_DATA,
                roles::ALICE_SEND,
                &mut Branch::Sampled(&mut *rng),
            )?,
        };
        let (key_b, bob_records) = match branches {
            Some((_, kb)) => measure_sender(
                &mut reg,
                Party::Bob,
                roles::BOB_DATA,
                roles::BOB_SEND,
                &mut Branch::Forced(kb),
            )?,
            None => measure_sender(
                &mut reg,
                Party::Bob,
                roles::BOB_DATA,
                roles::BOB_SEND,
                &mut Branch::Sampled(&mut *rng),
            )?,
        };
        records.extend(bob_records);
        alice.advance(Phase::Measured)?;
        bob.advance(Phase::Measured)?;
        release_measured(&mut reg, &records)?;

        let mut mailbox = Mailbox::default();
        let message_a = mailbox.send(Party::Alice, key_a);
        let message_b = mailbox.send(Party::Bob, key_b);

        // Each side consults only what the other sent.
        let bob_ops = W3.correction(mailbox.receive(Party::Bob)?);
        apply_correction(&mut reg, bob_ops, roles::BOB_RECV)?;
        bob.advance(Phase::Corrected)?;
        let alice_ops = W4.correction(mailbox.receive(Party::Alice)?);
        apply_correction(&mut reg, alice_ops, roles::ALICE_RECV)?;
        alice.advance(Phase::Corrected)?;

        reg.push_zero(roles::ALICE_ANCILLAS[1])?;

        let bob_out: Vec<String> = roles::BOB_RECV
            .iter()
            .chain(&roles::BOB_ANCILLAS)
            .map(|s| s.to_string())
            .collect();
        reg.run_on(&W3.postprocess(), &bob_out)?;
        bob.advance(Phase::Reconstructed)?;

        let alice_out: Vec<String> = roles::ALICE_RECV
            .iter()
            .chain(&roles::ALICE_ANCILLAS)
            .map(|s| s.to_string())
            .collect();
        reg.run_on(&W4.postprocess(), &alice_out)?;
        alice.advance(Phase::Reconstructed)?;

        let fidelity_at_bob = reg.fidelity_on(&bob_out, &prepared.target_a)?;
        let fidelity_at_alice = reg.fidelity_on(&alice_out, &prepared.target_b)?;

        let to_strings = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Ok(Transcript {
            direction: Direction::Bidirectional,
            legs: vec![
                Leg {
                    family: W3.name().to_string(),
                    sender: Party::Alice,
                    receiver: Party::Bob,
                    params: prepared.params_a,
                    key: key_a,
                    message: message_a,
                    corrections: bob_ops,
                    classical_bits: message_a.len(),
                    ancillas: to_strings(&roles::BOB_ANCILLAS),
                    final_fidelity: fidelity_at_bob,
                },
                Leg {
                    family: W4.name().to_string(),
                    sender: Party::Bob,
                    receiver: Party::Alice,
                    params: prepared.params_b,
                    key: key_b,
                    message: message_b,
                    corrections: alice_ops,
                    classical_bits: message_b.len(),
                    ancillas: to_strings(&roles::ALICE_ANCILLAS),
                    final_fidelity: fidelity_at_alice,
                },
            ],
            outcomes: records,
            classical_bits_sent: mailbox.bits_sent(),
        })
    }

    /// All 256 `(Alice key, Bob key)` pairs, Alice-major.
    pub fn enumerate(
        params_a: &WParams,
        params_b: &WParams,
    ) -> Result<Vec<Transcript>, ProtocolError> {
        let prepared = Self::prepare(params_a, params_b)?;
        let pairs: Vec<(CorrectionKey, CorrectionKey)> = CorrectionKey::all()
            .flat_map(|ka| CorrectionKey::all().map(move |kb| (ka, kb)))
            .collect();
        pairs
            .into_par_iter()
            .map(|p| Self::run(&prepared, Some(p), None))
            .collect()
    }
}

pub fn run_bidirectional(
    params_a: &WParams,
    params_b: &WParams,
    branches: Option<(CorrectionKey, CorrectionKey)>,
    rng_seed: Option<u64>,
) -> Result<Transcript, ProtocolError> {
    let prepared = BidirectionalSession::prepare(params_a, params_b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed.unwrap_or(0));
    BidirectionalSession::run(&prepared, branches, Some(&mut rng))
}
