//! A joint register whose qubits are addressed by name (`A0`, `b1`, …).

use crate::circuits::Circuit;
use crate::gates::GateOp;
use crate::statevector::{basis_ket, Basis, MeasurementOutcome, SimError, StateVector};

use super::ProtocolError;

#[derive(Debug, Clone)]
pub struct Register {
    labels: Vec<String>,
    state: StateVector,
}

impl Register {
    pub fn new(labels: Vec<String>, state: StateVector) -> Result<Self, ProtocolError> {
        if labels.len() != state.num_qubits() {
            return Err(SimError::SizeMismatch(labels.len(), state.num_qubits()).into());
        }
        Ok(Register { labels, state })
    }

    /// Places `other` to the right of `self`.
    pub fn join(self, other: Register) -> Result<Register, ProtocolError> {
        let state = self.state.tensor(&other.state)?;
        let mut labels = self.labels;
        labels.extend(other.labels);
        Register::new(labels, state)
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index(&self, label: &str) -> Result<usize, ProtocolError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| ProtocolError::UnknownQubit(label.to_string()))
    }

    pub fn indices(&self, labels: &[String]) -> Result<Vec<usize>, ProtocolError> {
        labels.iter().map(|l| self.index(l)).collect()
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<(), ProtocolError> {
        Ok(self.state.apply(gate)?)
    }

    pub fn cnot(&mut self, control: &str, target: &str) -> Result<(), ProtocolError> {
        let g = GateOp::cnot(self.index(control)?, self.index(target)?);
        self.apply(&g)
    }

    /// Runs `circuit` with its qubit `i` bound to `on[i]`.
    pub fn run_on(&mut self, circuit: &Circuit, on: &[String]) -> Result<(), ProtocolError> {
        let layout = self.indices(on)?;
        let mapped = circuit.relabel(&layout, self.state.num_qubits())?;
        Ok(self.state.apply_all(&mapped.gates)?)
    }

    pub fn measure_forced(
        &mut self,
        label: &str,
        basis: Basis,
        result: u8,
    ) -> Result<MeasurementOutcome, ProtocolError> {
        let q = self.index(label)?;
        Ok(self.state.measure_forced(q, basis, result)?)
    }

    pub fn measure_sampled<R: rand::Rng + ?Sized>(
        &mut self,
        label: &str,
        basis: Basis,
        rng: &mut R,
    ) -> Result<MeasurementOutcome, ProtocolError> {
        let q = self.index(label)?;
        Ok(self.state.measure_sampled(q, basis, rng)?)
    }

    /// Drops a qubit known to be in `basis`/`result` after measurement.
    pub fn discard(&mut self, label: &str, basis: Basis, result: u8) -> Result<(), ProtocolError> {
        let q = self.index(label)?;
        self.state = self.state.discard(q, basis_ket(basis, result))?;
        self.labels.remove(q);
        Ok(())
    }

    /// Drops a qubit that must already be `|0⟩`.
    pub fn discard_zero(&mut self, label: &str) -> Result<(), ProtocolError> {
        self.discard(label, Basis::Z, 0)
    }

    pub fn push_zero(&mut self, label: &str) -> Result<(), ProtocolError> {
        self.state = self.state.with_ancillas(1)?;
        self.labels.push(label.to_string());
        Ok(())
    }

    pub fn excited_mass(&self, label: &str) -> Result<f64, ProtocolError> {
        Ok(self.state.excited_mass(self.index(label)?)?)
    }

    pub fn fidelity_on(&self, on: &[String], target: &StateVector) -> Result<f64, ProtocolError> {
        Ok(self.state.subsystem_fidelity(&self.indices(on)?, target)?)
    }
}
