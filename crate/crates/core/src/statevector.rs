//! Dense state vectors with big-endian qubit ordering.
//!
//! Qubit 0 is the leftmost symbol of a ket: in an `n`-qubit register, qubit
//! `q` lives in bit `n - 1 - q` of the basis index, so `|100⟩` is index 4.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gates::{unitarity_defect, GateError, GateOp, Mat2, UNITARY_TOL};

pub const MAX_QUBITS: usize = 20;

/// Norm tolerance after construction and unitary evolution.
pub const NORM_TOL: f64 = 1e-12;

/// Ordering tag written into state dumps.
pub const ORDERING: &str = "big-endian-leftmost";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("register of {0} qubits is outside 1..={MAX_QUBITS}")]
    QubitCount(usize),
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("gate matrix deviates from unitary by {0:e}")]
    NonUnitary(f64),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("amplitude count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("size mismatch: {0} vs {1} qubits")]
    SizeMismatch(usize, usize),
    #[error("measurement branch {result} on qubit {qubit} has zero probability")]
    ImpossibleBranch { qubit: usize, result: u8 },
    #[error("qubit {qubit} is not in the requested product state (overlap {overlap})")]
    NotSeparable { qubit: usize, overlap: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

/// Result of a single-qubit projective measurement. For the X basis,
/// `result == 0` is `+` and `result == 1` is `−`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub qubit: usize,
    pub basis: Basis,
    pub result: u8,
    pub probability: f64,
}

impl MeasurementOutcome {
    /// `+`/`−` for X outcomes, `0`/`1` for Z outcomes.
    pub fn symbol(&self) -> char {
        match (self.basis, self.result) {
            (Basis::X, 0) => '+',
            (Basis::X, _) => '-',
            (Basis::Z, 0) => '0',
            (Basis::Z, _) => '1',
        }
    }
}

/// The single-qubit state selected by `result` in `basis`.
pub fn basis_ket(basis: Basis, result: u8) -> [Complex64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match (basis, result) {
        (Basis::Z, 0) => [1.0.into(), 0.0.into()],
        (Basis::Z, _) => [0.0.into(), 1.0.into()],
        (Basis::X, 0) => [s.into(), s.into()],
        (Basis::X, _) => [s.into(), (-s).into()],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// Serializable snapshot of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub num_qubits: usize,
    pub ordering: String,
    pub amplitudes: Vec<[f64; 2]>,
}

fn check_count(n: usize) -> Result<(), SimError> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(SimError::QubitCount(n))
    }
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn new_zero(num_qubits: usize) -> Result<Self, SimError> {
        Self::basis(num_qubits, 0)
    }

    /// Computational basis state with the given index.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, SimError> {
        check_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(SimError::QubitOutOfRange {
                index,
                num_qubits,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Basis state from a bit string such as `"0110"` (leftmost = qubit 0).
    pub fn from_bitstring(bits: &str) -> Result<Self, SimError> {
        let index = bits
            .chars()
            .fold(0usize, |acc, c| (acc << 1) | usize::from(c == '1'));
        Self::basis(bits.len(), index)
    }

    /// Wraps raw amplitudes. The vector must have length `2^n` and unit norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::NotPowerOfTwo(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_count(num_qubits)?;
        let state = StateVector { num_qubits, amps };
        let n = state.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
            return Err(SimError::NotNormalized(n));
        }
        Ok(state)
    }

    /// Builds a state from `(bitstring, amplitude)` terms and normalizes it.
    pub fn from_terms<'a>(
        num_qubits: usize,
        terms: impl IntoIterator<Item = (&'a str, Complex64)>,
    ) -> Result<Self, SimError> {
        check_count(num_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        for (bits, amp) in terms {
            if bits.len() != num_qubits {
                return Err(SimError::SizeMismatch(bits.len(), num_qubits));
            }
            let idx = bits
                .chars()
                .fold(0usize, |acc, c| (acc << 1) | usize::from(c == '1'));
            amps[idx] += amp;
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SimError::NotNormalized(norm));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1usize << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), SimError> {
        if qubit < self.num_qubits {
            Ok(())
        } else {
            Err(SimError::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            })
        }
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<(), SimError> {
        let base = gate.base_matrix()?;
        let defect = unitarity_defect(&base);
        if defect > UNITARY_TOL {
            return Err(SimError::NonUnitary(defect));
        }
        for q in gate.qubits() {
            self.check_qubit(q)?;
        }
        let control_mask = gate.controls.iter().fold(0, |m, &c| m | self.mask(c));
        self.apply_controlled(control_mask, self.mask(gate.target()), &base);
        Ok(())
    }

    fn apply_controlled(&mut self, control_mask: usize, target_mask: usize, m: &Mat2) {
        for i in 0..self.amps.len() {
            if i & target_mask != 0 || i & control_mask != control_mask {
                continue;
            }
            let j = i | target_mask;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Applies each gate in order.
    pub fn apply_all<'g>(
        &mut self,
        gates: impl IntoIterator<Item = &'g GateOp>,
    ) -> Result<(), SimError> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    /// Probability that measuring `qubit` in `basis` yields `result`.
    pub fn probability(&self, qubit: usize, basis: Basis, result: u8) -> Result<f64, SimError> {
        self.check_qubit(qubit)?;
        let ket = basis_ket(basis, result);
        let mask = self.mask(qubit);
        let p = (0..self.amps.len())
            .filter(|i| i & mask == 0)
            .map(|i| (ket[0].conj() * self.amps[i] + ket[1].conj() * self.amps[i | mask]).norm_sqr())
            .sum();
        Ok(p)
    }

    /// Measures `qubit` with a predetermined outcome and collapses the state.
    pub fn measure_forced(
        &mut self,
        qubit: usize,
        basis: Basis,
        result: u8,
    ) -> Result<MeasurementOutcome, SimError> {
        let p = self.probability(qubit, basis, result)?;
        if p <= NORM_TOL {
            return Err(SimError::ImpossibleBranch { qubit, result });
        }
        self.collapse(qubit, basis, result, p);
        Ok(MeasurementOutcome {
            qubit,
            basis,
            result,
            probability: p,
        })
    }

    /// Measures `qubit`, sampling the outcome from the Born rule.
    pub fn measure_sampled<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        basis: Basis,
        rng: &mut R,
    ) -> Result<MeasurementOutcome, SimError> {
        let p0 = self.probability(qubit, basis, 0)?;
        let draw: f64 = rng.gen();
        let result = if draw < p0 { 0 } else { 1 };
        let p = if result == 0 { p0 } else { 1.0 - p0 };
        self.collapse(qubit, basis, result, p);
        Ok(MeasurementOutcome {
            qubit,
            basis,
            result,
            probability: p,
        })
    }

    /// Measures with an optional forced outcome, otherwise sampling from a
    /// generator seeded with `rng_seed` (0 when absent). Returns the outcome
    /// and the collapsed copy.
    pub fn measure(
        &self,
        qubit: usize,
        basis: Basis,
        forced: Option<u8>,
        rng_seed: Option<u64>,
    ) -> Result<(MeasurementOutcome, StateVector), SimError> {
        use rand::SeedableRng;
        let mut next = self.clone();
        let outcome = match forced {
            Some(r) => next.measure_forced(qubit, basis, r)?,
            None => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed.unwrap_or(0));
                next.measure_sampled(qubit, basis, &mut rng)?
            }
        };
        Ok((outcome, next))
    }

    /// Projects `qubit` onto the chosen basis ket and renormalizes by `p`.
    fn collapse(&mut self, qubit: usize, basis: Basis, result: u8, p: f64) {
        let ket = basis_ket(basis, result);
        let mask = self.mask(qubit);
        let scale = 1.0 / p.sqrt();
        for i in 0..self.amps.len() {
            if i & mask != 0 {
                continue;
            }
            let j = i | mask;
            let overlap = ket[0].conj() * self.amps[i] + ket[1].conj() * self.amps[j];
            self.amps[i] = ket[0] * overlap * scale;
            self.amps[j] = ket[1] * overlap * scale;
        }
    }

    /// Removes `qubit`, which must be in the product state `ket`
    /// (up to phase). The remaining qubits keep their relative order.
    pub fn discard(&self, qubit: usize, ket: [Complex64; 2]) -> Result<StateVector, SimError> {
        self.check_qubit(qubit)?;
        check_count(self.num_qubits - 1)?;
        let n = self.num_qubits;
        let low_bits = n - 1 - qubit;
        let low_mask = (1usize << low_bits) - 1;
        let mask = self.mask(qubit);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (n - 1)];
        for (k, slot) in amps.iter_mut().enumerate() {
            let i = ((k & !low_mask) << 1) | (k & low_mask);
            *slot = ket[0].conj() * self.amps[i] + ket[1].conj() * self.amps[i | mask];
        }
        let overlap: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (overlap - 1.0).abs() > 1e-10 {
            return Err(SimError::NotSeparable { qubit, overlap });
        }
        Ok(StateVector {
            num_qubits: n - 1,
            amps,
        })
    }

    /// Total probability on basis states where `qubit` reads 1.
    pub fn excited_mass(&self, qubit: usize) -> Result<f64, SimError> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `|⟨a|b⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64, SimError> {
        if self.num_qubits != other.num_qubits {
            return Err(SimError::SizeMismatch(self.num_qubits, other.num_qubits));
        }
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(inner.norm_sqr())
    }

    /// `⟨target| ρ_S |target⟩` where `ρ_S` is the reduced state on `qubits`
    /// (listed in the order matching `target`'s qubits).
    pub fn subsystem_fidelity(
        &self,
        qubits: &[usize],
        target: &StateVector,
    ) -> Result<f64, SimError> {
        if qubits.len() != target.num_qubits {
            return Err(SimError::SizeMismatch(qubits.len(), target.num_qubits));
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let k = qubits.len();
        let sub_masks: Vec<usize> = qubits.iter().map(|&q| self.mask(q)).collect();
        let sub_mask_all = sub_masks.iter().fold(0, |m, &b| m | b);
        // Project the target onto the state, environment index by environment index.
        let mut projections = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, amp) in self.amps.iter().enumerate() {
            let mut s = 0usize;
            for (pos, &m) in sub_masks.iter().enumerate() {
                if i & m != 0 {
                    s |= 1 << (k - 1 - pos);
                }
            }
            projections[i & !sub_mask_all] += target.amps[s].conj() * amp;
        }
        Ok(projections.iter().map(|p| p.norm_sqr()).sum())
    }

    /// Tensor product with `self` occupying the leftmost qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, SimError> {
        let n = self.num_qubits + other.num_qubits;
        check_count(n)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Appends `count` qubits in `|0⟩` on the right.
    pub fn with_ancillas(&self, count: usize) -> Result<StateVector, SimError> {
        if count == 0 {
            return Ok(self.clone());
        }
        self.tensor(&StateVector::new_zero(count)?)
    }

    /// Largest elementwise amplitude difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64, SimError> {
        if self.num_qubits != other.num_qubits {
            return Err(SimError::SizeMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn dump(&self) -> StateDump {
        StateDump {
            num_qubits: self.num_qubits,
            ordering: ORDERING.to_string(),
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    /// Big-endian bit string for a basis index.
    pub fn bitstring(&self, index: usize) -> String {
        format!("{:0width$b}", index, width = self.num_qubits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus() -> StateVector {
        StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap()
    }

    #[test]
    fn zero_state_layout() {
        assert_eq!(StateVector::new_zero(1).unwrap().amplitudes(), &[c(1.0), c(0.0)]);
        assert_eq!(
            StateVector::new_zero(2).unwrap().amplitudes(),
            &[c(1.0), c(0.0), c(0.0), c(0.0)]
        );
        assert_eq!(StateVector::new_zero(3).unwrap().amplitude(0), c(1.0));
    }

    #[test]
    fn register_size_is_guarded() {
        assert_eq!(StateVector::new_zero(0), Err(SimError::QubitCount(0)));
        assert_eq!(StateVector::new_zero(21), Err(SimError::QubitCount(21)));
        let big = StateVector::new_zero(12).unwrap();
        assert!(matches!(big.tensor(&big), Err(SimError::QubitCount(24))));
    }

    #[test]
    fn basic_gate_actions() {
        let mut s = StateVector::new_zero(1).unwrap();
        s.apply(&GateOp::x(0)).unwrap();
        assert_eq!(s, StateVector::from_bitstring("1").unwrap());

        let mut s = StateVector::from_bitstring("10").unwrap();
        s.apply(&GateOp::cnot(0, 1)).unwrap();
        assert_eq!(s, StateVector::from_bitstring("11").unwrap());

        let mut s = StateVector::from_bitstring("110").unwrap();
        s.apply(&GateOp::toffoli(0, 1, 2)).unwrap();
        assert_eq!(s, StateVector::from_bitstring("111").unwrap());
    }

    #[test]
    fn gate_errors() {
        let mut s = StateVector::new_zero(2).unwrap();
        assert!(matches!(
            s.apply(&GateOp::x(2)),
            Err(SimError::QubitOutOfRange { index: 2, .. })
        ));
        assert!(matches!(
            s.apply(&GateOp::cnot(1, 1)),
            Err(SimError::Gate(GateError::DuplicateQubit(1)))
        ));
    }

    #[test]
    fn measurement_examples() {
        let one = StateVector::from_bitstring("1").unwrap();
        let (o, post) = one.measure(0, Basis::Z, None, Some(3)).unwrap();
        assert_eq!(o.result, 1);
        assert!((o.probability - 1.0).abs() < 1e-12);
        assert_eq!(post, one);

        let (o, _) = plus().measure(0, Basis::X, None, Some(9)).unwrap();
        assert_eq!(o.result, 0);
        assert_eq!(o.symbol(), '+');
        assert!((o.probability - 1.0).abs() < 1e-12);

        let (o, post) = plus().measure(0, Basis::Z, Some(1), None).unwrap();
        assert!((o.probability - 0.5).abs() < 1e-12);
        assert!(post.max_abs_diff(&one).unwrap() < 1e-12);
    }

    #[test]
    fn forcing_impossible_branch_fails() {
        let zero = StateVector::new_zero(1).unwrap();
        assert_eq!(
            zero.measure(0, Basis::Z, Some(1), None).unwrap_err(),
            SimError::ImpossibleBranch { qubit: 0, result: 1 }
        );
        assert!(plus().measure(0, Basis::X, Some(1), None).is_err());
    }

    #[test]
    fn x_measurement_leaves_qubit_in_minus() {
        let mut s = StateVector::new_zero(2).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::cnot(0, 1)).unwrap();
        s.measure_forced(0, Basis::X, 1).unwrap();
        let reduced = s.discard(0, basis_ket(Basis::X, 1)).unwrap();
        // Partner collapses to |−⟩ as well.
        let minus = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)]).unwrap();
        assert!((reduced.fidelity(&minus).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::new_zero(1).unwrap();
        let one = StateVector::from_bitstring("1").unwrap();
        assert!((plus().fidelity(&plus()).unwrap() - 1.0).abs() < 1e-12);
        assert!(zero.fidelity(&one).unwrap().abs() < 1e-15);
        let phase = Complex64::from_polar(1.0, PI / 3.0);
        let rotated =
            StateVector::from_amplitudes(plus().amplitudes().iter().map(|a| a * phase).collect())
                .unwrap();
        assert!((plus().fidelity(&rotated).unwrap() - 1.0).abs() < 1e-12);
        assert!(zero.fidelity(&StateVector::new_zero(2).unwrap()).is_err());
    }

    #[test]
    fn tensor_examples() {
        let one = StateVector::from_bitstring("1").unwrap();
        let zero = StateVector::new_zero(1).unwrap();
        assert_eq!(one.tensor(&zero).unwrap(), StateVector::from_bitstring("10").unwrap());
        let s = plus().tensor(&zero).unwrap();
        let want =
            StateVector::from_terms(2, [("00", c(1.0)), ("10", c(1.0))]).unwrap();
        assert!(s.max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn discard_rejects_entangled_qubit() {
        let mut s = StateVector::new_zero(2).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::cnot(0, 1)).unwrap();
        assert!(matches!(
            s.discard(1, basis_ket(Basis::Z, 0)),
            Err(SimError::NotSeparable { qubit: 1, .. })
        ));
    }

    #[test]
    fn discard_keeps_order_of_remaining_qubits() {
        let s = StateVector::from_bitstring("1011").unwrap();
        let r = s.discard(1, basis_ket(Basis::Z, 0)).unwrap();
        assert_eq!(r, StateVector::from_bitstring("111").unwrap());
    }

    #[test]
    fn subsystem_fidelity_of_product() {
        // |1⟩ ⊗ |+⟩ ⊗ |0⟩, check qubits (1) against |+⟩ and (2, 0) against |01⟩
        let s = StateVector::from_bitstring("1")
            .unwrap()
            .tensor(&plus())
            .unwrap()
            .tensor(&StateVector::new_zero(1).unwrap())
            .unwrap();
        assert!((s.subsystem_fidelity(&[1], &plus()).unwrap() - 1.0).abs() < 1e-12);
        let t = StateVector::from_bitstring("01").unwrap();
        assert!((s.subsystem_fidelity(&[2, 0], &t).unwrap() - 1.0).abs() < 1e-12);
        let t = StateVector::from_bitstring("10").unwrap();
        assert!(s.subsystem_fidelity(&[2, 0], &t).unwrap() < 1e-12);
    }

    #[test]
    fn subsystem_fidelity_of_bell_half_is_one_half() {
        let mut s = StateVector::new_zero(2).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::cnot(0, 1)).unwrap();
        let zero = StateVector::new_zero(1).unwrap();
        assert!((s.subsystem_fidelity(&[1], &zero).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dump_format() {
        let d = StateVector::from_bitstring("1").unwrap().dump();
        assert_eq!(d.ordering, "big-endian-leftmost");
        assert_eq!(d.amplitudes, vec![[0.0, 0.0], [1.0, 0.0]]);
    }
}
