//! Circuit builders for W-state generation, the compressing pre-processing
//! step, its receiver-side inverse, and the Bell-pair channels.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gates::GateOp;
use crate::statevector::{SimError, StateVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("unsupported channel size: {0} pairs (expected 1, 2 or 4)")]
    PairCount(usize),
    #[error("gate {gate} touches qubit {qubit} outside a {num_qubits}-qubit circuit")]
    QubitOutOfRange {
        gate: String,
        qubit: usize,
        num_qubits: usize,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Rotation angles (radians) parameterizing a W state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WParams {
    pub theta0: f64,
    pub phi0: f64,
    pub theta1: f64,
    pub phi1: f64,
}

impl WParams {
    pub fn new(theta0: f64, phi0: f64, theta1: f64, phi1: f64) -> Self {
        WParams {
            theta0,
            phi0,
            theta1,
            phi1,
        }
    }

    /// Parameters giving `(|100⟩ + |010⟩ + |001⟩)/√3`.
    pub fn equal_weight_w3() -> Self {
        use std::f64::consts::PI;
        WParams::new(2.0 * (1.0 / 3f64.sqrt()).acos(), PI, PI / 2.0, PI)
    }

    /// Uniform draw of all four angles from `[0, 2π)`.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let tau = std::f64::consts::TAU;
        WParams::new(
            rng.gen_range(0.0..tau),
            rng.gen_range(0.0..tau),
            rng.gen_range(0.0..tau),
            rng.gen_range(0.0..tau),
        )
    }

    pub fn is_finite(&self) -> bool {
        [self.theta0, self.phi0, self.theta1, self.phi1]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// W-state amplitudes, in the order of the family's support basis states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WCoefficients {
    pub values: Vec<Complex64>,
}

impl WCoefficients {
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Support of the three-qubit W state: `|100⟩, |010⟩, |001⟩`.
pub const W3_SUPPORT: [&str; 3] = ["100", "010", "001"];

/// Support of the four-qubit W state: `|0010⟩, |0100⟩, |1000⟩, |0001⟩`.
pub const W4_SUPPORT: [&str; 4] = ["0010", "0100", "1000", "0001"];

/// Two-qubit basis states carrying the coefficients after pre-processing.
pub const W3_COMPRESSED: [&str; 3] = ["00", "10", "11"];
pub const W4_COMPRESSED: [&str; 4] = ["00", "01", "10", "11"];

fn half_angles(theta: f64) -> (f64, f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    (c, s)
}

pub fn w3_coefficients(p: &WParams) -> WCoefficients {
    let (c0, s0) = half_angles(p.theta0);
    let (c1, s1) = half_angles(p.theta1);
    WCoefficients {
        values: vec![
            Complex64::new(c0, 0.0),
            -Complex64::from_polar(1.0, p.phi0) * s0 * c1,
            Complex64::from_polar(1.0, p.phi0 + p.phi1) * s0 * s1,
        ],
    }
}

pub fn w4_coefficients(p: &WParams) -> WCoefficients {
    let (c0, s0) = half_angles(p.theta0);
    let (c1, s1) = half_angles(p.theta1);
    WCoefficients {
        values: vec![
            Complex64::new(c0 * c1, 0.0),
            -Complex64::from_polar(1.0, p.phi1) * c0 * s1,
            -Complex64::from_polar(1.0, p.phi0) * s0 * c1,
            Complex64::from_polar(1.0, p.phi0 + p.phi1) * s0 * s1,
        ],
    }
}

/// Places `coeffs` on the given basis states.
pub fn state_from_support(
    support: &[&str],
    coeffs: &WCoefficients,
) -> Result<StateVector, SimError> {
    let n = support[0].len();
    StateVector::from_terms(n, support.iter().copied().zip(coeffs.values.iter().copied()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<GateOp>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<GateOp>) -> Result<Self, CircuitError> {
        let c = Circuit { num_qubits, gates };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for g in &self.gates {
            g.validate().map_err(SimError::from)?;
            if let Some(q) = g.qubits().find(|&q| q >= self.num_qubits) {
                return Err(CircuitError::QubitOutOfRange {
                    gate: g.to_string(),
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        Ok(())
    }

    /// Same gates with every qubit `q` mapped to `layout[q]`, on a wider register.
    pub fn relabel(&self, layout: &[usize], num_qubits: usize) -> Result<Circuit, CircuitError> {
        let gates = self
            .gates
            .iter()
            .map(|g| GateOp {
                kind: g.kind,
                params: g.params.clone(),
                controls: g.controls.iter().map(|&c| layout[c]).collect(),
                targets: g.targets.iter().map(|&t| layout[t]).collect(),
            })
            .collect();
        Circuit::new(num_qubits, gates)
    }

    /// Runs the circuit on `|0…0⟩`.
    pub fn run_from_zero(&self) -> Result<StateVector, SimError> {
        let mut s = StateVector::new_zero(self.num_qubits)?;
        s.apply_all(&self.gates)?;
        Ok(s)
    }

    /// Runs the circuit on `input`.
    pub fn run(&self, input: &StateVector) -> Result<StateVector, CircuitError> {
        if input.num_qubits() != self.num_qubits {
            return Err(SimError::SizeMismatch(input.num_qubits(), self.num_qubits).into());
        }
        let mut s = input.clone();
        s.apply_all(&self.gates)?;
        Ok(s)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.num_qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Prepares `cos(θ/2)|0⟩ − e^{iφ} sin(θ/2)|1⟩` on `qubit`; the negative
/// RY angle supplies the minus sign.
fn init_qubit(theta: f64, phi: f64, qubit: usize) -> [GateOp; 2] {
    [GateOp::ry(-theta, qubit), GateOp::rz(phi, qubit)]
}

fn preprocess3_gates() -> Vec<GateOp> {
    vec![GateOp::x(0), GateOp::cnot(0, 1), GateOp::cnot(1, 2)]
}

fn preprocess4_gates() -> Vec<GateOp> {
    vec![
        GateOp::cnot(3, 1),
        GateOp::cnot(3, 0),
        GateOp::toffoli(0, 1, 3),
        GateOp::x(0),
        GateOp::x(1),
        GateOp::toffoli(0, 1, 2),
        GateOp::x(0),
        GateOp::x(1),
    ]
}

/// Every gate here is self-inverse, so reversing the list inverts it.
fn reversed(mut gates: Vec<GateOp>) -> Vec<GateOp> {
    gates.reverse();
    gates
}

pub fn build_w3_generator(p: &WParams) -> Circuit {
    let mut gates = init_qubit(p.theta0, p.phi0, 0).to_vec();
    gates.push(GateOp::cry(-p.theta1, 0, 1));
    gates.push(GateOp::rz(p.phi1, 1));
    // CNOT(1→2), CNOT(0→1), X(0)
    gates.extend(reversed(preprocess3_gates()));
    Circuit { num_qubits: 3, gates }
}

pub fn build_w4_generator(p: &WParams) -> Circuit {
    let mut gates = init_qubit(p.theta0, p.phi0, 0).to_vec();
    gates.extend(init_qubit(p.theta1, p.phi1, 1));
    gates.extend(reversed(preprocess4_gates()));
    Circuit { num_qubits: 4, gates }
}

/// X(0), CNOT(0→1), CNOT(1→2): compresses a W3 state onto qubits 0–1.
pub fn build_preprocess3() -> Circuit {
    Circuit {
        num_qubits: 3,
        gates: preprocess3_gates(),
    }
}

/// Compresses a W4 state onto qubits 0–1, leaving 2–3 in `|00⟩`.
pub fn build_preprocess4() -> Circuit {
    Circuit {
        num_qubits: 4,
        gates: preprocess4_gates(),
    }
}

/// Inverse of [`build_preprocess3`]; qubit 2 is the `|0⟩` ancilla.
pub fn build_postprocess3() -> Circuit {
    Circuit {
        num_qubits: 3,
        gates: reversed(preprocess3_gates()),
    }
}

/// Inverse of [`build_preprocess4`]; qubits 2–3 are the `|00⟩` ancillas.
pub fn build_postprocess4() -> Circuit {
    Circuit {
        num_qubits: 4,
        gates: reversed(preprocess4_gates()),
    }
}

/// `pairs` Bell pairs laid out as `(a0 … a_{n−1}, b0 … b_{n−1})`, pair `i`
/// joining `a_i` and `b_i`.
pub fn build_channel(pairs: usize) -> Result<Circuit, CircuitError> {
    if !matches!(pairs, 1 | 2 | 4) {
        return Err(CircuitError::PairCount(pairs));
    }
    let mut gates: Vec<GateOp> = (0..pairs).map(GateOp::h).collect();
    gates.extend((0..pairs).map(|i| GateOp::cnot(i, pairs + i)));
    Circuit::new(2 * pairs, gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_coeffs(got: &WCoefficients, want: &[Complex64]) {
        assert_eq!(got.values.len(), want.len());
        for (g, w) in got.values.iter().zip(want) {
            assert!((g - w).norm() < 1e-12, "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn w3_coefficient_examples() {
        assert_coeffs(
            &w3_coefficients(&WParams::new(0.0, 1.3, 2.1, -0.4)),
            &[c(1.0), c(0.0), c(0.0)],
        );
        assert_coeffs(
            &w3_coefficients(&WParams::new(PI, 0.0, 0.0, 0.0)),
            &[c(0.0), c(-1.0), c(0.0)],
        );
        let third = 1.0 / 3f64.sqrt();
        assert_coeffs(
            &w3_coefficients(&WParams::equal_weight_w3()),
            &[c(third), c(third), c(third)],
        );
    }

    #[test]
    fn w4_coefficient_examples() {
        assert_coeffs(
            &w4_coefficients(&WParams::new(0.0, 0.7, 0.0, 0.2)),
            &[c(1.0), c(0.0), c(0.0), c(0.0)],
        );
        assert_coeffs(
            &w4_coefficients(&WParams::new(PI, 0.0, PI, 0.0)),
            &[c(0.0), c(0.0), c(0.0), c(1.0)],
        );
        assert_coeffs(
            &w4_coefficients(&WParams::new(PI / 2.0, 0.0, PI / 2.0, 0.0)),
            &[c(0.5), c(-0.5), c(-0.5), c(0.5)],
        );
    }

    #[test]
    fn generator_examples() {
        let s = build_w3_generator(&WParams::new(0.0, 0.3, 1.0, 2.0))
            .run_from_zero()
            .unwrap();
        assert!(s.max_abs_diff(&StateVector::from_bitstring("100").unwrap()).unwrap() < 1e-12);

        let s = build_w3_generator(&WParams::equal_weight_w3()).run_from_zero().unwrap();
        let w = StateVector::from_terms(3, W3_SUPPORT.iter().map(|b| (*b, c(1.0)))).unwrap();
        assert!(s.max_abs_diff(&w).unwrap() < 1e-12);

        let s = build_w4_generator(&WParams::new(0.0, 0.5, 0.0, 0.5))
            .run_from_zero()
            .unwrap();
        assert!(s.max_abs_diff(&StateVector::from_bitstring("0010").unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn preprocess3_examples() {
        let p = build_preprocess3();
        let run = |b: &str| p.run(&StateVector::from_bitstring(b).unwrap()).unwrap();
        assert_eq!(run("100"), StateVector::from_bitstring("000").unwrap());
        assert_eq!(run("010"), StateVector::from_bitstring("100").unwrap());
        assert_eq!(run("001"), StateVector::from_bitstring("110").unwrap());
    }

    #[test]
    fn preprocess4_examples() {
        let p = build_preprocess4();
        let run = |b: &str| p.run(&StateVector::from_bitstring(b).unwrap()).unwrap();
        assert_eq!(run("0010"), StateVector::from_bitstring("0000").unwrap());
        assert_eq!(run("0100"), StateVector::from_bitstring("0100").unwrap());
        assert_eq!(run("1000"), StateVector::from_bitstring("1000").unwrap());
        assert_eq!(run("0001"), StateVector::from_bitstring("1100").unwrap());
    }

    #[test]
    fn postprocess_examples() {
        let s = build_postprocess3()
            .run(&StateVector::from_bitstring("000").unwrap())
            .unwrap();
        assert_eq!(s, StateVector::from_bitstring("100").unwrap());
        let s = build_postprocess4()
            .run(&StateVector::from_bitstring("1100").unwrap())
            .unwrap();
        assert_eq!(s, StateVector::from_bitstring("0001").unwrap());
    }

    #[test]
    fn channel_states() {
        let bell = build_channel(1).unwrap().run_from_zero().unwrap();
        let want = StateVector::from_terms(2, [("00", c(1.0)), ("11", c(1.0))]).unwrap();
        assert!(bell.max_abs_diff(&want).unwrap() < 1e-15);

        let two = build_channel(2).unwrap().run_from_zero().unwrap();
        let want = StateVector::from_terms(
            4,
            ["0000", "0101", "1010", "1111"].iter().map(|b| (*b, c(1.0))),
        )
        .unwrap();
        assert!(two.max_abs_diff(&want).unwrap() < 1e-15);

        let four = build_channel(4).unwrap().run_from_zero().unwrap();
        for (i, a) in four.amplitudes().iter().enumerate() {
            let expect = if i >> 4 == i & 0xf { 0.25 } else { 0.0 };
            assert!((a - c(expect)).norm() < 1e-15);
        }

        assert_eq!(build_channel(3), Err(CircuitError::PairCount(3)));
    }

    #[test]
    fn channel_pairs_are_correlated() {
        let two = build_channel(2).unwrap().run_from_zero().unwrap();
        for (a, b) in [(0, 2), (1, 3)] {
            for r in 0..2u8 {
                let (o, post) = two.measure(a, crate::statevector::Basis::Z, Some(r), None).unwrap();
                assert!((o.probability - 0.5).abs() < 1e-12);
                let (partner, _) =
                    post.measure(b, crate::statevector::Basis::Z, None, Some(1)).unwrap();
                assert_eq!(partner.result, r);
                assert!((partner.probability - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn circuit_validation_catches_out_of_range() {
        let err = Circuit::new(2, vec![GateOp::cnot(0, 2)]).unwrap_err();
        assert!(matches!(err, CircuitError::QubitOutOfRange { qubit: 2, .. }));
    }

    #[test]
    fn text_form_is_stable() {
        let text = build_preprocess3().to_string();
        assert_eq!(text, "qubits 3\nX q0\nCNOT q0 -> q1\nCNOT q1 -> q2\n");
    }
}
