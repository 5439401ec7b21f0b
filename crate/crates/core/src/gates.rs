//! The fixed gate set used by the generation and teleportation circuits.
//!
//! Every supported gate is a (possibly multiply-controlled) single-qubit
//! unitary, so a gate is stored as its kind, its angles, and its control and
//! target indices. [`GateOp::base_matrix`] yields the 2×2 block applied to the
//! target when all controls are set; [`GateOp::matrix`] expands it to the full
//! controlled operator.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used for unitarity checks.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("{kind} expects {expected_controls} control(s) and {expected_targets} target(s), got {controls} and {targets}")]
    Arity {
        kind: GateKind,
        expected_controls: usize,
        expected_targets: usize,
        controls: usize,
        targets: usize,
    },
    #[error("{kind} expects {expected} parameter(s), got {got}")]
    ParamCount {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("non-finite angle {0} in gate parameters")]
    NonFiniteParam(f64),
    #[error("qubit {0} appears more than once in a single gate")]
    DuplicateQubit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    X,
    H,
    Cnot,
    Toffoli,
    Ry,
    Rz,
    Cry,
}

impl GateKind {
    fn num_controls(self) -> usize {
        match self {
            GateKind::X | GateKind::H | GateKind::Ry | GateKind::Rz => 0,
            GateKind::Cnot | GateKind::Cry => 1,
            GateKind::Toffoli => 2,
        }
    }

    fn num_params(self) -> usize {
        match self {
            GateKind::Ry | GateKind::Rz | GateKind::Cry => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Cnot => "CNOT",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cry => "CRY",
        };
        f.write_str(name)
    }
}

/// 2×2 complex matrix in row-major order.
pub type Mat2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub params: Vec<f64>,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
}

impl GateOp {
    fn raw(kind: GateKind, params: Vec<f64>, controls: Vec<usize>, target: usize) -> Self {
        GateOp {
            kind,
            params,
            controls,
            targets: vec![target],
        }
    }

    pub fn x(target: usize) -> Self {
        Self::raw(GateKind::X, vec![], vec![], target)
    }

    pub fn h(target: usize) -> Self {
        Self::raw(GateKind::H, vec![], vec![], target)
    }

    pub fn ry(theta: f64, target: usize) -> Self {
        Self::raw(GateKind::Ry, vec![theta], vec![], target)
    }

    /// Phase gate `diag(1, e^{iφ})`.
    pub fn rz(phi: f64, target: usize) -> Self {
        Self::raw(GateKind::Rz, vec![phi], vec![], target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::raw(GateKind::Cnot, vec![], vec![control], target)
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Self::raw(GateKind::Toffoli, vec![], vec![c0, c1], target)
    }

    pub fn cry(theta: f64, control: usize, target: usize) -> Self {
        Self::raw(GateKind::Cry, vec![theta], vec![control], target)
    }

    /// Checks arity, parameter count, finiteness and index distinctness.
    /// Range checks against a register size happen at application time.
    pub fn validate(&self) -> Result<(), GateError> {
        let expected_controls = self.kind.num_controls();
        if self.controls.len() != expected_controls || self.targets.len() != 1 {
            return Err(GateError::Arity {
                kind: self.kind,
                expected_controls,
                expected_targets: 1,
                controls: self.controls.len(),
                targets: self.targets.len(),
            });
        }
        let expected = self.kind.num_params();
        if self.params.len() != expected {
            return Err(GateError::ParamCount {
                kind: self.kind,
                expected,
                got: self.params.len(),
            });
        }
        if let Some(&bad) = self.params.iter().find(|p| !p.is_finite()) {
            return Err(GateError::NonFiniteParam(bad));
        }
        let mut seen: Vec<usize> = self.qubits().collect();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(GateError::DuplicateQubit(w[0]));
        }
        Ok(())
    }

    pub fn target(&self) -> usize {
        self.targets[0]
    }

    /// All qubits touched by the gate, controls first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(self.targets.iter()).copied()
    }

    /// The single-qubit block applied to the target when every control is 1.
    pub fn base_matrix(&self) -> Result<Mat2, GateError> {
        self.validate()?;
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let m = match self.kind {
            GateKind::X | GateKind::Cnot | GateKind::Toffoli => [[zero, one], [one, zero]],
            GateKind::H => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[s, s], [s, -s]]
            }
            GateKind::Ry | GateKind::Cry => ry_matrix(self.params[0]),
            GateKind::Rz => [[one, zero], [zero, Complex64::from_polar(1.0, self.params[0])]],
        };
        Ok(m)
    }

    /// Full operator on `controls ++ targets` (controls are the high-order
    /// bits, big-endian), dimension `2^(controls+1)`.
    pub fn matrix(&self) -> Result<Vec<Vec<Complex64>>, GateError> {
        let base = self.base_matrix()?;
        let dim = 1usize << (self.controls.len() + 1);
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for (i, row) in m.iter_mut().enumerate().take(dim - 2) {
            row[i] = Complex64::new(1.0, 0.0);
        }
        for r in 0..2 {
            for c in 0..2 {
                m[dim - 2 + r][dim - 2 + c] = base[r][c];
            }
        }
        Ok(m)
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| format!("{p:.15}")).collect();
            write!(f, "({})", ps.join(", "))?;
        }
        if !self.controls.is_empty() {
            let cs: Vec<String> = self.controls.iter().map(|c| format!("q{c}")).collect();
            write!(f, " {} ->", cs.join(","))?;
        }
        write!(f, " q{}", self.target())
    }
}

/// `[[cos(θ/2), −sin(θ/2)], [sin(θ/2), cos(θ/2)]]`
pub fn ry_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// Largest elementwise deviation of `U†U` from the identity.
pub fn unitarity_defect(m: &Mat2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - expect).norm());
        }
    }
    worst
}
