//! Resource efficiency `η = q_s / (q_u + b_t + q_a)` in exact rationals.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EfficiencyError {
    #[error("total resources q_u + b_t + q_a must be positive")]
    ZeroDenominator,
}

/// Exact efficiency, computed from counts with no floating division.
pub fn eta(q_s: u64, q_u: u64, b_t: u64, q_a: u64) -> Result<Ratio<u64>, EfficiencyError> {
    let total = q_u + b_t + q_a;
    if total == 0 {
        return Err(EfficiencyError::ZeroDenominator);
    }
    Ok(Ratio::new(q_s, total))
}

/// Percentage truncated to one decimal place, in tenths of a percent.
pub fn percent_tenths(r: &Ratio<u64>) -> u64 {
    r.numer() * 1000 / r.denom()
}

/// `18.7`, `30`, `41.1`: one decimal, trailing `.0` dropped.
pub fn format_percent(r: &Ratio<u64>) -> String {
    let t = percent_tenths(r);
    if t.is_multiple_of(10) {
        format!("{}", t / 10)
    } else {
        format!("{}.{}", t / 10, t % 10)
    }
}

fn ser_ratio<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyRecord {
    pub label: String,
    pub q_s: u64,
    pub q_u: u64,
    pub b_t: u64,
    pub q_a: u64,
    /// Classical bits as listed in the comparison table; differs from
    /// `b_t` only for flagged rows.
    pub listed_bits: u64,
    /// `q_s / (q_u + b_t + q_a)` unreduced, e.g. `3/9`.
    pub fraction: String,
    #[serde(serialize_with = "ser_ratio")]
    pub eta: Ratio<u64>,
    pub percent: String,
    pub flag: Option<String>,
}

impl EfficiencyRecord {
    pub fn new(
        label: impl Into<String>,
        q_s: u64,
        q_u: u64,
        b_t: u64,
        q_a: u64,
    ) -> Result<Self, EfficiencyError> {
        let eta = eta(q_s, q_u, b_t, q_a)?;
        Ok(EfficiencyRecord {
            label: label.into(),
            q_s,
            q_u,
            b_t,
            q_a,
            listed_bits: b_t,
            fraction: format!("{}/{}", q_s, q_u + b_t + q_a),
            percent: format_percent(&eta),
            eta,
            flag: None,
        })
    }

    fn flagged(mut self, listed_bits: u64, note: &str) -> Self {
        self.listed_bits = listed_bits;
        self.flag = Some(note.to_string());
        self
    }

    pub fn denominator(&self) -> u64 {
        self.q_u + self.b_t + self.q_a
    }
}

pub const BIDIRECTIONAL_FLAG: &str =
    "listed as 4 classical bits, but eta = 7/17 requires b_t = 8 (4 bits per direction)";

/// The seven-row efficiency comparison. The first four rows are other
/// published schemes, reproduced from their listed counts only.
pub fn table3() -> Vec<EfficiencyRecord> {
    let row = |label: &str, q_s, q_u, b_t, q_a| {
        EfficiencyRecord::new(label, q_s, q_u, b_t, q_a).expect("table rows have resources")
    };
    vec![
        row("three-qubit state / two four-qubit cluster states", 3, 8, 8, 0),
        row("three-particle W state / seven-qubit cluster state", 3, 7, 7, 0),
        row("one-two GHZ state (bidirectional) / five-qubit cluster state", 3, 5, 5, 0),
        row("two-two qubit state (bidirectional) / eight-qubit entangled state", 4, 8, 8, 0),
        row("three-particle W state / four-qubit channel + 1 ancilla", 3, 4, 4, 1),
        row("four-particle W state / four-qubit channel + 2 ancillas", 4, 4, 4, 2),
        row("three-four particle W state (bidirectional) / eight-qubit channel + 1 ancilla", 7, 8, 8, 1)
            .flagged(4, BIDIRECTIONAL_FLAG),
    ]
}

/// Fixed-width text rendering of efficiency records.
pub fn render_table(rows: &[EfficiencyRecord]) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(8).max(8);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>3} {:>3} {:>3} {:>3}  {:>6} {:>5} {:>7}",
        "protocol", "q_s", "q_u", "b_t", "q_a", "eta", "lowest", "percent"
    );
    for r in rows {
        let lowest = format!("{}/{}", r.eta.numer(), r.eta.denom());
        let mark = if r.flag.is_some() { " *" } else { "" };
        let _ = writeln!(
            out,
            "{:<width$}  {:>3} {:>3} {:>3} {:>3}  {:>6} {:>5} {:>6}%{}",
            r.label, r.q_s, r.q_u, r.b_t, r.q_a, r.fraction, lowest, r.percent, mark
        );
    }
    for r in rows.iter().filter(|r| r.flag.is_some()) {
        let _ = writeln!(out, "* {}: {}", r.label, r.flag.as_deref().unwrap_or_default());
    }
    out
}
