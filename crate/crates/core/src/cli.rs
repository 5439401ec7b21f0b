//! Command-line surface: argument parsing and report generation.
//!
//! [`execute`] does all the work and returns the rendered report, so the
//! binary only prints and sets the exit status.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::circuits::{Circuit, WParams};
use crate::efficiency::{render_table, table3, EfficiencyError, EfficiencyRecord};
use crate::protocol::{
    BranchSelection, CorrectionKey, FamilyKind, ProtocolError, ProtocolRegistry, Transcript,
};
use crate::statevector::{SimError, StateDump};

pub const SCHEMA_VERSION: u32 = 1;

/// Minimum fidelity for a run to count as successful.
pub const FIDELITY_FLOOR: f64 = 1.0 - 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Efficiency(#[from] EfficiencyError),
    #[error("--branch-mode fixed needs {0}")]
    MissingBranch(&'static str),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchMode {
    /// Every measurement branch, no sampling.
    All,
    /// One branch sampled from the Born rule with the seeded generator.
    Random,
    /// The branch given by --branch (and --branch-b).
    Fixed,
}

#[derive(Debug, Parser)]
#[command(name = "wtele", version, about = "W-state generation and teleportation simulator")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub output: OutputFormat,

    /// Read angles in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a three-qubit W state and compare with its closed form.
    Gen3(GenArgs),
    /// Generate a four-qubit W state and compare with its closed form.
    Gen4(GenArgs),
    /// Teleport a three-qubit W state from Alice to Bob.
    Teleport3(TeleportArgs),
    /// Teleport a four-qubit W state from Bob to Alice.
    Teleport4(TeleportArgs),
    /// Exchange Alice's W3 and Bob's W4 simultaneously.
    Bidirectional(BidirectionalArgs),
    /// Efficiency of a single resource budget.
    Efficiency(EfficiencyArgs),
    /// The seven-row efficiency comparison.
    Table3,
}

#[derive(Debug, Clone, Args)]
pub struct Angles {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi1: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SecondAngles {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_theta0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_phi0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_theta1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_phi1: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub angles: Angles,
    /// Draw the angles from the seeded generator instead.
    #[arg(long)]
    pub random_params: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the generator circuit in the report.
    #[arg(long)]
    pub dump_circuit: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BranchArgs {
    #[arg(long, value_enum, default_value_t = BranchMode::All)]
    pub branch_mode: BranchMode,
    /// Sender's results for fixed mode, e.g. "+-01".
    #[arg(long, allow_hyphen_values = true)]
    pub branch: Option<CorrectionKey>,
    /// Seed for branch sampling and random angles.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw the angles from the seeded generator instead.
    #[arg(long)]
    pub random_params: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TeleportArgs {
    #[command(flatten)]
    pub angles: Angles,
    #[command(flatten)]
    pub branch: BranchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BidirectionalArgs {
    /// Alice's W3 angles.
    #[command(flatten)]
    pub angles: Angles,
    /// Bob's W4 angles.
    #[command(flatten)]
    pub bob: SecondAngles,
    #[command(flatten)]
    pub branch: BranchArgs,
    /// Bob's results for fixed mode.
    #[arg(long, allow_hyphen_values = true)]
    pub branch_b: Option<CorrectionKey>,
}

#[derive(Debug, Clone, Args)]
pub struct EfficiencyArgs {
    #[arg(long)]
    pub qs: u64,
    #[arg(long)]
    pub qu: u64,
    #[arg(long)]
    pub bt: u64,
    #[arg(long)]
    pub qa: u64,
}

/// Rendered output plus whether every fidelity check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    pub success: bool,
}

fn to_params(raw: [f64; 4], degrees: bool) -> WParams {
    let conv = |v: f64| if degrees { v.to_radians() } else { v };
    WParams::new(conv(raw[0]), conv(raw[1]), conv(raw[2]), conv(raw[3]))
}

impl Angles {
    fn raw(&self) -> [f64; 4] {
        [self.theta0, self.phi0, self.theta1, self.phi1]
    }
}

impl SecondAngles {
    fn raw(&self) -> [f64; 4] {
        [self.b_theta0, self.b_phi0, self.b_theta1, self.b_phi1]
    }
}

fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|c| [c.re, c.im]).collect()
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Gen3(a) => generate(cli, FamilyKind::W3, "gen3", a),
        Command::Gen4(a) => generate(cli, FamilyKind::W4, "gen4", a),
        Command::Teleport3(a) => {
            let params = pick_params(cli, &a.angles, None, &a.branch);
            let keys = fixed_keys(&a.branch, None, false)?;
            teleport(cli, "teleport3", &params, &a.branch, keys)
        }
        Command::Teleport4(a) => {
            let params = pick_params(cli, &a.angles, None, &a.branch);
            let keys = fixed_keys(&a.branch, None, false)?;
            teleport(cli, "teleport4", &params, &a.branch, keys)
        }
        Command::Bidirectional(a) => {
            let params = pick_params(cli, &a.angles, Some(&a.bob), &a.branch);
            let keys = fixed_keys(&a.branch, a.branch_b, true)?;
            teleport(cli, "bidirectional", &params, &a.branch, keys)
        }
        Command::Efficiency(a) => {
            let rec = EfficiencyRecord::new("custom", a.qs, a.qu, a.bt, a.qa)?;
            efficiency_report(cli, "efficiency", &[rec])
        }
        Command::Table3 => efficiency_report(cli, "table3", &table3()),
    }
}

fn pick_params(
    cli: &Cli,
    first: &Angles,
    second: Option<&SecondAngles>,
    branch: &BranchArgs,
) -> Vec<WParams> {
    if branch.random_params {
        let mut rng = ChaCha8Rng::seed_from_u64(branch.seed);
        let n = if second.is_some() { 2 } else { 1 };
        return (0..n).map(|_| WParams::random(&mut rng)).collect();
    }
    let mut out = vec![to_params(first.raw(), cli.degrees)];
    if let Some(s) = second {
        out.push(to_params(s.raw(), cli.degrees));
    }
    out
}

fn fixed_keys(
    branch: &BranchArgs,
    second: Option<CorrectionKey>,
    two: bool,
) -> Result<Vec<CorrectionKey>, CliError> {
    if branch.branch_mode != BranchMode::Fixed {
        return Ok(vec![]);
    }
    let first = branch.branch.ok_or(CliError::MissingBranch("--branch"))?;
    if two {
        let b = second.ok_or(CliError::MissingBranch("--branch-b"))?;
        Ok(vec![first, b])
    } else {
        Ok(vec![first])
    }
}

fn generate(cli: &Cli, kind: FamilyKind, name: &str, a: &GenArgs) -> Result<Report, CliError> {
    let params = if a.random_params {
        WParams::random(&mut ChaCha8Rng::seed_from_u64(a.seed))
    } else {
        to_params(a.angles.raw(), cli.degrees)
    };
    let family = kind.family();
    let circuit: Circuit = family.generator(&params);
    let state = circuit.run_from_zero()?;
    let closed = family.target_state(&params)?;
    let coeffs = family.coefficients(&params);
    let fidelity = state.fidelity(&closed)?;
    let max_deviation = state.max_abs_diff(&closed)?;
    let success = fidelity >= FIDELITY_FLOOR;

    let body = match cli.output {
        OutputFormat::Json => {
            let dump: StateDump = state.dump();
            let mut doc = json!({
                "schema": SCHEMA_VERSION,
                "command": name,
                "params": params,
                "support": family.support(),
                "coefficients": pairs(&coeffs.values),
                "state": {
                    "schema": SCHEMA_VERSION,
                    "num_qubits": dump.num_qubits,
                    "ordering": dump.ordering,
                    "amplitudes": dump.amplitudes,
                },
                "fidelity": fidelity,
                "max_deviation": max_deviation,
            });
            if a.dump_circuit {
                doc["circuit"] = serde_json::to_value(&circuit.gates)?;
            }
            to_json(&doc)?
        }
        OutputFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "{name}: {}", fmt_params(&params));
            let _ = writeln!(out, "{:<8} {:>30} {:>30}", "basis", "simulated", "closed form");
            for (idx, amp) in state.amplitudes().iter().enumerate() {
                let bits = state.bitstring(idx);
                let closed_amp = family
                    .support()
                    .iter()
                    .position(|s| *s == bits)
                    .map(|p| coeffs.values[p])
                    .unwrap_or_default();
                if amp.norm() < 1e-15 && closed_amp.norm() < 1e-15 {
                    continue;
                }
                let _ = writeln!(out, "|{bits}⟩   {:>30} {:>30}", fmt_c(*amp), fmt_c(closed_amp));
            }
            let _ = writeln!(out, "fidelity {fidelity:.15}  max deviation {max_deviation:.3e}");
            if a.dump_circuit {
                let _ = write!(out, "{circuit}");
            }
            out
        }
    };
    Ok(Report { body, success })
}

fn fmt_c(c: Complex64) -> String {
    format!("{:+.12} {:+.12}i", c.re, c.im)
}

fn fmt_params(p: &WParams) -> String {
    format!(
        "theta0={} phi0={} theta1={} phi1={}",
        p.theta0, p.phi0, p.theta1, p.phi1
    )
}

#[derive(Serialize)]
struct Summary {
    branches: usize,
    min_fidelity: f64,
    max_fidelity: f64,
    classical_bits_per_branch: usize,
    all_perfect: bool,
}

fn teleport(
    cli: &Cli,
    name: &str,
    params: &[WParams],
    branch: &BranchArgs,
    keys: Vec<CorrectionKey>,
) -> Result<Report, CliError> {
    let registry = ProtocolRegistry::default();
    let protocol = registry.get(name)?;
    let transcripts: Vec<Transcript> = match branch.branch_mode {
        BranchMode::All => protocol.enumerate(params)?,
        BranchMode::Random => {
            vec![protocol.run(params, &BranchSelection::Sampled { seed: branch.seed })?]
        }
        BranchMode::Fixed => vec![protocol.run(params, &BranchSelection::Forced(keys))?],
    };
    let fids = transcripts
        .iter()
        .flat_map(|t| t.legs.iter().map(|l| l.final_fidelity));
    let (min, max) = fids.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
        (lo.min(f), hi.max(f))
    });
    let summary = Summary {
        branches: transcripts.len(),
        min_fidelity: min,
        max_fidelity: max,
        classical_bits_per_branch: transcripts.first().map_or(0, |t| t.classical_bits_sent),
        all_perfect: min >= FIDELITY_FLOOR,
    };

    let body = match cli.output {
        OutputFormat::Json => to_json(&json!({
            "schema": SCHEMA_VERSION,
            "command": name,
            "branch_mode": branch.branch_mode,
            "params": params,
            "transcripts": transcripts,
            "summary": summary,
        }))?,
        OutputFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "{name}: {}", protocol.summary());
            for (i, p) in params.iter().enumerate() {
                let _ = writeln!(out, "params[{i}]: {}", fmt_params(p));
            }
            for t in &transcripts {
                let legs: Vec<String> = t
                    .legs
                    .iter()
                    .map(|l| {
                        format!(
                            "{:?}->{:?} {} {} F={:.12}",
                            l.sender, l.receiver, l.key, l.corrections, l.final_fidelity
                        )
                    })
                    .collect();
                let _ = writeln!(out, "  {}", legs.join("  |  "));
            }
            let _ = writeln!(
                out,
                "branches {}  min fidelity {:.15}  max fidelity {:.15}  bits/branch {}  {}",
                summary.branches,
                summary.min_fidelity,
                summary.max_fidelity,
                summary.classical_bits_per_branch,
                if summary.all_perfect { "OK" } else { "FAIL" }
            );
            out
        }
    };
    Ok(Report {
        body,
        success: summary.all_perfect,
    })
}

fn efficiency_report(
    cli: &Cli,
    name: &str,
    rows: &[EfficiencyRecord],
) -> Result<Report, CliError> {
    let body = match cli.output {
        OutputFormat::Json => to_json(&json!({
            "schema": SCHEMA_VERSION,
            "command": name,
            "records": rows,
        }))?,
        OutputFormat::Text => render_table(rows),
    };
    Ok(Report {
        body,
        success: true,
    })
}
