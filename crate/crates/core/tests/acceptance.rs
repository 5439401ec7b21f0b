//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line.
//! Run with `cargo test -p wtele-core --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wtele_core::circuits::{
    build_preprocess3, build_preprocess4, build_w3_generator, build_w4_generator, w3_coefficients,
    w4_coefficients, WParams, W3_SUPPORT, W4_SUPPORT,
};
use wtele_core::efficiency::table3;
use wtele_core::protocol::{
    correction_table_w3, correction_table_w4, derive_correction_oracle, BidirectionalSession,
    CorrectionKey, FamilyKind, Teleport,
};
use wtele_core::StateVector;

const FIDELITY_FLOOR: f64 = 1.0 - 1e-10;

fn report(id: u32, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("[PASS] criterion {id}: {name} ({detail})"),
        Err(why) => {
            println!("[FAIL] criterion {id}: {name} ({why})");
            panic!("criterion {id} failed: {why}");
        }
    }
}

fn draws(seed: u64, n: usize) -> Vec<WParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| WParams::random(&mut rng)).collect()
}

fn index_of(bits: &str) -> usize {
    usize::from_str_radix(bits, 2).unwrap()
}

#[test]
fn criterion_1_generator_matches_closed_form() {
    let run = || -> Result<String, String> {
        let params = draws(1, 500);
        let start = Instant::now();
        let mut worst: f64 = 0.0;
        let mut worst_norm: f64 = 0.0;
        for p in &params {
            for (state, support, coeffs) in [
                (
                    build_w3_generator(p).run_from_zero().unwrap(),
                    &W3_SUPPORT[..],
                    w3_coefficients(p),
                ),
                (
                    build_w4_generator(p).run_from_zero().unwrap(),
                    &W4_SUPPORT[..],
                    w4_coefficients(p),
                ),
            ] {
                worst_norm = worst_norm
                    .max((coeffs.norm_sqr() - 1.0).abs())
                    .max((state.norm_sqr() - 1.0).abs());
                for (idx, amp) in state.amplitudes().iter().enumerate() {
                    let want = support
                        .iter()
                        .position(|b| index_of(b) == idx)
                        .map(|k| coeffs.values[k])
                        .unwrap_or_default();
                    worst = worst.max((amp - want).norm());
                }
            }
        }
        let elapsed = start.elapsed();
        if worst > 1e-10 {
            return Err(format!("max deviation {worst:e}"));
        }
        if worst_norm > 1e-12 {
            return Err(format!("normalization off by {worst_norm:e}"));
        }
        if elapsed >= Duration::from_secs(1) {
            return Err(format!("took {elapsed:?}"));
        }
        Ok(format!(
            "500 draws, max deviation {worst:.1e}, norm error {worst_norm:.1e}, {elapsed:?}"
        ))
    };
    report(1, "generator-formula agreement", run());
}

#[test]
fn criterion_2_preprocessing_resets_qubits() {
    let run = || -> Result<String, String> {
        let mut worst: f64 = 0.0;
        for p in draws(1, 500) {
            let mut s3 = build_w3_generator(&p).run_from_zero().unwrap();
            s3.apply_all(&build_preprocess3().gates).unwrap();
            worst = worst.max(s3.excited_mass(2).unwrap());

            let mut s4 = build_w4_generator(&p).run_from_zero().unwrap();
            s4.apply_all(&build_preprocess4().gates).unwrap();
            let mass: f64 = s4
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(i, _)| i & 0b11 != 0)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            worst = worst.max(mass);
        }
        if worst < 1e-20 {
            Ok(format!("max reset-qubit mass {worst:e}"))
        } else {
            Err(format!("reset-qubit mass {worst:e}"))
        }
    };
    report(2, "pre-processing reset", run());
}

/// Literal term lists of the joint states: for each coefficient index,
/// the four basis strings over the six qubits.
const W3_BEFORE_CNOT: [[&str; 4]; 3] = [
    ["000000", "000101", "001010", "001111"],
    ["100000", "100101", "101010", "101111"],
    ["110000", "110101", "111010", "111111"],
];
const W3_AFTER_CNOT: [[&str; 4]; 3] = [
    ["000000", "000101", "001010", "001111"],
    ["101000", "101101", "100010", "100111"],
    ["111100", "111001", "110110", "110011"],
];
const W4_BEFORE_CNOT: [[&str; 4]; 4] = [
    ["000000", "000101", "001010", "001111"],
    ["010000", "010101", "011010", "011111"],
    ["100000", "100101", "101010", "101111"],
    ["110000", "110101", "111010", "111111"],
];
const W4_AFTER_CNOT: [[&str; 4]; 4] = [
    ["000000", "000101", "001010", "001111"],
    ["010100", "010001", "011110", "011011"],
    ["101000", "101101", "100010", "100111"],
    ["111100", "111001", "110110", "110011"],
];

fn literal_state(terms: &[[&str; 4]], coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut amps = vec![Complex64::default(); 64];
    for (row, c) in terms.iter().zip(coeffs) {
        for bits in row {
            amps[index_of(bits)] += c * 0.5;
        }
    }
    amps
}

fn max_diff(state: &StateVector, want: &[Complex64]) -> f64 {
    state
        .amplitudes()
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_3_intermediate_states_match_expansions() {
    let run = || -> Result<String, String> {
        let mut worst: f64 = 0.0;
        for p in draws(3, 100) {
            let t3 = Teleport::new(FamilyKind::W3).prepare(&p).map_err(|e| e.to_string())?;
            let a = w3_coefficients(&p).values;
            worst = worst.max(max_diff(&t3.joint_before_cnot, &literal_state(&W3_BEFORE_CNOT, &a)));
            worst = worst.max(max_diff(t3.register.state(), &literal_state(&W3_AFTER_CNOT, &a)));

            let t4 = Teleport::new(FamilyKind::W4).prepare(&p).map_err(|e| e.to_string())?;
            let b = w4_coefficients(&p).values;
            worst = worst.max(max_diff(&t4.joint_before_cnot, &literal_state(&W4_BEFORE_CNOT, &b)));
            worst = worst.max(max_diff(t4.register.state(), &literal_state(&W4_AFTER_CNOT, &b)));
        }
        if worst <= 1e-10 {
            Ok(format!("100 draws x 4 joint states, max deviation {worst:.1e}"))
        } else {
            Err(format!("max deviation {worst:e}"))
        }
    };
    report(3, "intermediate-state reproduction", run());
}

#[test]
fn criterion_4_tables_match_oracle() {
    let run = || -> Result<String, String> {
        for key in CorrectionKey::all() {
            let o3 = derive_correction_oracle(FamilyKind::W3, key).map_err(|e| e.to_string())?;
            if o3 != correction_table_w3(key) {
                return Err(format!("W3 key {key}: oracle {o3}, table {}", correction_table_w3(key)));
            }
            let o4 = derive_correction_oracle(FamilyKind::W4, key).map_err(|e| e.to_string())?;
            if o4 != correction_table_w4(key) {
                return Err(format!("W4 key {key}: oracle {o4}, table {}", correction_table_w4(key)));
            }
        }
        Ok("16 keys x 2 tables".to_string())
    };
    report(4, "table-oracle equivalence", run());
}

#[test]
fn criterion_5_deterministic_teleportation() {
    let run = || -> Result<String, String> {
        let start = Instant::now();
        let mut sessions = 0;
        let mut min: f64 = 1.0;
        for (family, seed) in [(FamilyKind::W3, 5), (FamilyKind::W4, 6)] {
            let t = Teleport::new(family);
            for p in draws(seed, 100) {
                let ts = t.enumerate(&p).map_err(|e| e.to_string())?;
                if ts.len() != 16 {
                    return Err(format!("{} branches", ts.len()));
                }
                for tr in ts {
                    min = min.min(tr.min_fidelity());
                    sessions += 1;
                }
            }
        }
        let elapsed = start.elapsed();
        if min < FIDELITY_FLOOR {
            return Err(format!("min fidelity {min}"));
        }
        if elapsed >= Duration::from_secs(30) {
            return Err(format!("took {elapsed:?}"));
        }
        Ok(format!("{sessions} sessions, min fidelity {min:.15}, {elapsed:?}"))
    };
    report(5, "deterministic teleportation", run());
}

#[test]
fn criterion_6_bidirectional_completeness() {
    let run = || -> Result<String, String> {
        let params = draws(6, 10);
        let mut min: f64 = 1.0;
        let mut count = 0;
        for pair in params.chunks(2) {
            let ts = BidirectionalSession::enumerate(&pair[0], &pair[1]).map_err(|e| e.to_string())?;
            if ts.len() != 256 {
                return Err(format!("{} branch pairs", ts.len()));
            }
            for t in ts {
                if t.legs.len() != 2 || t.legs.iter().any(|l| l.classical_bits != 4) {
                    return Err(format!("branch {}: bits per direction not 4", t.branch_label()));
                }
                min = min.min(t.min_fidelity());
                count += 1;
            }
        }
        if min < FIDELITY_FLOOR {
            return Err(format!("min fidelity {min}"));
        }
        Ok(format!("5 draws x 256 pairs = {count}, min fidelity {min:.15}, 4 bits/direction"))
    };
    report(6, "bidirectional completeness", run());
}

#[test]
fn criterion_7_efficiency_table() {
    let run = || -> Result<String, String> {
        let rows = table3();
        let fractions: Vec<&str> = rows.iter().map(|r| r.fraction.as_str()).collect();
        let want_fr = ["3/16", "3/14", "3/10", "4/16", "3/9", "4/10", "7/17"];
        if fractions != want_fr {
            return Err(format!("fractions {fractions:?}"));
        }
        let percents: Vec<&str> = rows.iter().map(|r| r.percent.as_str()).collect();
        let want_pc = ["18.7", "21.4", "30", "25", "33.3", "40", "41.1"];
        if percents != want_pc {
            return Err(format!("percentages {percents:?}"));
        }
        let flagged: Vec<usize> = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.flag.is_some())
            .map(|(i, _)| i)
            .collect();
        if flagged != [6] {
            return Err(format!("flagged rows {flagged:?}"));
        }
        Ok("7 rows, fractions and percentages exact, bidirectional row flagged".into())
    };
    report(7, "efficiency reproduction", run());
}

#[test]
fn criterion_8_cli_json_is_deterministic() {
    let run = || -> Result<String, String> {
        let configs: [&[&str]; 4] = [
            &["teleport3", "--branch-mode", "random", "--random-params", "--seed", "11", "--output", "json"],
            &["teleport4", "--branch-mode", "all", "--random-params", "--seed", "12", "--output", "json"],
            &["bidirectional", "--branch-mode", "random", "--random-params", "--seed", "13", "--output", "json"],
            &["table3", "--output", "json"],
        ];
        for args in configs {
            let once = || {
                Command::new(env!("CARGO_BIN_EXE_wtele"))
                    .args(args)
                    .output()
                    .expect("binary runs")
            };
            let (a, b) = (once(), once());
            if !a.status.success() || !b.status.success() {
                return Err(format!("{args:?} exited with {}", a.status));
            }
            if a.stdout != b.stdout {
                return Err(format!("{args:?} output differs between runs"));
            }
        }
        Ok("4 configurations byte-identical across runs".into())
    };
    report(8, "CLI determinism", run());
}
