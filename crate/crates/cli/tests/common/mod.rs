// Shared by several integration-test targets, each of which uses only a
// subset of these helpers.
#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// The binary under test, with the seed env var scrubbed so tests control
/// it explicitly.
pub fn bayesmv() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bayesmv"));
    cmd.env_remove("BAYESMV_SEED");
    cmd
}

pub fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("failed to spawn bayesmv")
}

pub fn stdout_of(cmd: &mut Command) -> String {
    let out = run(cmd);
    assert!(
        out.status.success(),
        "command failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout should be UTF-8")
}

/// Exit code and stderr of a run expected to fail.
pub fn failure_of(cmd: &mut Command) -> (i32, String) {
    let out = run(cmd);
    assert!(
        !out.status.success(),
        "command unexpectedly succeeded: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    (
        out.status.code().expect("no exit code"),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

/// Random returns: a common market factor plus idiosyncratic noise, so the
/// scatter is full-rank almost surely and means differ across assets.
pub fn random_rows(n: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let common: f64 = rng.sample::<f64, _>(StandardNormal) * 0.01;
            (0..k)
                .map(|j| {
                    0.002 * (j + 1) as f64 / k as f64
                        + common
                        + rng.sample::<f64, _>(StandardNormal) * 0.02
                })
                .collect()
        })
        .collect()
}

/// Write a returns CSV, optionally with a leading date column.
pub fn write_returns_csv(path: &Path, rows: &[Vec<f64>], dated: bool) {
    let k = rows.first().map_or(0, Vec::len);
    let mut text = String::new();
    if dated {
        text.push_str("date");
        for j in 0..k {
            text.push_str(&format!(",A{j}"));
        }
    } else {
        for j in 0..k {
            if j > 0 {
                text.push(',');
            }
            text.push_str(&format!("A{j}"));
        }
    }
    text.push('\n');
    for (t, row) in rows.iter().enumerate() {
        if dated {
            text.push_str(&format!("2020-01-{:02},", 1 + t % 28));
        }
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.10}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).expect("failed to write fixture");
}

pub fn random_returns_csv(path: &Path, n: usize, k: usize, seed: u64) {
    write_returns_csv(path, &random_rows(n, k, seed), true);
}
