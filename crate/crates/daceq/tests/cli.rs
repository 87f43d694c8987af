//! End-to-end CLI checks: exit codes, file round trips, resumable sweeps,
//! config precedence.

use std::path::PathBuf;
use std::process::{Command, Output};

fn daceq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_daceq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("daceq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn design_verify_round_trip() {
    let path = tmp("order12.json");
    let out = daceq(&[
        "design",
        "--pulse",
        "rtz",
        "--nb",
        "2",
        "--type",
        "I",
        "--order",
        "12",
        "--bandwidth",
        "0.8",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("delta_N"), "{text}");

    let out = daceq(&["verify", "--input", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let ratio: f64 = text
        .lines()
        .find(|l| l.contains("ratio"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    assert!(
        (0.999..=1.02).contains(&ratio),
        "dense-grid ratio {ratio} out of range"
    );
}

#[test]
fn order_zero_design_matches_closed_form() {
    // Single-coefficient equalizer: delta = (Amax - Amin)/(Amax + Amin)
    // with the amplitude evaluated at the band ends.
    let out = daceq(&[
        "design", "--pulse", "nrtz", "--nb", "1", "--type", "I", "--order", "0",
        "--bandwidth", "0.04",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let delta: f64 = text
        .lines()
        .find(|l| l.starts_with("delta_N"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    let amin = {
        let x = 0.04 * std::f64::consts::PI / 2.0;
        x.sin() / x
    };
    let want = (1.0 - amin) / (1.0 + amin);
    assert!(
        (delta - want).abs() < 1e-9,
        "delta {delta} vs closed form {want}"
    );
}

#[test]
fn exit_codes_are_distinct_per_failure_class() {
    // Invalid pulse/band combination.
    let out = daceq(&[
        "design", "--pulse", "rtc", "--nb", "1", "--type", "III", "--order", "10",
        "--bandwidth", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[invalid-request]:"), "{}", stderr(&out));

    // Unknown estimate table row (valid-shaped request, no published row).
    let out = daceq(&[
        "estimate", "--pulse", "nrtz", "--nb", "2", "--type", "I", "--bandwidth", "0.5",
        "--delta", "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(6));
    assert!(stderr(&out).starts_with("error[unknown-table-row]:"));

    // Order cap exceeded.
    let out = daceq(&[
        "search", "--pulse", "rtz", "--nb", "2", "--type", "I", "--bandwidth", "0.9",
        "--delta", "1e-4", "--order-cap", "6",
    ]);
    assert_eq!(out.status.code(), Some(5));
    assert!(stderr(&out).starts_with("error[order-cap]:"));

    // Unreadable input file.
    let out = daceq(&["verify", "--input", "/nonexistent/filter.json"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).starts_with("error[io]:"));
}

#[test]
fn sweep_resume_performs_no_design_calls() {
    let path = tmp("resume.csv");
    let args = [
        "sweep", "--pulse", "rtz", "--nb", "1", "--type", "II", "--b-points", "4",
        "--delta-points", "3", "--delta-min", "1e-3", "--output",
        path.to_str().unwrap(), "--resume",
    ];
    let out = daceq(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("(0 reused, 12 computed, 0 failed)"));
    let first = std::fs::read(&path).unwrap();

    let out = daceq(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(
        stdout(&out).contains("(12 reused, 0 computed, 0 failed)"),
        "{}",
        stdout(&out)
    );
    let second = std::fs::read(&path).unwrap();
    assert_eq!(first, second, "resumed sweep must reproduce the cache");
}

#[test]
fn config_file_precedence() {
    let cfg = tmp("engine.toml");
    std::fs::write(&cfg, "order_cap = 6\n").unwrap();
    let base = [
        "search", "--pulse", "rtz", "--nb", "2", "--type", "I", "--bandwidth", "0.9",
        "--delta", "1e-4", "--config",
    ];

    // Config alone: the low cap bites.
    let mut args: Vec<&str> = base.to_vec();
    args.push(cfg.to_str().unwrap());
    let out = daceq(&args);
    assert_eq!(out.status.code(), Some(5));

    // Flag overrides config.
    args.extend_from_slice(&["--order-cap", "400"]);
    let out = daceq(&args);
    assert!(out.status.success(), "{}", stderr(&out));

    // Malformed config is a validation error.
    std::fs::write(&cfg, "not valid toml [\n").unwrap();
    let mut args: Vec<&str> = base.to_vec();
    args.push(cfg.to_str().unwrap());
    let out = daceq(&args);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plot_data_emits_parsable_series() {
    let path = tmp("orders.csv");
    let out = daceq(&[
        "plot-data", "orders", "--case", "rtz/2/I", "--points", "24", "--delta", "1e-3",
        "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "pulse,nb,type,B_over_pi,n_min,n_est"
    );
    let mut prev_n = 0i64;
    let mut at_eighty = None;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6);
        let n: i64 = cols[4].parse().unwrap();
        assert!(n >= prev_n, "orders must grow with bandwidth");
        prev_n = n;
        let _: f64 = cols[5].parse().unwrap();
        let b: f64 = cols[3].parse().unwrap();
        if (b - 0.8).abs() < 1e-9 {
            at_eighty = Some(n);
        }
    }
    // The published second-band reference point sits on this series.
    assert_eq!(at_eighty, Some(12));

    let mag = tmp("magnitude.csv");
    let out = daceq(&[
        "plot-data", "magnitude", "--points", "121", "--output", mag.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&mag).unwrap();
    // NRTZ magnitude crosses zero at wT = 2 pi.
    let row = text
        .lines()
        .find(|l| l.starts_with("2,") || l.starts_with("2.0,"))
        .expect("row at wT = 2 pi");
    let nrtz: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!(nrtz < 1e-12, "NRTZ at 2 pi: {nrtz}");
}
