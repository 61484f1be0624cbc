//! End-to-end tests of the `wigner` binary: preset sweeps, CSV shape
//! and determinism, config errors, overrides, and the verify report.

use std::path::Path;
use std::process::{Command, Output};

use wigner_core::ring::tau_ts_saturated;

fn wigner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wigner"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> &str {
    std::str::from_utf8(&output.stdout).expect("stdout is UTF-8")
}

fn stderr_of(output: &Output) -> &str {
    std::str::from_utf8(&output.stderr).expect("stderr is UTF-8")
}

/// Parses CSV text into (header, rows of f64-or-empty cells as strings).
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .expect("header present")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn cell(row: &[String], i: usize) -> f64 {
    row[i].parse().expect("numeric cell")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("experiment.cfg");
    std::fs::write(&path, text).expect("config written");
    path.display().to_string()
}

const DEGENERATE_SWEEP: &str = "[system]\nkind = barrier\nenergy = 1\nv_re = 2\nlength = 1\n\n\
                                [sweep]\npath = energy\nstart = 1\nstop = 3\nstep = 0.5\n\n\
                                [output]\nobservables = tau_t\n";

#[test]
fn fig2_preset_reports_saturating_delays_in_both_arms() {
    let output = wigner(&["splitter", "--preset", "fig2"]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let (header, rows) = parse_csv(stdout_of(&output));
    assert_eq!(header, ["lb_1", "tau_1", "tau_2"]);
    assert_eq!(rows.len(), 60);
    let last = rows.last().unwrap();
    assert!((cell(last, 0) - 15.0).abs() < 1e-12);
    // Both delays sit on their plateaus by the end of the sweep, the
    // free arm a constant below the barrier arm.
    assert!((cell(last, 1) - 2.941173).abs() < 1e-3, "tau_1 = {}", last[1]);
    assert!((cell(last, 2) - 2.691173).abs() < 1e-3, "tau_2 = {}", last[2]);
    // The plateau is approached from below.
    assert!(cell(&rows[0], 1) < cell(last, 1));
}

#[test]
fn fig8_preset_is_flux_periodic_with_decaying_oscillations() {
    let output = wigner(&["ring1", "--preset", "fig8"]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let (header, rows) = parse_csv(stdout_of(&output));
    assert_eq!(header, ["phi", "tau_r@L=6", "tau_r@L=7", "tau_r@L=9"]);
    assert_eq!(rows.len(), 65);
    // One flux quantum has no effect: the rows at phi = -1, 0, and 1
    // agree to the last printed digit.
    assert_eq!(rows[0][1..], rows[32][1..]);
    assert_eq!(rows[32][1..], rows[64][1..]);
    // The flux oscillation amplitude shrinks as the ring grows.
    let peak_to_peak = |column: usize| {
        let values: Vec<f64> = rows.iter().map(|row| cell(row, column)).collect();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let (p6, p7, p9) = (peak_to_peak(1), peak_to_peak(2), peak_to_peak(3));
    assert!(p6 > p7 && p7 > p9, "p2p = {p6}, {p7}, {p9}");
}

#[test]
fn fig13_preset_matches_the_saturated_transmission_formula() {
    let output = wigner(&["ring2", "--preset", "fig13"]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let (header, rows) = parse_csv(stdout_of(&output));
    assert_eq!(header, ["E_over_V", "tau_ts"]);
    assert_eq!(rows.len(), 18);
    let height = 5.0;
    for row in &rows {
        let ratio = cell(row, 0);
        let energy = ratio * height;
        let expected = tau_ts_saturated(energy.sqrt(), (height - energy).sqrt());
        let got = cell(row, 1);
        assert!(
            (got - expected).abs() <= 1e-4,
            "ratio {ratio}: tau_ts {got} vs {expected}"
        );
    }
}

#[test]
fn runs_are_byte_identical_across_invocations() {
    let first = wigner(&["ring2", "--preset", "fig12"]);
    let second = wigner(&["ring2", "--preset", "fig12"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn coupling_out_of_range_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[system]\nkind = splitter\nenergy = 1\njunction = buttiker\nepsilon = 0.7\n\
         arm1.v_re = 3\narm1.length = 1\narm2.free = true\n\n\
         [sweep]\npath = lb_1\nstart = 1\nstop = 5\nstep = 1\n\n\
         [output]\nobservables = tau_1\n",
    );
    let output = wigner(&["splitter", "--config", &config]);
    assert!(!output.status.success());
    let stderr = stderr_of(&output);
    assert!(stderr.contains("out of range"), "stderr: {stderr}");
    assert!(stderr.contains("epsilon"), "stderr: {stderr}");
}

#[test]
fn negative_length_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[system]\nkind = barrier\nenergy = 1\nv_re = 5\nlength = -2\n\n\
         [sweep]\npath = energy\nstart = 1\nstop = 2\nstep = 0.5\n\n\
         [output]\nobservables = tau_t\n",
    );
    let output = wigner(&["barrier", "--config", &config]);
    assert!(!output.status.success());
    let stderr = stderr_of(&output);
    assert!(stderr.contains("out of range"), "stderr: {stderr}");
    assert!(stderr.contains("length"), "stderr: {stderr}");
}

#[test]
fn unknown_keys_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[system]\nkind = barrier\nenergy = 1\nv_re = 5\nlength = 1\nwidth = 2\n\n\
         [sweep]\npath = energy\nstart = 1\nstop = 2\nstep = 0.5\n\n[output]\n",
    );
    let output = wigner(&["barrier", "--config", &config]);
    assert!(!output.status.success());
    let stderr = stderr_of(&output);
    assert!(stderr.contains("unknown key"), "stderr: {stderr}");
    assert!(stderr.contains("system.width"), "stderr: {stderr}");
}

#[test]
fn set_overrides_reshape_the_sweep() {
    let baseline = wigner(&["splitter", "--preset", "fig2"]);
    let trimmed = wigner(&["splitter", "--preset", "fig2", "--set", "sweep.stop=5"]);
    assert!(trimmed.status.success(), "{}", stderr_of(&trimmed));
    let (_, baseline_rows) = parse_csv(stdout_of(&baseline));
    let (_, trimmed_rows) = parse_csv(stdout_of(&trimmed));
    assert_eq!(baseline_rows.len(), 60);
    assert_eq!(trimmed_rows.len(), 20);
    // The shared prefix of the sweep is untouched by the override.
    assert_eq!(baseline_rows[..20], trimmed_rows[..]);
}

#[test]
fn output_file_and_out_flag_redirect_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let via_set = dir.path().join("via_set.csv");
    let output = wigner(&[
        "splitter",
        "--preset",
        "fig2",
        "--set",
        &format!("output.file={}", via_set.display()),
        "--set",
        "sweep.stop=1",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert!(stdout_of(&output).is_empty());
    let written = std::fs::read_to_string(&via_set).unwrap();
    assert!(written.starts_with("lb_1,tau_1,tau_2\n"));

    // --out wins over the config's [output] file.
    let via_flag = dir.path().join("via_flag.csv");
    let output = wigner(&[
        "splitter",
        "--preset",
        "fig2",
        "--set",
        &format!("output.file={}", via_set.display()),
        "--set",
        "sweep.stop=1",
        "--out",
        via_flag.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert_eq!(std::fs::read_to_string(&via_flag).unwrap(), written);
}

#[test]
fn preset_kind_must_match_the_subcommand() {
    let output = wigner(&["ring1", "--preset", "fig2"]);
    assert!(!output.status.success());
    assert!(stderr_of(&output).contains("splitter"));
}

#[test]
fn a_config_source_is_required_and_unique() {
    let neither = wigner(&["barrier"]);
    assert!(!neither.status.success());
    assert!(stderr_of(&neither).contains("--config or --preset"));

    let unknown = wigner(&["barrier", "--preset", "fig99"]);
    assert!(!unknown.status.success());
    assert!(stderr_of(&unknown).contains("unknown preset"));
}

#[test]
fn failed_rows_carry_error_markers_and_empty_cells() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), DEGENERATE_SWEEP);
    let output = wigner(&["barrier", "--config", &config]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let (header, rows) = parse_csv(stdout_of(&output));
    assert_eq!(header, ["energy", "tau_t", "error"]);
    assert_eq!(rows.len(), 5);
    // The row at E = V cannot be evaluated; its value cell stays empty
    // and the error column names the failure.
    assert_eq!(rows[2][1], "");
    assert_eq!(rows[2][2], "degenerate-energy");
    for row in [&rows[0], &rows[1], &rows[3], &rows[4]] {
        assert!(!row[1].is_empty());
        assert_eq!(row[2], "");
    }
}

#[test]
fn no_observables_yields_a_header_only_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &DEGENERATE_SWEEP.replace("observables = tau_t", "observables ="),
    );
    let output = wigner(&["barrier", "--config", &config]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert_eq!(stdout_of(&output), "energy\n");
}

#[test]
fn verify_passes_and_reports_every_criterion() {
    let output = wigner(&["verify"]);
    assert!(output.status.success());
    let report = stdout_of(&output);
    for number in 1..=12 {
        assert!(
            report.contains(&format!("criterion {number} result: PASS")),
            "criterion {number} missing from report:\n{report}"
        );
    }
    assert!(report.contains("measured"));
    assert!(report.contains("target"));
    assert!(report.contains("tolerance"));
    assert!(report.contains("overall: PASS (12 of 12 criteria)"));

    // The report is deterministic.
    let again = wigner(&["verify"]);
    assert_eq!(output.stdout, again.stdout);
}
