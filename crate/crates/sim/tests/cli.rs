use std::process::{Command, Output};

use sisodet_sim::parse_regions_csv;

fn sisodet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sisodet"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(
        sisodet(&["verify", "--M", "4", "--tones", "50"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(sisodet(&["verify", "--M", "3"]).status.code(), Some(2));
    assert_eq!(
        sisodet(&["simulate", "--rho", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        sisodet(&["regions", "--llrs", "1,2,3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        sisodet(&["verify", "--no-such-flag"]).status.code(),
        Some(2)
    );
    assert_eq!(sisodet(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_is_an_error() {
    let out = sisodet(&["complexity", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent-dir"));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep\ntones = 40\nmu = 0, 8\nsnr-db = 12\n").unwrap();
    let out = sisodet(&[
        "simulate",
        "--tones",
        "9999",
        "--M",
        "4",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("40")));
}

#[test]
fn regions_dump_marks_pruned_symbols_and_round_trips() {
    // Real-axis bits of layer 1 give logp = (0, -10, -10, 0) at gain 1.
    let out = sisodet(&[
        "regions",
        "--M",
        "16",
        "--gain",
        "1",
        "--llrs",
        "0,-10,0,0,0,0,0,0",
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv
        .lines()
        .any(|l| l.starts_with("real,1,1,") && l.ends_with(",,,true")));
    let rows = parse_regions_csv(&csv).unwrap();
    assert_eq!(rows.len(), 16);
    assert_eq!(rows.iter().filter(|r| r.empty()).count(), 2);
}

#[test]
fn regions_with_zero_llrs_are_midpoints() {
    let out = sisodet(&["regions", "--M", "64"]);
    let rows = parse_regions_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    for group in rows.chunks(8) {
        for w in group.windows(2) {
            let mid = (w[0].point + w[1].point) / 2.0;
            assert!((w[0].bounds.unwrap().0 - mid).abs() <= 1e-12);
        }
    }
}

#[test]
fn complexity_csv_file_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let out = sisodet(&["complexity", "--M", "256", "--out", path.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("65536"));
    let csv = std::fs::read_to_string(path).unwrap();
    assert_eq!(csv.lines().next(), Some("kind,M,Nr,metrics,muls,adds"));
    assert!(csv.contains("proposed,256,2,992,12768,16732"));
}

#[test]
fn simulate_without_verify_first() {
    let out = sisodet(&[
        "simulate",
        "--M",
        "4",
        "--tones",
        "20",
        "--verify-first",
        "false",
    ]);
    assert!(out.status.success());
}
