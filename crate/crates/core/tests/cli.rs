//! Runs the `kwayneg` binary and checks stdout, stderr and exit codes.

use std::process::{Command, Output};

use kway_negativity::io::{self, StateInput};
use kway_negativity::state::{haar_random_pure, PureState, SubsystemLayout};

fn kwayneg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kwayneg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn analyze_ghz() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        &dir,
        "ghz.json",
        &io::state_file_json(&StateInput::Pure(PureState::ghz(3))),
    );
    let out = kwayneg(&["analyze", &file, "--canonical"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let doc = io::parse_report(&stdout(&out)).unwrap();
    let r = &doc.reports[0];
    assert!((r.n_global - 1.0).abs() < 1e-12 && (r.e(3) - 1.0).abs() < 1e-12);
    assert!((doc.tangles.unwrap().tau3 - 1.0).abs() < 1e-12);
    assert_eq!(
        doc.input_digest,
        io::digest(&std::fs::read_to_string(&file).unwrap())
    );

    let b = kwayneg(&["analyze", &file, "--focus", "B"]);
    assert_eq!(io::parse_report(&stdout(&b)).unwrap().reports[0].focus, 1);
}

#[test]
fn sweep_minus_has_zero_row() {
    let out = kwayneg(&[
        "sweep", "--family", "ghzw", "--sign", "minus", "--q", "0:1:101",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "q,n_global,e2,e3,tau3_formula,e3_times_ng,delta"
    );
    let rows = io::parse_sweep_csv(&text).unwrap();
    assert!(rows
        .iter()
        .any(|r| (r.q - 0.62685).abs() < 1e-4 && r.tau3_formula <= 1e-4));
}

#[test]
fn audit_csv_has_no_violations() {
    let out = kwayneg(&["audit", "--random", "2000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    let row: Vec<String> = rdr
        .records()
        .next()
        .unwrap()
        .unwrap()
        .iter()
        .map(String::from)
        .collect();
    for col in ["viol_ng_e2", "viol_ng_e3", "viol_ckw"] {
        let i = header.iter().position(|h| h == col).unwrap();
        assert_eq!(row[i], "0", "{col}");
    }
    assert_eq!(
        kwayneg(&["audit", "--random", "2000", "--seed", "7"]).stdout,
        out.stdout
    );
}

#[test]
fn roof_and_canonicalize_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let psi = haar_random_pure(&SubsystemLayout::qubits(3), 3);
    let pure = write(
        &dir,
        "pure.json",
        &io::state_file_json(&StateInput::Pure(psi.clone())),
    );
    let mixed = write(
        &dir,
        "ab.json",
        &io::state_file_json(&StateInput::Mixed(psi.reduced(&[0, 1]).unwrap())),
    );
    let a = kwayneg(&[
        "roof",
        &mixed,
        "--focus",
        "A",
        "--measure",
        "global",
        "--restarts",
        "4",
        "--seed",
        "5",
    ]);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    let b = kwayneg(&[
        "roof",
        &mixed,
        "--focus",
        "A",
        "--measure",
        "global",
        "--restarts",
        "4",
        "--seed",
        "5",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let doc = io::parse_report(&stdout(&a)).unwrap();
    assert_eq!(doc.seeds, vec![5]);
    assert!(doc.roof.unwrap().value >= doc.reports[0].n_global - 1e-9);

    let c1 = kwayneg(&["canonicalize", &pure]);
    assert_eq!(c1.status.code(), Some(0));
    assert_eq!(c1.stdout, kwayneg(&["canonicalize", &pure]).stdout);
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"dims":[2],"amplitudes":[{"re":0.9,"im":0},{"re":0,"im":0}]}"#,
    );
    let out = kwayneg(&["analyze", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("norm=0.9"));

    let garbled = write(&dir, "garbled.json", "{not json");
    assert_eq!(kwayneg(&["analyze", &garbled]).status.code(), Some(1));
    assert_eq!(
        kwayneg(&["analyze", "/nonexistent/file.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        kwayneg(&["sweep", "--sign", "sideways"]).status.code(),
        Some(1)
    );
    assert_eq!(
        kwayneg(&["audit", "--random", "10", "--qubits", "5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        kwayneg(&["roof", &bad, "--restarts", "0"]).status.code(),
        Some(1)
    );
}
