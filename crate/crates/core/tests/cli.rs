use std::path::Path;
use std::process::{Command, Output};

use beamsplit::cli::commands::generate;
use beamsplit::cli::config::RunConfig;
use beamsplit::cli::report::{sidecar_path, ReportDocument, Sidecar};
use beamsplit::extract::BitStream;
use beamsplit::statkit::{stream_digest, Stream};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamsplit"))
        .args(args)
        .output()
        .unwrap()
}

fn generate_to(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["generate", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    bin(&args)
}

const TERNARY: &[&str] = &[
    "--protocol",
    "single-conjugate",
    "--dim",
    "3",
    "--keep",
    "0,1",
    "--events",
    "300000",
    "--seed",
    "42",
];

#[test]
fn generate_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.bin");
    let g = generate_to(&out, TERNARY);
    assert_eq!(g.status.code(), Some(0), "{}", String::from_utf8_lossy(&g.stderr));
    let report: ReportDocument = serde_json::from_slice(&g.stdout).unwrap();
    assert!(report.suite.as_ref().unwrap().overall);

    let a = bin(&["analyze", out.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let analyzed: ReportDocument = serde_json::from_slice(&a.stdout).unwrap();
    let suite = analyzed.suite.unwrap();
    assert!(suite.overall);
    assert_eq!(suite.input_digest, report.suite.unwrap().input_digest);
}

#[test]
fn report_config_reproduces_digest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.bin");
    let g = generate_to(
        &out,
        &[
            "--protocol",
            "epr-xor",
            "--spin",
            "1/2",
            "--theta-b",
            "90",
            "--events",
            "20000",
            "--seed",
            "5",
            "--workers",
            "3",
        ],
    );
    assert_eq!(g.status.code(), Some(0));
    let report: ReportDocument = serde_json::from_slice(&g.stdout).unwrap();
    let cfg: RunConfig = serde_json::from_value(report.config).unwrap();
    assert_eq!(cfg.workers, 3);
    let again = generate(&cfg).unwrap();
    let sidecar: Sidecar = serde_json::from_slice(&std::fs::read(sidecar_path(&out)).unwrap()).unwrap();
    assert_eq!(again.sidecar.digest, sidecar.digest);
    assert_eq!(
        serde_json::to_value(&again.sidecar).unwrap(),
        serde_json::to_value(&sidecar).unwrap()
    );
}

#[test]
fn hex_payload_analyzes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.hex");
    let g = generate_to(
        &out,
        &[
            "--protocol",
            "single-conjugate",
            "--dim",
            "4",
            "--partition",
            "0,1|2,3",
            "--events",
            "50000",
            "--seed",
            "9",
            "--format",
            "hex",
        ],
    );
    assert_eq!(g.status.code(), Some(0), "{}", String::from_utf8_lossy(&g.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.trim_end().chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(text.trim_end().len(), 2 * 50_000 / 8);
    assert_eq!(bin(&["analyze", out.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn truncated_payload_is_integrity_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.bin");
    assert_eq!(generate_to(&out, TERNARY).status.code(), Some(0));
    let bytes = std::fs::read(&out).unwrap();
    std::fs::write(&out, &bytes[..bytes.len() - 10]).unwrap();
    let a = bin(&["analyze", out.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&a.stderr).contains("integrity"));
}

#[test]
fn flipped_bit_is_integrity_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.bin");
    assert_eq!(generate_to(&out, TERNARY).status.code(), Some(0));
    let mut bytes = std::fs::read(&out).unwrap();
    bytes[17] ^= 0x04;
    std::fs::write(&out, &bytes).unwrap();
    let a = bin(&["analyze", out.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&a.stderr).contains("digest"));
}

#[test]
fn missing_sidecar_is_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lonely.bin");
    std::fs::write(&out, [0u8; 16]).unwrap();
    let a = bin(&["analyze", out.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&a.stderr).contains("sidecar"));
}

#[test]
fn zero_bytes_with_valid_sidecar_fail_battery() {
    let dir = tempfile::tempdir().unwrap();
    let template = dir.path().join("template.bin");
    assert_eq!(generate_to(&template, TERNARY).status.code(), Some(0));
    let mut sidecar: Sidecar = serde_json::from_slice(&std::fs::read(sidecar_path(&template)).unwrap()).unwrap();

    let zeros = dir.path().join("zeros.bin");
    std::fs::write(&zeros, vec![0u8; 125_000]).unwrap();
    let bits = BitStream::new(vec![0; 1_000_000]).unwrap();
    sidecar.bit_length = 1_000_000;
    sidecar.digest = stream_digest(Stream::Bits(&bits));
    std::fs::write(sidecar_path(&zeros), serde_json::to_vec(&sidecar).unwrap()).unwrap();

    let a = bin(&["analyze", zeros.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(1));
    let report: ReportDocument = serde_json::from_slice(&a.stdout).unwrap();
    let suite = report.suite.unwrap();
    assert!(!suite.overall);
    for name in ["monobit", "runs"] {
        assert!(
            suite.reports.iter().any(|r| r.test_name == name && r.failed()),
            "{name}"
        );
    }
}

#[test]
fn zero_events_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("none.bin");
    let g = generate_to(&out, &["--protocol", "epr-xor", "--events", "0", "--seed", "1"]);
    assert_eq!(g.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&g.stderr).contains("events"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn invalid_fields_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.bin");
    let cases: &[(&[&str], &str)] = &[
        (
            &[
                "--protocol",
                "single-conjugate",
                "--dim",
                "3",
                "--events",
                "10",
                "--seed",
                "1",
            ],
            "keep",
        ),
        (
            &[
                "--protocol",
                "single-conjugate",
                "--dim",
                "3",
                "--keep",
                "0,3",
                "--events",
                "10",
                "--seed",
                "1",
            ],
            "keep",
        ),
        (
            &["--protocol", "epr-xor", "--spin", "2", "--events", "10", "--seed", "1"],
            "spin",
        ),
        (
            &[
                "--protocol",
                "epr-xor",
                "--detector-bias",
                "1.5",
                "--events",
                "10",
                "--seed",
                "1",
            ],
            "detector-bias",
        ),
        (
            &["--protocol", "epr-adaptive", "--events", "10", "--seed", "1"],
            "adapt",
        ),
        (
            &[
                "--protocol",
                "epr-xor",
                "--events",
                "10",
                "--seed",
                "1",
                "--significance",
                "2",
            ],
            "significance",
        ),
    ];
    for (args, field) in cases {
        let g = generate_to(&out, args);
        assert_eq!(g.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&g.stderr);
        assert!(err.contains(field), "{args:?}: {err}");
    }
    assert!(!out.exists());
}

#[test]
fn seed_is_required() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.bin");
    let g = generate_to(&out, &["--protocol", "epr-xor", "--events", "10"]);
    assert_ne!(g.status.code(), Some(0));
    assert!(!out.exists());
}

#[test]
fn unknown_subcommand_prints_usage() {
    let o = bin(&["transmogrify"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).to_lowercase().contains("usage"));
}

#[test]
fn selftest_exits_zero() {
    let o = bin(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn sweep_emits_table() {
    let o = bin(&[
        "sweep", "--angles", "0,90", "--biases", "0,0.05", "--events", "200000", "--seed", "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    // delta 0, epsilon 0: XOR of perfectly anticorrelated bits is constant 1
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][3], "0.500000");
    assert_eq!(rows[0][4], "0.000000");
    let biased: f64 = rows[3][3].parse().unwrap();
    assert!((biased + 0.005).abs() < 0.004, "{biased}");
}

#[test]
fn chsh_reports_violation_and_equal_angles() {
    let o = bin(&["chsh", "--events", "200000", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: ReportDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert!((doc.derived["abs_S"].value - 2.0 * 2f64.sqrt()).abs() < 0.03);
    assert!(doc.flags.iter().any(|f| f == "exceeds classical bound"));

    let o = bin(&[
        "chsh",
        "--alpha",
        "0",
        "--alpha-prime",
        "0",
        "--beta",
        "0",
        "--beta-prime",
        "0",
        "--events",
        "1000",
        "--seed",
        "1",
    ]);
    let doc: ReportDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.derived["S"].value, -2.0);
    assert!(doc.flags.is_empty());

    let o = bin(&["chsh", "--events", "100", "--seed", "4"]);
    let doc: ReportDocument = serde_json::from_slice(&o.stdout).unwrap();
    let s = doc.derived["S"];
    let interval_has_two = s.value.abs() - 3.0 * s.std_err.unwrap() <= 2.0;
    assert_eq!(doc.flags.is_empty(), interval_has_two);
}
