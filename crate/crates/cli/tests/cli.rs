use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn gausscap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gausscap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = gausscap(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn report_value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {report}"))
        .parse()
        .unwrap()
}

const SWEEP_ARGS: &[&str] = &[
    "sweep",
    "--channel",
    "loss",
    "--nth",
    "0",
    "--nbar",
    "3",
    "--axis",
    "eta",
    "--from",
    "0",
    "--to",
    "1",
    "--steps",
    "21",
    "--reproducible",
];
const REGION_ARGS: &[&str] = &[
    "region",
    "--channel",
    "loss",
    "--nth",
    "0",
    "--strength-steps",
    "21",
    "--nbar-from",
    "0",
    "--nbar-to",
    "20",
    "--nbar-steps",
    "21",
    "--reproducible",
];
const EFFICIENCY_ARGS: &[&str] = &[
    "efficiency",
    "--channel",
    "loss",
    "--strength",
    "0.7",
    "--nth",
    "0",
    "--nbar-from",
    "0.01",
    "--nbar-to",
    "100",
    "--steps",
    "21",
    "--protocols",
    "holevo-bound,coherent,squeezed,number-state,coherent-homodyne",
    "--reproducible",
];

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Set GAUSSCAP_BLESS=1 to rewrite the golden files.
fn check_golden(name: &str, args: &[&str]) {
    let got = stdout(args);
    let path = golden_path(name);
    if std::env::var_os("GAUSSCAP_BLESS").is_some() {
        fs::write(&path, &got).unwrap();
        return;
    }
    let want = fs::read_to_string(&path).unwrap();
    if got != want {
        for (i, (g, w)) in got.lines().zip(want.lines()).enumerate() {
            if g != w {
                panic!("{name} differs at line {}:\n got: {g}\nwant: {w}", i + 1);
            }
        }
        panic!("{name} differs in length");
    }
}

#[test]
fn golden_loss_sweep() {
    check_golden("loss_eta_sweep.csv", SWEEP_ARGS);
}

#[test]
fn golden_loss_region() {
    check_golden("loss_region.csv", REGION_ARGS);
}

#[test]
fn golden_loss_efficiency() {
    check_golden("loss_efficiency.csv", EFFICIENCY_ARGS);
}

#[test]
fn reproducible_runs_are_identical() {
    let runs: &[&[&str]] = &[
        &[
            "capacity",
            "--strength",
            "0.4",
            "--nth",
            "1",
            "--nbar",
            "5",
            "--protocol",
            "gaussian-opt",
        ],
        &[
            "sweep",
            "--channel",
            "amp",
            "--nbar",
            "10",
            "--steps",
            "9",
            "--reproducible",
        ],
        &[
            "region",
            "--channel",
            "amp",
            "--nth",
            "1",
            "--strength-steps",
            "7",
            "--nbar-steps",
            "7",
            "--reproducible",
        ],
        &[
            "efficiency",
            "--channel",
            "amp",
            "--strength",
            "1.5",
            "--steps",
            "9",
            "--reproducible",
        ],
        &["critical-n", "--nth", "0,0.5,1,2", "--reproducible"],
        &["number-state", "--strength", "0.6", "--nbar", "2"],
    ];
    for args in runs {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn timestamp_only_without_reproducible() {
    let args = ["critical-n", "--nth", "1"];
    assert!(stdout(&args).contains("# generated: "));
    let mut quiet = args.to_vec();
    quiet.push("--reproducible");
    assert!(!stdout(&quiet).contains("generated"));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("gausscap-cli-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("n_c.csv");
    let printed = stdout(&["critical-n", "--nth", "0,1", "--reproducible"]);
    let written = stdout(&[
        "critical-n",
        "--nth",
        "0,1",
        "--reproducible",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(written.is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap(), printed);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn capacity_examples() {
    let r = stdout(&[
        "capacity",
        "--channel",
        "loss",
        "--strength",
        "0.5",
        "--nth",
        "0",
        "--nbar",
        "3",
        "--protocol",
        "squeezed",
    ]);
    assert!((report_value(&r, "bits") - 3f64.log2()).abs() < 1e-8);
    assert!(((2.0 * report_value(&r, "r_opt")).exp() - 3.0).abs() < 1e-7);

    let r = stdout(&[
        "capacity",
        "--channel",
        "loss",
        "--strength",
        "1",
        "--nth",
        "0",
        "--nbar",
        "3",
        "--protocol",
        "holevo-bound",
    ]);
    let g3 = 4.0 * 4f64.log2() - 3.0 * 3f64.log2();
    assert!((report_value(&r, "bits") - g3).abs() < 1e-5);

    for q in [
        "coherent",
        "coherent-homodyne",
        "squeezed",
        "gaussian-opt",
        "number-state",
        "holevo-quantity-coherent",
        "holevo-quantity-squeezed",
        "holevo-bound",
    ] {
        let r = stdout(&[
            "capacity",
            "--strength",
            "0.8",
            "--nbar",
            "0",
            "--protocol",
            q,
        ]);
        assert_eq!(report_value(&r, "bits"), 0.0, "{q}");
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| gausscap(args).status.code();
    let usage = [
        &[
            "capacity",
            "--channel",
            "amp",
            "--strength",
            "2",
            "--protocol",
            "number-state",
        ][..],
        &["number-state", "--channel", "amp", "--strength", "2"],
        &["number-state", "--strength", "0.5", "--nth", "1"],
        &["efficiency", "--nbar-from", "0"],
        &["capacity", "--protocol", "telepathy"],
        &["capacity", "--strength", "1.5"],
        &["sweep", "--steps", "1"],
        &["region", "--nbar-from", "5", "--nbar-to", "1"],
        &["sweep", "--bogus"],
    ];
    for args in usage {
        assert_eq!(code(args), Some(2), "{args:?}");
    }
    let stderr = String::from_utf8(gausscap(usage[0]).stderr).unwrap();
    assert!(
        stderr.contains("number-state") && stderr.contains("amp"),
        "{stderr}"
    );
    assert_eq!(
        code(&[
            "number-state",
            "--strength",
            "0.6",
            "--nbar",
            "2",
            "--max-iter",
            "3",
            "--tol",
            "1e-14"
        ]),
        Some(3)
    );
    assert_eq!(
        code(&[
            "number-state",
            "--strength",
            "0.7",
            "--nbar",
            "3",
            "--cutoff",
            "40"
        ]),
        Some(3)
    );
    assert_eq!(code(&["critical-n"]), Some(0));
}

#[test]
fn unsupported_column_dropped_with_warning() {
    let out = gausscap(&[
        "sweep",
        "--channel",
        "amp",
        "--steps",
        "3",
        "--protocols",
        "coherent,number-state,squeezed",
    ]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("warning") && stderr.contains("number-state"));
    let csv = String::from_utf8(out.stdout).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "g,coherent,squeezed");
}
