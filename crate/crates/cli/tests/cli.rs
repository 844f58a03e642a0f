use std::process::Command;

use nonlinear_metrology_cli::run;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("nlmetro").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn summary_value(csv: &str, key: &str) -> f64 {
    let prefix = format!("# {key}: ");
    csv.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in\n{csv}"))
        .parse()
        .unwrap()
}

fn config_line(csv: &str) -> &str {
    csv.lines()
        .find_map(|l| l.strip_prefix("# config: "))
        .unwrap()
}

#[test]
fn decohere_example() {
    let (code, out, _) = call(&[
        "decohere",
        "--J",
        "1e4",
        "--beta",
        "pi/4",
        "--tau2",
        "1",
        "--T",
        "100",
        "--scan-t",
        "0.05:2.0:0.05",
    ]);
    assert_eq!(code, 0);
    assert!((summary_value(&out, "argmin_t") - 0.5).abs() < 1e-12);
    let best = summary_value(&out, "min_delta_gamma");
    assert!((best / 1.64872e-7 - 1.0).abs() < 1e-3, "{best}");
}

#[test]
fn bound_example_json() {
    let (code, out, _) = call(&["bound", "--k", "2", "--n", "1000", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let get = |name: &str| {
        let row = rows.iter().find(|r| r[0] == name).unwrap();
        row[1].as_f64().unwrap()
    };
    assert!((get("entangled_delta_gamma") - 4e-6).abs() < 1e-15);
    assert!((get("product_delta_gamma") / 6.3246e-5 - 1.0).abs() < 1e-4);
    assert_eq!(v["config"]["k"], 2);
}

#[test]
fn oracle_check_passes() {
    let (code, out, _) = call(&["oracle-check", "--max-2J", "12", "--grid", "8"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().filter(|l| l.ends_with(",true")).count() == 12);
}

#[test]
fn oracle_check_breach_exits_2() {
    let (code, out, err) = call(&[
        "oracle-check",
        "--max-2J",
        "6",
        "--grid",
        "4",
        "--tolerance",
        "0",
    ]);
    assert_eq!(code, 2);
    assert!(out.contains(",false"));
    assert!(err.contains("exceed the tolerance"));
}

#[test]
fn config_echo_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &[
            "sensitivity",
            "--J",
            "200.3",
            "--phi",
            "-pi/8:pi/8",
            "--points",
            "9",
            "--axis",
            "x",
        ],
        &["feedback", "--seed", "11"],
        &[
            "simulate",
            "--J",
            "20",
            "--nu",
            "50",
            "--batches",
            "4",
            "--seed",
            "9",
        ],
        &[
            "scaling",
            "--beta",
            "pi/6:pi/3",
            "--points",
            "4",
            "--rule",
            "scaled-inverse-j:0.25",
        ],
    ];
    for args in runs {
        let (code, first, _) = call(args);
        assert_eq!(code, 0);
        let config = dir.path().join("config.json");
        std::fs::write(&config, config_line(&first)).unwrap();
        let output = dir.path().join("out.csv");
        let (code, stdout, _) = call(&[
            args[0],
            "--config",
            config.to_str().unwrap(),
            "-o",
            output.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(stdout.is_empty());
        assert_eq!(std::fs::read_to_string(&output).unwrap(), first, "{args:?}");
    }
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"J": 10, "beta": "pi/3", "phi": 0.01}"#).unwrap();
    let (code, out, _) = call(&["moments", "--config", config.to_str().unwrap(), "--J", "12"]);
    assert_eq!(code, 0);
    let echo: Value = serde_json::from_str(config_line(&out)).unwrap();
    assert_eq!(echo["J"], 12.0);
    assert!((echo["beta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["moments", "--J", "3", "--bogus"][..],
        &["sensitivity"],
        &["simulate", "--protocol", "cat", "--J", "5"],
        &["bound", "--k", "3", "--n", "2"],
        &["decohere", "--J", "10", "--tau2", "1", "--gamma-rate", "1"],
        &["sensitivity", "--J", "10", "--axis", "z"],
    ] {
        let (code, out, err) = call(args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(out.is_empty());
        assert!(!err.is_empty());
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"J": 10, "bta": 0.5}"#).unwrap();
    let (code, _, err) = call(&["moments", "--config", config.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("bta"), "{err}");
}

#[test]
fn degenerate_spectrum_exits_3() {
    let (code, _, err) = call(&["bound", "--k", "2", "--n", "10", "--levels", "1,1"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn no_information_is_marked() {
    let (code, out, _) = call(&["sensitivity", "--J", "0.5", "--phi", "0.1"]);
    assert_eq!(code, 0);
    assert!(out.lines().last().unwrap().contains("no-information"));
}

#[test]
fn half_integer_rounding_notice() {
    let (code, out, err) = call(&["moments", "--J", "7.2"]);
    assert_eq!(code, 0);
    assert!(err.contains("rounded to 7"));
    assert!(!out.contains("rounded"));
}

#[test]
fn binary_help_and_version() {
    let bin = env!("CARGO_BIN_EXE_nlmetro");
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert!(help.status.success());
    let text = String::from_utf8(help.stdout).unwrap();
    for sub in [
        "bound",
        "sensitivity",
        "scaling",
        "moments",
        "simulate",
        "feedback",
        "decohere",
        "oracle-check",
    ] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
    let version = Command::new(bin).arg("--version").output().unwrap();
    assert!(String::from_utf8(version.stdout)
        .unwrap()
        .starts_with("nlmetro "));
    let bad = Command::new(bin)
        .args(["bound", "--k", "2"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
