use std::path::PathBuf;
use std::process::{Command, Output};

fn twoended(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoended"))
        .args(args)
        .env_remove("TWOENDED_MODE")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_spec(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("twoended-{}-{name}.json", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn gamma_checks_pass() {
    let out = twoended(&["gamma", "--check", "all"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn ladder_harmonic_converges() {
    let out = twoended(&[
        "--mode", "float", "harmonic", "--spec", "ladder", "--probe", "3", "--eps", "1e-8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lip: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("lipschitz="))
        .expect("lipschitz line")
        .parse()
        .unwrap();
    assert!(lip <= 1.0 + 1e-12);
}

#[test]
fn exhausted_schedule_is_a_verification_failure() {
    let out = twoended(&[
        "--mode",
        "float",
        "harmonic",
        "--spec",
        "gamma",
        "--max-radius",
        "11",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn disconnected_spec_is_an_input_error() {
    let path = temp_spec("disconnected", r#"{"m":2,"intra":[],"cross":[[0,0]]}"#);
    let out = twoended(&["build", "--spec", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_spec_and_bad_flags_are_input_errors() {
    assert_eq!(
        twoended(&["build", "--spec", "no-such-graph"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        twoended(&["saw", "--spec", "gamma", "--max", "seven"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(twoended(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn spec_file_round_trips_through_build() {
    let exported = twoended(&["build", "--spec", "gamma", "--format", "spec"]);
    assert_eq!(exported.status.code(), Some(0));
    let path = temp_spec("gamma", &stdout(&exported));
    let dot = twoended(&[
        "build",
        "--spec",
        path.to_str().unwrap(),
        "--lo",
        "-1",
        "--hi",
        "1",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(dot.status.code(), Some(0));
    assert!(stdout(&dot).starts_with("graph"));
}

#[test]
fn exact_outputs_are_byte_identical() {
    for args in [
        &[
            "current", "--spec", "gamma", "--lo", "-2", "--hi", "2", "--from", "2,0", "--to",
            "-2,0",
        ][..],
        &[
            "color3", "--spec", "gamma", "--radius", "6", "--format", "json",
        ][..],
        &["saw", "--spec", "ladder", "--max", "10"][..],
        &["gamma", "--check", "all"][..],
    ] {
        let a = twoended(args);
        let b = twoended(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn env_var_selects_float_mode() {
    let out = Command::new(env!("CARGO_BIN_EXE_twoended"))
        .args([
            "current", "--spec", "path", "--lo", "-2", "--hi", "2", "--from", "2,0", "--to", "-2,0",
        ])
        .env("TWOENDED_MODE", "float")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("mode=float"));
}
