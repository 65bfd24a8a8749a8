//! Exit-code and output contract of the installed binary, exercised
//! through real processes so environment handling is covered too.

use std::process::{Command, Output};

fn chainlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainlab"))
        .args(args)
        .env_remove("CHAINLAB_MAX_ORDER")
        .output()
        .expect("the binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn latex_member_from_the_binary() {
    let out = chainlab(&[
        "chain", "--family", "riccati", "--order", "3", "--format", "latex",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = stdout_of(&out);
    assert!(stdout.contains("u_{xxx}"), "{stdout}");
    assert!(stdout.trim_end().ends_with("= 0"), "{stdout}");
}

#[test]
fn solve_prints_the_evaluated_value() {
    let out = chainlab(&[
        "solve",
        "--family",
        "riccati",
        "--order",
        "2",
        "--constants",
        "0,0",
        "--eval",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("u(1) = 2"), "{}", stdout_of(&out));
}

#[test]
fn exit_code_matrix() {
    let matrix: &[(&[&str], i32)] = &[
        (&["chain", "--family", "riccati", "--order", "3"], 0),
        (
            &[
                "verify",
                "--suite",
                "symmetry",
                "--family",
                "abel",
                "--max-order",
                "4",
            ],
            0,
        ),
        (&["reduce", "--family", "abel", "--order", "4"], 0),
        (
            &[
                "numcheck",
                "--family",
                "riccati",
                "--order",
                "2",
                "--constants",
                "1,1",
            ],
            0,
        ),
        (
            &[
                "numcheck",
                "--family",
                "riccati",
                "--order",
                "3",
                "--constants",
                "1,1,1",
                "--interval",
                "0,2",
            ],
            1,
        ),
        (
            &[
                "solve",
                "--family",
                "riccati",
                "--order",
                "2",
                "--constants",
                "0,0",
                "--eval",
                "0",
            ],
            1,
        ),
        (&["chain", "--family", "riccati"], 2),
        (&["chain", "--family", "riccati", "--order", "three"], 2),
        (
            &[
                "solve",
                "--family",
                "riccati",
                "--order",
                "2",
                "--constants",
                "0.5,0",
            ],
            2,
        ),
        (
            &[
                "symmetry",
                "--family",
                "riccati",
                "--max-order",
                "1",
                "--c",
                "exp(x)",
            ],
            3,
        ),
        (
            &[
                "symmetry",
                "--family",
                "riccati",
                "--max-order",
                "1",
                "--c",
                "0",
            ],
            3,
        ),
    ];
    for (args, expected) in matrix {
        let out = chainlab(args);
        assert_eq!(
            out.status.code(),
            Some(*expected),
            "args {args:?}\nstdout: {}\nstderr: {}",
            stdout_of(&out),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn reports_go_to_stdout_and_diagnostics_to_stderr() {
    let ok = chainlab(&["verify", "--suite", "catalog"]);
    assert!(!ok.stdout.is_empty());
    assert!(ok.stderr.is_empty());

    let bad = chainlab(&["chain", "--family", "riccati"]);
    assert!(bad.stdout.is_empty());
    assert!(!bad.stderr.is_empty());
}

#[test]
fn environment_variable_caps_the_order() {
    let refuse = Command::new(env!("CARGO_BIN_EXE_chainlab"))
        .args(["chain", "--family", "riccati", "--order", "7"])
        .env("CHAINLAB_MAX_ORDER", "6")
        .output()
        .unwrap();
    assert_eq!(refuse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&refuse.stderr).contains("maximum 6"));

    let allow = Command::new(env!("CARGO_BIN_EXE_chainlab"))
        .args(["chain", "--family", "riccati", "--order", "6"])
        .env("CHAINLAB_MAX_ORDER", "6")
        .output()
        .unwrap();
    assert_eq!(allow.status.code(), Some(0));

    let raised = Command::new(env!("CARGO_BIN_EXE_chainlab"))
        .args(["chain", "--family", "abel", "--order", "14"])
        .env("CHAINLAB_MAX_ORDER", "15")
        .output()
        .unwrap();
    assert_eq!(raised.status.code(), Some(0));

    let junk = Command::new(env!("CARGO_BIN_EXE_chainlab"))
        .args(["chain", "--family", "riccati", "--order", "2"])
        .env("CHAINLAB_MAX_ORDER", "many")
        .output()
        .unwrap();
    assert_eq!(junk.status.code(), Some(2));
}

#[test]
fn default_cap_is_twelve() {
    let at_cap = chainlab(&["chain", "--family", "riccati", "--order", "12"]);
    assert_eq!(at_cap.status.code(), Some(0));
    let over = chainlab(&["chain", "--family", "riccati", "--order", "13"]);
    assert_eq!(over.status.code(), Some(2));
}

#[test]
fn json_from_the_binary_parses_under_the_schema() {
    let out = chainlab(&[
        "verify", "--suite", "reduction", "--max-order", "3", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["schema"], "chainlab/1");
    assert_eq!(v["status"], "pass");
    assert!(v["entries"].as_array().unwrap().len() == 4);
    for e in v["entries"].as_array().unwrap() {
        assert_eq!(e["residual"], "0");
        assert!(!e["anchor"].as_str().unwrap().is_empty());
    }
}
