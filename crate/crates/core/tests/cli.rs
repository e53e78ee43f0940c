//! End-to-end tests of the `etaq` binary: output content, format
//! stability, and the exit-status contract (0 pass, 1 failing verdict,
//! 2 errors).

use std::process::{Command, Output};

use etaq::BrokenDiamondFamily;

fn etaq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etaq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn sturm_example() {
    let out = etaq(&["sturm", "-k", "3", "-N", "56"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).trim(),
        "weight 3 on level 56: index 96, Sturm bound 25"
    );

    let out = etaq(&["sturm", "-k", "3", "-N", "56", "--format", "machine"]);
    assert_eq!(stdout(&out).trim(), "weight=3\nlevel=56\nindex=96\nbound=25");
}

#[test]
fn expand_prints_coefficient_lines() {
    let out = etaq(&["expand", "N=2; 1:24", "-T", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in ["1: 1", "2: -24", "3: 252", "4: -1472", "5: 4830", "6: -6048"] {
        assert!(text.contains(line), "missing {line:?} in {text}");
    }

    let out = etaq(&["expand", "N=2; 1:24", "-T", "6", "--format", "machine"]);
    let text = stdout(&out);
    for line in ["lead=1", "trunc=6", "c1=1", "c4=-1472"] {
        assert!(text.contains(line), "missing {line:?} in {text}");
    }
}

#[test]
fn check_modularity_report_fields() {
    let out = etaq(&["check-modularity", "N=56; 1:-3 2:1 7:9 14:-1", "--format", "machine"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in [
        "weight_twice=6",
        "sum_delta_r=48",
        "sum_Nover_delta_r=-72",
        "condition_24_a=true",
        "condition_24_b=true",
        "weight_integral=true",
        "s_numerator=5764801",
        "s_denominator=1",
        "holomorphic_at_all_cusps=false",
    ] {
        assert!(text.contains(line), "missing {line:?} in {text}");
    }
}

#[test]
fn cusp_orders_table() {
    let out = etaq(&["cusp-orders", "N=56; 1:-3 2:1 7:9 14:-1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("d=1: -3"));
    assert!(text.contains("d=56: 2"));
}

#[test]
fn machine_output_is_stable_across_runs() {
    let args = ["check-modularity", "N=88; 1:-3 2:1 11:13 22:-1", "--format", "machine"];
    let first = stdout(&etaq(&args));
    let second = stdout(&etaq(&args));
    assert_eq!(first, second);
    assert!(first.contains("cusp_orders="));
}

#[test]
fn delta_matches_the_library() {
    let out = etaq(&["delta", "-k", "3", "-T", "8", "--format", "machine"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let fam = BrokenDiamondFamily::new(3, 8).unwrap();
    for n in 0..=8 {
        let line = format!("c{n}={}", fam.delta_coeff(n).unwrap());
        assert!(text.contains(&line), "missing {line:?} in {text}");
    }
}

#[test]
fn builtin_verifications_pass_with_exit_zero() {
    let out = etaq(&["verify-thm1", "--format", "machine"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("verdict=true"));
    assert!(text.contains("bound_used=25"));
    assert!(text.contains("first_mismatch=none"));

    let out = etaq(&["verify-thm2", "--format", "machine"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("verdict=true"));
    assert!(text.contains("bound_used=61"));
}

#[test]
fn general_verify_exit_statuses() {
    // passing congruence: exit 0
    let out = etaq(&[
        "verify",
        "N=56; 1:-3 2:1 7:9 14:-1",
        "6*(N=56; 1:-2 2:6 7:2)",
        "-p", "7", "-M", "7", "-k", "3", "-N", "56",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {:?}", String::from_utf8_lossy(&out.stderr));

    // failing verdict: exit 1, mismatch in the report
    let out = etaq(&[
        "verify",
        "N=56; 1:-2 2:18 7:2",
        "6*(N=56; 1:-2 2:6 7:2)",
        "-M", "7", "-k", "3", "-N", "56",
        "--format", "machine",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("verdict=false"));
    assert!(!text.contains("first_mismatch=none"));

    // malformed spec: exit 2 with a diagnostic on stderr
    let out = etaq(&["expand", "N=56; 3:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not divide"));

    // usage error from clap: nonzero exit
    let out = etaq(&["expand", "N=2; 1:24", "-T", "0"]);
    assert_ne!(out.status.code(), Some(0));
}
