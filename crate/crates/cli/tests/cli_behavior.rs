//! Black-box tests of the installed binary: exit codes, output formats,
//! the --out flag, and run-to-run determinism.

use std::process::{Command, Output};

fn robinlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robinlab")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn neumann_interval_matches_closed_form() {
    let out = robinlab(&["spectrum", "--domain", "interval:L=3.14159265", "--alpha", "0", "--k", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "index,value,multiplicity,component,mode,solver,err");
    let values: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for (v, want) in values.iter().zip([0.0, 1.0, 4.0]) {
        assert!((v - want).abs() < 1e-6, "{values:?}");
    }
}

#[test]
fn unknown_domain_exits_2() {
    let out = robinlab(&["spectrum", "--domain", "pentagon:R=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid domain"));
}

#[test]
fn unknown_solver_exits_2() {
    let out = robinlab(&["spectrum", "--domain", "disk:R=1", "--solver", "magic"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsupported_combination_exits_2() {
    // analytic spectra only exist at p = 2
    let out = robinlab(&["spectrum", "--domain", "disk:R=1", "--p", "3", "--solver", "analytic"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn uncertifiable_union_exits_3() {
    // p = 3 supplies one value per ball; the third value of a two-ball
    // union cannot be certified, which is a numeric failure, not bad input
    let out = robinlab(&["spectrum", "--domain", "dk:M=1,k=2,N=2", "--p", "3", "--k", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn violated_verdict_exits_4() {
    // with alpha < 0 the ball maximizes lambda_1, so the minimality check
    // reports "violated" (the report notes it is outside alpha > 0 scope)
    let out = robinlab(&["check-faber-krahn", "--domain", "rect:a=2,b=0.5", "--alpha", "-1"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("# verdict: violated"));
}

#[test]
fn extremal_case_is_inconclusive_with_exit_0() {
    let out = robinlab(&["check-two-balls", "--domain", "dk:M=1,k=2,N=2", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("extremal"));
    assert!(text.contains("# verdict: inconclusive"));
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = std::env::temp_dir().join("robinlab-cli-out");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spectrum.csv");
    let args = ["spectrum", "--domain", "disk:R=1", "--alpha", "1", "--k", "4"];

    let piped = robinlab(&args);
    assert!(piped.status.success());

    let mut with_out: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap().to_string();
    with_out.extend(["--out", &path_str]);
    let filed = robinlab(&with_out);
    assert!(filed.status.success());
    assert!(filed.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), piped.stdout);
}

#[test]
fn json_format_is_well_formed() {
    let out = robinlab(&[
        "spectrum", "--domain", "disk:R=1", "--alpha", "1", "--k", "2", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 2);

    let out = robinlab(&[
        "check-two-balls", "--domain", "rect:a=1,b=1", "--alpha", "1", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "holds");
}

#[test]
fn sweep_appends_monotonicity_comment() {
    let out = robinlab(&[
        "sweep", "--domain", "interval:L=3.14159265358979", "--from", "0", "--to", "5",
        "--steps", "6", "--k", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().next().unwrap() == "param,lambda_1,lambda_2");
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("# monotone"), "{last}");
    assert!(last.contains("lambda_1=ok") && last.contains("lambda_2=ok"));
}

#[test]
fn wentzell_csv_lists_fixpoint_modes() {
    let out = robinlab(&[
        "wentzell", "--domain", "dk:M=1,k=2,N=2", "--beta", "1", "--gamma", "2", "--k", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("fixpoint-n=1") && text.contains("wentzell"));
    // every Wentzell value stays below gamma
    for line in text.lines().skip(1) {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v < 2.0, "{line}");
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["wentzell-check", "--domain", "rect:a=1,b=1", "--versus", "dk:M=1,k=2,N=2",
        "--beta", "1", "--gamma", "1", "--k", "2"];
    let a = robinlab(&args);
    let b = robinlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
