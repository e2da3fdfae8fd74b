use std::process::{Command, Output};

fn scl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn prints_value() {
    let o = scl(&["scl", "--group", "Z(a)*Z(b)", "a^-2 + b^-2 + a^3 b^3 + a^-1 b^-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "scl = 2/3\n");
}

#[test]
fn non_boundary_is_a_domain_error() {
    let o = scl(&["scl", "ab"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("chain is not a boundary"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(scl(&[]).status.code(), Some(2));
    assert_eq!(scl(&["scl", "a b %"]).status.code(), Some(2));
    assert_eq!(scl(&["scl", "--box-scale", "0", "abAB"]).status.code(), Some(2));
    assert_eq!(scl(&["sweep", "--line", "a->a", "abAB"]).status.code(), Some(2));
}

#[test]
fn sweep_rows() {
    let o = scl(&[
        "sweep",
        "--line",
        "a->a; c->p*a; b->b",
        "--group",
        "Z^2(a,c)*Z(b)",
        "a^2 c^2 b A B C b A C B",
        "--p",
        "1..4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let values: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(values, ["7/8", "5/6", "15/16", "9/10"]);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",1/1")));
}

#[test]
fn json_witness_round_trips() {
    let chain = "a^-3 + b^-2 + a^5 b^3 + a^-2 b^-1";
    let o = scl(&["scl", "--json", chain]);
    let json = stdout(&o);
    assert!(json.contains("\"value\": \"11/15\""));
    let dir = std::env::temp_dir().join(format!("scl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w.json");
    std::fs::write(&path, &json).unwrap();
    let ok = scl(&["scl", "--verify", path.to_str().unwrap(), chain]);
    assert_eq!(stdout(&ok), "witness ok: scl = 11/15\n");
    let forged = json.replacen("\"value\": \"11/15\"", "\"value\": \"1/2\"", 1);
    std::fs::write(&path, forged).unwrap();
    let bad = scl(&["scl", "--verify", path.to_str().unwrap(), chain]);
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn inspect_labels_rays_and_profile() {
    let o = scl(&[
        "inspect",
        "--disks",
        "--factor",
        "0",
        "--profile",
        "1,0,1,1,0:1,1,0,0,1",
        "a^-3 + b^-2 + a^5 b^3 + a^-2 b^-1",
    ]);
    let text = stdout(&o);
    assert!(text.contains("rays over (τ1,τ1) (τ2,τ2) (τ2,τ3) (τ3,τ2) (τ3,τ3)"));
    assert!(text.contains("(0, 2, 0, 0, 5)"));
    assert!(text.contains("box [6, 5, 3, 3, 8]"));
    assert!(text.contains("(τ1,τ1)=0 (τ2,τ2)=1 (τ2,τ3)=1 (τ3,τ2)=1 (τ3,τ3)=4"));
    assert!(text.contains("profile breakpoints [3/5, 4/5]"));
    assert!(!text.contains("factor 1 Z(b)"));
}

#[test]
fn witness_report() {
    let text = stdout(&scl(&["scl", "--witness", "abAB"]));
    assert!(text.starts_with("scl = 1/2\n"));
    assert!(text.ends_with("witness verified\n"));
}

#[test]
fn formula_and_histogram() {
    assert_eq!(stdout(&scl(&["formula", "w", "5", "-2", "3", "-1"])), "scl = 11/15\n");
    assert_eq!(stdout(&scl(&["formula", "wprime", "3", "-1", "3", "-1"])), "scl = 3/4\n");
    let h = scl(&["histogram", "--max", "5", "--check", "4", "--seed", "11"]);
    assert_eq!(h.status.code(), Some(0));
    assert!(stdout(&h).starts_with("scl,count\n1/2,2\n"));
    assert!(String::from_utf8_lossy(&h.stderr).contains("0 disagreements"));
}

#[test]
fn deterministic_output() {
    let args = ["histogram", "--max", "7"];
    assert_eq!(stdout(&scl(&args)), stdout(&scl(&args)));
}

#[test]
fn long_chain_needs_the_flag() {
    let o = scl(&["scl", "a b a^-98 b a^-1 b^-3 + a^98 b"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--long"));
}
