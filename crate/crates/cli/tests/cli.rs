use std::path::Path;
use std::process::{Command, Output};

fn qkwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkwb"))
        .args(args)
        .env_remove("QKWB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn theorem_on_classical_kcp2_passes() {
    let o = qkwb(&["verify", "--suite", "theorem", "--potential", "classical-k:kcp2:5"]);
    assert_eq!(o.status.code(), Some(0));
    let line: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(line["check"], "total_symmetry");
    assert_eq!(line["pass"], true);
    assert_eq!(line["verified_through"]["t_order"], 2);
    assert_eq!(line["millis"], 0);
}

#[test]
fn broken_fixture_fails_with_witnesses() {
    let src = format!("file:{}", fixture("broken.json"));
    let o = qkwb(&["verify", "--suite", "theorem", "--potential", &src]);
    assert_eq!(o.status.code(), Some(1));
    let line: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(line["pass"], false);
    let witnesses = line["witnesses"].as_array().unwrap();
    assert!(!witnesses.is_empty());
    assert!(witnesses[0]["lhs"].is_string());
}

#[test]
fn dm_suite_passes() {
    let o = qkwb(&["verify", "--suite", "dm"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true, "{line}");
    }
}

#[test]
fn output_is_byte_identical() {
    let a = qkwb(&["verify", "--suite", "corollaries", "--potential", "sampled:2:5"]);
    let b = qkwb(&["verify", "--suite", "corollaries", "--potential", "sampled:2:5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_comes_from_the_environment() {
    let make = |seed: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_qkwb"))
            .args(["potential", "make", "--kind", "sampled", "--order", "5"])
            .env("QKWB_SEED", seed)
            .output()
            .unwrap();
        stdout(&o)
    };
    assert_eq!(make("3"), make("3"));
    let flag = qkwb(&["--seed", "3", "potential", "make", "--kind", "sampled", "--order", "5"]);
    assert_eq!(stdout(&flag), make("3"));
}

#[test]
fn potential_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pot.json");
    let p = path.to_str().unwrap();
    let o = qkwb(&["potential", "make", "--kind", "classical-k", "--ring", "kcp2", "--order", "5", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    let src = format!("file:{p}");
    let o = qkwb(&["verify", "--suite", "corollaries", "--potential", &src, "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("check,pass,t_order,q_caps,witnesses,millis\n"));
    assert_eq!(out.lines().count(), 6);
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(qkwb(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    let o = qkwb(&["verify", "--suite", "theorem", "--potential", "file:/nonexistent/pot.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
    let o = qkwb(&["verify", "--suite", "theorem", "--potential", "pt:20"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qkwb(&["--unbounded", "verify", "--suite", "theorem", "--potential", "pt:13"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn tables_and_values() {
    let o = qkwb(&["cp2", "nd", "--dmax", "5"]);
    assert_eq!(stdout(&o), "N_1 = 1\nN_2 = 1\nN_3 = 12\nN_4 = 620\nN_5 = 87304\n");
    let o = qkwb(&["dm", "lee", "--k", "1,1,0,0,0"]);
    assert_eq!(stdout(&o).trim(), "7");
    let o = qkwb(&["dm", "table", "--kind", "lee", "--n", "4", "--kmax", "3"]);
    assert_eq!(stdout(&o), "k,chi\n0,1\n1,2\n2,3\n3,4\n");
    let o = qkwb(&["dm", "table", "--kind", "nd", "--dmax", "3", "--format", "json"]);
    assert_eq!(stdout(&o).lines().next().unwrap(), r#"{"N_d":"1","d":"1"}"#);
}

#[test]
fn qde_commands() {
    let o = qkwb(&["qde", "verify", "--n", "2", "--dmax", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let o = qkwb(&["qde", "verify", "--n", "1", "--dmax", "3", "--twisted"]);
    assert_eq!(o.status.code(), Some(0));
    let o = qkwb(&["qde", "solve", "--n", "1", "--dmax", "1"]);
    assert_eq!(stdout(&o), "S_0 = 1\nS_1 = (1)/(1 - 2*q + q^2)\n");
}

#[test]
fn ring_show_describes_kcp1() {
    let o = qkwb(&["ring", "show", "--ring", "kcp1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rank"], 2);
    assert_eq!(v["pairing"][1][1], "0");
}
