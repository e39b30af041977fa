use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reciprocal")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn commutator_table() {
    let o = bin(&["commutators", "--algebra", "lrt"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("-X_h[F(S)*h'(S)]") && s.contains("-X5"), "{s}");
    assert!(s.ends_with("verdict: PASS\n"));
}

#[test]
fn bateman_map_passes() {
    let o = bin(&["verify-map", "--catalog", "bateman", "--b1", "1", "--b2", "0", "--b3", "1", "--b4", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = bin(&["verify-map", "--file", &fixture("bateman.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn broken_fixture_fails() {
    let o = bin(&["verify-map", "--file", &fixture("broken.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "FAIL");
    assert_eq!(v["report"]["pass"], false);
    assert!(v["report"]["witness"]["value"].is_string());
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(bin(&["verify-map"]).status.code(), Some(2));
    assert_eq!(bin(&["verify-map", "--catalog", "nope"]).status.code(), Some(2));
    assert_eq!(bin(&["verify-map", "--file", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(bin(&["verify-map", "--catalog", "bateman", "--b1", "0"]).status.code(), Some(2));
    assert_eq!(bin(&["verify-generator", "--generator", "X9"]).status.code(), Some(2));
    assert_eq!(bin(&["verify-map", "--catalog", "e1"]).status.code(), Some(2));
    assert_eq!(bin(&["--tol", "-1", "commutators"]).status.code(), Some(2));
    let o = bin(&["verify-map", "--catalog", "bateman", "--param", "b1=1+"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_are_reproducible() {
    let dir = std::env::temp_dir().join(format!("reciprocal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.join(name);
        let o = bin(&[
            "lie-check", "--family", "rational_family", "--samples", "10", "--composition", "--format", "json",
            "--seed", seed, "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
        std::fs::read(out).unwrap()
    };
    let a = run("a.json", "7");
    let b = run("b.json", "7");
    let c = run("c.json", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let broken = || bin(&["verify-map", "--file", &fixture("broken.json")]).stdout;
    assert_eq!(broken(), broken());
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn generator_and_point_checks() {
    assert_eq!(bin(&["verify-generator", "--generator-file", &fixture("x4.json")]).status.code(), Some(0));
    assert_eq!(bin(&["verify-generator", "--generator", "X_F"]).status.code(), Some(0));
    assert_eq!(bin(&["verify-point", "--catalog", "munk_prim"]).status.code(), Some(0));
    assert_eq!(bin(&["verify-point", "--catalog", "bateman"]).status.code(), Some(2));
}

#[test]
fn pushforward_and_automorphism() {
    let o = bin(&["pushforward", "--catalog", "bateman", "--generator", "X1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("in the basis X1..X5: (1) X1"), "{}", stdout(&o));
    let o = bin(&["pushforward", "--catalog", "bateman", "--generator", "X_F"]);
    assert!(stdout(&o).contains("not in the span"));
    let o = bin(&["automorphism", "--catalog", "theorem", "--param", "a11=-1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["residuals"].as_array().unwrap().len(), 9);
}

#[test]
fn ansatz_dimension() {
    let o = bin(&["solve-ansatz", "--degree", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let dim = v["report"]["dimension"].as_u64().unwrap();
    assert_eq!(v["report"]["basis"].as_array().unwrap().len() as u64, dim);
    assert!(v["report"]["contains"].as_array().unwrap().iter().any(|x| x == "X1"));
}

#[test]
fn numeric_commands() {
    let bat = ["--catalog", "bateman", "--b1", "1", "--b2", "0", "--b3", "1", "--b4", "0"];
    let with = |head: &[&str]| {
        let mut a: Vec<&str> = head.to_vec();
        a.extend(bat);
        bin(&a)
    };
    assert_eq!(with(&["closedness", "--solution", "shear"]).status.code(), Some(0));
    assert_eq!(with(&["transform", "--solution", "shear"]).status.code(), Some(0));
    let o = with(&["transform", "--solution", "vortex", "--sol-param", "kappa=1", "--n", "33"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = bin(&["closedness", "--solution", "vortex", "--catalog", "broken", "--b1", "1", "--b2", "0", "--b3", "1", "--b4", "0"]);
    assert_eq!(o.status.code(), Some(1));
    // the loop leaves the grid
    assert_eq!(with(&["closedness", "--solution", "shear", "--square", "0.5,0"]).status.code(), Some(2));
}

#[test]
fn single_criterion_from_the_suite() {
    let o = bin(&["paper-suite", "--criterion", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["criteria"][0]["id"], 1);
    assert!(v["report"]["criteria"][0].get("elapsed").is_none());
    let o = bin(&["paper-suite", "--criterion", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(bin(&["paper-suite", "--criterion", "11"]).status.code(), Some(2));
}
