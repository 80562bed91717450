use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "scenarios", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn nrgit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrgit"))
        .args(args)
        .env_remove("NRGIT_SEED")
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn weights_reports_ladder_and_window() {
    let o = nrgit(&["weights", "-s", &scenario("ex62.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["ladder"], serde_json::json!([-2, 1, 4, 7]));
    assert_eq!(v["result"]["window"]["low"], "-2");
    assert_eq!(v["result"]["window"]["high"], "1");
}

#[test]
fn examples_check() {
    for e in ["6.1", "6.2"] {
        let o = nrgit(&["example", e, "--check"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
        let v = json(&o);
        assert!(v["result"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    }
}

#[test]
fn validation_errors_exit_2() {
    assert_eq!(nrgit(&["classify", "-s", &scenario("ex61.json")]).status.code(), Some(2));
    assert_eq!(nrgit(&["classify", "-s", &scenario("ex61.json"), "--point", "nope"]).status.code(), Some(2));
    assert_eq!(nrgit(&["weights", "-s", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(nrgit(&["weights"]).status.code(), Some(2));
    let dir = std::env::temp_dir().join("nrgit-cli-test-bad.json");
    std::fs::write(&dir, "{\"factors\": [}").unwrap();
    let o = nrgit(&["weights", "-s", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn seed_from_environment_and_flag() {
    let s = scenario("ex62.json");
    let a = Command::new(env!("CARGO_BIN_EXE_nrgit"))
        .args(["recursion", "-s", &s])
        .env("NRGIT_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&a)["seed"], 99);
    let b = Command::new(env!("CARGO_BIN_EXE_nrgit"))
        .args(["recursion", "-s", &s, "--seed", "5"])
        .env("NRGIT_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&b)["seed"], 5);
}

#[test]
fn byte_identical_reruns() {
    let s = scenario("ex62.json");
    for cmd in ["recursion", "strata", "blowup"] {
        let a = nrgit(&[cmd, "-s", &s, "--seed", "3"]);
        let b = nrgit(&[cmd, "-s", &s, "--seed", "3"]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn text_output_matches_json() {
    let s = scenario("ex61.json");
    let j = nrgit(&["classify", "-s", &s, "--point", "x"]);
    let t = nrgit(&["classify", "-s", &s, "--point", "x", "-o", "text"]);
    let parsed = nrgit_core::text::from_text(&String::from_utf8(t.stdout).unwrap()).unwrap();
    assert_eq!(parsed, json(&j));
}

#[test]
fn chi_accepts_negative_values() {
    let o = nrgit(&["classify", "-s", &scenario("ex62.json"), "--point", "z_generic", "--chi", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["torus"]["mode"], "at_chi");
}

#[test]
fn blowup_steps_auto() {
    let o = nrgit(&["blowup", "-s", &scenario("ex62.json"), "--steps", "auto"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let steps = v["result"]["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0]["d_max_before"], 1);
    assert_eq!(steps[0]["d_max_after"], 0);
}

#[test]
fn scale_multiplies_ladder() {
    let o = nrgit(&["window", "-s", &scenario("ex62.json"), "--scale", "3"]);
    let v = json(&o);
    assert_eq!(v["result"]["ladder"], serde_json::json!([-6, 3, 12, 21]));
    assert_eq!(nrgit(&["window", "-s", &scenario("ex62.json"), "--scale", "0"]).status.code(), Some(2));
}
