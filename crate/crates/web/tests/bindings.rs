use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn hexagon_has_six_vertices() {
    let h = parse(nrgit_web::hexagon());
    assert_eq!(h["weights"].as_array().unwrap().len(), 27);
    assert_eq!(h["hull"].as_array().unwrap().len(), 6);
}

#[test]
fn click_classifies_and_betas_agree() {
    for chi in ["-2,-3", "0,0", "1/2,-1", "5,5"] {
        for p in ["x", "z_min", "diagonal"] {
            let v = parse(nrgit_web::classify(p, chi));
            let b = parse(nrgit_web::beta(p, chi));
            assert_eq!(v["verdict"] == "unstable", b["zero"] == false, "{p} at {chi}");
        }
    }
}

#[test]
fn ladder_scales() {
    let w = parse(nrgit_web::ladder_window("6.2", 2));
    assert_eq!(w["ladder"], serde_json::json!([-4, 2, 8, 14]));
    assert_eq!(w["low"], "-4");
    assert_eq!(w["high"], "2");
}

#[test]
fn errors_are_reported_as_json() {
    assert!(parse(nrgit_web::classify("nope", "0,0"))["error"].is_string());
    assert!(parse(nrgit_web::beta("x", "1"))["error"].is_string());
    assert!(parse(nrgit_web::ladder_window("6.2", 0))["error"].is_string());
}
