use nrgit_core::builtin::{builtin, EX_61, EX_62, LADDER};
use nrgit_core::report::{run, Command, Flags, Format, Status, SCHEMA};
use nrgit_core::text::from_text;
use serde_json::Value;

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn flags(point: Option<&str>) -> Flags {
    Flags {
        point: point.map(str::to_string),
        ..Flags::default()
    }
}

fn all_reports() -> Vec<nrgit_core::report::Report> {
    let mut out = Vec::new();
    for text in [EX_61, EX_62, LADDER] {
        for cmd in [Command::Weights, Command::Window, Command::Recursion, Command::Strata] {
            out.push(run(&cmd, Some(text), &flags(None)).unwrap());
        }
        if text != LADDER {
            out.push(run(&Command::Blowup, Some(text), &flags(None)).unwrap());
        }
    }
    let pointed = [(EX_61, "x"), (EX_61, "z_min"), (EX_62, "x_off"), (LADDER, "generic")];
    for (text, p) in pointed {
        out.push(run(&Command::Classify, Some(text), &flags(Some(p))).unwrap());
        out.push(run(&Command::HatClassify, Some(text), &flags(Some(p))).unwrap());
    }
    for e in ["6.1", "6.2"] {
        let f = Flags {
            check: true,
            ..Flags::default()
        };
        out.push(run(&Command::Example(e.into()), None, &f).unwrap());
    }
    out
}

#[test]
fn reports_validate_against_schema() {
    let v = validator();
    for r in all_reports() {
        let j = r.to_value();
        let errs: Vec<String> = v.iter_errors(&j).map(|e| e.to_string()).collect();
        assert!(errs.is_empty(), "{}: {errs:?}", r.command);
    }
}

#[test]
fn schema_rejects_malformed_blowup() {
    let r = run(&Command::Blowup, Some(EX_62), &flags(None)).unwrap();
    let mut j = r.to_value();
    j["result"]["steps"][0]["d_max_after"] = Value::from("zero");
    assert!(!validator().is_valid(&j));
}

#[test]
fn text_round_trips() {
    for r in all_reports() {
        let t = r.emit(Format::Text);
        assert_eq!(from_text(&t).unwrap(), r.to_value(), "{}", r.command);
        let j: Value = serde_json::from_str(&r.emit(Format::Json)).unwrap();
        assert_eq!(j, r.to_value());
    }
}

#[test]
fn deterministic_bytes() {
    let a: Vec<String> = all_reports().iter().map(|r| r.emit(Format::Json)).collect();
    let b: Vec<String> = all_reports().iter().map(|r| r.emit(Format::Json)).collect();
    assert_eq!(a, b);
}

#[test]
fn example_without_check_echoes_scenario() {
    let r = run(&Command::Example("6.2".into()), None, &Flags::default()).unwrap();
    let expect: Value = serde_json::from_str(builtin("6.2").unwrap()).unwrap();
    assert_eq!(r.result["scenario"], expect);
    assert_eq!(r.status, Status::Ok);
    assert!(run(&Command::Example("9.9".into()), None, &Flags::default()).is_err());
}

#[test]
fn exit_codes() {
    assert_eq!(Status::Ok.exit_code(), 0);
    assert_eq!(Status::Indeterminate.exit_code(), 3);
    let e = run(&Command::Weights, Some("{"), &Flags::default()).unwrap_err();
    assert_eq!(nrgit_core::report::exit_code_for(&e), 2);
}

#[test]
fn grading_failure_names_generator_and_basis_element() {
    let mut v: serde_json::Value = serde_json::from_str(EX_62).unwrap();
    v["unipotent"]["generators"][0]["matrix_blocks"][2][2][1] = "1".into();
    let bad = v.to_string();
    assert_ne!(bad, EX_62);
    let e = run(&Command::Weights, Some(&bad), &Flags::default()).unwrap_err();
    let m = e.to_string();
    assert!(m.contains("generator 0") && m.contains("basis element"), "{m}");
}

#[test]
fn divisorial_center_does_not_lower_d_max() {
    // Δ^{≥1} is the line y1 = 0: blowing up a divisor changes nothing.
    let e = run(&Command::Blowup, Some(LADDER), &flags(None)).unwrap_err();
    assert!(matches!(&e, nrgit_core::Error::Audit(m) if m.contains("counterexample")), "{e}");
}
