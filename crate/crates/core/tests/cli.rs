use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

use oper_calc::funfield::RatFun;
use oper_calc::monoidquot::MonoidElt;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data(name: &str) -> String {
    root().join("data").join(name).to_string_lossy().into_owned()
}

fn opercalc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_opercalc")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("report is JSON")
}

fn load(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Validator for `schemas/<file>` or a definition inside it, with the
/// sibling schema files registered for `$ref` resolution.
fn validator(file: &str, def: Option<&str>) -> jsonschema::Validator {
    let dir = root().join("schemas");
    let mut options = jsonschema::options();
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let resource = jsonschema::Resource::from_contents(load(path)).unwrap();
        options = options.with_resource(name, resource);
    }
    let schema = match def {
        Some(d) => serde_json::json!({ "$ref": format!("{file}#/$defs/{d}") }),
        None => serde_json::json!({ "$ref": file }),
    };
    options.build(&schema).expect("schema compiles")
}

fn assert_valid(v: &jsonschema::Validator, x: &Value) {
    let errors: Vec<String> = v.iter_errors(x).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?} in {x}");
}

fn no_floats(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_i64() || n.is_u64(),
        Value::Array(a) => a.iter().all(no_floats),
        Value::Object(o) => o.values().all(no_floats),
        _ => true,
    }
}

#[test]
fn check_system_compatible() {
    let (code, out, _) = opercalc(&["check-system", "-i", &data("sp4_diag.json")]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["compatible"], Value::Bool(true));
}

#[test]
fn check_system_violation_exits_2() {
    let (code, out, _) = opercalc(&["check-system", "-i", &data("sp4_bad.json")]);
    assert_eq!(code, 2);
    let r = json(&out);
    assert_eq!(r["compatible"], Value::Bool(false));
    assert!(r["violation"].is_array());
}

#[test]
fn connectivity_sp4() {
    let (code, out, _) = opercalc(&["connectivity", "-i", &data("sp4_trivial.json"), "-d", "5"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!((r["N"].as_i64(), r["r"].as_i64(), r["bound"].as_i64()), (Some(23), Some(11), Some(12)));
}

#[test]
fn bar_homology_z2_regular() {
    let (code, out, _) = opercalc(&["bar-homology", "-i", &data("z2_regular.json"), "-N", "5"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["betti"], serde_json::json!([1, 0, 0, 0]));
}

#[test]
fn bar_homology_point_over_f2() {
    let (code, out, _) = opercalc(&["bar-homology", "-i", &data("z2_point.json"), "-N", "4", "--field", "F2"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["betti"], serde_json::json!([1, 1, 1]));
}

#[test]
fn input_errors_exit_1() {
    assert_eq!(opercalc(&["check-system", "-i", "/nonexistent.json"]).0, 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"rank\": 2, \"A\": [[\"1/0\"]]}").unwrap();
    let (code, _, err) = opercalc(&["check-system", "-i", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
    std::fs::write(&bad, "{\"preset\": \"nope\"}").unwrap();
    assert_eq!(opercalc(&["bar-homology", "-i", bad.to_str().unwrap(), "-N", "3"]).0, 1);
    assert_eq!(opercalc(&["bar-homology", "-i", &data("z2_regular.json"), "-N", "3", "--field", "F4"]).0, 1);
}

#[test]
fn degenerate_flag_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flag.json");
    std::fs::write(&input, r#"{"system": {"rank": 2, "A": [["0","0"],["0","0"]]}, "line": {"d": 0, "g": ["1","0"]}}"#)
        .unwrap();
    let (code, out, _) = opercalc(&["complete-flag", "-i", input.to_str().unwrap()]);
    assert_eq!(code, 2);
    let r = json(&out);
    assert_eq!(r["verified"], Value::Bool(false));
    assert_eq!(r["detail"]["degenerate_flag"]["step"], 1);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let args = ["tsen-solve", "-i", &data("xy_z2.json"), "-e", "2", "--seed", "3"];
    let (_, stdout, _) = opercalc(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["-o", path.to_str().unwrap()]);
    let (code, empty, _) = opercalc(&with_file);
    assert_eq!(code, 0);
    assert!(empty.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
}

const JOBS: &[(&[&str], &str)] = &[
    (&["check-system", "-i", "sp4_diag.json"], "check_system"),
    (&["gen-equations", "-i", "sp4_trivial.json", "-d", "1"], "gen_equations"),
    (&["complete-flag", "-i", "flag_airy.json"], "complete_flag"),
    (&["complete-flag", "-i", "flag_excluded.json"], "complete_flag"),
    (&["find-oper", "-i", "sp4_trivial.json", "-d", "0", "--tries", "4"], "find_oper"),
    (&["connectivity", "-i", "sp4_trivial.json", "-d", "7"], "connectivity"),
    (&["witness", "-i", "witness.json"], "witness"),
    (&["witness", "-i", "witness_family.json"], "witness"),
    (&["bar-homology", "-i", "naturals.json", "-N", "3"], "bar_homology"),
    (&["tsen-count", "-i", "conic.json", "-e", "3"], "tsen_count"),
    (&["tsen-solve", "-i", "conic.json", "-e", "1", "--seed", "7"], "tsen_solve"),
    (&["g2-report"], "g2_report"),
];

fn resolve(args: &[&str]) -> Vec<String> {
    let mut out: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    if let Some(i) = out.iter().position(|a| a == "-i") {
        out[i + 1] = data(&out[i + 1]);
    }
    out
}

#[test]
fn reports_are_deterministic() {
    for (args, _) in JOBS {
        let args = resolve(args);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = opercalc(&args);
        let b = opercalc(&args);
        assert_eq!(a.0, 0, "{args:?}: {}", a.2);
        assert_eq!(a.1, b.1, "{args:?}");
    }
}

#[test]
fn reports_validate_and_round_trip() {
    for (args, def) in JOBS {
        let args = resolve(args);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (_, out, _) = opercalc(&args);
        let report = json(&out);
        assert_valid(&validator("reports.json", Some(def)), &report);
        assert!(no_floats(&report), "{args:?}");
        let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
        assert_eq!(again, out, "{args:?}");
    }
}

#[test]
fn sample_inputs_validate() {
    let cases = [
        ("local_system.json", &["sp4_diag.json", "sp4_bad.json", "sp4_trivial.json"][..]),
        ("flag_input.json", &["flag_airy.json", "flag_excluded.json"]),
        ("witness_input.json", &["witness.json", "witness_family.json"]),
        ("monoid_action.json", &["z2_regular.json", "z2_point.json", "naturals.json"]),
        ("projective_system.json", &["conic.json", "xy_z2.json"]),
    ];
    for (schema, files) in cases {
        let v = validator(schema, None);
        for f in files {
            assert_valid(&v, &load(root().join("data").join(f)));
        }
    }
}

#[test]
fn witness_report_reparses_exactly() {
    let (code, out, _) = opercalc(&["witness", "-i", &data("witness.json")]);
    assert_eq!(code, 0);
    let r = json(&out);
    let m1: MonoidElt = serde_json::from_value(r["m1"].clone()).unwrap();
    let m2: MonoidElt = serde_json::from_value(r["m2"].clone()).unwrap();
    let input = load(root().join("data/witness.json"));
    let entries = |side: &str| -> Vec<RatFun> { serde_json::from_value(input[side]["g"].clone()).unwrap() };
    let (f, g) = (entries("f"), entries("g"));
    for (fi, gi) in f.iter().zip(&g) {
        assert_eq!(m1.value() * fi, m2.value() * gi);
    }
}

#[test]
fn seed_changes_are_reproducible() {
    for seed in ["0", "1", "2"] {
        let args = ["tsen-solve", "-i", &data("conic.json"), "-e", "1", "--seed", seed];
        let (a, b) = (opercalc(&args), opercalc(&args));
        assert_eq!(a.1, b.1);
        assert_eq!(json(&a.1)["found"], Value::Bool(true));
    }
}
