use std::path::Path;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn degcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degcalc")).args(args).env_remove("DEGCALC_MAX_G").output().expect("run degcalc")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn assert_valid(schema_file: &str, out: &Output) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema_file);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    let instance: Value = serde_json::from_slice(&out.stdout).expect("json output");
    let msgs: Vec<String> = match compiled.validate(&instance) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "{schema_file}: {msgs:#?}");
}

#[test]
fn pairs_text_and_conventions() {
    let out = degcalc(&["pairs", "--g", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "(a^3) = 4\n(a*b) = -4\n(c) = 4\n");
    let out = degcalc(&["pairs", "--g", "2", "--convention", "pow-g"]);
    assert!(stdout(&out).starts_with("(a^3) = 4\n"));
}

#[test]
fn pairs_csv_mirror() {
    let out = degcalc(&["pairs", "--g", "2", "--format", "csv"]);
    assert_eq!(stdout(&out), "g,H,a,b,c,value\n2,0,3,0,0,4\n2,0,1,1,0,-4\n2,0,0,0,1,4\n");
}

#[test]
fn pairs_json_matches_schema() {
    for args in [&["pairs", "--g", "3", "--format", "json"][..], &["pairs", "--g", "2", "--hecke", "--format", "json"]] {
        let out = degcalc(args);
        assert!(out.status.success());
        assert_valid("pairing-table.schema.json", &out);
    }
}

#[test]
fn genus_out_of_range() {
    let out = degcalc(&["pairs", "--g", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("genus 1"));
    let out = degcalc(&["pairs", "--g", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let raised = Command::new(env!("CARGO_BIN_EXE_degcalc"))
        .args(["pairs", "--g", "9"])
        .env("DEGCALC_MAX_G", "9")
        .output()
        .unwrap();
    assert!(raised.status.success());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(degcalc(&["pairs"]).status.code(), Some(2));
    assert_eq!(degcalc(&["degrees", "--type", "4", "--n", "1", "--g-range", "2..3"]).status.code(), Some(2));
    assert_eq!(degcalc(&["degrees", "--type", "2", "--nu", "5", "--g-range", "2..3"]).status.code(), Some(2));
    assert_eq!(degcalc(&["degrees", "--type", "3", "--n", "3", "--g-range", "5..5"]).status.code(), Some(2));
    assert_eq!(degcalc(&["degrees", "--type", "2", "--nu", "3", "--g-range", "5..2"]).status.code(), Some(2));
}

#[test]
fn degree_tables() {
    let out = degcalc(&["degrees", "--type", "3", "--n", "1", "--g-range", "3..3"]);
    assert!(stdout(&out).starts_with("g=3\t1\t"));
    let out = degcalc(&["degrees", "--type", "2", "--nu", "4", "--g-range", "4..6", "--format", "json"]);
    assert_valid("degrees-table.schema.json", &out);
    let rows: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    let degrees: Vec<&str> = rows.iter().map(|r| r["degree"].as_str().unwrap()).collect();
    assert_eq!(degrees, ["6", "256", "28640"]);
}

#[test]
fn bn_and_castelnuovo() {
    let out = degcalc(&["bn", "--g", "4", "--r", "1", "--d", "3"]);
    assert!(stdout(&out).contains("rho = 0\n"));
    let out = degcalc(&["bn", "--g", "3", "--type3", "--n", "1", "--format", "json"]);
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["expected_codim"], 6);
    assert_eq!(rec["expected_dim"], 0);
    assert_eq!(stdout(&degcalc(&["castelnuovo", "--g", "6", "--r", "1", "--d", "4"])), "5\n");
    assert_eq!(stdout(&degcalc(&["castelnuovo", "--g", "4", "--r", "1", "--d", "3"])), "2\n");
    assert_eq!(degcalc(&["castelnuovo", "--g", "4", "--r", "1", "--d", "4"]).status.code(), Some(2));
}

#[test]
fn calibrate_report() {
    let out = degcalc(&["calibrate", "--format", "json"]);
    assert!(out.status.success());
    assert_valid("calibration-report.schema.json", &out);
    let text = stdout(&degcalc(&["calibrate"]));
    assert!(text.contains("surviving nu = 4 class: tabulated\n"));
    assert!(text.contains("free parameters remaining: none\n"));
}

#[test]
fn calibrate_with_unreachable_target_fails() {
    let dir = std::env::temp_dir().join(format!("degcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("targets.json");
    std::fs::write(&file, r#"[{"locus":"type3","n":1,"g":3,"expected":"7"}]"#).unwrap();
    let out = degcalc(&["calibrate", "--targets", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("no configuration reproduces all targets"));
    std::fs::write(&file, "[]").unwrap();
    assert_eq!(degcalc(&["calibrate", "--targets", file.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_json_matches_schema() {
    let out = degcalc(&["verify", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_valid("verify-report.schema.json", &out);
    let entries: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    let row = entries.iter().find(|e| e["check_name"] == "type2-nu3-degree-g3").unwrap();
    assert_eq!(row["status"], "pass");
}

#[test]
fn output_is_deterministic() {
    let a = degcalc(&["verify", "--json"]);
    let b = degcalc(&["verify", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}
