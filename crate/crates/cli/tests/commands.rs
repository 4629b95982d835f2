use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(rel: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    root.join(rel).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blocklat")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn analyze_dihedral_regular_is_not_ob() {
    let out = run(&["analyze", &fixture("groups/d4_regular8.json"), "--assert", "ob=false"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["lattice_size"], 10);
    assert_eq!(v["preprimitive"], false);
}

#[test]
fn analyze_a5_on_15() {
    let out = run(&["analyze", &fixture("groups/a5_on15.json")]);
    let v = json(&out);
    assert_eq!(v["quasiprimitive"], true);
    assert_eq!(v["preprimitive"], false);
    assert_eq!(v["lattice"]["shapes"], serde_json::json!(["1^15", "3^5", "15^1"]));
}

#[test]
fn failing_assertion_exits_one() {
    let out = run(&["analyze", &fixture("groups/c6_regular.json"), "--assert", "pb=false"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("pb is true"));
    let ok = run(&["analyze", &fixture("groups/c6_regular.json"), "--assert", "pb=true", "--assert", "lattice.size=4"]);
    assert_eq!(code(&ok), 0);
}

#[test]
fn unknown_assertion_key_is_a_usage_error() {
    let out = run(&["analyze", &fixture("groups/c6_regular.json"), "--assert", "nosuch=1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn lattice_dot() {
    let out = run(&["lattice", &fixture("groups/c6_regular.json"), "--dot"]);
    assert_eq!(code(&out), 0);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("[label=").count(), 4);
    assert_eq!(dot.matches(" -> ").count(), 4);
}

#[test]
fn lattice_of_flag_group_has_six_nodes() {
    let out = run(&["lattice", &fixture("groups/flags12.json"), "--dot"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert_eq!(dot.matches("[label=").count(), 6);
    let v = json(&run(&["lattice", &fixture("groups/agl23_flags36.json")]));
    assert_eq!(v["size"], 5);
    assert_eq!(v["modular"], false);
}

#[test]
fn lattice_from_block_structure_file() {
    let v = json(&run(&["lattice", &fixture("obs/latin2.json")]));
    assert_eq!(v["size"], 5);
    assert_eq!(v["distributive"], false);
}

#[test]
fn scheme_of_latin_square() {
    let out = run(&["scheme", &fixture("obs/latin3.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["classes"], 5);
    assert_eq!(v["class_sizes"], serde_json::json!([9, 18, 18, 18, 18]));
    let m = run(&["scheme", &fixture("obs/latin3.json"), "--matrix"]);
    assert_eq!(String::from_utf8(m.stdout).unwrap().lines().count(), 9);
}

#[test]
fn scheme_rejects_non_obs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"degree": 4, "partitions": [[[0,1],[2,3]], [[0,2],[1],[3]]]}"#).unwrap();
    let out = run(&["scheme", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn gwp_build_orders() {
    for (file, order) in [("v_poset_c2", 32), ("chain_c2c2", 8), ("antichain_c2c3", 6), ("v_poset_c2c3c2", 72)] {
        let out = run(&["gwp", "build", &fixture(&format!("gwp/{file}.json"))]);
        assert_eq!(code(&out), 0, "{file}");
        let v = json(&out);
        assert_eq!(v["order"], order, "{file}");
        assert_eq!(v["expected_order"], order, "{file}");
    }
}

#[test]
fn gwp_check_sdp_reports_both_readings() {
    let out = run(&["gwp", "check-sdp", &fixture("gwp/chain_c2c2.json")]);
    assert_eq!(code(&out), 0);
    let node = &json(&out)["nodes"][0];
    assert_eq!(node["holds"], true);
    assert_eq!(node["acting_classes"], serde_json::json!([[0], [1]]));
    assert_eq!(node["literal_classes"], serde_json::json!([[0, 1]]));
    assert_eq!(node["literal_reading_agrees"], false);
}

#[test]
fn gwp_check_linext() {
    let out = run(&["gwp", "check-linext", &fixture("gwp/v_poset_c2.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["extension_orders"], serde_json::json!([128, 128]));
    assert_eq!(v["intersection_order"], 32);
}

#[test]
fn gwp_check_pb() {
    let out = run(&["gwp", "check-pb", &fixture("gwp/antichain_c2c2.json"), "--assert", "pb=true"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["obstruction"], serde_json::json!(["m1", "m2"]));
    let out = run(&["gwp", "check-pb", &fixture("gwp/antichain_s6s6.json"), "--assert", "pb=true"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn embed_s6_on_36() {
    let out = run(&["embed", &fixture("groups/s6_square36.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["component_orders"], serde_json::json!([720, 720]));
    assert_eq!(v["naive_verdict"], false);
}

#[test]
fn embed_refuses_non_ob_and_non_pb() {
    let out = run(&["embed", &fixture("groups/d4_regular8.json")]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not OB"));
    let out = run(&["embed", &fixture("groups/c2c2_regular.json")]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not PB"));
}

#[test]
fn survey_regular_order_eight() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let out = run(&["survey", &fixture("manifests/regular8.json"), "--jobs", "2", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["rows"][0]["groups"], 5);
    assert_eq!(v["rows"][0]["ob"], 4);
    assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 6);
}

#[test]
fn exit_codes_for_bad_input_and_caps() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&run(&["analyze", bad.to_str().unwrap()])), 2);
    std::fs::write(&bad, r#"{"degree": 3, "generators": [[0, 0, 1]]}"#).unwrap();
    assert_eq!(code(&run(&["analyze", bad.to_str().unwrap()])), 2);
    let capped = run(&["analyze", &fixture("groups/s6_square36.json"), "--cap-elements", "10"]);
    assert_eq!(code(&capped), 3);
}

#[test]
fn element_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_blocklat"))
        .args(["analyze", &fixture("groups/s6_square36.json")])
        .env("BLOCKLAT_CAP_ELEMENTS", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}
