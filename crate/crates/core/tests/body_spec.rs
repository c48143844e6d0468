use bodyschema::body::{
    builtin, load_body_spec, load_body_spec_file, load_body_spec_unchecked, validate_model,
    TaxelKey, BUILTIN_NAMES,
};
use bodyschema::Error;
use serde_json::{json, Value};

fn arm() -> Value {
    serde_json::from_str(include_str!("../assets/planar_arm.json")).unwrap()
}

fn load(v: &Value) -> bodyschema::Result<bodyschema::body::BodySpec<f64>> {
    load_body_spec(&v.to_string())
}

#[test]
fn builtins_load_and_validate_cleanly() {
    for name in BUILTIN_NAMES {
        let b = builtin(name).unwrap();
        assert!(validate_model(&b.size, &b.shape).is_empty(), "{name}");
    }
    let arm = builtin("planar_arm").unwrap();
    assert_eq!(arm.shape.taxel_count(), 40);
    let t = arm.shape.taxel(&TaxelKey::new("forearm", 37)).unwrap();
    assert_eq!(t.local.to_array(), [237.5, -12.5, 0.0]);
    assert!(matches!(
        builtin("octopus"),
        Err(Error::Configuration(_) | Error::Lookup(_))
    ));
}

#[test]
fn parse_errors_name_the_offending_field() {
    let mut v = arm();
    v["joints"][1]["limits_rad"] = json!("wide");
    match load(&v) {
        Err(Error::Parse { field, .. }) => {
            assert!(field.contains("joints[1].limits_rad"), "{field}")
        }
        other => panic!("{other:?}"),
    }
    let mut v = arm();
    v["joints"][0]["stiffness"] = json!(3);
    assert!(matches!(load(&v), Err(Error::Parse { .. })));
}

#[test]
fn structural_defects_are_rejected() {
    let mut v = arm();
    v["joints"][1]["parent"] = json!("pelvis");
    assert!(matches!(load(&v), Err(Error::Structural(_))));

    let mut v = arm();
    v["joints"][0]["parent"] = json!("hand");
    assert!(matches!(load(&v), Err(Error::Structural(_))));

    let mut v = arm();
    v["links"].as_array_mut().unwrap().push(json!("tail"));
    assert!(matches!(load(&v), Err(Error::Structural(_))));
}

#[test]
fn invariant_violations_are_rejected() {
    let mut v = arm();
    v["joints"][0]["axis"] = json!([0.0, 0.0, 2.0]);
    assert!(matches!(load(&v), Err(Error::Invariant(_))));

    let mut v = arm();
    v["joints"][1]["limits_rad"] = json!([0.5, 2.0]);
    assert!(matches!(load(&v), Err(Error::Invariant(_))));

    let mut v = arm();
    v["joints"][1]["pre_transform"]["quat"] = json!([2.0, 0.0, 0.0, 0.0]);
    assert!(load(&v).is_err());
}

#[test]
fn joints_may_be_listed_in_any_order() {
    let mut v = arm();
    v["joints"].as_array_mut().unwrap().reverse();
    let b = load(&v).unwrap();
    let order: Vec<&str> = b.size.joints.iter().map(|j| j.id.as_str()).collect();
    assert_eq!(order, ["shoulder", "elbow", "wrist"]);
}

#[test]
fn unchecked_loading_reports_every_violation() {
    let mut v = arm();
    v["joints"][0]["axis"] = json!([0.0, 0.0, 2.0]);
    v["landmarks"]["ghost"] = json!({"link": "tail", "offset_mm": [0, 0, 0]});
    let b = load_body_spec_unchecked(&v.to_string()).unwrap();
    let report = validate_model(&b.size, &b.shape);
    assert_eq!(report.len(), 2);
    assert!(report.mentions("shoulder") && report.mentions("ghost"));
}

#[test]
fn explicit_taxels_and_file_loading() {
    let mut v = arm();
    v["skin_patches"][0] = json!({
        "link": "forearm",
        "taxels": [{"id": 4, "xyz_mm": [10, 0, 0]}, {"id": 9, "xyz_mm": [200, 5, 0]}],
        "segment": {"proximal": "elbow", "distal": "wrist"}
    });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("arm.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let b = load_body_spec_file(&path).unwrap();
    assert_eq!(b.shape.taxel_count(), 2);
    assert!(b.shape.taxel(&TaxelKey::new("forearm", 9)).is_some());
    assert!(load_body_spec_file(dir.path().join("missing.json"))
        .unwrap_err()
        .is_io());
}
