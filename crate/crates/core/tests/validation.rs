mod common;

use common::PAPER_JSON;
use serde_json::{json, Value};
use solidarity::model::ViolationKind;
use solidarity::{Instance, LoadError};

fn paper_value() -> Value {
    serde_json::from_str(PAPER_JSON).unwrap()
}

fn load(v: &Value) -> Result<Instance, LoadError> {
    Instance::from_json_str(&v.to_string())
}

fn violations(v: &Value) -> Vec<(ViolationKind, String)> {
    match load(v) {
        Err(LoadError::Invalid(errs)) => errs.0.into_iter().map(|e| (e.kind, e.path)).collect(),
        other => panic!("expected validation errors, got {other:?}"),
    }
}

#[test]
fn bundled_instance_is_valid() {
    let inst = load(&paper_value()).unwrap();
    assert_eq!(inst.node_count(), 3);
    assert_eq!(inst.edge_count(), 3);
    assert_eq!(inst.scenarios.len(), 4);
    assert_eq!(inst.alpha, 0.25);
}

#[test]
fn document_round_trip() {
    let inst = load(&paper_value()).unwrap();
    let text = serde_json::to_string(&inst.to_document()).unwrap();
    assert_eq!(Instance::from_json_str(&text).unwrap(), inst);
}

#[test]
fn three_halves_of_probability() {
    let mut v = paper_value();
    let scen = v["scenarios"].as_array_mut().unwrap();
    scen.truncate(3);
    for s in scen.iter_mut() {
        s["probability"] = json!(0.5);
    }
    let found = violations(&v);
    assert!(found.contains(&(
        ViolationKind::ProbabilitySum,
        "scenarios[*].probability".into()
    )));
}

#[test]
fn probabilities_summing_above_one() {
    let mut v = paper_value();
    for s in v["scenarios"].as_array_mut().unwrap() {
        s["probability"] = json!(0.3);
    }
    assert_eq!(
        violations(&v),
        vec![(
            ViolationKind::ProbabilitySum,
            "scenarios[*].probability".into()
        )]
    );
}

#[test]
fn scenario_capacity_above_base() {
    let mut v = paper_value();
    v["scenarios"][0]["cap_pos"][0] = json!(20);
    assert_eq!(
        violations(&v),
        vec![(
            ViolationKind::CapacityOrder,
            "scenarios[0].cap_pos[0]".into()
        )]
    );
}

#[test]
fn rising_prices_and_empty_steps() {
    let mut v = paper_value();
    v["nodes"][1]["demand"][1]["price"] = json!(20);
    v["nodes"][2]["demand"][0]["quantity"] = json!(0);
    let kinds: Vec<_> = violations(&v).into_iter().map(|(k, _)| k).collect();
    assert_eq!(
        kinds,
        vec![ViolationKind::DemandCurve, ViolationKind::DemandCurve]
    );
}

#[test]
fn dangling_edge() {
    let mut v = paper_value();
    v["edges"][2]["to"] = json!(4);
    let found = violations(&v);
    assert!(found
        .iter()
        .any(|(k, p)| *k == ViolationKind::Topology && p == "edges[2].to"));
}

#[test]
fn wrong_vector_length() {
    let mut v = paper_value();
    v["scenarios"][1]["resources"] = json!([1, 2]);
    let found = violations(&v);
    assert!(found
        .iter()
        .any(|(k, p)| *k == ViolationKind::Dimension && p == "scenarios[1].resources"));
}

#[test]
fn every_problem_is_reported_at_once() {
    let mut v = paper_value();
    v["scenarios"][0]["cap_pos"][0] = json!(20);
    v["scenarios"][1]["probability"] = json!(0.5);
    v["nodes"][0]["demand"][2]["price"] = json!(30);
    let kinds: Vec<_> = violations(&v).into_iter().map(|(k, _)| k).collect();
    assert!(kinds.contains(&ViolationKind::CapacityOrder));
    assert!(kinds.contains(&ViolationKind::ProbabilitySum));
    assert!(kinds.contains(&ViolationKind::DemandCurve));
}

#[test]
fn alpha_outside_unit_interval() {
    let mut v = paper_value();
    v["alpha"] = json!(0.0);
    assert!(!violations(&v).is_empty());
}

#[test]
fn malformed_text_is_a_parse_error() {
    for text in ["", "{", "[]", "{\"nodes\": 3}", "null"] {
        assert!(
            matches!(Instance::from_json_str(text), Err(LoadError::Parse(_))),
            "{text:?}"
        );
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let mut v = paper_value();
    v["colour"] = json!("blue");
    assert!(matches!(load(&v), Err(LoadError::Parse(_))));
}
