use epr_core::scenario_io::{parse_document, parse_results};
use epr_core::{
    correlation_distinguishable, correlation_identical, emit_results, parse_scenario, Error, Format, Statistics,
};

const DESK: &str = include_str!("../../../scenarios/desk.json");
const BOOSTED: &str = include_str!("../../../scenarios/boosted.json");
const FULL_SPACE: &str = include_str!("../../../scenarios/full_space.json");
const FERMION_GRID: &str = include_str!("../../../scenarios/fermion_grid.json");

const SPIN_ONE: &str = r#"{
  "schema_version": "1",
  "state": {
    "kind": "custom", "dimension": 1, "masses": [1.0, 2.0], "spin": 1.0,
    "terms": [
      { "amplitude": [0.6, 0.0], "alpha": { "center": [-2.0], "width": [0.5] },
        "beta": { "center": [2.0], "width": [0.5] }, "m_alpha": 1.0, "m_beta": -1.0 },
      { "amplitude": [0.0, 0.8], "alpha": { "center": [-2.5], "width": [0.4] },
        "beta": { "center": [1.5], "width": [0.7] }, "m_alpha": 0.0, "m_beta": 0.0 }
    ]
  },
  "observers": {
    "a": { "velocity": [0.0], "time": 0.0, "region": { "kind": "box", "lo": [-4.0], "hi": [-1.0] },
           "direction": { "theta": 0.3, "phi": 1.0 } },
    "b": { "velocity": [0.0], "time": 0.0, "region": { "kind": "box", "lo": [1.0], "hi": [4.0] },
           "direction": { "theta": 1.2, "phi": 0.0 } }
  },
  "backend": { "kind": "analytic" }
}"#;

#[test]
fn shipped_scenarios_parse_and_round_trip() {
    for text in [DESK, BOOSTED, FULL_SPACE, FERMION_GRID] {
        let doc = parse_document(text).unwrap();
        let again = parse_document(&doc.to_json()).unwrap();
        assert_eq!(doc, again);
        assert_eq!(doc.to_json(), again.to_json());
    }
}

#[test]
fn desk_document_reports_the_desk_value() {
    let sc = parse_scenario(DESK).unwrap();
    assert_eq!((sc.observer_a.time, sc.observer_b.time), (0.0, 0.0));
    let r = correlation_distinguishable(&sc).unwrap();
    assert!((r.value + 0.23874).abs() < 1e-5);
    let boosted = correlation_distinguishable(&parse_scenario(BOOSTED).unwrap()).unwrap();
    assert!((boosted.value + 0.12215).abs() < 1e-5);
}

#[test]
fn identical_document_is_antisymmetrized() {
    let sc = parse_scenario(FERMION_GRID).unwrap();
    assert_eq!(sc.state.statistics(), Statistics::Fermion);
    let r = correlation_identical(&sc).unwrap();
    assert!(r.diagnostics.disjoint_form.is_some());
    assert!((r.value - r.diagnostics.disjoint_form.unwrap()).abs() < 1e-10);
}

#[test]
fn spin_one_table_layout() {
    let r = correlation_distinguishable(&parse_scenario(SPIN_ONE).unwrap()).unwrap();
    let csv = emit_results(&r, Format::Csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "lambda_a,lambda_b,probability");
    assert_eq!(lines.len() - 1, 10);
    assert!(lines[1].starts_with("1,1,"));
    assert!(lines[9].starts_with("-1,-1,"));
    assert!(lines[10].starts_with("correlation,,"));
}

#[test]
fn results_round_trip_and_repeat() {
    for text in [DESK, SPIN_ONE, FULL_SPACE] {
        let sc = parse_scenario(text).unwrap();
        let first = emit_results(&correlation_distinguishable(&sc).unwrap(), Format::Json);
        let second = emit_results(&correlation_distinguishable(&sc).unwrap(), Format::Json);
        assert_eq!(first, second);
        let back = parse_results(&first).unwrap();
        assert_eq!(emit_results(&back, Format::Json), first);
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let text = DESK.replacen(
        "\"schema_version\": \"1\",",
        "\"schema_version\": \"1\", \"colour\": \"red\",",
        1,
    );
    match parse_scenario(&text) {
        Err(Error::Document { message, .. }) => assert!(message.contains("colour"), "{message}"),
        other => panic!("expected a document error, got {other:?}"),
    }
}

#[test]
fn invalid_values_name_their_field() {
    let cases = [
        (
            "\"lo\": [1.0], \"hi\": [4.0]",
            "\"lo\": [4.0], \"hi\": [1.0]",
            "observers.b.region",
        ),
        ("\"width\": [0.5] }\n", "\"width\": [-0.5] }\n", "state.chi"),
    ];
    for (from, to, field) in cases {
        assert!(DESK.contains(from), "{from}");
        let err = parse_scenario(&DESK.replacen(from, to, 1)).unwrap_err().to_string();
        assert!(err.contains(field), "{err}");
    }
    let big_m = SPIN_ONE.replacen("\"m_alpha\": 1.0", "\"m_alpha\": 2.0", 1);
    let err = parse_scenario(&big_m).unwrap_err().to_string();
    assert!(err.contains("state.terms[0].m_alpha"), "{err}");
}
