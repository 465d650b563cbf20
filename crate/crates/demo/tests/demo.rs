use serde_json::Value;

use okounkov_demo::{body_report, convergence_report, dh_report};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn diagonal_flag_gives_the_trapezoid() {
    let v = parse(&body_report(1, 2, "diagonal", 3));
    assert_eq!(v["ok"], true, "{v}");
    let mut verts: Vec<String> = v["vertices"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect();
    verts.sort();
    assert_eq!(verts, ["(0, 0)", "(0, 3)", "(1, 0)", "(1, 1)"]);
    assert_eq!(v["normalized_volume"], "4");
    assert_eq!(v["self_intersection"], "4");
    assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
}

#[test]
fn toric_flag_gives_the_rectangle() {
    let v = parse(&body_report(2, 3, "toric", 2));
    assert_eq!(v["ok"], true);
    assert_eq!(v["volume"], "6");
    // (2k+1)(3k+1) sections at k = 2
    assert_eq!(v["sections"], 35);
}

#[test]
fn bad_inputs_are_reported() {
    assert_eq!(parse(&body_report(1, 1, "sideways", 1))["ok"], false);
    assert_eq!(parse(&body_report(9, 1, "toric", 1))["ok"], false);
    assert_eq!(parse(&dh_report("not json"))["ok"], false);
    assert_eq!(parse(&dh_report("[]"))["ok"], false);
}

#[test]
fn dh_of_a_linear_function() {
    let v = parse(&dh_report(r#"[{"a": ["1", "1"], "b": "0"}]"#));
    assert_eq!(v["ok"], true, "{v}");
    assert_eq!(v["mass"], "1");
    // E = 2! * integral of (x + y) over the unit square
    assert_eq!(v["energy"], "2");
}

#[test]
fn convergence_rows_are_powers_of_two() {
    let v = parse(&convergence_report(1, 1, r#"[{"a": ["-1", "0"], "b": "1"}, {"a": ["0", "-1"], "b": "1"}]"#, 8));
    assert_eq!(v["ok"], true, "{v}");
    let ks: Vec<u64> = v["ks"].as_array().unwrap().iter().map(|k| k.as_u64().unwrap()).collect();
    assert_eq!(ks, [1, 2, 4, 8]);
    let d: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|r| r["approx"].as_f64().unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] <= w[0]));
}
