use std::process::{Command, Output};

use degen::polyhom::GaussRat;
use degen::ratbar::RatbarPoint;
use serde_json::Value;

fn degen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degen")).args(args).env_remove("BD_DEFAULT_BACKEND").output().unwrap()
}

fn json_of(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

const H: &str = r#"{"degree":2,"P":"zw","Q":"z^2"}"#;

#[test]
fn classify_h() {
    let v = json_of(&degen(&["classify", "--map", H]));
    assert_eq!(v["class"], "Stable");
    let v = json_of(&degen(&["classify", "--map", H, "--n", "2"]));
    assert_eq!(v["class"], "Unstable");
}

#[test]
fn iterate_h() {
    let v = json_of(&degen(&["iterate", "--n", "2", "--map", H]));
    let f = RatbarPoint::<GaussRat>::from_json(&v, &[]).unwrap();
    let want = RatbarPoint::<GaussRat>::parse("z^3 w", "z^2 w^2", None, &[]).unwrap();
    assert!(f.proj_eq(&want));
}

#[test]
fn tau2_on_the_line() {
    let v = json_of(&degen(&["tau2", "--family", "line", "--a", "0", "--b", "1"]));
    assert_eq!(v["tau2"], serde_json::json!([1.0, 0.0]));
}

#[test]
fn exit_codes() {
    assert_eq!(degen(&["classify", "--map", r#"{"P":"zw"}"#]).status.code(), Some(1));
    assert_eq!(degen(&["classify", "--map", "{not json"]).status.code(), Some(1));
    let indet = r#"{"P":"w*(z-w)","Q":"0"}"#;
    assert_eq!(degen(&["iterate", "--map", indet]).status.code(), Some(2));
    assert_eq!(degen(&["tau2", "--family", "line", "--a", "0", "--b", "1", "--q", "3"]).status.code(), Some(2));
    let err = String::from_utf8(degen(&["classify", "--map", r#"{"P":"zw"}"#]).stderr).unwrap();
    assert!(err.contains("'Q'"), "{err}");
}

#[test]
fn emitted_maps_reparse() {
    for args in [
        vec!["iterate", "--n", "3", "--map", H],
        vec!["lambda", "--a", "1/3", "--n", "2"],
        vec!["family", "--kind", "P", "--q", "3", "--n", "4"],
        vec!["--backend", "float", "iterate", "--n", "2", "--map", r#"{"P":"z^2-w^2","Q":"z*w+w^2/2"}"#],
    ] {
        let v = json_of(&degen(&args));
        let back = match v["backend"].as_str() {
            Some("exact") => RatbarPoint::<GaussRat>::from_json(&v, &[]).unwrap().to_json(),
            _ => RatbarPoint::<num_complex::Complex64>::from_json(&v, &[]).unwrap().to_json(),
        };
        assert_eq!(back["P"], v["P"]);
        assert_eq!(back["Q"], v["Q"]);
    }
}

#[test]
fn measure_json_reparses() {
    let v = json_of(&degen(&["measure", "--map", H]));
    let m = degen::measure::AtomicMeasure::from_json(&v).unwrap();
    assert_eq!(m.to_json(), v);
}

#[test]
fn replay_is_byte_identical() {
    let dir = std::env::temp_dir().join(format!("degen-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("f.json");
    let o = out.to_str().unwrap();
    let args = ["counterexample", "--d", "3", "--a", "2", "--n", "2", "--out", o];
    assert!(degen(&args).status.success());
    let first = std::fs::read(&out).unwrap();
    let record: Value = serde_json::from_slice(&std::fs::read(dir.join("f.json.invocation.json")).unwrap()).unwrap();
    let argv: Vec<String> = record["argv"].as_array().unwrap().iter().map(|a| a.as_str().unwrap().to_string()).collect();
    let argv: Vec<&str> = argv[1..].iter().map(String::as_str).collect();
    assert!(degen(&argv).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), first);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn barycenter_of_two_poles_is_degenerate() {
    let v = json_of(&degen(&["barycenter", "--measure", r#"[{"v":[0,0,1],"mass":0.5},{"v":[0,0,-1],"mass":0.5}]"#]));
    assert_eq!(v["status"], "Degenerate");
}

#[test]
fn sampling_is_seeded() {
    let a = degen(&["sample", "--map", r#"{"P":"z^2-w^2","Q":"w^2"}"#, "--n-samples", "200", "--seed", "9"]);
    let b = degen(&["sample", "--map", r#"{"P":"z^2-w^2","Q":"w^2"}"#, "--n-samples", "200", "--seed", "9"]);
    assert_eq!(json_of(&a), json_of(&b));
}
