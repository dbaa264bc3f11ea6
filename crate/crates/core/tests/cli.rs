use std::path::Path;
use std::process::{Command, Output};

use gaussbound::{fixtures, io, linalg};

fn gaussbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussbound")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

#[test]
fn construct_preset_matches_fixture() {
    let o = gaussbound(&["construct", "--preset", "example1"]);
    assert!(o.status.success());
    let built = io::covariance_from_json(&stdout(&o)).unwrap();
    let printed = io::read_covariance(Path::new(&fixture("example1.json"))).unwrap();
    assert!(linalg::max_abs(&(built.matrix() - printed.matrix())) <= 1e-12);
}

#[test]
fn construct_from_params_file() {
    let o = gaussbound(&["construct", "--params", &fixture("example3.params.json")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let g = io::covariance_from_json(&stdout(&o)).unwrap();
    assert!(linalg::max_abs(&(g.matrix() - fixtures::example_matrix(3).matrix())) <= 1e-12);
}

#[test]
fn classify_example_one() {
    let o = gaussbound(&["classify", "--input", &fixture("example1.json"), "--partition", "a=1,2", "b=3,4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["class"], "bound_entangled");
    assert_eq!(v["format_version"], 1);
    assert!((v["slack"].as_f64().unwrap() - 0.054886115).abs() < 1e-6);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["classify", "--input", &fixture("example2.json")][..],
        &["decompose", "--input", &fixture("example1.json")][..],
        &["synthesize", "--kappa", "3"][..],
    ] {
        assert_eq!(gaussbound(args).stdout, gaussbound(args).stdout, "{args:?}");
    }
}

#[test]
fn simulate_identity_circuit_on_vacuum() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("c.json");
    let input = dir.path().join("in.json");
    std::fs::write(&circuit, r#"{"format_version": 1, "n_modes": 2, "elements": []}"#).unwrap();
    std::fs::write(&input, io::covariance_to_json(&gaussbound::CovarianceMatrix::vacuum(2))).unwrap();
    let o = gaussbound(&["simulate", "--circuit", circuit.to_str().unwrap(), "--input", input.to_str().unwrap()]);
    assert!(o.status.success());
    let g = io::covariance_from_json(&stdout(&o)).unwrap();
    assert_eq!(g.matrix(), gaussbound::CovarianceMatrix::vacuum(2).matrix());
}

#[test]
fn synthesize_then_simulate_reproduces_example_one() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("c.json");
    let input = dir.path().join("in.json");
    let o = gaussbound(&[
        "synthesize",
        "--mesh",
        "generic",
        "--out",
        circuit.to_str().unwrap(),
        "--input-out",
        input.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = gaussbound(&["simulate", "--circuit", circuit.to_str().unwrap(), "--input", input.to_str().unwrap()]);
    let g = io::covariance_from_json(&stdout(&o)).unwrap();
    assert!(linalg::max_abs(&(g.matrix() - fixtures::example_matrix(1).matrix())) <= 1e-8);
}

#[test]
fn decompose_reports_spectrum_and_squeezers() {
    let o = gaussbound(&["decompose", "--input", &fixture("example1.json"), "--mode", "both"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let nu: Vec<f64> = v["williamson"]["nu"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in nu.iter().zip([1.0, 1.0, 3.0, 3.0]) {
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(v["euler"]["r"].as_array().unwrap().len(), 4);
    let only = gaussbound(&["decompose", "--input", &fixture("example1.json"), "--mode", "williamson"]);
    assert!(!stdout(&only).contains("euler"));
}

#[test]
fn sweep_writes_region_and_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let region = dir.path().join("region.csv");
    let boundary = dir.path().join("boundary.csv");
    let o = gaussbound(&[
        "--threads",
        "2",
        "sweep",
        "--kappa",
        "3:5:2",
        "--tau",
        "1:2:5",
        "--out",
        region.to_str().unwrap(),
        "--boundary",
        boundary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let region = std::fs::read_to_string(region).unwrap();
    assert_eq!(region.lines().next(), Some("kappa,tau,class,ppt_margin,slack"));
    assert_eq!(region.lines().count(), 11);
    assert!(region.contains("3,1.25,bound_entangled,"));
    let boundary = std::fs::read_to_string(boundary).unwrap();
    assert!(boundary.lines().nth(1).unwrap().starts_with("3,1.2807"));
}

#[test]
fn verify_paper_clean_run() {
    let o = gaussbound(&["verify-paper"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("9/9 suites pass"));
    let json = gaussbound(&["verify-paper", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["passed"], 9);
}

#[test]
fn verify_paper_names_corrupted_fixture() {
    let dir = tempfile::tempdir().unwrap();
    for k in 1..=4 {
        let name = format!("example{k}.json");
        let mut text = std::fs::read_to_string(fixture(&name)).unwrap();
        if k == 2 {
            // perturb one entry in the first data row
            let at = text.find("\"data\"").unwrap();
            let digit = at + text[at..].find(|c: char| c.is_ascii_digit()).unwrap();
            text.replace_range(digit..digit + 1, if &text[digit..digit + 1] == "9" { "1" } else { "9" });
        }
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    let o = gaussbound(&["verify-paper", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("example-2 reconstruction"));
}

#[test]
fn verify_paper_over_tight_tolerance_is_inconclusive() {
    let o = gaussbound(&["verify-paper", "--tol-sep", "1e-12"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    assert_eq!(gaussbound(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(gaussbound(&["classify"]).status.code(), Some(64));
    let e1 = fixture("example1.json");
    assert_eq!(gaussbound(&["classify", "--input", &e1, "--partition", "q=1,2", "b=3,4"]).status.code(), Some(64));
    assert_eq!(gaussbound(&["classify", "--input", &e1, "--partition", "a=1", "b=3,4"]).status.code(), Some(65));
    assert_eq!(gaussbound(&["classify", "--input", "/nonexistent/g.json"]).status.code(), Some(65));
    assert_eq!(gaussbound(&["classify", "--input", &e1, "--tol-sep", "-1"]).status.code(), Some(64));
    assert_eq!(gaussbound(&["sweep", "--kappa", "1:2"]).status.code(), Some(64));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n_modes": 1, "data": [[0.5, 0], [0, 0.5]]}"#).unwrap();
    assert_eq!(gaussbound(&["classify", "--input", bad.to_str().unwrap()]).status.code(), Some(65));
    assert_eq!(gaussbound(&["--help"]).status.code(), Some(0));
}
