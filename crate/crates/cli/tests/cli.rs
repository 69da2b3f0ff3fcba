use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use twistcohom::BettiReport;
use twistcohom_cli::{run, spectrum_csv, RunConfig, Verb, OUT_DIR_ENV};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn cli(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistcohom"))
        .args(args)
        .env(OUT_DIR_ENV, out)
        .output()
        .expect("binary runs")
}

fn summary(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is one JSON record")
}

fn report_at(path: &Value) -> BettiReport {
    BettiReport::from_json(&std::fs::read_to_string(path.as_str().unwrap()).unwrap()).unwrap()
}

fn load(name: &str, overrides: &[&str]) -> RunConfig {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    RunConfig::load(&config_path(name), &o).unwrap()
}

/// Closed-form dimensions for the suspension of `A`: with `lambda = (t + sqrt(t^2 - 4)) / 2`
/// the basic complex splits into monomials `e^{2 pi i n t} e^J`, each exact unless
/// `2 pi n = 0` and `c + |J| ln(lambda) = 0`, in which case it adds one class in degrees `|J|` and `|J| + 1`.
fn multiplier_dims(trace: f64, c: f64) -> Vec<usize> {
    let mu = ((trace + (trace * trace - 4.0).sqrt()) / 2.0).ln();
    let mut dims = vec![0; 3];
    for (size, weight) in [(0, 0.0), (1, mu)] {
        let zeros = (-8..=8)
            .filter(|&n| (2.0 * PI * n as f64).hypot(weight + c) < 1e-9)
            .count();
        dims[size] += zeros;
        dims[size + 1] += zeros;
    }
    dims
}

#[test]
fn minimal_torus_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(
        dir.path(),
        &["betti", config_path("minimal_torus.json").to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&o);
    assert_eq!(s["dims"], serde_json::json!([1, 2, 1]));
    assert!(s["json"].as_str().unwrap().starts_with(dir.path().to_str().unwrap()));
    assert!(report_at(&s["json"]).passed);
}

#[test]
fn unknown_backend_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(
        dir.path(),
        &[
            "betti",
            config_path("minimal_torus.json").to_str().unwrap(),
            "--set",
            "backend=sphere",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let s = summary(&o);
    assert_eq!(s["error"]["kind"], "validation");
    assert!(s["error"]["message"].as_str().unwrap().contains("sphere"));
    let o = cli(
        dir.path(),
        &["scan", config_path("minimal_torus.json").to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(summary(&o)["error"]["kind"], "validation");
}

#[test]
fn model_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(
        dir.path(),
        &[
            "betti",
            config_path("t3a_verify.json").to_str().unwrap(),
            "--set",
            "mapping_torus.matrix=[[1,1],[0,1]]",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(summary(&o)["error"]["kind"], "model");
}

#[test]
fn golden_file_matches_the_multiplier_oracle() {
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(config_path("t3a_golden_dims.json")).unwrap()).unwrap();
    let kappa = -((3.0 + 5f64.sqrt()) / 2.0).ln();
    for e in golden["entries"].as_array().unwrap() {
        let c = e["twist"].as_f64().unwrap_or(kappa);
        let dims: Vec<usize> = serde_json::from_value(e["dims"].clone()).unwrap();
        assert_eq!(dims, multiplier_dims(3.0, c), "c = {c}");
    }
}

#[test]
fn golden_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(dir.path(), &["scan", config_path("t3a_golden.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report_at(&summary(&o)["json"]);
    assert_eq!(r.golden.len(), 3);
    assert!(r.golden.iter().all(|g| g.passed));
}

#[test]
fn wrong_golden_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let golden = dir.path().join("wrong.json");
    std::fs::write(&golden, r#"{"entries": [{"twist": 1.0, "dims": [0, 1, 1]}]}"#).unwrap();
    let o = cli(
        dir.path(),
        &[
            "scan",
            config_path("t3a_golden.json").to_str().unwrap(),
            "--set",
            &format!("golden={}", golden.display()),
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(summary(&o)["failed_checks"], serde_json::json!(["dims at c = 1.0"]));
}

#[test]
fn flat_verify_is_exact() {
    let r = run(Verb::Verify, &load("verify_flat.json", &[])).unwrap();
    assert!(r.passed);
    assert_eq!(r.dims, vec![0, 0, 0]);
    let names: Vec<&str> = r.residuals.iter().map(|x| x.name.as_str()).collect();
    for expected in [
        "d_squared",
        "adjointness",
        "dirac_squared",
        "leibniz",
        "interior_nabla",
        "cartan",
        "weitzenbock",
        "bochner",
        "curvature_twist",
    ] {
        assert!(names.contains(&expected), "{expected} missing");
    }
    for x in &r.residuals {
        assert!(x.value <= 1e-12, "{} = {}", x.name, x.value);
    }
}

#[test]
fn potential_verify_pads_and_passes() {
    let r = run(Verb::Verify, &load("verify_potential.json", &[])).unwrap();
    assert!(r.passed);
    let w = r.residuals.iter().find(|x| x.name == "weitzenbock").unwrap();
    assert!(w.value <= 1e-8 && w.tolerance == 1e-8);
    assert!(r.notes.iter().any(|n| n.contains("cutoff raised")));
    assert!(r.notes.iter().any(|n| n.contains("Cartan")));
}

#[test]
fn mapping_torus_verify() {
    let r = run(Verb::Verify, &load("t3a_verify.json", &[])).unwrap();
    assert!(r.passed);
    let b = r.residuals.iter().find(|x| x.name == "bochner").unwrap();
    assert!(b.value <= 1e-8);
    let gate = r.gates.iter().find(|g| g.name == "bochner_vanishing").unwrap();
    assert!(!gate.verdict);
    assert!(gate.values["min_eigenvalue_degree_1"] < 0.0);
}

#[test]
fn scan_flags_only_the_leaf_rate() {
    let r = run(Verb::Scan, &load("t3a_scan.json", &[])).unwrap();
    assert_eq!(r.scan.len(), 22);
    let flagged: Vec<f64> = r.scan.iter().filter(|p| p.flagged).map(|p| p.parameter).collect();
    assert_eq!(flagged.len(), 1);
    assert!((flagged[0] + ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
    assert!(r.gates[0].detail.contains("only at c = kappa"));
}

#[test]
fn gates_and_lcs() {
    let so3 = run(Verb::Gate, &load("so3_gate.json", &[])).unwrap();
    assert!(so3.gates[0].verdict);
    assert_eq!(so3.notes.iter().filter(|n| n.ends_with("= 1/4")).count(), 3);
    let half = run(Verb::Gate, &load("so3_gate.json", &["lie_gate.scale=\"1/2\""])).unwrap();
    assert_eq!(half.notes.iter().filter(|n| n.ends_with("= 1/16")).count(), 3);
    let flat = run(Verb::Gate, &load("so3_gate.json", &["lie_gate.algebra=abelian3"])).unwrap();
    assert!(!flat.gates[0].verdict);
    let hyperbolic = run(Verb::Gate, &load("t3a_verify.json", &[])).unwrap();
    assert!(!hyperbolic.gates[0].verdict);
    assert!(hyperbolic.passed);

    assert!(run(Verb::Lcs, &load("lcs_conformal.json", &[])).unwrap().passed);
    let standard = load(
        "lcs_conformal.json",
        &["lcs_check.form=standard", "lcs_check.potential=[]"],
    );
    assert!(run(Verb::Lcs, &standard).unwrap().passed);
    let wrong = load(
        "lcs_conformal.json",
        &[
            "lcs_check.form=standard",
            "lcs_check.potential=[]",
            "lcs_check.theta=[1,0,0,0]",
        ],
    );
    let r = run(Verb::Lcs, &wrong).unwrap();
    assert!(!r.passed && !r.gates[0].verdict);
}

#[test]
fn simplicial_runs() {
    assert_eq!(
        run(Verb::Betti, &load("torus7_ln2.json", &[])).unwrap().dims,
        vec![0, 0, 0]
    );
    assert_eq!(
        run(Verb::Betti, &load("torus7_ln2.json", &["simplicial.cocycle=null"]))
            .unwrap()
            .dims,
        vec![1, 2, 1]
    );
    let rp3 = run(Verb::Betti, &load("rp3.json", &[])).unwrap();
    assert_eq!(rp3.dims, vec![1, 0, 0, 1]);
    assert_eq!(spectrum_csv(&rp3).unwrap(), "mode,degree,index,eigenvalue\n");
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let path = config_path("verify_flat.json");
    let ra = summary(&cli(a.path(), &["verify", path.to_str().unwrap()]));
    let rb = summary(&cli(b.path(), &["verify", path.to_str().unwrap()]));
    for key in ["json", "csv"] {
        let x = std::fs::read(ra[key].as_str().unwrap()).unwrap();
        let y = std::fs::read(rb[key].as_str().unwrap()).unwrap();
        assert_eq!(x, y, "{key} differs");
    }
    let timed = run(Verb::Betti, &load("minimal_torus.json", &["output.timings=true"])).unwrap();
    assert!(timed.timings_ms.is_some());
    assert!(run(Verb::Betti, &load("minimal_torus.json", &[]))
        .unwrap()
        .timings_ms
        .is_none());
}

#[test]
fn json_round_trip() {
    let r = run(Verb::Verify, &load("t3a_verify.json", &[])).unwrap();
    let text = r.to_canonical_json();
    let back = BettiReport::from_json(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.to_canonical_json(), text);
}

#[test]
fn flat_spectrum_csv_has_four_zero_modes() {
    let r = run(Verb::Betti, &load("minimal_torus.json", &[])).unwrap();
    let text = spectrum_csv(&r).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let zeros: Vec<&csv::StringRecord> = rows.iter().filter(|r| r[3].parse::<f64>().unwrap() == 0.0).collect();
    assert_eq!(zeros.len(), 4);
    assert!(zeros.iter().all(|r| &r[0] == "0 0"));
    let per_degree: Vec<usize> = (0..3)
        .map(|p| zeros.iter().filter(|r| r[1] == *p.to_string()).count())
        .collect();
    assert_eq!(per_degree, vec![1, 2, 1]);
    assert_eq!(rows.len(), 81 * 4);
}
