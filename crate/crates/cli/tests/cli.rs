use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isoperimetry"))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn kernels_table() {
    let o = run(&["kernels", "--k", "0", "--n", "3", "--range", "1:1:1", "--rho", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,s_k,c_k,lambda_k,l_k,h_k,j_k(rho=1)");
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[5] - 1.0 / 3.0).abs() < 1e-8 && (row[6] - 1.0 / 3.0).abs() < 1e-8);

    let o = run(&["kernels", "--k", "1", "--n", "2", "--range", "1.5707963267948966:1.6:1"]);
    let h: f64 = stdout(&o).lines().nth(1).unwrap().split(',').nth(5).unwrap().parse().unwrap();
    assert!((h - 1.0).abs() < 1e-8);

    let o = run(&["kernels", "--k", "1", "--n", "2", "--range", "3.2:3.3:0.1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain error"));
}

#[test]
fn negative_curvature_arguments_parse() {
    let o = run(&["kernels", "--k", "-1", "--n", "2", "--range", "1:2:1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "--scenario", &fixture("rectangle.json")]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--scenario", &fixture("torus_counterexample.json")]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--scenario", &fixture("revolution_counterexample.json")]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--scenario", "no/such/file.json"]).status.code(), Some(3));
}

#[test]
fn verify_detects_inequality_failure() {
    // claiming equality for a strict case fails the inequality contract
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("rectangle.json")).unwrap();
    let bad = text.replace("{ \"id\": \"isodiametric\" }", "{ \"id\": \"isodiametric\", \"equality_expected\": true }");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, bad).unwrap();
    let o = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn verify_rejects_bad_tolerance_and_ids() {
    let o = run(&["verify", "--scenario", &fixture("rectangle.json"), "--tol", "1e-20"]);
    assert_eq!(o.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("rectangle.json")).unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, text.replace("\"inradius\"", "\"thm_99\"")).unwrap();
    let o = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("thm_99"));
}

#[test]
fn verify_writes_reports_and_report_converts_them() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["verify", "--scenario", &fixture("torus_cutlocus.json"), "--samples", "24", "--jobs", "2", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for f in ["reports.json", "reports.csv", "bishop_gromov_flat_torus.dat"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let json = dir.path().join("reports.json");
    let o = run(&["report", "--format", "csv", "--input", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), std::fs::read_to_string(dir.path().join("reports.csv")).unwrap());
    let o = run(&["report", "--format", "json", "--input", json.to_str().unwrap()]);
    assert_eq!(stdout(&o), std::fs::read_to_string(&json).unwrap());
    let o = run(&["report", "--format", "plotdata", "--input", json.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("# theorem: bishop_gromov"));
}

#[test]
fn verify_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        run(&["verify", "--scenario", &fixture("euclidean_disk.json"), "--jobs", "3", "--out", d.path().to_str().unwrap()]);
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("reports.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn cutlocus_of_the_flat_torus() {
    let o = run(&["cutlocus", "--scenario", &fixture("torus_cutlocus.json"), "--point", "0,0", "--directions", "256"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "direction_index,t,chart_x,chart_y");
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        // every cut point lies on x = 1/2 or y = 1/2
        let on = |c: f64| (c.rem_euclid(1.0) - 0.5).abs() < 1e-6;
        assert!(on(v[2]) || on(v[3]), "{line}");
    }
    let err = String::from_utf8_lossy(&o.stderr);
    let measure: f64 = err.split("measure").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!((measure - 2.0).abs() < 1e-2, "{err}");
    let o = run(&["cutlocus", "--scenario", &fixture("torus_cutlocus.json"), "--point", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn fk_commands() {
    let o = run(&["fk", "chord", "--k", "0", "--x1", "0", "--y1", "1", "--x2", "1", "--y2", "0"]);
    let v: Vec<f64> = stdout(&o).lines().map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap()).collect();
    assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
    let o = run(&["fk", "chord", "--k", "1", "--x1", "0", "--y1", "1", "--x2", "3.141592653589793", "--y2", "0"]);
    assert_eq!(o.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sq.csv");
    let rows: String = (0..=40).map(|i| 0.5 + i as f64 * 0.05).map(|t| format!("{t},{}\n", t * t)).collect();
    std::fs::write(&path, format!("t,value\n{rows}")).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(run(&["fk", "convexity", "--k", "0", "--input", p]).status.code(), Some(0));
    assert_eq!(run(&["fk", "convexity", "--k", "0", "--input", p, "--sense", "concave"]).status.code(), Some(1));
}
