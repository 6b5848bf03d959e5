use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use coarse_complex::cli::run;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_string_lossy().into_owned()
}

fn bin(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_coarse-complex")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> serde_json::Value {
    let (code, out, err) = bin(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn betti_of_torus() {
    let (code, out, _) = bin(&["betti", "--q", "1", &data("torus.cx")]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "2");
    let v = json(&["--json", "betti", "--q", "1", &data("torus.cx")]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "betti");
    assert_eq!(v["result"]["betti"], 2);
    assert!(v["timings"].is_null());
}

#[test]
fn pair_signatures() {
    let (c1, c0) = (data("cp2_core1.cx"), data("cp2_core0.cx"));
    let (code, out, _) = bin(&["pair-signature", "--core1", &c1, "--core0", &c0, "--glue", &data("cp2_glue.json")]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1");
    let (code, out, _) = bin(&["pair-signature", "--core1", &c0, "--core0", &c0, "--glue", &data("cp2_double_glue.json")]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "0");
}

#[test]
fn gh_of_two_point_spaces() {
    let v = json(&["--json", "gh", &data("pair1.ms"), &data("pair2.ms")]);
    assert_eq!(v["result"]["upper_exact"], "1/2");
    assert!(v["result"]["lower"].as_f64().unwrap() <= 0.5);
}

#[test]
fn json_output_is_reproducible() {
    let args = ["--json", "--seed", "7", "duality-check", &data("octahedron.cx")];
    let first = run(["coarse-complex"].iter().chain(&args));
    let second = run(["coarse-complex"].iter().chain(&args));
    assert_eq!(first.code, 0, "{}", first.stderr);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn timings_only_on_request() {
    let v = json(&["--json", "--timings", "betti", "--q", "0", &data("circle3.cx")]);
    assert!(v["timings"].is_object());
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = bin(&["no-such-command"]);
    assert_eq!(code, 2);
    assert!(err.to_lowercase().contains("usage"));
    let (code, _, _) = bin(&["betti"]);
    assert_eq!(code, 2);
}

#[test]
fn parse_errors_exit_two_and_name_the_line() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "3\n0 1 5\n1 0 1\n5 1 0").unwrap();
    let path = f.path().to_string_lossy().into_owned();
    let (code, _, err) = bin(&["gh", &path, &data("point.ms")]);
    assert_eq!(code, 2);
    assert!(err.contains("line"), "{err}");

    let mut g = tempfile::NamedTempFile::new().unwrap();
    writeln!(g, "simplex 0 1 2\nbogus line").unwrap();
    let path = g.path().to_string_lossy().into_owned();
    let (code, _, err) = bin(&["betti", &path]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_file_is_reported() {
    let (code, _, err) = bin(&["betti", "/nonexistent/file.cx"]);
    assert_ne!(code, 0);
    assert!(!err.is_empty());
}
