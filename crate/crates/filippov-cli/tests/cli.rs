//! End-to-end tests of the command-line interface: exit codes, report
//! determinism, and the documented output formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_filippov"))
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("workspace root")
}

fn scenario(name: &str) -> PathBuf {
    repo_root().join("scenarios").join(name)
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("filippov-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn write_field(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).expect("write field file");
    path
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn run_pseudo_node_scenario_passes() {
    let out = temp_dir("run-pass");
    let output = bin()
        .args(["run"])
        .arg(scenario("pseudo_node.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = stdout_of(&output);
    assert!(stdout.contains("index=-1"), "{stdout}");
    assert!(stdout.contains("result: PASS"), "{stdout}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["all_passed"], true);
    assert_eq!(report["scenario"], "pseudo_node");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for (tag, file) in [
        ("det-planar", "pseudo_node.json"),
        ("det-manifold", "sphere_ph.json"),
    ] {
        let out_a = temp_dir(&format!("{tag}-a"));
        let out_b = temp_dir(&format!("{tag}-b"));
        for out in [&out_a, &out_b] {
            let status = bin()
                .args(["run"])
                .arg(scenario(file))
                .arg("--out")
                .arg(out)
                .status()
                .expect("spawn");
            assert!(status.success());
        }
        let a = std::fs::read(out_a.join("report.json")).unwrap();
        let b = std::fs::read(out_b.join("report.json")).unwrap();
        assert_eq!(a, b, "{file}: reports differ between runs");
    }
}

#[test]
fn missing_scenario_exits_2() {
    let output = bin()
        .args(["run", "definitely-missing.json"])
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr).into_owned();
    assert!(stderr.contains("not found"), "{stderr}");
}

#[test]
fn invalid_scenario_names_the_field() {
    let dir = temp_dir("invalid");
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"{
            "schema_version": 1,
            "name": "bad",
            "kind": "planar",
            "field": {
                "fplus": ["x + z", "1"],
                "fminus": ["1", "1"],
                "switch": "y",
                "domain": [-1, -1, 1, 1]
            },
            "analyses": []
        }"#,
    )
    .unwrap();
    let output = bin().args(["run"]).arg(&path).output().expect("spawn");
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr).into_owned();
    assert!(stderr.contains("field.fplus[0]"), "{stderr}");
    assert!(stderr.contains("unknown variable"), "{stderr}");
}

#[test]
fn failing_expectation_exits_1() {
    let dir = temp_dir("fail");
    let path = dir.join("wrong.json");
    std::fs::write(
        &path,
        r#"{
            "schema_version": 1,
            "name": "wrong_expectation",
            "kind": "planar",
            "field": {
                "fplus": ["1", "1"],
                "fminus": ["1", "1"],
                "switch": "y",
                "domain": [-2, -2, 2, 2]
            },
            "analyses": [
                { "op": "index", "center": [0, 0], "radius": 1.0, "expect_index": 5 }
            ]
        }"#,
    )
    .unwrap();
    let out = temp_dir("fail-out");
    let output = bin()
        .args(["run"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    assert!(stdout_of(&output).contains("result: FAIL"));
}

#[test]
fn index_subcommand_prints_documented_format() {
    let dir = temp_dir("index");
    let field = write_field(
        &dir,
        "crossing.json",
        r#"{"fplus": ["1","1"], "fminus": ["1","1"], "switch": "y", "domain": [-2,-2,2,2]}"#,
    );
    let output = bin()
        .args(["index", "--field"])
        .arg(&field)
        .args(["--center", "0,0", "--radius", "1"])
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert_eq!(stdout_of(&output).trim(), "index=0 residual=0.0e0");
}

#[test]
fn classify_subcommand_prints_one_json_object() {
    let dir = temp_dir("classify");
    let field = write_field(
        &dir,
        "pseudo.json",
        r#"{"fplus": ["x","-1"], "fminus": ["x","1"], "switch": "y", "domain": [-2,-2,2,2]}"#,
    );
    let output = bin()
        .args(["classify", "--field"])
        .arg(&field)
        .args(["--point", "0.5,0"])
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let value: serde_json::Value = serde_json::from_str(stdout_of(&output).trim()).unwrap();
    assert_eq!(value["tag"], "Sliding");
    assert_eq!(value["lie_plus"], -1.0);
    assert_eq!(value["lie_minus"], 1.0);
}

#[test]
fn find_subcommand_prints_table() {
    let dir = temp_dir("find");
    let field = write_field(
        &dir,
        "pseudo.json",
        r#"{"fplus": ["x","-1"], "fminus": ["x","1"], "switch": "y", "domain": [-2,-2,2,2]}"#,
    );
    let output = bin()
        .args(["find", "--field"])
        .arg(&field)
        .args(["--box", "-1,-1,1,1", "--grid", "32"])
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = stdout_of(&output);
    assert!(stdout.contains("PseudoEquilibrium"), "{stdout}");
    assert!(stdout.contains("-1"), "{stdout}");
}

#[test]
fn emit_curves_writes_csv_with_header() {
    let dir = temp_dir("curves");
    let field = write_field(
        &dir,
        "source.json",
        r#"{"fplus": ["x","y"], "fminus": ["x","y"], "switch": "y", "domain": [-2,-2,2,2]}"#,
    );
    let out = dir.join("curves");
    let output = bin()
        .args(["emit-curves", "--field"])
        .arg(&field)
        .args(["--center", "0,0", "--radius", "1", "--out"])
        .arg(&out)
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    // The two files cover the two boundary arcs; concatenated, the sampled
    // (vx, vy) rows of the radial source trace one full turn.
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for name in ["gamma_plus.csv", "gamma_minus.csv"] {
        let text = std::fs::read_to_string(out.join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,vx,vy"), "{name}");
        assert!(lines.clone().count() >= 500, "{name} too short");
        rows.extend(lines.map(|l| {
            let mut it = l.split(',');
            it.next();
            let vx: f64 = it.next().unwrap().parse().unwrap();
            let vy: f64 = it.next().unwrap().parse().unwrap();
            (vx, vy)
        }));
    }
    let mut total = 0.0;
    for w in rows.windows(2) {
        let (ax, ay) = w[0];
        let (bx, by) = w[1];
        total += (ax * by - ay * bx).atan2(ax * bx + ay * by);
    }
    assert!(
        (total - std::f64::consts::TAU).abs() < 0.1,
        "combined winding {total}"
    );
}

#[test]
fn custom_manifold_atlas_is_accepted() {
    let dir = temp_dir("custom-manifold");
    let path = dir.join("custom_sphere.json");
    // The built-in sphere rebuilt as a user-supplied atlas: two inversion
    // charts, disk predicates, overlap samples on the annulus.
    std::fs::write(
        &path,
        r#"{
            "schema_version": 1,
            "name": "custom_sphere",
            "kind": "manifold",
            "manifold": {
                "chi": 2,
                "charts": [
                    {
                        "name": "south",
                        "map_in": ["x", "y"],
                        "map_out": ["x", "y"],
                        "domain": [-2, -2, 2, 2],
                        "predicate": "4 - x^2 - y^2",
                        "field": {
                            "fplus": ["-y + 0.3*x", "x + 0.3*y"],
                            "fminus": ["-y - 0.3*x", "x - 0.3*y"],
                            "switch": "x^2 + y^2 - 1",
                            "domain": [-2, -2, 2, 2]
                        }
                    },
                    {
                        "name": "north",
                        "map_in": ["x/(x^2+y^2)", "y/(x^2+y^2)"],
                        "map_out": ["x/(x^2+y^2)", "y/(x^2+y^2)"],
                        "domain": [-2, -2, 2, 2],
                        "predicate": "4 - x^2 - y^2",
                        "field": {
                            "fplus": ["-y - 0.3*x", "x - 0.3*y"],
                            "fminus": ["-y + 0.3*x", "x + 0.3*y"],
                            "switch": "1 - x^2 - y^2",
                            "domain": [-2, -2, 2, 2]
                        }
                    }
                ],
                "overlaps": [
                    {
                        "a": "south",
                        "b": "north",
                        "samples": [[0.8, 0.0], [0.0, 1.2], [-1.0, 0.0], [0.7, -0.7]]
                    }
                ]
            },
            "analyses": [
                { "op": "ph", "grid": 32, "expect_sum": 2, "expect_nonempty": true }
            ]
        }"#,
    )
    .unwrap();
    let out = temp_dir("custom-manifold-out");
    let output = bin()
        .args(["run"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(stdout_of(&output).contains("sum=2 chi=2 PASS"));
}

#[test]
fn analysis_error_is_recorded_and_later_analyses_still_run() {
    let dir = temp_dir("continue");
    let path = dir.join("continue.json");
    // The first analysis places a tangential singularity on the ball
    // boundary (an error); the second analysis must still run and pass.
    std::fs::write(
        &path,
        r#"{
            "schema_version": 1,
            "name": "error_then_pass",
            "kind": "planar",
            "field": {
                "fplus": ["1", "x"],
                "fminus": ["1", "1"],
                "switch": "y",
                "domain": [-3, -3, 3, 3]
            },
            "analyses": [
                { "op": "index", "center": [1.0, 0.0], "radius": 1.0, "expect_index": 0 },
                { "op": "classify", "point": [0.5, 0.0], "expect_tag": "Crossing" }
            ]
        }"#,
    )
    .unwrap();
    let out = temp_dir("continue-out");
    let output = bin()
        .args(["run"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let stdout = stdout_of(&output);
    assert!(stdout.contains("ERROR"), "{stdout}");
    assert!(stdout.contains("Crossing"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["results"].as_array().unwrap().len(), 2);
    assert!(report["results"][0]["error"].is_string());
    assert_eq!(report["results"][1]["pass"], true);
    assert_eq!(report["all_passed"], false);
}

#[test]
fn ph_subcommand_reports_summary_line() {
    let output = bin()
        .args(["ph", "--scenario"])
        .arg(scenario("sphere_ph.json"))
        .args(["--grid", "32"])
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(stdout_of(&output).contains("sum=2 chi=2 PASS"));
}

#[test]
fn reg_check_exports_band_curves() {
    let dir = temp_dir("band");
    let field = write_field(
        &dir,
        "pseudo.json",
        r#"{"fplus": ["x","-1"], "fminus": ["x","1"], "switch": "y", "domain": [-2,-2,2,2]}"#,
    );
    let out = dir.join("band");
    let output = bin()
        .args(["reg-check", "--field"])
        .arg(&field)
        .args(["--center", "0,0", "--radius", "1", "--eps", "0.1", "--out"])
        .arg(&out)
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    for name in ["band_plus_1e-1.csv", "band_minus_1e-1.csv"] {
        let text = std::fs::read_to_string(out.join(name)).unwrap();
        assert!(text.starts_with("x,y\n"), "{name}");
        // Every traced point sits on the requested level set y = +-0.1.
        let expected = if name.contains("plus") { 0.1 } else { -0.1 };
        for line in text.lines().skip(1).filter(|l| !l.is_empty()) {
            let y: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((y - expected).abs() < 1e-9, "{name}: {line}");
        }
    }
}
