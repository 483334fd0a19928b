use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn cobordia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cobordia"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixtures_dir() -> TempDir {
    let dir = TempDir::new().unwrap();
    let o = cobordia(&["fixtures", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    dir
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn cylinder_has_one_infinite_degree_one_bar() {
    let dir = fixtures_dir();
    let o = cobordia(&["cobordism", &path(dir.path(), "cylinder.json"), "--degrees", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "degree,birth,death,birth_cell,death_cell,case_birth,case_death\n1,42,inf,41,,F,\n"
    );
}

#[test]
fn corrupt_json_exits_one_with_violations() {
    let dir = TempDir::new().unwrap();
    let bad = path(dir.path(), "bad.json");
    std::fs::write(
        &bad,
        r#"{"cells":[{"id":0,"dim":1,"boundary":[7],"f":0,"label":"A"},{"id":1,"dim":0,"boundary":[],"f":0,"label":"AB"}]}"#,
    )
    .unwrap();
    let o = cobordia(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("unknown boundary cell 7"), "{err}");
    assert!(err.contains("not disjoint"), "{err}");

    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(cobordia(&["validate", &bad]).status.code(), Some(1));
}

#[test]
fn validate_accepts_fixtures() {
    let dir = fixtures_dir();
    let o = cobordia(&["validate", &path(dir.path(), "two_tunnels.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("valid: 7 cells"));
}

#[test]
fn oracle_check_passes_on_random_complexes() {
    let o = cobordia(&["oracle-check", "--random", "100", "--seed", "1000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.contains(": ok")).count(), 100);
}

#[test]
fn oracle_size_limit_is_a_computation_error() {
    let dir = fixtures_dir();
    let o = cobordia(&["oracle-check", &path(dir.path(), "cylinder.json"), "--size-limit", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_slab_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cloud = path(dir.path(), "flat.csv");
    std::fs::write(&cloud, "0.1,0.5\n0.9,0.5\n0.5,0.6\n0.5,0.4\n").unwrap();
    let o = cobordia(&["cobordism", &cloud, "--axis", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = cobordia(&["cobordism", &cloud, "--epsilon", "0.7"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = fixtures_dir();
    let b = fixtures_dir();
    for name in ["cylinder.json", "two_tunnels.json", "cylinder_lattice.csv", "channel_2d.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    let run = |dir: &TempDir| {
        let svg = path(dir.path(), "d.svg");
        let reps = path(dir.path(), "r.json");
        let o = cobordia(&[
            "cobordism",
            &path(dir.path(), "cylinder_middle_triangle.json"),
            "--svg",
            &svg,
            "--representatives",
            &reps,
        ]);
        assert!(o.status.success());
        (o.stdout, std::fs::read(svg).unwrap(), std::fs::read(reps).unwrap())
    };
    assert_eq!(run(&a), run(&b));
}

#[test]
fn representatives_and_svg_are_written() {
    let dir = fixtures_dir();
    let svg = path(dir.path(), "d.svg");
    let reps = path(dir.path(), "r.json");
    let csv = path(dir.path(), "bars.csv");
    let o = cobordia(&[
        "cobordism",
        &path(dir.path(), "cylinder_middle_triangle.json"),
        "--csv",
        &csv,
        "--svg",
        &svg,
        "--representatives",
        &reps,
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let bars = std::fs::read_to_string(csv).unwrap();
    assert!(bars.contains("\n1,42,43,41,42,F,C\n"), "{bars}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(reps).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2);
    assert!(std::fs::read_to_string(svg).unwrap().contains("stroke-dasharray"));
}

#[test]
fn kernel_csv_has_empty_death_for_infinite_bars() {
    let dir = fixtures_dir();
    let o = cobordia(&[
        "kernel",
        &path(dir.path(), "cylinder_top_triangle.json"),
        "--degrees",
        "1",
    ]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "degree,birth,death,birth_cell,death_cell,block\n1,42,,41,,AB\n1,43,,42,,B\n"
    );
}

#[test]
fn lattice_cloud_has_one_tunnel() {
    let dir = fixtures_dir();
    let o = cobordia(&["cobordism", &path(dir.path(), "cylinder_lattice.csv"), "--degrees", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1, "{text}");
    assert!(!rows[0].contains("inf"));
}

#[test]
fn alpha_emits_a_valid_complex() {
    let dir = fixtures_dir();
    let out = path(dir.path(), "alpha.json");
    let o = cobordia(&["alpha", &path(dir.path(), "channel_2d.csv"), "--axis", "1", "-o", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(cobordia(&["validate", &out]).status.code(), Some(0));
}

#[test]
fn dual_reports_the_channel_in_radius_units() {
    let dir = fixtures_dir();
    let o = cobordia(&["dual", &path(dir.path(), "channel_2d.csv"), "--axis", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1, "{text}");
    let radius: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
    assert!((radius - 0.15).abs() < 0.02, "{radius}");
}

#[test]
fn epsilon_sweep_prefixes_each_row() {
    let dir = fixtures_dir();
    let o = cobordia(&[
        "cobordism",
        &path(dir.path(), "cylinder_lattice.csv"),
        "--epsilon-sweep",
        "0.1:0.2:0.05",
        "--degrees",
        "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("epsilon,degree,"));
    let eps: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(eps, ["0.1", "0.15", "0.2"]);
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_cobordia"))
        .args(["oracle-check", "--random", "1"])
        .env("COBORDIA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_cobordia"))
        .args(["oracle-check", "--random", "3"])
        .env("COBORDIA_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn help_lists_every_flag() {
    let help = stdout(&cobordia(&["cobordism", "--help"]));
    for flag in [
        "--format",
        "--axis",
        "--epsilon",
        "--strip-slabs",
        "--degrees",
        "--csv",
        "--representatives",
        "--svg",
        "--epsilon-sweep",
    ] {
        assert!(help.contains(flag), "{flag}");
    }
    assert!(stdout(&cobordia(&["dual", "--help"])).contains("--include-unbounded"));
}
