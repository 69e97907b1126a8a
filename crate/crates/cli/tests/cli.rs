use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn chlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> Option<i32> {
    o.status.code()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SMALL: &str = r#"
mode = "viscous"

[domain]
resolution = 64

[time]
dt = 0.001
t_end = 0.1
output_stride = 10

[forcing]
expr = "5*sin(2*pi*x)"
mean_zero = true

[initial]
recipe = "random_h1"
radius = 2.0
seed = 3

[diagnostics]
highfreq_k = [0, 1, 2, 3]

[output]
name = "small"
"#;

#[test]
fn simulate_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("out");
    let o = chlab(&["simulate", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("small.csv")).unwrap();
    assert!(csv.starts_with("# schema_version = 1\n"));
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows[0].starts_with("t,I,mean_u,I_gt_0,I_gt_1,I_gt_2,I_gt_3,besov_"));
    assert_eq!(rows.len(), 1 + 11);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("small.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["records"].as_array().unwrap().len(), 11);
    assert!(json["dissipation"]["c_star"].as_f64().unwrap() >= 0.0);
    assert_eq!(json["final_state"]["values"].as_array().unwrap().len(), 64);

    let r = chlab(&["report", out.join("small.json").to_str().unwrap()]);
    assert_eq!(code(&r), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stdout).contains("C* ="));
}

#[test]
fn ensemble_round_trips_through_report() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("t_end = 0.1", "t_end = 2.0")
        + "\n[ensemble]\nradii = [1.0, 4.0]\ncount = 2\nsamples = 21\n";
    let cfg = write(dir.path(), "ens.toml", &text);
    let o = chlab(&["ensemble", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), Some(0), "{stdout}{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout.contains("PASS plateau"));
    let doc = dir.path().join("small_ensemble.json");
    let r = chlab(&["report", doc.to_str().unwrap()]);
    assert_eq!(code(&r), Some(0));
    let again = String::from_utf8_lossy(&r.stdout);
    assert!(again.contains("PASS plateau"));
    assert!(!again.contains("differ"));
}

#[test]
fn unsettled_ensemble_is_a_verdict_failure() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("t_end = 0.1", "t_end = 0.02")
        + "\n[ensemble]\nradii = [1.0, 10.0]\ncount = 1\nsamples = 5\n";
    let cfg = write(dir.path(), "ens.toml", &text);
    let o = chlab(&["ensemble", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), Some(4));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL plateau"));
}

#[test]
fn rejected_configs_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &SMALL.replace("resolution = 64", "resolution = 64 64"));
    let o = chlab(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));

    let cfg = write(dir.path(), "mean.toml", &SMALL.replace("5*sin(2*pi*x)", "1 + sin(2*pi*x)"));
    let o = chlab(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mean-zero forcing"));
}

#[test]
fn blow_up_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    // Unary minus binds before `^`, so this forcing is exp(+(x - L/2)²).
    let text = r#"
mode = "damped"
[domain]
resolution = 256
length = 32.0
[time]
dt = 0.01
t_end = 1.0
[forcing]
expr = "exp(-(x - L/2)^2)"
mu = 0.1
[initial]
recipe = "random_bumps"
radius = 1.0
seed = 1
"#;
    let cfg = write(dir.path(), "boom.toml", text);
    let o = chlab(&["simulate", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&chlab(&["simulate"])), Some(1));
    assert_eq!(code(&chlab(&["frobnicate"])), Some(1));
    assert_eq!(code(&chlab(&["simulate", "--config", "/nonexistent.toml"])), Some(1));
    assert_eq!(code(&chlab(&["check", "--resolution", "100"])), Some(1));
    assert_eq!(code(&chlab(&["report", "/nonexistent.json"])), Some(1));
    assert_eq!(code(&chlab(&["--help"])), Some(0));
}

#[test]
fn check_prints_one_line_per_identity() {
    let o = chlab(&["check", "--resolution", "64", "--samples", "50"]);
    assert_eq!(code(&o), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 8, "{stdout}");
}

#[test]
fn shipped_configs_parse() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in fs::read_dir(&root).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let text = fs::read_to_string(&path).unwrap();
            chlab::parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
    for entry in fs::read_dir(root.join("rejected")).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        assert!(chlab::parse_config(&text).is_err(), "{}", path.display());
    }
}
