use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use frontier_tails::lab::{sample_distribution, DistributionSpec};
use frontier_tails::rng::seeded;

fn ftails(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftails"))
        .args(args)
        .env_remove("FTAILS_CALIBRATION_DIR")
        .output()
        .expect("run ftails")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn calibrate_thin(dir: &Path, ks: &str) {
    let out = ftails(&[
        "calibrate", "--kind", "thin", "--k", ks, "--draws", "1000", "--seed", "7",
        "--calibrations", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
}

/// `y = 1 + 2x + w` with t(2) noise, two groups.
fn heavy_csv(dir: &Path) -> PathBuf {
    let n = 1200;
    let w = sample_distribution(&DistributionSpec::student_t(2.0), n, &mut seeded(3)).unwrap();
    let x = sample_distribution(&DistributionSpec::standard_normal(), n, &mut seeded(4)).unwrap();
    let mut text = String::from("year,x,y\n");
    for i in 0..n {
        let year = if i % 2 == 0 { "2001" } else { "2002" };
        text += &format!("{year},{},{}\n", x[i], 1.0 + 2.0 * x[i] + w[i]);
    }
    let path = dir.join("banks.csv");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn calibrate_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    calibrate_thin(&a, "3,5");
    calibrate_thin(&b, "3,5");
    for name in ["thin_tail_k3_a0.05_v1.json", "thin_tail_k5_a0.05_v1.json"] {
        let x = fs::read(a.join(name)).unwrap();
        assert_eq!(x, fs::read(b.join(name)).unwrap());
        assert!(a.join(format!("{name}.manifest.json")).exists());
    }
}

#[test]
fn equal_calibration_has_fifty_masses() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ftails(&[
        "calibrate", "--kind", "equal", "--k", "3", "--draws", "1000", "--iterations", "200", "--seed", "1",
        "--calibrations", tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(tmp.path().join("equal_tail_k3_a0.05_v1.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["lambda_masses"].as_array().unwrap().len(), 50);
    assert_eq!(v["grid_points"][49].as_f64(), Some(0.99));
}

#[test]
fn unwritable_calibration_dir_leaves_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("cal");
    let out = ftails(&["calibrate", "--kind", "thin", "--k", "3", "--draws", "1000", "--calibrations", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 1);
}

#[test]
fn test_command_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let cal = tmp.path().join("cal");
    calibrate_thin(&cal, "25,50");
    let input = heavy_csv(tmp.path());
    let output = tmp.path().join("out.csv");
    let run = |orientation: &str, out: &Path| {
        ftails(&[
            "test", "--input", input.to_str().unwrap(), "--response", "y", "--design", "x", "--group", "year",
            "--k", "25,50", "--tails", "both", "--orientation", orientation, "--censor",
            "--calibrations", cal.to_str().unwrap(), "--output", out.to_str().unwrap(),
        ])
    };
    let o = run("production", &output);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&output).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("group,k,tail,statistic,p_value,reject,p_display"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0][..3], ["2001", "25", "left"]);
    assert_eq!(rows[7][..3], ["2002", "50", "right"]);
    let k50_rejections = rows.iter().filter(|r| r[1] == "50" && r[5] == "true").count();
    assert!(k50_rejections >= 3, "{text}");
    let manifest = fs::read_to_string(tmp.path().join("out.csv.manifest.json")).unwrap();
    assert!(manifest.contains("sha256:") && manifest.contains("thin_tail_k50_a0.05_v1"));

    // cost orientation swaps the tails
    let cost_out = tmp.path().join("cost.csv");
    assert!(run("cost", &cost_out).status.success());
    let cost = fs::read_to_string(&cost_out).unwrap();
    let stat = |text: &str, group: &str, k: &str, tail: &str| -> String {
        text.lines()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|r| r[0] == group && r[1] == k && r[2] == tail)
            .map(|r| r[3].to_string())
            .unwrap()
    };
    assert_eq!(stat(&text, "2001", "50", "left"), stat(&cost, "2001", "50", "right"));
    assert_eq!(stat(&text, "2002", "25", "right"), stat(&cost, "2002", "25", "left"));
}

#[test]
fn test_command_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cal = tmp.path().join("cal");
    calibrate_thin(&cal, "3");
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "x,y\n1,2\n2,oops\n3,4\n4,5\n5,7\n6,1\n").unwrap();
    let base = |input: &Path, y: &str, k: &str| {
        ftails(&[
            "test", "--input", input.to_str().unwrap(), "--response", y, "--design", "x", "--k", k,
            "--calibrations", cal.to_str().unwrap(),
        ])
    };
    let o = base(&bad, "y", "3");
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 3") && stderr(&o).contains("\"oops\""), "{}", stderr(&o));

    let o = base(&bad, "missing", "3");
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("\"missing\""));

    let o = base(&bad, "y", "4");
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("kind=thin_tail, k=4, alpha=0.05"), "{}", stderr(&o));
}

#[test]
fn simulate_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cal = tmp.path().join("cal");
    calibrate_thin(&cal, "5");
    let config = tmp.path().join("s.json");
    fs::write(
        &config,
        r#"{"scenarios": [{"id": "t2", "noise": {"family": "student_t", "df": 2},
            "inefficiency": {"family": "half_normal", "sd": 1}, "n": 200, "k": 5,
            "test": "thin_tail_right", "replications": 30, "seed": 9}]}"#,
    )
    .unwrap();
    let run = |out: &Path| {
        ftails(&[
            "simulate", "--config", config.to_str().unwrap(), "--calibrations", cal.to_str().unwrap(),
            "--output", out.to_str().unwrap(),
        ])
    };
    let (a, b) = (tmp.path().join("a.csv"), tmp.path().join("b.csv"));
    assert!(run(&a).status.success());
    assert!(run(&b).status.success());
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("scenario,n,k,rate,se,reps,seed\nt2,200,5,"), "{text}");
    assert!(text.trim_end().ends_with(",30,9"));
}

#[test]
fn simulate_rejects_unknown_family_and_preset() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("s.json");
    fs::write(
        &config,
        r#"{"scenarios": [{"id": "c", "noise": {"family": "cauchy"},
            "inefficiency": {"family": "half_normal", "sd": 1}, "n": 200, "k": 5, "test": "thin_tail_right"}]}"#,
    )
    .unwrap();
    let o = ftails(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cauchy"));
    assert_eq!(ftails(&["simulate", "--preset", "table9"]).status.code(), Some(2));
}

#[test]
fn density_command() {
    let o = ftails(&["density", "--k", "3", "--xi", "0,1", "--v", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((rows[0] - 8.0 / 9.0).abs() < 1e-9);
    assert!((rows[1] - 0.635_532_333_438_687).abs() < 1e-7);
    assert_eq!(ftails(&["density", "--k", "4", "--v", "0.5"]).status.code(), Some(2));
}

#[test]
fn power_command() {
    assert_eq!(ftails(&["power", "--k", "2"]).status.code(), Some(2));
    let o = ftails(&["power", "--k", "5", "--xi", "0,0.9", "--draws", "2000", "--null-draws", "2000", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let power: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!((power[0] - 0.05).abs() < 0.02, "{text}");
    assert!(power[1] > power[0]);
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(ftails(&["density", "--k", "3", "--v", "0.5", "--bogus"]).status.code(), Some(2));
    assert_eq!(ftails(&["frobnicate"]).status.code(), Some(2));
}
