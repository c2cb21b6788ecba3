use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fmd::read_mass;
use fmd_core::{build_predictive, invert_to_mass, CompletionKind, PanAssertion};

const BASE: [&str; 10] = ["--N", "100", "--a1", "25", "--a2", "60", "--pL", "0.1", "--pU", "0.7"];

fn fmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmd")).args(args).output().expect("binary runs")
}

fn with_base<'a>(verb: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    verb.iter().chain(BASE.iter()).chain(extra).copied().collect()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn expected_mass(kind: CompletionKind) -> fmd_core::MassFunction {
    let s = PanAssertion::new(100, 25, 60, 0.1, 0.7).unwrap();
    invert_to_mass(&build_predictive(&s, kind).unwrap())
}

fn max_gap(a: &fmd_core::MassFunction, b: &fmd_core::MassFunction) -> f64 {
    a.linear().iter().zip(b.linear()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn strict_predict_mimics_inside_window() {
    let out = fmd(&with_base(&["predict"], &["--completion", "strict"]));
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,a_over_N,p_aN"));
    let rows: Vec<(usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 101);
    for &(a, p) in &rows[25..=60] {
        assert!((p - a as f64 / 100.0).abs() < 1e-15, "a = {a}: {p}");
    }
}

#[test]
fn mass_header_and_weak_concentration() {
    let out = fmd(&with_base(&["mass"], &["--completion", "weak"]));
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("a,abscissa,p_aN,q_aNp1,density\n"));
    let (mut best, mut at) = (0.0, 0.0);
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let density: f64 = f[4].parse().unwrap();
        if density > best {
            best = density;
            at = f[1].parse().unwrap();
        }
    }
    assert!((at - 0.1f64).abs() < 0.03, "peak at {at}");
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (verb, format) in [("mass", "csv"), ("mass", "json"), ("predict", "json")] {
        let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("{verb}{i}.{format}"))).collect();
        for p in &paths {
            let out = fmd(&with_base(&[verb], &["--completion", "quartic", "--format", format, "--out", p.to_str().unwrap()]));
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        }
        assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
    }
    let one = Command::new(env!("CARGO_BIN_EXE_fmd"))
        .args(["preset", "fig2-bottom", "--format", "json"])
        .env("FMD_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_fmd"))
        .args(["preset", "fig2-bottom", "--format", "json"])
        .env("FMD_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
}

fn round_trip(format: &str, log: bool) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(format!("q.{format}"));
    let mut extra = vec!["--completion", "linear", "--format", format, "--out", path.to_str().unwrap()];
    if log {
        extra.push("--log-output");
    }
    let out = fmd(&with_base(&["mass"], &extra));
    assert!(out.status.success());
    let back = read_mass(Path::new(&path)).unwrap();
    let gap = max_gap(&back, &expected_mass(CompletionKind::Linear));
    assert!(gap < 1e-9, "{format} log={log}: {gap:e}");
}

#[test]
fn csv_round_trip() {
    round_trip("csv", false);
}

#[test]
fn json_round_trip() {
    round_trip("json", false);
}

#[test]
fn log_output_round_trip() {
    round_trip("csv", true);
    round_trip("json", true);
}

#[test]
fn log_output_keeps_tiny_masses() {
    let args = ["mass", "--N", "10000", "--a1", "2500", "--a2", "6000", "--pL", "0.1", "--pU", "0.7", "--completion", "weak"];
    let linear = stdout(&fmd(&args));
    let mut with_log = args.to_vec();
    with_log.push("--log-output");
    let logs = stdout(&fmd(&with_log));
    assert!(logs.starts_with("a,abscissa,p_aN,ln_q_aNp1,ln_density\n"));
    let zero_rows: Vec<usize> = linear
        .lines()
        .skip(1)
        .enumerate()
        .filter(|(_, l)| l.split(',').nth(3).unwrap().parse::<f64>().unwrap() == 0.0)
        .map(|(i, _)| i)
        .collect();
    assert!(!zero_rows.is_empty());
    let log_rows: Vec<&str> = logs.lines().skip(1).collect();
    for i in zero_rows {
        let v: f64 = log_rows[i].split(',').nth(3).unwrap().parse().unwrap();
        assert!(v.is_finite() && v < (1e-300f64).ln(), "row {i}: {v}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(fmd(&with_base(&["verify", "theorem3"], &[])).status.code(), Some(0));
    let bad = ["predict", "--N", "100", "--a1", "70", "--a2", "60", "--pL", "0.1", "--pU", "0.7"];
    let out = fmd(&bad);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a1"));
    assert_eq!(fmd(&["predict", "--N", "100"]).status.code(), Some(2));
    assert_eq!(fmd(&["preset", "fig9"]).status.code(), Some(2));
    assert_eq!(fmd(&with_base(&["predict"], &["--completion", "cubic"])).status.code(), Some(2));
    assert_eq!(fmd(&with_base(&["reduce"], &["--M", "500"])).status.code(), Some(2));
    let status = Command::new(env!("CARGO_BIN_EXE_fmd"))
        .args(with_base(&["predict"], &[]))
        .env("FMD_THREADS", "zero")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn failed_verification_exits_3() {
    let limit = ["verify", "theorem6", "--N", "100", "--theta1", "0.2", "--theta2", "0.6", "--pL", "0.01", "--pU", "0.61"];
    let out = fmd(&limit);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // Weak completions jump straight to the bounds and do not approach the limit.
    let weak: Vec<&str> = limit.iter().copied().chain(["--completion", "weak"]).collect();
    let out = fmd(&weak);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains(",false"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verification failed"));
}

#[test]
fn reduce_lands_on_requested_length() {
    let out = fmd(&with_base(&["reduce"], &["--M", "40", "--completion", "strict"]));
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 42);
}

#[test]
fn sensitivity_emits_one_section_per_pu() {
    let args = ["sensitivity", "--N", "100", "--a1", "25", "--a2", "60", "--pL", "0.1", "--pU", "0.7", "--pU-list", "0.75,0.79,0.83", "--completion", "weak"];
    let text = stdout(&fmd(&args));
    let names: Vec<&str> = text.lines().filter(|l| l.starts_with("# ")).collect();
    assert_eq!(names, ["# pU_0.75", "# pU_0.79", "# pU_0.83"]);
}

#[test]
fn geometry_triples_meet_at_origin() {
    let text = stdout(&fmd(&["geometry", "--N", "8", "--a1", "2", "--a2", "5", "--pL", "0.2", "--pU", "0.7"]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let f: Vec<f64> = row.split(',').skip(8).map(|v| v.parse().unwrap()).collect();
        assert_eq!(f, [0.0, 0.0]);
    }
}

#[test]
fn small_presets_write_every_table() {
    let dir = tempfile::tempdir().unwrap();
    for (name, files) in [
        ("fig1", vec!["predict_linear", "predict_quartic", "predict_weak", "predict_strict"]),
        ("fig2-top", vec!["mass_linear", "mass_quartic", "mass_weak", "mass_strict"]),
        ("appendix1", vec!["mass_pU_0.75", "mass_pU_0.79", "mass_pU_0.83"]),
    ] {
        let target = dir.path().join(name);
        let out = fmd(&["preset", name, "--out", target.to_str().unwrap()]);
        assert!(out.status.success(), "{name}");
        for f in files {
            assert!(target.join(format!("{f}.csv")).is_file(), "{name}/{f}");
        }
    }
    let geometry = dir.path().join("appendix2.json");
    let out = fmd(&["preset", "appendix2", "--format", "json", "--out", geometry.to_str().unwrap()]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(geometry).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 6);
}

#[test]
fn fig4_preset_reports_adherent_peaks() {
    let out = fmd(&["preset", "fig4", "--format", "json"]);
    assert!(out.status.success());
    let notes = String::from_utf8_lossy(&out.stderr);
    assert!(notes.contains("local maxima of q: [23, 99980]"), "{notes}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["mass_L1"].as_array().unwrap().len(), 100_002);
    assert_eq!(doc["predict_L1"].as_array().unwrap().len(), 100_001);
}

#[test]
fn batch_runs_lines_and_numbers_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("p.csv");
    let good = dir.path().join("good.txt");
    fs::write(
        &good,
        format!(
            "# comment\n\npredict --N 8 --a1 2 --a2 5 --pL 0.1 --pU 0.7 --out {}\nverify theorem4 --N 8 --a1 2 --a2 5 --pL 0.1 --pU 0.7\n",
            out_path.display()
        ),
    )
    .unwrap();
    let out = fmd(&["batch", good.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&out_path).unwrap().lines().count(), 10);

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "predict --N 8 --a1 2 --a2 5 --pL 0.1 --pU 0.7\nmass --N 8 --a1 6 --a2 5 --pL 0.1 --pU 0.7\n").unwrap();
    let out = fmd(&["batch", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let unparsable = dir.path().join("typo.txt");
    fs::write(&unparsable, "predict --N 8\npredikt --N 8\n").unwrap();
    let out = fmd(&["batch", unparsable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
