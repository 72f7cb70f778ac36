use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use bellkit::analysis::{chsh_s, classify_bell, ChshAngles, DEFAULT_RESAMPLES};
use bellkit::cli::run;
use bellkit::io::read_dataset;
use bellkit::jones::{hwp_plan, BellLabel};
use bellkit::source::{generate_dataset, SourceConfig};
use bellkit::tomography::{reconstruct, tomo_settings, Method, MleConfig, TomographyData};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run_capture(args: &[&str]) -> Result<String, (i32, String)> {
    let mut out = Vec::new();
    run(std::iter::once("bellkit").chain(args.iter().copied()), &mut out).map_err(|e| (e.code, e.message))?;
    Ok(String::from_utf8(out).unwrap())
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bellkit")).args(args).output().unwrap()
}

#[test]
fn simulate_is_byte_identical_for_equal_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("run{i}.csv"))).collect();
    for p in &paths {
        let out = bin(&["simulate", "--state", "psi+", "--purity", "0.9618", "--rate", "715", "--time", "1", "--seed", "7", "--settings", "basic", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(&paths[0]).unwrap();
    let b = fs::read(&paths[1]).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.starts_with("setting_a,setting_b,counts,duration_s,label\n"));

    let other = run_capture(&["simulate", "--seed", "8"]).unwrap();
    assert_ne!(other, text);
}

#[test]
fn simulated_counts_stay_in_poisson_envelope() {
    let text = run_capture(&["simulate", "--state", "psi+", "--seed", "7", "--settings", "basic"]).unwrap();
    let records = read_dataset(text.as_bytes()).unwrap();
    let cfg = SourceConfig::default();
    let means = bellkit::source::expected_dataset(&cfg, &[], &bellkit::source::basic_settings()).unwrap();
    for (r, mu) in records.iter().zip(means) {
        let dev = (r.counts as f64 - mu).abs();
        assert!(dev <= 5.0 * mu.sqrt().max(1.0), "{r:?} vs mean {mu}");
    }
}

#[test]
fn csv_round_trip_matches_in_memory_pipeline() {
    let angles = ChshAngles::default();
    let text = run_capture(&["simulate", "--state", "phi-", "--settings", "chsh", "--seed", "11"]).unwrap();
    let from_file = read_dataset(text.as_bytes()).unwrap();
    let cfg = SourceConfig { seed: 11, ..SourceConfig::default() };
    let in_memory = generate_dataset(&cfg, &hwp_plan(BellLabel::PhiMinus), &angles.settings()).unwrap();
    let counts = |rs: &[bellkit::CountRecord]| rs.iter().map(|r| r.counts).collect::<Vec<_>>();
    assert_eq!(counts(&from_file), counts(&in_memory));

    let a = chsh_s(&from_file, BellLabel::PhiMinus, &angles, DEFAULT_RESAMPLES, 11).unwrap();
    let b = chsh_s(&in_memory, BellLabel::PhiMinus, &angles, DEFAULT_RESAMPLES, 11).unwrap();
    assert_eq!(a.s, b.s);
    assert_eq!(a.sigma_s, b.sigma_s);

    let json = run_capture(&["--format", "json", "--seed", "11", "chsh", "--simulate", "--state", "phi-"]).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["S"].as_f64().unwrap(), b.s);
    assert_eq!(v["sigma_S"].as_f64().unwrap(), b.sigma_s);

    let text = run_capture(&["simulate", "--state", "psi-", "--settings", "tomo", "--seed", "4"]).unwrap();
    let from_file = read_dataset(text.as_bytes()).unwrap();
    let cfg = SourceConfig { seed: 4, ..SourceConfig::default() };
    let in_memory = generate_dataset(&cfg, &hwp_plan(BellLabel::PsiMinus), &tomo_settings()).unwrap();
    let target = bellkit::bell_state(BellLabel::PsiMinus);
    let ra = reconstruct(&TomographyData::from_records(&from_file).unwrap(), Method::Mle, &target, &MleConfig::default()).unwrap();
    let rb = reconstruct(&TomographyData::from_records(&in_memory).unwrap(), Method::Mle, &target, &MleConfig::default()).unwrap();
    assert_eq!(ra.rho, rb.rho);
}

#[test]
fn json_dataset_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basic.json");
    run_capture(&["--format", "json", "--out", path.to_str().unwrap(), "simulate", "--state", "phi+", "--seed", "2"]).unwrap();
    let out = run_capture(&["classify", "--counts", path.to_str().unwrap()]).unwrap();
    assert!(out.lines().nth(1).unwrap().starts_with("phi+,true"), "{out}");
}

#[test]
fn classify_measured_fixtures() {
    for (file, token) in [
        ("measured_psi_plus.csv", "psi+"),
        ("measured_psi_minus.csv", "psi-"),
        ("measured_phi_plus.csv", "phi+"),
        ("measured_phi_minus.csv", "phi-"),
    ] {
        let out = run_capture(&["--format", "json", "classify", "--counts", fixture(file).to_str().unwrap()]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["label"], token);
        assert_eq!(v["confident"], true);
        let records = read_dataset(fs::File::open(fixture(file)).unwrap()).unwrap();
        assert_eq!(classify_bell(&records).unwrap().label.token(), token);
    }
}

#[test]
fn tomo_on_empty_file_lists_every_setting() {
    let out = bin(&["tomo", "--counts", fixture("empty.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    let listed = err.split("missing settings: ").nth(1).unwrap();
    let names: Vec<&str> = listed.trim().split(", ").collect();
    assert_eq!(names.len(), 36);
    assert_eq!(names[0], "HH");
    assert_eq!(names[35], "LL");
}

#[test]
fn malformed_csv_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "setting_a,setting_b,counts,duration_s,label\nH,H,10,1,\nH,V,ten,1,\n").unwrap();
    let out = bin(&["classify", "--counts", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["transform", "--input", "psi+", "--gate", "Q"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bin(&["simulate", "--purity", "2"]).status.code(), Some(3));
    // a sweep whose plate angles coincide modulo 90° cannot be fitted
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.csv");
    let mut text = String::from("setting_a,setting_b,counts,duration_s\n");
    for _ in 0..6 {
        text.push_str("H,hwp:0,100,1\n");
    }
    fs::write(&path, text).unwrap();
    assert_eq!(bin(&["curve", "--counts", path.to_str().unwrap()]).status.code(), Some(4));
    assert_eq!(bin(&["classify", "--counts", "/nonexistent/file.csv"]).status.code(), Some(1));
    assert!(bin(&["--help"]).status.success());
}

#[test]
fn transform_examples() {
    let out = bin(&["transform", "--input", "psi+", "--hwp", "a:0", "--hwp", "b:45"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("result: phi- (overlap 1.000000000000)"));
}

#[test]
fn curve_files_per_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("fringe.csv");
    run_capture(&["--out", base.to_str().unwrap(), "curve", "--state", "phi+", "--step", "5"]).unwrap();
    for alpha in ["0", "22.5", "45", "67.5"] {
        let text = fs::read_to_string(dir.path().join(format!("fringe_alpha{alpha}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("two_beta_deg,probability"));
        assert_eq!(lines.count(), 37);
    }
}

#[test]
fn curve_simulation_feeds_visibility_fit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    // build a measured sweep through the library writer, then fit it from the CLI
    let settings: Vec<_> = (0..36)
        .map(|k| {
            (
                bellkit::AnalyzerSetting::Named(bellkit::NamedSetting::H),
                bellkit::AnalyzerSetting::Hwp((k as f64 * 5.0).to_radians()),
            )
        })
        .collect();
    let records = generate_dataset(&SourceConfig { seed: 9, ..SourceConfig::default() }, &[], &settings).unwrap();
    bellkit::io::write_dataset_csv(&records, fs::File::create(&path).unwrap()).unwrap();
    let out = run_capture(&["--format", "json", "curve", "--counts", path.to_str().unwrap()]).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let vis = v["visibility"].as_f64().unwrap();
    let sigma = v["sigma"].as_f64().unwrap();
    assert!((vis - 0.9618).abs() < 4.0 * sigma, "{vis} ± {sigma}");
}
