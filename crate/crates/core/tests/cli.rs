use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn srg_lab(args: &[&str], out: &Path, envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_srg-lab"));
    cmd.args(args).arg("--out").arg(out).env_remove("SRG_LAB_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verdicts_map_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = fixture("sector_disk.json");
    let lhp = fixture("left_half_plane.json");
    let base = ["cert-hard", "--p", d.as_str(), "--inv-c", lhp.as_str()];

    let asserted = [&base[..], &["--assert", "well_posedness", "--assert", "p_stable"]].concat();
    let out = srg_lab(&asserted, &tmp.path().join("ok"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let cert: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("ok/certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["verdict"], "certified");
    assert!((cert["margin"].as_f64().unwrap() - 0.25).abs() < 1e-9);

    // Unchecked premises block certification.
    let out = srg_lab(&base, &tmp.path().join("unchecked"), &[]);
    assert_eq!(out.status.code(), Some(2));

    // The inverse of a disk around 0 reaches infinity.
    let around_zero = write(tmp.path(), "disk.json", r#"{"type": "disk", "center": 0.0, "radius": 1.0}"#);
    let out = srg_lab(
        &["cert-hard", "--p", &d, "--inv-c", &around_zero, "--invert-c", "--assert", "well_posedness", "--assert", "p_stable"],
        &tmp.path().join("indet"),
        &[],
    );
    assert_eq!(out.status.code(), Some(3));

    let out = srg_lab(&["cert-hard", "--p", "/nonexistent.json", "--inv-c", &lhp], &tmp.path().join("err"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent.json"));
    assert!(!tmp.path().join("err").exists());
}

#[test]
fn unknown_config_keys_are_rejected_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "cfg.json", "{\n  \"excitation\": {\"ensembel_size\": 3}\n}\n");
    let out = srg_lab(&["srg-soft", "--system", &fixture("lag.json"), "--config", &cfg], &tmp.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cfg.json:2:"), "{err}");
    assert!(err.contains("unknown field `ensembel_size`"), "{err}");
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn failed_run_leaves_existing_artifacts_untouched() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("o");
    let lag = fixture("lag.json");
    let out = srg_lab(&["srg-soft", "--system", &lag, "--ensemble-size", "10"], &dir, &[]);
    assert_eq!(out.status.code(), Some(0));
    let before = files(&dir);

    // Grid validation happens after the clouds are loaded.
    let cloud = dir.join("srg_soft.json").to_string_lossy().into_owned();
    let out = srg_lab(
        &["cert-soft", "--p", &cloud, "--inv-c", &cloud, "--invert-c", "--tau-grid", "0.5,0.9"],
        &dir,
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(files(&dir), before);
}

#[test]
fn thread_count_does_not_change_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("o");
    let args = ["srg-hard", "--system", &fixture("corollary_p.json"), "--ensemble-size", "40"];
    let mut runs = Vec::new();
    for threads in ["1", "4"] {
        let out = srg_lab(&args, &dir, &[("SRG_LAB_THREADS", threads)]);
        assert_eq!(out.status.code(), Some(0));
        runs.push(files(&dir));
    }
    assert_eq!(runs[0], runs[1]);

    let out = srg_lab(&args, &tmp.path().join("bad"), &[("SRG_LAB_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_override_changes_samples() {
    let tmp = tempfile::tempdir().unwrap();
    let lag = fixture("lag.json");
    let run = |seed: &str, name: &str| {
        let dir = tmp.path().join(name);
        let out = srg_lab(&["srg-soft", "--system", &lag, "--ensemble-size", "10", "--seed", seed], &dir, &[]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(dir.join("srg_soft.csv")).unwrap()
    };
    assert_ne!(run("1", "a"), run("2", "b"));

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("a/run.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["command"], "srg-soft");
}

#[test]
fn simulate_writes_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("o");
    let out = srg_lab(
        &["simulate", "--system-p", &fixture("lag.json"), "--system-c", &fixture("corollary_c.json"), "--step", "1"],
        &dir,
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let trace = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("t,d1_0,u1_0,u2_0,y1_0,y2_0"));
    // Zero state: the lag output starts at 0.
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert_eq!(first[4], 0.0);
}

#[test]
fn divergent_gain_estimate_serializes_infinity() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("o");
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{"gain": {"excitation": {"ensemble_size": 2, "horizon": 20.0}, "amplitudes": [1.0]}}"#,
    );
    let out = srg_lab(
        &["gain-estimate", "--system-p", &fixture("integrator.json"), "--system-c", &fixture("identity.json"), "--config", &cfg],
        &dir,
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let est: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("gain_estimate.json")).unwrap()).unwrap();
    assert_eq!(est["divergent"], true);
    assert_eq!(est["sup_gain_over_pairs"], "infinity");
}
