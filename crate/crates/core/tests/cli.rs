use std::fs;
use std::path::Path;
use std::process::Command;

fn beamnoma(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_beamnoma"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let out = dir.join(name);
    let out_str = out.to_str().unwrap();
    let mut argv = args.to_vec();
    argv.extend(["--out", out_str]);
    let status = beamnoma(&argv);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    fs::read_to_string(out).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(beamnoma(&[]).status.code(), Some(2));
    assert_eq!(beamnoma(&["plot"]).status.code(), Some(2));
    assert_eq!(beamnoma(&["avg-sum-rate", "--n-bs", "0"]).status.code(), Some(2));
    assert_eq!(beamnoma(&["avg-sum-rate", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(beamnoma(&["--help"]).status.code(), Some(0));
    let missing = beamnoma(&["gain-region", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/cfg.json"));
}

#[test]
fn bad_config_values_fail_with_key_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"cell_radius_m": -5}"#).unwrap();
    let out = beamnoma(&["avg-sum-rate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cell_radius_m"));

    fs::write(&cfg, "{\n\"trials\": 3,,\n}").unwrap();
    let out = beamnoma(&["avg-sum-rate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn probability_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["noma-probability", "--n-bs", "16,32,64", "--trials", "3000", "--seed", "7"];
    let first = run_to(dir.path(), "a.csv", &[&args[..], &["--threads", "1"]].concat());
    let second = run_to(dir.path(), "b.csv", &[&args[..], &["--threads", "4"]].concat());
    assert_eq!(first, second);
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines[0], "n_bs,policy,probability,std_err,trials");
    assert_eq!(lines.len(), 1 + 3 * 2);

    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["master_seed"], 7);
    assert_eq!(meta["config"]["trials"], 3000);
    assert_eq!(meta["config"]["cell_radius_m"], 200.0);
    assert!(!dir.path().join("a.csv.tmp").exists());
}

#[test]
fn sum_rate_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["avg-sum-rate", "--n-bs", "16,64", "--trials", "300"];
    let first = run_to(dir.path(), "r1.csv", &[&args[..], &["--threads", "1"]].concat());
    let second = run_to(dir.path(), "r2.csv", &[&args[..], &["--threads", "3"]].concat());
    assert_eq!(first, second);
    assert_eq!(first.lines().count(), 1 + 2 * 4);
    assert!(first.contains(",noma_with_control,"));
}

#[test]
fn gain_region_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run_to(dir.path(), "g.csv", &["gain-region"]);
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let condition = line.rsplit(',').next().unwrap();
        assert!(condition == "0" || condition == "1", "{line}");
        rows += 1;
    }
    assert_eq!(rows, 200 * 200);
    let boundary = fs::read_to_string(dir.path().join("g.csv.boundary.csv")).unwrap();
    assert!(boundary.starts_with("curve,abs_psi12,alpha12_db\n"));

    let json = run_to(dir.path(), "g.json", &["gain-region", "--format", "json"]);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["table"]["kind"], "gain_region");
}

#[test]
fn beam_pattern_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run_to(dir.path(), "p.csv", &["beam-pattern"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta_deg,n_active,response_db"));
    let peaks: Vec<&str> = lines.filter(|l| l.starts_with("90,")).collect();
    assert_eq!(peaks, ["90,25,13.9794001", "90,16,12.0411998"]);
}
