use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mecode(dir: &Path, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mecode"));
    cmd.current_dir(dir).args(args);
    for (key, _) in std::env::vars() {
        if key.starts_with("MECODE_") {
            cmd.env_remove(key);
        }
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn optimize_fixed_writes_codebook_and_scan() {
    let dir = tempfile::tempdir().unwrap();
    let out = mecode(
        dir.path(),
        &["optimize", "--kind", "fixed", "--m", "8", "--beta0", "1", "--beta1", "5", "-o", "cb.json", "--scan", "scan.csv"],
    );
    assert!(out.status.success(), "{out:?}");
    let cb: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cb.json")).unwrap()).unwrap();
    assert_eq!(cb["kind"], "fixed");
    assert_eq!(cb["n"], 3);
    assert_eq!(cb["entries"].as_array().unwrap().len(), 8);
    let scan = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert!(scan.starts_with("n,lmin,cost\n3,3,9\n"), "{scan}");
}

#[test]
fn optimize_prefix_from_probs_json() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.json"), r#"{"probs":[0.125,0.125,0.125,0.125,0.125,0.125,0.125,0.125]}"#).unwrap();
    let out = mecode(
        dir.path(),
        &["--json", "optimize", "--kind", "prefix", "--probs", "p.json", "--beta0", "1", "--beta1", "5", "-o", "cb.json"],
    );
    assert!(out.status.success(), "{out:?}");
    let report = json_of(&out);
    assert!((report["metrics"]["beta_code"].as_f64().unwrap() - 7.75).abs() < 1e-12);
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.json"), r#"{"probs":[0.5,0.5],"extra":1}"#).unwrap();
    let out = mecode(
        dir.path(),
        &["--json", "optimize", "--kind", "prefix", "--probs", "p.json", "--beta0", "1", "--beta1", "2", "-o", "cb.json"],
    );
    assert!(!out.status.success());
    assert!(json_of(&out)["error"].is_string());
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let opt = mecode(dir.path(), &["optimize", "--kind", "prefix", "--m", "8", "--beta0", "1", "--beta1", "5", "-o", "cb.json"]);
    assert!(opt.status.success(), "{opt:?}");
    fs::write(dir.path().join("sym.txt"), "0 1 2 3\n7 6 5 4 0\n").unwrap();
    assert!(mecode(dir.path(), &["encode", "-c", "cb.json", "-i", "sym.txt", "-o", "s.bin"]).status.success());
    let bin = fs::read(dir.path().join("s.bin")).unwrap();
    let bits = u64::from_le_bytes(bin[..8].try_into().unwrap());
    assert_eq!(bin.len() as u64, 8 + bits.div_ceil(8));
    assert!(mecode(dir.path(), &["decode", "-c", "cb.json", "-i", "s.bin", "-o", "back.txt"]).status.success());
    assert_eq!(fs::read_to_string(dir.path().join("back.txt")).unwrap(), "0 1 2 3 7 6 5 4 0\n");
}

#[test]
fn decode_rejects_truncated_stream() {
    let dir = tempfile::tempdir().unwrap();
    mecode(dir.path(), &["optimize", "--kind", "fixed", "--m", "8", "--beta0", "1", "--beta1", "5", "-o", "cb.json"]);
    fs::write(dir.path().join("s.bin"), [9u8, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap();
    assert!(!mecode(dir.path(), &["decode", "-c", "cb.json", "-i", "s.bin", "-o", "back.txt"]).status.success());
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        mecode(dir.path(), &["sweep", "--var", "gamma", "--grid", "1:100:log25", "--m", "8", "--kinds", "fixed,prefix", "-o", "f.csv"]);
    assert!(out.status.success(), "{out:?}");
    let csv = fs::read_to_string(dir.path().join("f.csv")).unwrap();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("kind,m,gamma,n_or_dp,l_src,eta,beta_code,epsilon"));
    assert_eq!(lines.count(), 50);
}

#[test]
fn rfid_gamma_emits_cost_model() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--json", "rfid-gamma", "--pt", "4", "--gt", "1.64", "--gr", "1.64", "--freq", "915e6", "--r", "10", "--lp", "0.5",
        "--rant", "50", "--nstages", "3", "--vt", "0.2", "--ptag", "1e-5", "--t0", "12.5e-6", "--t1", "12.5e-6",
        "--emit-costmodel", "cm.json",
    ];
    let out = mecode(dir.path(), &args);
    assert!(out.status.success(), "{out:?}");
    let cm: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cm.json")).unwrap()).unwrap();
    assert!(cm["beta0"].as_f64().unwrap() > 0.0);
    let opt = mecode(dir.path(), &["optimize", "--kind", "fixed", "--m", "8", "--cost-model", "cm.json", "-o", "cb.json"]);
    assert!(opt.status.success(), "{opt:?}");
}

#[test]
fn reproduce_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for out_dir in ["a", "b"] {
        let out = mecode(dir.path(), &["reproduce", "all", out_dir]);
        assert!(out.status.success(), "{out:?}");
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 8);
    for name in names {
        let a = fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs");
    }
    let table4 = fs::read_to_string(dir.path().join("a/table4.csv")).unwrap();
    assert!(table4.ends_with("average cost,9,31/4\n"), "{table4}");
}

#[test]
fn selftest_passes_for_several_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let verdicts: Vec<Value> = ["0", "1", "99"]
        .iter()
        .map(|seed| {
            let out = mecode(dir.path(), &["--json", "selftest", "--seed", seed]);
            assert!(out.status.success(), "{out:?}");
            json_of(&out)["results"].as_array().unwrap().iter().map(|r| r["passed"].clone()).collect()
        })
        .collect();
    assert!(verdicts.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn selftest_reports_injected_fault_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = mecode(dir.path(), &["selftest", "--inject-fault", "codec-roundtrip"]);
    assert!(!out.status.success());
    let text = stdout(&out);
    assert!(text.contains("FAIL  codec-roundtrip"), "{text}");
    assert_eq!(text.matches("FAIL").count(), 1);
}

#[test]
fn env_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["--json", "optimize", "--kind", "fixed", "--m", "8", "--beta0", "1", "-o", "cb.json"];
        args.extend_from_slice(extra);
        let out = Command::new(env!("CARGO_BIN_EXE_mecode"))
            .current_dir(dir.path())
            .args(&args)
            .env("MECODE_BETA1", "2")
            .output()
            .unwrap();
        assert!(out.status.success(), "{out:?}");
        json_of(&out)["metrics"]["beta_code"].as_f64().unwrap()
    };
    assert!((run(&[]) - 4.5).abs() < 1e-12);
    assert!((run(&["--beta1", "5"]) - 9.0).abs() < 1e-12);
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!mecode(dir.path(), &["optimize", "--kind", "bogus", "--m", "3", "-o", "x.json"]).status.success());
    assert!(!mecode(dir.path(), &["optimize", "--kind", "fixed", "--m", "3", "--beta0", "-1", "--beta1", "1", "-o", "x.json"])
        .status
        .success());
    assert!(!mecode(dir.path(), &["encode", "-c", "missing.json", "-i", "s.txt", "-o", "s.bin"]).status.success());
    assert!(!mecode(dir.path(), &["reproduce", "table3", "out"]).status.success());
}
