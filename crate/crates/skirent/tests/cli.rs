//! End-to-end tests of the `skirent` binary: file formats, exit codes, and
//! byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skirent"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(tag);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const HINDSIGHT: &str = r#"{"N": 32, "atoms": [[8, 0.5], [32, 0.5]]}"#;
const POINT3: &str = r#"{"N": 10, "atoms": [[3, 1.0]]}"#;
const POINT7: &str = r#"{"N": 10, "atoms": [[7, 1.0]]}"#;

#[test]
fn opt_reports_policy_cost_and_hindsight() {
    let dir = workdir("opt");
    let dist = write(&dir, "hindsight.json", HINDSIGHT);
    let out = bin().arg("opt").arg(&dist).args(["--b", "16"]).output().unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("optimal policy: A_0"), "{text}");
    assert!(text.contains("expected cost: 16"), "{text}");
    assert!(text.contains("hindsight cost: 12"), "{text}");
}

#[test]
fn emd_prints_distance_and_writes_plan() {
    let dir = workdir("emd");
    let a = write(&dir, "a.json", POINT3);
    let b = write(&dir, "b.json", POINT7);
    let plan = dir.join("plan.csv");
    let out = bin()
        .arg("emd")
        .arg(&a)
        .arg(&b)
        .arg("--plan")
        .arg(&plan)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("emd: 4"));
    assert_eq!(fs::read_to_string(&plan).unwrap(), "x,y,mass\n3,7,1\n");
}

#[test]
fn run_emits_csv_and_json() {
    let dir = workdir("run");
    let phat = write(&dir, "phat.json", POINT3);
    let truth = write(&dir, "truth.json", POINT7);
    let out = bin()
        .args(["run", "--pred", "main"])
        .arg("--phat")
        .arg(&phat)
        .arg("--truth")
        .arg(&truth)
        .args(["--b", "16", "--id", "case"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance_id,b,predictor,emd,alg_policy,opt_policy,alg_cost,opt_cost,diff,ratio_sqrt,ratio_blog"
    );
    assert!(lines.next().unwrap().starts_with("case,16,main,4,7,7,"));

    let out = bin()
        .args(["run", "--pred", "classical", "--format", "json"])
        .arg("--phat")
        .arg(&phat)
        .arg("--truth")
        .arg(&truth)
        .args(["--b", "16"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed[0]["predictor"], "classical");
    assert_eq!(parsed[0]["alg_policy"], "15");
}

#[test]
fn unknown_predictor_is_a_usage_error() {
    let dir = workdir("badpred");
    let phat = write(&dir, "phat.json", POINT3);
    let out = bin()
        .args(["run", "--pred", "nope"])
        .arg("--phat")
        .arg(&phat)
        .arg("--truth")
        .arg(&phat)
        .args(["--b", "16"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweeps_are_byte_deterministic_and_seed_sensitive() {
    let dir = workdir("sweep");
    let spec = write(
        &dir,
        "spec.json",
        r#"{"base_truth": {"N": 32, "atoms": [[8, 0.5], [32, 0.5]]},
            "b": 16, "emd_targets": [0.5, 1.0, 2.0], "seed": 7, "predictor": "main"}"#,
    );
    let run = || bin().arg("sweep").arg("--spec").arg(&spec).output().unwrap();
    let first = run();
    let second = run();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let overridden = bin()
        .arg("sweep")
        .arg("--spec")
        .arg(&spec)
        .env("SKIRENT_SEED", "99")
        .output()
        .unwrap();
    assert!(overridden.status.success());
    assert_ne!(first.stdout, overridden.stdout);
    assert!(stdout_of(&overridden).contains("sweep-s99-000"));
}

#[test]
fn adversary_emits_files_and_self_checks() {
    let dir = workdir("adversary");
    let out = bin()
        .args(["adversary", "--family", "thm7", "--b", "16"])
        .arg("--out-dir")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("self-check passed for thm7-b16"));
    assert!(dir.join("thm7-b16-prediction.json").exists());
    assert!(dir.join("thm7-b16-truth-00.json").exists());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("thm7-b16-family.json")).unwrap())
            .unwrap();
    assert_eq!(meta["predicted_opt"], "23");

    // The emitted prediction round-trips through the loader.
    let reload = bin()
        .arg("opt")
        .arg(dir.join("thm7-b16-prediction.json"))
        .args(["--b", "16"])
        .output()
        .unwrap();
    assert!(stdout_of(&reload).contains("optimal policy: A_23"));
}

#[test]
fn adversary_boundary_delta_fails_self_check_with_exit_one() {
    let dir = workdir("adversary0");
    let out = bin()
        .args(["adversary", "--family", "thm4", "--b", "16", "--delta", "0"])
        .arg("--out-dir")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).contains("FAIL delta-strictly-positive"));
}

#[test]
fn adversary_rejects_infeasible_parameters_as_usage_errors() {
    let dir = workdir("adversary-bad");
    let out = bin()
        .args(["adversary", "--family", "thm5", "--b", "15"])
        .arg("--out-dir")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_accepts_a_corpus_directory() {
    let dir = workdir("verify");
    write(
        &dir,
        "inst-000.json",
        r#"{"id": "inst-000", "b": 16,
            "phat": {"N": 10, "atoms": [[3, 1.0]]},
            "truth": {"N": 10, "atoms": [[7, 1.0]]}}"#,
    );
    write(
        &dir,
        "inst-001.json",
        r#"{"id": "inst-001", "b": 64,
            "phat": {"N": 32, "atoms": [[8, 0.5], [32, 0.5]]},
            "truth": {"N": 32, "atoms": [[8, 0.5], [32, 0.5]]}}"#,
    );
    let out = bin().arg("verify").arg("--corpus").arg(&dir).output().unwrap();
    let text = stdout_of(&out);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("all passed"), "{text}");
    assert!(text.contains("PASS policy/optimality-certificate"), "{text}");
}

#[test]
fn verify_rejects_an_empty_corpus_directory() {
    let dir = workdir("verify-empty");
    let out = bin().arg("verify").arg("--corpus").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
