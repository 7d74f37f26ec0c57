use std::path::Path;
use std::process::Command;

use serde_json::Value;

const CHARACTERIZE: &str = r#"command = "characterize"
seed = 7
[group]
generators = ["1/5"]
[characterize]
sigma = "3/10"
stages = 4
[probes]
list = ["1/5", "1/7"]
"#;

const VERIFY: &str = r#"command = "verify"
[group]
generators = ["1/5"]
[sequence]
report = "report.json"
[probes]
list = ["1/5", "1/7"]
sigma = "3/10"
tail_window = 27
block = 10
[output]
json = "verify.json"
csv_dir = "verify_csv"
"#;

fn circlechar(args: &[&str], dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_circlechar")).args(args).current_dir(dir).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn characterize_report_passes_verify_when_reingested() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("char.toml"), CHARACTERIZE).unwrap();
    std::fs::write(dir.path().join("verify.toml"), VERIFY).unwrap();

    let (code, err) = circlechar(&["characterize", "char.toml"], dir.path());
    assert_eq!(code, 0, "{err}");
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["command"], "characterize");
    assert_eq!(report["seed"], 7);
    assert!(report.get("wall_time_ms").is_none());
    let terms = report["result"]["sequence"]["terms"].as_array().unwrap().clone();
    assert!(!terms.is_empty());

    let (code, err) = circlechar(&["verify", "verify.toml"], dir.path());
    assert_eq!(code, 0, "{err}");
    let v = read_json(&dir.path().join("verify.json"));
    assert_eq!(v["result"]["source"], "report");
    assert_eq!(v["result"]["sequence"]["terms"].as_array().unwrap(), &terms);
    let probes = v["result"]["verify"]["probes"].as_array().unwrap();
    assert_eq!(probes[0]["expected"], "Converge0");
    assert_eq!(probes[0]["sup"], "0.00000000000000000000");
    assert_eq!(probes[1]["expected"], "Diverge");
    assert_eq!(probes[1]["every_block_witnessed"], true);

    let csv = std::fs::read_to_string(dir.path().join("verify_csv/probe_2.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n,k,norm_lower,norm_upper");
    assert_eq!(csv.lines().count(), terms.len() + 1);
}

#[test]
fn identical_runs_write_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        std::fs::write(d.path().join("char.toml"), CHARACTERIZE).unwrap();
        assert_eq!(circlechar(&["run", "char.toml"], d.path()).0, 0);
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("report.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn timing_flag_adds_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("char.toml"), CHARACTERIZE).unwrap();
    assert_eq!(circlechar(&["characterize", "char.toml", "--timing"], dir.path()).0, 0);
    assert!(read_json(&dir.path().join("report.json"))["wall_time_ms"].is_number());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).unwrap();

    write("sigma.toml", "command = \"characterize\"\n[group]\ngenerators = [\"1/5\"]\n[characterize]\nsigma = \"1/2\"\n");
    let (code, err) = circlechar(&["run", "sigma.toml"], dir.path());
    assert_eq!(code, 1);
    assert!(err.contains("σ must be < 1/3"), "{err}");

    write("unknown.toml", "command = \"characterize\"\ncolour = 3\n");
    assert_eq!(circlechar(&["run", "unknown.toml"], dir.path()).0, 1);

    write(
        "relation.toml",
        "command = \"realize\"\n[realize]\npairs = [[\"1/2\", \"1/3\"]]\nn_max = 5\n",
    );
    let (code, err) = circlechar(&["run", "relation.toml"], dir.path());
    assert_eq!(code, 1, "{err}");

    write(
        "budget.toml",
        "command = \"characterize\"\n[group]\ngenerators = [\"sqrt2\"]\n[characterize]\nsigma = \"1/4\"\nstages = 6\nbudget = 3\n",
    );
    let (code, err) = circlechar(&["run", "budget.toml"], dir.path());
    assert_eq!(code, 2, "{err}");

    write("blocked.toml", "command = \"padic-demo\"\n[padic]\np = 3\n[output]\njson = \"blocker/report.json\"\n");
    write("blocker", "a file where a directory is needed");
    let (code, err) = circlechar(&["run", "blocked.toml"], dir.path());
    assert_eq!(code, 3, "{err}");
}
