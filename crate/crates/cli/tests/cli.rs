//! End-to-end checks of the scenario runner binary: worked-example
//! snapshot bytes, determinism, exit codes, and report formats.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anchorhash"))
}

fn run_script(dir: &Path, script: &str, extra: &[&str]) -> Output {
    let path = dir.join("scenario.txt");
    std::fs::write(&path, script).unwrap();
    bin()
        .args(extra)
        .arg("--script")
        .arg(&path)
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn worked_example_snapshot_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("state.json");
    let script = format!(
        "init a=7 w=7\nremove 6\nremove 5\nremove 1\ndump-state {}\n",
        snap.display()
    );
    let out = run_script(dir.path(), &script, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let body = std::fs::read_to_string(&snap).unwrap();
    assert!(body.contains("\"tier\":\"minimal\""));
    assert!(body.contains("\"anchor\":[0,4,0,0,0,5,6]"));
    let csv = stdout(&out);
    for line in csv.lines().filter(|l| l.contains("wrongful_fraction")) {
        assert!(line.contains(",0.0,"), "unexpected wrongful remaps: {line}");
    }
}

#[test]
fn reports_are_deterministic_outside_wall_columns() {
    let dir = tempfile::tempdir().unwrap();
    let script = "init a=64 w=64\nremove random\nremove random\nadd\nlookup n=500\nmeasure all keys=3000 trials=20\n";
    let mask = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                let fields: Vec<&str> = l.split(',').collect();
                fields[..fields.len() - 2].join(",")
            })
            .collect()
    };
    let first = run_script(dir.path(), script, &["--seed", "42"]);
    let second = run_script(dir.path(), script, &["--seed", "42"]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(mask(&stdout(&first)), mask(&stdout(&second)));

    let reseeded = run_script(dir.path(), script, &["--seed", "43"]);
    assert_ne!(mask(&stdout(&first)), mask(&stdout(&reseeded)));
}

#[test]
fn snapshot_round_trip_preserves_lookups() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("wrapped.json");
    let churn = format!(
        "init a=8 resources=alpha,beta,gamma\nremove beta\nadd delta\nlookup n=500\ndump-state {}\n",
        snap.display()
    );
    let first = run_script(dir.path(), &churn, &["--seed", "9"]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));

    let reload = format!(
        "init a=8 resources=alpha,beta,gamma\nload {}\nlookup n=500\n",
        snap.display()
    );
    let second = run_script(dir.path(), &reload, &["--seed", "9"]);
    assert_eq!(second.status.code(), Some(0), "{}", stderr(&second));

    let digest_of = |text: &str| -> String {
        text.lines()
            .find(|l| l.contains("lookup_digest"))
            .unwrap()
            .split(',')
            .nth(4)
            .unwrap()
            .to_string()
    };
    assert_eq!(digest_of(&stdout(&first)), digest_of(&stdout(&second)));
}

#[test]
fn truncated_snapshot_is_an_integrity_error() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("state.json");
    let dump = format!("init a=16 w=12\ndump-state {}\n", snap.display());
    assert_eq!(run_script(dir.path(), &dump, &[]).status.code(), Some(0));

    let full = std::fs::read(&snap).unwrap();
    std::fs::write(&snap, &full[..full.len() / 2]).unwrap();
    let load = format!("init a=4 w=4\nload {}\n", snap.display());
    let out = run_script(dir.path(), &load, &[]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("integrity error"));
}

#[test]
fn tampered_snapshot_fails_the_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("state.json");
    let dump = format!("init a=16 w=12\ndump-state {}\n", snap.display());
    assert_eq!(run_script(dir.path(), &dump, &[]).status.code(), Some(0));

    let body = std::fs::read_to_string(&snap).unwrap();
    std::fs::write(&snap, body.replace("\"working\":12", "\"working\":11")).unwrap();
    let load = format!("init a=4 w=4\nload {}\n", snap.display());
    let out = run_script(dir.path(), &load, &[]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("checksum"));
}

#[test]
fn tier_mismatch_is_an_execution_error() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("naive.json");
    let dump = format!("init a=16 w=12\ndump-state {}\n", snap.display());
    let out = run_script(dir.path(), &dump, &["--algo", "anchor-naive"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let load = format!("init a=4 w=4\nload {}\n", snap.display());
    let out = run_script(dir.path(), &load, &["--algo", "anchor"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("event 2"), "{err}");
    assert!(err.contains("naive") && err.contains("minimal"), "{err}");
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_script(dir.path(), "init a=8\nbogus 12\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"));

    let out = run_script(dir.path(), "", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no events"));

    let out = run_script(dir.path(), "remove 3\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("first event must be init"));
}

#[test]
fn execution_errors_name_the_event() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_script(dir.path(), "init a=4 w=4\nremove 9\n", &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("event 2"), "{}", stderr(&out));

    let out = run_script(
        dir.path(),
        "init resources=a,b,c\nmeasure complexity\n",
        &["--algo", "hrw"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("complexity"), "{}", stderr(&out));
}

#[test]
fn flag_mode_covers_every_algorithm() {
    for algo in ["anchor", "anchor-naive", "anchor-reduced", "hrw", "ring", "maglev"] {
        let out = bin()
            .args(["--algo", algo, "--w", "16", "--keys", "2000"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{algo}: {}", stderr(&out));
        let text = stdout(&out);
        assert!(text.starts_with("algo,scenario,event,metric,value,sample_n,std_error,wall_ms,mkps"));
        assert!(text.contains("oversubscription_percent"));
        assert!(text.contains("throughput_lookups"));
    }
}

#[test]
fn json_report_parses() {
    let out = bin()
        .args(["--algo", "ring", "--w", "10", "--keys", "1000", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["algorithm"], "ring");
    assert_eq!(report["w"], 10);
    assert!(report["rows"].as_array().unwrap().len() >= 3);
}
