//! End-to-end checks of the scenario runner: config handling, artifact
//! schemas, process exit codes, and the worker-thread override.

use std::path::Path;
use std::process::Command;

use rdlab::runner::{parse_config, run, CSV_HEADER};

fn write_scenario(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn simulate_equilibrium_config(out_dir: &Path) -> String {
    format!(
        r#"
mode = "simulate"

[domain]
dimension = 1
lengths = [1.0]

[grid]
cells = [48]

[diffusion]
d1 = 1.0
d2 = 0.5
d3 = 2.0

[initial]
kind = "constant"
values = [1.0, 1.0, 1.0, 1.0]

[integrator]
dt_max = 1e-2
t_end = 0.5
sample_every = 0.05

[output]
dir = "{}"
"#,
        out_dir.display()
    )
}

#[test]
fn simulate_from_equilibrium_keeps_entropy_at_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = parse_config(&simulate_equilibrium_config(tmp.path())).unwrap();
    run(&cfg).unwrap();
    let csv = std::fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    let mut rows = 0;
    for line in lines {
        let h: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(h.abs() <= 1e-12, "entropy column {h} out of tolerance");
        rows += 1;
    }
    assert!(rows >= 10);
}

#[test]
fn equilibrium_mode_prints_the_closed_form() {
    let cfg = parse_config(
        r#"
mode = "equilibrium"

[masses]
m13 = 1.0
m14 = 2.0
m23 = 3.0
volume = 1.0
"#,
    )
    .unwrap();
    let summary = run(&cfg).unwrap();
    let line = &summary.messages[0];
    assert!(line.contains("0.4") && line.contains("2.4") && line.contains("0.6"));
    assert!(line.contains("1.6"), "unexpected output: {line}");
}

#[test]
fn lab_report_has_the_documented_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let body = format!(
        r#"
mode = "lab-ckp"
seed = 3

[domain]
dimension = 1
lengths = [1.0]

[grid]
cells = [24]

[masses]
m13 = 2.0
m14 = 2.0
m23 = 2.0

[sampler]
roughness = 3
amplitude = 0.6
samples = 64

[output]
dir = "{}"
"#,
        tmp.path().display()
    );
    let cfg = parse_config(&body).unwrap();
    run(&cfg).unwrap();
    let text = std::fs::read_to_string(tmp.path().join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["constant"], "c_ckp");
    assert_eq!(json["kind"], "inf");
    assert!(json["value"].as_f64().unwrap() > 0.0);
    assert_eq!(json["samples"], 64);
    assert_eq!(json["seed"], 3);
    assert!(json["extremal_index"].is_u64());
    assert_eq!(json["config_echo"]["mode"], "lab-ckp");
}

#[test]
fn binary_exit_codes_follow_the_contract() {
    let bin = env!("CARGO_BIN_EXE_rdlab");
    let tmp = tempfile::tempdir().unwrap();

    // Valid equilibrium scenario: exit 0.
    let good = write_scenario(
        tmp.path(),
        "good.toml",
        "mode = \"equilibrium\"\n\n[masses]\nm13 = 2.0\nm14 = 2.0\nm23 = 2.0\n",
    );
    let out = Command::new(bin).arg(&good).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("equilibrium: (1, 1, 1, 1)"));

    // Config error: exit 2.
    let bad = write_scenario(
        tmp.path(),
        "bad.toml",
        "mode = \"equilibrium\"\n\n[masses]\nm13 = -2.0\nm14 = 2.0\nm23 = 2.0\n",
    );
    let out = Command::new(bin).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("m13"));

    // Unreadable scenario path: exit 2.
    let out = Command::new(bin)
        .arg(tmp.path().join("missing.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Totals without a positive equilibrium are rejected as config errors.
    let degenerate = write_scenario(
        tmp.path(),
        "degenerate.toml",
        "mode = \"equilibrium\"\n\n[masses]\nm13 = 5.0\nm14 = 2.0\nm23 = 2.0\n",
    );
    let out = Command::new(bin).arg(&degenerate).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("no positive equilibrium"));

    // A lab sweep whose samples are all degenerate fails numerically: exit 3.
    let stuck = write_scenario(
        tmp.path(),
        "stuck.toml",
        &format!(
            r#"
mode = "lab-beta"

[domain]
dimension = 1
lengths = [1.0]

[grid]
cells = [16]

[diffusion]
d1 = 1.0
d2 = 1.0
d3 = 1.0

[masses]
m13 = 2.0
m14 = 2.0
m23 = 2.0

[sampler]
roughness = 0
amplitude = 0.0
samples = 10

[output]
dir = "{}"
"#,
            tmp.path().display()
        ),
    );
    let out = Command::new(bin).arg(&stuck).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn thread_count_override_does_not_change_results() {
    let bin = env!("CARGO_BIN_EXE_rdlab");
    let tmp = tempfile::tempdir().unwrap();
    let body = |dir: &Path| {
        format!(
            r#"
mode = "lab-beta"
seed = 11

[domain]
dimension = 1
lengths = [1.0]

[grid]
cells = [24]

[diffusion]
d1 = 1.0
d2 = 0.5
d3 = 2.0

[masses]
m13 = 2.0
m14 = 2.0
m23 = 2.0

[sampler]
roughness = 4
amplitude = 0.7
samples = 500

[output]
dir = "{}"
"#,
            dir.display()
        )
    };
    let one = tmp.path().join("one");
    let four = tmp.path().join("four");
    std::fs::create_dir_all(&one).unwrap();
    std::fs::create_dir_all(&four).unwrap();
    let cfg_one = write_scenario(tmp.path(), "one.toml", &body(&one));
    let cfg_four = write_scenario(tmp.path(), "four.toml", &body(&four));

    let out = Command::new(bin)
        .arg(&cfg_one)
        .env("RDLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let out = Command::new(bin)
        .arg(&cfg_four)
        .env("RDLAB_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(one.join("report.json")).unwrap()).unwrap();
    let b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(four.join("report.json")).unwrap()).unwrap();
    assert_eq!(a["value"], b["value"]);
    assert_eq!(a["extremal_index"], b["extremal_index"]);
}
