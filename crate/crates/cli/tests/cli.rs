use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn workdir(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, format!("output_dir = \"out\"\n{body}")).unwrap();
    p
}

fn run(cmd: &str, cfg: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitcount"))
        .arg(cmd)
        .arg("--config")
        .arg(cfg)
        .args(extra)
        .current_dir(cfg.parent().unwrap())
        .output()
        .unwrap()
}

fn summary(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

const FREE2: &str = r#"
group = { family = "free", rank = 2 }
metrics = [{ kind = "word" }, { kind = "green_closed_form" }]
"#;

#[test]
fn free_group_automaton() {
    let dir = workdir("free_automaton");
    let s = summary(&run("automaton", &config(&dir, FREE2), &[]));
    assert_eq!(s["states"], 5);
    assert_eq!(s["bijection_ok"], true);
    assert!(dir.join("out/automaton.json").exists());
    assert!(dir.join("out/bijection_report.json").exists());
}

#[test]
fn rerun_is_byte_identical() {
    let dir = workdir("rerun");
    let cfg = config(&dir, FREE2);
    let read = |name: &str| std::fs::read(dir.join("out").join(name)).unwrap();
    summary(&run("automaton", &cfg, &[]));
    let first = (read("automaton.json"), read("bijection_report.json"));
    // The second run loads the cached coding.
    summary(&run("automaton", &cfg, &[]));
    assert_eq!(
        first,
        (read("automaton.json"), read("bijection_report.json"))
    );
}

#[test]
fn green_orbit_sums_sit_on_the_log3_lattice() {
    let dir = workdir("green_analyze");
    let cfg = config(
        &dir,
        "group = { family = \"free\", rank = 2 }\nmetrics = [{ kind = \"green_closed_form\" }]\n",
    );
    let s = summary(&run("analyze", &cfg, &[]));
    let v = &s["verdicts"][0]["verdict"];
    assert_eq!(v["verdict"], "lattice");
    assert!((v["gap"].as_f64().unwrap() - 3f64.ln()).abs() < 1e-9);
}

#[test]
fn dependent_pair_is_affine() {
    let dir = workdir("affine");
    let cfg = config(
        &dir,
        "group = { family = \"free\", rank = 2 }\nmetrics = [{ kind = \"word\" }, { kind = \"scaled_word\", factor = 2.0 }]\n",
    );
    let s = summary(&run("manhattan", &cfg, &[]));
    assert_eq!(s["pair"]["affine"], true);
    assert!((s["theta_at_0"].as_f64().unwrap() - 3f64.ln()).abs() < 1e-9);
    assert!(s["theta_at_v"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn short_correlation_range_is_underpowered() {
    let dir = workdir("underpowered");
    let cfg = config(
        &dir,
        "group = { family = \"free\", rank = 2 }\nmetrics = [{ kind = \"word\" }, { kind = \"scaled_word\", factor = 2.0 }]\n",
    );
    let s = summary(&run("correlate", &cfg, &["--nmax", "4"]));
    assert_eq!(s["status"], "underpowered");
    assert!(dir.join("out/correlation_counts.csv").exists());
}

#[test]
fn unsaturated_build_exits_with_3() {
    let dir = workdir("unsaturated");
    let cfg = config(&dir, "group = { family = \"surface\", genus = 2 }\nmetrics = [{ kind = \"word\" }]\n[automaton]\nmax_rcone = 3\n");
    assert_eq!(run("automaton", &cfg, &[]).status.code(), Some(3));
}

#[test]
fn invalid_fixed_radius_exits_with_2() {
    let dir = workdir("invalid");
    let cfg = config(&dir, "group = { family = \"surface\", genus = 2 }\nmetrics = [{ kind = \"word\" }]\n[automaton]\nrcone = 2\n");
    assert_eq!(run("automaton", &cfg, &[]).status.code(), Some(2));
}

#[test]
fn bad_config_exits_with_1() {
    let dir = workdir("bad_config");
    let cfg = config(&dir, "group = { family = \"free\", rank = 2 }\nbogus = 1\n");
    assert_eq!(run("growth", &cfg, &[]).status.code(), Some(1));
}
