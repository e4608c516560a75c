//! End-to-end runs of the `pev-mzi` binary in scratch directories.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pev_mzi::cli::default_fixture_path;
use pev_mzi::oracle::{self, lookup};
use pev_mzi::scenarios::PRESET_NAMES;

const HEADER: &str = "t_bar,prob_d1,prob_d2,cum_d1,cum_d2";

fn pev(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pev-mzi"))
        .args(args)
        .current_dir(dir)
        .env("PEV_MZI_THREADS", "2")
        .output()
        .expect("spawn pev-mzi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// `value,p_d1,p_d2` rows of a sweep summary.
fn summary(path: &Path) -> Vec<(String, f64, f64)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("value,p_d1,p_d2"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn list_presets_prints_every_name() {
    let dir = tempfile::tempdir().unwrap();
    let o = pev(dir.path(), &["list-presets"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(names, PRESET_NAMES);
}

#[test]
fn preset_run_writes_curves_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = pev(dir.path(), &["preset", "scenario1", "--out", "o"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("o");
    for name in ["curve_d1.csv", "curve_d2.csv"] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(HEADER));
        let rows: Vec<Vec<f64>> =
            lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 400);
        // Cumulative columns never decrease.
        for w in rows.windows(2) {
            assert!(w[1][3] >= w[0][3] && w[1][4] >= w[0][4]);
        }
    }
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("digest"), "{report}");
    assert!(stdout(&o).contains("p_d2 5.522608926181e-6"), "{}", stdout(&o));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "[photon]\nbogus\n").unwrap();
    for args in [
        &["preset", "nope"][..],
        &["run", "bad.cfg"],
        &["run", "missing.cfg"],
        &["frob"],
        &["sweep", "preset:scenario1", "--param", "omega_t", "--values"],
        &["sweep", "preset:scenario1", "--param", "nonsense", "--values", "1"],
    ] {
        let o = pev(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains("error"), "{args:?}");
    }
    assert!(stderr(&pev(dir.path(), &["run", "bad.cfg"])).contains("line 2"));
}

#[test]
fn truncated_profile_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("wide.cfg"), "[photon]\nomega_t = 10\n").unwrap();
    let o = pev(dir.path(), &["run", "wide.cfg", "--out", "w"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("truncated"));
    assert!(!dir.path().join("w").join("curve_d1.csv").exists());
}

#[test]
fn failed_write_leaves_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    // A directory where a curve file belongs makes that write fail.
    fs::create_dir_all(dir.path().join("d").join("curve_d2.csv")).unwrap();
    let o = pev(dir.path(), &["preset", "scenario1", "--out", "d"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!dir.path().join("d").join("curve_d1.csv").exists());
    assert!(!dir.path().join("d").join("report.txt").exists());
}

#[test]
fn kappa_sweep_traces_the_fringe() {
    let dir = tempfile::tempdir().unwrap();
    let o = pev(
        dir.path(),
        &["sweep", "preset:baseline-both", "--param", "kappa2", "--values", "0,pi/2,pi", "--out", "s"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = summary(&dir.path().join("s").join("sweep_summary.csv"));
    let expected = [("0", 0.0), ("pi/2", 0.5), ("pi", 1.0)];
    assert_eq!(rows.len(), expected.len());
    for ((value, p1, p2), (want_value, want_p1)) in rows.iter().zip(expected) {
        assert_eq!(value, want_value);
        assert!((p1 - want_p1).abs() < 1e-6, "{value}: {p1}");
        assert!((p1 + p2 - 1.0).abs() < 1e-6);
    }
    for sub in ["000_0", "001_pi_2", "002_pi"] {
        assert!(dir.path().join("s").join(sub).join("curve_d1.csv").exists(), "{sub}");
    }
}

#[test]
fn omega_sweep_matches_frozen_overlaps() {
    let dir = tempfile::tempdir().unwrap();
    let o = pev(
        dir.path(),
        &["sweep", "preset:scenario1", "--param", "omega_t", "--values", "0.5,1,2", "--out", "s"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = summary(&dir.path().join("s").join("sweep_summary.csv"));
    let frozen = oracle::parse_derived_csv(&fs::read_to_string(default_fixture_path()).unwrap()).unwrap();
    let names = ["gaussian_q_18_21_omega_0.5", "gaussian_q_18_21", "gaussian_q_18_21_omega_2"];
    let mut last = -1.0;
    for ((value, _, p2), name) in rows.iter().zip(names) {
        let q = lookup(&frozen, name).unwrap().value;
        assert!((p2 - 0.5 * q).abs() <= 1e-10, "{value}: {p2:e} vs {:e}", 0.5 * q);
        assert!(*p2 > last, "{value}");
        last = *p2;
    }
}

#[test]
fn validate_reports_dead_windows() {
    let dir = tempfile::tempdir().unwrap();
    let ok = pev(dir.path(), &["validate", "preset:scenario1"]);
    assert!(ok.status.success());
    assert_eq!(stdout(&ok).trim(), "ok");
    let warn = pev(dir.path(), &["validate", "preset:scenario3"]);
    assert!(warn.status.success());
    assert!(stdout(&warn).contains("warning: BS2"), "{}", stdout(&warn));
}

#[test]
fn oracle_regen_reproduces_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let o = pev(dir.path(), &["oracle", "regen", "--out", "fresh.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fresh = fs::read(dir.path().join("fresh.csv")).unwrap();
    assert_eq!(fresh, fs::read(default_fixture_path()).unwrap());
}

#[test]
fn pipeline_dump_writes_state_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = pev(
        dir.path(),
        &["preset", "baseline-bs1-only", "--mode", "pipeline", "--dump", "--dump-stride", "50", "--out", "p"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("p").join("state.txt")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# tau"));
    assert_eq!(lines.next(), Some("# t x re1 im1 re2 im2"));
    let rows: Vec<&str> = lines.collect();
    // Engine grid [-20, 40] at h = 0.02, every 50th node: 61 per axis.
    assert_eq!(rows.len(), 61 * 61);
    assert!(rows.iter().all(|r| r.split_whitespace().count() == 6));
}
