//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p pev-mzi --test acceptance`.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use pev_mzi::cli::{compute_run, default_fixture_path, Mode};
use pev_mzi::oracle::{lookup, parse_derived_csv, DerivedValue};
use pev_mzi::scenarios::{TemporalKind, PRESET_NAMES};
use pev_mzi::{ClosedForm, Detector, Scenario, SpacetimeRegion, SpatialSpan};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BASELINE_TIME_LIMIT: Duration = Duration::from_secs(5);
const PRESET_TIME_LIMIT: Duration = Duration::from_secs(60);
const DISCREPANCY_TOL: f64 = 1e-8;
const BRANCH_TOL: f64 = 1e-12;
const BRANCH_POINTS: usize = 10_000;
const ONE_BS_TOL: f64 = 1e-6;
const BOTH_BS_D2_TOL: f64 = 1e-9;
const NO_BS_D1_TOL: f64 = 1e-9;
const ZERO_CURVE_TOL: f64 = 1e-12;
const Q_EXTRA_TOL: f64 = 1e-6;
const TAIL_TOL: f64 = 1e-5;
const SYMMETRY_TOL: f64 = 1e-9;
const NORM_TOL: f64 = 1e-9;
const TRANSLATION: f64 = 7.0;
const TRANSLATION_TOL: f64 = 1e-9;
const CONVERGENCE_FACTOR: f64 = 4.0;

type Check = Result<String, String>;

fn fixture() -> Vec<DerivedValue> {
    let text = fs::read_to_string(default_fixture_path()).expect("fixture present");
    parse_derived_csv(&text).expect("fixture parses")
}

fn value(values: &[DerivedValue], name: &str) -> DerivedValue {
    lookup(values, name).unwrap_or_else(|| panic!("fixture lacks {name}")).clone()
}

fn preset(name: &str) -> Scenario {
    Scenario::preset(name).expect("preset")
}

fn totals(s: &Scenario) -> (f64, f64) {
    ClosedForm::new(s).expect("closed form").total_probabilities()
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn criterion_1() -> Check {
    let kinds = [
        ("gaussian", TemporalKind::Gaussian),
        ("box", TemporalKind::Box),
        ("exp_forward", TemporalKind::ExpForward),
        ("exp_backward", TemporalKind::ExpBackward),
    ];
    let mut slowest = Duration::ZERO;
    for (label, kind) in kinds {
        for name in ["baseline-none", "baseline-bs1-only", "baseline-bs2-only", "baseline-both"] {
            let mut s = preset(name);
            s.photon.temporal = kind.clone();
            let start = Instant::now();
            let out = compute_run(&s, Mode::Closed, None).map_err(|e| format!("{name}/{label}: {e}"))?;
            let took = start.elapsed();
            slowest = slowest.max(took);
            let (p1, p2) = (out.report.p_d1, out.report.p_d2);
            let tag = format!("{name}/{label}: p=({p1:.12e}, {p2:.12e})");
            match name {
                "baseline-none" => ensure(
                    p2 == 0.0 && (p1 - 1.0).abs() <= NO_BS_D1_TOL,
                    format!("{tag}, want (1, exactly 0)"),
                )?,
                "baseline-both" => ensure(
                    p2 <= BOTH_BS_D2_TOL && (p1 - 1.0).abs() <= BOTH_BS_D2_TOL,
                    format!("{tag}, want (1, <= {BOTH_BS_D2_TOL:e})"),
                )?,
                _ => ensure(
                    (p1 - 0.5).abs() <= ONE_BS_TOL && (p2 - 0.5).abs() <= ONE_BS_TOL,
                    format!("{tag}, want (0.5, 0.5) ± {ONE_BS_TOL:e}"),
                )?,
            }
            ensure(took <= BASELINE_TIME_LIMIT, format!("{tag} took {took:?}"))?;
        }
    }
    Ok(format!("16 baseline runs, slowest {:.2}s (limit 5s), tol 1e-6/1e-9", slowest.as_secs_f64()))
}

/// Criteria 2 and 7 share the `both`-mode runs.
struct BothRuns {
    worst_discrepancy: (f64, &'static str),
    worst_norm_defect: (f64, &'static str),
    slowest: (Duration, &'static str),
    failures: Vec<String>,
}

fn both_runs() -> BothRuns {
    let mut r = BothRuns {
        worst_discrepancy: (0.0, ""),
        worst_norm_defect: (0.0, ""),
        slowest: (Duration::ZERO, ""),
        failures: Vec::new(),
    };
    for name in PRESET_NAMES {
        let start = Instant::now();
        let out = match compute_run(&preset(name), Mode::Both, None) {
            Ok(out) => out,
            Err(e) => {
                r.failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        let took = start.elapsed();
        let d = out.report.discrepancy.unwrap_or(f64::INFINITY);
        let n = out.report.steps.as_ref().map_or(f64::INFINITY, |l| l.max_norm_defect());
        if d > r.worst_discrepancy.0 {
            r.worst_discrepancy = (d, name);
        }
        if n > r.worst_norm_defect.0 {
            r.worst_norm_defect = (n, name);
        }
        if took > r.slowest.0 {
            r.slowest = (took, name);
        }
    }
    r
}

fn criterion_2(r: &BothRuns) -> Check {
    ensure(r.failures.is_empty(), r.failures.join("; "))?;
    let (d, worst) = r.worst_discrepancy;
    let (t, slow) = r.slowest;
    ensure(d <= DISCREPANCY_TOL, format!("{worst}: discrepancy {d:.3e} > {DISCREPANCY_TOL:e}"))?;
    ensure(t <= PRESET_TIME_LIMIT, format!("{slow}: {t:?} > 60s"))?;
    Ok(format!(
        "max discrepancy {d:.3e} ({worst}) <= {DISCREPANCY_TOL:e}; slowest {:.2}s ({slow}) <= 60s",
        t.as_secs_f64()
    ))
}

fn criterion_3() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0_f64;
    for name in PRESET_NAMES {
        let s = preset(name);
        let c = ClosedForm::new(&s).map_err(|e| e.to_string())?;
        let (tg, xg) = (*c.t_grid(), *c.x_grid());
        for _ in 0..BRANCH_POINTS {
            let t = rng.gen_range(tg.min()..=tg.max());
            let x = rng.gen_range(xg.min()..=xg.max());
            let total = c.photon_density(t, x).map_err(|e| e.to_string())?;
            let d1 = c.final_density(Detector::D1, t, x).map_err(|e| e.to_string())?;
            let d2 = c.final_density(Detector::D2, t, x).map_err(|e| e.to_string())?;
            let defect = (d1 + d2 - total).abs();
            ensure(defect <= BRANCH_TOL, format!("{name} at ({t}, {x}): defect {defect:.3e}"))?;
            worst = worst.max(defect);
        }
    }
    Ok(format!("{BRANCH_POINTS} points x 9 presets, max defect {worst:.3e} <= {BRANCH_TOL:e}"))
}

fn criterion_4(values: &[DerivedValue]) -> Check {
    let s = preset("scenario1");
    let c = ClosedForm::new(&s).map_err(|e| e.to_string())?;
    let eps_t = s.detector.eps_t;
    let curve = c
        .detection_curve(Detector::D2, s.tbar_range(), eps_t, SpatialSpan::from_option(s.detector.eps_x))
        .map_err(|e| e.to_string())?;
    let early = curve.points.iter().filter(|(t, _)| t + eps_t / 2.0 < 23.0);
    let worst_early = early.map(|&(_, p)| p.abs()).fold(0.0, f64::max);
    ensure(worst_early <= ZERO_CURVE_TOL, format!("D2 curve reaches {worst_early:.3e} before t = 23"))?;
    let q = value(values, "gaussian_q_18_21");
    let (_, p2) = c.total_probabilities();
    let tol = q.estimated_error + Q_EXTRA_TOL;
    let diff = (p2 - q.value / 2.0).abs();
    ensure(diff <= tol, format!("p_D2 {p2:.6e} vs q/2 {:.6e}: diff {diff:.3e} > {tol:.3e}", q.value / 2.0))?;
    Ok(format!(
        "D2 curve max {worst_early:.1e} before t=23; p_D2 {p2:.6e} vs q/2 {:.6e}, diff {diff:.1e} <= {tol:.2e}",
        q.value / 2.0
    ))
}

fn criterion_5(values: &[DerivedValue]) -> Check {
    // Only the second beamsplitter's window is varied: with the first one
    // present as well, the backward tail is half mixed at BS1 and D2 fires.
    let variant = |name: &str| {
        let mut s = preset(name);
        s.bs1 = SpacetimeRegion::empty("BS1");
        s
    };
    let (_, back) = totals(&variant("scenario2-backward"));
    ensure(back == 0.0, format!("backward tail p_D2 = {back:e}, want exactly 0"))?;
    let (_, fwd) = totals(&variant("scenario2-forward"));
    let q2 = value(values, "forward_tail_q2");
    let tol = q2.estimated_error + TAIL_TOL;
    let diff = (fwd - q2.value / 2.0).abs();
    ensure(fwd > 0.0 && diff <= tol, format!("forward p_D2 {fwd:.6e} vs q2/2 {:.6e}", q2.value / 2.0))?;
    let (_, preset_back) = totals(&preset("scenario2-backward"));
    Ok(format!(
        "BS2-only windows: backward p_D2 = 0 exactly, forward {fwd:.6e} vs q2/2 {:.6e} (diff {diff:.1e} <= {tol:.1e}); \
         full preset backward p_D2 = {preset_back:.6e} (BS1 mixing)",
        q2.value / 2.0
    ))
}

fn criterion_6() -> Check {
    let p_d2 = |lo: f64, hi: f64| -> Result<f64, String> {
        let mut s = preset("scenario1");
        s.bs2 = SpacetimeRegion::from_windows("BS2", &[(lo, hi)], None).map_err(|e| e.to_string())?;
        Ok(totals(&s).1)
    };
    let mut worst = 0.0_f64;
    for (a, b) in [(1.0, 2.0), (3.0, 6.0), (0.0, 5.0)] {
        let (plus, minus) = (p_d2(15.0 + a, 15.0 + b)?, p_d2(15.0 - b, 15.0 - a)?);
        let diff = (plus - minus).abs();
        ensure(diff <= SYMMETRY_TOL, format!("(a,b)=({a},{b}): {plus:.12e} vs {minus:.12e}"))?;
        worst = worst.max(diff);
    }
    Ok(format!("3 window pairs, max asymmetry {worst:.3e} <= {SYMMETRY_TOL:e}"))
}

fn criterion_7(r: &BothRuns) -> Check {
    ensure(r.failures.is_empty(), r.failures.join("; "))?;
    let (n, worst) = r.worst_norm_defect;
    ensure(n <= NORM_TOL, format!("{worst}: pre-normalization defect {n:.3e}"))?;
    Ok(format!("max |pre_norm - 1| {n:.3e} ({worst}) <= {NORM_TOL:e}"))
}

fn criterion_8() -> Check {
    let mut worst = 0.0_f64;
    for name in PRESET_NAMES {
        let s = preset(name);
        let (a1, a2) = totals(&s);
        let (b1, b2) = totals(&s.translated(TRANSLATION));
        let diff = (a1 - b1).abs().max((a2 - b2).abs());
        ensure(diff <= TRANSLATION_TOL, format!("{name}: totals move by {diff:.3e}"))?;
        worst = worst.max(diff);
    }
    Ok(format!("shift {TRANSLATION}, max total change {worst:.3e} <= {TRANSLATION_TOL:e}"))
}

fn criterion_9() -> Check {
    let mut lines = Vec::new();
    let mut worst_ratio = 0.0_f64;
    for name in PRESET_NAMES {
        let s = preset(name);
        let tol = s.probability_tolerance();
        let fine = s.with_grid_step(s.t_grid.h() / 2.0).map_err(|e| e.to_string())?;
        let (a1, a2) = totals(&s);
        let (b1, b2) = totals(&fine);
        let change = (a1 - b1).abs().max((a2 - b2).abs());
        worst_ratio = worst_ratio.max(change / tol);
        if change >= CONVERGENCE_FACTOR * tol {
            lines.push(format!("{name}: change {change:.3e} >= 4 x {tol:e}"));
        }
    }
    ensure(lines.is_empty(), lines.join("; "))?;
    Ok(format!("h 0.02 -> 0.01, worst change/tolerance {worst_ratio:.3} < {CONVERGENCE_FACTOR}"))
}

fn run_binary(dir: &Path, name: &str, mode: &str, threads: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_pev-mzi"))
        .args(["preset", name, "--mode", mode, "--out"])
        .arg(dir)
        .env("PEV_MZI_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), format!("{name} exited with {}", status.status))
}

fn criterion_10() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs: Vec<(&str, &str)> = PRESET_NAMES.iter().map(|&n| (n, "closed")).collect();
    runs.push(("scenario1", "pipeline"));
    for (name, mode) in &runs {
        let a = tmp.path().join(format!("{name}-{mode}-1"));
        let b = tmp.path().join(format!("{name}-{mode}-4"));
        run_binary(&a, name, mode, "1")?;
        run_binary(&b, name, mode, "4")?;
        for file in ["curve_d1.csv", "curve_d2.csv"] {
            let x = fs::read(a.join(file)).map_err(|e| e.to_string())?;
            let y = fs::read(b.join(file)).map_err(|e| e.to_string())?;
            ensure(x == y, format!("{name} ({mode}) {file} differs between 1 and 4 threads"))?;
        }
    }
    Ok(format!("{} runs x threads {{1,4}}: curve CSVs byte-identical", runs.len()))
}

fn main() {
    let values = fixture();
    let both = both_runs();
    let results: Vec<(u32, &str, Check)> = vec![
        (1, "baseline exact values", criterion_1()),
        (2, "engine vs closed form", criterion_2(&both)),
        (3, "branch completeness", criterion_3()),
        (4, "scenario 1 late detection", criterion_4(&values)),
        (5, "scenario 2 tail asymmetry", criterion_5(&values)),
        (6, "gaussian time symmetry", criterion_6()),
        (7, "unitarity audit", criterion_7(&both)),
        (8, "translation covariance", criterion_8()),
        (9, "grid convergence", criterion_9()),
        (10, "determinism", criterion_10()),
    ];
    let mut failed = 0;
    for (id, title, result) in &results {
        match result {
            Ok(detail) => println!("criterion {id:>2} PASS {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL {title}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
