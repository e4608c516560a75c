//! Command-line front end.
//!
//! All results of a command are computed before anything touches the output
//! directory, so failures never leave partial output behind.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::channel::Detector;
use crate::closed_form::{ClosedForm, DetectionCurve, DetectorWindow, SpatialSpan};
use crate::engine::{self, GridState, StepLog};
use crate::error::{Error, Result};
use crate::oracle;
use crate::regions::{parse_present_t, SpacetimeRegion};
use crate::scenarios::{parse_real, Scenario, PRESET_NAMES};

pub const CSV_HEADER: &str = "t_bar,prob_d1,prob_d2,cum_d1,cum_d2";

/// Environment variable capping the worker threads (`0` = automatic).
pub const THREADS_ENV: &str = "PEV_MZI_THREADS";

pub const SWEEP_PARAMS: [&str; 6] =
    ["omega_t", "omega_x", "kappa1", "kappa2", "bs1.present_t", "bs2.present_t"];

#[derive(Debug, Parser)]
#[command(name = "pev-mzi", version, about = "Single-photon Mach-Zehnder interferometer with spacetime wavefunctions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Four-branch density formula only.
    Closed,
    /// Step-by-step grid evolution only.
    Pipeline,
    /// Both, reporting their pointwise discrepancy.
    Both,
}

#[derive(Debug, clap::Args)]
pub struct RunOpts {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "closed")]
    pub mode: Mode,
    /// Also write the final engine state as text (pipeline/both modes).
    #[arg(long)]
    pub dump: bool,
    /// Keep every n-th node per axis in the state dump.
    #[arg(long, default_value_t = 10)]
    pub dump_stride: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a named preset.
    Preset {
        name: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Re-run a scenario once per parameter value.
    Sweep {
        /// Config path, or `preset:NAME`.
        target: String,
        #[arg(long)]
        param: String,
        /// Comma-separated values; windows inside one value are joined by `+`.
        #[arg(long, value_delimiter = ',', required = true, num_args = 0..)]
        values: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "closed")]
        mode: Mode,
    },
    /// Print scenario warnings.
    Validate {
        /// Config path, or `preset:NAME`.
        target: String,
    },
    /// List preset names.
    ListPresets,
    /// Reference-value maintenance.
    Oracle {
        #[command(subcommand)]
        action: OracleCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Recompute the derived reference values and write the fixture file.
    Regen {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Summary of one run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub digest: String,
    pub mode: Mode,
    pub p_d1: f64,
    pub p_d2: f64,
    /// Largest change of the totals when the grid step doubles.
    pub convergence_delta: Option<f64>,
    /// Stated accuracy of the totals.
    pub tolerance: f64,
    pub curve_files: Vec<PathBuf>,
    pub steps: Option<StepLog>,
    /// Largest pointwise engine/closed-form density difference.
    pub discrepancy: Option<f64>,
    pub warnings: Vec<String>,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digest {}", self.digest);
        let _ = writeln!(s, "mode {:?}", self.mode);
        let _ = writeln!(s, "p_d1 {:.12e}", self.p_d1);
        let _ = writeln!(s, "p_d2 {:.12e}", self.p_d2);
        let _ = writeln!(s, "p_sum {:.12e}", self.p_d1 + self.p_d2);
        let _ = writeln!(s, "tolerance {:.0e}", self.tolerance);
        match self.convergence_delta {
            Some(d) => {
                let _ = writeln!(s, "convergence_delta_2h {d:.3e}");
            }
            None => {
                let _ = writeln!(s, "convergence_delta_2h n/a");
            }
        }
        if let Some(d) = self.discrepancy {
            let _ = writeln!(s, "max_density_discrepancy {d:.3e}");
        }
        for f in &self.curve_files {
            let _ = writeln!(s, "curve {}", f.display());
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning {w}");
        }
        if let Some(log) = &self.steps {
            let _ = writeln!(s, "steps");
            let _ = write!(s, "{log}");
        }
        let _ = writeln!(s, "wall_time_s {:.3}", self.wall_time.as_secs_f64());
        s
    }
}

/// Everything a run writes, held in memory.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub csv: String,
    pub dump: Option<String>,
}

/// Renders the detection-curve table.
pub fn render_curves_csv(d1: &DetectionCurve, d2: &DetectionCurve) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let (c1, c2) = (d1.cumulative(), d2.cumulative());
    for (k, (&(t, p1), &(_, p2))) in d1.points.iter().zip(&d2.points).enumerate() {
        let _ = writeln!(out, "{t:.11e},{p1:.11e},{p2:.11e},{:.11e},{:.11e}", c1[k], c2[k]);
    }
    out
}

fn engine_curves(
    state: &GridState,
    scenario: &Scenario,
) -> Result<(DetectionCurve, DetectionCurve)> {
    let range = scenario.tbar_range();
    let eps_t = scenario.detector.eps_t;
    let eps_x = SpatialSpan::from_option(scenario.detector.eps_x);
    let curve = |d: Detector| -> Result<DetectionCurve> {
        let points = (0..range.len())
            .map(|i| {
                let t_bar = range.value(i);
                let w = DetectorWindow { t_bar, x_bar: scenario.detector_x(), eps_t, eps_x };
                Ok((t_bar, state.detection_probability(d, &w)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DetectionCurve { detector: d, points, eps_t, eps_x })
    };
    Ok((curve(Detector::D1)?, curve(Detector::D2)?))
}

/// Computes a run without writing anything.
pub fn compute_run(scenario: &Scenario, mode: Mode, dump_stride: Option<usize>) -> Result<RunOutput> {
    let start = Instant::now();
    scenario.check()?;
    let warnings = scenario.validate().iter().map(ToString::to_string).collect();
    let range = scenario.tbar_range();
    let eps_t = scenario.detector.eps_t;
    let eps_x = SpatialSpan::from_option(scenario.detector.eps_x);

    let closed = ClosedForm::new(scenario)?;
    let (c_p1, c_p2) = closed.total_probabilities();
    let convergence_delta = scenario
        .with_grid_step(2.0 * scenario.t_grid.h())
        .and_then(|coarse| ClosedForm::new(&coarse))
        .ok()
        .map(|coarse| {
            let (q1, q2) = coarse.total_probabilities();
            (q1 - c_p1).abs().max((q2 - c_p2).abs())
        });

    let pipeline = match mode {
        Mode::Closed => None,
        Mode::Pipeline | Mode::Both => Some(engine::run_pipeline(scenario)?),
    };

    let (d1, d2, p_d1, p_d2) = match (&pipeline, mode) {
        (Some((state, _)), Mode::Pipeline) => {
            let (d1, d2) = engine_curves(state, scenario)?;
            (d1, d2, state.channel_mass(Detector::D1), state.channel_mass(Detector::D2))
        }
        _ => {
            let d1 = closed.detection_curve(Detector::D1, range, eps_t, eps_x)?;
            let d2 = closed.detection_curve(Detector::D2, range, eps_t, eps_x)?;
            (d1, d2, c_p1, c_p2)
        }
    };
    let discrepancy = match (&pipeline, mode) {
        (Some((state, _)), Mode::Both) => Some(engine::max_discrepancy(state, &closed)?),
        _ => None,
    };
    let dump = match (&pipeline, dump_stride) {
        (Some((state, _)), Some(stride)) => {
            let mut buf = Vec::new();
            state.write_dump(&mut buf, stride).expect("writing to memory");
            Some(String::from_utf8(buf).expect("dump is ASCII"))
        }
        _ => None,
    };

    let csv = render_curves_csv(&d1, &d2);
    let report = RunReport {
        digest: scenario.digest(),
        mode,
        p_d1,
        p_d2,
        convergence_delta,
        tolerance: scenario.probability_tolerance(),
        curve_files: Vec::new(),
        steps: pipeline.map(|(_, log)| log),
        discrepancy,
        warnings,
        wall_time: start.elapsed(),
    };
    Ok(RunOutput { report, csv, dump })
}

/// Writes a set of files into `dir`, removing them again if any write fails.
fn write_files(dir: &Path, files: &[(&str, &str)]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, contents) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(Error::io(path, e));
        }
        written.push(path);
    }
    Ok(())
}

/// Writes `curve_d1.csv`, `curve_d2.csv`, `report.txt` (and `state.txt`).
pub fn write_run(dir: &Path, output: &mut RunOutput) -> Result<()> {
    output.report.curve_files = vec![dir.join("curve_d1.csv"), dir.join("curve_d2.csv")];
    let report = output.report.render();
    let mut files = vec![
        ("curve_d1.csv", output.csv.as_str()),
        ("curve_d2.csv", output.csv.as_str()),
        ("report.txt", report.as_str()),
    ];
    if let Some(dump) = &output.dump {
        files.push(("state.txt", dump.as_str()));
    }
    write_files(dir, &files)
}

fn load_target(target: &str) -> Result<Scenario> {
    match target.strip_prefix("preset:") {
        Some(name) => Scenario::preset(name),
        None => Scenario::load_config(Path::new(target)),
    }
}

/// Applies one sweep value to a copy of `base`.
pub fn apply_sweep_value(base: &Scenario, param: &str, value: &str) -> Result<Scenario> {
    let mut s = base.clone();
    let real = || {
        parse_real(value).ok_or_else(|| Error::Usage(format!("invalid value `{value}` for {param}")))
    };
    let region = |old: &SpacetimeRegion| -> Result<SpacetimeRegion> {
        let windows = parse_present_t(&value.replace('+', ","))?;
        let extent = old.rects().first().filter(|r| !r.spans_all_x()).map(|r| (r.x_lo, r.x_hi));
        SpacetimeRegion::from_windows(old.label(), &windows, extent)
    };
    match param {
        "omega_t" => s.photon.omega_t = real()?,
        "omega_x" => s.photon.omega_x = real()?,
        "kappa1" => s.kappa1 = real()?,
        "kappa2" => s.kappa2 = real()?,
        "bs1.present_t" => s.bs1 = region(&base.bs1)?,
        "bs2.present_t" => s.bs2 = region(&base.bs2)?,
        other => {
            return Err(Error::Usage(format!(
                "unknown sweep parameter `{other}`; expected one of {}",
                SWEEP_PARAMS.join(", ")
            )))
        }
    }
    s.check()?;
    Ok(s)
}

fn dir_name(index: usize, value: &str) -> String {
    let clean: String = value
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    format!("{index:03}_{clean}")
}

/// Runs a sweep; returns the summary CSV and per-value outputs.
pub fn compute_sweep(
    base: &Scenario,
    param: &str,
    values: &[String],
    mode: Mode,
) -> Result<(String, Vec<RunOutput>)> {
    let values: Vec<&str> = values.iter().map(|v| v.trim()).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(Error::Usage("sweep needs at least one value".into()));
    }
    if !SWEEP_PARAMS.contains(&param) {
        return Err(Error::Usage(format!(
            "unknown sweep parameter `{param}`; expected one of {}",
            SWEEP_PARAMS.join(", ")
        )));
    }
    let scenarios = values
        .iter()
        .map(|v| apply_sweep_value(base, param, v))
        .collect::<Result<Vec<_>>>()?;
    let run = |s: &Scenario| compute_run(s, mode, None);
    // Engine runs hold large grids; keep them one at a time.
    let outputs = if mode == Mode::Closed {
        scenarios.par_iter().map(run).collect::<Result<Vec<_>>>()?
    } else {
        scenarios.iter().map(run).collect::<Result<Vec<_>>>()?
    };
    let mut summary = String::from("value,p_d1,p_d2\n");
    for (v, o) in values.iter().zip(&outputs) {
        let _ = writeln!(summary, "{v},{:.11e},{:.11e}", o.report.p_d1, o.report.p_d2);
    }
    Ok((summary, outputs))
}

/// Applies `PEV_MZI_THREADS` to the global worker pool. Only the first call
/// in a process has an effect.
pub fn configure_threads() {
    let n = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    if let Some(n) = n.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Default location of the reference-value fixture.
pub fn default_fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("derived_values.csv")
}

fn print_summary(out: &mut impl Write, dir: &Path, report: &RunReport) -> io::Result<()> {
    writeln!(out, "wrote {}", dir.display())?;
    writeln!(out, "digest {}", report.digest)?;
    writeln!(out, "p_d1 {:.12e}", report.p_d1)?;
    writeln!(out, "p_d2 {:.12e}", report.p_d2)?;
    if let Some(d) = report.discrepancy {
        writeln!(out, "max_density_discrepancy {d:.3e}")?;
    }
    for w in &report.warnings {
        writeln!(out, "warning: {w}")?;
    }
    Ok(())
}

fn run_scenario(scenario: &Scenario, opts: &RunOpts, out: &mut impl Write) -> Result<()> {
    let stride = opts.dump.then_some(opts.dump_stride);
    let mut output = compute_run(scenario, opts.mode, stride)?;
    write_run(&opts.out, &mut output)?;
    print_summary(out, &opts.out, &output.report).map_err(|e| Error::io("<stdout>", e))
}

/// Executes a parsed command line, printing to `out`.
pub fn execute(cli: Cli, out: &mut impl Write) -> Result<()> {
    let io_err = |e| Error::io("<stdout>", e);
    match cli.command {
        Command::Run { config, opts } => run_scenario(&Scenario::load_config(&config)?, &opts, out),
        Command::Preset { name, opts } => run_scenario(&Scenario::preset(&name)?, &opts, out),
        Command::Sweep { target, param, values, out: dir, mode } => {
            let base = load_target(&target)?;
            let (summary, mut outputs) = compute_sweep(&base, &param, &values, mode)?;
            let live: Vec<&str> = values.iter().map(|v| v.trim()).filter(|v| !v.is_empty()).collect();
            for (k, (v, o)) in live.iter().zip(outputs.iter_mut()).enumerate() {
                write_run(&dir.join(dir_name(k, v)), o)?;
            }
            write_files(&dir, &[("sweep_summary.csv", summary.as_str())])?;
            write!(out, "{summary}").map_err(io_err)
        }
        Command::Validate { target } => {
            let s = load_target(&target)?;
            let warnings = s.validate();
            for w in &warnings {
                writeln!(out, "warning: {w}").map_err(io_err)?;
            }
            if warnings.is_empty() {
                writeln!(out, "ok").map_err(io_err)?;
            }
            Ok(())
        }
        Command::ListPresets => {
            for name in PRESET_NAMES {
                writeln!(out, "{name}").map_err(io_err)?;
            }
            Ok(())
        }
        Command::Oracle { action: OracleCommand::Regen { out: path } } => {
            let path = path.unwrap_or_else(default_fixture_path);
            let csv = oracle::render_derived_csv(&oracle::derived_values());
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
            writeln!(out, "wrote {}", path.display()).map_err(io_err)
        }
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    let stdout = io::stdout();
    match execute(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_commands() {
        let cli = Cli::try_parse_from(["pev-mzi", "preset", "scenario1", "--mode", "both"]).unwrap();
        assert!(matches!(cli.command, Command::Preset { ref name, ref opts } if name == "scenario1" && opts.mode == Mode::Both));
        let cli = Cli::try_parse_from([
            "pev-mzi", "sweep", "preset:baseline-both", "--param", "kappa2", "--values", "0,pi/2,pi",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Sweep { ref values, .. } if values.len() == 3));
    }

    #[test]
    fn sweep_values() {
        let base = Scenario::preset("scenario1").unwrap();
        let s = apply_sweep_value(&base, "bs2.present_t", "18:19+20:21").unwrap();
        assert_eq!(s.bs2.rects().len(), 2);
        assert!(matches!(apply_sweep_value(&base, "omega_q", "1"), Err(Error::Usage(_))));
        assert!(matches!(
            compute_sweep(&base, "omega_t", &[String::new()], Mode::Closed),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let out = compute_run(&Scenario::preset("baseline-none").unwrap(), Mode::Closed, None).unwrap();
        let lines: Vec<&str> = out.csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 401);
        assert_eq!(lines[1].split(',').count(), 5);
    }
}
