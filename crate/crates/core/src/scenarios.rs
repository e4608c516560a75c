//! Experiment descriptions: geometry, photon, presence windows, mirror
//! phases, detector sampling and grids, plus the preset catalogue and the
//! sectioned `key = value` config format.
//!
//! ```text
//! [photon]    temporal = box|gaussian|exp_forward|exp_backward|spectrum:<path>
//!             omega_t, delta_t, spatial = sinc|box, omega_x, delta_x,
//!             t0, x0, tail_tol
//! [geometry]  x_source, x_bs1, x_mirrors, x_bs2, x_detectors
//! [bs1] [bs2] present_t = always|never|lo:hi[, lo:hi…], extent_x = lo:hi
//! [mirrors]   kappa1, kappa2            (radians)
//! [detector]  eps_t, eps_x = <val>|full, tbar = min:max:step
//! [grid]      t = min:max:h, x = min:max:h
//! ```
//!
//! Every key is optional; missing keys take the values of the
//! `baseline-none` preset.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::closed_form::region_mass;
use crate::error::{Error, Result};
use crate::grid::AxisGrid;
use crate::profiles::{
    self, SpatialProfile, Spectrum, TailDirection, TemporalProfile, DEFAULT_TAIL_TOL,
};
use crate::regions::{parse_interval, parse_present_t, SpacetimeRegion};

pub const DEFAULT_OMEGA_T: f64 = 1.0;
pub const DEFAULT_OMEGA_X: f64 = 20.0;
pub const DEFAULT_DELTA: f64 = 2.0;
pub const DEFAULT_EPS_T: f64 = 0.1;
pub const DEFAULT_H: f64 = 0.02;
pub const DEFAULT_SPAN: (f64, f64) = (0.0, 40.0);

/// Temporal truncation above this mass is reported by [`Scenario::validate`].
pub const TAIL_MASS_WARN: f64 = 1e-6;

/// A presence window holding less of the photon than this is dead.
pub const DEAD_WINDOW_MASS: f64 = 1e-12;

pub const PRESET_NAMES: [&str; 9] = [
    "baseline-none",
    "baseline-bs1-only",
    "baseline-bs2-only",
    "baseline-both",
    "scenario1",
    "scenario2-forward",
    "scenario2-backward",
    "scenario2-gaussian",
    "scenario3",
];

/// Positions of the elements along the optical path. The shifts `α_k` are
/// distances from the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub x_source: f64,
    pub x_bs1: f64,
    pub x_mirrors: f64,
    pub x_bs2: f64,
    pub x_detectors: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self { x_source: 0.0, x_bs1: 5.0, x_mirrors: 10.0, x_bs2: 15.0, x_detectors: 20.0 }
    }
}

impl Geometry {
    pub fn alpha1(&self) -> f64 {
        self.x_bs1 - self.x_source
    }

    pub fn alpha3(&self) -> f64 {
        self.x_mirrors - self.x_source
    }

    pub fn alpha5(&self) -> f64 {
        self.x_bs2 - self.x_source
    }

    pub fn alpha7(&self) -> f64 {
        self.x_detectors - self.x_source
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemporalKind {
    Box,
    Gaussian,
    ExpForward,
    ExpBackward,
    /// Synthesized from the spectrum file at `path`.
    Spectrum { path: PathBuf, spectrum: Spectrum },
}

impl TemporalKind {
    fn render(&self) -> String {
        match self {
            TemporalKind::Box => "box".into(),
            TemporalKind::Gaussian => "gaussian".into(),
            TemporalKind::ExpForward => "exp_forward".into(),
            TemporalKind::ExpBackward => "exp_backward".into(),
            TemporalKind::Spectrum { path, .. } => format!("spectrum:{}", path.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialKind {
    Sinc,
    Box,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Photon {
    pub temporal: TemporalKind,
    pub spatial: SpatialKind,
    pub omega_t: f64,
    pub delta_t: f64,
    pub omega_x: f64,
    pub delta_x: f64,
    /// Emission center.
    pub t0: f64,
    pub x0: f64,
    pub tail_tol: f64,
}

impl Default for Photon {
    fn default() -> Self {
        Self {
            temporal: TemporalKind::Gaussian,
            spatial: SpatialKind::Sinc,
            omega_t: DEFAULT_OMEGA_T,
            delta_t: DEFAULT_DELTA,
            omega_x: DEFAULT_OMEGA_X,
            delta_x: DEFAULT_DELTA,
            t0: 0.0,
            x0: 0.0,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }
}

/// `min:max:step` sweep of detector window centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TbarRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl TbarRange {
    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSpec {
    pub eps_t: f64,
    /// `None` integrates over the whole spatial axis.
    pub eps_x: Option<f64>,
    /// Defaults to window centers that tile the time grid.
    pub tbar: Option<TbarRange>,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        Self { eps_t: DEFAULT_EPS_T, eps_x: None, tbar: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: Geometry,
    pub photon: Photon,
    pub bs1: SpacetimeRegion,
    pub bs2: SpacetimeRegion,
    pub kappa1: f64,
    pub kappa2: f64,
    pub detector: DetectorSpec,
    /// Detection-frame grids: the lab region where the photon arrives.
    pub t_grid: AxisGrid,
    pub x_grid: AxisGrid,
}

impl Default for Scenario {
    fn default() -> Self {
        let (lo, hi) = DEFAULT_SPAN;
        let grid = AxisGrid::new(lo, hi, DEFAULT_H).expect("default grid");
        Self {
            geometry: Geometry::default(),
            photon: Photon::default(),
            bs1: SpacetimeRegion::empty("BS1"),
            bs2: SpacetimeRegion::empty("BS2"),
            kappa1: PI,
            kappa2: PI,
            detector: DetectorSpec::default(),
            t_grid: grid,
            x_grid: grid,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioWarning {
    TailMass { mass: f64 },
    ProfileBoundary(String),
    DeadWindow { element: String, mass: f64 },
    ClippedWindow(String),
}

impl fmt::Display for ScenarioWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioWarning::TailMass { mass } => {
                write!(f, "temporal profile loses mass {mass:.3e} outside the grid")
            }
            ScenarioWarning::ProfileBoundary(msg) => write!(f, "{msg}"),
            ScenarioWarning::DeadWindow { element, mass } => write!(
                f,
                "{element} presence window never overlaps the photon (mass {mass:.3e})"
            ),
            ScenarioWarning::ClippedWindow(msg) => write!(f, "detector window clipped: {msg}"),
        }
    }
}

impl Scenario {
    /// Looks up a preset by name.
    pub fn preset(name: &str) -> Result<Self> {
        let windows = |label: &str, w: &[(f64, f64)]| {
            SpacetimeRegion::from_windows(label, w, None).expect("preset window")
        };
        let mut s = Scenario::default();
        match name {
            "baseline-none" => {}
            "baseline-bs1-only" => s.bs1 = SpacetimeRegion::everywhere("BS1"),
            "baseline-bs2-only" => s.bs2 = SpacetimeRegion::everywhere("BS2"),
            "baseline-both" => {
                s.bs1 = SpacetimeRegion::everywhere("BS1");
                s.bs2 = SpacetimeRegion::everywhere("BS2");
            }
            "scenario1" => s.bs2 = windows("BS2", &[(18.0, 21.0)]),
            "scenario2-forward" | "scenario2-backward" | "scenario2-gaussian" => {
                s.bs1 = windows("BS1", &[(1.5, 4.5)]);
                s.bs2 = windows("BS2", &[(16.5, 19.5)]);
                s.photon.temporal = match name {
                    "scenario2-forward" => TemporalKind::ExpForward,
                    "scenario2-backward" => TemporalKind::ExpBackward,
                    _ => TemporalKind::Gaussian,
                };
            }
            "scenario3" => {
                s.bs1 = windows("BS1", &[(6.5, 7.5)]);
                s.bs2 = windows("BS2", &[(6.5, 9.5)]);
            }
            other => return Err(Error::UnknownPreset(other.to_string())),
        }
        s.check()?;
        Ok(s)
    }

    /// Parses a config, resolving `spectrum:` paths against the working
    /// directory.
    pub fn parse_config(text: &str) -> Result<Self> {
        parse(text, Path::new("."))
    }

    /// Reads a config file; `spectrum:` paths are relative to its directory.
    pub fn load_config(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        parse(&text, base)
    }

    /// Canonical config text; `parse_config(render())` reproduces `self`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let p = &self.photon;
        let g = &self.geometry;
        // Writing to a String cannot fail.
        let _ = writeln!(out, "[photon]");
        let _ = writeln!(out, "temporal = {}", p.temporal.render());
        let _ = writeln!(out, "omega_t = {:?}", p.omega_t);
        let _ = writeln!(out, "delta_t = {:?}", p.delta_t);
        let spatial = match p.spatial {
            SpatialKind::Sinc => "sinc",
            SpatialKind::Box => "box",
        };
        let _ = writeln!(out, "spatial = {spatial}");
        let _ = writeln!(out, "omega_x = {:?}", p.omega_x);
        let _ = writeln!(out, "delta_x = {:?}", p.delta_x);
        let _ = writeln!(out, "t0 = {:?}", p.t0);
        let _ = writeln!(out, "x0 = {:?}", p.x0);
        let _ = writeln!(out, "tail_tol = {:?}", p.tail_tol);
        let _ = writeln!(out, "\n[geometry]");
        let _ = writeln!(out, "x_source = {:?}", g.x_source);
        let _ = writeln!(out, "x_bs1 = {:?}", g.x_bs1);
        let _ = writeln!(out, "x_mirrors = {:?}", g.x_mirrors);
        let _ = writeln!(out, "x_bs2 = {:?}", g.x_bs2);
        let _ = writeln!(out, "x_detectors = {:?}", g.x_detectors);
        for (name, region) in [("bs1", &self.bs1), ("bs2", &self.bs2)] {
            let _ = writeln!(out, "\n[{name}]");
            let _ = writeln!(out, "present_t = {}", region.render_present_t());
            if let Some(extent) = region.render_extent_x() {
                let _ = writeln!(out, "extent_x = {extent}");
            }
        }
        let _ = writeln!(out, "\n[mirrors]");
        let _ = writeln!(out, "kappa1 = {:?}", self.kappa1);
        let _ = writeln!(out, "kappa2 = {:?}", self.kappa2);
        let d = &self.detector;
        let _ = writeln!(out, "\n[detector]");
        let _ = writeln!(out, "eps_t = {:?}", d.eps_t);
        match d.eps_x {
            Some(e) => {
                let _ = writeln!(out, "eps_x = {e:?}");
            }
            None => {
                let _ = writeln!(out, "eps_x = full");
            }
        }
        if let Some(r) = d.tbar {
            let _ = writeln!(out, "tbar = {:?}:{:?}:{:?}", r.min, r.max, r.step);
        }
        let _ = writeln!(out, "\n[grid]");
        for (name, grid) in [("t", &self.t_grid), ("x", &self.x_grid)] {
            let _ = writeln!(out, "{name} = {:?}:{:?}:{:?}", grid.min(), grid.max(), grid.h());
        }
        out
    }

    /// Hex SHA-256 of the canonical rendering.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.render().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn alphas(&self) -> [f64; 4] {
        let g = &self.geometry;
        [g.alpha1(), g.alpha3(), g.alpha5(), g.alpha7()]
    }

    /// Where the detectors sit, used as the window center `x̄`.
    pub fn detector_x(&self) -> f64 {
        self.geometry.x_detectors
    }

    /// Detector window centers; by default they tile the time grid with
    /// windows of width `eps_t`.
    pub fn tbar_range(&self) -> TbarRange {
        self.detector.tbar.unwrap_or_else(|| {
            let eps = self.detector.eps_t;
            TbarRange {
                min: self.t_grid.min() + 0.5 * eps,
                max: self.t_grid.max() - 0.5 * eps,
                step: eps,
            }
        })
    }

    /// Photon profiles at the detectors (`τ₇`), sampled on the
    /// detection-frame grids.
    pub fn final_profiles(&self) -> Result<(TemporalProfile, SpatialProfile)> {
        let a7 = self.geometry.alpha7();
        let p = &self.photon;
        let tc = p.t0 + a7;
        let xc = p.x0 + a7;
        let temporal = match &p.temporal {
            TemporalKind::Box => profiles::make_box_temporal(self.t_grid, tc, p.delta_t)?,
            TemporalKind::Gaussian => profiles::make_gaussian_temporal(self.t_grid, tc, p.omega_t)?,
            TemporalKind::ExpForward => profiles::make_exp_tail_temporal(
                self.t_grid,
                tc,
                p.omega_t,
                TailDirection::Forward,
            )?,
            TemporalKind::ExpBackward => profiles::make_exp_tail_temporal(
                self.t_grid,
                tc,
                p.omega_t,
                TailDirection::Backward,
            )?,
            TemporalKind::Spectrum { spectrum, .. } => {
                profiles::synthesize_from_spectrum(self.t_grid, spectrum, tc)?
            }
        };
        let spatial = match p.spatial {
            SpatialKind::Sinc => {
                profiles::make_sinc_spatial_with_tol(self.x_grid, xc, p.omega_x, p.tail_tol)?
            }
            SpatialKind::Box => profiles::make_box_spatial(self.x_grid, xc, p.delta_x)?,
        };
        Ok((temporal, spatial))
    }

    /// Photon profiles after a cumulative shift `alpha` from the source.
    /// The samples are those of [`final_profiles`](Self::final_profiles),
    /// relabelled on grids moved back by `α₇ − alpha`.
    pub fn profiles_at(&self, alpha: f64) -> Result<(TemporalProfile, SpatialProfile)> {
        let back = alpha - self.geometry.alpha7();
        let (t, x) = self.final_profiles()?;
        Ok((t.shifted(back), x.shifted(back)))
    }

    /// Checks the scenario invariants; any violation is an error.
    pub fn check(&self) -> Result<()> {
        let g = &self.geometry;
        let xs = [g.x_source, g.x_bs1, g.x_mirrors, g.x_bs2, g.x_detectors];
        if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(
                "geometry must satisfy x_source < x_bs1 < x_mirrors < x_bs2 < x_detectors".into(),
            ));
        }
        for alpha in self.alphas() {
            self.t_grid.cells(alpha)?;
            self.x_grid.cells(alpha)?;
        }
        if !(self.kappa1.is_finite() && self.kappa2.is_finite()) {
            return Err(Error::Invalid("mirror phases must be finite".into()));
        }
        let p = &self.photon;
        for (name, v) in [
            ("omega_t", p.omega_t),
            ("delta_t", p.delta_t),
            ("omega_x", p.omega_x),
            ("delta_x", p.delta_x),
            ("tail_tol", p.tail_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(p.t0.is_finite() && p.x0.is_finite()) {
            return Err(Error::Invalid("emission center must be finite".into()));
        }
        let d = &self.detector;
        if !(d.eps_t.is_finite() && d.eps_t > 0.0) {
            return Err(Error::Invalid(format!("eps_t must be positive, got {}", d.eps_t)));
        }
        if let Some(e) = d.eps_x {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::Invalid(format!("eps_x must be positive, got {e}")));
            }
        }
        if let Some(r) = d.tbar {
            if !(r.step > 0.0 && r.max >= r.min && r.min.is_finite() && r.max.is_finite()) {
                return Err(Error::Invalid(format!(
                    "tbar {}:{}:{} needs step > 0 and max >= min",
                    r.min, r.max, r.step
                )));
            }
        }
        self.final_profiles()?;
        Ok(())
    }

    /// Non-fatal diagnostics.
    pub fn validate(&self) -> Vec<ScenarioWarning> {
        let mut warnings = Vec::new();
        let Ok((temporal, _)) = self.final_profiles() else {
            return warnings;
        };
        if matches!(self.photon.temporal, TemporalKind::Spectrum { .. }) {
            warnings.extend(
                temporal.warnings().iter().map(|w| ScenarioWarning::ProfileBoundary(w.to_string())),
            );
        } else if temporal.truncated_mass() > TAIL_MASS_WARN {
            warnings.push(ScenarioWarning::TailMass { mass: temporal.truncated_mass() });
        }

        let g = &self.geometry;
        for (region, alpha) in [(&self.bs1, g.alpha1()), (&self.bs2, g.alpha5())] {
            if region.is_empty() {
                continue;
            }
            if let Ok((t, x)) = self.profiles_at(alpha) {
                let mass = region_mass(&t, &x, region);
                if mass < DEAD_WINDOW_MASS {
                    warnings.push(ScenarioWarning::DeadWindow {
                        element: region.label().to_string(),
                        mass,
                    });
                }
            }
        }

        let r = self.tbar_range();
        let half = 0.5 * self.detector.eps_t;
        let slack = 1e-9;
        let last = r.value(r.len() - 1);
        if r.min - half < self.t_grid.min() - slack || last + half > self.t_grid.max() + slack {
            warnings.push(ScenarioWarning::ClippedWindow(format!(
                "time windows span [{}, {}] beyond grid [{}, {}]",
                r.min - half,
                last + half,
                self.t_grid.min(),
                self.t_grid.max()
            )));
        }
        if let Some(eps_x) = self.detector.eps_x {
            let xb = self.detector_x();
            if xb - 0.5 * eps_x < self.x_grid.min() - slack
                || xb + 0.5 * eps_x > self.x_grid.max() + slack
            {
                warnings.push(ScenarioWarning::ClippedWindow(format!(
                    "spatial window {xb} ± {} exceeds grid",
                    0.5 * eps_x
                )));
            }
        }
        warnings
    }

    /// Everything moved by `delta` along the world line, grids included.
    pub fn translated(&self, delta: f64) -> Self {
        let g = &self.geometry;
        let mut s = self.clone();
        s.geometry = Geometry {
            x_source: g.x_source + delta,
            x_bs1: g.x_bs1 + delta,
            x_mirrors: g.x_mirrors + delta,
            x_bs2: g.x_bs2 + delta,
            x_detectors: g.x_detectors + delta,
        };
        s.photon.t0 += delta;
        s.photon.x0 += delta;
        s.bs1 = self.bs1.shifted(delta);
        s.bs2 = self.bs2.shifted(delta);
        s.detector.tbar = Some(self.tbar_range()).map(|r| TbarRange {
            min: r.min + delta,
            max: r.max + delta,
            step: r.step,
        });
        s.t_grid = self.t_grid.shifted(delta);
        s.x_grid = self.x_grid.shifted(delta);
        s
    }

    /// Accuracy claimed for reported probabilities at the default grid.
    /// Smooth temporal profiles resolve to 1e-6; an exponential tail, whose
    /// density has a curvature jump at its onset, is claimed to 1e-5; any
    /// spatial cut through the slowly decaying sinc profile, to 1e-3.
    pub fn probability_tolerance(&self) -> f64 {
        let temporal: f64 = match self.photon.temporal {
            TemporalKind::ExpForward | TemporalKind::ExpBackward => 1e-5,
            _ => 1e-6,
        };
        let cuts_space = self.detector.eps_x.is_some()
            || !(self.bs1.is_temporal() && self.bs2.is_temporal());
        if cuts_space && self.photon.spatial == SpatialKind::Sinc {
            temporal.max(1e-3)
        } else {
            temporal
        }
    }

    /// Same scenario on grids with step `h`.
    pub fn with_grid_step(&self, h: f64) -> Result<Self> {
        let mut s = self.clone();
        s.t_grid = AxisGrid::new(self.t_grid.min(), self.t_grid.max(), h)?;
        s.x_grid = AxisGrid::new(self.x_grid.min(), self.x_grid.max(), h)?;
        s.check()?;
        Ok(s)
    }
}

/// Parses a real number in radians or plain units. Accepts decimal
/// literals and multiples of `pi` such as `pi`, `-pi/2`, `2*pi`, `0.5pi`.
/// Degree suffixes are rejected.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.ends_with("deg") || s.ends_with('°') {
        return None;
    }
    if let Ok(v) = s.parse::<f64>() {
        return (!v.is_nan()).then_some(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (s, 1.0),
    };
    let coef = num.strip_suffix("pi")?.trim().trim_end_matches('*').trim();
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let v = coef * PI / den;
    v.is_finite().then_some(v)
}

fn parse_triple(s: &str) -> Option<(f64, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return None;
    }
    Some((parse_real(parts[0])?, parse_real(parts[1])?, parse_real(parts[2])?))
}

const SECTIONS: [&str; 7] = ["photon", "geometry", "bs1", "bs2", "mirrors", "detector", "grid"];

fn parse(text: &str, base: &Path) -> Result<Scenario> {
    let mut s = Scenario::default();
    let mut section: Option<&str> = None;
    let mut seen: Vec<(String, String)> = Vec::new();
    let mut windows: [Option<Vec<(f64, f64)>>; 2] = [None, None];
    let mut extents: [Option<(f64, f64)>; 2] = [None, None];
    let mut t_spec: Option<(f64, f64, f64)> = None;
    let mut x_spec: Option<(f64, f64, f64)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Syntax { line: line_no, msg: "unclosed section".into() })?
                .trim();
            section = Some(SECTIONS.iter().copied().find(|&n| n == name).ok_or_else(|| {
                Error::Syntax { line: line_no, msg: format!("unknown section [{name}]") }
            })?);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Syntax {
            line: line_no,
            msg: format!("expected key = value, got `{line}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| Error::Syntax {
            line: line_no,
            msg: "key outside of any section".into(),
        })?;
        if seen.iter().any(|(a, b)| a == sec && b == key) {
            return Err(Error::Syntax { line: line_no, msg: format!("duplicate key `{key}`") });
        }
        seen.push((sec.to_string(), key.to_string()));

        let bad = |what: &str| Error::Syntax {
            line: line_no,
            msg: format!("invalid {what} `{value}` for `{key}`"),
        };
        let real = || parse_real(value).ok_or_else(|| bad("number"));
        let unknown = || Error::UnknownKey {
            line: line_no,
            section: sec.to_string(),
            key: key.to_string(),
        };

        match sec {
            "photon" => match key {
                "temporal" => {
                    s.photon.temporal = match value {
                        "box" => TemporalKind::Box,
                        "gaussian" => TemporalKind::Gaussian,
                        "exp_forward" => TemporalKind::ExpForward,
                        "exp_backward" => TemporalKind::ExpBackward,
                        v => match v.strip_prefix("spectrum:") {
                            Some(p) => {
                                let path = PathBuf::from(p.trim());
                                let full = base.join(&path);
                                let text = std::fs::read_to_string(&full)
                                    .map_err(|e| Error::io(&full, e))?;
                                TemporalKind::Spectrum { path, spectrum: Spectrum::parse(&text)? }
                            }
                            None => return Err(bad("temporal profile")),
                        },
                    }
                }
                "spatial" => {
                    s.photon.spatial = match value {
                        "sinc" => SpatialKind::Sinc,
                        "box" => SpatialKind::Box,
                        _ => return Err(bad("spatial profile")),
                    }
                }
                "omega_t" => s.photon.omega_t = real()?,
                "delta_t" => s.photon.delta_t = real()?,
                "omega_x" => s.photon.omega_x = real()?,
                "delta_x" => s.photon.delta_x = real()?,
                "t0" => s.photon.t0 = real()?,
                "x0" => s.photon.x0 = real()?,
                "tail_tol" => s.photon.tail_tol = real()?,
                _ => return Err(unknown()),
            },
            "geometry" => {
                let g = &mut s.geometry;
                let slot = match key {
                    "x_source" => &mut g.x_source,
                    "x_bs1" => &mut g.x_bs1,
                    "x_mirrors" => &mut g.x_mirrors,
                    "x_bs2" => &mut g.x_bs2,
                    "x_detectors" => &mut g.x_detectors,
                    _ => return Err(unknown()),
                };
                *slot = real()?;
            }
            "bs1" | "bs2" => {
                let i = usize::from(sec == "bs2");
                let wrap = |e: Error| Error::Syntax { line: line_no, msg: e.to_string() };
                match key {
                    "present_t" => windows[i] = Some(parse_present_t(value).map_err(wrap)?),
                    "extent_x" => extents[i] = Some(parse_interval(value).map_err(wrap)?),
                    _ => return Err(unknown()),
                }
            }
            "mirrors" => match key {
                "kappa1" => s.kappa1 = real()?,
                "kappa2" => s.kappa2 = real()?,
                _ => return Err(unknown()),
            },
            "detector" => match key {
                "eps_t" => s.detector.eps_t = real()?,
                "eps_x" => {
                    s.detector.eps_x = if value == "full" { None } else { Some(real()?) }
                }
                "tbar" => {
                    let (min, max, step) = parse_triple(value).ok_or_else(|| bad("range"))?;
                    s.detector.tbar = Some(TbarRange { min, max, step });
                }
                _ => return Err(unknown()),
            },
            "grid" => {
                let spec = parse_triple(value).ok_or_else(|| bad("grid"))?;
                match key {
                    "t" => t_spec = Some(spec),
                    "x" => x_spec = Some(spec),
                    _ => return Err(unknown()),
                }
            }
            _ => unreachable!("section names are validated above"),
        }
    }

    for (i, label) in ["BS1", "BS2"].into_iter().enumerate() {
        if let Some(w) = &windows[i] {
            let region = SpacetimeRegion::from_windows(label, w, extents[i])?;
            if i == 0 {
                s.bs1 = region;
            } else {
                s.bs2 = region;
            }
        } else if extents[i].is_some() {
            return Err(Error::Invalid(format!("{label}: extent_x given without present_t")));
        }
    }
    if let Some((lo, hi, h)) = t_spec {
        s.t_grid = AxisGrid::new(lo, hi, h)?;
    }
    if let Some((lo, hi, h)) = x_spec {
        s.x_grid = AxisGrid::new(lo, hi, h)?;
    }
    s.check()?;
    Ok(s)
}
