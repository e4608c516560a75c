//! Temporal and spatial amplitude profiles of the photon.
//!
//! Every constructor samples an analytic shape on an [`AxisGrid`] and then
//! rescales it to unit L2 norm under the trapezoid rule, whatever
//! normalization the shape carries analytically. Detection probabilities
//! square the amplitude, so only the L2 convention makes the two detector
//! probabilities add up to one.

use std::f64::consts::PI;
use std::fmt;
use std::marker::PhantomData;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::AxisGrid;

/// Default admissible mass of the sinc profile lost to grid truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-3;

/// Samples at a grid boundary larger than this trigger a warning.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Gaussian profiles need this many `ω_t` of grid on each side of the center.
pub const GAUSSIAN_COVERAGE: f64 = 8.0;

/// Exponential tails need `EXP_TAIL_COVERAGE / ω_t` of grid in the tail direction.
pub const EXP_TAIL_COVERAGE: f64 = 20.0;

/// Relative spectral magnitude below which a frequency bin is negligible.
const SPECTRUM_FLOOR: f64 = 1e-9;

/// Axis marker for temporal profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Time {}

/// Axis marker for spatial profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {}

pub type TemporalProfile = Profile<Time>;
pub type SpatialProfile = Profile<Space>;

/// Direction of the tail of an asymmetric temporal profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailDirection {
    /// Support at `t ≥ center`: the photon probes later times.
    Forward,
    /// Support at `t ≤ center`: the photon probes earlier times.
    Backward,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileWarning {
    /// A boundary sample is not negligible.
    BoundaryNonzero { at: f64, magnitude: f64 },
}

impl fmt::Display for ProfileWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileWarning::BoundaryNonzero { at, magnitude } => {
                write!(f, "profile amplitude {magnitude:.3e} at grid boundary {at}")
            }
        }
    }
}

/// Complex amplitude sampled on one axis, normalized to unit L2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<A> {
    grid: AxisGrid,
    samples: Vec<Complex64>,
    center: f64,
    width_param: f64,
    renorm: f64,
    truncated_mass: f64,
    warnings: Vec<ProfileWarning>,
    _axis: PhantomData<A>,
}

impl<A> Profile<A> {
    fn finish(
        grid: AxisGrid,
        mut samples: Vec<Complex64>,
        center: f64,
        width_param: f64,
        analytic_norm_sq: Option<f64>,
    ) -> Result<Self> {
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("profile has non-finite samples".into()));
        }
        let density: Vec<f64> = samples.iter().map(|z| z.norm_sqr()).collect();
        let norm_sq = grid.trapezoid(&density);
        if norm_sq <= 0.0 {
            return Err(Error::Domain("profile vanishes on the grid".into()));
        }
        let truncated_mass = analytic_norm_sq.map_or(0.0, |full| (1.0 - norm_sq / full).max(0.0));
        let renorm = norm_sq.sqrt().recip();
        samples.iter_mut().for_each(|z| *z *= renorm);

        let mut warnings = Vec::new();
        for (i, at) in [(0, grid.min()), (grid.count() - 1, grid.max())] {
            let magnitude = samples[i].norm();
            if magnitude > BOUNDARY_TOL {
                warnings.push(ProfileWarning::BoundaryNonzero { at, magnitude });
            }
        }
        Ok(Self {
            grid,
            samples,
            center,
            width_param,
            renorm,
            truncated_mass,
            warnings,
            _axis: PhantomData,
        })
    }

    pub fn grid(&self) -> &AxisGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Nominal peak or reference coordinate.
    pub fn center(&self) -> f64 {
        self.center
    }

    /// Width parameter the profile was built with (`ω` or `Δ`).
    pub fn width_param(&self) -> f64 {
        self.width_param
    }

    /// Factor applied to the raw analytic samples to reach unit L2 norm.
    pub fn renorm_factor(&self) -> f64 {
        self.renorm
    }

    /// Fraction of the analytic L2 mass that falls off the grid (zero when
    /// the shape has no analytic normalization).
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    pub fn warnings(&self) -> &[ProfileWarning] {
        &self.warnings
    }

    /// `|γ|²` at every node.
    pub fn density(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Trapezoid L2 norm.
    pub fn l2_norm(&self) -> f64 {
        self.grid.trapezoid(&self.density()).sqrt()
    }

    /// Linearly interpolated amplitude; zero off the grid.
    pub fn amplitude_at(&self, t: f64) -> Complex64 {
        let re: Vec<f64> = self.samples.iter().map(|z| z.re).collect();
        let im: Vec<f64> = self.samples.iter().map(|z| z.im).collect();
        Complex64::new(self.grid.interpolate(&re, t), self.grid.interpolate(&im, t))
    }

    /// The same samples relabelled on a grid moved by `alpha`.
    pub fn shifted(&self, alpha: f64) -> Self {
        Self {
            grid: self.grid.shifted(alpha),
            samples: self.samples.clone(),
            center: self.center + alpha,
            width_param: self.width_param,
            renorm: self.renorm,
            truncated_mass: self.truncated_mass,
            warnings: self.warnings.clone(),
            _axis: PhantomData,
        }
    }
}

/// Trapezoid L2 norm of a profile.
pub fn l2_norm<A>(profile: &Profile<A>) -> f64 {
    profile.l2_norm()
}

fn box_profile<A>(grid: AxisGrid, center: f64, delta: f64) -> Result<Profile<A>> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Domain(format!("box width must be positive, got {delta}")));
    }
    if delta < 2.0 * grid.h() {
        return Err(Error::Resolution(format!(
            "box width {delta} is below two grid cells ({})",
            2.0 * grid.h()
        )));
    }
    let lo = center - 0.5 * delta;
    let hi = center + 0.5 * delta;
    if !(grid.contains(lo) && grid.contains(hi)) {
        return Err(Error::Domain(format!(
            "box support [{lo}, {hi}) exceeds grid [{}, {}]",
            grid.min(),
            grid.max()
        )));
    }
    let slack = 1e-6 * grid.h();
    let samples = grid
        .points()
        .map(|t| {
            if t >= lo - slack && t < hi - slack {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Profile::finish(grid, samples, center, delta, None)
}

/// Box of width `delta_t` on the half-open support `[c − Δ/2, c + Δ/2)`.
pub fn make_box_temporal(grid: AxisGrid, center: f64, delta_t: f64) -> Result<TemporalProfile> {
    box_profile(grid, center, delta_t)
}

/// Spatial counterpart of [`make_box_temporal`].
pub fn make_box_spatial(grid: AxisGrid, center: f64, delta_x: f64) -> Result<SpatialProfile> {
    box_profile(grid, center, delta_x)
}

/// Amplitude `exp(−(t−c)²/(2ω²))`; the density is Gaussian with standard
/// deviation `ω/√2`.
pub fn make_gaussian_temporal(
    grid: AxisGrid,
    center: f64,
    omega_t: f64,
) -> Result<TemporalProfile> {
    if !(omega_t.is_finite() && omega_t > 0.0) {
        return Err(Error::Domain(format!("omega_t must be positive, got {omega_t}")));
    }
    let samples: Vec<Complex64> = grid
        .points()
        .map(|t| {
            let s = (t - center) / omega_t;
            Complex64::new((-0.5 * s * s).exp(), 0.0)
        })
        .collect();
    let reach = GAUSSIAN_COVERAGE * omega_t;
    if center - reach < grid.min() - 1e-9 || center + reach > grid.max() + 1e-9 {
        let density: Vec<f64> = samples.iter().map(|z| z.norm_sqr()).collect();
        let deficit = 1.0 - grid.trapezoid(&density) / (omega_t * PI.sqrt());
        return Err(Error::Truncation {
            what: format!(
                "Gaussian at {center} with omega_t {omega_t} needs grid [{}, {}]",
                center - reach,
                center + reach
            ),
            deficit: deficit.max(0.0),
        });
    }
    Profile::finish(grid, samples, center, omega_t, Some(omega_t * PI.sqrt()))
}

/// One-sided profile `s·exp(−ω s)` with `s = ±(t − c) ≥ 0`, peaking at
/// `1/ω` from the center in the tail direction.
pub fn make_exp_tail_temporal(
    grid: AxisGrid,
    center: f64,
    omega_t: f64,
    direction: TailDirection,
) -> Result<TemporalProfile> {
    if !(omega_t.is_finite() && omega_t > 0.0) {
        return Err(Error::Domain(format!("omega_t must be positive, got {omega_t}")));
    }
    if !grid.contains(center) {
        return Err(Error::Domain(format!("tail origin {center} outside grid")));
    }
    let sign = match direction {
        TailDirection::Forward => 1.0,
        TailDirection::Backward => -1.0,
    };
    let samples: Vec<Complex64> = grid
        .points()
        .map(|t| {
            let s = sign * (t - center);
            if s > 0.0 {
                Complex64::new(s * (-omega_t * s).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    // ∫₀^∞ s² e^{−2ωs} ds = 1/(4ω³)
    let full = 0.25 / omega_t.powi(3);
    let reach = center + sign * EXP_TAIL_COVERAGE / omega_t;
    if !grid.contains(reach) {
        let density: Vec<f64> = samples.iter().map(|z| z.norm_sqr()).collect();
        return Err(Error::Truncation {
            what: format!("{direction:?} tail from {center} needs the grid to reach {reach}"),
            deficit: (1.0 - grid.trapezoid(&density) / full).max(0.0),
        });
    }
    Profile::finish(grid, samples, center, omega_t, Some(full))
}

/// Lowest-order spatial mode `√(ω/π)·sin(ω(x−c))/(ω(x−c))` with the default
/// tail tolerance.
pub fn make_sinc_spatial(grid: AxisGrid, center: f64, omega_x: f64) -> Result<SpatialProfile> {
    make_sinc_spatial_with_tol(grid, center, omega_x, DEFAULT_TAIL_TOL)
}

/// Sinc profile truncated at its outermost zeros inside the grid, so the
/// sampled amplitude is continuous and vanishes at both boundaries. The mass
/// beyond the cut is reported by [`Profile::truncated_mass`] and must stay
/// below `tail_tol`.
pub fn make_sinc_spatial_with_tol(
    grid: AxisGrid,
    center: f64,
    omega_x: f64,
    tail_tol: f64,
) -> Result<SpatialProfile> {
    if !(omega_x.is_finite() && omega_x > 0.0) {
        return Err(Error::Domain(format!("omega_x must be positive, got {omega_x}")));
    }
    let zero_spacing = PI / omega_x;
    let k_lo = ((grid.min() - center) / zero_spacing - 1e-9).ceil();
    let k_hi = ((grid.max() - center) / zero_spacing + 1e-9).floor();
    if k_lo > -1.0 || k_hi < 1.0 {
        return Err(Error::Truncation {
            what: format!("sinc main lobe at {center} does not fit in the grid"),
            deficit: 1.0,
        });
    }
    let cut_lo = center + k_lo * zero_spacing;
    let cut_hi = center + k_hi * zero_spacing;
    let peak = (omega_x / PI).sqrt();
    let samples = grid
        .points()
        .map(|x| {
            // Nodes on the cut are zeros of the sinc; store them as exact zeros.
            if x <= cut_lo + 1e-9 || x >= cut_hi - 1e-9 {
                return Complex64::new(0.0, 0.0);
            }
            let u = omega_x * (x - center);
            let sinc = if u.abs() < 1e-8 { 1.0 } else { u.sin() / u };
            Complex64::new(peak * sinc, 0.0)
        })
        .collect();
    let profile = Profile::finish(grid, samples, center, omega_x, Some(1.0))?;
    if profile.truncated_mass > tail_tol {
        return Err(Error::Truncation {
            what: format!(
                "sinc with omega_x {omega_x} on [{}, {}] exceeds tail tolerance {tail_tol}",
                grid.min(),
                grid.max()
            ),
            deficit: profile.truncated_mass,
        });
    }
    Ok(profile)
}

/// Frequency profile `a(ω)` on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    omega_grid: AxisGrid,
    samples: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(omega_grid: AxisGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != omega_grid.count() {
            return Err(Error::Spectrum(format!(
                "{} samples for {} frequencies",
                samples.len(),
                omega_grid.count()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Spectrum("non-finite amplitude".into()));
        }
        if samples.iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(Error::Spectrum("spectrum is identically zero".into()));
        }
        Ok(Self { omega_grid, samples })
    }

    /// Parses whitespace-separated `ω Re[a] [Im[a]]` rows with `#` comments.
    /// Frequencies must be strictly increasing and uniformly spaced.
    pub fn parse(text: &str) -> Result<Self> {
        let mut omegas = Vec::new();
        let mut samples = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if !(2..=3).contains(&cols.len()) {
                return Err(Error::Spectrum(format!(
                    "line {}: expected 2 or 3 columns, got {}",
                    n + 1,
                    cols.len()
                )));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Spectrum(format!("line {}: bad number `{s}`", n + 1)))
            };
            let omega = num(cols[0])?;
            let re = num(cols[1])?;
            let im = if cols.len() == 3 { num(cols[2])? } else { 0.0 };
            if let Some(&prev) = omegas.last() {
                if omega <= prev {
                    return Err(Error::Spectrum(format!(
                        "line {}: frequencies must be strictly increasing",
                        n + 1
                    )));
                }
            }
            omegas.push(omega);
            samples.push(Complex64::new(re, im));
        }
        if omegas.len() < 2 {
            return Err(Error::Spectrum("need at least two frequency rows".into()));
        }
        let step = (omegas[omegas.len() - 1] - omegas[0]) / (omegas.len() - 1) as f64;
        for pair in omegas.windows(2) {
            if ((pair[1] - pair[0]) - step).abs() > 1e-6 * step {
                return Err(Error::Spectrum("frequency rows must be uniformly spaced".into()));
            }
        }
        let grid = AxisGrid::new(omegas[0], omegas[omegas.len() - 1], step)?;
        Self::new(grid, samples)
    }

    pub fn omega_grid(&self) -> &AxisGrid {
        &self.omega_grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Largest `|ω|` carrying a non-negligible amplitude.
    pub fn omega_max(&self) -> f64 {
        let peak = self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.omega_grid
            .points()
            .zip(&self.samples)
            .filter(|(_, a)| a.norm() > SPECTRUM_FLOOR * peak)
            .map(|(w, _)| w.abs())
            .fold(0.0, f64::max)
    }

    /// Reciprocal RMS spread of `|a|²`, the temporal width it implies.
    fn temporal_width(&self) -> f64 {
        let weights: Vec<f64> = self.samples.iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = weights.iter().sum();
        let mean: f64 =
            self.omega_grid.points().zip(&weights).map(|(w, p)| w * p).sum::<f64>() / total;
        let var: f64 = self
            .omega_grid
            .points()
            .zip(&weights)
            .map(|(w, p)| (w - mean).powi(2) * p)
            .sum::<f64>()
            / total;
        if var > 0.0 {
            (2.0 * var).sqrt().recip()
        } else {
            f64::INFINITY
        }
    }
}

/// `γᵗ(t) = (2π)^{-1/2} ∫ a(ω) e^{iω(t − shift)} dω` by trapezoid quadrature
/// over the spectrum's frequency grid.
pub fn synthesize_from_spectrum(
    grid: AxisGrid,
    spectrum: &Spectrum,
    shift: f64,
) -> Result<TemporalProfile> {
    let omega_max = spectrum.omega_max();
    if omega_max > 0.0 && grid.h() > PI / omega_max {
        return Err(Error::Resolution(format!(
            "time step {} exceeds the Nyquist limit π/{omega_max} = {}",
            grid.h(),
            PI / omega_max
        )));
    }
    let og = spectrum.omega_grid();
    let n = og.count();
    let weighted: Vec<(f64, Complex64)> = og
        .points()
        .zip(spectrum.samples())
        .enumerate()
        .map(|(j, (w, a))| {
            let wt = if j == 0 || j == n - 1 { 0.5 * og.h() } else { og.h() };
            (w, a * wt)
        })
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .collect();
    let norm = (2.0 * PI).sqrt().recip();
    let samples = grid
        .points()
        .map(|t| {
            let tau = t - shift;
            let sum: Complex64 = weighted
                .iter()
                .map(|&(w, a)| a * Complex64::from_polar(1.0, w * tau))
                .sum();
            sum * norm
        })
        .collect();
    Profile::finish(grid, samples, shift, spectrum.temporal_width(), None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(min: f64, max: f64, h: f64) -> AxisGrid {
        AxisGrid::new(min, max, h).unwrap()
    }

    #[test]
    fn box_density_and_norm() {
        let p = make_box_temporal(grid(0.0, 40.0, 0.02), 5.0, 2.0).unwrap();
        assert!((p.l2_norm() - 1.0).abs() < 1e-9);
        for (t, d) in p.grid().points().zip(p.density()) {
            if t > 4.0 + 1e-9 && t < 6.0 - 1e-9 {
                assert!((d - 0.5).abs() < 1e-12, "t={t} d={d}");
            } else if !(3.99..=4.01).contains(&t) {
                assert_eq!(d, 0.0, "t={t}");
            }
        }
        assert!(p.warnings().is_empty());
    }

    #[test]
    fn box_errors() {
        let g = grid(0.0, 40.0, 0.02);
        assert!(matches!(make_box_temporal(g, 39.9, 2.0), Err(Error::Domain(_))));
        assert!(matches!(make_box_temporal(g, 5.0, 0.03), Err(Error::Resolution(_))));
    }

    #[test]
    fn gaussian_norm_and_symmetry() {
        let p = make_gaussian_temporal(grid(0.0, 40.0, 0.02), 15.0, 1.0).unwrap();
        assert!((p.l2_norm() - 1.0).abs() < 1e-9);
        let d = p.density();
        let c = 750;
        for a in 1..700 {
            assert!((d[c + a] - d[c - a]).abs() < 1e-12);
        }
        assert!(p.truncated_mass() < 1e-12);
        assert!(p.warnings().is_empty());
    }

    #[test]
    fn gaussian_needs_coverage() {
        let r = make_gaussian_temporal(grid(0.0, 40.0, 0.02), 5.0, 1.0);
        assert!(matches!(r, Err(Error::Truncation { .. })));
    }

    #[test]
    fn exp_tail_support_is_one_sided() {
        let g = grid(-5.0, 40.0, 0.02);
        let fwd = make_exp_tail_temporal(g, 15.0, 1.0, TailDirection::Forward).unwrap();
        let bwd = make_exp_tail_temporal(g, 15.0, 1.0, TailDirection::Backward).unwrap();
        for ((t, f), b) in g.points().zip(fwd.density()).zip(bwd.density()) {
            if t < 15.0 {
                assert_eq!(f, 0.0);
            }
            if t > 15.0 {
                assert_eq!(b, 0.0);
            }
        }
        assert!((fwd.l2_norm() - 1.0).abs() < 1e-9);
        assert!((bwd.l2_norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exp_tail_peak() {
        let g = grid(-2.0, 25.0, 0.01);
        let p = make_exp_tail_temporal(g, 0.0, 1.0, TailDirection::Forward).unwrap();
        let d = p.density();
        let imax = (0..d.len()).max_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
        assert!((g.point(imax) - 1.0).abs() <= g.h());
    }

    #[test]
    fn exp_tail_needs_coverage() {
        let g = grid(0.0, 30.0, 0.02);
        let r = make_exp_tail_temporal(g, 15.0, 1.0, TailDirection::Forward);
        assert!(matches!(r, Err(Error::Truncation { .. })));
    }

    #[test]
    fn sinc_center_value_and_zeros() {
        // omega = π/2 puts the zeros at even integers, which are nodes.
        let omega = PI / 2.0;
        let p = make_sinc_spatial_with_tol(grid(-2000.0, 2000.0, 0.02), 0.0, omega, 1e-3).unwrap();
        let c = p.grid().nearest_index(0.0).unwrap();
        let raw = p.samples()[c].re / p.renorm_factor();
        assert!((raw - (omega / PI).sqrt()).abs() < 1e-12);
        assert!((p.l2_norm() - 1.0).abs() < 1e-9);
        for k in [-5i32, -2, -1, 1, 2, 7] {
            let x = f64::from(k) * PI / omega;
            assert!(p.amplitude_at(x).norm() < 1e-9, "k={k}");
        }
        assert!(p.samples()[0].norm() == 0.0);
        assert!(p.truncated_mass() > 0.0 && p.truncated_mass() < 1e-3);
    }

    #[test]
    fn sinc_tail_tolerance_is_enforced() {
        let r = make_sinc_spatial(grid(0.0, 40.0, 0.02), 20.0, 2.0);
        match r {
            Err(Error::Truncation { deficit, .. }) => assert!(deficit > 1e-3),
            other => panic!("expected truncation, got {other:?}"),
        }
        assert!(make_sinc_spatial(grid(0.0, 40.0, 0.02), 20.0, 20.0).is_ok());
    }

    #[test]
    fn norm_of_zero_and_raw_gaussian() {
        let g = grid(-10.0, 10.0, 0.001);
        assert_eq!(g.trapezoid(&vec![0.0; g.count()]).sqrt(), 0.0);
        // ∫ e^{-t²} dt = √π, so the L2 norm of e^{-t²/2} is π^{1/4}.
        let d: Vec<f64> = g.points().map(|t| (-t * t).exp()).collect();
        assert!((g.trapezoid(&d).sqrt() - PI.powf(0.25)).abs() < 1e-6);
    }

    #[test]
    fn spectrum_parse() {
        let s = Spectrum::parse("# w re im\n0 1 0\n0.5 2\n1.0 3 1 # tail\n").unwrap();
        assert_eq!(s.omega_grid().count(), 3);
        assert_eq!(s.samples()[2], Complex64::new(3.0, 1.0));
        assert!(Spectrum::parse("0 1\n0 2\n").is_err());
        assert!(Spectrum::parse("0 1\n1 2\n3 1\n").is_err());
        assert!(Spectrum::parse("0 1 2 3\n1 1\n").is_err());
        assert!(Spectrum::parse("0 0\n1 0\n").is_err());
    }

    #[test]
    fn single_bin_spectrum_gives_flat_density() {
        let og = grid(-1.0, 1.0, 0.1);
        let mut a = vec![Complex64::new(0.0, 0.0); og.count()];
        a[13] = Complex64::new(1.0, 0.0);
        let s = Spectrum::new(og, a).unwrap();
        let p = synthesize_from_spectrum(grid(0.0, 40.0, 0.02), &s, 0.0).unwrap();
        let d = p.density();
        let first = d[0];
        assert!(d.iter().all(|x| (x - first).abs() < 1e-6));
        assert!((p.l2_norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nyquist_violation() {
        let og = grid(-200.0, 200.0, 1.0);
        let a = og.points().map(|w| Complex64::new((-w * w / 1e4).exp(), 0.0)).collect();
        let s = Spectrum::new(og, a).unwrap();
        let r = synthesize_from_spectrum(grid(0.0, 40.0, 0.02), &s, 20.0);
        assert!(matches!(r, Err(Error::Resolution(_))));
    }
}
