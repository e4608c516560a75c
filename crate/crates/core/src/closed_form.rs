//! Direct evaluation of the detector densities and their window integrals.
//!
//! At the detectors the photon density is `ρ(t, x) = ρ_t(t)·ρ_x(x)`, weighted
//! per point by [`branch_coefficient`] of the branch the point traces back
//! to. Branch membership is piecewise constant on the rectangles cut out by
//! the (shifted) presence windows, so a window integral splits into cells on
//! which the weight is constant and the integrand separates. Each cell then
//! costs two 1D integrals of the piecewise-linear interpolants of `ρ_t` and
//! `ρ_x`, which are exact for the bilinear interpolant of `ρ` on the grid.
//!
//! [`Quadrature::Nodes`] keeps the brute-force 2D node sum as a cross-check.

use rayon::prelude::*;

use crate::channel::{branch_coefficient, BranchKey, Detector};
use crate::error::{Error, Result};
use crate::grid::AxisGrid;
use crate::profiles::{SpatialProfile, TemporalProfile};
use crate::regions::SpacetimeRegion;
use crate::scenarios::{Scenario, TbarRange};

/// Spatial extent of a detector window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialSpan {
    /// The whole spatial axis.
    Full,
    /// `[x̄ − ε_x/2, x̄ + ε_x/2]`.
    Width(f64),
}

impl SpatialSpan {
    pub fn from_option(eps_x: Option<f64>) -> Self {
        eps_x.map_or(SpatialSpan::Full, SpatialSpan::Width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorWindow {
    pub t_bar: f64,
    pub x_bar: f64,
    pub eps_t: f64,
    pub eps_x: SpatialSpan,
}

impl DetectorWindow {
    /// Window covering both grids entirely.
    pub fn covering(t_grid: &AxisGrid, x_grid: &AxisGrid) -> Self {
        Self {
            t_bar: 0.5 * (t_grid.min() + t_grid.max()),
            x_bar: 0.5 * (x_grid.min() + x_grid.max()),
            eps_t: t_grid.max() - t_grid.min(),
            eps_x: SpatialSpan::Full,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.eps_t.is_finite() && self.eps_t > 0.0) {
            return Err(Error::Invalid(format!("eps_t must be positive, got {}", self.eps_t)));
        }
        if let SpatialSpan::Width(w) = self.eps_x {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Invalid(format!("eps_x must be positive, got {w}")));
            }
        }
        Ok(())
    }

    /// Window bounds clipped to the grids.
    pub fn bounds(&self, t_grid: &AxisGrid, x_grid: &AxisGrid) -> Result<[f64; 4]> {
        self.check()?;
        let ta = (self.t_bar - 0.5 * self.eps_t).max(t_grid.min());
        let tb = (self.t_bar + 0.5 * self.eps_t).min(t_grid.max());
        let (xa, xb) = match self.eps_x {
            SpatialSpan::Full => (x_grid.min(), x_grid.max()),
            SpatialSpan::Width(w) => (
                (self.x_bar - 0.5 * w).max(x_grid.min()),
                (self.x_bar + 0.5 * w).min(x_grid.max()),
            ),
        };
        if ta >= tb || xa >= xb {
            return Err(Error::WindowOutsideGrid(format!(
                "t̄ = {}, x̄ = {} misses [{}, {}] × [{}, {}]",
                self.t_bar,
                self.x_bar,
                t_grid.min(),
                t_grid.max(),
                x_grid.min(),
                x_grid.max()
            )));
        }
        Ok([ta, tb, xa, xb])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionCurve {
    pub detector: Detector,
    /// `(t̄, probability)` per window.
    pub points: Vec<(f64, f64)>,
    pub eps_t: f64,
    pub eps_x: SpatialSpan,
}

impl DetectionCurve {
    /// Running sum of the window probabilities.
    pub fn cumulative(&self) -> Vec<f64> {
        self.points
            .iter()
            .scan(0.0, |acc, &(_, p)| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.points.iter().map(|&(_, p)| p).sum()
    }
}

/// How window integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// Exact integration over constant-branch cells.
    Cells,
    /// Weighted sum of the density at every grid node in the window.
    Nodes,
}

/// Closed-form detector densities of one scenario.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    t_grid: AxisGrid,
    x_grid: AxisGrid,
    rho_t: Vec<f64>,
    rho_x: Vec<f64>,
    bs1: SpacetimeRegion,
    bs2: SpacetimeRegion,
    shift1: f64,
    shift2: f64,
    kappa1: f64,
    kappa2: f64,
    x_bar: f64,
}

impl ClosedForm {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let (temporal, spatial) = scenario.final_profiles()?;
        let [a1, _, a5, a7] = scenario.alphas();
        Ok(Self::from_parts(
            &temporal,
            &spatial,
            scenario.bs1.clone(),
            scenario.bs2.clone(),
            (a7 - a1, a7 - a5),
            (scenario.kappa1, scenario.kappa2),
            scenario.detector_x(),
        ))
    }

    /// Builds the densities from profiles at the detectors and the presence
    /// regions with the shifts that carry them to the detection frame.
    pub fn from_parts(
        temporal: &TemporalProfile,
        spatial: &SpatialProfile,
        bs1: SpacetimeRegion,
        bs2: SpacetimeRegion,
        shifts: (f64, f64),
        kappas: (f64, f64),
        x_bar: f64,
    ) -> Self {
        Self {
            t_grid: *temporal.grid(),
            x_grid: *spatial.grid(),
            rho_t: temporal.density(),
            rho_x: spatial.density(),
            bs1,
            bs2,
            shift1: shifts.0,
            shift2: shifts.1,
            kappa1: kappas.0,
            kappa2: kappas.1,
            x_bar,
        }
    }

    pub fn t_grid(&self) -> &AxisGrid {
        &self.t_grid
    }

    pub fn x_grid(&self) -> &AxisGrid {
        &self.x_grid
    }

    /// Branch of a detection-frame point.
    pub fn branch_key(&self, t: f64, x: f64) -> BranchKey {
        BranchKey::new(
            self.bs1.shifted_contains(t, x, self.shift1),
            self.bs2.shifted_contains(t, x, self.shift2),
        )
    }

    fn weight(&self, detector: Detector, t: f64, x: f64) -> f64 {
        branch_coefficient(self.branch_key(t, x), detector, self.kappa1, self.kappa2)
    }

    /// `|γ(τ₇; t, x)|²` at node `(i, j)`.
    #[inline]
    pub fn photon_density_at_node(&self, i: usize, j: usize) -> f64 {
        self.rho_t[i] * self.rho_x[j]
    }

    /// Detector density at node `(i, j)`.
    pub fn density_at_node(&self, detector: Detector, i: usize, j: usize) -> f64 {
        let (t, x) = (self.t_grid.point(i), self.x_grid.point(j));
        self.photon_density_at_node(i, j) * self.weight(detector, t, x)
    }

    /// `|γ(τ₇; t, x)|²` from the bilinear interpolant.
    pub fn photon_density(&self, t: f64, x: f64) -> Result<f64> {
        if !(self.t_grid.contains(t) && self.x_grid.contains(x)) {
            return Err(Error::OutOfGrid { t, x });
        }
        Ok(self.t_grid.interpolate(&self.rho_t, t) * self.x_grid.interpolate(&self.rho_x, x))
    }

    /// Detector density at an arbitrary point of the grid.
    pub fn final_density(&self, detector: Detector, t: f64, x: f64) -> Result<f64> {
        Ok(self.photon_density(t, x)? * self.weight(detector, t, x))
    }

    pub fn detection_probability(&self, detector: Detector, window: &DetectorWindow) -> Result<f64> {
        self.detection_probability_with(detector, window, Quadrature::Cells)
    }

    pub fn detection_probability_with(
        &self,
        detector: Detector,
        window: &DetectorWindow,
        quadrature: Quadrature,
    ) -> Result<f64> {
        let [ta, tb, xa, xb] = window.bounds(&self.t_grid, &self.x_grid)?;
        Ok(match quadrature {
            Quadrature::Cells => self.integrate_cells(ta, tb, xa, xb, |key| {
                branch_coefficient(key, detector, self.kappa1, self.kappa2)
            }),
            Quadrature::Nodes => self.integrate_nodes(detector, ta, tb, xa, xb),
        })
    }

    /// Probabilities over the whole detection grid.
    pub fn total_probabilities(&self) -> (f64, f64) {
        let (ta, tb) = (self.t_grid.min(), self.t_grid.max());
        let (xa, xb) = (self.x_grid.min(), self.x_grid.max());
        let p = |d: Detector| {
            self.integrate_cells(ta, tb, xa, xb, |key| {
                branch_coefficient(key, d, self.kappa1, self.kappa2)
            })
        };
        (p(Detector::D1), p(Detector::D2))
    }

    /// One window probability per `t̄` in `range`, with `x̄` at the detectors.
    pub fn detection_curve(
        &self,
        detector: Detector,
        range: TbarRange,
        eps_t: f64,
        eps_x: SpatialSpan,
    ) -> Result<DetectionCurve> {
        if !(range.step > 0.0 && range.max >= range.min) {
            return Err(Error::Invalid(format!(
                "t̄ range {}:{}:{} needs step > 0 and max >= min",
                range.min, range.max, range.step
            )));
        }
        let points = (0..range.len())
            .into_par_iter()
            .map(|i| {
                let t_bar = range.value(i);
                let window = DetectorWindow { t_bar, x_bar: self.x_bar, eps_t, eps_x };
                Ok((t_bar, self.detection_probability(detector, &window)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DetectionCurve { detector, points, eps_t, eps_x })
    }

    fn integrate_cells(
        &self,
        ta: f64,
        tb: f64,
        xa: f64,
        xb: f64,
        weight: impl Fn(BranchKey) -> f64,
    ) -> f64 {
        let gates: Vec<_> = self
            .bs1
            .shifted(self.shift1)
            .rects()
            .iter()
            .chain(self.bs2.shifted(self.shift2).rects())
            .copied()
            .collect();
        let t_cuts = breakpoints(ta, tb, gates.iter().flat_map(|r| [r.t_lo, r.t_hi]));
        let x_cuts = breakpoints(xa, xb, gates.iter().flat_map(|r| [r.x_lo, r.x_hi]));
        let t_parts = parts(&self.t_grid, &self.rho_t, &t_cuts);
        let x_parts = parts(&self.x_grid, &self.rho_x, &x_cuts);
        let mut total = 0.0;
        for &(tm, it) in &t_parts {
            for &(xm, ix) in &x_parts {
                total += weight(self.branch_key(tm, xm)) * it * ix;
            }
        }
        total
    }

    fn integrate_nodes(&self, detector: Detector, ta: f64, tb: f64, xa: f64, xb: f64) -> f64 {
        let wt = self.t_grid.interval_weights(ta, tb);
        let wx = self.x_grid.interval_weights(xa, xb);
        let rows: Vec<f64> = wt
            .par_iter()
            .enumerate()
            .map(|(i, &w)| {
                if w == 0.0 {
                    return 0.0;
                }
                let row: f64 = wx
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| v * self.density_at_node(detector, i, j))
                    .sum();
                w * row
            })
            .collect();
        rows.iter().sum()
    }
}

/// Sorted cut points: the window ends plus every finite edge strictly inside.
fn breakpoints(lo: f64, hi: f64, edges: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut cuts = vec![lo, hi];
    cuts.extend(edges.filter(|&e| e > lo && e < hi));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// `(midpoint, ∫ρ)` for each interval between consecutive cuts.
fn parts(grid: &AxisGrid, rho: &[f64], cuts: &[f64]) -> Vec<(f64, f64)> {
    cuts.windows(2)
        .map(|c| (0.5 * (c[0] + c[1]), grid.integrate_between(rho, c[0], c[1])))
        .collect()
}

/// Mass of the separable density `|γᵗ|²·|γˣ|²` inside `region`, where both
/// profiles share the frame of the region.
pub fn region_mass(temporal: &TemporalProfile, spatial: &SpatialProfile, region: &SpacetimeRegion) -> f64 {
    let (tg, xg) = (temporal.grid(), spatial.grid());
    let (rho_t, rho_x) = (temporal.density(), spatial.density());
    let edges = region.rects();
    let t_cuts = breakpoints(tg.min(), tg.max(), edges.iter().flat_map(|r| [r.t_lo, r.t_hi]));
    let x_cuts = breakpoints(xg.min(), xg.max(), edges.iter().flat_map(|r| [r.x_lo, r.x_hi]));
    let t_parts = parts(tg, &rho_t, &t_cuts);
    let x_parts = parts(xg, &rho_x, &x_cuts);
    let mut total = 0.0;
    for &(tm, it) in &t_parts {
        for &(xm, ix) in &x_parts {
            if region.contains(tm, xm) {
                total += it * ix;
            }
        }
    }
    total
}
