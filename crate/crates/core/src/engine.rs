//! Step-by-step evolution of the two-channel amplitude on a spacetime grid.
//!
//! The state stores one complex amplitude per channel and grid cell, rows
//! indexed by `t` and columns by `x`. Every operator of the experiment is
//! norm-preserving; the state is nevertheless renormalized after each step
//! and the norm before renormalization is logged, so the log doubles as a
//! unitarity audit.
//!
//! Translations move whole cells: `α` must be a multiple of both grid steps.
//! The engine grid must therefore reach from the source to the detectors;
//! [`run_pipeline`] extends the detection grid downwards by `α₇`.

use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{apply_bs, apply_mirror, Beamsplitter, ChannelVec, Detector};
use crate::closed_form::{ClosedForm, DetectorWindow};
use crate::error::{Error, Result};
use crate::grid::AxisGrid;
use crate::profiles::{SpatialProfile, TemporalProfile};
use crate::regions::SpacetimeRegion;
use crate::scenarios::Scenario;

/// Mass allowed to leave the grid during a translation.
pub const OVERFLOW_TOL: f64 = 1e-9;

/// Norms at or below this mean the evolution branch has probability zero.
pub const ANNIHILATION_NORM: f64 = 1e-15;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    t_grid: AxisGrid,
    x_grid: AxisGrid,
    amp1: Vec<Complex64>,
    amp2: Vec<Complex64>,
    tau: String,
}

impl GridState {
    /// All-zero state.
    pub fn zeros(t_grid: AxisGrid, x_grid: AxisGrid, tau: impl Into<String>) -> Self {
        let n = t_grid.count() * x_grid.count();
        Self { t_grid, x_grid, amp1: vec![ZERO; n], amp2: vec![ZERO; n], tau: tau.into() }
    }

    /// Source state `γᵗ(t)·γˣ(x)|1⟩`, normalized. The profiles may live on
    /// sub-grids whose nodes coincide with the state's nodes; the state is
    /// zero elsewhere.
    pub fn init_source(
        t_grid: AxisGrid,
        x_grid: AxisGrid,
        temporal: &TemporalProfile,
        spatial: &SpatialProfile,
    ) -> Result<Self> {
        Self::source_unnormalized(t_grid, x_grid, temporal, spatial)?.normalize()
    }

    fn source_unnormalized(
        t_grid: AxisGrid,
        x_grid: AxisGrid,
        temporal: &TemporalProfile,
        spatial: &SpatialProfile,
    ) -> Result<Self> {
        let placement = |grid: &AxisGrid, sub: &AxisGrid, axis: &str| -> Result<usize> {
            let off = grid.offset_of(sub)?;
            if off < 0 || off as usize + sub.count() > grid.count() {
                return Err(Error::GridMismatch(format!(
                    "{axis} profile on [{}, {}] does not fit in [{}, {}]",
                    sub.min(),
                    sub.max(),
                    grid.min(),
                    grid.max()
                )));
            }
            Ok(off as usize)
        };
        let ot = placement(&t_grid, temporal.grid(), "temporal")?;
        let ox = placement(&x_grid, spatial.grid(), "spatial")?;
        let mut state = Self::zeros(t_grid, x_grid, "tau0");
        let nx = x_grid.count();
        let gx = spatial.samples();
        state.amp1.par_chunks_mut(nx).enumerate().for_each(|(i, row)| {
            let Some(&gt) = i.checked_sub(ot).and_then(|k| temporal.samples().get(k)) else {
                return;
            };
            row[ox..ox + gx.len()].iter_mut().zip(gx).for_each(|(a, &g)| *a = gt * g);
        });
        Ok(state)
    }

    pub fn t_grid(&self) -> &AxisGrid {
        &self.t_grid
    }

    pub fn x_grid(&self) -> &AxisGrid {
        &self.x_grid
    }

    pub fn tau(&self) -> &str {
        &self.tau
    }

    pub fn with_tau(mut self, tau: impl Into<String>) -> Self {
        self.tau = tau.into();
        self
    }

    /// Channel amplitudes, row-major (`t` rows, `x` columns).
    pub fn amplitudes(&self, detector: Detector) -> &[Complex64] {
        match detector {
            Detector::D1 => &self.amp1,
            Detector::D2 => &self.amp2,
        }
    }

    /// Channel vector at node `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> ChannelVec {
        let k = i * self.x_grid.count() + j;
        ChannelVec::new(self.amp1[k], self.amp2[k])
    }

    /// `|amp_k|²` at node `(i, j)`.
    pub fn density(&self, detector: Detector, i: usize, j: usize) -> f64 {
        self.amplitudes(detector)[i * self.x_grid.count() + j].norm_sqr()
    }

    fn cell_area(&self) -> f64 {
        self.t_grid.h() * self.x_grid.h()
    }

    /// Row sums computed in parallel and reduced in row order, so the result
    /// does not depend on the thread count.
    fn ordered_sum(&self, f: impl Fn(usize, &[Complex64], &[Complex64]) -> f64 + Sync) -> f64 {
        let nx = self.x_grid.count();
        let rows: Vec<f64> = self
            .amp1
            .par_chunks(nx)
            .zip(self.amp2.par_chunks(nx))
            .enumerate()
            .map(|(i, (a, b))| f(i, a, b))
            .collect();
        rows.iter().sum()
    }

    /// `Σ |amp_k|²·h_t·h_x` for one channel.
    pub fn channel_mass(&self, detector: Detector) -> f64 {
        let pick = detector;
        self.ordered_sum(|_, a, b| {
            let row = if pick == Detector::D1 { a } else { b };
            row.iter().map(|z| z.norm_sqr()).sum()
        }) * self.cell_area()
    }

    /// `(Σ (|amp1|² + |amp2|²)·h_t·h_x)^{1/2}`.
    pub fn norm(&self) -> f64 {
        let s = self.ordered_sum(|_, a, b| {
            a.iter().chain(b).map(|z| z.norm_sqr()).sum()
        });
        (s * self.cell_area()).sqrt()
    }

    /// Rescales to unit norm.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm.is_nan() || norm <= ANNIHILATION_NORM {
            return Err(Error::Annihilation { tau: self.tau.clone(), norm });
        }
        let k = norm.recip();
        self.amp1.par_iter_mut().chain(self.amp2.par_iter_mut()).for_each(|z| *z *= k);
        Ok(self)
    }

    /// Free motion `Ψ(t, x) → Ψ(t − α, x − α)` by whole cells.
    pub fn translate(mut self, alpha: f64) -> Result<Self> {
        let dt = self.t_grid.cells(alpha)?;
        let dx = self.x_grid.cells(alpha)?;
        if dt == 0 && dx == 0 {
            return Ok(self);
        }
        let (nt, nx) = (self.t_grid.count() as isize, self.x_grid.count() as isize);
        let lost = self.ordered_sum(|i, a, b| {
            let escapes_row = !(0..nt).contains(&(i as isize + dt));
            a.iter()
                .zip(b)
                .enumerate()
                .filter(|(j, _)| escapes_row || !(0..nx).contains(&(*j as isize + dx)))
                .map(|(_, (p, q))| p.norm_sqr() + q.norm_sqr())
                .sum()
        }) * self.cell_area();
        if lost > OVERFLOW_TOL {
            return Err(Error::DomainOverflow { alpha, lost });
        }
        let (nt, nx) = (nt as usize, nx as usize);
        shift_in_place(&mut self.amp1, nt, nx, dt, dx);
        shift_in_place(&mut self.amp2, nt, nx, dt, dx);
        Ok(self)
    }

    /// `P(Ω)⊗B̂ + (1 − P(Ω))⊗1`: mixes the channels on cells inside `region`.
    pub fn apply_beamsplitter(mut self, region: &SpacetimeRegion, which: Beamsplitter) -> Self {
        if region.is_empty() {
            return self;
        }
        let (tg, xg) = (self.t_grid, self.x_grid);
        let temporal = region.is_temporal();
        let nx = xg.count();
        self.amp1
            .par_chunks_mut(nx)
            .zip(self.amp2.par_chunks_mut(nx))
            .enumerate()
            .for_each(|(i, (a, b))| {
                let t = tg.point(i);
                if temporal && !region.contains(t, 0.0) {
                    return;
                }
                for (j, (p, q)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
                    if temporal || region.contains(t, xg.point(j)) {
                        let v = apply_bs(which, ChannelVec::new(*p, *q));
                        *p = v.c1;
                        *q = v.c2;
                    }
                }
            });
        self
    }

    /// Mirror phases `|k⟩ → e^{iκ_k}|k⟩` everywhere.
    pub fn apply_mirrors(mut self, kappa1: f64, kappa2: f64) -> Self {
        let e1 = apply_mirror(kappa1, kappa2, ChannelVec::one()).c1;
        let e2 = apply_mirror(kappa1, kappa2, ChannelVec::two()).c2;
        self.amp1.par_iter_mut().for_each(|z| *z *= e1);
        self.amp2.par_iter_mut().for_each(|z| *z *= e2);
        self
    }

    /// Window integral of `|amp_k|²` with the interpolant's node weights.
    pub fn detection_probability(&self, detector: Detector, window: &DetectorWindow) -> Result<f64> {
        let [ta, tb, xa, xb] = window.bounds(&self.t_grid, &self.x_grid)?;
        let wt = self.t_grid.interval_weights(ta, tb);
        let wx = self.x_grid.interval_weights(xa, xb);
        let pick = detector;
        Ok(self.ordered_sum(|i, a, b| {
            if wt[i] == 0.0 {
                return 0.0;
            }
            let row = if pick == Detector::D1 { a } else { b };
            wt[i] * row.iter().zip(&wx).map(|(z, w)| w * z.norm_sqr()).sum::<f64>()
        }))
    }

    /// Text dump, one cell per line: `t x re1 im1 re2 im2`, rows in `t`
    /// order. `stride` keeps every `stride`-th node along both axes.
    pub fn write_dump(&self, out: &mut impl Write, stride: usize) -> io::Result<()> {
        let stride = stride.max(1);
        writeln!(out, "# tau {}", self.tau)?;
        writeln!(out, "# t x re1 im1 re2 im2")?;
        let nx = self.x_grid.count();
        for i in (0..self.t_grid.count()).step_by(stride) {
            let t = self.t_grid.point(i);
            for j in (0..nx).step_by(stride) {
                let (a, b) = (self.amp1[i * nx + j], self.amp2[i * nx + j]);
                writeln!(
                    out,
                    "{t:.6} {:.6} {:.12e} {:.12e} {:.12e} {:.12e}",
                    self.x_grid.point(j),
                    a.re,
                    a.im,
                    b.re,
                    b.im
                )?;
            }
        }
        Ok(())
    }
}

/// `v[i][j] ← v[i − dt][j − dx]`, zero where the source is off the grid.
fn shift_in_place(v: &mut [Complex64], nt: usize, nx: usize, dt: isize, dx: isize) {
    let (lo, hi) = if dx >= 0 {
        ((dx as usize).min(nx), nx)
    } else {
        (0, nx.saturating_sub(dx.unsigned_abs()))
    };
    let mut move_row = |dst: usize| {
        let start = dst * nx;
        match (dst as isize - dt).try_into().ok().filter(|&s: &usize| s < nt) {
            Some(src) if lo < hi => {
                let from = (src * nx) as isize + lo as isize - dx;
                v.copy_within(from as usize..from as usize + (hi - lo), start + lo);
                v[start..start + lo].fill(ZERO);
                v[start + hi..start + nx].fill(ZERO);
            }
            _ => v[start..start + nx].fill(ZERO),
        }
    };
    // Walk against the shift so every source row is read before it is
    // overwritten.
    if dt > 0 {
        (0..nt).rev().for_each(&mut move_row);
    } else {
        (0..nt).for_each(&mut move_row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepEntry {
    pub tau: String,
    pub operation: String,
    pub pre_norm: f64,
    pub post_norm: f64,
}

/// Audit trail of a pipeline run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepLog {
    pub entries: Vec<StepEntry>,
}

impl StepLog {
    /// Largest `|pre_norm − 1|` over all steps.
    pub fn max_norm_defect(&self) -> f64 {
        self.entries.iter().map(|e| (e.pre_norm - 1.0).abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for StepLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{:<5} {:<40} pre {:.15} post {:.15}",
                e.tau, e.operation, e.pre_norm, e.post_norm
            )?;
        }
        Ok(())
    }
}

/// Grids for the whole run: the detection grids extended back to the source.
pub fn engine_grids(scenario: &Scenario) -> Result<(AxisGrid, AxisGrid)> {
    let a7 = scenario.geometry.alpha7();
    Ok((scenario.t_grid.extended_below(a7)?, scenario.x_grid.extended_below(a7)?))
}

/// Runs the seven evolution steps from the source to the detectors.
pub fn run_pipeline(scenario: &Scenario) -> Result<(GridState, StepLog)> {
    let [a1, a3, a5, a7] = scenario.alphas();
    let (tg, xg) = engine_grids(scenario)?;
    let (temporal, spatial) = scenario.profiles_at(0.0)?;
    let mut log = StepLog::default();

    let mut step = |state: GridState, tau: &str, operation: String| -> Result<GridState> {
        let state = state.with_tau(tau);
        let pre_norm = state.norm();
        let state = state.normalize()?;
        let post_norm = state.norm();
        log.entries.push(StepEntry { tau: tau.into(), operation, pre_norm, post_norm });
        Ok(state)
    };

    let s = GridState::source_unnormalized(tg, xg, &temporal, &spatial)?;
    let s = step(s, "tau0", "source".into())?;
    let s = step(s.translate(a1)?, "tau1", format!("translate {a1}"))?;
    let s = step(s.apply_beamsplitter(&scenario.bs1, Beamsplitter::Bs1), "tau2", "BS1".into())?;
    let s = step(s.translate(a3 - a1)?, "tau3", format!("translate {}", a3 - a1))?;
    let s = step(
        s.apply_mirrors(scenario.kappa1, scenario.kappa2),
        "tau4",
        format!("mirrors {} {}", scenario.kappa1, scenario.kappa2),
    )?;
    let s = step(s.translate(a5 - a3)?, "tau5", format!("translate {}", a5 - a3))?;
    let s = step(s.apply_beamsplitter(&scenario.bs2, Beamsplitter::Bs2), "tau6", "BS2".into())?;
    let s = step(s.translate(a7 - a5)?, "tau7", format!("translate {}", a7 - a5))?;
    Ok((s, log))
}

/// Largest `|ρ_engine − ρ_closed|` over all engine nodes and both detectors.
/// Engine nodes outside the closed form's grid are compared with zero.
pub fn max_discrepancy(state: &GridState, closed: &ClosedForm) -> Result<f64> {
    let ot = state.t_grid.offset_of(closed.t_grid())?;
    let ox = state.x_grid.offset_of(closed.x_grid())?;
    let (ct, cx) = (closed.t_grid().count() as isize, closed.x_grid().count() as isize);
    let nx = state.x_grid.count();
    let rows: Vec<f64> = (0..state.t_grid.count())
        .into_par_iter()
        .map(|i| {
            let ci = i as isize - ot;
            let mut worst = 0.0_f64;
            for j in 0..nx {
                let cj = j as isize - ox;
                let inside = (0..ct).contains(&ci) && (0..cx).contains(&cj);
                for d in Detector::BOTH {
                    let engine = state.amplitudes(d)[i * nx + j].norm_sqr();
                    let reference = if inside {
                        closed.density_at_node(d, ci as usize, cj as usize)
                    } else {
                        0.0
                    };
                    worst = worst.max((engine - reference).abs());
                }
            }
            worst
        })
        .collect();
    Ok(rows.into_iter().fold(0.0, f64::max))
}
