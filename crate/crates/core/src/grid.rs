//! Uniform one-dimensional grids and the quadrature rules defined on them.

use crate::error::{Error, Result};

/// Relative slack used when deciding whether a length is a whole number of
/// grid steps.
const STEP_SLACK: f64 = 1e-6;

/// A uniform axis `min, min + h, …, max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGrid {
    min: f64,
    max: f64,
    h: f64,
    count: usize,
}

impl AxisGrid {
    pub fn new(min: f64, max: f64, h: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite bounds {min}:{max}:{h}")));
        }
        if h <= 0.0 {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if max <= min {
            return Err(Error::InvalidGrid(format!("max {max} must exceed min {min}")));
        }
        let steps = (max - min) / h;
        let n = steps.round();
        if (steps - n).abs() > STEP_SLACK {
            return Err(Error::InvalidGrid(format!(
                "span {min}:{max} is not a whole number of steps of {h}"
            )));
        }
        Ok(Self { min, max, h, count: n as usize + 1 })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.min + i as f64 * self.h
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Same grid translated by `alpha`; sample indices keep their meaning.
    pub fn shifted(&self, alpha: f64) -> Self {
        Self { min: self.min + alpha, max: self.max + alpha, ..*self }
    }

    /// Grid with the same step and upper end whose lower end is pushed down
    /// by `by` (a whole number of steps).
    pub fn extended_below(&self, by: f64) -> Result<Self> {
        let extra = self.cells(by)?;
        if extra < 0 {
            return Err(Error::InvalidGrid(format!("cannot extend by negative length {by}")));
        }
        Ok(Self {
            min: self.min - by,
            count: self.count + extra as usize,
            ..*self
        })
    }

    /// Number of grid steps in `alpha`, which must be commensurate with `h`.
    pub fn cells(&self, alpha: f64) -> Result<isize> {
        let steps = alpha / self.h;
        let n = steps.round();
        if (steps - n).abs() > STEP_SLACK || !n.is_finite() {
            return Err(Error::Snapping { alpha, h: self.h });
        }
        Ok(n as isize)
    }

    /// Index offset of `other`'s first node inside `self`, when both grids
    /// share the step and their nodes coincide.
    pub fn offset_of(&self, other: &AxisGrid) -> Result<isize> {
        if (self.h - other.h).abs() > 1e-12 * self.h {
            return Err(Error::GridMismatch(format!("spacing {} vs {}", self.h, other.h)));
        }
        let steps = (other.min - self.min) / self.h;
        let n = steps.round();
        if (steps - n).abs() > STEP_SLACK {
            return Err(Error::GridMismatch(format!(
                "nodes of grid starting at {} are not aligned with grid starting at {}",
                other.min, self.min
            )));
        }
        Ok(n as isize)
    }

    /// Whether `t` lies in `[min, max]` up to rounding.
    pub fn contains(&self, t: f64) -> bool {
        let slack = STEP_SLACK * self.h;
        t >= self.min - slack && t <= self.max + slack
    }

    /// Nearest node to `t`, if `t` lies on the grid.
    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        if !self.contains(t) {
            return None;
        }
        let i = ((t - self.min) / self.h).round().max(0.0) as usize;
        Some(i.min(self.count - 1))
    }

    /// Trapezoid rule over the whole grid.
    pub fn trapezoid(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.count);
        let inner: f64 = samples[1..self.count - 1].iter().sum();
        self.h * (inner + 0.5 * (samples[0] + samples[self.count - 1]))
    }

    /// Linear interpolation of node values at `t`. Points off the grid
    /// evaluate to zero.
    pub fn interpolate(&self, samples: &[f64], t: f64) -> f64 {
        if !self.contains(t) {
            return 0.0;
        }
        let s = ((t - self.min) / self.h).clamp(0.0, (self.count - 1) as f64);
        let k = (s.floor() as usize).min(self.count - 2);
        let frac = s - k as f64;
        samples[k] * (1.0 - frac) + samples[k + 1] * frac
    }

    /// Integral over `[a, b]` of `samples`: the piecewise-linear integral
    /// plus an end correction at each cut, the difference between the local
    /// cubic through the four surrounding nodes and the chord. Corrections
    /// telescope, so the rule is additive over adjacent intervals, equals
    /// the trapezoid sum on the whole grid, and is fourth order on cut
    /// windows of smooth densities. A cut whose stencil leaves the grid or
    /// touches a non-positive sample (support edges, jumps) gets no
    /// correction. The part of `[a, b]` off the grid contributes nothing.
    pub fn integrate_between(&self, samples: &[f64], a: f64, b: f64) -> f64 {
        debug_assert_eq!(samples.len(), self.count);
        let Some((sa, sb)) = self.span(a, b) else {
            return 0.0;
        };
        let mut total = 0.0;
        self.for_each_cell_part(a, b, |k, u, v| {
            let [w0, w1] = linear_weights(u, v);
            total += w0 * samples[k] + w1 * samples[k + 1];
        });
        self.h * (total + self.cut_correction(samples, sb) - self.cut_correction(samples, sa))
    }

    /// `∫ (cubic − chord)` from a fixed origin to the cut at grid
    /// coordinate `s`, up to a constant, in units of `h`.
    fn cut_correction(&self, samples: &[f64], s: f64) -> f64 {
        let last = self.count - 1;
        if s <= 0.0 || s >= last as f64 {
            return 0.0;
        }
        let m = s.floor() as usize;
        if m < 1 || m + 2 > last || samples[m - 1..=m + 2].iter().any(|&f| f <= 0.0) {
            return 0.0;
        }
        let f = &samples[m - 1..=m + 2];
        let u = s - m as f64;
        let c = cubic_weights(0.0, u);
        let [l0, l1] = linear_weights(0.0, u);
        let partial = c[0] * f[0] + c[1] * f[1] + c[2] * f[2] + c[3] * f[3] - l0 * f[1] - l1 * f[2];
        partial - (f[2] - f[0]) / 24.0
    }

    /// Snapped grid coordinates of `[a, b]` clipped to the grid.
    fn span(&self, a: f64, b: f64) -> Option<(f64, f64)> {
        let last = (self.count - 1) as f64;
        let snap = |s: f64| {
            let r = s.round();
            if (s - r).abs() < 1e-9 {
                r
            } else {
                s
            }
        };
        let sa = snap((a - self.min) / self.h).clamp(0.0, last);
        let sb = snap((b - self.min) / self.h).clamp(0.0, last);
        (sb > sa).then_some((sa, sb))
    }

    /// Node weights of the piecewise-linear rule over `[a, b]`: the
    /// trapezoid rule when `a` and `b` are nodes.
    pub fn interval_weights(&self, a: f64, b: f64) -> Vec<f64> {
        let mut w = vec![0.0; self.count];
        self.for_each_cell_part(a, b, |k, u, v| {
            let [w0, w1] = linear_weights(u, v);
            w[k] += w0 * self.h;
            w[k + 1] += w1 * self.h;
        });
        w
    }

    /// Calls `f(k, u, v)` for each cell `k` meeting `[a, b]`, where
    /// `[u, v] ⊆ [0, 1]` is the covered fraction of the cell.
    fn for_each_cell_part(&self, a: f64, b: f64, mut f: impl FnMut(usize, f64, f64)) {
        let Some((sa, sb)) = self.span(a, b) else {
            return;
        };
        let first = (sa.floor() as usize).min(self.count - 2);
        let end = (sb.ceil() as usize).max(first + 1);
        for k in first..end {
            let u = (sa - k as f64).max(0.0);
            let v = (sb - k as f64).min(1.0);
            if v > u {
                f(k, u, v);
            }
        }
    }
}

/// `∫_u^v` of the two linear basis functions on a unit cell.
fn linear_weights(u: f64, v: f64) -> [f64; 2] {
    let sq = 0.5 * (v * v - u * u);
    [v - u - sq, sq]
}

/// `∫_u^v` of the Lagrange basis on nodes −1, 0, 1, 2 of a unit cell.
fn cubic_weights(u: f64, v: f64) -> [f64; 4] {
    let anti = |s: f64| {
        let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
        [
            -(s4 / 4.0 - s3 + s2) / 6.0,
            (s4 / 4.0 - 2.0 * s3 / 3.0 - s2 / 2.0 + 2.0 * s) / 2.0,
            -(s4 / 4.0 - s3 / 3.0 - s2) / 2.0,
            (s4 / 4.0 - s2 / 2.0) / 6.0,
        ]
    };
    let (hi, lo) = (anti(v), anti(u));
    [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2], hi[3] - lo[3]]
}
