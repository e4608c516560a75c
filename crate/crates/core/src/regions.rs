//! Spacetime presence regions of the beamsplitters.

use std::fmt;

use crate::error::{Error, Result};

/// A closed `(lo, hi)` interval on one axis.
type Interval = (f64, f64);

/// Absolute slack on interval ends. Grid coordinates reached along different
/// routes (a node shifted by `α` versus the node `α` cells away) differ by
/// rounding, and both must land on the same side of a window edge.
pub const BOUNDARY_EPS: f64 = 1e-9;

/// Axis-aligned rectangle in `(t, x)` with closed ends; bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub t_lo: f64,
    pub t_hi: f64,
    pub x_lo: f64,
    pub x_hi: f64,
}

impl Rect {
    pub fn new(t_lo: f64, t_hi: f64, x_lo: f64, x_hi: f64) -> Result<Self> {
        if t_lo.is_nan() || t_hi.is_nan() || x_lo.is_nan() || x_hi.is_nan() {
            return Err(Error::Region("NaN bound".into()));
        }
        if t_lo >= t_hi {
            return Err(Error::Region(format!("time window {t_lo}:{t_hi} needs lo < hi")));
        }
        if x_lo >= x_hi {
            return Err(Error::Region(format!("spatial extent {x_lo}:{x_hi} needs lo < hi")));
        }
        Ok(Self { t_lo, t_hi, x_lo, x_hi })
    }

    /// All of spacetime.
    pub fn everywhere() -> Self {
        Self {
            t_lo: f64::NEG_INFINITY,
            t_hi: f64::INFINITY,
            x_lo: f64::NEG_INFINITY,
            x_hi: f64::INFINITY,
        }
    }

    #[inline]
    pub fn contains(&self, t: f64, x: f64) -> bool {
        t >= self.t_lo - BOUNDARY_EPS
            && t <= self.t_hi + BOUNDARY_EPS
            && x >= self.x_lo - BOUNDARY_EPS
            && x <= self.x_hi + BOUNDARY_EPS
    }

    #[inline]
    pub fn contains_t(&self, t: f64) -> bool {
        t >= self.t_lo - BOUNDARY_EPS && t <= self.t_hi + BOUNDARY_EPS
    }

    /// Translated along the world line `x = t`.
    pub fn shifted(&self, alpha: f64) -> Self {
        Self {
            t_lo: self.t_lo + alpha,
            t_hi: self.t_hi + alpha,
            x_lo: self.x_lo + alpha,
            x_hi: self.x_hi + alpha,
        }
    }

    pub fn spans_all_x(&self) -> bool {
        self.x_lo == f64::NEG_INFINITY && self.x_hi == f64::INFINITY
    }
}

/// Union of rectangles; an empty list is the empty region.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeRegion {
    label: String,
    rects: Vec<Rect>,
}

impl SpacetimeRegion {
    pub fn new(label: impl Into<String>, rects: Vec<Rect>) -> Self {
        Self { label: label.into(), rects }
    }

    pub fn empty(label: impl Into<String>) -> Self {
        Self::new(label, Vec::new())
    }

    pub fn everywhere(label: impl Into<String>) -> Self {
        Self::new(label, vec![Rect::everywhere()])
    }

    /// Time windows `[lo, hi]`, each over the spatial extent `x_extent`
    /// (all of space when `None`).
    pub fn from_windows(
        label: impl Into<String>,
        windows: &[(f64, f64)],
        x_extent: Option<(f64, f64)>,
    ) -> Result<Self> {
        let (x_lo, x_hi) = x_extent.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
        let rects = windows
            .iter()
            .map(|&(lo, hi)| Rect::new(lo, hi, x_lo, x_hi))
            .collect::<Result<_>>()?;
        Ok(Self::new(label, rects))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// Membership `δ((t, x) ∈ Ω)`.
    pub fn contains(&self, t: f64, x: f64) -> bool {
        self.rects.iter().any(|r| r.contains(t, x))
    }

    /// Membership of the point moved back along the world line:
    /// `δ((t − α, x − α) ∈ Ω)`.
    pub fn shifted_contains(&self, t: f64, x: f64, shift: f64) -> bool {
        self.contains(t - shift, x - shift)
    }

    /// The region translated by `alpha` along the world line.
    pub fn shifted(&self, alpha: f64) -> Self {
        Self {
            label: self.label.clone(),
            rects: self.rects.iter().map(|r| r.shifted(alpha)).collect(),
        }
    }

    /// Whether membership depends on `t` only.
    pub fn is_temporal(&self) -> bool {
        self.rects.iter().all(Rect::spans_all_x)
    }

    /// Time windows, if every rectangle spans the same spatial extent.
    fn windows_and_extent(&self) -> Option<(Vec<Interval>, Interval)> {
        let first = self.rects.first()?;
        let extent = (first.x_lo, first.x_hi);
        if self.rects.iter().any(|r| (r.x_lo, r.x_hi) != extent) {
            return None;
        }
        Some((self.rects.iter().map(|r| (r.t_lo, r.t_hi)).collect(), extent))
    }

    /// `present_t` value in the config syntax.
    pub fn render_present_t(&self) -> String {
        if self.rects.is_empty() {
            return "never".into();
        }
        match self.windows_and_extent() {
            Some((w, _)) if w.len() == 1 && w[0] == (f64::NEG_INFINITY, f64::INFINITY) => {
                "always".into()
            }
            Some((w, _)) => w
                .iter()
                .map(|(lo, hi)| format!("{}:{}", fmt_bound(*lo), fmt_bound(*hi)))
                .collect::<Vec<_>>()
                .join(", "),
            None => String::from("<mixed extents>"),
        }
    }

    /// `extent_x` value, or `None` for all of space.
    pub fn render_extent_x(&self) -> Option<String> {
        let (_, (lo, hi)) = self.windows_and_extent()?;
        if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            None
        } else {
            Some(format!("{}:{}", fmt_bound(lo), fmt_bound(hi)))
        }
    }
}

impl fmt::Display for SpacetimeRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: t in {}", self.label, self.render_present_t())?;
        if let Some(x) = self.render_extent_x() {
            write!(f, ", x in {x}")?;
        }
        Ok(())
    }
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

fn parse_bound(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        v => v
            .parse::<f64>()
            .ok()
            .filter(|x| !x.is_nan())
            .ok_or_else(|| Error::Region(format!("bad bound `{v}`"))),
    }
}

/// Parses `lo:hi`, requiring `lo < hi`.
pub fn parse_interval(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Region(format!("expected lo:hi, got `{}`", s.trim())))?;
    let (lo, hi) = (parse_bound(lo)?, parse_bound(hi)?);
    if lo >= hi {
        return Err(Error::Region(format!("interval {lo}:{hi} needs lo < hi")));
    }
    Ok((lo, hi))
}

/// Parses a `present_t` value: `always`, `never`, or comma-separated
/// `lo:hi` windows.
pub fn parse_present_t(s: &str) -> Result<Vec<(f64, f64)>> {
    match s.trim() {
        "always" => Ok(vec![(f64::NEG_INFINITY, f64::INFINITY)]),
        "never" => Ok(Vec::new()),
        "" => Err(Error::Region("empty window list".into())),
        list => list.split(',').map(parse_interval).collect(),
    }
}
