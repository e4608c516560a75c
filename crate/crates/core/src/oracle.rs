//! Brute-force reference computations.
//!
//! Nothing here calls into the profile, grid, channel or closed-form code:
//! densities are written out analytically, quadratures are naive loops and
//! the channel algebra is plain 2×2 matrix multiplication. The values feed
//! the test suites and `fixtures/derived_values.csv`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::scenarios::{Scenario, SpatialKind, TemporalKind};

/// Step of the fine 1D quadrature.
pub const FINE_H: f64 = 1e-4;

/// Largest axis size accepted by [`dense_reference_density`].
pub const DENSE_MAX: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    /// `|I_h − I_{h/2}|·4/3`, the Richardson estimate of the error of `I_h`.
    pub estimated_error: f64,
    pub h_used: f64,
}

/// Temporal shapes with an analytic unit-mass density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleProfile {
    /// `e^{−(t−c)²/ω²}/(ω√π)`.
    Gaussian { omega_t: f64 },
    /// `4ω³s²e^{−2ωs}` with `s = ±(t − c) ≥ 0`.
    ExpTail { omega_t: f64, forward: bool },
    /// `1/Δ` on `[c − Δ/2, c + Δ/2)`.
    Box { delta_t: f64 },
}

impl OracleProfile {
    pub fn density(&self, center: f64, t: f64) -> f64 {
        match *self {
            OracleProfile::Gaussian { omega_t } => {
                let u = (t - center) / omega_t;
                (-u * u).exp() / (omega_t * PI.sqrt())
            }
            OracleProfile::ExpTail { omega_t, forward } => {
                let s = if forward { t - center } else { center - t };
                if s <= 0.0 {
                    0.0
                } else {
                    4.0 * omega_t.powi(3) * s * s * (-2.0 * omega_t * s).exp()
                }
            }
            OracleProfile::Box { delta_t } => {
                // Ends shifted down by a hair so that nodes landing a rounding
                // error away from an edge are classified by the nominal edge.
                let (lo, hi) = (center - delta_t / 2.0 - 1e-9, center + delta_t / 2.0 - 1e-9);
                if t >= lo && t < hi {
                    1.0 / delta_t
                } else {
                    0.0
                }
            }
        }
    }

    fn describe(&self) -> String {
        match *self {
            OracleProfile::Gaussian { omega_t } => format!("gaussian omega_t={omega_t}"),
            OracleProfile::ExpTail { omega_t, forward } => format!(
                "exp_{} omega_t={omega_t}",
                if forward { "forward" } else { "backward" }
            ),
            OracleProfile::Box { delta_t } => format!("box delta_t={delta_t}"),
        }
    }
}

/// Plain trapezoid rule with `n` panels.
fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut s = 0.5 * (f(lo) + f(hi));
    for k in 1..n {
        s += f(lo + k as f64 * h);
    }
    s * h
}

/// Fine-grid trapezoid integral with a Richardson error estimate.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> OracleResult {
    let n = ((hi - lo) / FINE_H).ceil().max(1.0) as usize;
    let coarse = trapezoid(&f, lo, hi, n);
    let fine = trapezoid(&f, lo, hi, 2 * n);
    OracleResult {
        value: coarse,
        estimated_error: (coarse - fine).abs() * 4.0 / 3.0,
        h_used: (hi - lo) / n as f64,
    }
}

/// `∫_window |γᵗ|² dt` for a unit-mass analytic density. The window is
/// first clipped to the profile's support so the integrand is smooth.
pub fn overlap_fraction(profile: OracleProfile, center: f64, window: (f64, f64)) -> OracleResult {
    let (lo, hi) = match profile {
        OracleProfile::Gaussian { .. } => window,
        OracleProfile::ExpTail { forward: true, .. } => (window.0.max(center), window.1),
        OracleProfile::ExpTail { forward: false, .. } => (window.0, window.1.min(center)),
        OracleProfile::Box { delta_t } => {
            (window.0.max(center - delta_t / 2.0), window.1.min(center + delta_t / 2.0))
        }
    };
    if lo >= hi {
        return OracleResult { value: 0.0, estimated_error: 0.0, h_used: FINE_H };
    }
    match profile {
        // Constant on its support.
        OracleProfile::Box { delta_t } => integrate(|_| 1.0 / delta_t, lo, hi),
        _ => integrate(|t| profile.density(center, t), lo, hi),
    }
}

pub type Matrix2 = [[Complex64; 2]; 2];

fn matmul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

fn identity() -> Matrix2 {
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    [[o, z], [z, o]]
}

/// `B̂₂ᵉ·M̂(κ₁, κ₂)·B̂₁ᵉ` where a switched-off beamsplitter is the identity.
pub fn channel_pipeline_matrix(bs1_on: bool, bs2_on: bool, kappa1: f64, kappa2: f64) -> Matrix2 {
    let r = Complex64::new(0.5f64.sqrt(), 0.0);
    // Columns are the images of |1⟩ and |2⟩.
    let b1 = [[r, -r], [r, r]];
    let b2 = [[r, r], [-r, r]];
    let z = Complex64::new(0.0, 0.0);
    let m = [[Complex64::new(kappa1.cos(), kappa1.sin()), z], [z, Complex64::new(kappa2.cos(), kappa2.sin())]];
    let first = if bs1_on { b1 } else { identity() };
    let last = if bs2_on { b2 } else { identity() };
    matmul(&last, &matmul(&m, &first))
}

/// `max |(M†M − I)_{ij}|`.
pub fn unitarity_defect(m: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let s: Complex64 = m.iter().map(|row| row[i].conj() * row[j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// Reference detector densities on a subsampled detection grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseReference {
    /// Indices into the scenario's detection grids.
    pub t_index: Vec<usize>,
    pub x_index: Vec<usize>,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    /// Row-major densities (`t` rows).
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    /// Unweighted photon density at the same nodes.
    pub photon: Vec<f64>,
}

fn sample_temporal(s: &Scenario, t: f64, center: f64) -> Complex64 {
    let p = &s.photon;
    let real = |v: f64| Complex64::new(v, 0.0);
    match &p.temporal {
        TemporalKind::Box => real(OracleProfile::Box { delta_t: p.delta_t }.density(center, t).sqrt()),
        TemporalKind::Gaussian => real((-0.5 * ((t - center) / p.omega_t).powi(2)).exp()),
        TemporalKind::ExpForward | TemporalKind::ExpBackward => {
            let forward = matches!(p.temporal, TemporalKind::ExpForward);
            let s_ = if forward { t - center } else { center - t };
            real(if s_ > 0.0 { s_ * (-p.omega_t * s_).exp() } else { 0.0 })
        }
        TemporalKind::Spectrum { spectrum, .. } => {
            let og = spectrum.omega_grid();
            let n = spectrum.samples().len();
            let step = (og.max() - og.min()) / (n - 1) as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, a) in spectrum.samples().iter().enumerate() {
                let w = og.min() + k as f64 * step;
                let edge = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                let phase = w * (t - center);
                acc += a * Complex64::new(phase.cos(), phase.sin()) * (edge * step);
            }
            acc / (2.0 * PI).sqrt()
        }
    }
}

fn sample_spatial(s: &Scenario, x: f64, center: f64, cut: (f64, f64)) -> f64 {
    let p = &s.photon;
    match p.spatial {
        SpatialKind::Box => OracleProfile::Box { delta_t: p.delta_x }.density(center, x).sqrt(),
        SpatialKind::Sinc => {
            if x < cut.0 || x > cut.1 {
                return 0.0;
            }
            let u = p.omega_x * (x - center);
            let v = if u == 0.0 { 1.0 } else { u.sin() / u };
            (p.omega_x / PI).sqrt() * v
        }
    }
}

/// Trapezoid-normalized density samples of one axis.
fn normalized_density(nodes: &[f64], amp: impl Fn(f64) -> f64) -> Vec<f64> {
    let rho: Vec<f64> = nodes.iter().map(|&v| amp(v)).collect();
    let h = nodes[1] - nodes[0];
    let n = rho.len();
    let mass = h * (rho.iter().sum::<f64>() - 0.5 * (rho[0] + rho[n - 1]));
    rho.into_iter().map(|r| r / mass).collect()
}

fn in_region(region: &crate::regions::SpacetimeRegion, t: f64, x: f64) -> bool {
    const EPS: f64 = 1e-9;
    region.rects().iter().any(|r| {
        t >= r.t_lo - EPS && t <= r.t_hi + EPS && x >= r.x_lo - EPS && x <= r.x_hi + EPS
    })
}

/// Final detector densities evaluated point by point: the photon density
/// times the squared components of the channel matrix selected by the two
/// traced-back memberships. Every `stride`-th node of the detection grid is
/// kept; at most [`DENSE_MAX`] per axis.
pub fn dense_reference_density(s: &Scenario, stride: usize) -> DenseReference {
    let stride = stride.max(1);
    let g = &s.geometry;
    let (a1, a5, a7) = (g.x_bs1 - g.x_source, g.x_bs2 - g.x_source, g.x_detectors - g.x_source);
    let (tc, xc) = (s.photon.t0 + a7, s.photon.x0 + a7);

    let axis = |grid: &crate::grid::AxisGrid| -> Vec<f64> {
        (0..grid.count()).map(|i| grid.min() + i as f64 * grid.h()).collect()
    };
    let (tn, xn) = (axis(&s.t_grid), axis(&s.x_grid));

    // Outermost sinc zeros inside the grid.
    let spacing = PI / s.photon.omega_x;
    let cut = (
        xc + ((xn[0] - xc) / spacing - 1e-9).ceil() * spacing,
        xc + ((xn[xn.len() - 1] - xc) / spacing + 1e-9).floor() * spacing,
    );
    let rho_t = normalized_density(&tn, |t| sample_temporal(s, t, tc).norm_sqr());
    let rho_x = normalized_density(&xn, |x| sample_spatial(s, x, xc, cut).powi(2));

    let t_index: Vec<usize> = (0..tn.len()).step_by(stride).take(DENSE_MAX).collect();
    let x_index: Vec<usize> = (0..xn.len()).step_by(stride).take(DENSE_MAX).collect();
    let mut out = DenseReference {
        t: t_index.iter().map(|&i| tn[i]).collect(),
        x: x_index.iter().map(|&j| xn[j]).collect(),
        t_index,
        x_index,
        d1: Vec::new(),
        d2: Vec::new(),
        photon: Vec::new(),
    };
    for &i in &out.t_index {
        for &j in &out.x_index {
            let (t, x) = (tn[i], xn[j]);
            let on1 = in_region(&s.bs1, t - (a7 - a1), x - (a7 - a1));
            let on2 = in_region(&s.bs2, t - (a7 - a5), x - (a7 - a5));
            let m = channel_pipeline_matrix(on1, on2, s.kappa1, s.kappa2);
            let rho = rho_t[i] * rho_x[j];
            out.photon.push(rho);
            out.d1.push(rho * m[0][0].norm_sqr());
            out.d2.push(rho * m[1][0].norm_sqr());
        }
    }
    out
}

/// One frozen reference value.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedValue {
    pub name: String,
    pub value: f64,
    pub estimated_error: f64,
    pub op: String,
    pub params: String,
}

fn overlap_entry(name: &str, profile: OracleProfile, center: f64, window: (f64, f64)) -> DerivedValue {
    let r = overlap_fraction(profile, center, window);
    DerivedValue {
        name: name.into(),
        value: r.value,
        estimated_error: r.estimated_error,
        op: "overlap_fraction".into(),
        params: format!("{} center={center} window={}:{}", profile.describe(), window.0, window.1),
    }
}

/// Every reference value used as a test expectation.
pub fn derived_values() -> Vec<DerivedValue> {
    let gauss = |omega_t| OracleProfile::Gaussian { omega_t };
    let fwd = OracleProfile::ExpTail { omega_t: 1.0, forward: true };
    let bwd = OracleProfile::ExpTail { omega_t: 1.0, forward: false };
    let mut v = vec![
        overlap_entry("gaussian_q_18_21", gauss(1.0), 15.0, (18.0, 21.0)),
        overlap_entry("gaussian_q_14_16", gauss(1.0), 15.0, (14.0, 16.0)),
        overlap_entry("box_full_support", OracleProfile::Box { delta_t: 2.0 }, 5.0, (4.0, 6.0)),
        overlap_entry("backward_tail_q2", bwd, 15.0, (16.5, 19.5)),
        overlap_entry("forward_tail_q2", fwd, 15.0, (16.5, 19.5)),
        overlap_entry("backward_tail_q1", bwd, 5.0, (1.5, 4.5)),
        overlap_entry("forward_tail_q1", fwd, 5.0, (1.5, 4.5)),
        overlap_entry("scenario2_gaussian_q1", gauss(1.0), 5.0, (1.5, 4.5)),
        overlap_entry("scenario2_gaussian_q2", gauss(1.0), 15.0, (16.5, 19.5)),
        overlap_entry("scenario3_q1", gauss(1.0), 5.0, (6.5, 7.5)),
        overlap_entry("scenario3_q2", gauss(1.0), 15.0, (6.5, 9.5)),
    ];
    for omega in [0.5, 2.0] {
        v.push(overlap_entry(&format!("gaussian_q_18_21_omega_{omega}"), gauss(omega), 15.0, (18.0, 21.0)));
    }
    for (a, b) in [(1.0, 2.0), (3.0, 6.0), (0.0, 5.0)] {
        v.push(overlap_entry(&format!("gaussian_q_plus_{a}_{b}"), gauss(1.0), 15.0, (15.0 + a, 15.0 + b)));
        v.push(overlap_entry(&format!("gaussian_q_minus_{a}_{b}"), gauss(1.0), 15.0, (15.0 - b, 15.0 - a)));
    }

    let unnorm = integrate(|t| (-t * t).exp(), -12.0, 12.0);
    v.push(DerivedValue {
        name: "gaussian_shape_l2_norm".into(),
        value: unnorm.value.sqrt(),
        estimated_error: unnorm.estimated_error / (2.0 * unnorm.value.sqrt()),
        op: "integrate".into(),
        params: "exp(-t^2/2) on [-12,12]".into(),
    });

    // Peak of t²e^{−2t}: scan at the fine step.
    let (mut best_t, mut best) = (0.0, f64::MIN);
    let n = (5.0 / FINE_H) as usize;
    for k in 0..=n {
        let t = k as f64 * FINE_H;
        let d = fwd.density(0.0, t);
        if d > best {
            best = d;
            best_t = t;
        }
    }
    v.push(DerivedValue {
        name: "forward_tail_peak".into(),
        value: best_t,
        estimated_error: FINE_H,
        op: "scan".into(),
        params: "exp_forward omega_t=1 center=0 on [0,5]".into(),
    });
    v
}

pub const CSV_HEADER: &str = "name,value,estimated_error,oracle_op,params";

pub fn render_derived_csv(values: &[DerivedValue]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for d in values {
        let _ = writeln!(out, "{},{:?},{:?},{},{}", d.name, d.value, d.estimated_error, d.op, d.params);
    }
    out
}

/// Reads a fixture file written by [`render_derived_csv`].
pub fn parse_derived_csv(text: &str) -> Result<Vec<DerivedValue>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing or wrong header".into());
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let cols: Vec<&str> = l.splitn(5, ',').collect();
            if cols.len() != 5 {
                return Err(format!("bad row `{l}`"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s}: {e}"));
            Ok(DerivedValue {
                name: cols[0].into(),
                value: num(cols[1])?,
                estimated_error: num(cols[2])?,
                op: cols[3].into(),
                params: cols[4].into(),
            })
        })
        .collect()
}

/// Looks up a value by name in a fixture list.
pub fn lookup<'a>(values: &'a [DerivedValue], name: &str) -> Option<&'a DerivedValue> {
    values.iter().find(|d| d.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_full_support_is_one() {
        let r = overlap_fraction(OracleProfile::Box { delta_t: 2.0 }, 5.0, (4.0, 6.0));
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn backward_tail_misses_later_window() {
        let r = overlap_fraction(OracleProfile::ExpTail { omega_t: 1.0, forward: false }, 15.0, (16.5, 19.5));
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn richardson_is_consistent() {
        let p = OracleProfile::Gaussian { omega_t: 1.0 };
        let r = overlap_fraction(p, 15.0, (14.0, 16.0));
        let half = trapezoid(|t| p.density(15.0, t), 14.0, 16.0, 2 * (2.0 / FINE_H) as usize);
        assert!((r.value - half).abs() < 4.0 * r.estimated_error.max(1e-16));
        // erf(1) = 0.8427007929497149
        assert!((r.value - 0.842_700_792_949_714_9).abs() < 1e-8);
    }

    #[test]
    fn pipeline_matrix_cases() {
        let m = channel_pipeline_matrix(true, true, PI, PI);
        assert!((m[0][0] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!(m[1][0].norm() < 1e-14);
        let m = channel_pipeline_matrix(false, false, 0.7, 1.9);
        assert!((m[0][0] - Complex64::from_polar(1.0, 0.7)).norm() < 1e-14);
        assert!(m[1][0].norm() < 1e-15);
        for k in 0..100 {
            let (k1, k2) = (0.37 * k as f64, -1.3 * k as f64);
            for (a, b) in [(true, true), (true, false), (false, true)] {
                assert!(unitarity_defect(&channel_pipeline_matrix(a, b, k1, k2)) < 1e-14);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let v = derived_values();
        assert_eq!(parse_derived_csv(&render_derived_csv(&v)).unwrap(), v);
    }
}
