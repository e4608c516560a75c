//! Two-channel algebra: beamsplitter mixing, mirror phases and the
//! four-branch weights of the detector densities.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

/// Coefficients on the arm basis `|1⟩, |2⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelVec {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl ChannelVec {
    pub const fn new(c1: Complex64, c2: Complex64) -> Self {
        Self { c1, c2 }
    }

    /// `|1⟩`
    pub const fn one() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// `|2⟩`
    pub const fn two() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }

    pub fn component(&self, detector: Detector) -> Complex64 {
        match detector {
            Detector::D1 => self.c1,
            Detector::D2 => self.c2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Beamsplitter {
    Bs1,
    Bs2,
}

/// Detector `D_k` monitors arm `|k⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Detector {
    D1,
    D2,
}

impl Detector {
    pub const BOTH: [Detector; 2] = [Detector::D1, Detector::D2];

    pub fn index(self) -> usize {
        match self {
            Detector::D1 => 0,
            Detector::D2 => 1,
        }
    }
}

/// Mixes the arms.
///
/// `B̂₁: |1⟩ → (|1⟩+|2⟩)/√2, |2⟩ → (−|1⟩+|2⟩)/√2`,
/// `B̂₂: |1⟩ → (|1⟩−|2⟩)/√2, |2⟩ → (|1⟩+|2⟩)/√2`.
#[inline]
pub fn apply_bs(which: Beamsplitter, v: ChannelVec) -> ChannelVec {
    let ChannelVec { c1, c2 } = v;
    match which {
        Beamsplitter::Bs1 => ChannelVec::new((c1 - c2) * FRAC_1_SQRT_2, (c1 + c2) * FRAC_1_SQRT_2),
        Beamsplitter::Bs2 => ChannelVec::new((c1 + c2) * FRAC_1_SQRT_2, (c2 - c1) * FRAC_1_SQRT_2),
    }
}

/// Diagonal phase `|k⟩ → e^{iκ_k}|k⟩`.
#[inline]
pub fn apply_mirror(kappa1: f64, kappa2: f64, v: ChannelVec) -> ChannelVec {
    ChannelVec::new(
        v.c1 * Complex64::from_polar(1.0, kappa1),
        v.c2 * Complex64::from_polar(1.0, kappa2),
    )
}

/// Whether a final spacetime point traces back into `Ω₁` at the first
/// beamsplitter step and into `Ω₂` at the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BranchKey {
    pub in_bs1: bool,
    pub in_bs2: bool,
}

impl BranchKey {
    pub const ALL: [BranchKey; 4] = [
        BranchKey { in_bs1: true, in_bs2: true },
        BranchKey { in_bs1: false, in_bs2: true },
        BranchKey { in_bs1: true, in_bs2: false },
        BranchKey { in_bs1: false, in_bs2: false },
    ];

    pub const fn new(in_bs1: bool, in_bs2: bool) -> Self {
        Self { in_bs1, in_bs2 }
    }
}

/// Channel amplitude at the detectors for a photon that started in `|1⟩`,
/// per branch.
pub fn branch_amplitude(key: BranchKey, detector: Detector, kappa1: f64, kappa2: f64) -> Complex64 {
    let e1 = Complex64::from_polar(1.0, kappa1);
    let e2 = Complex64::from_polar(1.0, kappa2);
    let zero = Complex64::new(0.0, 0.0);
    match (key.in_bs1, key.in_bs2, detector) {
        (true, true, Detector::D1) => 0.5 * (e1 + e2),
        (true, true, Detector::D2) => 0.5 * (e2 - e1),
        (false, true, Detector::D1) => e1 * FRAC_1_SQRT_2,
        (false, true, Detector::D2) => -e1 * FRAC_1_SQRT_2,
        (true, false, Detector::D1) => e1 * FRAC_1_SQRT_2,
        (true, false, Detector::D2) => e2 * FRAC_1_SQRT_2,
        (false, false, Detector::D1) => e1,
        (false, false, Detector::D2) => zero,
    }
}

/// Density weight of a branch at a detector; the two detectors' weights sum
/// to one for every key.
pub fn branch_coefficient(key: BranchKey, detector: Detector, kappa1: f64, kappa2: f64) -> f64 {
    match (key.in_bs1, key.in_bs2) {
        (true, true) => {
            let c = (kappa1 - kappa2).cos();
            match detector {
                Detector::D1 => 0.5 * (1.0 + c),
                Detector::D2 => 0.5 * (1.0 - c),
            }
        }
        (false, true) | (true, false) => 0.5,
        (false, false) => match detector {
            Detector::D1 => 1.0,
            Detector::D2 => 0.0,
        },
    }
}
