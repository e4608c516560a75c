//! Channel algebra against independent 2×2 matrices, and region membership
//! invariants.

use num_complex::Complex64;
use pev_mzi::channel::{apply_bs, apply_mirror, branch_amplitude, branch_coefficient};
use pev_mzi::oracle::{channel_pipeline_matrix, unitarity_defect};
use pev_mzi::regions::{parse_present_t, BOUNDARY_EPS};
use pev_mzi::{Beamsplitter, BranchKey, ChannelVec, Detector, SpacetimeRegion};
use proptest::prelude::*;

fn kappa() -> impl Strategy<Value = f64> {
    -10.0f64..10.0
}

fn state() -> impl Strategy<Value = ChannelVec> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_map(|(a, b, c, d)| ChannelVec::new(Complex64::new(a, b), Complex64::new(c, d)))
}

fn pipeline(key: BranchKey, k1: f64, k2: f64, v: ChannelVec) -> ChannelVec {
    let v = if key.in_bs1 { apply_bs(Beamsplitter::Bs1, v) } else { v };
    let v = apply_mirror(k1, k2, v);
    if key.in_bs2 {
        apply_bs(Beamsplitter::Bs2, v)
    } else {
        v
    }
}

proptest! {
    #[test]
    fn every_branch_preserves_norm(k1 in kappa(), k2 in kappa(), v in state()) {
        for key in BranchKey::ALL {
            let out = pipeline(key, k1, k2, v);
            prop_assert!((out.norm_sqr() - v.norm_sqr()).abs() < 1e-12);
            let m = channel_pipeline_matrix(key.in_bs1, key.in_bs2, k1, k2);
            prop_assert!(unitarity_defect(&m) < 1e-12);
        }
    }

    #[test]
    fn branch_amplitudes_match_matrix_columns(k1 in kappa(), k2 in kappa()) {
        for key in BranchKey::ALL {
            let m = channel_pipeline_matrix(key.in_bs1, key.in_bs2, k1, k2);
            for d in Detector::BOTH {
                let a = branch_amplitude(key, d, k1, k2);
                let c = branch_coefficient(key, d, k1, k2);
                prop_assert!((a - m[d.index()][0]).norm() < 1e-12);
                prop_assert!((c - a.norm_sqr()).abs() < 1e-12);
            }
            let total: f64 = Detector::BOTH.iter().map(|&d| branch_coefficient(key, d, k1, k2)).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interference_follows_phase_difference(k1 in kappa(), k2 in kappa()) {
        let both = BranchKey::new(true, true);
        let expected = 0.5 * (1.0 + (k1 - k2).cos());
        prop_assert!((branch_coefficient(both, Detector::D1, k1, k2) - expected).abs() < 1e-12);
    }

    #[test]
    fn single_beamsplitter_splits_evenly(k1 in kappa(), k2 in kappa()) {
        for key in [BranchKey::new(true, false), BranchKey::new(false, true)] {
            for d in Detector::BOTH {
                prop_assert!((branch_coefficient(key, d, k1, k2) - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shifted_membership_is_translation(
        lo in -5.0f64..30.0,
        len in 0.1f64..10.0,
        t in -10.0f64..50.0,
        x in -10.0f64..50.0,
        shift in -20.0f64..20.0,
    ) {
        let r = SpacetimeRegion::from_windows("BS", &[(lo, lo + len)], None).unwrap();
        prop_assert_eq!(r.shifted_contains(t, x, shift), r.contains(t - shift, x - shift));
        prop_assert_eq!(r.shifted(shift).contains(t, x), r.contains(t - shift, x - shift));
    }

    #[test]
    fn temporal_windows_ignore_space(lo in 0.0f64..30.0, len in 0.1f64..5.0, x in -1e6f64..1e6) {
        let r = SpacetimeRegion::from_windows("BS", &[(lo, lo + len)], None).unwrap();
        prop_assert!(r.is_temporal());
        prop_assert!(r.contains(lo + 0.5 * len, x));
        prop_assert!(!r.contains(lo + len + 10.0 * BOUNDARY_EPS, x));
    }

    #[test]
    fn present_t_round_trips(windows in prop::collection::vec((0u32..400, 1u32..50), 1..4)) {
        let windows: Vec<(f64, f64)> = windows
            .iter()
            .map(|&(a, l)| (a as f64 * 0.1, (a + l) as f64 * 0.1))
            .collect();
        let r = SpacetimeRegion::from_windows("BS", &windows, None).unwrap();
        let parsed = parse_present_t(&r.render_present_t()).unwrap();
        prop_assert_eq!(parsed, windows);
    }
}

#[test]
fn membership_is_closed_with_tolerance() {
    let r = SpacetimeRegion::from_windows("BS2", &[(18.0, 21.0)], None).unwrap();
    assert!(r.contains(18.0 - 0.5 * BOUNDARY_EPS, 0.0));
    assert!(r.contains(21.0 + 0.5 * BOUNDARY_EPS, 0.0));
    assert!(!r.contains(17.99, 0.0));
    assert!(!SpacetimeRegion::empty("BS1").contains(20.0, 20.0));
    assert!(SpacetimeRegion::everywhere("BS1").contains(-1e9, 1e9));
}

#[test]
fn finite_extent_gates_space() {
    let r = SpacetimeRegion::from_windows("BS1", &[(0.0, 10.0)], Some((4.0, 6.0))).unwrap();
    assert!(!r.is_temporal());
    assert!(r.contains(5.0, 5.0));
    assert!(!r.contains(5.0, 7.0));
}
