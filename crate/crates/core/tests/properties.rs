//! Property tests for the structural invariants of the geometry, AF
//! composition, and fading laws.

use ntn_core::fading::FadingModel;
use ntn_core::geometry::{slant_range, Altitude, ElevationAngle};
use ntn_core::linkbudget::af_end_to_end_snr;
use proptest::prelude::*;

fn hop_snrs() -> impl Strategy<Value = Vec<f64>> {
    // linear SNRs spanning -10..70 dB
    prop::collection::vec((-10.0f64..70.0).prop_map(|db| 10f64.powf(db / 10.0)), 1..=4)
}

proptest! {
    #[test]
    fn af_never_exceeds_the_weakest_hop(snrs in hop_snrs()) {
        let v = af_end_to_end_snr(&snrs).unwrap();
        let min = snrs.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(v <= min * (1.0 + 1e-14));
        prop_assert!(v > 0.0);
    }

    #[test]
    fn af_is_permutation_invariant(snrs in hop_snrs(), seed in 0u64..1000) {
        let v = af_end_to_end_snr(&snrs).unwrap();
        let mut shuffled = snrs.clone();
        // cheap deterministic shuffle
        let n = shuffled.len();
        for i in 0..n {
            let j = (seed as usize + i * 7) % n;
            shuffled.swap(i, j);
        }
        let w = af_end_to_end_snr(&shuffled).unwrap();
        prop_assert!((v - w).abs() <= 1e-12 * v.max(1e-300));
    }

    #[test]
    fn af_is_monotone_in_each_hop(snrs in hop_snrs(), idx in 0usize..4, bump in 1.01f64..100.0) {
        let idx = idx % snrs.len();
        let v = af_end_to_end_snr(&snrs).unwrap();
        let mut better = snrs.clone();
        better[idx] *= bump;
        let w = af_end_to_end_snr(&better).unwrap();
        prop_assert!(w >= v * (1.0 - 1e-14), "{v} -> {w}");
    }

    #[test]
    fn adding_a_hop_never_helps(snrs in hop_snrs(), extra in -10.0f64..70.0) {
        let v = af_end_to_end_snr(&snrs).unwrap();
        let mut longer = snrs.clone();
        longer.push(10f64.powf(extra / 10.0));
        let w = af_end_to_end_snr(&longer).unwrap();
        prop_assert!(w <= v * (1.0 + 1e-14));
    }

    #[test]
    fn slant_range_decreases_with_elevation_and_dominates_dh(
        h_low in 0.0f64..1000.0,
        dh in 1.0f64..35_000.0,
        a1 in 5.0f64..89.0,
        da in 0.5f64..30.0,
    ) {
        let h_high = (h_low + dh).min(40_000.0);
        let lo = Altitude::new(h_low).unwrap();
        let hi = Altitude::new(h_high).unwrap();
        let steep = ElevationAngle::new((a1 + da).min(90.0)).unwrap();
        let shallow = ElevationAngle::new(a1).unwrap();
        let d_shallow = slant_range(lo, hi, shallow).unwrap();
        let d_steep = slant_range(lo, hi, steep).unwrap();
        prop_assert!(d_steep < d_shallow);
        prop_assert!(d_steep >= (h_high - h_low) * (1.0 - 1e-12));
    }

    #[test]
    fn exceedance_is_a_probability_and_monotone(
        b0 in 0.05f64..1.0,
        m in 0.5f64..40.0,
        omega in 0.1f64..3.0,
        k in 0.0f64..30.0,
    ) {
        let models = [
            FadingModel::ShadowedRician { b0, m, omega },
            FadingModel::Rician { k_factor: k },
        ];
        for model in models {
            let mut prev = 1.0f64;
            for x_db in [-20.0, -10.0, -3.0, 0.0, 3.0, 5.0, 10.0] {
                let p = model.exceedance_probability(x_db).unwrap();
                prop_assert!((0.0..=1.0).contains(&p), "{model:?} at {x_db}: {p}");
                prop_assert!(p <= prev + 1e-9, "{model:?} rose at {x_db}: {p} > {prev}");
                prev = p;
            }
        }
    }
}
