use proptest::prelude::*;

use tde::estimators::{
    cc_curve, estimate_delay, pncc_curve, tsdev_curve, tsdev_curve_fast, EstimatorInput, Method,
};
use tde::localization::{delay_to_position, position_to_delay, FiberLink};
use tde::signal::{delayed, gen_noise, NoiseSpec, RngSeed, SampledSignal, Window};

const FS: f64 = 1e4;

fn white(len: usize, seed: u64) -> SampledSignal {
    gen_noise(
        &NoiseSpec::White { snr_db: 0.0 },
        len as f64 / FS,
        FS,
        RngSeed(seed),
    )
    .unwrap()
}

fn map(s: &SampledSignal, f: impl Fn(f64, f64) -> f64) -> SampledSignal {
    let samples = s
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &v)| f(v, s.time_at(i)))
        .collect();
    SampledSignal::new(samples, s.sample_rate_hz(), s.start_time_s()).unwrap()
}

/// x1 = noise, x2 = x1 delayed by `d` samples plus a little independent noise.
fn pair(seed: u64, d: i64, len: usize) -> (SampledSignal, SampledSignal) {
    let src = white(len + 40, seed);
    let x1 = src.slice_grid(20, len).unwrap();
    let x2 = delayed(&src, d as f64 / FS)
        .unwrap()
        .slice_grid(20, len)
        .unwrap();
    let n2 = white(len + 40, seed ^ 0xdead).slice_grid(20, len).unwrap();
    (x1, x2.add(&n2.scaled(0.1)).unwrap())
}

fn input(x1: SampledSignal, x2: SampledSignal, len: usize) -> EstimatorInput {
    let w = Window::new((20 + 12) as f64 / FS, (len - 24) as f64 / FS).unwrap();
    EstimatorInput::new(x1, x2, w, (-10.0 / FS, 10.0 / FS)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tsdev_ignores_channel_offsets(seed in 0u64..1000, d in -8i64..=8, c1 in -1e3f64..1e3, c2 in -1e3f64..1e3) {
        let (x1, x2) = pair(seed, d, 400);
        let base = tsdev_curve(&input(x1.clone(), x2.clone(), 400)).unwrap();
        let shifted = tsdev_curve(&input(map(&x1, |v, _| v + c1), map(&x2, |v, _| v + c2), 400)).unwrap();
        for (a, b) in base.values().iter().zip(shifted.values()) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + c1.abs() + c2.abs()).powi(2), "{} vs {}", a, b);
        }
        prop_assert_eq!(estimate_delay(&base).unwrap().tau_s, d as f64 / FS);
    }

    #[test]
    fn common_drift_leaves_tsdev_unchanged(seed in 0u64..1000, d in -8i64..=8, slope in -100f64..100.0) {
        let (x1, x2) = pair(seed, d, 400);
        let base = tsdev_curve(&input(x1.clone(), x2.clone(), 400)).unwrap();
        let drifted = tsdev_curve(&input(
            map(&x1, |v, t| v + slope * t),
            map(&x2, |v, t| v + slope * t),
            400,
        ))
        .unwrap();
        // a common ramp turns into a constant offset of the shifted copy
        for (a, b) in base.values().iter().zip(drifted.values()) {
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn pure_common_drift_has_zero_tsdev(slope in -100f64..100.0, offset in -10f64..10.0) {
        let x = SampledSignal::new((0..300).map(|i| offset + slope * i as f64 / FS).collect(), FS, 0.0).unwrap();
        let inp = input(x.clone(), x, 256);
        for v in tsdev_curve(&inp).unwrap().values() {
            prop_assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn pncc_is_bounded(seed in 0u64..1000, d in -8i64..=8, c in -5f64..5.0) {
        let (x1, x2) = pair(seed, d, 300);
        let inp = input(map(&x1, |v, _| v + c), x2, 300);
        for v in pncc_curve(&inp).unwrap().values() {
            prop_assert!((-1.0..=1.0).contains(v));
        }
    }

    #[test]
    fn tsdev_is_nonnegative(seed in 0u64..1000, d in -8i64..=8) {
        let (x1, x2) = pair(seed, d, 300);
        let inp = input(x1, x2, 300);
        for v in tsdev_curve(&inp).unwrap().values() {
            prop_assert!(*v >= 0.0);
        }
        for v in tsdev_curve_fast(&inp).unwrap().values() {
            prop_assert!(*v >= 0.0);
        }
    }

    #[test]
    fn common_scaling_keeps_the_argmin(seed in 0u64..1000, d in -8i64..=8, k in 1e-3f64..1e3) {
        let (x1, x2) = pair(seed, d, 300);
        let base = input(x1.clone(), x2.clone(), 300);
        let scaled = input(x1.scaled(k), x2.scaled(k), 300);
        for m in [Method::Cc, Method::Pncc, Method::Tsdev] {
            let a = estimate_delay(&tde::estimators::Engine::Direct.curve(m, &base, None).unwrap()).unwrap();
            let b = estimate_delay(&tde::estimators::Engine::Direct.curve(m, &scaled, None).unwrap()).unwrap();
            prop_assert_eq!(a.tau_s, b.tau_s);
        }
    }

    #[test]
    fn fast_matches_direct(seed in 0u64..1000, d in -8i64..=8, c in -50f64..50.0) {
        let (x1, x2) = pair(seed, d, 500);
        let inp = input(x1, map(&x2, |v, _| v + c), 500);
        let a = tsdev_curve(&inp).unwrap();
        let b = tsdev_curve_fast(&inp).unwrap();
        for (u, v) in a.values().iter().zip(b.values()) {
            prop_assert!((u - v).abs() <= 1e-9 * u.abs().max(1e-3));
        }
    }

    #[test]
    fn delayed_copies_are_bit_identical(seed in 0u64..1000, d in -50i64..50) {
        let s = white(200, seed);
        let t = delayed(&s, d as f64 / FS).unwrap();
        prop_assert_eq!(t.samples(), s.samples());
        for i in s.start_index()..s.end_index() {
            prop_assert_eq!(t.at_index(i + d), s.at_index(i));
        }
    }

    #[test]
    fn position_delay_round_trip(len in 1.0f64..1e5, frac in 0.0f64..=1.0, n in 1.01f64..2.0) {
        let link = FiberLink::new(len, n).unwrap();
        let l = frac * len;
        let back = delay_to_position(&link, position_to_delay(&link, l).unwrap()).unwrap();
        prop_assert!((back - l).abs() < 1e-9);
    }

    #[test]
    fn position_decreases_with_delay(a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let link = FiberLink::new(60_000.0, 1.468).unwrap();
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let tmax = link.max_delay_s();
        let pl = delay_to_position(&link, lo * tmax).unwrap();
        let ph = delay_to_position(&link, hi * tmax).unwrap();
        prop_assert!(pl > ph);
    }
}

#[test]
fn cc_of_constant_channels_is_their_product() {
    let x1 = SampledSignal::new(vec![2.0; 100], FS, 0.0).unwrap();
    let x2 = SampledSignal::new(vec![-3.0; 100], FS, 0.0).unwrap();
    let inp = EstimatorInput::new(
        x1,
        x2,
        Window::new(0.001, 0.005).unwrap(),
        (-0.0005, 0.0005),
    )
    .unwrap();
    for v in cc_curve(&inp).unwrap().values() {
        assert!((v + 6.0).abs() < 1e-12);
    }
}
