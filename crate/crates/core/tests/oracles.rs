//! Library results checked against values computed here from first principles.

use std::f64::consts::PI;

use tde::estimators::{
    cc_curve, compensated_tsdev_curve, pncc_curve, sine_cc_closed_form, sine_power_closed_form,
    sine_tsdev_closed_form, tsdev_curve, EstimatorInput,
};
use tde::experiments::run_window_sweep;
use tde::signal::{delayed, gen_noise, sine_on_grid, NoiseSpec, RngSeed, SampledSignal, Window};

/// `(1/N) sum a[i] b[i + k]` over the window, straight from indices.
fn naive(x1: &SampledSignal, x2: &SampledSignal, w0: i64, n: i64, k: i64) -> (f64, f64, f64, f64) {
    let (mut cc, mut p1, mut p2, mut sd, mut sdd) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in w0..w0 + n {
        let a = x1.at_index(i).unwrap();
        let b = x2.at_index(i + k).unwrap();
        cc += a * b;
        p1 += a * a;
        p2 += b * b;
        sd += a - b;
        sdd += (a - b) * (a - b);
    }
    let nf = n as f64;
    let mean = sd / nf;
    (cc / nf, p1 / nf, p2 / nf, sdd / nf - mean * mean)
}

fn noisy_pair(seed: u64) -> (SampledSignal, SampledSignal) {
    let fs = 2e4;
    let spec = NoiseSpec::White { snr_db: 0.0 };
    let s = gen_noise(&spec, 0.1, fs, RngSeed(seed)).unwrap();
    let x2 = delayed(&s, 7.0 / fs)
        .unwrap()
        .slice_grid(100, 1800)
        .unwrap();
    let n2 = gen_noise(&spec, 0.1, fs, RngSeed(seed + 1))
        .unwrap()
        .slice_grid(100, 1800)
        .unwrap();
    let x2 = x2.add(&n2.scaled(0.3)).unwrap();
    let x1 = SampledSignal::new(s.samples().iter().map(|v| v + 0.7).collect(), fs, 0.0).unwrap();
    (x1, x2)
}

#[test]
fn curves_match_index_sums() {
    let (x1, x2) = noisy_pair(11);
    let fs = x1.sample_rate_hz();
    let w = Window::new(0.01, 0.06).unwrap();
    let inp = EstimatorInput::new(x1.clone(), x2.clone(), w, (-20.0 / fs, 25.0 / fs)).unwrap();
    let cc = cc_curve(&inp).unwrap();
    let pn = pncc_curve(&inp).unwrap();
    let ts = tsdev_curve(&inp).unwrap();
    assert_eq!(cc.len(), 46);
    for j in 0..cc.len() {
        let k = cc.shift_at(j);
        assert!((cc.taus_s()[j] - k as f64 / fs).abs() < 1e-15);
        let (r, p1, p2, var) = naive(&x1, &x2, 200, 1200, k);
        assert!((cc.values()[j] - r).abs() < 1e-12);
        assert!((pn.values()[j] - r / (p1 * p2).sqrt()).abs() < 1e-12);
        assert!((ts.values()[j] - var).abs() < 1e-10);
    }
}

#[test]
fn compensation_is_a_difference_of_deviations() {
    let (x1, x2) = noisy_pair(12);
    let fs = x1.sample_rate_hz();
    let sig = EstimatorInput::new(
        x1.clone(),
        x2.clone(),
        Window::new(0.05, 0.03).unwrap(),
        (-0.0005, 0.0005),
    )
    .unwrap();
    let quiet = EstimatorInput::new(
        x1.clone(),
        x2.clone(),
        Window::new(0.0075, 0.03).unwrap(),
        (-0.0005, 0.0005),
    )
    .unwrap();
    let comp = compensated_tsdev_curve(&sig, &quiet).unwrap();
    for j in 0..comp.len() {
        let k = comp.shift_at(j);
        let a = naive(&x1, &x2, 1000, 600, k).3;
        let b = naive(&x1, &x2, 150, 600, k).3;
        assert!((comp.values()[j] - (a - b)).abs() < 1e-10, "shift {k}");
        assert!((comp.taus_s()[j] - k as f64 / fs).abs() < 1e-15);
    }
}

/// The sine integrals have elementary antiderivatives, evaluated here directly.
#[test]
fn sine_closed_forms_match_antiderivatives() {
    let omega = 2.0 * PI * 20.0;
    let (tau0, t0, tw) = (1e-4, 0.013, 0.2123);
    // (1/Tw) int sin(w t) sin(w (t + tau - tau0)) dt
    let cc = |tau: f64| {
        let phi = omega * (tau - tau0);
        let f = |t: f64| 0.5 * (t * phi.cos() - (2.0 * omega * t + phi).sin() / (2.0 * omega));
        (f(t0 + tw) - f(t0)) / tw
    };
    // mean of sin^2 over the window
    let p = {
        let f = |t: f64| t / 2.0 - (2.0 * omega * t).sin() / (4.0 * omega);
        (f(t0 + tw) - f(t0)) / tw
    };
    assert!((sine_power_closed_form(omega, t0, tw) - p).abs() < 1e-12);
    for i in -50..=50 {
        let tau = i as f64 * 1e-5;
        assert!((sine_cc_closed_form(omega, tau0, t0, tw, tau) - cc(tau)).abs() < 1e-12);
        // variance of sin(w t) - sin(w (t + tau - tau0)) = 2 sin(phi/2) cos(w t + phi/2)
        let phi = omega * (tau - tau0);
        let amp = 2.0 * (phi / 2.0).sin();
        let m = {
            let f = |t: f64| (omega * t + phi / 2.0).sin() / omega;
            amp * (f(t0 + tw) - f(t0)) / tw
        };
        let ms = {
            let f = |t: f64| t / 2.0 + (2.0 * omega * t + phi).sin() / (4.0 * omega);
            amp * amp * (f(t0 + tw) - f(t0)) / tw
        };
        assert!((sine_tsdev_closed_form(omega, tau0, t0, tw, tau) - (ms - m * m)).abs() < 1e-12);
    }
}

#[test]
fn discrete_sine_curves_approach_closed_forms() {
    let fs = 1e5;
    let omega = 2.0 * PI * 20.0;
    let (t0, tw, tau0) = (0.0031, 0.2137, 1e-4);
    let s = sine_on_grid(20.0, 1.0, 0.0, fs, 0, 30_000).unwrap();
    let x2 = delayed(&s, tau0).unwrap();
    let inp = EstimatorInput::new(s, x2, Window::new(t0, tw).unwrap(), (-5e-4, 5e-4)).unwrap();
    let cc = cc_curve(&inp).unwrap();
    let ts = tsdev_curve(&inp).unwrap();
    for j in 0..cc.len() {
        let tau = cc.taus_s()[j];
        assert!((cc.values()[j] - sine_cc_closed_form(omega, tau0, t0, tw, tau)).abs() < 1e-3);
        assert!((ts.values()[j] - sine_tsdev_closed_form(omega, tau0, t0, tw, tau)).abs() < 1e-3);
    }
}

#[test]
fn reported_std_matches_raw_csv() {
    let report = run_window_sweep(&[0.2125], 20, 5).unwrap();
    let mut buf = Vec::new();
    report.write_csv(&mut buf).unwrap();
    let mut rows = csv::Reader::from_reader(buf.as_slice());
    let mut errs = Vec::new();
    for row in rows.records() {
        let row = row.unwrap();
        if &row[1] == "CC" {
            errs.push(row[3].parse::<f64>().unwrap());
        }
    }
    assert_eq!(errs.len(), 20);
    let n = errs.len() as f64;
    let mean = errs.iter().sum::<f64>() / n;
    let std = (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n).sqrt();
    let (m, s) = report.stats(tde::estimators::Method::Cc, 0).unwrap();
    assert!((m - mean).abs() < 1e-18);
    assert!((s - std).abs() < 1e-15);
}
