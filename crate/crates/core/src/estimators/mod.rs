//! Shift-curve estimators: CC, PNCC, TSDEV and compensated TSDEV.
//!
//! All estimators slide a fixed window of `x1` against `x2` shifted by whole
//! samples. For a shift of `k` samples the window sample `x1[i]` is paired
//! with `x2[i + k]`; the shift is reported as `tau = k / fs`. Shifts are linear,
//! so `x2` must physically cover every shifted window.
//!
//! The plain functions ([`cc_curve`], [`pncc_curve`], [`tsdev_curve`]) evaluate
//! the definitions directly in `O(N * M)`. The `_fast` variants compute the
//! same quantities from an FFT cross-correlation and prefix sums over `x2`.

mod closed_form;
mod fast;

pub use closed_form::{sine_cc_closed_form, sine_power_closed_form, sine_tsdev_closed_form};
pub use fast::{cc_curve_fast, compensated_tsdev_curve_fast, pncc_curve_fast, tsdev_curve_fast};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{intercept, SampledSignal, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "CC")]
    Cc,
    #[serde(rename = "PNCC")]
    Pncc,
    #[serde(rename = "TSDEV")]
    Tsdev,
    #[serde(rename = "TSDEV_COMP")]
    TsdevComp,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Cc, Method::Pncc, Method::Tsdev, Method::TsdevComp];

    /// Correlation methods peak at the delay, deviation methods dip.
    pub fn seeks_maximum(self) -> bool {
        matches!(self, Method::Cc | Method::Pncc)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cc => "CC",
            Method::Pncc => "PNCC",
            Method::Tsdev => "TSDEV",
            Method::TsdevComp => "TSDEV_COMP",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "cc" => Ok(Method::Cc),
            "pncc" => Ok(Method::Pncc),
            "tsdev" => Ok(Method::Tsdev),
            "tsdev_comp" | "comp" => Ok(Method::TsdevComp),
            _ => Err(Error::param("method", format!("unknown method `{s}`"))),
        }
    }
}

/// How the shift curves are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Literal per-shift sums.
    #[default]
    Direct,
    /// FFT cross-correlation plus prefix sums.
    Fast,
}

/// Estimator score as a function of the candidate shift.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCurve {
    first_shift: i64,
    taus_s: Vec<f64>,
    values: Vec<f64>,
    method: Method,
    sample_rate_hz: f64,
    window: Option<Window>,
}

impl ShiftCurve {
    /// Curve over shifts `first_shift, first_shift + 1, ...` samples.
    pub fn new(
        method: Method,
        sample_rate_hz: f64,
        first_shift: i64,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !(sample_rate_hz > 0.0) {
            return Err(Error::param("sample_rate_hz", "must be > 0"));
        }
        let taus_s = (0..values.len() as i64)
            .map(|j| (first_shift + j) as f64 / sample_rate_hz)
            .collect();
        Ok(Self {
            first_shift,
            taus_s,
            values,
            method,
            sample_rate_hz,
            window: None,
        })
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = Some(window);
        self
    }

    pub fn taus_s(&self) -> &[f64] {
        &self.taus_s
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn window(&self) -> Option<&Window> {
        self.window.as_ref()
    }

    pub fn first_shift(&self) -> i64 {
        self.first_shift
    }

    /// Shift of entry `j` in samples.
    pub fn shift_at(&self, j: usize) -> i64 {
        self.first_shift + j as i64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tau_range_s(&self) -> Option<(f64, f64)> {
        Some((*self.taus_s.first()?, *self.taus_s.last()?))
    }
}

/// Chosen shift of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayEstimate {
    pub tau_s: f64,
    pub score: f64,
    pub method: Method,
    /// Index of `tau_s` inside `curve`.
    pub index: usize,
    /// Sub-sample estimate when a [`Refinement`] other than `None` was asked for.
    pub refined_tau_s: Option<f64>,
    pub curve: ShiftCurve,
}

/// Two channels, the analysis window on `x1`, and the shift search range.
#[derive(Debug, Clone)]
pub struct EstimatorInput {
    pub x1: SampledSignal,
    pub x2: SampledSignal,
    pub window: Window,
    pub tau_range_s: (f64, f64),
}

impl EstimatorInput {
    pub fn new(
        x1: SampledSignal,
        x2: SampledSignal,
        window: Window,
        tau_range_s: (f64, f64),
    ) -> Result<Self> {
        x1.check_same_grid(&x2)?;
        let input = Self {
            x1,
            x2,
            window,
            tau_range_s,
        };
        input.aligned()?;
        Ok(input)
    }

    /// Borrowed view with the window of `x1` and the stretch of `x2` it slides over.
    pub(crate) fn aligned(&self) -> Result<Aligned<'_>> {
        self.x1.check_same_grid(&self.x2)?;
        let fs = self.x1.sample_rate_hz();
        let (tau_min, tau_max) = self.tau_range_s;
        if !(tau_min.is_finite() && tau_max.is_finite()) {
            return Err(Error::param("tau_range_s", "bounds must be finite"));
        }
        let k_min = (tau_min * fs - 1e-6).ceil() as i64;
        let k_max = (tau_max * fs + 1e-6).floor() as i64;
        if k_min > k_max {
            return Err(Error::param(
                "tau_range_s",
                format!("[{tau_min}, {tau_max}] s contains no grid shift"),
            ));
        }
        let a = intercept(&self.x1, &self.window)?;
        let n = a.len();
        if n == 0 {
            return Err(Error::Empty("window holds no samples"));
        }
        let w0 = a.start_index();
        let lo = w0 + k_min - self.x2.start_index();
        let hi = w0 + n as i64 + k_max - self.x2.start_index();
        let before = (-lo).max(0) as usize;
        let after = (hi - self.x2.len() as i64).max(0) as usize;
        if before > 0 || after > 0 {
            return Err(Error::Coverage { before, after });
        }
        let x1_local = (w0 - self.x1.start_index()) as usize;
        Ok(Aligned {
            a: &self.x1.samples()[x1_local..x1_local + n],
            b: &self.x2.samples()[lo as usize..hi as usize],
            k_min,
            shifts: (k_max - k_min + 1) as usize,
            sample_rate_hz: fs,
            window: self.window,
        })
    }
}

/// `b[j..j + a.len()]` is the `x2` segment paired with the window at shift `k_min + j`.
pub(crate) struct Aligned<'a> {
    pub a: &'a [f64],
    pub b: &'a [f64],
    pub k_min: i64,
    pub shifts: usize,
    pub sample_rate_hz: f64,
    pub window: Window,
}

impl Aligned<'_> {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn segment(&self, j: usize) -> &[f64] {
        &self.b[j..j + self.a.len()]
    }

    pub fn tau_at(&self, j: usize) -> f64 {
        (self.k_min + j as i64) as f64 / self.sample_rate_hz
    }

    pub fn curve(&self, method: Method, values: Vec<f64>) -> ShiftCurve {
        ShiftCurve {
            first_shift: self.k_min,
            taus_s: (0..values.len()).map(|j| self.tau_at(j)).collect(),
            values,
            method,
            sample_rate_hz: self.sample_rate_hz,
            window: Some(self.window),
        }
    }
}

fn mean_square(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64
}

/// Mean square of `signal` over `window`.
pub fn average_power(signal: &SampledSignal, window: &Window) -> Result<f64> {
    let seg = intercept(signal, window)?;
    if seg.is_empty() {
        return Err(Error::Empty("window holds no samples"));
    }
    Ok(mean_square(seg.samples()))
}

/// `R(tau) = (1/N) sum x1[i] x2[i + k]`.
pub fn cc_curve(input: &EstimatorInput) -> Result<ShiftCurve> {
    let al = input.aligned()?;
    let n = al.n() as f64;
    let values = (0..al.shifts)
        .map(|j| {
            al.a.iter()
                .zip(al.segment(j))
                .map(|(x, y)| x * y)
                .sum::<f64>()
                / n
        })
        .collect();
    Ok(al.curve(Method::Cc, values))
}

/// `R(tau) / sqrt(P1 * P2(tau))`, with `P2` recomputed at every shift.
pub fn pncc_curve(input: &EstimatorInput) -> Result<ShiftCurve> {
    let al = input.aligned()?;
    let n = al.n() as f64;
    let p1 = mean_square(al.a);
    let mut values = Vec::with_capacity(al.shifts);
    for j in 0..al.shifts {
        let seg = al.segment(j);
        let p2 = mean_square(seg);
        if p1 == 0.0 || p2 == 0.0 {
            return Err(Error::DegeneratePower {
                tau_s: al.tau_at(j),
            });
        }
        let r = al.a.iter().zip(seg).map(|(x, y)| x * y).sum::<f64>() / n;
        values.push(r / (p1 * p2).sqrt());
    }
    Ok(al.curve(Method::Pncc, values))
}

/// `TSDEV^2(tau)`: variance of `x1[i] - x2[i + k]` over the window, with the
/// mean `C(tau)` removed separately at each shift.
pub fn tsdev_curve(input: &EstimatorInput) -> Result<ShiftCurve> {
    let al = input.aligned()?;
    let values = (0..al.shifts)
        .map(|j| tsdev_at(al.a, al.segment(j)))
        .collect();
    Ok(al.curve(Method::Tsdev, values))
}

fn tsdev_at(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let c = a.iter().zip(b).map(|(x, y)| x - y).sum::<f64>() / n;
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y - c;
            d * d
        })
        .sum::<f64>()
        / n
}

/// Signal-segment TSDEV minus the TSDEV of a noise-only segment over the same shifts.
pub fn compensated_tsdev_curve(
    input: &EstimatorInput,
    noise_input: &EstimatorInput,
) -> Result<ShiftCurve> {
    let signal = tsdev_curve(input)?;
    let noise = tsdev_curve(noise_input)?;
    compensate(signal, &noise, input, noise_input)
}

pub(crate) fn compensate(
    signal: ShiftCurve,
    noise: &ShiftCurve,
    input: &EstimatorInput,
    noise_input: &EstimatorInput,
) -> Result<ShiftCurve> {
    let fs = input.x1.sample_rate_hz();
    let n_signal = input.window.len_samples(fs);
    let n_noise = noise_input
        .window
        .len_samples(noise_input.x1.sample_rate_hz());
    let diff = n_signal.abs_diff(n_noise);
    if diff > 1 {
        return Err(Error::WindowMismatch {
            signal: n_signal,
            noise: n_noise,
            diff,
        });
    }
    if signal.first_shift != noise.first_shift || signal.len() != noise.len() {
        return Err(Error::param(
            "tau_range_s",
            "signal and noise inputs must search the same shifts",
        ));
    }
    let values = signal
        .values
        .iter()
        .zip(&noise.values)
        .map(|(s, n)| s - n)
        .collect();
    Ok(ShiftCurve {
        values,
        method: Method::TsdevComp,
        ..signal
    })
}

impl Engine {
    /// Curve for `method`; `noise_input` is required for [`Method::TsdevComp`].
    pub fn curve(
        self,
        method: Method,
        input: &EstimatorInput,
        noise_input: Option<&EstimatorInput>,
    ) -> Result<ShiftCurve> {
        let noise = || {
            noise_input.ok_or(Error::param(
                "compensation",
                "TSDEV_COMP needs a noise-only segment",
            ))
        };
        match (self, method) {
            (Engine::Direct, Method::Cc) => cc_curve(input),
            (Engine::Direct, Method::Pncc) => pncc_curve(input),
            (Engine::Direct, Method::Tsdev) => tsdev_curve(input),
            (Engine::Direct, Method::TsdevComp) => compensated_tsdev_curve(input, noise()?),
            (Engine::Fast, Method::Cc) => cc_curve_fast(input),
            (Engine::Fast, Method::Pncc) => pncc_curve_fast(input),
            (Engine::Fast, Method::Tsdev) => tsdev_curve_fast(input),
            (Engine::Fast, Method::TsdevComp) => compensated_tsdev_curve_fast(input, noise()?),
        }
    }
}

/// Optional sub-sample refinement of the grid extremum. Off by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Refinement {
    #[default]
    None,
    /// Vertex of the parabola through the extremum and its two neighbours.
    Parabolic,
}

/// Grid extremum of `curve`: maximum for CC/PNCC, minimum for TSDEV variants.
///
/// Equal values are resolved toward the smallest `|tau|`, and between `-tau`
/// and `+tau` toward the negative one.
pub fn estimate_delay(curve: &ShiftCurve) -> Result<DelayEstimate> {
    estimate_delay_refined(curve, Refinement::None)
}

pub fn estimate_delay_refined(curve: &ShiftCurve, refinement: Refinement) -> Result<DelayEstimate> {
    let maximize = curve.method.seeks_maximum();
    let mut best: Option<usize> = None;
    for (j, &v) in curve.values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        let Some(b) = best else {
            best = Some(j);
            continue;
        };
        let bv = curve.values[b];
        let better = if maximize { v > bv } else { v < bv };
        let tie = v == bv && {
            let (k, kb) = (curve.shift_at(j), curve.shift_at(b));
            k.abs() < kb.abs() || (k.abs() == kb.abs() && k < kb)
        };
        if better || tie {
            best = Some(j);
        }
    }
    let index = best.ok_or(Error::Empty("curve has no finite values"))?;
    let refined_tau_s = match refinement {
        Refinement::None => None,
        Refinement::Parabolic => Some(parabolic_vertex(curve, index)),
    };
    Ok(DelayEstimate {
        tau_s: curve.taus_s[index],
        score: curve.values[index],
        method: curve.method,
        index,
        refined_tau_s,
        curve: curve.clone(),
    })
}

fn parabolic_vertex(curve: &ShiftCurve, j: usize) -> f64 {
    let tau = curve.taus_s[j];
    if j == 0 || j + 1 >= curve.len() {
        return tau;
    }
    let (l, c, r) = (curve.values[j - 1], curve.values[j], curve.values[j + 1]);
    let denom = l - 2.0 * c + r;
    if denom == 0.0 || !denom.is_finite() {
        return tau;
    }
    let offset = 0.5 * (l - r) / denom;
    tau + offset.clamp(-0.5, 0.5) / curve.sample_rate_hz
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gen_noise, NoiseSpec, RngSeed};
    use approx::assert_relative_eq;

    fn white(len: usize, seed: u64) -> SampledSignal {
        let s = gen_noise(
            &NoiseSpec::White { snr_db: 0.0 },
            len as f64 / 1e4,
            1e4,
            RngSeed(seed),
        )
        .unwrap();
        assert_eq!(s.len(), len);
        s
    }

    fn input(x1: SampledSignal, x2: SampledSignal, t0: f64, tw: f64, k: i64) -> EstimatorInput {
        let fs = x1.sample_rate_hz();
        EstimatorInput::new(
            x1,
            x2,
            Window::new(t0, tw).unwrap(),
            (-(k as f64) / fs, k as f64 / fs),
        )
        .unwrap()
    }

    #[test]
    fn autocorrelation_peaks_at_zero() {
        let x = white(2000, 1);
        let inp = input(x.clone(), x, 0.01, 0.1, 20);
        let est = estimate_delay(&cc_curve(&inp).unwrap()).unwrap();
        assert_eq!(est.tau_s, 0.0);
        let pncc = pncc_curve(&inp).unwrap();
        let est = estimate_delay(&pncc).unwrap();
        assert_eq!(est.tau_s, 0.0);
        assert_relative_eq!(est.score, 1.0, max_relative = 1e-12);
        let ts = tsdev_curve(&inp).unwrap();
        let est = estimate_delay(&ts).unwrap();
        assert_eq!(est.tau_s, 0.0);
        assert!(est.score.abs() < 1e-12);
    }

    #[test]
    fn pncc_is_bounded() {
        let inp = input(white(3000, 2), white(3000, 3), 0.02, 0.2, 100);
        for v in pncc_curve(&inp).unwrap().values() {
            assert!(v.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn pncc_rejects_zero_power() {
        let x1 = white(1000, 4);
        let x2 = SampledSignal::new(vec![0.0; 1000], 1e4, 0.0).unwrap();
        let inp = input(x1, x2, 0.01, 0.05, 5);
        assert!(matches!(
            pncc_curve(&inp),
            Err(Error::DegeneratePower { .. })
        ));
    }

    #[test]
    fn coverage_error_reports_deficit() {
        let x = white(1000, 5);
        let fs = 1e4;
        let inp = EstimatorInput {
            x1: x.clone(),
            x2: x,
            window: Window::new(0.0, 0.05).unwrap(),
            tau_range_s: (-3.0 / fs, 2.0 / fs),
        };
        match cc_curve(&inp) {
            Err(Error::Coverage { before, after }) => {
                assert_eq!(before, 3);
                assert_eq!(after, 0);
            }
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    #[test]
    fn curve_grid_is_uniform() {
        let inp = input(white(1000, 6), white(1000, 7), 0.02, 0.05, 10);
        let c = tsdev_curve(&inp).unwrap();
        assert_eq!(c.len(), 21);
        assert_eq!(c.first_shift(), -10);
        for w in c.taus_s().windows(2) {
            assert_relative_eq!(w[1] - w[0], 1e-4, max_relative = 1e-9);
        }
    }

    #[test]
    fn estimate_picks_unique_minimum() {
        let c = ShiftCurve::new(Method::Tsdev, 1.0, -1, vec![3.0, 1.0, 2.0]).unwrap();
        let e = estimate_delay(&c).unwrap();
        assert_eq!(e.tau_s, 0.0);
        assert_eq!(e.score, 1.0);
    }

    #[test]
    fn ties_prefer_small_magnitude_then_negative() {
        let c = ShiftCurve::new(Method::Tsdev, 1.0, -2, vec![0.5, 1.0, 1.0, 1.0, 0.5]).unwrap();
        assert_eq!(estimate_delay(&c).unwrap().tau_s, -2.0);
        let c = ShiftCurve::new(Method::Tsdev, 1.0, -2, vec![0.5, 1.0, 1.0, 1.0, 0.7]).unwrap();
        assert_eq!(estimate_delay(&c).unwrap().tau_s, -2.0);
        let c = ShiftCurve::new(Method::Tsdev, 1.0, -2, vec![0.5, 1.0, 1.0, 0.5, 1.0]).unwrap();
        assert_eq!(estimate_delay(&c).unwrap().tau_s, 1.0);
        let c = ShiftCurve::new(Method::Cc, 1.0, -2, vec![1.0, 2.0, 0.0, 2.0, 1.0]).unwrap();
        assert_eq!(estimate_delay(&c).unwrap().tau_s, -1.0);
        let c = ShiftCurve::new(Method::Cc, 1.0, -1, vec![2.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(estimate_delay(&c).unwrap().tau_s, -1.0);
        let c = ShiftCurve::new(Method::Cc, 1.0, -1, vec![1.0, 2.0, 2.0]).unwrap();
        assert_eq!(estimate_delay(&c).unwrap().tau_s, 0.0);
    }

    #[test]
    fn empty_curve_is_an_error() {
        let c = ShiftCurve::new(Method::Cc, 1.0, 0, vec![]).unwrap();
        assert!(estimate_delay(&c).is_err());
    }

    #[test]
    fn parabolic_refinement_finds_vertex() {
        // (k - 0.3)^2 sampled at k = -2..=2
        let values = (-2..=2).map(|k| (k as f64 - 0.3).powi(2)).collect();
        let c = ShiftCurve::new(Method::Tsdev, 10.0, -2, values).unwrap();
        let e = estimate_delay_refined(&c, Refinement::Parabolic).unwrap();
        assert_eq!(e.tau_s, 0.0);
        assert_relative_eq!(e.refined_tau_s.unwrap(), 0.03, max_relative = 1e-12);
        assert_eq!(estimate_delay(&c).unwrap().refined_tau_s, None);
    }

    #[test]
    fn self_compensation_is_flat_zero() {
        let inp = input(white(2000, 8), white(2000, 9), 0.05, 0.1, 30);
        let c = compensated_tsdev_curve(&inp, &inp).unwrap();
        assert_eq!(c.method(), Method::TsdevComp);
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn compensation_rejects_window_mismatch() {
        let x1 = white(4000, 10);
        let x2 = white(4000, 11);
        let a = input(x1.clone(), x2.clone(), 0.01, 0.1, 5);
        let b = input(x1.clone(), x2.clone(), 0.2, 0.1001, 5);
        assert!(compensated_tsdev_curve(&a, &b).is_ok());
        let c = input(x1, x2, 0.2, 0.1005, 5);
        assert!(matches!(
            compensated_tsdev_curve(&a, &c),
            Err(Error::WindowMismatch { diff: 5, .. })
        ));
    }

    #[test]
    fn average_power_of_zero_is_zero() {
        let z = SampledSignal::new(vec![0.0; 100], 1e3, 0.0).unwrap();
        assert_eq!(
            average_power(&z, &Window::new(0.0, 0.1).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn method_parsing() {
        assert_eq!("tsdev".parse::<Method>().unwrap(), Method::Tsdev);
        assert_eq!("TSDEV_COMP".parse::<Method>().unwrap(), Method::TsdevComp);
        assert_eq!("tsdev-comp".parse::<Method>().unwrap(), Method::TsdevComp);
        assert_eq!("CC".parse::<Method>().unwrap(), Method::Cc);
        assert!("gcc".parse::<Method>().is_err());
    }
}
