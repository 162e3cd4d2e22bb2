//! Synthetic phase signals on a uniform sample grid.
//!
//! Every sample of a [`SampledSignal`] sits at `start_time_s + i / sample_rate_hz`.
//! Signals produced by this module always start on an integer multiple of the
//! sample period, so two signals with the same rate share one absolute grid and
//! can be added, intercepted, or shifted by whole samples without interpolation.
//!
//! Delays are realized by moving the time axis of a master realization
//! ([`delayed`]), never by resampling, so the delayed copy is bit-identical to
//! the original on the overlap.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid positions closer than this (in samples) to an integer count as on-grid.
const GRID_TOLERANCE: f64 = 1e-6;

/// Uniformly sampled real-valued phase signal (radians).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<f64>,
    sample_rate_hz: f64,
    start_time_s: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64, start_time_s: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::param(
                "sample_rate_hz",
                format!("{sample_rate_hz} must be > 0"),
            ));
        }
        if !start_time_s.is_finite() {
            return Err(Error::param("start_time_s", "must be finite"));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            start_time_s,
        })
    }

    /// Builds a signal whose first sample sits at grid index `start_index`.
    pub fn on_grid(samples: Vec<f64>, sample_rate_hz: f64, start_index: i64) -> Result<Self> {
        Self::new(samples, sample_rate_hz, start_index as f64 / sample_rate_hz)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn start_time_s(&self) -> f64 {
        self.start_time_s
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Time just past the last sample.
    pub fn end_time_s(&self) -> f64 {
        self.start_time_s + self.duration_s()
    }

    pub fn sample_period_s(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    /// Absolute grid index of the first sample.
    pub fn start_index(&self) -> i64 {
        (self.start_time_s * self.sample_rate_hz).round() as i64
    }

    /// Absolute grid index one past the last sample.
    pub fn end_index(&self) -> i64 {
        self.start_index() + self.samples.len() as i64
    }

    pub fn time_at(&self, i: usize) -> f64 {
        (self.start_index() + i as i64) as f64 / self.sample_rate_hz
    }

    /// Sample at absolute grid index `index`, if inside the span.
    pub fn at_index(&self, index: i64) -> Option<f64> {
        let local = index - self.start_index();
        if local < 0 {
            return None;
        }
        self.samples.get(local as usize).copied()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Sample-wise sum of two signals covering the same grid span.
    pub fn add(&self, other: &SampledSignal) -> Result<Self> {
        self.check_same_span(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            samples,
            ..self.clone()
        })
    }

    /// Copy of the samples at absolute grid indices `[start_index, start_index + len)`.
    pub fn slice_grid(&self, start_index: i64, len: usize) -> Result<Self> {
        let local = start_index - self.start_index();
        if local < 0 || local as usize + len > self.samples.len() {
            return Err(Error::Bounds {
                t0_s: start_index as f64 / self.sample_rate_hz,
                end_s: (start_index + len as i64) as f64 / self.sample_rate_hz,
                span_start_s: self.start_time_s,
                span_end_s: self.end_time_s(),
            });
        }
        let local = local as usize;
        Self::on_grid(
            self.samples[local..local + len].to_vec(),
            self.sample_rate_hz,
            start_index,
        )
    }

    pub(crate) fn check_same_grid(&self, other: &SampledSignal) -> Result<()> {
        let rel = (self.sample_rate_hz - other.sample_rate_hz).abs() / self.sample_rate_hz;
        if rel > 1e-12 {
            return Err(Error::GridMismatch {
                detail: format!(
                    "sample rates {} Hz and {} Hz",
                    self.sample_rate_hz, other.sample_rate_hz
                ),
            });
        }
        let offset = (self.start_time_s - other.start_time_s) * self.sample_rate_hz;
        if (offset - offset.round()).abs() > GRID_TOLERANCE {
            return Err(Error::GridMismatch {
                detail: format!("start times are {offset} samples apart"),
            });
        }
        Ok(())
    }

    pub(crate) fn check_same_span(&self, other: &SampledSignal) -> Result<()> {
        self.check_same_grid(other)?;
        if self.start_index() != other.start_index() || self.len() != other.len() {
            return Err(Error::GridMismatch {
                detail: format!(
                    "spans [{}, {}) and [{}, {}) differ",
                    self.start_index(),
                    self.end_index(),
                    other.start_index(),
                    other.end_index()
                ),
            });
        }
        Ok(())
    }
}

/// Analysis segment `[t0_s, t0_s + tw_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub t0_s: f64,
    pub tw_s: f64,
}

impl Window {
    pub fn new(t0_s: f64, tw_s: f64) -> Result<Self> {
        if !(tw_s > 0.0 && tw_s.is_finite()) {
            return Err(Error::param("tw_s", format!("{tw_s} must be > 0")));
        }
        if !t0_s.is_finite() {
            return Err(Error::param("t0_s", "must be finite"));
        }
        Ok(Self { t0_s, tw_s })
    }

    /// The whole span of `signal`.
    pub fn covering(signal: &SampledSignal) -> Self {
        Self {
            t0_s: signal.start_time_s(),
            tw_s: signal.duration_s(),
        }
    }

    pub fn end_s(&self) -> f64 {
        self.t0_s + self.tw_s
    }

    pub fn len_samples(&self, sample_rate_hz: f64) -> usize {
        (self.tw_s * sample_rate_hz).round() as usize
    }

    pub fn start_index(&self, sample_rate_hz: f64) -> i64 {
        (self.t0_s * sample_rate_hz).round() as i64
    }
}

/// Seed for the counter-based generator behind every random signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Seed for trial `index`; trials stay independent of evaluation order.
    pub fn trial(self, index: u64) -> RngSeed {
        RngSeed(self.0 ^ index)
    }

    /// Independent stream `stream` under this seed.
    pub fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

/// Noise component definitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    /// Unit-variance Gaussian white noise, scaled to `snr_db` when mixed.
    White { snr_db: f64 },
    /// `slope_rad_per_s * t`.
    LinearDrift { slope_rad_per_s: f64 },
    /// `amplitude_rad * sin(2 pi freq_hz t + phase_rad)`.
    LowfreqSine {
        freq_hz: f64,
        amplitude_rad: f64,
        #[serde(default)]
        phase_rad: f64,
    },
    /// Gaussian noise confined to `[center - bw/2, center + bw/2]` with mean
    /// square `power_rad2` over the generated span.
    Bandlimited {
        center_hz: f64,
        bandwidth_hz: f64,
        power_rad2: f64,
    },
}

impl NoiseSpec {
    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        match *self {
            NoiseSpec::White { snr_db } => {
                if !snr_db.is_finite() {
                    return Err(Error::param("snr_db", "must be finite"));
                }
            }
            NoiseSpec::LinearDrift { slope_rad_per_s } => {
                if !slope_rad_per_s.is_finite() {
                    return Err(Error::param("slope_rad_per_s", "must be finite"));
                }
            }
            NoiseSpec::LowfreqSine {
                freq_hz,
                amplitude_rad,
                phase_rad,
            } => {
                if !(freq_hz >= 0.0 && freq_hz.is_finite()) {
                    return Err(Error::param("freq_hz", format!("{freq_hz} must be >= 0")));
                }
                if !(amplitude_rad >= 0.0 && amplitude_rad.is_finite()) {
                    return Err(Error::param("amplitude_rad", "must be >= 0"));
                }
                if !phase_rad.is_finite() {
                    return Err(Error::param("phase_rad", "must be finite"));
                }
            }
            NoiseSpec::Bandlimited {
                center_hz,
                bandwidth_hz,
                power_rad2,
            } => {
                if !(power_rad2 >= 0.0 && power_rad2.is_finite()) {
                    return Err(Error::param("power_rad2", "must be >= 0"));
                }
                check_band(center_hz, bandwidth_hz, sample_rate_hz)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn check_band(center_hz: f64, bandwidth_hz: f64, sample_rate_hz: f64) -> Result<()> {
    let low_hz = center_hz - bandwidth_hz / 2.0;
    let high_hz = center_hz + bandwidth_hz / 2.0;
    let nyquist_hz = sample_rate_hz / 2.0;
    if !(bandwidth_hz > 0.0) || !(low_hz > 0.0) || high_hz > nyquist_hz || !high_hz.is_finite() {
        return Err(Error::Band {
            low_hz,
            high_hz,
            nyquist_hz,
        });
    }
    Ok(())
}

fn check_duration(duration_s: f64, sample_rate_hz: f64) -> Result<usize> {
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::param(
            "duration_s",
            format!("{duration_s} must be > 0"),
        ));
    }
    if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
        return Err(Error::param("sample_rate_hz", "must be > 0"));
    }
    let len = (duration_s * sample_rate_hz).round() as usize;
    if len == 0 {
        return Err(Error::param("duration_s", "shorter than one sample"));
    }
    Ok(len)
}

/// `amplitude * sin(2 pi freq_hz t + phase_rad)` sampled from t = 0.
pub fn gen_sine(
    freq_hz: f64,
    amplitude: f64,
    phase_rad: f64,
    duration_s: f64,
    sample_rate_hz: f64,
) -> Result<SampledSignal> {
    let len = check_duration(duration_s, sample_rate_hz)?;
    sine_on_grid(freq_hz, amplitude, phase_rad, sample_rate_hz, 0, len)
}

/// Sine sampled at absolute grid indices `[start_index, start_index + len)`.
pub fn sine_on_grid(
    freq_hz: f64,
    amplitude: f64,
    phase_rad: f64,
    sample_rate_hz: f64,
    start_index: i64,
    len: usize,
) -> Result<SampledSignal> {
    if !(freq_hz > 0.0 && freq_hz.is_finite()) {
        return Err(Error::param("freq_hz", format!("{freq_hz} must be > 0")));
    }
    if !(sample_rate_hz >= 10.0 * freq_hz) {
        return Err(Error::SampleRate {
            freq_hz,
            sample_rate_hz,
        });
    }
    let omega = 2.0 * PI * freq_hz;
    let samples = (0..len as i64)
        .map(|i| {
            let t = (start_index + i) as f64 / sample_rate_hz;
            amplitude * (omega * t + phase_rad).sin()
        })
        .collect();
    SampledSignal::on_grid(samples, sample_rate_hz, start_index)
}

/// Noise realization sampled from t = 0; see [`noise_on_grid`].
pub fn gen_noise(
    spec: &NoiseSpec,
    duration_s: f64,
    sample_rate_hz: f64,
    seed: RngSeed,
) -> Result<SampledSignal> {
    let len = check_duration(duration_s, sample_rate_hz)?;
    noise_on_grid(spec, sample_rate_hz, 0, len, seed)
}

/// Noise realization at absolute grid indices `[start_index, start_index + len)`.
///
/// White noise has unit variance; deterministic kinds are evaluated at the
/// absolute sample times, so two calls over overlapping spans agree on the
/// overlap. Random kinds draw from stream 0 of `seed`.
pub fn noise_on_grid(
    spec: &NoiseSpec,
    sample_rate_hz: f64,
    start_index: i64,
    len: usize,
    seed: RngSeed,
) -> Result<SampledSignal> {
    noise_on_stream(spec, sample_rate_hz, start_index, len, seed, 0)
}

/// [`noise_on_grid`] drawing from stream `stream` of `seed`.
pub fn noise_on_stream(
    spec: &NoiseSpec,
    sample_rate_hz: f64,
    start_index: i64,
    len: usize,
    seed: RngSeed,
    stream: u64,
) -> Result<SampledSignal> {
    spec.validate(sample_rate_hz)?;
    let time = |i: usize| (start_index + i as i64) as f64 / sample_rate_hz;
    let samples = match *spec {
        NoiseSpec::White { .. } => {
            let mut rng = seed.rng(stream);
            (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
        }
        NoiseSpec::LinearDrift { slope_rad_per_s } => {
            (0..len).map(|i| slope_rad_per_s * time(i)).collect()
        }
        NoiseSpec::LowfreqSine {
            freq_hz,
            amplitude_rad,
            phase_rad,
        } => {
            let omega = 2.0 * PI * freq_hz;
            (0..len)
                .map(|i| amplitude_rad * (omega * time(i) + phase_rad).sin())
                .collect()
        }
        NoiseSpec::Bandlimited {
            center_hz,
            bandwidth_hz,
            power_rad2,
        } => {
            let mut rng = seed.rng(stream);
            bandlimited_samples(
                center_hz,
                bandwidth_hz,
                power_rad2,
                sample_rate_hz,
                len,
                &mut rng,
            )?
        }
    };
    SampledSignal::on_grid(samples, sample_rate_hz, start_index)
}

/// White Gaussian noise masked to the band by a brick-wall filter in the
/// frequency domain, then rescaled to the requested mean square.
fn bandlimited_samples(
    center_hz: f64,
    bandwidth_hz: f64,
    power_rad2: f64,
    sample_rate_hz: f64,
    len: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let mut buf: Vec<Complex<f64>> = (0..len)
        .map(|_| Complex::new(StandardNormal.sample(rng), 0.0))
        .collect();
    if power_rad2 == 0.0 {
        return Ok(vec![0.0; len]);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);

    let low = center_hz - bandwidth_hz / 2.0;
    let high = center_hz + bandwidth_hz / 2.0;
    let bin_hz = sample_rate_hz / len as f64;
    for (k, v) in buf.iter_mut().enumerate() {
        // signed frequency of bin k
        let f = if k <= len / 2 {
            k as f64
        } else {
            k as f64 - len as f64
        } * bin_hz;
        let f = f.abs();
        if f < low || f > high {
            *v = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(len).process(&mut buf);

    let mut out: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let ms = out.iter().map(|v| v * v).sum::<f64>() / len as f64;
    if ms == 0.0 {
        return Err(Error::param(
            "bandwidth_hz",
            format!("band [{low}, {high}] Hz holds no frequency bin at {bin_hz} Hz resolution"),
        ));
    }
    let scale = (power_rad2 / ms).sqrt();
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(out)
}

/// `s(t - tau0)`: the same samples on a time axis moved by `tau0_s`.
///
/// `tau0_s` must be a whole number of sample periods.
pub fn delayed(signal: &SampledSignal, tau0_s: f64) -> Result<SampledSignal> {
    let shift = grid_shift(tau0_s, signal.sample_rate_hz())?;
    SampledSignal::on_grid(
        signal.samples().to_vec(),
        signal.sample_rate_hz(),
        signal.start_index() + shift,
    )
}

/// Number of samples in `tau_s`, or an error naming the nearest grid values.
pub fn grid_shift(tau_s: f64, sample_rate_hz: f64) -> Result<i64> {
    if !tau_s.is_finite() {
        return Err(Error::param("tau0_s", "must be finite"));
    }
    let k = tau_s * sample_rate_hz;
    let rounded = k.round();
    if (k - rounded).abs() > GRID_TOLERANCE * rounded.abs().max(1.0) {
        return Err(Error::OffGrid {
            tau_s,
            below_s: k.floor() / sample_rate_hz,
            above_s: k.ceil() / sample_rate_hz,
        });
    }
    Ok(rounded as i64)
}

/// Mean square of `signal` over `window`.
pub(crate) fn window_power(signal: &SampledSignal, window: &Window) -> Result<f64> {
    let seg = intercept(signal, window)?;
    if seg.is_empty() {
        return Err(Error::Empty("window holds no samples"));
    }
    Ok(seg.samples().iter().map(|v| v * v).sum::<f64>() / seg.len() as f64)
}

/// Factor that brings `noise` to `snr_db` below `signal`, powers taken over `window`.
pub fn snr_scale(
    signal: &SampledSignal,
    noise: &SampledSignal,
    snr_db: f64,
    window: &Window,
) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::param("snr_db", "must be finite"));
    }
    let p_signal = window_power(signal, window)?;
    let p_noise = window_power(noise, window)?;
    if p_signal == 0.0 {
        return Err(Error::UndefinedSnr { which: "signal" });
    }
    if p_noise == 0.0 {
        return Err(Error::UndefinedSnr { which: "noise" });
    }
    let target = p_signal / 10f64.powf(snr_db / 10.0);
    Ok((target / p_noise).sqrt())
}

/// `signal + noise * k` with k chosen so that the window SNR equals `snr_db`.
pub fn mix_at_snr(
    signal: &SampledSignal,
    noise: &SampledSignal,
    snr_db: f64,
    window: &Window,
) -> Result<SampledSignal> {
    signal.check_same_span(noise)?;
    let k = snr_scale(signal, noise, snr_db, window)?;
    signal.add(&noise.scaled(k))
}

/// Samples of `signal` inside `[t0, t0 + tw)`; `round(tw * fs)` of them.
pub fn intercept(signal: &SampledSignal, window: &Window) -> Result<SampledSignal> {
    let fs = signal.sample_rate_hz();
    let start = window.start_index(fs);
    let len = window.len_samples(fs);
    if start < signal.start_index() || start + len as i64 > signal.end_index() {
        return Err(Error::Bounds {
            t0_s: window.t0_s,
            end_s: window.end_s(),
            span_start_s: signal.start_time_s(),
            span_end_s: signal.end_time_s(),
        });
    }
    signal.slice_grid(start, len)
}
