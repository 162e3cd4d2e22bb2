//! Dual-path fiber link: a vibration at distance `l` from the coupler reaches
//! the detector along the clockwise path after `(L - l) / v` and along the
//! counter-clockwise path after `l / v`, with `v = c / n`.
//!
//! The delay of the counter-clockwise arrival relative to the clockwise one is
//! `tau0 = (L - 2 l) / v`, positive when the event is closer to the coupler
//! than the midpoint, and the position follows as `l = (L - v tau) / 2`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_delay, DelayEstimate, Engine, EstimatorInput, Method};
use crate::experiments::summarize;
use crate::signal::{noise_on_stream, NoiseSpec, RngSeed, SampledSignal, Window};

pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;
pub const DEFAULT_REFRACTIVE_INDEX: f64 = 1.468;

fn default_light_speed() -> f64 {
    SPEED_OF_LIGHT_M_PER_S
}

fn default_index() -> f64 {
    DEFAULT_REFRACTIVE_INDEX
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberLink {
    pub length_m: f64,
    #[serde(default = "default_index")]
    pub refractive_index: f64,
    #[serde(default = "default_light_speed")]
    pub light_speed_m_per_s: f64,
}

impl FiberLink {
    pub fn new(length_m: f64, refractive_index: f64) -> Result<Self> {
        let link = Self {
            length_m,
            refractive_index,
            light_speed_m_per_s: SPEED_OF_LIGHT_M_PER_S,
        };
        link.validate()?;
        Ok(link)
    }

    /// Link whose group speed is `speed_m_per_s`.
    pub fn with_speed(length_m: f64, speed_m_per_s: f64) -> Result<Self> {
        Self::new(length_m, SPEED_OF_LIGHT_M_PER_S / speed_m_per_s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_m > 0.0 && self.length_m.is_finite()) {
            return Err(Error::param(
                "length_m",
                format!("{} must be > 0", self.length_m),
            ));
        }
        if !(self.refractive_index > 1.0 && self.refractive_index.is_finite()) {
            return Err(Error::param(
                "refractive_index",
                format!("{} must be > 1", self.refractive_index),
            ));
        }
        if !(self.light_speed_m_per_s > 0.0 && self.light_speed_m_per_s.is_finite()) {
            return Err(Error::param("light_speed_m_per_s", "must be > 0"));
        }
        Ok(())
    }

    pub fn speed_m_per_s(&self) -> f64 {
        self.light_speed_m_per_s / self.refractive_index
    }

    /// Largest possible `|tau0|`, reached at either end of the link.
    pub fn max_delay_s(&self) -> f64 {
        self.length_m / self.speed_m_per_s()
    }

    /// Position resolution of one sample of delay at `sample_rate_hz`.
    pub fn meters_per_sample(&self, sample_rate_hz: f64) -> f64 {
        self.speed_m_per_s() / (2.0 * sample_rate_hz)
    }
}

/// Vibration at `position_m` from the coupler, clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct VibrationEvent {
    pub position_m: f64,
    pub signal: SampledSignal,
}

pub fn position_to_delay(link: &FiberLink, position_m: f64) -> Result<f64> {
    link.validate()?;
    if !(0.0..=link.length_m).contains(&position_m) {
        return Err(Error::OutOfLink {
            position_m,
            length_m: link.length_m,
            tau_s: None,
        });
    }
    Ok((link.length_m - 2.0 * position_m) / link.speed_m_per_s())
}

/// Inverse of [`position_to_delay`]; strictly decreasing in `tau_s`.
pub fn delay_to_position(link: &FiberLink, tau_s: f64) -> Result<f64> {
    link.validate()?;
    let position_m = 0.5 * (link.length_m - link.speed_m_per_s() * tau_s);
    // a few ulps of slack so that the end points survive the round trip
    let slack = 1e-9 * link.length_m;
    if !(position_m >= -slack && position_m <= link.length_m + slack) {
        return Err(Error::OutOfLink {
            position_m,
            length_m: link.length_m,
            tau_s: Some(tau_s),
        });
    }
    Ok(position_m.clamp(0.0, link.length_m))
}

/// Noise added by [`simulate_dual_channel`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoisePlan {
    /// Variance of the independent white noise on each channel.
    pub white_power_rad2: f64,
    /// Components added identically to both channels.
    pub common: Vec<NoiseSpec>,
}

/// Channel pair plus the grid delays used to build it.
#[derive(Debug, Clone, PartialEq)]
pub struct DualChannel {
    pub cw: SampledSignal,
    pub ccw: SampledSignal,
    pub cw_delay_samples: i64,
    pub ccw_delay_samples: i64,
    /// Exact path delay minus its grid value.
    pub cw_residual_s: f64,
    pub ccw_residual_s: f64,
}

impl DualChannel {
    /// `tau0` realized on the grid.
    pub fn grid_delay_s(&self) -> f64 {
        (self.cw_delay_samples - self.ccw_delay_samples) as f64 / self.cw.sample_rate_hz()
    }

    /// Exact `tau0` of the event.
    pub fn exact_delay_s(&self) -> f64 {
        self.grid_delay_s() + self.cw_residual_s - self.ccw_residual_s
    }
}

/// Channels `x_cw = s(t - (L - l)/v) + n_cw` and `x_ccw = s(t - l/v) + n_ccw`.
///
/// Both path delays are rounded to the nearest sample. The output spans the
/// grid indices where both delayed copies of the event signal exist.
pub fn simulate_dual_channel(
    link: &FiberLink,
    event: &VibrationEvent,
    plan: &NoisePlan,
    sample_rate_hz: f64,
    seed: RngSeed,
) -> Result<DualChannel> {
    link.validate()?;
    let fs = sample_rate_hz;
    let s = &event.signal;
    if (s.sample_rate_hz() - fs).abs() > 1e-12 * fs {
        return Err(Error::GridMismatch {
            detail: format!(
                "event sampled at {} Hz, link at {fs} Hz",
                s.sample_rate_hz()
            ),
        });
    }
    if !(plan.white_power_rad2 >= 0.0 && plan.white_power_rad2.is_finite()) {
        return Err(Error::param("white_power_rad2", "must be >= 0"));
    }
    let v = link.speed_m_per_s();
    position_to_delay(link, event.position_m)?;
    let cw_exact = (link.length_m - event.position_m) / v;
    let ccw_exact = event.position_m / v;
    let d_cw = (cw_exact * fs).round() as i64;
    let d_ccw = (ccw_exact * fs).round() as i64;

    let lo = s.start_index() + d_cw.max(d_ccw);
    let hi = s.end_index() + d_cw.min(d_ccw);
    if hi <= lo {
        return Err(Error::param(
            "event.signal",
            format!(
                "{} samples is shorter than the path delay spread of {} samples",
                s.len(),
                (d_cw - d_ccw).abs()
            ),
        ));
    }
    let len = (hi - lo) as usize;
    let take = |d: i64| {
        let from = (lo - d - s.start_index()) as usize;
        s.samples()[from..from + len].to_vec()
    };
    let mut cw = take(d_cw);
    let mut ccw = take(d_ccw);

    if plan.white_power_rad2 > 0.0 {
        let sd = plan.white_power_rad2.sqrt();
        for (stream, ch) in [(1, &mut cw), (2, &mut ccw)] {
            let mut rng = seed.rng(stream);
            for x in ch.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *x += sd * z;
            }
        }
    }
    for (c, spec) in plan.common.iter().enumerate() {
        if matches!(spec, NoiseSpec::White { .. }) {
            return Err(Error::param(
                "common",
                "white noise is per channel; use white_power_rad2",
            ));
        }
        let noise = noise_on_stream(spec, fs, lo, len, seed, 16 + c as u64)?;
        for ((a, b), n) in cw.iter_mut().zip(ccw.iter_mut()).zip(noise.samples()) {
            *a += n;
            *b += n;
        }
    }

    Ok(DualChannel {
        cw: SampledSignal::on_grid(cw, fs, lo)?,
        ccw: SampledSignal::on_grid(ccw, fs, lo)?,
        cw_delay_samples: d_cw,
        ccw_delay_samples: d_ccw,
        cw_residual_s: cw_exact - d_cw as f64 / fs,
        ccw_residual_s: ccw_exact - d_ccw as f64 / fs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Localization {
    pub position_m: f64,
    pub estimate: DelayEstimate,
}

/// Estimates `tau0` with `x1 = x_ccw`, `x2 = x_cw` over the whole physically
/// possible delay range and maps it to a position.
///
/// `compensation` is the noise-only window, required for [`Method::TsdevComp`].
pub fn localize(
    x_cw: &SampledSignal,
    x_ccw: &SampledSignal,
    link: &FiberLink,
    method: Method,
    window: Window,
    compensation: Option<Window>,
    engine: Engine,
) -> Result<Localization> {
    link.validate()?;
    let fs = x_cw.sample_rate_hz();
    let k = (link.max_delay_s() * fs).floor();
    let range = (-k / fs, k / fs);
    let input = EstimatorInput::new(x_ccw.clone(), x_cw.clone(), window, range)?;
    let noise_input = match compensation {
        Some(w) => Some(EstimatorInput::new(x_ccw.clone(), x_cw.clone(), w, range)?),
        None => None,
    };
    let curve = engine.curve(method, &input, noise_input.as_ref())?;
    let estimate = estimate_delay(&curve)?;
    let position_m = delay_to_position(link, estimate.tau_s)?;
    Ok(Localization {
        position_m,
        estimate,
    })
}

/// Band of the vibration source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VibrationBand {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
    pub power_rad2: f64,
}

impl Default for VibrationBand {
    fn default() -> Self {
        Self {
            center_hz: 150.0,
            bandwidth_hz: 100.0,
            power_rad2: 100.0,
        }
    }
}

/// Repeated localization of a band-limited vibration on a simulated link.
///
/// Each trial draws a fresh vibration, fresh noise and a random window start.
/// The record opens with a quiet stretch (no vibration) long enough to hold the
/// compensation window for every candidate shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Emulation {
    pub link: FiberLink,
    pub position_m: f64,
    pub sample_rate_hz: f64,
    pub vibration: VibrationBand,
    pub window_s: f64,
    /// Window starts are drawn uniformly from `[0, t0_span_s)` past the earliest start.
    pub t0_span_s: f64,
    pub noise: NoisePlan,
    pub methods: Vec<Method>,
    pub engine: Engine,
}

impl Default for Emulation {
    fn default() -> Self {
        Self {
            link: FiberLink {
                length_m: 59_330.0,
                refractive_index: DEFAULT_REFRACTIVE_INDEX,
                light_speed_m_per_s: SPEED_OF_LIGHT_M_PER_S,
            },
            position_m: 49_490.0,
            sample_rate_hz: 1e6,
            vibration: VibrationBand::default(),
            window_s: 0.126,
            t0_span_s: 0.01,
            noise: NoisePlan {
                white_power_rad2: 0.01,
                common: vec![
                    NoiseSpec::LinearDrift {
                        slope_rad_per_s: 5.0,
                    },
                    NoiseSpec::LowfreqSine {
                        freq_hz: 0.2,
                        amplitude_rad: 5.0,
                        phase_rad: 0.0,
                    },
                    NoiseSpec::Bandlimited {
                        center_hz: 100.0,
                        bandwidth_hz: 100.0,
                        power_rad2: 0.4,
                    },
                ],
            },
            methods: Method::ALL.to_vec(),
            engine: Engine::Fast,
        }
    }
}

/// Positions found by one method over all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionStats {
    pub method: Method,
    pub mean_position_m: f64,
    pub std_position_m: f64,
    pub mean_error_m: f64,
    pub positions_m: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmulationReport {
    pub true_position_m: f64,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<PositionStats>,
}

impl EmulationReport {
    pub fn method(&self, method: Method) -> Option<&PositionStats> {
        self.methods.iter().find(|m| m.method == method)
    }
}

/// One emulated record: channels, the signal window and the quiet window.
pub struct EmulatedRecord {
    pub channels: DualChannel,
    pub window: Window,
    pub quiet_window: Window,
}

impl Emulation {
    pub fn realize(&self, seed: RngSeed) -> Result<EmulatedRecord> {
        let fs = self.sample_rate_hz;
        let v = self.link.speed_m_per_s();
        let d_cw = ((self.link.length_m - self.position_m) / v * fs).round() as i64;
        let d_ccw = (self.position_m / v * fs).round() as i64;
        let k = (self.link.max_delay_s() * fs).floor() as i64;
        let n = (self.window_s * fs).round() as i64;
        if n < 8 {
            return Err(Error::param(
                "window_s",
                "window must hold at least 8 samples",
            ));
        }
        let (d_lo, d_hi) = (d_cw.min(d_ccw), d_cw.max(d_ccw));
        // channel index i carries s[i - d]; the channels start at d_hi
        let lead = n + 2 * k + (d_hi - d_lo);
        let span = (self.t0_span_s * fs).round() as i64;
        let jitter = if span > 1 {
            seed.rng(3).gen_range(0..span)
        } else {
            0
        };
        let w0 = d_hi + lead + k + jitter;
        let total = w0 + n + k - d_lo;

        let body = noise_on_stream(
            &NoiseSpec::Bandlimited {
                center_hz: self.vibration.center_hz,
                bandwidth_hz: self.vibration.bandwidth_hz,
                power_rad2: self.vibration.power_rad2,
            },
            fs,
            lead,
            (total - lead) as usize,
            seed,
            4,
        )?;
        let mut s = vec![0.0; lead as usize];
        s.extend_from_slice(body.samples());
        let event = VibrationEvent {
            position_m: self.position_m,
            signal: SampledSignal::on_grid(s, fs, 0)?,
        };
        let channels = simulate_dual_channel(&self.link, &event, &self.noise, fs, seed)?;
        let quiet_start = d_hi + k;
        Ok(EmulatedRecord {
            channels,
            window: Window::new(w0 as f64 / fs, self.window_s)?,
            quiet_window: Window::new(quiet_start as f64 / fs, self.window_s)?,
        })
    }

    /// Position found by every method on trial `trial`.
    pub fn run_trial(&self, seed: RngSeed, trial: u64) -> Result<Vec<f64>> {
        let rec = self.realize(seed.trial(trial))?;
        self.methods
            .iter()
            .map(|&m| {
                let comp = (m == Method::TsdevComp).then_some(rec.quiet_window);
                localize(
                    &rec.channels.cw,
                    &rec.channels.ccw,
                    &self.link,
                    m,
                    rec.window,
                    comp,
                    self.engine,
                )
                .map(|l| l.position_m)
            })
            .collect()
    }

    pub fn run(&self, trials: usize, seed: u64) -> Result<EmulationReport> {
        if trials < 2 {
            return Err(Error::param("trials", format!("{trials} must be >= 2")));
        }
        if self.methods.is_empty() {
            return Err(Error::param("methods", "no estimator selected"));
        }
        let seed = RngSeed(seed);
        let results = (0..trials as u64)
            .into_par_iter()
            .map(|t| self.run_trial(seed, t))
            .collect::<Result<Vec<_>>>()?;
        let methods = self
            .methods
            .iter()
            .enumerate()
            .map(|(m, &method)| {
                let positions_m: Vec<f64> = results.iter().map(|r| r[m]).collect();
                let (mean, std) = summarize(&positions_m)?;
                Ok(PositionStats {
                    method,
                    mean_position_m: mean,
                    std_position_m: std,
                    mean_error_m: mean - self.position_m,
                    positions_m,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EmulationReport {
            true_position_m: self.position_m,
            trials,
            seed: seed.0,
            methods,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::gen_noise;

    fn link60() -> FiberLink {
        FiberLink::with_speed(60_000.0, 2e8).unwrap()
    }

    #[test]
    fn delay_examples() {
        let l = link60();
        assert!(position_to_delay(&l, 30_000.0).unwrap().abs() < 1e-18);
        assert!((position_to_delay(&l, 20_000.0).unwrap() - 100e-6).abs() < 1e-15);
        assert!((position_to_delay(&l, 0.0).unwrap() - l.max_delay_s()).abs() < 1e-15);
        assert!((delay_to_position(&l, 0.0).unwrap() - 30_000.0).abs() < 1e-9);
        assert!(position_to_delay(&l, -1.0).is_err());
        assert!(position_to_delay(&l, 60_001.0).is_err());
    }

    #[test]
    fn field_geometry_gives_negative_delay() {
        let link = FiberLink::new(59_330.0, DEFAULT_REFRACTIVE_INDEX).unwrap();
        let tau = position_to_delay(&link, 49_490.0).unwrap();
        let expected = (59_330.0 - 2.0 * 49_490.0) * 1.468 / SPEED_OF_LIGHT_M_PER_S;
        assert!((tau - expected).abs() < 1e-15);
        assert!(tau < 0.0);
    }

    #[test]
    fn out_of_link_delay_carries_tau() {
        match delay_to_position(&link60(), 1e-3) {
            Err(Error::OutOfLink { tau_s, .. }) => assert_eq!(tau_s, Some(1e-3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_links_rejected() {
        assert!(FiberLink::new(0.0, 1.5).is_err());
        assert!(FiberLink::new(1000.0, 1.0).is_err());
    }

    #[test]
    fn midpoint_event_gives_identical_channels() {
        let link = link60();
        let s = gen_noise(&NoiseSpec::White { snr_db: 0.0 }, 0.01, 1e5, RngSeed(1)).unwrap();
        let event = VibrationEvent {
            position_m: 30_000.0,
            signal: s,
        };
        let ch =
            simulate_dual_channel(&link, &event, &NoisePlan::default(), 1e5, RngSeed(2)).unwrap();
        assert_eq!(ch.cw, ch.ccw);
        assert_eq!(ch.grid_delay_s(), 0.0);
    }

    #[test]
    fn noise_free_localization_is_exact_on_grid() {
        let link = link60();
        let s = gen_noise(&NoiseSpec::White { snr_db: 0.0 }, 0.05, 1e5, RngSeed(7)).unwrap();
        let event = VibrationEvent {
            position_m: 20_000.0,
            signal: s,
        };
        let ch =
            simulate_dual_channel(&link, &event, &NoisePlan::default(), 1e5, RngSeed(8)).unwrap();
        assert_eq!(ch.ccw_delay_samples, 10);
        assert_eq!(ch.cw_delay_samples, 20);
        let w = Window::new(ch.cw.start_time_s() + 0.004, 0.02).unwrap();
        for m in [Method::Cc, Method::Pncc, Method::Tsdev] {
            let loc = localize(&ch.cw, &ch.ccw, &link, m, w, None, Engine::Direct).unwrap();
            assert!(
                (loc.position_m - 20_000.0).abs() < 1e-6,
                "{m}: {}",
                loc.position_m
            );
        }
    }

    #[test]
    fn short_event_rejected() {
        let link = link60();
        let s = gen_noise(&NoiseSpec::White { snr_db: 0.0 }, 1e-4, 1e5, RngSeed(1)).unwrap();
        let event = VibrationEvent {
            position_m: 0.0,
            signal: s,
        };
        assert!(
            simulate_dual_channel(&link, &event, &NoisePlan::default(), 1e5, RngSeed(2)).is_err()
        );
    }

    #[test]
    fn emulation_quiet_window_has_no_vibration() {
        let emu = Emulation {
            noise: NoisePlan::default(),
            sample_rate_hz: 1e5,
            ..Emulation::default()
        };
        let rec = emu.realize(RngSeed(3)).unwrap();
        let fs = emu.sample_rate_hz;
        let k = (emu.link.max_delay_s() * fs).floor() as i64;
        let a = rec.quiet_window.start_index(fs);
        let n = rec.quiet_window.len_samples(fs) as i64;
        for i in a..a + n {
            assert_eq!(rec.channels.ccw.at_index(i), Some(0.0));
        }
        for i in a - k..a + n + k {
            assert_eq!(rec.channels.cw.at_index(i), Some(0.0));
        }
        let w = rec.window.start_index(fs);
        assert!(rec.channels.ccw.at_index(w).unwrap() != 0.0);
        assert!(rec
            .channels
            .cw
            .at_index(w + rec.window.len_samples(fs) as i64 + k - 1)
            .is_some());
    }
}
