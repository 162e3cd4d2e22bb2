//! Monte Carlo sweeps over signal and noise parameters.
//!
//! A [`TrialSpec`] describes one synthetic two-channel record: the source
//! signal, the true delay, the analysis window, and a list of noise
//! components. Each trial builds a fresh record from its own seed, runs every
//! requested estimator and records `estimate - tau0`.
//!
//! Trial `i` of every sweep point uses seed `seed ^ i`, so neighbouring points
//! see the same random draws and their differences reflect the swept
//! parameter rather than sampling noise.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_delay, Engine, EstimatorInput, Method};
use crate::signal::{
    delayed, grid_shift, noise_on_stream, sine_on_grid, snr_scale, NoiseSpec, RngSeed,
    SampledSignal, Window,
};

const STREAM_SIGNAL: u64 = 1;
const STREAM_T0: u64 = 2;
const STREAM_NOISE: u64 = 16;

/// Source signal `s(t)` seen by both channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    Sine {
        freq_hz: f64,
        amplitude: f64,
    },
    Bandlimited {
        center_hz: f64,
        bandwidth_hz: f64,
        power_rad2: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApplyTo {
    X1,
    X2,
    /// One realization added to both channels.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseEntry {
    pub spec: NoiseSpec,
    pub apply_to: ApplyTo,
}

impl NoiseEntry {
    pub fn new(spec: NoiseSpec, apply_to: ApplyTo) -> Self {
        Self { spec, apply_to }
    }

    /// Independent white noise at `snr_db` on each channel.
    pub fn white_pair(snr_db: f64) -> [Self; 2] {
        let spec = NoiseSpec::White { snr_db };
        [Self::new(spec, ApplyTo::X1), Self::new(spec, ApplyTo::X2)]
    }

    pub fn common(spec: NoiseSpec) -> Self {
        Self::new(spec, ApplyTo::Both)
    }
}

/// One synthetic experiment: `x1 = s(t) + n1`, `x2 = s(t - tau0) + n2`.
///
/// White entries are scaled to their SNR against the channel they are added to
/// (against `x1` for `Both`), with powers taken over the analysis window.
/// Other kinds are added as specified.
///
/// When `methods` contains [`Method::TsdevComp`] the record is extended
/// backwards with a noise-only stretch: the source is switched on just after
/// it, and a window of the same length placed there gives the compensation
/// curve.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub signal: SignalSpec,
    pub sample_rate_hz: f64,
    pub tau0_s: f64,
    pub window: Window,
    /// Window starts are drawn uniformly on the grid in `[t0, t0 + t0_span_s)`.
    pub t0_span_s: f64,
    pub tau_range_s: (f64, f64),
    pub noise: Vec<NoiseEntry>,
    pub methods: Vec<Method>,
    pub engine: Engine,
    pub seed: RngSeed,
}

/// Per-trial error for every method, in `methods` order.
pub type TrialErrors = Vec<(Method, f64)>;

struct Layout {
    lo: i64,
    len: usize,
    window: Window,
    noise_window: Option<Window>,
    onset: Option<i64>,
}

impl TrialSpec {
    pub fn validate(&self) -> Result<()> {
        let fs = self.sample_rate_hz;
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::param("sample_rate_hz", format!("{fs} must be > 0")));
        }
        grid_shift(self.tau0_s, fs)?;
        if self.window.len_samples(fs) < 8 {
            return Err(Error::param("tw_s", "window must hold at least 8 samples"));
        }
        if !(self.t0_span_s >= 0.0 && self.t0_span_s.is_finite()) {
            return Err(Error::param("t0_span_s", "must be >= 0"));
        }
        if self.methods.is_empty() {
            return Err(Error::param("methods", "no estimator selected"));
        }
        match self.signal {
            SignalSpec::Sine { freq_hz, amplitude } => {
                if !amplitude.is_finite() {
                    return Err(Error::param("amplitude", "must be finite"));
                }
                sine_on_grid(freq_hz, amplitude, 0.0, fs, 0, 0)?;
            }
            SignalSpec::Bandlimited {
                center_hz,
                bandwidth_hz,
                power_rad2,
            } => NoiseSpec::Bandlimited {
                center_hz,
                bandwidth_hz,
                power_rad2,
            }
            .validate(fs)?,
        }
        for entry in &self.noise {
            entry.spec.validate(fs)?;
        }
        Ok(())
    }

    fn needs_noise_segment(&self) -> bool {
        self.methods.contains(&Method::TsdevComp)
    }

    fn layout(&self, seed: RngSeed) -> Result<Layout> {
        let fs = self.sample_rate_hz;
        let d = grid_shift(self.tau0_s, fs)?;
        let n = self.window.len_samples(fs) as i64;
        let (tau_min, tau_max) = self.tau_range_s;
        let k_lo = (tau_min * fs - 1e-6).ceil() as i64;
        let k_hi = (tau_max * fs + 1e-6).floor() as i64;
        if k_lo > k_hi {
            return Err(Error::param("tau_range_s", "contains no grid shift"));
        }

        let mut w0 = self.window.start_index(fs);
        let span = (self.t0_span_s * fs).round() as i64;
        if span > 1 {
            w0 += seed.rng(STREAM_T0).gen_range(0..span);
        }
        let hi = w0 + n + k_hi.max(0);
        let window = Window::new(w0 as f64 / fs, self.window.tw_s)?;

        if !self.needs_noise_segment() {
            return Ok(Layout {
                lo: w0 + k_lo.min(0),
                len: (hi - w0 - k_lo.min(0)) as usize,
                window,
                noise_window: None,
                onset: None,
            });
        }
        // x1 needs s = 0 on [wn, wn + n); x2 needs s(i - d) = 0 on [wn + k_lo, wn + n + k_hi)
        let onset = w0.min(w0 + k_lo - d);
        let wn = onset - n - (k_hi - d).max(0);
        let lo = wn + k_lo.min(0);
        Ok(Layout {
            lo,
            len: (hi - lo) as usize,
            window,
            noise_window: Some(Window::new(wn as f64 / fs, self.window.tw_s)?),
            onset: Some(onset),
        })
    }

    /// Builds the two channels of trial `trial`, with the window used and the
    /// noise-only window when compensation is requested.
    pub fn realize(
        &self,
        trial: u64,
    ) -> Result<(SampledSignal, SampledSignal, Window, Option<Window>)> {
        self.validate()?;
        let fs = self.sample_rate_hz;
        let seed = self.seed.trial(trial);
        let lay = self.layout(seed)?;
        let d = grid_shift(self.tau0_s, fs)?;

        let m_lo = lay.lo - d.max(0);
        let m_len = lay.len + d.unsigned_abs() as usize;
        let master = match self.signal {
            SignalSpec::Sine { freq_hz, amplitude } => {
                sine_on_grid(freq_hz, amplitude, 0.0, fs, m_lo, m_len)?
            }
            SignalSpec::Bandlimited {
                center_hz,
                bandwidth_hz,
                power_rad2,
            } => noise_on_stream(
                &NoiseSpec::Bandlimited {
                    center_hz,
                    bandwidth_hz,
                    power_rad2,
                },
                fs,
                m_lo,
                m_len,
                seed,
                STREAM_SIGNAL,
            )?,
        };
        let master = match lay.onset {
            Some(onset) => {
                let mut s = master.into_samples();
                let off = (onset - m_lo).clamp(0, m_len as i64) as usize;
                s[..off].iter_mut().for_each(|v| *v = 0.0);
                SampledSignal::on_grid(s, fs, m_lo)?
            }
            None => master,
        };
        let s1 = master.slice_grid(lay.lo, lay.len)?;
        let s2 = delayed(&master, self.tau0_s)?.slice_grid(lay.lo, lay.len)?;

        let mut x1 = s1.samples().to_vec();
        let mut x2 = s2.samples().to_vec();
        for (e, entry) in self.noise.iter().enumerate() {
            let stream = STREAM_NOISE + e as u64;
            let raw = noise_on_stream(&entry.spec, fs, lay.lo, lay.len, seed, stream)?;
            let scale = match entry.spec {
                NoiseSpec::White { snr_db } => {
                    let reference = if entry.apply_to == ApplyTo::X2 {
                        &s2
                    } else {
                        &s1
                    };
                    snr_scale(reference, &raw, snr_db, &lay.window)?
                }
                _ => 1.0,
            };
            let raw = raw.samples();
            if entry.apply_to != ApplyTo::X2 {
                x1.iter_mut().zip(raw).for_each(|(x, v)| *x += scale * v);
            }
            if entry.apply_to != ApplyTo::X1 {
                x2.iter_mut().zip(raw).for_each(|(x, v)| *x += scale * v);
            }
        }
        Ok((
            SampledSignal::on_grid(x1, fs, lay.lo)?,
            SampledSignal::on_grid(x2, fs, lay.lo)?,
            lay.window,
            lay.noise_window,
        ))
    }

    /// Estimation error of every method on trial `trial`.
    pub fn run_trial(&self, trial: u64) -> Result<TrialErrors> {
        let (x1, x2, window, noise_window) = self.realize(trial)?;
        let noise_input = match noise_window {
            Some(w) => Some(EstimatorInput::new(
                x1.clone(),
                x2.clone(),
                w,
                self.tau_range_s,
            )?),
            None => None,
        };
        let input = EstimatorInput::new(x1, x2, window, self.tau_range_s)?;
        self.methods
            .iter()
            .map(|&m| {
                let curve = self.engine.curve(m, &input, noise_input.as_ref())?;
                Ok((m, estimate_delay(&curve)?.tau_s - self.tau0_s))
            })
            .collect()
    }
}

/// Arithmetic mean and population standard deviation.
pub fn summarize(raw: &[f64]) -> Result<(f64, f64)> {
    if raw.len() < 2 {
        return Err(Error::param("raw_errors", "need at least 2 samples"));
    }
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let var = raw.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// Error statistics of one method across the sweep points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSeries {
    pub method: Method,
    pub mean_error_s: Vec<f64>,
    pub std_error_s: Vec<f64>,
    /// `raw_errors_s[point][trial]`
    pub raw_errors_s: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub name: String,
    pub param_name: String,
    pub param_values: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub tau0_s: f64,
    pub sample_rate_hz: f64,
    pub series: Vec<MethodSeries>,
}

#[derive(Serialize)]
struct SeriesSummary<'a> {
    method: Method,
    mean_error_s: &'a [f64],
    std_error_s: &'a [f64],
}

#[derive(Serialize)]
struct ReportSummary<'a> {
    name: &'a str,
    param_name: &'a str,
    param_values: &'a [f64],
    trials: usize,
    seed: u64,
    tau0_s: f64,
    sample_rate_hz: f64,
    methods: Vec<SeriesSummary<'a>>,
}

impl SweepReport {
    pub fn series(&self, method: Method) -> Option<&MethodSeries> {
        self.series.iter().find(|s| s.method == method)
    }

    /// Index of the sweep point whose parameter equals `value`.
    pub fn point(&self, value: f64) -> Option<usize> {
        self.param_values
            .iter()
            .position(|&v| (v - value).abs() <= 1e-12 * value.abs().max(1.0))
    }

    /// `(mean, std)` of `method` at point `index`.
    pub fn stats(&self, method: Method, index: usize) -> Option<(f64, f64)> {
        let s = self.series(method)?;
        Some((*s.mean_error_s.get(index)?, *s.std_error_s.get(index)?))
    }

    /// Long-format rows `param,method,trial,error_s`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["param", "method", "trial", "error_s"])?;
        for (p, value) in self.param_values.iter().enumerate() {
            for s in &self.series {
                for (t, e) in s.raw_errors_s[p].iter().enumerate() {
                    out.write_record([
                        value.to_string(),
                        s.method.to_string(),
                        t.to_string(),
                        e.to_string(),
                    ])?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Means and standard deviations without the raw errors.
    pub fn summary_json(&self) -> Result<String> {
        let summary = ReportSummary {
            name: &self.name,
            param_name: &self.param_name,
            param_values: &self.param_values,
            trials: self.trials,
            seed: self.seed,
            tau0_s: self.tau0_s,
            sample_rate_hz: self.sample_rate_hz,
            methods: self
                .series
                .iter()
                .map(|s| SeriesSummary {
                    method: s.method,
                    mean_error_s: &s.mean_error_s,
                    std_error_s: &s.std_error_s,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&summary)?)
    }

    /// Writes `<name>.csv` and `<name>.json` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.name));
        let json_path = dir.join(format!("{}.json", self.name));
        self.write_csv(fs::File::create(&csv_path)?)?;
        fs::write(&json_path, self.summary_json()? + "\n")?;
        Ok((csv_path, json_path))
    }
}

/// Runs `trials` trials at every point. Trials run in parallel on the current
/// rayon pool; results are gathered in (point, trial) order.
pub fn run_points(
    name: &str,
    param_name: &str,
    points: &[(f64, TrialSpec)],
    trials: usize,
) -> Result<SweepReport> {
    if trials < 2 {
        return Err(Error::param("trials", format!("{trials} must be >= 2")));
    }
    let Some((_, first)) = points.first() else {
        return Err(Error::Config(format!("{param_name}: sweep list is empty")));
    };
    for (_, spec) in points {
        spec.validate()?;
    }
    let jobs: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|p| (0..trials as u64).map(move |t| (p, t)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(p, t)| points[p].1.run_trial(t))
        .collect::<Result<Vec<_>>>()?;

    let series = first
        .methods
        .iter()
        .enumerate()
        .map(|(m, &method)| {
            let raw: Vec<Vec<f64>> = results
                .chunks(trials)
                .map(|chunk| chunk.iter().map(|r| r[m].1).collect())
                .collect();
            let stats = raw
                .iter()
                .map(|r| summarize(r))
                .collect::<Result<Vec<_>>>()?;
            Ok(MethodSeries {
                method,
                mean_error_s: stats.iter().map(|s| s.0).collect(),
                std_error_s: stats.iter().map(|s| s.1).collect(),
                raw_errors_s: raw,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepReport {
        name: name.to_string(),
        param_name: param_name.to_string(),
        param_values: points.iter().map(|p| p.0).collect(),
        trials,
        seed: first.seed.0,
        tau0_s: first.tau0_s,
        sample_rate_hz: first.sample_rate_hz,
        series,
    })
}

/// Settings shared by the sine-based sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaseConfig {
    pub sample_rate_hz: f64,
    pub signal_freq_hz: f64,
    pub amplitude: f64,
    pub tau0_s: f64,
    pub t0_s: f64,
    pub tw_s: f64,
    pub snr_db: f64,
    /// Defaults to `±5 tau0`.
    pub tau_range_s: Option<(f64, f64)>,
    pub engine: Engine,
}

impl Default for BaseConfig {
    fn default() -> Self {
        Self {
            sample_rate_hz: 100e3,
            signal_freq_hz: 20.0,
            amplitude: 1.0,
            tau0_s: 100e-6,
            t0_s: 0.0,
            tw_s: 0.2,
            snr_db: 30.0,
            tau_range_s: None,
            engine: Engine::Direct,
        }
    }
}

impl BaseConfig {
    pub fn period_s(&self) -> f64 {
        1.0 / self.signal_freq_hz
    }

    pub fn tau_range(&self) -> (f64, f64) {
        self.tau_range_s
            .unwrap_or((-5.0 * self.tau0_s.abs(), 5.0 * self.tau0_s.abs()))
    }

    /// Sine trial with white noise on each channel at `snr_db`.
    pub fn trial(&self, methods: &[Method], seed: u64) -> Result<TrialSpec> {
        Ok(TrialSpec {
            signal: SignalSpec::Sine {
                freq_hz: self.signal_freq_hz,
                amplitude: self.amplitude,
            },
            sample_rate_hz: self.sample_rate_hz,
            tau0_s: self.tau0_s,
            window: Window::new(self.t0_s, self.tw_s)?,
            t0_span_s: 0.0,
            tau_range_s: self.tau_range(),
            noise: NoiseEntry::white_pair(self.snr_db).to_vec(),
            methods: methods.to_vec(),
            engine: self.engine,
            seed: RngSeed(seed),
        })
    }
}

fn nonempty(values: &[f64], name: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("{name}: sweep list is empty")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Config(format!("{name}: value {v} is not finite")));
    }
    Ok(())
}

/// White-noise SNR sweep, CC against TSDEV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnrSweep {
    pub snr_db_values: Vec<f64>,
}

impl Default for SnrSweep {
    fn default() -> Self {
        Self {
            snr_db_values: (0..=9).map(|i| 45.0 - 5.0 * i as f64).collect(),
        }
    }
}

impl SnrSweep {
    pub fn run(&self, base: &BaseConfig, trials: usize, seed: u64) -> Result<SweepReport> {
        nonempty(&self.snr_db_values, "snr_db_values")?;
        let points = self
            .snr_db_values
            .iter()
            .map(|&snr| {
                let base = BaseConfig {
                    snr_db: snr,
                    ..base.clone()
                };
                Ok((snr, base.trial(&[Method::Cc, Method::Tsdev], seed)?))
            })
            .collect::<Result<Vec<_>>>()?;
        run_points("fig1_snr", "snr_db", &points, trials)
    }
}

/// Window-length sweep with the window start drawn over one signal period.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowSweep {
    /// Empty means `4T, 4.25T, ..., 5T` of the base signal.
    pub tw_values_s: Vec<f64>,
}

impl WindowSweep {
    pub fn values(&self, base: &BaseConfig) -> Vec<f64> {
        if self.tw_values_s.is_empty() {
            (16..=20)
                .map(|q| q as f64 * base.period_s() / 4.0)
                .collect()
        } else {
            self.tw_values_s.clone()
        }
    }

    pub fn run(&self, base: &BaseConfig, trials: usize, seed: u64) -> Result<SweepReport> {
        let values = self.values(base);
        nonempty(&values, "tw_values_s")?;
        let points = values
            .iter()
            .map(|&tw| {
                let base = BaseConfig {
                    tw_s: tw,
                    ..base.clone()
                };
                let mut spec = base.trial(&[Method::Cc, Method::Pncc, Method::Tsdev], seed)?;
                spec.t0_span_s = base.period_s();
                Ok((tw, spec))
            })
            .collect::<Result<Vec<_>>>()?;
        run_points("fig2_window", "tw_s", &points, trials)
    }
}

/// Common linear drift of varying slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftSweep {
    pub slopes_rad_per_s: Vec<f64>,
}

impl Default for DriftSweep {
    fn default() -> Self {
        Self {
            slopes_rad_per_s: (0..=10).map(|i| -100.0 + 20.0 * i as f64).collect(),
        }
    }
}

impl DriftSweep {
    pub fn run(&self, base: &BaseConfig, trials: usize, seed: u64) -> Result<SweepReport> {
        nonempty(&self.slopes_rad_per_s, "slopes_rad_per_s")?;
        let points = self
            .slopes_rad_per_s
            .iter()
            .map(|&slope| {
                let mut spec = base.trial(&[Method::Pncc, Method::Tsdev], seed)?;
                spec.noise.push(NoiseEntry::common(NoiseSpec::LinearDrift {
                    slope_rad_per_s: slope,
                }));
                Ok((slope, spec))
            })
            .collect::<Result<Vec<_>>>()?;
        run_points("fig3a_drift", "slope_rad_per_s", &points, trials)
    }
}

/// Common low-frequency sinusoid of varying frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowfreqSweep {
    pub freqs_hz: Vec<f64>,
    pub amplitude_rad: f64,
}

impl Default for LowfreqSweep {
    fn default() -> Self {
        Self {
            freqs_hz: vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5],
            amplitude_rad: 50.0,
        }
    }
}

impl LowfreqSweep {
    pub fn run(&self, base: &BaseConfig, trials: usize, seed: u64) -> Result<SweepReport> {
        nonempty(&self.freqs_hz, "freqs_hz")?;
        if let Some(f) = self.freqs_hz.iter().find(|&&f| f >= base.signal_freq_hz) {
            return Err(Error::Config(format!(
                "freqs_hz: {f} Hz is not below the signal frequency"
            )));
        }
        let points = self
            .freqs_hz
            .iter()
            .map(|&freq_hz| {
                let mut spec = base.trial(&[Method::Pncc, Method::Tsdev], seed)?;
                spec.noise.push(NoiseEntry::common(NoiseSpec::LowfreqSine {
                    freq_hz,
                    amplitude_rad: self.amplitude_rad,
                    phase_rad: 0.0,
                }));
                Ok((freq_hz, spec))
            })
            .collect::<Result<Vec<_>>>()?;
        run_points("fig3b_lowfreq", "freq_hz", &points, trials)
    }
}

/// Wideband common noise, with and without compensation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommonNoiseExperiment {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
    pub power_rad2: f64,
}

impl Default for CommonNoiseExperiment {
    fn default() -> Self {
        Self {
            center_hz: 40.0,
            bandwidth_hz: 20.0,
            power_rad2: 0.005,
        }
    }
}

impl CommonNoiseExperiment {
    pub fn spec(&self, base: &BaseConfig, seed: u64) -> Result<TrialSpec> {
        let mut spec = base.trial(&[Method::Pncc, Method::Tsdev, Method::TsdevComp], seed)?;
        spec.noise.push(NoiseEntry::common(NoiseSpec::Bandlimited {
            center_hz: self.center_hz,
            bandwidth_hz: self.bandwidth_hz,
            power_rad2: self.power_rad2,
        }));
        Ok(spec)
    }

    pub fn run(&self, base: &BaseConfig, trials: usize, seed: u64) -> Result<SweepReport> {
        if trials < 50 {
            return Err(Error::param("trials", format!("{trials} must be >= 50")));
        }
        let points = [(self.power_rad2, self.spec(base, seed)?)];
        run_points("fig4_commonnoise", "common_power_rad2", &points, trials)
    }
}

pub fn run_snr_sweep(snr_db_values: &[f64], trials: usize, seed: u64) -> Result<SweepReport> {
    SnrSweep {
        snr_db_values: snr_db_values.to_vec(),
    }
    .run(&BaseConfig::default(), trials, seed)
}

pub fn run_window_sweep(tw_values_s: &[f64], trials: usize, seed: u64) -> Result<SweepReport> {
    if tw_values_s.is_empty() {
        return Err(Error::Config("tw_values_s: sweep list is empty".into()));
    }
    WindowSweep {
        tw_values_s: tw_values_s.to_vec(),
    }
    .run(&BaseConfig::default(), trials, seed)
}

pub fn run_drift_sweep(slopes_rad_per_s: &[f64], trials: usize, seed: u64) -> Result<SweepReport> {
    DriftSweep {
        slopes_rad_per_s: slopes_rad_per_s.to_vec(),
    }
    .run(&BaseConfig::default(), trials, seed)
}

pub fn run_lowfreq_sweep(freqs_hz: &[f64], trials: usize, seed: u64) -> Result<SweepReport> {
    LowfreqSweep {
        freqs_hz: freqs_hz.to_vec(),
        ..LowfreqSweep::default()
    }
    .run(&BaseConfig::default(), trials, seed)
}

pub fn run_commonnoise_experiment(trials: usize, seed: u64) -> Result<SweepReport> {
    CommonNoiseExperiment::default().run(&BaseConfig::default(), trials, seed)
}
