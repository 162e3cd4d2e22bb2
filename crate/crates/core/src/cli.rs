//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad flags, config or file contents, 3 I/O
//! failure, 4 estimator failure (coverage, degenerate power, window
//! mismatch), 5 estimated position outside the link.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::estimators::{estimate_delay, Engine, EstimatorInput, Method};
use crate::experiments::{
    BaseConfig, CommonNoiseExperiment, DriftSweep, LowfreqSweep, NoiseEntry, SignalSpec, SnrSweep,
    SweepReport, TrialSpec, WindowSweep,
};
use crate::io::{export_curve, read_two_channel, write_two_channel, SignalFormat, TwoChannel};
use crate::localization::{
    localize, position_to_delay, simulate_dual_channel, Emulation, FiberLink, NoisePlan,
    VibrationEvent, DEFAULT_REFRACTIVE_INDEX, SPEED_OF_LIGHT_M_PER_S,
};
use crate::signal::{noise_on_stream, sine_on_grid, NoiseSpec, RngSeed, SampledSignal, Window};

pub const SEED_ENV: &str = "TDE_SEED";
pub const DEFAULT_TRIALS: usize = 200;

/// Settings for `tde gen`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub signal: SignalSpec,
    pub sample_rate_hz: f64,
    pub tau0_s: f64,
    pub duration_s: f64,
    pub noise: Vec<NoiseEntry>,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            signal: SignalSpec::Sine {
                freq_hz: 20.0,
                amplitude: 1.0,
            },
            sample_rate_hz: 100e3,
            tau0_s: 100e-6,
            duration_s: 0.3,
            noise: NoiseEntry::white_pair(30.0).to_vec(),
        }
    }
}

/// JSON run configuration. Every section is optional; flags override it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub workers: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub base: BaseConfig,
    pub snr: SnrSweep,
    pub window: WindowSweep,
    pub drift: DriftSweep,
    pub lowfreq: LowfreqSweep,
    pub commonnoise: CommonNoiseExperiment,
    pub link: Option<FiberLink>,
    pub emulation: Emulation,
    pub gen: GenConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tde",
    version,
    about = "Time delay estimation and fiber-link localization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep and write `<name>.csv` plus `<name>.json`.
    ///
    /// CSV columns: param, method, trial, error_s (estimate minus true delay,
    /// seconds). The JSON file holds per-point means and standard deviations.
    Sweep(SweepArgs),
    /// Estimate the delay of ch2 relative to ch1 in a two-channel file.
    ///
    /// Prints {method, tau_s, score}. `--curve` writes tau_s,value rows plus a
    /// JSON sidecar next to it.
    Estimate(EstimateArgs),
    /// Locate a vibration from a (cw, ccw) channel file, or run the link
    /// emulation over many trials when no file is given.
    Localize(LocalizeArgs),
    /// Write a synthetic two-channel file (.csv as text, anything else binary).
    ///
    /// CSV columns: time_s, ch1_rad, ch2_rad.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepKind {
    Snr,
    Window,
    Drift,
    Lowfreq,
    Commonnoise,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed; falls back to the config, then to $TDE_SEED, then to 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the trials; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    kind: SweepKind,
    #[command(flatten)]
    common: Common,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Args)]
struct WindowFlags {
    /// Window start (s); defaults to the widest window the shift range allows.
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    /// Window length (s).
    #[arg(long)]
    tw: Option<f64>,
    #[arg(long, value_parser = parse_engine, default_value = "direct")]
    engine: Engine,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    file: PathBuf,
    #[arg(long, value_parser = parse_method, default_value = "tsdev")]
    method: Method,
    #[command(flatten)]
    window: WindowFlags,
    /// Smallest candidate delay (s); defaults to -tau-max.
    #[arg(long, allow_hyphen_values = true)]
    tau_min: Option<f64>,
    /// Largest candidate delay (s); defaults to 5% of the record.
    #[arg(long, allow_hyphen_values = true)]
    tau_max: Option<f64>,
    /// Start of the noise-only window for tsdev-comp (s).
    #[arg(long, allow_hyphen_values = true)]
    comp_t0: Option<f64>,
    /// Write the full shift curve here.
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LinkFlags {
    #[arg(long)]
    length_m: Option<f64>,
    #[arg(long)]
    refractive_index: Option<f64>,
}

#[derive(Debug, Args)]
struct LocalizeArgs {
    /// Two-channel file with ch1 = clockwise, ch2 = counter-clockwise.
    file: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    link: LinkFlags,
    /// Estimator; the emulation runs all of them when omitted.
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[command(flatten)]
    window: WindowFlags,
    /// Start of the noise-only window for tsdev-comp (s).
    #[arg(long, allow_hyphen_values = true)]
    comp_t0: Option<f64>,
    /// Emulation trials.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long)]
    duration_s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau0_s: Option<f64>,
    /// Per-channel white noise; replaces the configured noise list.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Write a (cw, ccw) pair for an event at this position instead.
    #[arg(long)]
    position_m: Option<f64>,
    #[command(flatten)]
    link: LinkFlags,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_engine(s: &str) -> std::result::Result<Engine, String> {
    match s {
        "direct" => Ok(Engine::Direct),
        "fast" => Ok(Engine::Fast),
        _ => Err(format!("unknown engine `{s}` (direct, fast)")),
    }
}

/// Exit status for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 3,
        Error::Coverage { .. }
        | Error::DegeneratePower { .. }
        | Error::WindowMismatch { .. }
        | Error::Bounds { .. } => 4,
        Error::OutOfLink { .. } => 5,
        _ => 2,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::Localize(a) => cmd_localize(a, out),
        Command::Gen(a) => cmd_gen(a, out),
    }
}

struct Resolved {
    config: RunConfig,
    seed: u64,
    pool: Option<rayon::ThreadPool>,
}

impl Resolved {
    fn new(common: &Common) -> Result<Self> {
        let config = match &common.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let seed = match common.seed.or(config.seed) {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| {
                    Error::Config(format!("{SEED_ENV}={v} is not an unsigned integer"))
                })?,
                Err(_) => 0,
            },
        };
        let pool = match common.workers.or(config.workers) {
            Some(0) => return Err(Error::param("workers", "must be >= 1")),
            Some(n) => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Config(e.to_string()))?,
            ),
            None => None,
        };
        Ok(Self { config, seed, pool })
    }

    fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(p) => p.install(f),
            None => f(),
        }
    }

    fn link(&self, flags: &LinkFlags, fallback: FiberLink) -> Result<FiberLink> {
        let base = self.config.link.unwrap_or(fallback);
        let link = FiberLink {
            length_m: flags.length_m.unwrap_or(base.length_m),
            refractive_index: flags.refractive_index.unwrap_or(base.refractive_index),
            ..base
        };
        link.validate()?;
        Ok(link)
    }
}

fn print_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let r = Resolved::new(&a.common)?;
    let c = &r.config;
    let trials = a.trials.or(c.trials).unwrap_or(DEFAULT_TRIALS);
    let dir = a
        .out
        .clone()
        .or_else(|| c.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let report: SweepReport = r.install(|| match a.kind {
        SweepKind::Snr => c.snr.run(&c.base, trials, r.seed),
        SweepKind::Window => c.window.run(&c.base, trials, r.seed),
        SweepKind::Drift => c.drift.run(&c.base, trials, r.seed),
        SweepKind::Lowfreq => c.lowfreq.run(&c.base, trials, r.seed),
        SweepKind::Commonnoise => c.commonnoise.run(&c.base, trials, r.seed),
    })?;
    let (csv_path, json_path) = report.write_to_dir(&dir)?;
    print_json(
        out,
        &json!({
            "name": report.name,
            "csv": csv_path,
            "summary": json_path,
            "points": report.param_values.len(),
            "trials": report.trials,
            "seed": report.seed,
        }),
    )
}

/// Widest window on `data` whose shifted copies stay inside the record.
fn default_window(data: &TwoChannel, range: (f64, f64), flags: &WindowFlags) -> Result<Window> {
    let s = &data.ch1;
    let before = (-range.0).max(0.0);
    let after = range.1.max(0.0);
    let t0 = flags.t0.unwrap_or(s.start_time_s() + before);
    let tw = match flags.tw {
        Some(tw) => tw,
        None => {
            let fs = s.sample_rate_hz();
            let end = s.end_index() - (after * fs + 1e-6).floor() as i64;
            (end - (t0 * fs).round() as i64) as f64 / fs
        }
    };
    Window::new(t0, tw)
}

fn cmd_estimate(a: EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let data = read_two_channel(&a.file)?;
    let tau_max = a.tau_max.unwrap_or(data.ch1.duration_s() / 20.0);
    let tau_min = a.tau_min.unwrap_or(-tau_max);
    let range = (tau_min, tau_max);
    let window = default_window(&data, range, &a.window)?;
    let input = EstimatorInput::new(data.ch1.clone(), data.ch2.clone(), window, range)?;
    let noise_input = match a.comp_t0 {
        Some(t0) => Some(EstimatorInput::new(
            data.ch1,
            data.ch2,
            Window::new(t0, window.tw_s)?,
            range,
        )?),
        None => None,
    };
    let curve = a
        .window
        .engine
        .curve(a.method, &input, noise_input.as_ref())?;
    let est = estimate_delay(&curve)?;
    if let Some(path) = &a.curve {
        export_curve(path, &curve)?;
    }
    print_json(
        out,
        &json!({ "method": est.method, "tau_s": est.tau_s, "score": est.score }),
    )
}

fn cmd_localize(a: LocalizeArgs, out: &mut dyn Write) -> Result<()> {
    let r = Resolved::new(&a.common)?;
    match &a.file {
        Some(path) => {
            let fallback = FiberLink {
                length_m: a
                    .link
                    .length_m
                    .ok_or_else(|| Error::param("length_m", "required with a file"))?,
                refractive_index: DEFAULT_REFRACTIVE_INDEX,
                light_speed_m_per_s: SPEED_OF_LIGHT_M_PER_S,
            };
            let link = r.link(&a.link, fallback)?;
            let data = read_two_channel(path)?;
            let fs = data.sample_rate_hz();
            let k = (link.max_delay_s() * fs).floor() / fs;
            let window = default_window(&data, (-k, k), &a.window)?;
            let method = a.method.unwrap_or(Method::Tsdev);
            let comp = a
                .comp_t0
                .map(|t0| Window::new(t0, window.tw_s))
                .transpose()?;
            let loc = localize(
                &data.ch1,
                &data.ch2,
                &link,
                method,
                window,
                comp,
                a.window.engine,
            )?;
            print_json(
                out,
                &json!({
                    "position_m": loc.position_m,
                    "tau_s": loc.estimate.tau_s,
                    "method": method,
                }),
            )
        }
        None => {
            let mut emu = r.config.emulation.clone();
            emu.link = r.link(&a.link, emu.link)?;
            if let Some(m) = a.method {
                emu.methods = vec![m];
            }
            let trials = a.trials.or(r.config.trials).unwrap_or(100);
            let report = r.install(|| emu.run(trials, r.seed))?;
            let methods: Vec<_> = report
                .methods
                .iter()
                .map(|m| {
                    json!({
                        "method": m.method,
                        "mean_position_m": m.mean_position_m,
                        "std_position_m": m.std_position_m,
                        "mean_error_m": m.mean_error_m,
                    })
                })
                .collect();
            print_json(
                out,
                &json!({
                    "true_position_m": report.true_position_m,
                    "trials": report.trials,
                    "seed": report.seed,
                    "methods": methods,
                }),
            )
        }
    }
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<()> {
    let r = Resolved::new(&a.common)?;
    let mut g = r.config.gen.clone();
    if let Some(fs) = a.fs {
        g.sample_rate_hz = fs;
    }
    if let Some(d) = a.duration_s {
        g.duration_s = d;
    }
    if let Some(tau0) = a.tau0_s {
        g.tau0_s = tau0;
    }
    if let Some(snr) = a.snr_db {
        g.noise = NoiseEntry::white_pair(snr).to_vec();
    }
    let format = SignalFormat::from_path(&a.out);

    if let Some(position_m) = a.position_m {
        let fallback = FiberLink {
            length_m: a
                .link
                .length_m
                .ok_or_else(|| Error::param("length_m", "required with --position-m"))?,
            refractive_index: DEFAULT_REFRACTIVE_INDEX,
            light_speed_m_per_s: SPEED_OF_LIGHT_M_PER_S,
        };
        let link = r.link(&a.link, fallback)?;
        position_to_delay(&link, position_m)?;
        let fs = g.sample_rate_hz;
        let spread = (link.max_delay_s() * fs).ceil() as usize + 1;
        let len = (g.duration_s * fs).round() as usize + spread;
        let source = source_signal(&g, len, RngSeed(r.seed))?;
        let power = source.samples().iter().map(|v| v * v).sum::<f64>() / len as f64;
        let white_power_rad2 = match g.noise.iter().find_map(|e| match e.spec {
            NoiseSpec::White { snr_db } => Some(snr_db),
            _ => None,
        }) {
            Some(snr_db) => power / 10f64.powf(snr_db / 10.0),
            None => 0.0,
        };
        let plan = NoisePlan {
            white_power_rad2,
            common: g
                .noise
                .iter()
                .filter(|e| !matches!(e.spec, NoiseSpec::White { .. }))
                .map(|e| e.spec)
                .collect(),
        };
        let event = VibrationEvent {
            position_m,
            signal: source,
        };
        let ch = simulate_dual_channel(&link, &event, &plan, fs, RngSeed(r.seed))?;
        let data = TwoChannel::new(ch.cw.clone(), ch.ccw.clone())?;
        write_two_channel(&a.out, &data, format)?;
        return print_json(
            out,
            &json!({
                "path": a.out,
                "samples": data.ch1.len(),
                "sample_rate_hz": fs,
                "tau0_s": ch.grid_delay_s(),
                "cw_delay_samples": ch.cw_delay_samples,
                "ccw_delay_samples": ch.ccw_delay_samples,
                "cw_residual_s": ch.cw_residual_s,
                "ccw_residual_s": ch.ccw_residual_s,
            }),
        );
    }

    let spec = TrialSpec {
        signal: g.signal,
        sample_rate_hz: g.sample_rate_hz,
        tau0_s: g.tau0_s,
        window: Window::new(0.0, g.duration_s)?,
        t0_span_s: 0.0,
        tau_range_s: (0.0, 0.0),
        noise: g.noise.clone(),
        methods: vec![Method::Tsdev],
        engine: Engine::Direct,
        seed: RngSeed(r.seed),
    };
    let (x1, x2, _, _) = spec.realize(0)?;
    let data = TwoChannel::new(x1, x2)?;
    write_two_channel(&a.out, &data, format)?;
    print_json(
        out,
        &json!({
            "path": a.out,
            "samples": data.ch1.len(),
            "sample_rate_hz": g.sample_rate_hz,
            "tau0_s": g.tau0_s,
        }),
    )
}

fn source_signal(g: &GenConfig, len: usize, seed: RngSeed) -> Result<SampledSignal> {
    match g.signal {
        SignalSpec::Sine { freq_hz, amplitude } => {
            sine_on_grid(freq_hz, amplitude, 0.0, g.sample_rate_hz, 0, len)
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
            g.sample_rate_hz,
            0,
            len,
            seed,
            1,
        ),
    }
}
