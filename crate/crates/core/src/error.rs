use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sample rate {sample_rate_hz} Hz is below 10x the signal frequency {freq_hz} Hz")]
    SampleRate { freq_hz: f64, sample_rate_hz: f64 },

    #[error("band [{low_hz}, {high_hz}] Hz does not fit inside (0, {nyquist_hz}] Hz")]
    Band {
        low_hz: f64,
        high_hz: f64,
        nyquist_hz: f64,
    },

    #[error("delay {tau_s} s is not on the sample grid; nearest grid delays are {below_s} s and {above_s} s")]
    OffGrid {
        tau_s: f64,
        below_s: f64,
        above_s: f64,
    },

    #[error("signals do not share a sample grid ({detail})")]
    GridMismatch { detail: String },

    #[error("window [{t0_s}, {end_s}) s exceeds the signal span [{span_start_s}, {span_end_s}) s")]
    Bounds {
        t0_s: f64,
        end_s: f64,
        span_start_s: f64,
        span_end_s: f64,
    },

    #[error("x2 does not cover every shifted window: missing {before} samples before and {after} samples after")]
    Coverage { before: usize, after: usize },

    #[error("segment power is zero at shift {tau_s} s")]
    DegeneratePower { tau_s: f64 },

    #[error("SNR is undefined because the {which} power over the window is zero")]
    UndefinedSnr { which: &'static str },

    #[error("window lengths differ by {diff} samples (signal {signal}, noise {noise})")]
    WindowMismatch {
        signal: usize,
        noise: usize,
        diff: usize,
    },

    #[error("position {position_m} m lies outside the link [0, {length_m}] m")]
    OutOfLink {
        position_m: f64,
        length_m: f64,
        tau_s: Option<f64>,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("malformed signal file: {0}")]
    Format(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
