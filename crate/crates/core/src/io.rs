//! Two-channel signal files and shift-curve export.
//!
//! Signal files come in two flavours:
//!
//! * CSV with header `time_s,ch1_rad,ch2_rad`, one row per sample.
//! * Binary: a 24-byte header followed by interleaved little-endian `f64`
//!   pairs `(ch1, ch2)`.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "TDE1"
//!      4     4  reserved, zero
//!      8     8  sample rate, f64 LE
//!     16     8  sample count, u64 LE
//!     24  16*n  samples
//! ```
//!
//! The binary form carries no start time; it reads back starting at t = 0.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{Method, ShiftCurve};
use crate::signal::{SampledSignal, Window};

pub const MAGIC: &[u8; 4] = b"TDE1";
pub const HEADER_LEN: usize = 24;

/// Two channels recorded on one grid and span.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoChannel {
    pub ch1: SampledSignal,
    pub ch2: SampledSignal,
}

impl TwoChannel {
    pub fn new(ch1: SampledSignal, ch2: SampledSignal) -> Result<Self> {
        ch1.check_same_span(&ch2)?;
        Ok(Self { ch1, ch2 })
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.ch1.sample_rate_hz()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalFormat {
    Csv,
    Binary,
}

impl SignalFormat {
    /// `.csv` selects CSV, anything else the binary layout.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => SignalFormat::Csv,
            _ => SignalFormat::Binary,
        }
    }
}

pub fn write_two_channel(path: &Path, data: &TwoChannel, format: SignalFormat) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        SignalFormat::Csv => write_csv(&mut w, data)?,
        SignalFormat::Binary => write_binary(&mut w, data)?,
    }
    w.flush()?;
    Ok(())
}

/// Reads either format; binary files are recognized by their magic bytes.
pub fn read_two_channel(path: &Path) -> Result<TwoChannel> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.starts_with(MAGIC) {
        read_binary(&bytes)
    } else {
        read_csv(bytes.as_slice())
    }
}

pub fn write_csv<W: Write>(w: W, data: &TwoChannel) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time_s", "ch1_rad", "ch2_rad"])?;
    for (i, (a, b)) in data
        .ch1
        .samples()
        .iter()
        .zip(data.ch2.samples())
        .enumerate()
    {
        out.write_record([
            data.ch1.time_at(i).to_string(),
            a.to_string(),
            b.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<TwoChannel> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["time_s", "ch1_rad", "ch2_rad"] {
        return Err(Error::Format(format!(
            "expected header time_s,ch1_rad,ch2_rad, found {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut t, mut c1, mut c2) = (Vec::new(), Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::Format(format!("row {}: bad value in column {}", line + 2, k + 1))
                })
        };
        t.push(parse(0)?);
        c1.push(parse(1)?);
        c2.push(parse(2)?);
    }
    if t.len() < 2 {
        return Err(Error::Format(
            "need at least two samples to infer the sample rate".into(),
        ));
    }
    let span = t[t.len() - 1] - t[0];
    if !(span > 0.0) {
        return Err(Error::Format("time column must increase".into()));
    }
    let mut fs = (t.len() - 1) as f64 / span;
    // decimal time stamps lose a few ulps; integer rates are restored exactly
    if (fs - fs.round()).abs() < 1e-6 * fs {
        fs = fs.round();
    }
    for (i, &ti) in t.iter().enumerate() {
        let expected = t[0] + i as f64 / fs;
        if ((ti - expected) * fs).abs() > 1e-3 {
            return Err(Error::Format(format!(
                "row {}: time {ti} is off the uniform grid",
                i + 2
            )));
        }
    }
    TwoChannel::new(
        SampledSignal::new(c1, fs, t[0])?,
        SampledSignal::new(c2, fs, t[0])?,
    )
}

pub fn write_binary<W: Write>(mut w: W, data: &TwoChannel) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[0u8; 4])?;
    w.write_all(&data.sample_rate_hz().to_le_bytes())?;
    w.write_all(&(data.ch1.len() as u64).to_le_bytes())?;
    for (a, b) in data.ch1.samples().iter().zip(data.ch2.samples()) {
        w.write_all(&a.to_le_bytes())?;
        w.write_all(&b.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary(bytes: &[u8]) -> Result<TwoChannel> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing TDE1 header".into()));
    }
    let f64_at = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
    let fs = f64_at(8);
    let count = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let expected = count
        .checked_mul(16)
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format("sample count overflows".into()))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "header announces {count} samples ({expected} bytes) but file has {} bytes",
            bytes.len()
        )));
    }
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(Error::Format(format!("invalid sample rate {fs}")));
    }
    let (mut c1, mut c2) = (Vec::with_capacity(count), Vec::with_capacity(count));
    for i in 0..count {
        let off = HEADER_LEN + 16 * i;
        c1.push(f64_at(off));
        c2.push(f64_at(off + 8));
    }
    TwoChannel::new(
        SampledSignal::new(c1, fs, 0.0)?,
        SampledSignal::new(c2, fs, 0.0)?,
    )
}

/// JSON sidecar written next to an exported curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSidecar {
    pub method: Method,
    pub fs: f64,
    pub window: Option<Window>,
    pub tau_range: Option<(f64, f64)>,
}

impl CurveSidecar {
    pub fn of(curve: &ShiftCurve) -> Self {
        Self {
            method: curve.method(),
            fs: curve.sample_rate_hz(),
            window: curve.window().copied(),
            tau_range: curve.tau_range_s(),
        }
    }
}

pub fn write_curve_csv<W: Write>(w: W, curve: &ShiftCurve) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["tau_s", "value"])?;
    for (t, v) in curve.taus_s().iter().zip(curve.values()) {
        out.write_record([t.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `path` as CSV and `path` with a `.json` extension as the sidecar.
pub fn export_curve(path: &Path, curve: &ShiftCurve) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_curve_csv(&mut w, curve)?;
    w.flush()?;
    let sidecar = path.with_extension("json");
    serde_json::to_writer_pretty(File::create(sidecar)?, &CurveSidecar::of(curve))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(a: Vec<f64>, b: Vec<f64>, fs: f64, start_index: i64) -> TwoChannel {
        TwoChannel::new(
            SampledSignal::on_grid(a, fs, start_index).unwrap(),
            SampledSignal::on_grid(b, fs, start_index).unwrap(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            values in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..200),
            fs in prop::sample::select(vec![1e3, 44.1e3, 1e5, 1e6]),
            start in -1000i64..1000,
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
            let data = pair(a, b, fs, start);
            let mut buf = Vec::new();
            write_csv(&mut buf, &data).unwrap();
            let back = read_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.ch1.samples(), data.ch1.samples());
            prop_assert_eq!(back.ch2.samples(), data.ch2.samples());
            prop_assert_eq!(back.sample_rate_hz(), fs);
            prop_assert_eq!(back.ch1.start_index(), start);
        }

        #[test]
        fn binary_round_trip(
            values in prop::collection::vec((any::<f64>().prop_filter("finite", |v| v.is_finite()), -1.0f64..1.0), 0..100),
            fs in 1.0f64..1e7,
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
            let data = pair(a, b, fs, 0);
            let mut buf = Vec::new();
            write_binary(&mut buf, &data).unwrap();
            prop_assert_eq!(buf.len(), HEADER_LEN + 16 * data.ch1.len());
            prop_assert_eq!(read_binary(&buf).unwrap(), data);
        }
    }

    #[test]
    fn binary_header_layout() {
        let data = pair(vec![1.0], vec![-2.0], 100e3, 0);
        let mut buf = Vec::new();
        write_binary(&mut buf, &data).unwrap();
        assert_eq!(&buf[..4], b"TDE1");
        assert_eq!(&buf[4..8], &[0, 0, 0, 0]);
        assert_eq!(f64::from_le_bytes(buf[8..16].try_into().unwrap()), 100e3);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 1);
        assert_eq!(f64::from_le_bytes(buf[24..32].try_into().unwrap()), 1.0);
        assert_eq!(f64::from_le_bytes(buf[32..40].try_into().unwrap()), -2.0);
    }

    #[test]
    fn truncated_binary_is_rejected() {
        let data = pair(vec![1.0, 2.0], vec![3.0, 4.0], 1e3, 0);
        let mut buf = Vec::new();
        write_binary(&mut buf, &data).unwrap();
        buf.pop();
        assert!(matches!(read_binary(&buf), Err(Error::Format(_))));
    }

    #[test]
    fn csv_with_wrong_header_is_rejected() {
        let text = "t,a,b\n0,1,2\n0.1,1,2\n";
        assert!(matches!(read_csv(text.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn csv_with_irregular_time_is_rejected() {
        let text = "time_s,ch1_rad,ch2_rad\n0,1,2\n0.1,1,2\n0.25,1,2\n";
        assert!(matches!(read_csv(text.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn curve_export_writes_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        let curve = ShiftCurve::new(Method::Tsdev, 1e3, -1, vec![0.5, 0.0, 0.5])
            .unwrap()
            .with_window(Window::new(0.0, 0.1).unwrap());
        export_curve(&path, &curve).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "tau_s,value\n-0.001,0.5\n0,0\n0.001,0.5\n");
        let side: CurveSidecar =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("curve.json")).unwrap())
                .unwrap();
        assert_eq!(side.method, Method::Tsdev);
        assert_eq!(side.fs, 1e3);
        assert_eq!(side.tau_range, Some((-0.001, 0.001)));
    }
}
