//! Writing a channel pair as CSV and binary, reading it back and exporting
//! the TSDEV curve next to it.
//!
//! `cargo run --example signal_files [dir]`

use std::path::PathBuf;

use tde::estimators::{estimate_delay, tsdev_curve, EstimatorInput};
use tde::io::{export_curve, read_two_channel, write_two_channel, SignalFormat, TwoChannel};
use tde::signal::{delayed, sine_on_grid, Window};

fn main() -> tde::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let fs = 50e3;
    let s = sine_on_grid(37.0, 1.0, 0.0, fs, 0, 20_100)?;
    let x2 = delayed(&s, -6.0 / fs)?.slice_grid(0, 20_000)?;
    let pair = TwoChannel::new(s.slice_grid(0, 20_000)?, x2)?;

    for (name, format) in [
        ("pair.csv", SignalFormat::Csv),
        ("pair.bin", SignalFormat::Binary),
    ] {
        let path = dir.join(name);
        write_two_channel(&path, &pair, format)?;
        let back = read_two_channel(&path)?;
        let len = back.ch1.len();
        let input =
            EstimatorInput::new(back.ch1, back.ch2, Window::new(0.01, 0.3)?, (-2e-4, 2e-4))?;
        let curve = tsdev_curve(&input)?;
        let est = estimate_delay(&curve)?;
        let curve_path = dir.join(format!("{name}.curve.csv"));
        export_curve(&curve_path, &curve)?;
        println!(
            "{}: {} samples at {} Hz, delay {:.1} us, curve in {}",
            path.display(),
            len,
            fs,
            est.tau_s * 1e6,
            curve_path.display()
        );
    }
    Ok(())
}
