//! Direct and FFT evaluation of the TSDEV curve on a long record.
//!
//! `cargo run --release --example fast_tsdev`

use std::time::Instant;

use tde::estimators::{tsdev_curve, tsdev_curve_fast, EstimatorInput};
use tde::signal::{delayed, gen_noise, NoiseSpec, RngSeed, Window};

fn main() -> tde::Result<()> {
    let fs = 1e6;
    let n = 1 << 17;
    let white = NoiseSpec::White { snr_db: 0.0 };
    let x1 = gen_noise(&white, 0.2, fs, RngSeed(1))?;
    let x2 = delayed(&x1, 37.0 / fs)?;
    let input = EstimatorInput::new(
        x1,
        x2,
        Window::new(1e-3, n as f64 / fs)?,
        (-512.0 / fs, 511.0 / fs),
    )?;

    let t = Instant::now();
    let direct = tsdev_curve(&input)?;
    let t_direct = t.elapsed();
    let t = Instant::now();
    let fast = tsdev_curve_fast(&input)?;
    let t_fast = t.elapsed();

    let worst = direct
        .values()
        .iter()
        .zip(fast.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("N = {n}, {} shifts", direct.len());
    println!("direct {t_direct:.2?}, fast {t_fast:.2?}, max difference {worst:.2e}");
    let min = fast.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let j = fast.values().iter().position(|&v| v == min).unwrap();
    println!("minimum at {:.1} us", fast.taus_s()[j] * 1e6);
    Ok(())
}
