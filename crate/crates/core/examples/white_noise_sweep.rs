//! Delay error statistics of CC and TSDEV as the SNR falls.
//!
//! `cargo run --release --example white_noise_sweep`

use tde::estimators::Method;
use tde::experiments::run_snr_sweep;

fn main() -> tde::Result<()> {
    let report = run_snr_sweep(&[40.0, 30.0, 20.0, 10.0, 0.0], 50, 7)?;
    println!(
        "{:>7} {:>12} {:>12} {:>7}",
        "snr_db", "std CC (s)", "std TSDEV (s)", "ratio"
    );
    for (p, snr) in report.param_values.iter().enumerate() {
        let (_, cc) = report.stats(Method::Cc, p).unwrap();
        let (_, ts) = report.stats(Method::Tsdev, p).unwrap();
        println!("{snr:>7} {cc:>12.3e} {ts:>12.3e} {:>7.3}", cc / ts);
    }
    Ok(())
}
