//! Bias of PNCC and TSDEV under common linear drift and a common slow sine.
//!
//! `cargo run --release --example drift_and_lowfreq`

use tde::estimators::Method;
use tde::experiments::{run_drift_sweep, run_lowfreq_sweep, SweepReport};

fn print(report: &SweepReport, unit: &str) {
    println!(
        "{:>10} {:>14} {:>14}",
        unit, "mean PNCC (us)", "mean TSDEV (us)"
    );
    for (p, v) in report.param_values.iter().enumerate() {
        let mean = |m| report.stats(m, p).unwrap().0 * 1e6;
        println!(
            "{v:>10} {:>14.2} {:>14.2}",
            mean(Method::Pncc),
            mean(Method::Tsdev)
        );
    }
}

fn main() -> tde::Result<()> {
    print(
        &run_drift_sweep(&[-100.0, -50.0, 0.0, 50.0, 100.0], 40, 3)?,
        "rad/s",
    );
    println!();
    print(&run_lowfreq_sweep(&[0.01, 0.1, 0.3, 0.5], 40, 4)?, "Hz");
    Ok(())
}
