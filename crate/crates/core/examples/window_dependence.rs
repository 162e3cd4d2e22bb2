//! Estimator spread against window length in units of the signal period.
//!
//! CC is only well behaved when the window spans a whole number of half
//! periods; PNCC and TSDEV do not care.
//!
//! `cargo run --release --example window_dependence`

use tde::estimators::Method;
use tde::experiments::run_window_sweep;

fn main() -> tde::Result<()> {
    let period = 0.05;
    let tws: Vec<f64> = (0..=8).map(|q| (4.0 + q as f64 / 8.0) * period).collect();
    let report = run_window_sweep(&tws, 50, 3)?;
    println!(
        "{:>8} {:>11} {:>11} {:>11}",
        "tw/T", "std CC", "std PNCC", "std TSDEV"
    );
    for (p, tw) in report.param_values.iter().enumerate() {
        let std = |m| report.stats(m, p).unwrap().1;
        println!(
            "{:>8.3} {:>11.3e} {:>11.3e} {:>11.3e}",
            tw / period,
            std(Method::Cc),
            std(Method::Pncc),
            std(Method::Tsdev)
        );
    }
    Ok(())
}
