//! Common band-limited noise biases the delay; a quiet-window TSDEV curve
//! subtracted from the signal-window curve removes most of it.
//!
//! `cargo run --release --example common_noise`

use std::path::PathBuf;

use tde::estimators::Method;
use tde::experiments::run_commonnoise_experiment;

fn main() -> tde::Result<()> {
    let report = run_commonnoise_experiment(60, 5)?;
    println!("true delay {:.1} us", report.tau0_s * 1e6);
    for m in [Method::Pncc, Method::Tsdev, Method::TsdevComp] {
        let (mean, std) = report.stats(m, 0).unwrap();
        println!(
            "{:>11}: mean estimate {:7.2} us, std {:6.2} us",
            m.as_str(),
            (report.tau0_s + mean) * 1e6,
            std * 1e6
        );
    }
    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        let (csv, json) = report.write_to_dir(&dir)?;
        println!("wrote {} and {}", csv.display(), json.display());
    }
    Ok(())
}
