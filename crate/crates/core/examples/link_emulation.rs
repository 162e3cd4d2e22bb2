//! Monte Carlo emulation of a long fiber link with drift, slow wander and
//! band-limited environmental noise common to both channels.
//!
//! `cargo run --release --example link_emulation [trials]`

use tde::localization::Emulation;

fn main() -> tde::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(30);
    let emu = Emulation::default();
    let report = emu.run(trials, 11)?;
    println!(
        "{} m link, event at {} m, {} trials",
        emu.link.length_m, report.true_position_m, report.trials
    );
    for s in &report.methods {
        println!(
            "{:>11}: mean {:9.1} m  error {:+8.1} m  std {:7.1} m",
            s.method.as_str(),
            s.mean_position_m,
            s.mean_error_m,
            s.std_position_m
        );
    }
    Ok(())
}
