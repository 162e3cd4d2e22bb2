//! Locating a vibration on a fiber loop from the two counter-propagating
//! channels.
//!
//! `cargo run --release --example fiber_localization`

use tde::estimators::{Engine, Method};
use tde::localization::{localize, simulate_dual_channel, FiberLink, NoisePlan, VibrationEvent};
use tde::signal::{gen_noise, NoiseSpec, RngSeed, Window};

fn main() -> tde::Result<()> {
    let fs = 100e3;
    let link = FiberLink::new(40_000.0, 1.468)?;
    let vibration = NoiseSpec::Bandlimited {
        center_hz: 150.0,
        bandwidth_hz: 100.0,
        power_rad2: 1.0,
    };
    let plan = NoisePlan {
        white_power_rad2: 0.01,
        common: vec![NoiseSpec::LinearDrift {
            slope_rad_per_s: 5.0,
        }],
    };
    let k = (link.max_delay_s() * fs).floor() as i64;
    println!(
        "link {} m, {:.2} m per sample of delay",
        link.length_m,
        link.meters_per_sample(fs)
    );

    for (i, position) in [5_000.0, 20_000.0, 31_234.5].into_iter().enumerate() {
        let event = VibrationEvent {
            position_m: position,
            signal: gen_noise(&vibration, 1.2, fs, RngSeed(10 + i as u64))?,
        };
        let ch = simulate_dual_channel(&link, &event, &plan, fs, RngSeed(i as u64))?;
        let window = Window::new((ch.cw.start_index() + k) as f64 / fs, 0.3)?;
        for method in [Method::Cc, Method::Tsdev] {
            let loc = localize(&ch.cw, &ch.ccw, &link, method, window, None, Engine::Fast)?;
            println!(
                "event at {position:9.1} m  {:>5}: {:9.1} m (error {:+7.1} m)",
                method.as_str(),
                loc.position_m,
                loc.position_m - position
            );
        }
    }
    Ok(())
}
