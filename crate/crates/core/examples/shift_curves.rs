//! Delay estimation on a noisy sine pair with each estimator.
//!
//! `cargo run --example shift_curves`

use tde::estimators::{estimate_delay_refined, Engine, EstimatorInput, Method, Refinement};
use tde::signal::{delayed, gen_noise, mix_at_snr, sine_on_grid, NoiseSpec, RngSeed, Window};

fn main() -> tde::Result<()> {
    let fs = 100e3;
    let tau0 = 100e-6;
    let s = sine_on_grid(20.0, 1.0, 0.0, fs, -100, 30_200)?;
    let window = Window::new(0.01, 0.2)?;

    let white = NoiseSpec::White { snr_db: 0.0 };
    let s1 = s.slice_grid(0, 30_000)?;
    let s2 = delayed(&s, tau0)?.slice_grid(0, 30_000)?;
    let x1 = mix_at_snr(&s1, &gen_noise(&white, 0.3, fs, RngSeed(1))?, 30.0, &window)?;
    let x2 = mix_at_snr(&s2, &gen_noise(&white, 0.3, fs, RngSeed(2))?, 30.0, &window)?;

    let input = EstimatorInput::new(x1, x2, window, (-500e-6, 500e-6))?;
    println!("true delay {:.1} us, 30 dB SNR", tau0 * 1e6);
    for method in [Method::Cc, Method::Pncc, Method::Tsdev] {
        let curve = Engine::Direct.curve(method, &input, None)?;
        let est = estimate_delay_refined(&curve, Refinement::Parabolic)?;
        println!(
            "{:>6}: grid {:7.1} us  refined {:7.2} us  score {:.4}",
            method.as_str(),
            est.tau_s * 1e6,
            est.refined_tau_s.unwrap_or(est.tau_s) * 1e6,
            est.score
        );
    }
    Ok(())
}
