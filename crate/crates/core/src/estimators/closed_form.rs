//! Closed forms for a unit sine `sin(w t)` intercepted on `[t0, t0 + tw]` and
//! compared with its copy delayed by `tau0`.

/// Continuous cross-correlation of the intercepted sine pair.
///
/// `0.5 cos(w (tau - tau0)) - sin(w tw) / (2 w tw) * cos(2 w t0 + w tw + w (tau - tau0))`
pub fn sine_cc_closed_form(omega: f64, tau0: f64, t0: f64, tw: f64, tau: f64) -> f64 {
    let delta = omega * (tau - tau0);
    let wt = omega * tw;
    0.5 * delta.cos() - (wt.sin() / (2.0 * wt)) * (2.0 * omega * t0 + wt + delta).cos()
}

/// Continuous TSDEV of the intercepted sine pair, written as
/// `A sin^2(d/2) + B sin(d/2) + C^2` with `d = w (tau - tau0)`.
///
/// `C` is the mean difference over the window. The value is zero at
/// `tau = tau0` for every window and reduces to `1 - cos(d)` when `tw` spans
/// whole periods.
pub fn sine_tsdev_closed_form(omega: f64, tau0: f64, t0: f64, tw: f64, tau: f64) -> f64 {
    let lag = tau - tau0;
    let delta = omega * lag;
    let wt = omega * tw;
    let a = (2.0 * wt + (omega * (2.0 * t0 + 2.0 * tw + lag)).sin()
        - (omega * (2.0 * t0 + lag)).sin())
        / wt;
    let c = ((omega * t0).cos() - (omega * (t0 + tw)).cos() + (omega * (t0 + tw) + delta).cos()
        - (omega * t0 + delta).cos())
        / wt;
    let b =
        4.0 * c / wt * ((omega * (t0 + tw + 0.5 * lag)).sin() - (omega * (t0 + 0.5 * lag)).sin());
    let half = (0.5 * delta).sin();
    a * half * half + b * half + c * c
}

/// Average power of `sin(w t)` over `[t0, t0 + tw]`:
/// `1/2 - (sin(2 w (t0 + tw)) - sin(2 w t0)) / (4 w tw)`.
pub fn sine_power_closed_form(omega: f64, t0: f64, tw: f64) -> f64 {
    0.5 - ((2.0 * omega * (t0 + tw)).sin() - (2.0 * omega * t0).sin()) / (4.0 * omega * tw)
}
