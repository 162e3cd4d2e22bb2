//! `O(N log N + M)` evaluation of the shift curves.
//!
//! TSDEV expands into window power, shifted power, cross term and squared mean
//! difference:
//!
//! ```text
//! TSDEV^2(k) = P1 + P2(k) - 2 R(k) - C(k)^2,   C(k) = mean(x1) - mean(x2 shifted by k)
//! ```
//!
//! `R(k)` for every shift comes out of one FFT cross-correlation; `P2(k)` and
//! the shifted mean come from prefix sums over `x2`. Both channels are
//! centered first. TSDEV is invariant to constant offsets and centering keeps
//! the cancellation in the expansion small when the data carry large drifts.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{compensate, Aligned, EstimatorInput, Method, ShiftCurve};
use crate::error::{Error, Result};

/// Per-shift sums over the centered data.
struct SlidingStats {
    mean_a: f64,
    mean_b: f64,
    /// Centered window power and mean of `x1` (the mean is ~0 after centering).
    power_a: f64,
    avg_a: f64,
    /// `(1/N) sum a'[i] b'[i + j]`
    cross: Vec<f64>,
    /// `(1/N) sum b'[i + j]^2` and `(1/N) sum b'[i + j]`
    power_b: Vec<f64>,
    avg_b: Vec<f64>,
}

impl SlidingStats {
    fn compute(al: &Aligned<'_>) -> Self {
        let n = al.n();
        let nf = n as f64;
        let mean_a = al.a.iter().sum::<f64>() / nf;
        let mean_b = al.b.iter().sum::<f64>() / al.b.len() as f64;
        let a: Vec<f64> = al.a.iter().map(|v| v - mean_a).collect();
        let b: Vec<f64> = al.b.iter().map(|v| v - mean_b).collect();

        let cross = correlate(&a, &b, al.shifts)
            .into_iter()
            .map(|v| v / nf)
            .collect();

        let mut sum = Vec::with_capacity(b.len() + 1);
        let mut sum_sq = Vec::with_capacity(b.len() + 1);
        sum.push(0.0);
        sum_sq.push(0.0);
        let (mut s, mut s2) = (0.0, 0.0);
        for v in &b {
            s += v;
            s2 += v * v;
            sum.push(s);
            sum_sq.push(s2);
        }
        let power_b = (0..al.shifts)
            .map(|j| (sum_sq[j + n] - sum_sq[j]) / nf)
            .collect();
        let avg_b = (0..al.shifts).map(|j| (sum[j + n] - sum[j]) / nf).collect();

        Self {
            mean_a,
            mean_b,
            power_a: a.iter().map(|v| v * v).sum::<f64>() / nf,
            avg_a: a.iter().sum::<f64>() / nf,
            cross,
            power_b,
            avg_b,
        }
    }

    fn tsdev(&self, j: usize) -> f64 {
        let c = self.avg_a - self.avg_b[j];
        (self.power_a + self.power_b[j] - 2.0 * self.cross[j] - c * c).max(0.0)
    }

    /// Uncentered `(1/N) sum x1 x2`.
    fn raw_cross(&self, j: usize) -> f64 {
        self.cross[j]
            + self.mean_a * self.avg_b[j]
            + self.mean_b * self.avg_a
            + self.mean_a * self.mean_b
    }

    fn raw_power_a(&self) -> f64 {
        self.power_a + 2.0 * self.mean_a * self.avg_a + self.mean_a * self.mean_a
    }

    fn raw_power_b(&self, j: usize) -> f64 {
        (self.power_b[j] + 2.0 * self.mean_b * self.avg_b[j] + self.mean_b * self.mean_b).max(0.0)
    }
}

/// `out[j] = sum_i a[i] * b[i + j]` for `j < shifts`, with `b.len() == a.len() + shifts - 1`.
///
/// `a` is cut into blocks sized to the number of shifts; each block and its
/// stretch of `b` share one complex FFT as real and imaginary parts.
pub(crate) fn correlate(a: &[f64], b: &[f64], shifts: usize) -> Vec<f64> {
    let size = (4 * shifts).next_power_of_two().max(64);
    let block = size + 1 - shifts;
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let mut scratch = vec![
        Complex::new(0.0, 0.0);
        forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len())
    ];
    let mut z = vec![Complex::new(0.0, 0.0); size];
    let mut prod = vec![Complex::new(0.0, 0.0); size];
    let mut out = vec![0.0; shifts];
    let scale = 1.0 / size as f64;

    for start in (0..a.len()).step_by(block) {
        let a_blk = &a[start..(start + block).min(a.len())];
        let b_blk = &b[start..(start + a_blk.len() + shifts - 1).min(b.len())];
        for (i, c) in z.iter_mut().enumerate() {
            let re = a_blk.get(i).copied().unwrap_or(0.0);
            let im = b_blk.get(i).copied().unwrap_or(0.0);
            *c = Complex::new(re, im);
        }
        forward.process_with_scratch(&mut z, &mut scratch);
        // unpack the two real spectra and form conj(A) * B
        for k in 0..size {
            let zk = z[k];
            let zm = z[(size - k) % size].conj();
            let fa = (zk + zm) * 0.5;
            let fb = (zk - zm) * Complex::new(0.0, -0.5);
            prod[k] = fa.conj() * fb;
        }
        inverse.process_with_scratch(&mut prod, &mut scratch);
        for (o, c) in out.iter_mut().zip(&prod) {
            *o += c.re * scale;
        }
    }
    out
}

/// Same values as [`super::tsdev_curve`] within floating-point rounding.
pub fn tsdev_curve_fast(input: &EstimatorInput) -> Result<ShiftCurve> {
    let al = input.aligned()?;
    let st = SlidingStats::compute(&al);
    let values = (0..al.shifts).map(|j| st.tsdev(j)).collect();
    Ok(al.curve(Method::Tsdev, values))
}

pub fn cc_curve_fast(input: &EstimatorInput) -> Result<ShiftCurve> {
    let al = input.aligned()?;
    let st = SlidingStats::compute(&al);
    let values = (0..al.shifts).map(|j| st.raw_cross(j)).collect();
    Ok(al.curve(Method::Cc, values))
}

pub fn pncc_curve_fast(input: &EstimatorInput) -> Result<ShiftCurve> {
    let al = input.aligned()?;
    let st = SlidingStats::compute(&al);
    let p1 = st.raw_power_a();
    let mut values = Vec::with_capacity(al.shifts);
    for j in 0..al.shifts {
        let p2 = st.raw_power_b(j);
        // exact zero power is detected on the data, not on rounded sums
        if p1 == 0.0 || p2 == 0.0 || al.segment(j).iter().all(|&v| v == 0.0) {
            return Err(Error::DegeneratePower {
                tau_s: al.tau_at(j),
            });
        }
        values.push((st.raw_cross(j) / (p1 * p2).sqrt()).clamp(-1.0, 1.0));
    }
    Ok(al.curve(Method::Pncc, values))
}

pub fn compensated_tsdev_curve_fast(
    input: &EstimatorInput,
    noise_input: &EstimatorInput,
) -> Result<ShiftCurve> {
    let signal = tsdev_curve_fast(input)?;
    let noise = tsdev_curve_fast(noise_input)?;
    compensate(signal, &noise, input, noise_input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{cc_curve, pncc_curve, tsdev_curve};
    use crate::signal::{gen_noise, NoiseSpec, RngSeed, SampledSignal, Window};

    fn pair(len: usize, seed: u64) -> (SampledSignal, SampledSignal) {
        let spec = NoiseSpec::White { snr_db: 0.0 };
        let d = len as f64 / 1e4;
        (
            gen_noise(&spec, d, 1e4, RngSeed(seed)).unwrap(),
            gen_noise(&spec, d, 1e4, RngSeed(seed + 1000)).unwrap(),
        )
    }

    #[test]
    fn correlate_matches_direct_sum() {
        let a = [1.0, -2.0, 0.5];
        let b = [0.3, 1.0, 2.0, -1.0, 4.0];
        let out = correlate(&a, &b, 3);
        for (j, v) in out.iter().enumerate() {
            let direct: f64 = (0..3).map(|i| a[i] * b[i + j]).sum();
            assert!((v - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_curves_match_direct() {
        let (x1, x2) = pair(5000, 3);
        let x2 = x2.add(&x1.scaled(0.5)).unwrap();
        let x2 = SampledSignal::new(
            x2.samples().iter().map(|v| v + 3.0).collect(),
            x2.sample_rate_hz(),
            x2.start_time_s(),
        )
        .unwrap();
        let inp =
            EstimatorInput::new(x1, x2, Window::new(0.05, 0.3).unwrap(), (-0.01, 0.012)).unwrap();
        let pairs = [
            (cc_curve(&inp).unwrap(), cc_curve_fast(&inp).unwrap()),
            (pncc_curve(&inp).unwrap(), pncc_curve_fast(&inp).unwrap()),
            (tsdev_curve(&inp).unwrap(), tsdev_curve_fast(&inp).unwrap()),
        ];
        for (direct, fast) in &pairs {
            assert_eq!(direct.taus_s(), fast.taus_s());
            for (d, f) in direct.values().iter().zip(fast.values()) {
                assert!((d - f).abs() <= 1e-10 * d.abs().max(1e-3), "{d} vs {f}");
            }
        }
    }

    #[test]
    fn fast_self_tsdev_is_zero() {
        let (x, _) = pair(2000, 4);
        let inp = EstimatorInput::new(
            x.clone(),
            x,
            Window::new(0.05, 0.1).unwrap(),
            (-0.001, 0.001),
        )
        .unwrap();
        let c = tsdev_curve_fast(&inp).unwrap();
        let zero = c.taus_s().iter().position(|&t| t == 0.0).unwrap();
        assert!(c.values()[zero].abs() < 1e-12);
    }
}
