//! Dominant-frequency estimate for uniformly sampled real signals.

use std::f64::consts::PI;

/// |Σ_k w_k x_k e^{−2πi f t_k}| for a continuous frequency f.
fn dft_magnitude(x: &[f64], dt: f64, f: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (k, v) in x.iter().enumerate() {
        let phase = -2.0 * PI * f * dt * k as f64;
        re += v * phase.cos();
        im += v * phase.sin();
    }
    re.hypot(im)
}

/// Frequency (cycles per unit of `dt`) of the strongest oscillation in `x`.
///
/// The mean is removed and a Hann window applied, the coarse DFT peak is
/// located on the natural bin grid, and the peak is then refined by a
/// golden-section search on the continuous DFT magnitude. Returns 0 for a
/// constant signal or fewer than four samples.
pub fn dominant_frequency(x: &[f64], dt: f64) -> f64 {
    let n = x.len();
    if n < 4 {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let last = (n - 1) as f64;
    let w: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(k, v)| (v - mean) * (0.5 - 0.5 * (2.0 * PI * k as f64 / last).cos()))
        .collect();
    if w.iter().all(|v| v.abs() < 1e-14) {
        return 0.0;
    }

    let df = 1.0 / (n as f64 * dt);
    // bin 1 sits inside the window's DC lobe, so start at 2
    let (best, _) = (2..=n / 2)
        .map(|b| (b, dft_magnitude(&w, dt, b as f64 * df)))
        .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });

    let (mut a, mut b) = ((best as f64 - 1.0) * df, (best as f64 + 1.0) * df);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (dft_magnitude(&w, dt, c), dft_magnitude(&w, dt, d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = dft_magnitude(&w, dt, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = dft_magnitude(&w, dt, d);
        }
    }
    0.5 * (a + b)
}
