//! Fourier transforms on the periodic strip.
//!
//! Coefficients follow `f(s) = sum_k c_k exp(i xi_k s)` with `xi_k = 2 pi k / L`
//! and are stored for `k = -kmax..=kmax` (slot `k + kmax`).

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

/// Forward transform of `n` equispaced samples on `[0, L)`, truncated to
/// `|k| <= kmax`. The Nyquist mode (when `n` is even) is discarded.
pub fn coeffs_from_samples(samples: &[C64], kmax: usize) -> Vec<C64> {
    let n = samples.len();
    assert!(
        n > 2 * kmax,
        "grid of {n} points cannot resolve kmax = {kmax}"
    );
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    (0..2 * kmax + 1)
        .map(|slot| {
            let k = slot as isize - kmax as isize;
            buf[k.rem_euclid(n as isize) as usize] * scale
        })
        .collect()
}

/// Same as [`coeffs_from_samples`] for real samples.
pub fn coeffs_from_real(samples: &[f64], kmax: usize) -> Vec<C64> {
    let c: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
    coeffs_from_samples(&c, kmax)
}

/// Evaluate a truncated series on `n` equispaced points of `[0, L)`.
pub fn samples_from_coeffs(coeffs: &[C64], n: usize) -> Vec<C64> {
    let kmax = (coeffs.len() - 1) / 2;
    assert!(n > 2 * kmax, "grid of {n} points cannot hold kmax = {kmax}");
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for (slot, c) in coeffs.iter().enumerate() {
        let k = slot as isize - kmax as isize;
        buf[k.rem_euclid(n as isize) as usize] += *c;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Real part of [`samples_from_coeffs`].
pub fn real_samples_from_coeffs(coeffs: &[C64], n: usize) -> Vec<f64> {
    samples_from_coeffs(coeffs, n)
        .into_iter()
        .map(|z| z.re)
        .collect()
}

/// Multiply coefficients by `(i xi_k)^order`.
pub fn differentiate(coeffs: &[C64], length: f64, order: u32) -> Vec<C64> {
    let kmax = (coeffs.len() - 1) / 2;
    coeffs
        .iter()
        .enumerate()
        .map(|(slot, c)| {
            let k = slot as isize - kmax as isize;
            let ik = C64::new(0.0, 2.0 * std::f64::consts::PI * k as f64 / length);
            c * ik.powu(order)
        })
        .collect()
}

/// Zero-pad or truncate a coefficient vector to a new `kmax`.
pub fn resize(coeffs: &[C64], kmax_new: usize) -> Vec<C64> {
    let kmax = (coeffs.len() - 1) / 2;
    let mut out = vec![C64::new(0.0, 0.0); 2 * kmax_new + 1];
    for (slot, c) in coeffs.iter().enumerate() {
        let k = slot as isize - kmax as isize;
        if k.unsigned_abs() <= kmax_new {
            out[(k + kmax_new as isize) as usize] = *c;
        }
    }
    out
}

/// Zero the modes with `|k| > frac * kmax` (two-thirds rule with `frac = 2/3`).
pub fn dealias(coeffs: &mut [C64], frac: f64) {
    let kmax = (coeffs.len() - 1) / 2;
    let cut = (frac * kmax as f64).floor() as isize;
    for (slot, c) in coeffs.iter_mut().enumerate() {
        let k = slot as isize - kmax as isize;
        if k.abs() > cut {
            *c = C64::new(0.0, 0.0);
        }
    }
}

/// Evaluate the series at an arbitrary point.
pub fn eval_at(coeffs: &[C64], length: f64, s: f64) -> C64 {
    let kmax = (coeffs.len() - 1) / 2;
    coeffs
        .iter()
        .enumerate()
        .map(|(slot, c)| {
            let k = slot as f64 - kmax as f64;
            c * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k * s / length)
        })
        .sum()
}

/// Impose `c_{-k} = conj(c_k)` by averaging the pair.
pub fn symmetrize(coeffs: &mut [C64]) {
    let n = coeffs.len();
    let kmax = (n - 1) / 2;
    coeffs[kmax].im = 0.0;
    for k in 1..=kmax {
        let a = coeffs[kmax + k];
        let b = coeffs[kmax - k];
        let m = 0.5 * (a + b.conj());
        coeffs[kmax + k] = m;
        coeffs[kmax - k] = m.conj();
    }
}

/// Equispaced sample points on `[0, L)`.
pub fn grid_points(n: usize, length: f64) -> Vec<f64> {
    (0..n).map(|j| length * j as f64 / n as f64).collect()
}
