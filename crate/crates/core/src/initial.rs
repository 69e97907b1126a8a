//! Reproducible initial data, including random samples from an H¹ ball.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::h1_energy;
use crate::error::SpectralError;
use crate::spectral::SpectralField;

/// Decay exponent of the random H¹ recipe: just rough enough that the data
/// has one derivative in L² and not much more.
pub const ROUGH_EXPONENT: f64 = 1.51;

/// Rescale `u` so that `I(u) = radius²`. Zero fields are returned as is.
pub fn normalize_energy(u: &SpectralField, radius: f64) -> SpectralField {
    let e = h1_energy(u);
    if e == 0.0 {
        return u.clone();
    }
    u.scale(radius / e.sqrt())
}

/// Mean-zero rough data: `c_n = ζ_n |n|^{-1.51}` on `1 ≤ |n| ≤ N/3` with
/// phases `ζ_n` uniform on the unit circle, scaled to `I(u₀) = radius²`.
/// Mode `n` always consumes the `n`-th draw, so grids of different sizes
/// share their low modes.
pub fn random_h1(
    n: usize,
    length: f64,
    radius: f64,
    seed: u64,
) -> Result<SpectralField, SpectralError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(i64, Complex64)> = (1..=n / 3)
        .map(|k| {
            let phase = 2.0 * PI * rng.random::<f64>();
            let amp = (k as f64).powf(-ROUGH_EXPONENT);
            (k as i64, Complex64::from_polar(amp, phase))
        })
        .collect();
    let u = SpectralField::from_modes(n, length, modes)?;
    Ok(normalize_energy(&u, radius))
}

/// Localized data: three Gaussian bumps of random sign, width and position
/// near the middle of the box, scaled to `I(u₀) = radius²`. Offsets and
/// widths are quoted for a box of length 32 and scale with `L`.
pub fn random_bumps(
    n: usize,
    length: f64,
    radius: f64,
    seed: u64,
) -> Result<SpectralField, SpectralError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = length / 32.0;
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            let centre = length / 2.0 + unit * rng.random_range(-2.0..2.0);
            let width = unit * rng.random_range(0.5..1.5);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let amp = sign * rng.random_range(0.5..1.0);
            (centre, width, amp)
        })
        .collect();
    let u = SpectralField::from_fn(n, length, |x| {
        bumps
            .iter()
            .map(|&(c, w, a)| a * (-((x - c) / w).powi(2)).exp())
            .sum()
    })?
    .dealias();
    Ok(normalize_energy(&u, radius))
}
