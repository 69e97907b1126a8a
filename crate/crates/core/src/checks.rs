//! Randomized identity checks of the spectral kernels. Each check compares
//! two independent routes to the same number over many random fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{conservation_residual, h1_energy};
use crate::initial::normalize_energy;
use crate::spectral::{trilinear_integral_check, FrequencyBand, SpectralField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub samples: usize,
    /// Largest error seen, in the units the tolerance is stated in.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, samples: usize, worst: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            samples,
            worst,
            tolerance,
            passed: worst <= tolerance,
        }
    }
}

/// I.i.d. uniform grid values in `[-1, 1]`.
pub fn white_noise(n: usize, rng: &mut impl Rng) -> SpectralField {
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    SpectralField::analyze(&values).expect("valid grid")
}

/// Random coefficients on `1 ≤ |k| ≤ max_mode`, real and imaginary parts
/// uniform in `[-1, 1]`.
pub fn band_limited(n: usize, max_mode: usize, rng: &mut impl Rng) -> SpectralField {
    let modes: Vec<(i64, num_complex::Complex64)> = (1..=max_mode as i64)
        .map(|k| {
            let re = rng.random_range(-1.0..=1.0);
            let im = rng.random_range(-1.0..=1.0);
            (k, num_complex::Complex64::new(re, im))
        })
        .collect();
    SpectralField::from_modes(n, 1.0, modes).expect("valid grid")
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn grid_l2_sq(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64
}

/// `Σ|a_k|²` against the trapezoid quadrature of the sampled values.
pub fn parseval(n: usize, samples: usize, seed: u64) -> CheckOutcome {
    let mut r = rng(seed);
    let worst = (0..samples)
        .map(|_| {
            let values: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..=1.0)).collect();
            let f = SpectralField::analyze(&values).expect("valid grid");
            let spectral = f.l2_norm().powi(2);
            let grid = grid_l2_sq(&values);
            (spectral - grid).abs() / grid
        })
        .fold(0.0, f64::max);
    CheckOutcome::new("parseval", samples, worst, 1e-10)
}

/// `P_{≤M}f ⊥ P_{>M}f` by grid quadrature, and the two pieces recombine
/// to `f` on the grid.
pub fn orthogonality(n: usize, samples: usize, seed: u64) -> CheckOutcome {
    let mut r = rng(seed);
    let worst = (0..samples)
        .map(|_| {
            let f = white_noise(n, &mut r);
            let cut = r.random_range(1..n / 2) as f64;
            let lo = f.lp_project(&FrequencyBand::at_most(cut));
            let hi = f.lp_project(&FrequencyBand::above(cut));
            let norm = grid_l2_sq(f.values());
            let cross = lo.quadrature_inner(&hi).abs() / norm;
            let recombine = f
                .values()
                .iter()
                .zip(lo.values().iter().zip(hi.values()))
                .map(|(v, (a, b))| (v - a - b).powi(2))
                .sum::<f64>()
                / f.n() as f64;
            cross.max((recombine / norm).sqrt())
        })
        .fold(0.0, f64::max);
    CheckOutcome::new("projection orthogonality", samples, worst, 1e-10)
}

/// `w = (1-∂²)⁻¹f` satisfies `w - w'' = f`, with `w''` taken by the
/// derivative operator.
pub fn helmholtz_round_trip(n: usize, samples: usize, seed: u64) -> CheckOutcome {
    let mut r = rng(seed);
    let worst = (0..samples)
        .map(|_| {
            let f = white_noise(n, &mut r).lp_project(&FrequencyBand::below(n as f64 / 2.0));
            let w = f.helmholtz_inverse();
            let back = &w - &w.derivative(2);
            let err: f64 = back
                .values()
                .iter()
                .zip(f.values())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>();
            let norm: f64 = f.values().iter().map(|v| v * v).sum();
            (err / norm).sqrt()
        })
        .fold(0.0, f64::max);
    CheckOutcome::new("helmholtz round trip", samples, worst, 1e-10)
}

/// `∫fgh` by quadrature against the convolution sum over `j+k+l = 0`, for
/// fields band-limited to `N/3`.
pub fn trilinear(n: usize, samples: usize, seed: u64) -> CheckOutcome {
    let mut r = rng(seed);
    let worst = (0..samples)
        .map(|_| {
            let f = white_noise(n, &mut r).dealias();
            let g = white_noise(n, &mut r).dealias();
            let h = white_noise(n, &mut r).dealias();
            let (quad, sum, scale) = trilinear_integral_check(&f, &g, &h);
            (quad - sum).abs() / scale
        })
        .fold(0.0, f64::max);
    CheckOutcome::new("trilinear identity", samples, worst, 1e-10)
}

/// `‖P_{<N}f‖_∞ ≤ N^{1/2}‖f‖_{L²}` on white noise, the sup taken on a grid
/// refined eightfold. `worst` is the largest excess over the bound.
pub fn bernstein(cutoff: usize, n: usize, samples: usize, seed: u64) -> CheckOutcome {
    let mut r = rng(seed);
    let worst = (0..samples)
        .map(|_| {
            let f = white_noise(n, &mut r);
            let p = f
                .lp_project(&FrequencyBand::below(cutoff as f64))
                .resample(8 * n)
                .expect("power of two");
            let bound = (cutoff as f64).sqrt() * f.l2_norm();
            p.max_abs() - bound
        })
        .fold(f64::NEG_INFINITY, f64::max);
    CheckOutcome::new(format!("bernstein N={cutoff}"), samples, worst, 1e-10)
}

/// `∫(uF(u) + uₓ∂ₓF(u)) = 0` for band-limited `u` with `I(u) = 1`.
pub fn residual(n: usize, samples: usize, seed: u64) -> CheckOutcome {
    let mut r = rng(seed);
    let worst = (0..samples)
        .map(|_| {
            let u = normalize_energy(&band_limited(n, n / 6, &mut r), 1.0);
            debug_assert!((h1_energy(&u) - 1.0).abs() < 1e-12);
            conservation_residual(&u).abs()
        })
        .fold(0.0, f64::max);
    CheckOutcome::new("conservation residual", samples, worst, 1e-9)
}

/// Every check at grid size `n`.
pub fn suite(n: usize, samples: usize, seed: u64) -> Vec<CheckOutcome> {
    let mut out = vec![
        parseval(n, samples, seed),
        orthogonality(n, samples, seed + 1),
        helmholtz_round_trip(n, samples, seed + 2),
        trilinear(n, samples, seed + 3),
    ];
    out.extend([4, 16, 64].iter().map(|&c| bernstein(c, n, samples, seed + 4)));
    out.push(residual(n, samples, seed + 5));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        for c in suite(64, 20, 1) {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn generators_are_reproducible() {
        let a = white_noise(32, &mut rng(4));
        let b = white_noise(32, &mut rng(4));
        assert_eq!(a, b);
        let u = band_limited(32, 5, &mut rng(4));
        assert_eq!(u.coeff(6).norm(), 0.0);
        assert_eq!(u.mean(), 0.0);
    }
}
