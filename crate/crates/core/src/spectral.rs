//! Fourier representation of real periodic functions and the linear
//! operators that are diagonal in it.
//!
//! Coefficients follow the convention
//!
//! ```text
//! a_k = (1/L) ∫_0^L f(x) e^{-2πikx/L} dx,      f(x) = Σ_k a_k e^{2πikx/L},
//! ```
//!
//! discretized by the trapezoid rule on `N` equispaced nodes `x_j = jL/N`.
//! The default period is `L = 1`; a larger box is only used by the damped
//! whole-line proxy. The frequency attached to mode `k` is `ξ_k = k/L`, so
//! on the unit interval every symbol below reduces to the integer `k`.
//!
//! Fields are real, so only the half spectrum `k = 0..=N/2` is stored and
//! negative modes are recovered by conjugation. The Nyquist mode `k = N/2`
//! doubles as `k = -N/2`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;
use realfft::RealFftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::SpectralError;

thread_local! {
    // Plans are cached per worker thread; nothing is shared mutably.
    static PLANNER: RefCell<RealFftPlanner<f64>> = RefCell::new(RealFftPlanner::new());
}

fn forward_transform(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    let mut input = values.to_vec();
    let mut output = plan.make_output_vec();
    plan.process(&mut input, &mut output)
        .expect("buffer sizes come from the plan");
    let scale = 1.0 / n as f64;
    for c in &mut output {
        *c *= scale;
    }
    output
}

fn inverse_transform(half: &[Complex64], n: usize) -> Vec<f64> {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    let mut input = half.to_vec();
    input[0].im = 0.0;
    input[n / 2].im = 0.0;
    let mut output = plan.make_output_vec();
    plan.process(&mut input, &mut output)
        .expect("buffer sizes come from the plan");
    output
}

fn check_grid(n: usize) -> Result<(), SpectralError> {
    if n == 0 || n % 2 != 0 {
        return Err(SpectralError::InvalidLength(n));
    }
    Ok(())
}

fn check_length(length: f64) -> Result<(), SpectralError> {
    if !(length.is_finite() && length > 0.0) {
        return Err(SpectralError::InvalidDomain(length));
    }
    Ok(())
}

/// Order of a (fractional) Sobolev scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub fn new(s: f64) -> Result<Self, SpectralError> {
        if !s.is_finite() {
            return Err(SpectralError::InvalidIndex(s));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A set of frequencies `lo ≤ |ξ| ≤ hi` with optionally open ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBand {
    lo: f64,
    hi: f64,
    lo_open: bool,
    hi_open: bool,
    dyadic_index: Option<i32>,
}

impl FrequencyBand {
    /// Closed band `lo ≤ |ξ| ≤ hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self, SpectralError> {
        if !(lo >= 0.0 && lo < hi) || lo.is_nan() || hi.is_nan() {
            return Err(SpectralError::InvalidBand { lo, hi });
        }
        Ok(Self {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
            dyadic_index: None,
        })
    }

    /// `P_{≤N}`: frequencies `|ξ| ≤ n`.
    pub fn at_most(n: f64) -> Self {
        Self {
            lo: 0.0,
            hi: n,
            lo_open: false,
            hi_open: false,
            dyadic_index: None,
        }
    }

    /// `P_{<N}`: frequencies `|ξ| < n`.
    pub fn below(n: f64) -> Self {
        Self {
            hi_open: true,
            ..Self::at_most(n)
        }
    }

    /// `P_{>N}`: frequencies `|ξ| > n`.
    pub fn above(n: f64) -> Self {
        Self {
            lo: n,
            hi: f64::INFINITY,
            lo_open: true,
            hi_open: false,
            dyadic_index: None,
        }
    }

    /// Dyadic block `2^{k-1} < |ξ| ≤ 2^{k+1}`.
    pub fn dyadic(k: i32) -> Self {
        Self {
            lo: 2f64.powi(k - 1),
            hi: 2f64.powi(k + 1),
            lo_open: true,
            hi_open: false,
            dyadic_index: Some(k),
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn dyadic_index(&self) -> Option<i32> {
        self.dyadic_index
    }

    pub fn contains(&self, freq: f64) -> bool {
        let f = freq.abs();
        let above_lo = if self.lo_open { f > self.lo } else { f >= self.lo };
        let below_hi = if self.hi_open { f < self.hi } else { f <= self.hi };
        above_lo && below_hi
    }
}

/// The triple `(‖f‖_{L²}, ‖f‖_{Ḣˢ}, ‖f‖_{Hˢ})` with `Hˢ² = L²² + Ḣˢ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub homogeneous: f64,
    pub inhomogeneous: f64,
}

/// Per-block values `2^{sk} ‖P_{2^k} f‖_{L²}` and their supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct BesovTable {
    pub blocks: Vec<(i32, f64)>,
    pub sup: f64,
}

/// A real periodic function held as Fourier coefficients, with grid values
/// synthesized on first use.
#[derive(Debug, Clone)]
pub struct SpectralField {
    n: usize,
    length: f64,
    coeffs: Vec<Complex64>,
    values: OnceLock<Vec<f64>>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    /// Analyze grid values on the unit period.
    pub fn analyze(values: &[f64]) -> Result<Self, SpectralError> {
        Self::analyze_on(values, 1.0)
    }

    /// Analyze grid values on a period of the given length.
    pub fn analyze_on(values: &[f64], length: f64) -> Result<Self, SpectralError> {
        check_grid(values.len())?;
        check_length(length)?;
        let mut coeffs = forward_transform(values);
        let n = values.len();
        coeffs[0].im = 0.0;
        coeffs[n / 2].im = 0.0;
        Ok(Self {
            n,
            length,
            coeffs,
            values: OnceLock::from(values.to_vec()),
        })
    }

    /// Build from the half spectrum `k = 0..=N/2`. The imaginary parts of the
    /// mean and Nyquist coefficients are discarded.
    pub fn from_half_spectrum(
        n: usize,
        length: f64,
        mut coeffs: Vec<Complex64>,
    ) -> Result<Self, SpectralError> {
        check_grid(n)?;
        check_length(length)?;
        if coeffs.len() != n / 2 + 1 {
            return Err(SpectralError::SpectrumLength {
                n,
                expected: n / 2 + 1,
                got: coeffs.len(),
            });
        }
        coeffs[0].im = 0.0;
        coeffs[n / 2].im = 0.0;
        Ok(Self::from_parts(n, length, coeffs))
    }

    /// Build from `(k, a_k)` pairs; negative `k` are stored through their
    /// conjugate partner and modes beyond `N/2` are ignored.
    pub fn from_modes(
        n: usize,
        length: f64,
        modes: impl IntoIterator<Item = (i64, Complex64)>,
    ) -> Result<Self, SpectralError> {
        check_grid(n)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n / 2 + 1];
        for (k, c) in modes {
            let idx = k.unsigned_abs() as usize;
            if idx > n / 2 {
                continue;
            }
            coeffs[idx] = if k < 0 { c.conj() } else { c };
        }
        Self::from_half_spectrum(n, length, coeffs)
    }

    /// Sample `f` at the grid nodes `x_j = jL/N` and analyze.
    pub fn from_fn(
        n: usize,
        length: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, SpectralError> {
        check_grid(n)?;
        check_length(length)?;
        let h = length / n as f64;
        let values: Vec<f64> = (0..n).map(|j| f(j as f64 * h)).collect();
        Self::analyze_on(&values, length)
    }

    pub fn zeros(n: usize, length: f64) -> Result<Self, SpectralError> {
        Self::constant(n, length, 0.0)
    }

    pub fn constant(n: usize, length: f64, c: f64) -> Result<Self, SpectralError> {
        check_grid(n)?;
        check_length(length)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n / 2 + 1];
        coeffs[0] = Complex64::new(c, 0.0);
        Ok(Self::from_parts(n, length, coeffs))
    }

    fn from_parts(n: usize, length: f64, coeffs: Vec<Complex64>) -> Self {
        Self {
            n,
            length,
            coeffs,
            values: OnceLock::new(),
        }
    }

    /// A field on the same grid with new coefficients.
    fn with_coeffs(&self, coeffs: Vec<Complex64>) -> Self {
        let mut out = Self::from_parts(self.n, self.length, coeffs);
        out.coeffs[0].im = 0.0;
        out.coeffs[self.n / 2].im = 0.0;
        out
    }

    /// Apply a real symbol `m(ξ_k)` mode by mode.
    fn apply_symbol(&self, symbol: impl Fn(usize, f64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * symbol(k, self.frequency(k as i64)))
            .collect();
        self.with_coeffs(coeffs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Frequency `ξ_k = k/L` of mode `k`.
    pub fn frequency(&self, k: i64) -> f64 {
        k as f64 / self.length
    }

    /// Largest retained mode index under the 2/3 rule.
    pub fn dealias_limit(&self) -> usize {
        self.n / 3
    }

    pub fn half_spectrum(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient `a_k` for any integer `k`; zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        if idx > self.n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        if k < 0 {
            self.coeffs[idx].conj()
        } else {
            self.coeffs[idx]
        }
    }

    /// Grid values at `x_j = jL/N`.
    pub fn values(&self) -> &[f64] {
        self.values
            .get_or_init(|| inverse_transform(&self.coeffs, self.n))
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.length / self.n as f64;
        (0..self.n).map(|j| j as f64 * h).collect()
    }

    /// Mean value `a_0`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Weight of half-spectrum entry `k` in sums over the full spectrum.
    fn multiplicity(&self, k: usize) -> f64 {
        if k == 0 || k == self.n / 2 {
            1.0
        } else {
            2.0
        }
    }

    /// `Σ_k w(ξ_k) |a_k|²` over the full spectrum.
    fn weighted_power(&self, weight: impl Fn(f64) -> f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| self.multiplicity(k) * weight(self.frequency(k as i64)) * c.norm_sqr())
            .sum()
    }

    /// `∫ f g dx` through Parseval.
    pub fn inner(&self, other: &Self) -> f64 {
        self.assert_compatible(other);
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(k, (a, b))| self.multiplicity(k) * (a * b.conj()).re)
            .sum();
        self.length * sum
    }

    /// `∫ f g dx` by the trapezoid rule on the grid.
    pub fn quadrature_inner(&self, other: &Self) -> f64 {
        self.assert_compatible(other);
        let h = self.length / self.n as f64;
        h * self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a * b)
            .sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.length * self.weighted_power(|_| 1.0)).sqrt()
    }

    /// `∂ₓ^order`: multiplies `a_k` by `(2πiξ_k)^order`. The unpaired Nyquist
    /// mode is dropped for every positive order so that derivatives of real
    /// fields stay real and compose exactly.
    pub fn derivative(&self, order: u32) -> Self {
        if order == 0 {
            return self.clone();
        }
        let nyquist = self.n / 2;
        self.apply_symbol(|k, xi| {
            if k == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, 2.0 * PI * xi).powu(order)
            }
        })
    }

    /// `(1 - ∂ₓ²)⁻¹`, symbol `1/(1+4π²ξ²)`.
    pub fn helmholtz_inverse(&self) -> Self {
        self.apply_symbol(|_, xi| Complex64::new(1.0 / (1.0 + 4.0 * PI * PI * xi * xi), 0.0))
    }

    /// `(1 - ∂ₓ²)`, symbol `1+4π²ξ²`.
    pub fn helmholtz(&self) -> Self {
        self.apply_symbol(|_, xi| Complex64::new(1.0 + 4.0 * PI * PI * xi * xi, 0.0))
    }

    /// Littlewood–Paley projection onto a sharp frequency band.
    pub fn lp_project(&self, band: &FrequencyBand) -> Self {
        self.apply_symbol(|_, xi| {
            if band.contains(xi) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `|∂|ˢ`: multiplies `a_k` by `|ξ_k|ˢ` and drops the mean.
    pub fn fractional_derivative(&self, s: SobolevIndex) -> Self {
        self.apply_symbol(|k, xi| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(xi.abs().powf(s.value()), 0.0)
            }
        })
    }

    /// `L²`, `Ḣˢ = (L Σ |a_k|² |ξ_k|^{2s})^{1/2}` and `Hˢ = (L²² + Ḣˢ²)^{1/2}`.
    pub fn norms(&self, s: SobolevIndex) -> Result<Norms, SpectralError> {
        let l2_sq = self.length * self.weighted_power(|_| 1.0);
        let mean = self.mean();
        if s.value() < 0.0 && mean.abs() > 1e-14 * l2_sq.sqrt().max(1.0) {
            return Err(SpectralError::NegativeOrderWithMean { s: s.value(), mean });
        }
        let two_s = 2.0 * s.value();
        let hom_sq = self.length
            * self.weighted_power(|xi| if xi == 0.0 { 0.0 } else { xi.abs().powf(two_s) });
        Ok(Norms {
            l2: l2_sq.sqrt(),
            homogeneous: hom_sq.sqrt(),
            inhomogeneous: (l2_sq + hom_sq).sqrt(),
        })
    }

    /// Dyadic blocks `2^{sk} (L Σ_{2^{k-1}<|ξ|≤2^{k+1}} |a_n|²)^{1/2}` for every
    /// block meeting the stored frequencies, starting from the block that
    /// holds the lowest nonzero frequency `1/L`.
    pub fn besov_seminorm(&self, s: f64) -> BesovTable {
        let (k_min, k_max) = self.dyadic_range(self.n as f64 / 2.0);
        let blocks: Vec<(i32, f64)> = (k_min..=k_max)
            .map(|k| {
                let band = FrequencyBand::dyadic(k);
                let power = self.weighted_power(|xi| if band.contains(xi) { 1.0 } else { 0.0 });
                (k, 2f64.powf(s * k as f64) * (self.length * power).sqrt())
            })
            .collect();
        let sup = blocks.iter().fold(0.0, |m: f64, &(_, v)| m.max(v));
        BesovTable { blocks, sup }
    }

    /// Dyadic indices whose blocks meet `1/L ≤ |ξ| ≤ max_mode/L`.
    pub fn dyadic_range(&self, max_mode: f64) -> (i32, i32) {
        let xi_min = 1.0 / self.length;
        let xi_max = max_mode / self.length;
        let k_min = xi_min.log2().floor() as i32;
        let mut k_max = k_min;
        while 2f64.powi(k_max) < xi_max {
            k_max += 1;
        }
        (k_min, k_max)
    }

    /// Zero every mode with `|k| > N/3`.
    pub fn dealias(&self) -> Self {
        let limit = self.dealias_limit();
        self.apply_symbol(|k, _| {
            if k > limit {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
    }

    /// Physical-space product followed by 2/3-rule truncation.
    pub fn multiply(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let values: Vec<f64> = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a * b)
            .collect();
        self.from_grid(&values).dealias()
    }

    /// Analyze grid values on this field's grid.
    pub fn from_grid(&self, values: &[f64]) -> Self {
        assert_eq!(values.len(), self.n, "grid size mismatch");
        let coeffs = forward_transform(values);
        self.with_coeffs(coeffs)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Self) -> Self {
        self.assert_compatible(other);
        self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * factor)
                .collect(),
        )
    }

    /// Resample onto a grid of `n` points by zero padding or truncating the
    /// spectrum; the Nyquist mode is dropped when shrinking.
    pub fn resample(&self, n: usize) -> Result<Self, SpectralError> {
        check_grid(n)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n / 2 + 1];
        let keep = (n / 2).min(self.n / 2);
        for k in 0..=keep {
            coeffs[k] = self.coeffs[k];
        }
        if n < self.n {
            coeffs[n / 2] = Complex64::new(0.0, 0.0);
        } else if n > self.n {
            // The stored Nyquist entry represents ±N/2 together.
            coeffs[self.n / 2] *= 0.5;
        }
        Self::from_half_spectrum(n, self.length, coeffs)
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            self.n == other.n && self.length == other.length,
            "fields live on different grids ({}, {}) vs ({}, {})",
            self.n,
            self.length,
            other.n,
            other.length
        );
    }
}

/// The trilinear identity `∫ f g h = L Σ_{m,k} f_m g_{-m-k} h_k`, evaluated
/// once by grid quadrature and once as the double Fourier sum. Also returns
/// the absolute double sum, a natural scale for comparing the two.
pub fn trilinear_integral_check(
    f: &SpectralField,
    g: &SpectralField,
    h: &SpectralField,
) -> (f64, f64, f64) {
    f.assert_compatible(g);
    f.assert_compatible(h);
    let step = f.length / f.n as f64;
    let quadrature = step
        * f.values()
            .iter()
            .zip(g.values())
            .zip(h.values())
            .map(|((a, b), c)| a * b * c)
            .sum::<f64>();
    let half = (f.n / 2) as i64;
    // Modes -N/2 and N/2 are the same stored entry; sum it once.
    let range = -half + 1..=half;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for m in range.clone() {
        let fm = f.coeff(m);
        if fm.norm_sqr() == 0.0 {
            continue;
        }
        for k in range.clone() {
            let j = -m - k;
            if j.abs() > half {
                continue;
            }
            let term = fm * g.coeff(j) * h.coeff(k);
            sum += term;
            abs_sum += term.norm();
        }
    }
    (quadrature, f.length * sum.re, f.length * abs_sum)
}

impl Add for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: Self) -> SpectralField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: Self) -> SpectralField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;

    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    fn sample(n: usize, f: impl Fn(f64) -> f64) -> SpectralField {
        SpectralField::from_fn(n, 1.0, f).unwrap()
    }

    #[test]
    fn analyze_constant() {
        let f = SpectralField::analyze(&[1.0; 16]).unwrap();
        assert!(close(f.coeff(0).re, 1.0, 1e-15));
        for k in 1..=8 {
            assert!(f.coeff(k).norm() < 1e-15);
        }
    }

    #[test]
    fn analyze_cosine() {
        let f = sample(32, |x| (2.0 * PI * x).cos());
        assert!(close(f.coeff(1).re, 0.5, 1e-15));
        assert!(close(f.coeff(-1).re, 0.5, 1e-15));
        for k in 2..=16 {
            assert!(f.coeff(k).norm() < 1e-15);
        }
    }

    #[test]
    fn analyze_rejects_bad_lengths() {
        assert_eq!(
            SpectralField::analyze(&[]).unwrap_err(),
            SpectralError::InvalidLength(0)
        );
        assert_eq!(
            SpectralField::analyze(&[1.0; 7]).unwrap_err(),
            SpectralError::InvalidLength(7)
        );
    }

    #[test]
    fn synthesis_round_trip() {
        let vals: Vec<f64> = (0..64).map(|j| ((j * 37 % 11) as f64).sin()).collect();
        let f = SpectralField::analyze(&vals).unwrap();
        let g = SpectralField::from_half_spectrum(64, 1.0, f.half_spectrum().to_vec()).unwrap();
        for (a, b) in vals.iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_sine() {
        let f = sample(32, |x| (2.0 * PI * x).sin());
        let d = f.derivative(1);
        for (x, v) in d.nodes().iter().zip(d.values()) {
            assert!((v - 2.0 * PI * (2.0 * PI * x).cos()).abs() < 1e-12);
        }
        let c = SpectralField::constant(32, 1.0, 3.0).unwrap();
        assert_eq!(c.derivative(3).max_abs(), 0.0);
    }

    #[test]
    fn helmholtz_single_mode() {
        let f = SpectralField::from_modes(16, 1.0, [(1, Complex64::new(1.0, 0.0))]).unwrap();
        let h = f.helmholtz_inverse();
        assert!(close(h.coeff(1).re, 1.0 / (1.0 + 4.0 * PI * PI), 1e-15));
        let one = SpectralField::constant(16, 1.0, 1.0).unwrap();
        assert_eq!(one.helmholtz_inverse().mean(), 1.0);
    }

    #[test]
    fn projection_drops_excluded_mode() {
        let f = sample(32, |x| (4.0 * PI * x).sin());
        assert!(f.lp_project(&FrequencyBand::at_most(1.0)).l2_norm() < 1e-15);
        let all = f.lp_project(&FrequencyBand::at_most(16.0));
        assert_eq!(all, f.lp_project(&FrequencyBand::at_most(16.0)).lp_project(&FrequencyBand::at_most(16.0)));
        assert!((&all - &f).l2_norm() < 1e-15);
    }

    #[test]
    fn band_validation() {
        assert!(FrequencyBand::new(3.0, 3.0).is_err());
        assert!(FrequencyBand::new(-1.0, 3.0).is_err());
        let b = FrequencyBand::dyadic(2);
        assert!(!b.contains(2.0) && b.contains(3.0) && b.contains(8.0) && !b.contains(9.0));
        assert!(FrequencyBand::below(4.0).contains(3.0));
        assert!(!FrequencyBand::below(4.0).contains(4.0));
        assert!(!FrequencyBand::above(4.0).contains(4.0));
    }

    #[test]
    fn fractional_unit_frequency_and_identity() {
        let e = SpectralField::from_modes(16, 1.0, [(1, Complex64::new(1.0, 0.0))]).unwrap();
        let d = e.fractional_derivative(SobolevIndex::new(1.0).unwrap());
        assert_eq!(d, e);
        let f = sample(32, |x| (2.0 * PI * x).sin() + 0.3 * (6.0 * PI * x).cos());
        let id = f.fractional_derivative(SobolevIndex::new(0.0).unwrap());
        assert!((&id - &f).l2_norm() < 1e-15);
    }

    #[test]
    fn norms_of_sine_and_constant() {
        let f = sample(32, |x| (2.0 * PI * x).sin());
        let n = f.norms(SobolevIndex::new(1.0).unwrap()).unwrap();
        assert!(close(n.l2, 0.5f64.sqrt(), 1e-14));
        assert!(close(n.homogeneous, 0.5f64.sqrt(), 1e-14));
        let c = SpectralField::constant(8, 1.0, -2.5).unwrap();
        let n = c.norms(SobolevIndex::new(1.5).unwrap()).unwrap();
        assert_eq!(n.homogeneous, 0.0);
        assert!(close(n.l2, 2.5, 1e-15));
        assert!(matches!(
            c.norms(SobolevIndex::new(-1.0).unwrap()),
            Err(SpectralError::NegativeOrderWithMean { .. })
        ));
    }

    #[test]
    fn besov_examples() {
        let z = SpectralField::zeros(64, 1.0).unwrap();
        assert_eq!(z.besov_seminorm(2.0).sup, 0.0);
        let e4 = SpectralField::from_modes(64, 1.0, [(4, Complex64::new(1.0, 0.0))]).unwrap();
        // Real field: the ±4 pair contributes √2 to the L² norm of the block.
        let complex_block = 16.0 * 2f64.sqrt();
        let t = e4.besov_seminorm(2.0);
        assert!(close(t.sup, complex_block, 1e-14));
        let at = |k: i32| t.blocks.iter().find(|b| b.0 == k).unwrap().1;
        assert!(close(at(1), complex_block / 4.0, 1e-14));
        assert_eq!(at(3), 0.0);
    }

    #[test]
    fn dealias_and_multiply() {
        let f = sample(48, |x| (2.0 * PI * 10.0 * x).cos());
        let sq = f.multiply(&f);
        // cos² = 1/2 + cos(40πx)/2; mode 20 > 48/3 is removed.
        assert!(close(sq.mean(), 0.5, 1e-15));
        assert!(sq.coeff(20).norm() < 1e-15);
    }

    #[test]
    fn resample_preserves_band_limited() {
        let f = sample(32, |x| (2.0 * PI * x).sin() + (6.0 * PI * x).cos());
        let g = f.resample(128).unwrap();
        for (x, v) in g.nodes().iter().zip(g.values()) {
            let exact = (2.0 * PI * x).sin() + (6.0 * PI * x).cos();
            assert!((v - exact).abs() < 1e-13);
        }
        assert!((g.resample(32).unwrap().l2_norm() - f.l2_norm()).abs() < 1e-14);
    }

    #[test]
    fn trilinear_trivial_cases() {
        let one = SpectralField::constant(16, 1.0, 1.0).unwrap();
        let (q, s, _) = trilinear_integral_check(&one, &one, &one);
        assert!(close(q, 1.0, 1e-15) && close(s, 1.0, 1e-15));
        let c = sample(16, |x| (2.0 * PI * x).cos());
        let (q, s, _) = trilinear_integral_check(&c, &c, &one);
        assert!(close(q, 0.5, 1e-15) && close(s, 0.5, 1e-15));
    }

    #[test]
    fn box_length_scales_frequencies() {
        let l = 4.0;
        let f = SpectralField::from_fn(64, l, |x| (2.0 * PI * x / l).sin()).unwrap();
        let d = f.derivative(1);
        for (x, v) in d.nodes().iter().zip(d.values()) {
            assert!((v - (2.0 * PI / l) * (2.0 * PI * x / l).cos()).abs() < 1e-12);
        }
        assert!(close(f.l2_norm(), (l / 2.0).sqrt(), 1e-14));
    }
}
