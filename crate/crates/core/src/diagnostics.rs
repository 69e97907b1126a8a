//! Energy functionals and the monitors built on them.
//!
//! `I(t) = ∫ (u² + uₓ²) dx` is the H¹ energy conserved by the inviscid flow;
//! `I_{>k}` is the same energy restricted to frequencies above `2^k`, and
//! `J_{>N}` weights the energy density by `1 - ψ(x/N)` with `x` measured
//! from the middle of the box.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{DiagnosticsError, SpectralError};
use crate::operators::{ch_nonlinearity, Mode};
use crate::spectral::{FrequencyBand, SobolevIndex, SpectralField};

/// `∫ (u² + uₓ²) dx` by Parseval.
pub fn h1_energy(u: &SpectralField) -> f64 {
    u.half_spectrum()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let xi = u.frequency(k as i64);
            let mult = if k == 0 || k == u.n() / 2 { 1.0 } else { 2.0 };
            mult * (1.0 + 4.0 * PI * PI * xi * xi) * c.norm_sqr()
        })
        .sum::<f64>()
        * u.length()
}

/// `I_{>k}`: H¹ energy of `P_{>2^k} u`. The threshold must sit inside the
/// dealiased range.
pub fn highfreq_energy(u: &SpectralField, k: i32) -> Result<f64, SpectralError> {
    let threshold = 2f64.powi(k);
    let limit = u.dealias_limit();
    if threshold >= limit as f64 / u.length() {
        return Err(SpectralError::BandBeyondDealiased { k, limit });
    }
    Ok(h1_energy(&u.lp_project(&FrequencyBand::above(threshold))))
}

/// The bump `ψ`: 1 on `|ξ| ≤ 1`, 0 on `|ξ| ≥ 3/2`, smooth and monotone in
/// between.
pub fn psi(xi: f64) -> f64 {
    fn f(s: f64) -> f64 {
        if s > 0.0 {
            (-1.0 / s).exp()
        } else {
            0.0
        }
    }
    let r = xi.abs();
    if r <= 1.0 {
        1.0
    } else if r >= 1.5 {
        0.0
    } else {
        let t = (1.5 - r) / 0.5;
        f(t) / (f(t) + f(1.0 - t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffShape {
    Smooth,
    /// `ψ ≡ 0`.
    Zero,
}

/// Spatial cutoff `ψ(x/N)` centred mid-box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffFunction {
    pub shape: CutoffShape,
    pub scale: f64,
}

impl CutoffFunction {
    pub fn smooth(scale: f64) -> Self {
        Self {
            shape: CutoffShape::Smooth,
            scale,
        }
    }

    pub fn weight(&self, x: f64) -> f64 {
        match self.shape {
            CutoffShape::Smooth => psi(x / self.scale),
            CutoffShape::Zero => 0.0,
        }
    }

    /// The support `|x| < 3N/2` must fit in a box of length `3N`.
    pub fn check_fits(&self, length: f64) -> Result<(), SpectralError> {
        let required = 3.0 * self.scale;
        if self.shape == CutoffShape::Smooth && length < required {
            return Err(SpectralError::CutoffTooWide {
                scale: self.scale,
                required,
                length,
            });
        }
        Ok(())
    }
}

fn windowed_energy(u: &SpectralField, window: impl Fn(f64) -> f64) -> f64 {
    let ux = u.derivative(1);
    let h = u.length() / u.n() as f64;
    let centre = u.length() / 2.0;
    u.values()
        .iter()
        .zip(ux.values())
        .enumerate()
        .map(|(j, (v, d))| (v * v + d * d) * window(j as f64 * h - centre))
        .sum::<f64>()
        * h
}

/// `J_{>N} = ∫ (u² + uₓ²)(1 - ψ(x/N)) dx` by grid quadrature.
pub fn tail_energy(u: &SpectralField, cutoff: &CutoffFunction) -> Result<f64, SpectralError> {
    cutoff.check_fits(u.length())?;
    Ok(windowed_energy(u, |x| 1.0 - cutoff.weight(x)))
}

/// `∫ (u² + uₓ²) ψ(x/N) dx`, the complement of [`tail_energy`].
pub fn core_energy(u: &SpectralField, cutoff: &CutoffFunction) -> Result<f64, SpectralError> {
    cutoff.check_fits(u.length())?;
    Ok(windowed_energy(u, |x| cutoff.weight(x)))
}

/// `∫ (u F(u) + uₓ ∂ₓF(u)) dx`, which vanishes for smooth `u`.
pub fn conservation_residual(u: &SpectralField) -> f64 {
    let f = ch_nonlinearity(u);
    u.quadrature_inner(&f) + u.derivative(1).quadrature_inner(&f.derivative(1))
}

/// Which optional diagnostics to record.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSet {
    /// Dyadic exponents `k` for `I_{>k}`.
    #[serde(default)]
    pub highfreq_k: Vec<i32>,
    /// Scales `N` for `J_{>N}`.
    #[serde(default)]
    pub tail_n: Vec<u32>,
}

impl DiagnosticSet {
    /// Every `k` with `2^k` inside the dealiased range, starting at 0.
    pub fn all_highfreq(n: usize, length: f64) -> Self {
        let limit = (n / 3) as f64 / length;
        let highfreq_k = (0..).take_while(|&k| 2f64.powi(k) < limit).collect();
        Self {
            highfreq_k,
            tail_n: Vec::new(),
        }
    }

    pub fn validate(&self, n: usize, length: f64) -> Result<(), SpectralError> {
        let limit = n / 3;
        for &k in &self.highfreq_k {
            if 2f64.powi(k) >= limit as f64 / length {
                return Err(SpectralError::BandBeyondDealiased { k, limit });
            }
        }
        for &scale in &self.tail_n {
            CutoffFunction::smooth(scale as f64).check_fits(length)?;
        }
        Ok(())
    }
}

/// One row of the diagnostics ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    #[serde(rename = "I")]
    pub energy: f64,
    pub mean_u: f64,
    #[serde(rename = "I_gt")]
    pub highfreq: BTreeMap<i32, f64>,
    pub besov_blocks: BTreeMap<i32, f64>,
    #[serde(rename = "J_gt")]
    pub tail: BTreeMap<u32, f64>,
    pub conservation_residual: f64,
    pub h2_norm: f64,
}

impl DiagnosticsRecord {
    pub fn compute(t: f64, u: &SpectralField, set: &DiagnosticSet) -> Result<Self, SpectralError> {
        let highfreq = set
            .highfreq_k
            .iter()
            .map(|&k| highfreq_energy(u, k).map(|e| (k, e)))
            .collect::<Result<_, _>>()?;
        let tail = set
            .tail_n
            .iter()
            .map(|&n| tail_energy(u, &CutoffFunction::smooth(n as f64)).map(|e| (n, e)))
            .collect::<Result<_, _>>()?;
        let besov_blocks = u.besov_seminorm(2.0).blocks.into_iter().collect();
        let h2_norm = u
            .norms(SobolevIndex::new(2.0).expect("finite"))
            .expect("nonnegative order")
            .inhomogeneous;
        Ok(Self {
            t,
            energy: h1_energy(u),
            mean_u: u.mean(),
            highfreq,
            besov_blocks,
            tail,
            conservation_residual: conservation_residual(u),
            h2_norm,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.energy.is_finite()
            && self.mean_u.is_finite()
            && self.h2_norm.is_finite()
            && self.highfreq.values().all(|v| v.is_finite())
            && self.tail.values().all(|v| v.is_finite())
    }
}

/// Mean of `I(t)` over records with `t ≥ (1 - fraction)·t_last`.
pub fn plateau_average(records: &[DiagnosticsRecord], fraction: f64) -> Option<f64> {
    let t_last = records.last()?.t;
    let start = (1.0 - fraction) * t_last;
    let tail: Vec<f64> = records
        .iter()
        .filter(|r| r.t >= start)
        .map(|r| r.energy)
        .collect();
    if tail.is_empty() {
        return None;
    }
    Some(tail.iter().sum::<f64>() / tail.len() as f64)
}

/// Least-squares slope of `log I` against `t`, negated. Only records where
/// `I` exceeds 100 times its final value are used, so a forced plateau does
/// not flatten the fit.
pub fn fit_decay_rate(records: &[DiagnosticsRecord]) -> Option<f64> {
    let last = records.last()?.energy;
    let floor = (100.0 * last).max(1e-280);
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.energy > floor)
        .map(|r| (r.t, r.energy.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    Some(-sxy / sxx)
}

/// Outcome of checking `I(t) ≤ I(0)e^{-εt/2} + C‖g‖²/ε²` along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationReport {
    pub epsilon: f64,
    pub forcing_l2: f64,
    /// Smallest constant making the envelope hold; `None` when `g = 0`.
    pub c_star: Option<f64>,
    /// Fitted exponential decay rate of `I`, reported when `g = 0`.
    pub decay_rate: Option<f64>,
    /// `decay_rate ≥ ε/2`.
    pub rate_ok: Option<bool>,
    /// Largest excess of `I(t)` over `I(0)e^{-εt/2}` when `g = 0`.
    pub unforced_excess: f64,
}

pub fn dissipation_monitor(
    records: &[DiagnosticsRecord],
    epsilon: f64,
    forcing_l2: f64,
    mode: Mode,
) -> Result<DissipationReport, DiagnosticsError> {
    if mode != Mode::Viscous {
        return Err(DiagnosticsError::WrongMode(format!("{mode:?}")));
    }
    if records.is_empty() {
        return Err(DiagnosticsError::TooFewRecords { needed: 1, got: 0 });
    }
    let i0 = records[0].energy;
    let t0 = records[0].t;
    let excess = records
        .iter()
        .map(|r| r.energy - i0 * (-epsilon * (r.t - t0) / 2.0).exp())
        .fold(0.0f64, f64::max);
    if forcing_l2 > 0.0 {
        Ok(DissipationReport {
            epsilon,
            forcing_l2,
            c_star: Some(excess * epsilon * epsilon / (forcing_l2 * forcing_l2)),
            decay_rate: None,
            rate_ok: None,
            unforced_excess: 0.0,
        })
    } else {
        let rate = fit_decay_rate(records);
        Ok(DissipationReport {
            epsilon,
            forcing_l2,
            c_star: None,
            decay_rate: rate,
            rate_ok: rate.map(|r| r >= epsilon / 2.0),
            unforced_excess: excess,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(n: usize) -> SpectralField {
        SpectralField::from_fn(n, 1.0, |x| (2.0 * PI * x).sin()).unwrap()
    }

    #[test]
    fn energy_of_sine() {
        let e = h1_energy(&sine(32));
        assert!((e - (0.5 + 4.0 * PI * PI * 0.5)).abs() < 1e-12);
        assert_eq!(h1_energy(&SpectralField::zeros(16, 1.0).unwrap()), 0.0);
    }

    #[test]
    fn highfreq_single_mode() {
        let u = SpectralField::from_fn(64, 1.0, |x| (16.0 * PI * x).cos()).unwrap();
        let full = h1_energy(&u);
        assert!((highfreq_energy(&u, 2).unwrap() - full).abs() < 1e-10 * full);
        assert!(highfreq_energy(&u, 3).unwrap() < 1e-20);
        assert!(matches!(
            highfreq_energy(&u, 5),
            Err(SpectralError::BandBeyondDealiased { .. })
        ));
    }

    #[test]
    fn psi_shape() {
        assert_eq!(psi(0.0), 1.0);
        assert_eq!(psi(-1.0), 1.0);
        assert_eq!(psi(1.5), 0.0);
        assert_eq!(psi(7.0), 0.0);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = psi(1.0 + 0.005 * i as f64);
            assert!(v <= prev && (0.0..=1.0).contains(&v));
            assert_eq!(v, psi(-(1.0 + 0.005 * i as f64)));
            prev = v;
        }
    }

    #[test]
    fn tail_of_localized_bump_vanishes() {
        let l = 32.0;
        let u = SpectralField::from_fn(512, l, |x| {
            let y = x - l / 2.0;
            (-4.0 * y * y).exp()
        })
        .unwrap();
        let total = h1_energy(&u);
        let j = tail_energy(&u, &CutoffFunction::smooth(4.0)).unwrap();
        assert!(j <= 1e-10 * total, "{j}");
        let zero = CutoffFunction {
            shape: CutoffShape::Zero,
            scale: 4.0,
        };
        assert!((tail_energy(&u, &zero).unwrap() - total).abs() < 1e-12 * total);
        assert!(matches!(
            tail_energy(&u, &CutoffFunction::smooth(11.0)),
            Err(SpectralError::CutoffTooWide { .. })
        ));
    }

    #[test]
    fn residual_of_trivial_fields() {
        assert_eq!(conservation_residual(&SpectralField::zeros(32, 1.0).unwrap()), 0.0);
        let c = SpectralField::constant(32, 1.0, 0.7).unwrap();
        assert!(conservation_residual(&c).abs() < 1e-15);
    }

    fn record(t: f64, energy: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            energy,
            mean_u: 0.0,
            highfreq: BTreeMap::new(),
            besov_blocks: BTreeMap::new(),
            tail: BTreeMap::new(),
            conservation_residual: 0.0,
            h2_norm: 0.0,
        }
    }

    #[test]
    fn decay_fit_recovers_rate() {
        let recs: Vec<_> = (0..50).map(|i| record(i as f64 * 0.1, 3.0 * (-1.7 * i as f64 * 0.1).exp())).collect();
        let rate = fit_decay_rate(&recs).unwrap();
        assert!((rate - 1.7).abs() < 1e-10);
        let rep = dissipation_monitor(&recs, 0.5, 0.0, Mode::Viscous).unwrap();
        assert_eq!(rep.rate_ok, Some(true));
        assert!(dissipation_monitor(&recs, 0.5, 0.0, Mode::Damped).is_err());
    }

    #[test]
    fn c_star_from_plateau() {
        // Starts at zero and rises to 2: the envelope needs C ≥ 2ε²/‖g‖².
        let recs: Vec<_> = (0..100).map(|i| record(i as f64, 2.0 * (1.0 - (-(i as f64)).exp()))).collect();
        let rep = dissipation_monitor(&recs, 0.5, 1.0, Mode::Viscous).unwrap();
        let c = rep.c_star.unwrap();
        assert!((c - 2.0 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn plateau_uses_last_quarter() {
        let recs: Vec<_> = (0..=8).map(|i| record(i as f64, if i >= 6 { 1.0 } else { 10.0 })).collect();
        assert_eq!(plateau_average(&recs, 0.25), Some(1.0));
    }
}
