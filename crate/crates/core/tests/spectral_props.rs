use std::f64::consts::PI;

use chlab::spectral::trilinear_integral_check;
use chlab::{FrequencyBand, SobolevIndex, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid(sizes: &'static [usize]) -> impl Strategy<Value = Vec<f64>> {
    prop::sample::select(sizes).prop_flat_map(|n| prop::collection::vec(-1.0..1.0f64, n))
}

fn field(values: &[f64]) -> SpectralField {
    SpectralField::analyze(values).unwrap()
}

fn trapezoid(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn parseval_matches_grid_quadrature(v in grid(&[8, 16, 64, 256])) {
        let f = field(&v);
        let grid_sq = trapezoid(&v.iter().map(|x| x * x).collect::<Vec<_>>());
        prop_assert!((f.l2_norm().powi(2) - grid_sq).abs() <= 1e-12 * grid_sq);
    }

    #[test]
    fn second_derivative_is_first_applied_twice(v in grid(&[8, 32, 128])) {
        let f = field(&v);
        let once = f.derivative(2);
        let twice = f.derivative(1).derivative(1);
        prop_assert!(max_diff(&once, &twice) <= 1e-12 * once.max_abs().max(1.0));
    }

    #[test]
    fn helmholtz_inverse_round_trip(v in grid(&[8, 32, 128])) {
        let f = field(&v);
        let back = f.helmholtz_inverse().helmholtz();
        prop_assert!(max_diff(&back, &f) <= 1e-12 * f.max_abs());
    }

    #[test]
    fn disjoint_bands_are_orthogonal(a in grid(&[32, 64]), seed in 0u64..1000) {
        let f = field(&a);
        let g = field(&a.iter().enumerate().map(|(j, x)| x * ((j as u64 + seed) % 7) as f64).collect::<Vec<_>>());
        let lo = f.lp_project(&FrequencyBand::new(0.0, 3.0).unwrap());
        let hi = g.lp_project(&FrequencyBand::new(5.0, 9.0).unwrap());
        let scale = lo.l2_norm() * hi.l2_norm();
        prop_assert!(lo.quadrature_inner(&hi).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn projection_is_idempotent(v in grid(&[16, 64]), cut in 1.0..8.0f64) {
        let f = field(&v);
        let band = FrequencyBand::at_most(cut);
        let once = f.lp_project(&band);
        prop_assert_eq!(once.lp_project(&band), once);
        prop_assert_eq!(f.lp_project(&FrequencyBand::at_most(v.len() as f64 / 2.0)), f);
    }

    #[test]
    fn fractional_derivative_shifts_sobolev_order(
        v in grid(&[16, 64, 128]),
        s1 in 0.0..2.0f64,
        s2 in 0.0..2.0f64,
    ) {
        let u = field(&v);
        let lhs = u
            .fractional_derivative(SobolevIndex::new(s2).unwrap())
            .norms(SobolevIndex::new(s1).unwrap())
            .unwrap()
            .homogeneous;
        let rhs = u.norms(SobolevIndex::new(s1 + s2).unwrap()).unwrap().homogeneous;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }

    #[test]
    fn h1_norm_is_l2_plus_seminorm(v in grid(&[16, 64, 256])) {
        let u = field(&v).lp_project(&FrequencyBand::below(v.len() as f64 / 2.0));
        let v = u.values().to_vec();
        let n = u.norms(SobolevIndex::new(1.0).unwrap()).unwrap();
        let ux = u.derivative(1);
        let l2_sq = trapezoid(&v.iter().map(|x| x * x).collect::<Vec<_>>());
        let h1_sq = trapezoid(&ux.values().iter().map(|x| x * x).collect::<Vec<_>>()) / (4.0 * PI * PI);
        let expected = l2_sq + h1_sq;
        prop_assert!((n.inhomogeneous.powi(2) - expected).abs() <= 1e-12 * expected);
        prop_assert!((n.inhomogeneous.powi(2) - n.l2.powi(2) - n.homogeneous.powi(2)).abs() <= 1e-14 * expected);
    }

    #[test]
    fn trilinear_identity_on_dealiased_fields(
        a in prop::collection::vec(-1.0..1.0f64, 48),
        b in prop::collection::vec(-1.0..1.0f64, 48),
        c in prop::collection::vec(-1.0..1.0f64, 48),
    ) {
        let pad = |v: &[f64]| {
            let modes: Vec<(i64, Complex64)> = v
                .chunks(2)
                .enumerate()
                .map(|(k, p)| (k as i64, Complex64::new(p[0], if k == 0 { 0.0 } else { p[1] })))
                .collect();
            SpectralField::from_modes(128, 1.0, modes).unwrap().dealias()
        };
        let (f, g, h) = (pad(&a), pad(&b), pad(&c));
        let (quad, sum, scale) = trilinear_integral_check(&f, &g, &h);
        prop_assert!((quad - sum).abs() <= 1e-10 * scale.max(1e-300));
    }

    #[test]
    fn derivative_kills_constants(c in -10.0..10.0f64, order in 1u32..4) {
        let f = SpectralField::constant(16, 1.0, c).unwrap();
        prop_assert_eq!(f.derivative(order).max_abs(), 0.0);
    }
}

/// Coefficients `|n|^{-3}`: the `s = 2` blocks, summed directly, behave like
/// `2^{-k/2}` and so stay bounded.
#[test]
fn besov_blocks_of_cubic_decay() {
    let n = 1024;
    let modes: Vec<(i64, Complex64)> = (1..n as i64 / 2)
        .map(|k| (k, Complex64::new((k as f64).powi(-3), 0.0)))
        .collect();
    let f = SpectralField::from_modes(n, 1.0, modes).unwrap();
    let table = f.besov_seminorm(2.0);
    for &(k, v) in &table.blocks {
        let lo = 2f64.powi(k - 1);
        let hi = 2f64.powi(k + 1);
        let direct: f64 = (1..n as i64 / 2)
            .map(|m| m as f64)
            .filter(|&m| m > lo && m <= hi)
            .map(|m| 2.0 * m.powi(-6))
            .sum::<f64>()
            .sqrt()
            * 2f64.powi(2 * k);
        assert!((v - direct).abs() <= 1e-12 * direct, "block {k}: {v} vs {direct}");
    }
    assert!(table.sup.is_finite());
    assert_eq!(table.sup, table.blocks.iter().map(|b| b.1).fold(0.0, f64::max));
    let ratios: Vec<f64> = table.blocks.windows(2).skip(2).map(|w| w[1].1 / w[0].1).collect();
    assert!(ratios.iter().all(|&r| r < 1.0), "{ratios:?}");
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    let deep = ratios[ratios.len() - 2];
    assert!((deep - 0.5f64.sqrt()).abs() < 0.02, "{ratios:?}");
}

#[test]
fn synthesis_is_hermitian() {
    let v: Vec<f64> = (0..32).map(|j| ((j * j) % 11) as f64 - 5.0).collect();
    let f = field(&v);
    for k in 1..16 {
        assert_eq!(f.coeff(-k), f.coeff(k).conj());
    }
}
