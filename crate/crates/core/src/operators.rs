//! Right-hand side of the forced, viscous (optionally damped) Camassa–Holm
//! equation
//!
//! ```text
//! u_t + μu + F(u) = ∂ₓ(a(x) uₓ) + g(x),
//! F(u) = ½∂ₓ(u²) + ∂ₓ(1-∂ₓ²)⁻¹[uₓ²/2 + u²].
//! ```
//!
//! Every product is formed on the grid and truncated by the 2/3 rule, so for
//! dealiased inputs the quadratic terms are exact.

use serde::{Deserialize, Serialize};

use crate::error::{ForcingError, ProfileError};
use crate::spectral::SpectralField;

/// The Camassa–Holm nonlinearity `F(u) = Λ(u, u)`.
pub fn ch_nonlinearity(u: &SpectralField) -> SpectralField {
    let ux = u.derivative(1);
    let uu = u.multiply(u);
    let source = ux.multiply(&ux).axpy(2.0, &uu).scale(0.5);
    uu.derivative(1)
        .scale(0.5)
        .axpy(1.0, &source.helmholtz_inverse().derivative(1))
}

/// The symmetric bilinear form `Λ(u,v) = ½∂ₓ(uv) + ∂ₓ(1-∂ₓ²)⁻¹[uₓvₓ/2 + uv]`.
pub fn ch_bilinear(u: &SpectralField, v: &SpectralField) -> SpectralField {
    let uv = u.multiply(v);
    let source = u
        .derivative(1)
        .multiply(&v.derivative(1))
        .axpy(2.0, &uv)
        .scale(0.5);
    uv.derivative(1)
        .scale(0.5)
        .axpy(1.0, &source.helmholtz_inverse().derivative(1))
}

/// Which structural hypothesis on `a` a profile is declared to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuralFlag {
    /// `max|a'| ≤ δε`.
    SmallLipschitz,
    /// `a'' ≤ 2a` pointwise.
    SecondDerivativeBound,
    None,
}

/// Grid measurements backing the hypothesis checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeasurements {
    pub min_a: f64,
    pub max_a: f64,
    pub max_slope: f64,
    /// `max(a'' - 2a)`; nonpositive when the second-derivative bound holds.
    pub curvature_excess: f64,
}

impl ProfileMeasurements {
    pub fn measure(a: &SpectralField) -> Self {
        let vals = a.values();
        let min_a = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max_a = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let max_slope = a.derivative(1).max_abs();
        let curvature_excess = a
            .derivative(2)
            .values()
            .iter()
            .zip(vals)
            .map(|(a2, a0)| a2 - 2.0 * a0)
            .fold(f64::NEG_INFINITY, f64::max);
        Self {
            min_a,
            max_a,
            max_slope,
            curvature_excess,
        }
    }

    pub fn is_coercive(&self, epsilon: f64) -> bool {
        epsilon > 0.0 && epsilon < self.min_a && self.max_a < 1.0 / epsilon
    }

    pub fn lipschitz_ok(&self, epsilon: f64, delta: f64) -> bool {
        self.max_slope <= delta * epsilon
    }

    pub fn curvature_ok(&self) -> bool {
        self.curvature_excess <= 0.0
    }
}

/// A validated viscosity coefficient `a(x)` with its bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ViscosityProfile {
    a: SpectralField,
    fluctuation: SpectralField,
    epsilon: f64,
    delta: f64,
    flag: StructuralFlag,
    measurements: ProfileMeasurements,
}

/// Check coercivity `ε < a < 1/ε` and the declared structural condition on
/// the grid. The coefficient is truncated to the dealiased band first so the
/// checks see exactly the `a` used by the solver.
pub fn validate_profile(
    a: &SpectralField,
    epsilon: f64,
    delta: f64,
    flag: StructuralFlag,
) -> Result<ViscosityProfile, ProfileError> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(ProfileError::InvalidDelta(delta));
    }
    let a = a.dealias();
    let m = ProfileMeasurements::measure(&a);
    if !m.is_coercive(epsilon) {
        return Err(ProfileError::CoercivityViolation {
            epsilon,
            min_a: m.min_a,
            max_a: m.max_a,
        });
    }
    match flag {
        StructuralFlag::SmallLipschitz if !m.lipschitz_ok(epsilon, delta) => {
            return Err(ProfileError::LipschitzBudgetExceeded {
                max_slope: m.max_slope,
                budget: delta * epsilon,
            })
        }
        StructuralFlag::SecondDerivativeBound if !m.curvature_ok() => {
            return Err(ProfileError::StructuralConditionFailed {
                excess: m.curvature_excess,
            })
        }
        _ => {}
    }
    let mean = SpectralField::constant(a.n(), a.length(), a.mean())
        .expect("grid already validated");
    Ok(ViscosityProfile {
        fluctuation: &a - &mean,
        a,
        epsilon,
        delta,
        flag,
        measurements: m,
    })
}

impl ViscosityProfile {
    /// Constant viscosity `a ≡ value`.
    pub fn constant(
        n: usize,
        length: f64,
        value: f64,
        epsilon: f64,
    ) -> Result<Self, ProfileError> {
        let a = SpectralField::constant(n, length, value)?;
        validate_profile(&a, epsilon, 0.0, StructuralFlag::SmallLipschitz)
    }

    pub fn coefficient(&self) -> &SpectralField {
        &self.a
    }

    /// `a - ā`.
    pub fn fluctuation(&self) -> &SpectralField {
        &self.fluctuation
    }

    /// Mean viscosity `ā`.
    pub fn mean(&self) -> f64 {
        self.a.mean()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn flag(&self) -> StructuralFlag {
        self.flag
    }

    pub fn measurements(&self) -> &ProfileMeasurements {
        &self.measurements
    }

    /// `max|a - ā|` on the grid.
    pub fn max_fluctuation(&self) -> f64 {
        self.fluctuation.max_abs()
    }

    /// Succeeds when at least one of the two structural options holds.
    pub fn check_either_structure(&self) -> Result<(), ProfileError> {
        let m = &self.measurements;
        if m.lipschitz_ok(self.epsilon, self.delta) || m.curvature_ok() {
            Ok(())
        } else {
            Err(ProfileError::NoStructuralOption {
                max_slope: m.max_slope,
                budget: self.delta * self.epsilon,
                excess: m.curvature_excess,
            })
        }
    }

    /// Succeeds when the small-Lipschitz condition holds regardless of the
    /// declared flag.
    pub fn check_small_lipschitz(&self) -> Result<(), ProfileError> {
        let m = &self.measurements;
        if m.lipschitz_ok(self.epsilon, self.delta) {
            Ok(())
        } else {
            Err(ProfileError::LipschitzBudgetExceeded {
                max_slope: m.max_slope,
                budget: self.delta * self.epsilon,
            })
        }
    }
}

/// `A u = -∂ₓ(a uₓ)`.
pub fn apply_viscosity(p: &ViscosityProfile, u: &SpectralField) -> SpectralField {
    p.a.multiply(&u.derivative(1)).derivative(1).scale(-1.0)
}

/// `-∂ₓ((a - ā) uₓ)`, the part of `A` left after removing `-ā∂ₓ²`.
pub fn apply_viscosity_fluctuation(p: &ViscosityProfile, u: &SpectralField) -> SpectralField {
    p.fluctuation
        .multiply(&u.derivative(1))
        .derivative(1)
        .scale(-1.0)
}

/// Static forcing `g(x)` together with the damping coefficient `μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingTerm {
    g: SpectralField,
    mean_zero: bool,
    mu: f64,
}

impl ForcingTerm {
    pub fn new(g: SpectralField, mean_zero: bool, mu: f64) -> Result<Self, ForcingError> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(ForcingError::InvalidDamping(mu));
        }
        let g = g.dealias();
        if mean_zero && g.mean().abs() > 1e-14 {
            return Err(ForcingError::NonzeroMean { mean: g.mean() });
        }
        Ok(Self { g, mean_zero, mu })
    }

    /// No forcing, no damping.
    pub fn none(n: usize, length: f64) -> Self {
        Self {
            g: SpectralField::zeros(n, length).expect("valid grid"),
            mean_zero: true,
            mu: 0.0,
        }
    }

    pub fn g(&self) -> &SpectralField {
        &self.g
    }

    pub fn mean_zero(&self) -> bool {
        self.mean_zero
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn with_mu(mut self, mu: f64) -> Result<Self, ForcingError> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(ForcingError::InvalidDamping(mu));
        }
        self.mu = mu;
        Ok(self)
    }
}

/// Dynamics selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Viscous,
    Damped,
    /// `u_t + F(u) = 0`; profile and forcing are ignored.
    InviscidTest,
}

/// `u_t = -F(u) - Au + g - μu`, with terms switched on by `mode`.
pub fn rhs(
    u: &SpectralField,
    p: &ViscosityProfile,
    f: &ForcingTerm,
    mode: Mode,
) -> SpectralField {
    let nonlinear = ch_nonlinearity(u).scale(-1.0);
    match mode {
        Mode::InviscidTest => nonlinear,
        Mode::Viscous => nonlinear
            .axpy(-1.0, &apply_viscosity(p, u))
            .axpy(1.0, &f.g),
        Mode::Damped => nonlinear
            .axpy(-1.0, &apply_viscosity(p, u))
            .axpy(1.0, &f.g)
            .axpy(-f.mu, u),
    }
}
