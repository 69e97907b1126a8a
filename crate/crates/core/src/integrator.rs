//! Time stepping for `u_t = -Au - F(u) - μu + g`.
//!
//! The constant-coefficient part `-ā∂ₓ² + μ` is diagonal in Fourier space,
//! `λ_k = ā(2πξ_k)² + μ`, and is integrated exactly. The remainder
//! `N(u, t) = ∂ₓ((a-ā)uₓ) - F(u) + g(t)` enters through the discrete
//! Duhamel formula at second order (exponential time differencing,
//! two stages):
//!
//! ```text
//! v  = e^{-λh} u + h φ₁(-λh) N(u, t)
//! u⁺ = v + h φ₂(-λh) (N(v, t+h) - N(u, t))
//! ```
//!
//! with `φ₁(z) = (e^z - 1)/z` and `φ₂(z) = (e^z - 1 - z)/z²`. Steady states
//! of stiff modes are reproduced exactly, and on the mean mode, where `N`
//! reduces to the mean of `g`, the update is the closed form
//! `û₀ e^{-μh} + ḡ (1 - e^{-μh})/μ` (or `û₀ + ḡh` when `μ = 0`).

use std::borrow::Cow;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{h1_energy, DiagnosticSet, DiagnosticsRecord};
use crate::error::IntegrationError;
use crate::operators::{apply_viscosity_fluctuation, ch_nonlinearity, ForcingTerm, Mode, ViscosityProfile};
use crate::spectral::SpectralField;

/// Advective Courant number used by [`stability_budget`].
pub const CFL: f64 = 0.5;

/// Smallest substep tried before a step is declared failed, relative to the
/// requested step.
const MAX_HALVINGS: u32 = 30;

/// A (possibly time-dependent) forcing `g(t, x)`.
pub trait Source: Sync {
    fn forcing(&self, t: f64) -> Cow<'_, SpectralField>;
}

impl Source for ForcingTerm {
    fn forcing(&self, _t: f64) -> Cow<'_, SpectralField> {
        Cow::Borrowed(self.g())
    }
}

/// Forcing given by a closure of time.
pub struct FnSource<F>(pub F);

impl<F> Source for FnSource<F>
where
    F: Fn(f64) -> SpectralField + Sync,
{
    fn forcing(&self, t: f64) -> Cow<'_, SpectralField> {
        Cow::Owned((self.0)(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub t_end: f64,
    pub output_stride: u64,
}

impl TimeGrid {
    /// Number of nominal steps; `dt` is shrunk so they land exactly on
    /// `t_end`.
    pub fn steps(&self) -> u64 {
        if self.t_end <= 0.0 {
            0
        } else {
            (self.t_end / self.dt - 1e-9).ceil().max(1.0) as u64
        }
    }

    pub fn effective_dt(&self) -> f64 {
        match self.steps() {
            0 => self.dt,
            n => self.t_end / n as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState {
    pub t: f64,
    pub u: SpectralField,
    pub step_count: u64,
}

impl TrajectoryState {
    pub fn new(u: SpectralField) -> Self {
        Self {
            t: 0.0,
            u: u.dealias(),
            step_count: 0,
        }
    }
}

/// Largest step the explicit remainder tolerates:
/// `min(π²/(max|a-ā| (2πk_max/L)²), CFL·(L/N)/max|u|)` with `k_max = N/3`.
pub fn stability_budget(u: &SpectralField, p: &ViscosityProfile, mode: Mode) -> f64 {
    let diffusive = if mode == Mode::InviscidTest {
        f64::INFINITY
    } else {
        let fluct = p.max_fluctuation();
        if fluct > 0.0 {
            let kmax = 2.0 * PI * (u.n() / 3) as f64 / u.length();
            0.5 / (fluct * kmax * kmax / (2.0 * PI * PI))
        } else {
            f64::INFINITY
        }
    };
    let umax = u.max_abs();
    let advective = if umax > 0.0 {
        CFL * (u.length() / u.n() as f64) / umax
    } else {
        f64::INFINITY
    };
    diffusive.min(advective)
}

/// `φ₁(z) = (e^z - 1)/z`, continuous at 0.
pub fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.exp_m1() / z
    }
}

/// `φ₂(z) = (e^z - 1 - z)/z²`, by its Taylor series near 0.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        let mut term = 0.5;
        let mut sum = 0.5;
        for k in 3..10 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// The dynamics to advance: profile, forcing and which terms are active.
pub struct Integrator<'a> {
    profile: &'a ViscosityProfile,
    source: &'a dyn Source,
    mu: f64,
    mode: Mode,
    nonlinear: bool,
}

impl<'a> Integrator<'a> {
    pub fn new(profile: &'a ViscosityProfile, forcing: &'a ForcingTerm, mode: Mode) -> Self {
        Self {
            profile,
            source: forcing,
            mu: forcing.mu(),
            mode,
            nonlinear: true,
        }
    }

    /// Use an arbitrary source; `mu` only acts in damped mode.
    pub fn with_source(
        profile: &'a ViscosityProfile,
        source: &'a dyn Source,
        mu: f64,
        mode: Mode,
    ) -> Self {
        Self {
            profile,
            source,
            mu,
            mode,
            nonlinear: true,
        }
    }

    /// Switch the Camassa–Holm nonlinearity off (linear test problems).
    pub fn without_nonlinearity(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    fn damping(&self) -> f64 {
        if self.mode == Mode::Damped {
            self.mu
        } else {
            0.0
        }
    }

    fn mean_viscosity(&self) -> f64 {
        if self.mode == Mode::InviscidTest {
            0.0
        } else {
            self.profile.mean()
        }
    }

    /// The explicitly treated part `∂ₓ((a-ā)uₓ) - F(u) + g(t)`.
    fn remainder(&self, u: &SpectralField, t: f64) -> SpectralField {
        let mut r = if self.nonlinear {
            ch_nonlinearity(u).scale(-1.0)
        } else {
            SpectralField::zeros(u.n(), u.length()).expect("valid grid")
        };
        if self.mode != Mode::InviscidTest {
            if self.profile.max_fluctuation() > 0.0 {
                r = r.axpy(-1.0, &apply_viscosity_fluctuation(self.profile, u));
            }
            r = r.axpy(1.0, &self.source.forcing(t));
        }
        r
    }

    /// `(e^{-λh}, hφ₁(-λh), hφ₂(-λh))` for every stored mode.
    fn exponential_weights(&self, u: &SpectralField, h: f64) -> Vec<(f64, f64, f64)> {
        let abar = self.mean_viscosity();
        let mu = self.damping();
        (0..=u.n() / 2)
            .map(|k| {
                let w = 2.0 * PI * u.frequency(k as i64);
                let z = -(abar * w * w + mu) * h;
                (z.exp(), h * phi1(z), h * phi2(z))
            })
            .collect()
    }

    pub fn budget(&self, u: &SpectralField) -> f64 {
        stability_budget(u, self.profile, self.mode)
    }

    /// One step of size `h`, without step-size control.
    pub fn step(
        &self,
        state: &TrajectoryState,
        h: f64,
    ) -> Result<TrajectoryState, IntegrationError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(IntegrationError::InvalidTimeStep(h));
        }
        let u = &state.u;
        let w = self.exponential_weights(u, h);
        let n0 = self.remainder(u, state.t);

        let stage: Vec<Complex64> = u
            .half_spectrum()
            .iter()
            .zip(n0.half_spectrum())
            .zip(&w)
            .map(|((&c, &r), &(e, p1, _))| c * e + r * p1)
            .collect();
        let v = SpectralField::from_half_spectrum(u.n(), u.length(), stage)
            .expect("same grid");
        let n1 = self.remainder(&v, state.t + h);

        let next: Vec<Complex64> = v
            .half_spectrum()
            .iter()
            .zip(n0.half_spectrum())
            .zip(n1.half_spectrum())
            .zip(&w)
            .map(|(((&c, &a), &b), &(_, _, p2))| c + (b - a) * p2)
            .collect();

        let u_next = SpectralField::from_half_spectrum(u.n(), u.length(), next)
            .expect("same grid")
            .dealias();
        if !u_next.is_finite() {
            return Err(IntegrationError::NonFiniteState {
                t: state.t + h,
                step: state.step_count + 1,
                last_energy: h1_energy(u),
            });
        }
        Ok(TrajectoryState {
            t: state.t + h,
            u: u_next,
            step_count: state.step_count + 1,
        })
    }

    /// Advance by `dt`, splitting into halved substeps whenever the stability
    /// budget (re-evaluated before every substep) or a non-finite result
    /// demands it.
    pub fn advance(
        &self,
        state: &TrajectoryState,
        dt: f64,
    ) -> Result<TrajectoryState, IntegrationError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(IntegrationError::InvalidTimeStep(dt));
        }
        let target = state.t + dt;
        let min_step = dt / 2f64.powi(MAX_HALVINGS as i32);
        let mut current = state.clone();
        let mut h = dt;
        loop {
            let remaining = target - current.t;
            if remaining <= 1e-12 * dt {
                break;
            }
            h = h.min(remaining);
            let budget = self.budget(&current.u);
            while h > budget && h > min_step {
                h *= 0.5;
            }
            match self.step(&current, h) {
                Ok(next) => current = next,
                Err(_) if h > min_step => h *= 0.5,
                Err(e) => return Err(e),
            }
        }
        current.t = target;
        Ok(current)
    }
}

/// Convenience wrapper for a single step of the full dynamics.
pub fn step(
    state: &TrajectoryState,
    p: &ViscosityProfile,
    f: &ForcingTerm,
    dt: f64,
    mode: Mode,
) -> Result<TrajectoryState, IntegrationError> {
    Integrator::new(p, f, mode).step(state, dt)
}

/// Everything needed to run one trajectory.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub profile: ViscosityProfile,
    pub forcing: ForcingTerm,
    pub mode: Mode,
    pub initial: SpectralField,
    pub time: TimeGrid,
    pub diagnostics: DiagnosticSet,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<TrajectoryState>,
    pub records: Vec<DiagnosticsRecord>,
}

impl Trajectory {
    pub fn final_state(&self) -> &TrajectoryState {
        self.snapshots.last().expect("at least the initial state")
    }
}

/// Run an experiment, recording a snapshot and a diagnostics row every
/// `output_stride` nominal steps (and always at `t = 0` and `t_end`).
pub fn run(exp: &Experiment) -> Result<Trajectory, IntegrationError> {
    let integrator = Integrator::new(&exp.profile, &exp.forcing, exp.mode);
    let steps = exp.time.steps();
    let dt = exp.time.effective_dt();
    let stride = exp.time.output_stride.max(1);
    let times: Vec<f64> = (0..=steps)
        .filter(|&i| i % stride == 0 || i == steps)
        .map(|i| if i == steps { exp.time.t_end } else { i as f64 * dt })
        .collect();
    run_sampled(&integrator, &exp.initial, &times, dt, &exp.diagnostics)
}

/// Integrate from `t = 0` through the increasing `times`, recording at each
/// one. Steps of at most `dt` are taken between samples.
pub fn run_sampled(
    integrator: &Integrator<'_>,
    initial: &SpectralField,
    times: &[f64],
    dt: f64,
    set: &DiagnosticSet,
) -> Result<Trajectory, IntegrationError> {
    let mut state = TrajectoryState::new(initial.clone());
    let mut snapshots = Vec::with_capacity(times.len());
    let mut records = Vec::with_capacity(times.len());
    let diag = |state: &TrajectoryState| {
        DiagnosticsRecord::compute(state.t, &state.u, set).map_err(|_| {
            IntegrationError::NonFiniteState {
                t: state.t,
                step: state.step_count,
                last_energy: h1_energy(&state.u),
            }
        })
    };
    for &t in times {
        let span = t - state.t;
        if span > 0.0 {
            let n = (span / dt - 1e-9).ceil().max(1.0) as u64;
            let h = span / n as f64;
            for i in 0..n {
                let goal = state.t + h;
                state = integrator.advance(&state, h)?;
                if i + 1 == n {
                    state.t = t;
                } else {
                    state.t = goal;
                }
            }
        }
        let record = diag(&state)?;
        if !record.is_finite() {
            return Err(IntegrationError::NonFiniteState {
                t: state.t,
                step: state.step_count,
                last_energy: records
                    .last()
                    .map(|r: &DiagnosticsRecord| r.energy)
                    .unwrap_or(f64::NAN),
            });
        }
        records.push(record);
        snapshots.push(state.clone());
    }
    if snapshots.is_empty() {
        snapshots.push(state.clone());
        records.push(diag(&state)?);
    }
    Ok(Trajectory { snapshots, records })
}
