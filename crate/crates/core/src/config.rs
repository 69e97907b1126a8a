//! Experiment configuration files.
//!
//! The format is TOML. A minimal file:
//!
//! ```toml
//! mode = "viscous"
//!
//! [domain]
//! resolution = 256
//!
//! [time]
//! dt = 0.001        # or "auto"
//! t_end = 10.0
//!
//! [viscosity]
//! expr = "1"
//! epsilon = 0.5
//!
//! [initial]
//! recipe = "expression"
//! expr = "sin(2*pi*x)"
//! ```
//!
//! Fields given as `expr` are closed-form expressions in `x`; alternatively
//! `coefficients = [[k, c, s], ...]` means `Σ c cos(2πkx/L) + s sin(2πkx/L)`.
//! Parsing collects every violation before reporting.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::DiagnosticSet;
use crate::error::SpectralError;
use crate::expr::Expression;
use crate::harness::{BallRecipe, EnsembleSpec, RunSettings, VerdictThresholds};
use crate::initial::{random_bumps, random_h1};
use crate::integrator::{stability_budget, Experiment, TimeGrid};
use crate::operators::{
    validate_profile, ForcingTerm, Mode, ProfileMeasurements, StructuralFlag, ViscosityProfile,
};
use crate::spectral::SpectralField;

/// Upper bound for `dt = "auto"`.
pub const AUTO_DT_CAP: f64 = 1e-2;
/// Mean of `g` treated as zero.
pub const MEAN_TOLERANCE: f64 = 1e-14;

/// Analytical assumption a configuration can break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Coercivity,
    SmallLipschitz,
    SecondDerivativeBound,
    EitherStructure,
    MeanZeroForcing,
    MeanZeroData,
    PositiveDamping,
    ProxyGeometry,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::Coercivity => "coercivity of the viscosity, ε < a(x) < 1/ε",
            Hypothesis::SmallLipschitz => "small Lipschitz constant of the viscosity, max|a'| ≤ δε",
            Hypothesis::SecondDerivativeBound => "curvature bound on the viscosity, a'' ≤ 2a",
            Hypothesis::EitherStructure => {
                "damped runs need max|a'| ≤ δε or a'' ≤ 2a for the viscosity"
            }
            Hypothesis::MeanZeroForcing => "mean-zero forcing, ∫g = 0, on the periodic interval",
            Hypothesis::MeanZeroData => "mean-zero initial data on the periodic interval",
            Hypothesis::PositiveDamping => "positive damping μ > 0 in damped mode",
            Hypothesis::ProxyGeometry => "tail cutoffs must fit the box, L ≥ 3N",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigViolation {
    pub field: String,
    pub hypothesis: Option<Hypothesis>,
    pub message: String,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)?;
        if let Some(h) = self.hypothesis {
            write!(f, " (violates {h})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{} violation(s):\n{}", .0.len(), .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ConfigViolation>),
}

impl ConfigError {
    pub fn violations(&self) -> &[ConfigViolation] {
        match self {
            ConfigError::Invalid(v) => v,
            ConfigError::Syntax { .. } => &[],
        }
    }

    pub fn breaks(&self, h: Hypothesis) -> bool {
        self.violations().iter().any(|v| v.hypothesis == Some(h))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeStep {
    Fixed(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub resolution: usize,
    #[serde(default = "one")]
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: TimeStep,
    pub t_end: f64,
    #[serde(default = "one_u64")]
    pub output_stride: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViscositySection {
    pub expr: Option<String>,
    pub coefficients: Option<Vec<[f64; 3]>>,
    pub epsilon: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_flag")]
    pub flag: StructuralFlag,
}

impl Default for ViscositySection {
    fn default() -> Self {
        Self {
            expr: Some("1".into()),
            coefficients: None,
            epsilon: 0.5,
            delta: 0.0,
            flag: StructuralFlag::SmallLipschitz,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    pub expr: Option<String>,
    pub coefficients: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub mean_zero: bool,
    #[serde(default)]
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSection {
    Expression { expr: String },
    RandomH1 { radius: f64, seed: u64 },
    RandomBumps { radius: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            name: default_name(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub radii: Vec<f64>,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_recipe")]
    pub recipe: BallRecipe,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "one_usize")]
    pub workers: usize,
    /// Dyadic `k` range over which the high-frequency curve must decay
    /// geometrically.
    pub highfreq_range: Option<[i32; 2]>,
    #[serde(default = "default_ratio_bound")]
    pub ratio_bound: f64,
    #[serde(default = "default_plateau_bound")]
    pub plateau_bound: f64,
    /// Horizons compared for the high-frequency limsup; defaults to
    /// `t_end/2` and `t_end`.
    #[serde(default)]
    pub horizons: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub mode: Mode,
    pub domain: DomainSection,
    pub time: TimeSection,
    #[serde(default)]
    pub viscosity: ViscositySection,
    #[serde(default)]
    pub forcing: ForcingSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub diagnostics: DiagnosticSet,
    #[serde(default)]
    pub output: OutputSection,
    pub ensemble: Option<EnsembleSection>,
}

fn one() -> f64 {
    1.0
}
fn one_u64() -> u64 {
    1
}
fn one_usize() -> usize {
    1
}
fn default_flag() -> StructuralFlag {
    StructuralFlag::SmallLipschitz
}
fn default_dir() -> String {
    "out".into()
}
fn default_name() -> String {
    "run".into()
}
fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}
fn default_recipe() -> BallRecipe {
    BallRecipe::RandomH1
}
fn default_samples() -> usize {
    101
}
fn default_ratio_bound() -> f64 {
    0.75
}
fn default_plateau_bound() -> f64 {
    1.5
}

/// Parse and validate a configuration file.
pub fn parse_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let cfg: SimulationConfig = toml::from_str(text).map_err(|e| {
        let start = e.span().map(|s| s.start).unwrap_or(0).min(text.len());
        let before = &text[..start];
        let line = before.matches('\n').count() + 1;
        let column = start - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
        ConfigError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let violations = cfg.validate();
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Invalid(violations))
    }
}

fn violation(field: &str, hypothesis: Option<Hypothesis>, message: String) -> ConfigViolation {
    ConfigViolation {
        field: field.into(),
        hypothesis,
        message,
    }
}

/// Sample an `expr`/`coefficients` pair on the grid.
pub fn field_from_spec(
    expr: Option<&str>,
    coefficients: Option<&[[f64; 3]]>,
    n: usize,
    length: f64,
) -> Result<SpectralField, String> {
    match (expr, coefficients) {
        (Some(_), Some(_)) => Err("give either `expr` or `coefficients`, not both".into()),
        (None, None) => Err("missing `expr` or `coefficients`".into()),
        (Some(e), None) => Expression::parse(e)
            .and_then(|e| e.sample(n, length))
            .map_err(|e| e.to_string()),
        (None, Some(cs)) => {
            let mut modes = Vec::with_capacity(cs.len());
            for &[k, c, s] in cs {
                if k.fract() != 0.0 || k < 0.0 || k > (n / 2) as f64 {
                    return Err(format!("mode {k} must be an integer in 0..={}", n / 2));
                }
                let z = if k == 0.0 {
                    num_complex::Complex64::new(c, 0.0)
                } else {
                    num_complex::Complex64::new(c / 2.0, -s / 2.0)
                };
                modes.push((k as i64, z));
            }
            let mut acc = SpectralField::zeros(n, length).map_err(|e| e.to_string())?;
            for (k, z) in modes {
                let single =
                    SpectralField::from_modes(n, length, vec![(k, z)]).map_err(|e| e.to_string())?;
                acc = &acc + &single;
            }
            Ok(acc)
        }
    }
}

impl SimulationConfig {
    pub fn n(&self) -> usize {
        self.domain.resolution
    }

    pub fn length(&self) -> f64 {
        self.domain.length
    }

    fn grid_ok(&self) -> bool {
        let n = self.domain.resolution;
        n >= 8 && n.is_power_of_two() && self.domain.length.is_finite() && self.domain.length > 0.0
    }

    /// Every violation in the file, in a stable order.
    pub fn validate(&self) -> Vec<ConfigViolation> {
        let mut out = Vec::new();
        let (n, length) = (self.n(), self.length());
        if !(n >= 8 && n.is_power_of_two()) {
            out.push(violation(
                "domain.resolution",
                None,
                format!("{n} must be a power of two, at least 8"),
            ));
        }
        if !(length.is_finite() && length > 0.0) {
            out.push(violation("domain.length", None, format!("{length} must be positive")));
        }
        match &self.time.dt {
            TimeStep::Fixed(dt) if !(dt.is_finite() && *dt > 0.0) => {
                out.push(violation("time.dt", None, format!("{dt} must be positive")))
            }
            TimeStep::Named(s) if s != "auto" => out.push(violation(
                "time.dt",
                None,
                format!("`{s}` is neither a number nor \"auto\""),
            )),
            _ => {}
        }
        if !(self.time.t_end.is_finite() && self.time.t_end >= 0.0) {
            out.push(violation(
                "time.t_end",
                None,
                format!("{} must be finite and nonnegative", self.time.t_end),
            ));
        }
        if self.time.output_stride == 0 {
            out.push(violation("time.output_stride", None, "must be at least 1".into()));
        }
        let grid = self.grid_ok();

        let v = &self.viscosity;
        if !(v.epsilon > 0.0 && v.epsilon < 1.0) {
            out.push(violation(
                "viscosity.epsilon",
                Some(Hypothesis::Coercivity),
                format!("ε = {} must lie in (0, 1)", v.epsilon),
            ));
        }
        if !(v.delta.is_finite() && v.delta >= 0.0) {
            out.push(violation("viscosity.delta", None, format!("δ = {} must be ≥ 0", v.delta)));
        }
        if grid {
            match field_from_spec(v.expr.as_deref(), v.coefficients.as_deref(), n, length) {
                Err(m) => out.push(violation("viscosity", None, m)),
                Ok(a) => self.check_viscosity(&a.dealias(), &mut out),
            }
        }

        let f = &self.forcing;
        if !(f.mu.is_finite() && f.mu >= 0.0) {
            out.push(violation("forcing.mu", None, format!("μ = {} must be ≥ 0", f.mu)));
        }
        if self.mode == Mode::Damped && f.mu == 0.0 {
            out.push(violation(
                "forcing.mu",
                Some(Hypothesis::PositiveDamping),
                "damped mode with μ = 0".into(),
            ));
        }
        if grid {
            let expr = f.expr.as_deref().or(f.coefficients.is_none().then_some("0"));
            match field_from_spec(expr, f.coefficients.as_deref(), n, length) {
                Err(m) => out.push(violation("forcing", None, m)),
                Ok(g) => {
                    let mean = g.mean();
                    let nonzero = mean.abs() > MEAN_TOLERANCE * g.max_abs().max(1.0);
                    if nonzero && (f.mean_zero || self.mode == Mode::Viscous) {
                        let why = if self.mode == Mode::Viscous {
                            "viscous attractor runs"
                        } else {
                            "forcing declared mean_zero"
                        };
                        out.push(violation(
                            "forcing",
                            Some(Hypothesis::MeanZeroForcing),
                            format!("∫g = {mean:e} but {why} require a mean-zero g"),
                        ));
                    }
                }
            }
        }

        match &self.initial {
            InitialSection::Expression { expr } => {
                if grid {
                    if let Err(m) = field_from_spec(Some(expr), None, n, length) {
                        out.push(violation("initial.expr", None, m));
                    }
                }
            }
            InitialSection::RandomH1 { radius, .. } | InitialSection::RandomBumps { radius, .. } => {
                if !(radius.is_finite() && *radius >= 0.0) {
                    out.push(violation(
                        "initial.radius",
                        None,
                        format!("{radius} must be finite and nonnegative"),
                    ));
                }
            }
        }

        if grid {
            if let Err(e) = self.diagnostics.validate(n, length) {
                let h = matches!(e, SpectralError::CutoffTooWide { .. })
                    .then_some(Hypothesis::ProxyGeometry);
                out.push(violation("diagnostics", h, e.to_string()));
            }
        }

        if let Some(e) = &self.ensemble {
            if e.radii.is_empty() || e.radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
                out.push(violation(
                    "ensemble.radii",
                    None,
                    "need at least one finite nonnegative radius".into(),
                ));
            }
            if e.count == 0 {
                out.push(violation("ensemble.count", None, "must be at least 1".into()));
            }
            if e.samples < 2 {
                out.push(violation("ensemble.samples", None, "must be at least 2".into()));
            }
            if e.workers == 0 {
                out.push(violation("ensemble.workers", None, "must be at least 1".into()));
            }
            if self.mode == Mode::Viscous && e.recipe != BallRecipe::RandomH1 {
                out.push(violation(
                    "ensemble.recipe",
                    Some(Hypothesis::MeanZeroData),
                    format!("{:?} draws data with nonzero mean", e.recipe),
                ));
            }
            if let Some([lo, hi]) = e.highfreq_range {
                if lo >= hi {
                    out.push(violation(
                        "ensemble.highfreq_range",
                        None,
                        format!("[{lo}, {hi}] is empty"),
                    ));
                }
                for k in lo..=hi {
                    if !self.diagnostics.highfreq_k.contains(&k) {
                        out.push(violation(
                            "ensemble.highfreq_range",
                            None,
                            format!("k = {k} is not in diagnostics.highfreq_k"),
                        ));
                        break;
                    }
                }
            }
            if e.horizons.windows(2).any(|w| w[1] <= w[0])
                || e
                    .horizons
                    .iter()
                    .any(|&h| !(h >= 0.0 && h <= self.time.t_end))
            {
                out.push(violation(
                    "ensemble.horizons",
                    None,
                    format!("must increase inside [0, {}]", self.time.t_end),
                ));
            }
        }
        out
    }

    fn check_viscosity(&self, a: &SpectralField, out: &mut Vec<ConfigViolation>) {
        let v = &self.viscosity;
        let m = ProfileMeasurements::measure(a);
        if v.epsilon > 0.0 && v.epsilon < 1.0 && !m.is_coercive(v.epsilon) {
            out.push(violation(
                "viscosity",
                Some(Hypothesis::Coercivity),
                format!(
                    "a ranges over [{:.6}, {:.6}], outside ({}, {})",
                    m.min_a,
                    m.max_a,
                    v.epsilon,
                    1.0 / v.epsilon
                ),
            ));
        }
        let lip = m.lipschitz_ok(v.epsilon, v.delta);
        let lip_msg = || {
            format!(
                "max|a'| = {:.6} exceeds δε = {:.6}",
                m.max_slope,
                v.delta * v.epsilon
            )
        };
        match v.flag {
            StructuralFlag::SmallLipschitz if !lip => {
                out.push(violation("viscosity.flag", Some(Hypothesis::SmallLipschitz), lip_msg()))
            }
            StructuralFlag::SecondDerivativeBound if !m.curvature_ok() => out.push(violation(
                "viscosity.flag",
                Some(Hypothesis::SecondDerivativeBound),
                format!("a'' - 2a reaches {:.6} > 0", m.curvature_excess),
            )),
            _ => {}
        }
        match self.mode {
            Mode::Viscous if !lip && v.flag != StructuralFlag::SmallLipschitz => out.push(violation(
                "viscosity",
                Some(Hypothesis::SmallLipschitz),
                format!("viscous runs need it: {}", lip_msg()),
            )),
            Mode::Damped if !lip && !m.curvature_ok() => out.push(violation(
                "viscosity",
                Some(Hypothesis::EitherStructure),
                format!(
                    "max|a'| = {:.6} > δε = {:.6} and a'' - 2a reaches {:.6}",
                    m.max_slope,
                    v.delta * v.epsilon,
                    m.curvature_excess
                ),
            )),
            _ => {}
        }
    }

    /// The normalized configuration as TOML, for embedding in outputs.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn built<T, E: fmt::Display>(field: &str, r: Result<T, E>) -> Result<T, ConfigError> {
        r.map_err(|e| ConfigError::Invalid(vec![violation(field, None, e.to_string())]))
    }

    pub fn profile(&self) -> Result<ViscosityProfile, ConfigError> {
        let v = &self.viscosity;
        let a = Self::built(
            "viscosity",
            field_from_spec(v.expr.as_deref(), v.coefficients.as_deref(), self.n(), self.length()),
        )?;
        Self::built("viscosity", validate_profile(&a, v.epsilon, v.delta, v.flag))
    }

    pub fn forcing(&self) -> Result<ForcingTerm, ConfigError> {
        let f = &self.forcing;
        let expr = f.expr.as_deref().or(f.coefficients.is_none().then_some("0"));
        let g = Self::built(
            "forcing",
            field_from_spec(expr, f.coefficients.as_deref(), self.n(), self.length()),
        )?;
        let mu = if self.mode == Mode::Damped { f.mu } else { 0.0 };
        Self::built("forcing", ForcingTerm::new(g, f.mean_zero, mu))
    }

    pub fn initial_field(&self, seed_offset: u64) -> Result<SpectralField, ConfigError> {
        let (n, l) = (self.n(), self.length());
        let u = match &self.initial {
            InitialSection::Expression { expr } => field_from_spec(Some(expr), None, n, l),
            InitialSection::RandomH1 { radius, seed } => {
                random_h1(n, l, *radius, seed + seed_offset).map_err(|e| e.to_string())
            }
            InitialSection::RandomBumps { radius, seed } => {
                random_bumps(n, l, *radius, seed + seed_offset).map_err(|e| e.to_string())
            }
        };
        Self::built("initial", u)
    }

    /// `dt`, resolving `"auto"` against the stability budget of `u`.
    pub fn resolve_dt(&self, p: &ViscosityProfile, u: &SpectralField) -> f64 {
        match self.time.dt {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Named(_) => stability_budget(u, p, self.mode).min(AUTO_DT_CAP),
        }
    }

    pub fn experiment(&self, seed_offset: u64) -> Result<Experiment, ConfigError> {
        let profile = self.profile()?;
        let forcing = self.forcing()?;
        let initial = self.initial_field(seed_offset)?;
        let dt = self.resolve_dt(&profile, &initial);
        Ok(Experiment {
            profile,
            forcing,
            mode: self.mode,
            initial,
            time: TimeGrid {
                dt,
                t_end: self.time.t_end,
                output_stride: self.time.output_stride,
            },
            diagnostics: self.diagnostics.clone(),
        })
    }

    /// One ensemble per radius, seeds shifted by `seed_offset`.
    pub fn ensemble_specs(&self, seed_offset: u64) -> Option<Vec<EnsembleSpec>> {
        let e = self.ensemble.as_ref()?;
        Some(
            e.radii
                .iter()
                .map(|&r| {
                    EnsembleSpec::uniform(
                        r,
                        e.count,
                        e.seed + seed_offset,
                        self.time.t_end,
                        e.samples,
                        self.mode,
                        e.recipe,
                    )
                })
                .collect(),
        )
    }

    /// Ensemble step settings. `"auto"` uses the budget of the largest
    /// initial datum.
    pub fn run_settings(&self, workers: Option<usize>) -> Result<RunSettings, ConfigError> {
        let e = self.ensemble.as_ref();
        let dt = match self.time.dt {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Named(_) => {
                let p = self.profile()?;
                let r = e
                    .map(|e| e.radii.iter().copied().fold(0.0, f64::max))
                    .unwrap_or(1.0);
                let recipe = e.map(|e| e.recipe).unwrap_or(BallRecipe::RandomH1);
                let seed = e.map(|e| e.seed).unwrap_or(0);
                let u = match recipe {
                    BallRecipe::RandomH1 => random_h1(self.n(), self.length(), r, seed),
                    BallRecipe::RandomBumps => random_bumps(self.n(), self.length(), r, seed),
                };
                let u = Self::built("initial", u)?;
                self.resolve_dt(&p, &u)
            }
        };
        Ok(RunSettings {
            dt,
            diagnostics: self.diagnostics.clone(),
            workers: workers.or(e.map(|e| e.workers)).unwrap_or(1),
        })
    }

    /// Horizons for the high-frequency limsup check.
    pub fn horizons(&self) -> Vec<f64> {
        match &self.ensemble {
            Some(e) if e.horizons.len() >= 2 => e.horizons.clone(),
            _ => vec![self.time.t_end / 2.0, self.time.t_end],
        }
    }

    pub fn verdict_thresholds(&self) -> VerdictThresholds {
        let e = self.ensemble.as_ref();
        VerdictThresholds {
            plateau_bound: e.map_or_else(default_plateau_bound, |e| e.plateau_bound),
            ratio_bound: e.map_or_else(default_ratio_bound, |e| e.ratio_bound),
            highfreq_range: e.and_then(|e| e.highfreq_range).map(|[a, b]| (a, b)),
            horizons: self.horizons(),
            recipe: e.map_or_else(default_recipe, |e| e.recipe),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
mode = "viscous"

[domain]
resolution = 64

[time]
dt = 0.001
t_end = 0.01

[viscosity]
expr = "1"
epsilon = 0.5

[forcing]
expr = "0"

[initial]
recipe = "expression"
expr = "sin(2*pi*x)"
"#;

    #[test]
    fn minimal_config_is_accepted() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.n(), 64);
        assert_eq!(cfg.time.dt, TimeStep::Fixed(0.001));
        let exp = cfg.experiment(0).unwrap();
        assert!((exp.initial.values()[16] - 1.0).abs() < 1e-14);
        let again = parse_config(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn syntax_error_has_line_number() {
        let text = MINIMAL.replace("t_end = 0.01", "t_end = = 0.01");
        match parse_config(&text) {
            Err(ConfigError::Syntax { line, .. }) => assert_eq!(line, 9),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn nonzero_mean_forcing_in_viscous_mode() {
        let text = MINIMAL.replace("expr = \"0\"", "expr = \"1 + cos(2*pi*x)\"");
        let err = parse_config(&text).unwrap_err();
        assert!(err.breaks(Hypothesis::MeanZeroForcing));
        assert!(err.to_string().contains("mean-zero"));
    }

    #[test]
    fn zero_epsilon_is_a_coercivity_violation() {
        let text = MINIMAL.replace("epsilon = 0.5", "epsilon = 0.0");
        assert!(parse_config(&text).unwrap_err().breaks(Hypothesis::Coercivity));
    }

    #[test]
    fn all_violations_are_collected() {
        let text = MINIMAL
            .replace("epsilon = 0.5", "epsilon = 0.0")
            .replace("expr = \"0\"", "expr = \"1\"")
            .replace("resolution = 64", "resolution = 64\nlength = -1.0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.violations().len() >= 2);
        assert!(err.breaks(Hypothesis::Coercivity));
    }

    #[test]
    fn damped_mode_needs_some_structure() {
        let text = MINIMAL
            .replace("mode = \"viscous\"", "mode = \"damped\"")
            .replace("expr = \"1\"", "expr = \"1 + 0.5*cos(2*pi*x)\"")
            .replace("epsilon = 0.5", "epsilon = 0.4\nflag = \"none\"")
            .replace("expr = \"0\"", "expr = \"0\"\nmu = 0.1");
        let err = parse_config(&text).unwrap_err();
        assert!(err.breaks(Hypothesis::EitherStructure), "{err}");
        assert!(!err.breaks(Hypothesis::Coercivity));
    }

    #[test]
    fn coefficient_lists() {
        let g = field_from_spec(None, Some(&[[0.0, 1.0, 0.0], [2.0, 0.5, 0.25]]), 32, 1.0).unwrap();
        let j = 3;
        let x = j as f64 / 32.0;
        let want = 1.0 + 0.5 * (4.0 * std::f64::consts::PI * x).cos()
            + 0.25 * (4.0 * std::f64::consts::PI * x).sin();
        assert!((g.values()[j] - want).abs() < 1e-13);
        assert!(field_from_spec(None, Some(&[[0.5, 1.0, 0.0]]), 32, 1.0).is_err());
        assert!(field_from_spec(Some("1"), Some(&[]), 32, 1.0).is_err());
    }

    #[test]
    fn auto_dt_and_unknown_keywords() {
        let text = MINIMAL.replace("dt = 0.001", "dt = \"auto\"");
        let cfg = parse_config(&text).unwrap();
        let exp = cfg.experiment(0).unwrap();
        assert!(exp.time.dt > 0.0 && exp.time.dt <= AUTO_DT_CAP);
        let text = MINIMAL.replace("dt = 0.001", "dt = \"fast\"");
        assert!(parse_config(&text).is_err());
        let text = MINIMAL.replace("[forcing]", "[forcing]\nbogus = 1");
        assert!(matches!(parse_config(&text), Err(ConfigError::Syntax { .. })));
    }
}
